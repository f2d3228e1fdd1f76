# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Split a secret with the session key and reconstruct it from the agents' keys.

Alice encrypts the message with her key, C_A = S_A + K_A digitwise. The agents
reconstruct it only together: the combination of all their keys recovers S_A, while
any single agent's key leaves a residual that is uniformly random. Exits 1 when the
key is shorter than the message or the joint reconstruction fails.
"""

import logging
import sys

from cqss.cli.arguments import (
    build_parser,
    exit_codes,
    experiment_builder,
    output_path,
    print_config,
    start,
)
from cqss.defaults import EXIT_ABORT, EXIT_OK, MESSAGE_STREAM, SPLIT_REPORT_FILE
from cqss.exceptions import ExperimentBuilderError
from cqss.protocol.session import (
    check_abort,
    check_samples,
    otp_reconstruct,
    otp_split,
    run_session,
    sift_keys,
)
from cqss.protocol.transcript import write_yaml
from cqss.utilities.common import format_digits, parse_digits, stream_rng

logger = logging.getLogger(__name__)


def parse_args(argv):
    return start(build_parser("cqss split-demo", __doc__.splitlines()[0]), argv)


def hamming_distance(a, b) -> int:
    return sum(x != y for x, y in zip(a, b))


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    experiment = experiment_builder(args, others).build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK

    config, split = experiment.session, experiment.split
    base = config.variant.digit_base
    if split.message is not None:
        try:
            message = parse_digits(split.message, base)
        except ValueError as err:
            raise ExperimentBuilderError(f"Invalid split.message: {err}") from err
    else:
        rng = stream_rng(config.rng_seed, MESSAGE_STREAM)
        message = rng.integers(base, size=split.length).tolist()

    transcript = run_session(config, experiment.attack)
    report = check_samples(transcript)
    check_abort(report, config.abort_threshold)
    keys = sift_keys(transcript, report)

    ciphertext = otp_split(message, keys)
    modulus = keys.component_modulus
    recovered = otp_reconstruct(ciphertext, keys.k_agents, base, modulus)
    single_share = {
        agent: hamming_distance(
            message, otp_reconstruct(ciphertext, [key], base, modulus)
        )
        for agent, key in enumerate(keys.k_agents)
    }
    round_trip = recovered == message

    write_yaml(
        {
            "digit_base": base,
            "message_length": len(message),
            "key_length": keys.length,
            "ciphertext": format_digits(ciphertext),
            "round_trip": round_trip,
            "single_share_distance": single_share,
            "expected_single_share_distance": len(message) * (1 - 1 / base),
        },
        output_path(args, SPLIT_REPORT_FILE),
    )
    if not round_trip:
        logger.error(
            f"Joint reconstruction differs from the message in "
            f"{hamming_distance(message, recovered)} digits"
        )
        return EXIT_ABORT
    logger.info(
        f"Reconstructed a {len(message)}-digit secret from "
        f"{len(keys.k_agents)} agent keys"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
