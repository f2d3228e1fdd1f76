# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Run a secret sharing session and write its transcript, summary and keys.

The session runs with the configured variant and attack. After the eavesdropping
checks, the sifted keys are optionally verified by disclosing a fraction of them. The
artifacts are always written; the command then exits 1 if any error rate exceeds the
abort threshold or the key verification failed, and 0 otherwise.
"""

import argparse
import logging
import sys
from typing import Any, Dict, Optional

from cqss.adversary import simulate_attack
from cqss.analysis import session_summary
from cqss.builder.experiment import Experiment
from cqss.cli.arguments import (
    build_parser,
    exit_codes,
    experiment_builder,
    output_path,
    print_config,
    start,
)
from cqss.defaults import (
    EXIT_ABORT,
    EXIT_OK,
    KEYS_FILE,
    SUMMARY_FILE,
    TRANSCRIPT_FILE,
    VERIFY_STREAM,
)
from cqss.exceptions import ProtocolAbortError
from cqss.protocol.session import (
    check_abort,
    check_samples,
    run_session,
    sift_keys,
    verify_key_agreement,
)
from cqss.protocol.transcript import keys_document, write_transcript, write_yaml
from cqss.utilities.common import stream_rng

logger = logging.getLogger(__name__)


def parse_args(argv):
    return start(build_parser("cqss run", __doc__.splitlines()[0]), argv)


def run_protocol(
    experiment: Experiment,
    args: argparse.Namespace,
    extra: Optional[Dict[str, Any]] = None,
) -> int:
    config, attack = experiment.session, experiment.attack
    outcome = None
    if attack is None:
        transcript = run_session(config)
    else:
        transcript, outcome = simulate_attack(config, attack)

    report = check_samples(transcript)
    keys = sift_keys(transcript, report)
    summary = session_summary(transcript, report, keys, outcome)

    passed = True
    if config.check_fraction is not None:
        rng = stream_rng(config.rng_seed, VERIFY_STREAM)
        passed, disclosed, keys = verify_key_agreement(keys, config.check_fraction, rng)
        summary["verification"] = {
            "passed": passed,
            "disclosed": len(disclosed),
            "remaining_key_length": keys.length,
        }

    aborted = None
    try:
        check_abort(report, config.abort_threshold)
    except ProtocolAbortError as err:
        aborted = err
    summary["aborted"] = aborted is not None or not passed
    summary.update(extra or {})

    write_transcript(transcript, output_path(args, TRANSCRIPT_FILE))
    write_yaml(summary, output_path(args, SUMMARY_FILE))
    write_yaml(keys_document(keys), output_path(args, KEYS_FILE))

    if aborted is not None:
        raise aborted
    if not passed:
        logger.error("Key verification failed: Alice's key and the agents' disagree")
        return EXIT_ABORT
    logger.info(f"Session complete: {keys.length} key digits")
    return EXIT_OK


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    experiment = experiment_builder(args, others).build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK
    return run_protocol(experiment, args)


if __name__ == "__main__":
    sys.exit(main())
