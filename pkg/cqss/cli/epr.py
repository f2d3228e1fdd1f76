# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Run an entanglement-based session (EPR pairs, or qudit pairs with --variant).

Behaves like `cqss run`, except that a configured single-photon variant is replaced
by the EPR variant. The summary also reports the dense-coding capacity of the pair.
"""

import logging
import math
import sys

from cqss.cli.arguments import (
    build_parser,
    exit_codes,
    experiment_builder,
    print_config,
    start,
)
from cqss.cli.run import run_protocol
from cqss.defaults import EXIT_OK
from cqss.epr_qudit import channel_capacity

logger = logging.getLogger(__name__)


def parse_args(argv):
    return start(build_parser("cqss epr", __doc__.splitlines()[0]), argv)


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    builder = experiment_builder(args, others)
    experiment = builder.build()
    if experiment.session.variant.kind == "single":
        logger.info("Switching the single-photon variant to epr")
        experiment = builder.set_variant("epr").build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK

    variant = experiment.session.variant
    dense_coding = {
        "capacity_bits": channel_capacity(variant.dimension, variant.dimension),
        "bits_per_digit": math.log2(variant.digit_base),
    }
    return run_protocol(experiment, args, {"dense_coding": dense_coding})


if __name__ == "__main__":
    sys.exit(main())
