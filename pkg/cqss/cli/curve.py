# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Tabulate the closed-form detection/information trade-off without simulating."""

import logging
import sys

import numpy as np

from cqss.analysis import information_curve, write_curve
from cqss.cli.arguments import (
    build_parser,
    exit_codes,
    experiment_builder,
    output_path,
    print_config,
    start,
)
from cqss.defaults import CURVE_FILE, CURVE_POINTS, EXIT_OK, MAX_PHI

logger = logging.getLogger(__name__)


def parse_args(argv):
    parser = build_parser("cqss curve", __doc__.splitlines()[0])
    parser.add_argument(
        "--points",
        type=int,
        default=CURVE_POINTS,
        help="Grid size in [0, pi/4] when the configuration has no sweep grid",
    )
    return start(parser, argv)


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    experiment = experiment_builder(args, others).build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK

    grid = experiment.sweep.grid or np.linspace(0, MAX_PHI, args.points).tolist()
    write_curve(information_curve(grid), output_path(args, CURVE_FILE))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
