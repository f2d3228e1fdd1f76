# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Check the d-level dense-coding algebra exhaustively for the configured dimensions."""

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
from cqss.defaults import ALGEBRA_STREAM, EXIT_ABORT, EXIT_OK, QUDIT_REPORT_FILE
from cqss.epr_qudit import algebra_check
from cqss.protocol.transcript import write_yaml
from cqss.utilities.common import stream_rng

logger = logging.getLogger(__name__)


def parse_args(argv):
    return start(build_parser("cqss qudit-check", __doc__.splitlines()[0]), argv)


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    experiment = experiment_builder(args, others).build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK

    seed = experiment.session.rng_seed
    reports = [
        algebra_check(
            d, stream_rng(seed, ALGEBRA_STREAM, d), experiment.qudit.max_agents
        )
        for d in experiment.qudit.dimensions
    ]
    write_yaml(
        {"dimensions": [report.model_dump() for report in reports]},
        output_path(args, QUDIT_REPORT_FILE),
    )
    failed = [report.d for report in reports if not report.passed]
    if failed:
        logger.error(f"Dense-coding algebra failed for d in {failed}")
        return EXIT_ABORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
