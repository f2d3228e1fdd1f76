# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Simulate the entangling attack over a grid of strengths and tabulate the results.

For every phi of the sweep grid, a session runs with the configured attack at that
strength. The curve file holds the closed-form detection probability and information
next to the simulated values; the summary holds the z-scores of every point.
"""

import logging
import sys

from pydantic import ValidationError

from cqss.adversary import simulate_attack
from cqss.analysis import compare_theory, information_curve, write_curve
from cqss.cli.arguments import (
    build_parser,
    exit_codes,
    experiment_builder,
    output_path,
    print_config,
    start,
)
from cqss.defaults import CURVE_FILE, EXIT_OK, EXIT_USAGE, SUMMARY_FILE
from cqss.exceptions import ExperimentBuilderError
from cqss.protocol.config import AttackConfig
from cqss.protocol.transcript import write_yaml

logger = logging.getLogger(__name__)


def parse_args(argv):
    return start(build_parser("cqss attack-sweep", __doc__.splitlines()[0]), argv)


@exit_codes
def main(argv=None):
    args, others = parse_args(argv)
    experiment = experiment_builder(args, others).build()
    if args.print_config:
        print_config(experiment)
        return EXIT_OK

    grid = experiment.sweep.grid
    if not grid:
        logger.error("The sweep grid is empty; set sweep.phis or sweep.points")
        return EXIT_USAGE

    rounds = experiment.sweep.rounds or experiment.session.rounds
    config = experiment.session.model_copy(update={"rounds": rounds})
    base = (experiment.attack or AttackConfig()).model_dump()
    try:
        attacks = [AttackConfig(**{**base, "phi": phi}) for phi in grid]
    except ValidationError as err:
        raise ExperimentBuilderError(f"Invalid sweep grid: {err}") from err

    outcomes = []
    for attack in attacks:
        _, outcome = simulate_attack(config, attack)
        outcomes.append(outcome)

    points = information_curve(grid, outcomes)
    comparisons = [compare_theory(outcome, outcome.phi) for outcome in outcomes]
    write_curve(points, output_path(args, CURVE_FILE))
    write_yaml(
        {
            "rounds_per_point": rounds,
            "rng_seed": config.rng_seed,
            "points": [comparison.model_dump() for comparison in comparisons],
        },
        output_path(args, SUMMARY_FILE),
    )
    flagged = sum(comparison.flagged for comparison in comparisons)
    logger.info(f"Swept {len(grid)} strengths, {flagged} flagged")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
