# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the arguments and experiment loading shared by the subcommands.

Every subcommand accepts the same configuration flags (`--config`, `--seed`, `--out`,
`--rounds`, `--phi`, `--agents`, `--variant`, `--print-config`, `--verbose`). Any
further `--key value` pairs are passed to the configuration hierarchy as context, as in
`cqss run --config conf/hiera.yaml --profile attack`.

Failures are mapped onto the exit-code contract by `exit_codes`: 1 for a protocol
abort, 2 for a usage or configuration error.
"""

import argparse
import functools
import logging
import os
import sys
from typing import Dict, List, Optional

import yaml

from cqss.builder.blueprint import ExperimentBlueprint
from cqss.builder.experiment import Experiment, ExperimentBuilder
from cqss.defaults import (
    CQSS_HIERA_FILE,
    EXIT_ABORT,
    EXIT_OK,
    EXIT_USAGE,
    HIERA_FILE,
    OUTPUT_DIR,
)
from cqss.exceptions import (
    BlueprintValidationError,
    ExperimentBlueprintError,
    ExperimentBuilderError,
    ProtocolError,
)
from cqss.utilities.common import setup_logger

logger = logging.getLogger(__name__)


def build_parser(
    prog: str, description: Optional[str] = None
) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=prog, description=description)
    parser.add_argument(
        "--config",
        "-c",
        required=False,
        default=None,
        help=f"Configuration document or hierarchy (default: ${CQSS_HIERA_FILE} or "
        f"{HIERA_FILE})",
    )
    parser.add_argument("--seed", type=int, default=None, help="64-bit session seed")
    parser.add_argument(
        "--out", "-o", default=OUTPUT_DIR, help="Directory the artifacts are written to"
    )
    parser.add_argument("--rounds", type=int, default=None, help="Rounds per session")
    parser.add_argument("--phi", type=float, default=None, help="Attack strength")
    parser.add_argument("--agents", type=int, default=None, help="Number of agents")
    parser.add_argument(
        "--variant", default=None, help="Carrier variant: single, epr or qudit:<d>"
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="Print the effective configuration and exit",
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Enable verbose logging"
    )
    return parser


def parse_context(others: List[str]) -> Dict[str, str]:
    """`--key value` pairs left over by argparse, with dashes in keys turned to _."""
    if len(others) % 2 or any(not key.startswith("--") for key in others[::2]):
        raise BlueprintValidationError(
            f"Context must be given as --key value pairs, found {others}"
        )
    return {
        others[i].removeprefix("--").replace("-", "_"): others[i + 1]
        for i in range(0, len(others), 2)
    }


def load_document(filename: Optional[str], context: Dict[str, str]) -> Dict:
    filename = filename or os.getenv(CQSS_HIERA_FILE)
    if filename is None and not os.path.exists(HIERA_FILE):
        logger.info(f"No {HIERA_FILE} found, using the default configuration")
        return {}

    blueprint = ExperimentBlueprint(filename)
    logger.info(f"Loading {blueprint.filename} with the following context...")
    for key, value in context.items():
        logger.info(f"{key}:\t{value}")
        blueprint.set_context(key, value)
    blueprint.create()
    return blueprint.document()


def experiment_builder(args: argparse.Namespace, others: List[str]) -> ExperimentBuilder:
    document = load_document(args.config, parse_context(others))
    return (
        ExperimentBuilder()
        .set_document(document)
        .set_seed(args.seed)
        .set_rounds(args.rounds)
        .set_agents(args.agents)
        .set_variant(args.variant)
        .set_phi(args.phi)
    )


def print_config(experiment: Experiment):
    yaml.safe_dump(experiment.document(), sys.stdout, sort_keys=False)


def output_path(args: argparse.Namespace, filename: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, filename)


def start(parser: argparse.ArgumentParser, argv: Optional[List[str]]):
    """Parses `argv` and sets up logging for the `cqss` package."""
    args, others = parser.parse_known_args(argv)
    setup_logger(logging.getLogger("cqss"), args.verbose)
    return args, others


def exit_codes(main):
    """Turns protocol and configuration failures of a subcommand into exit codes."""

    @functools.wraps(main)
    def wrapper(argv=None) -> int:
        try:
            code = main(argv)
        except ProtocolError as err:
            logger.error(f"Protocol aborted: {err}")
            return EXIT_ABORT
        except (
            ExperimentBlueprintError,
            ExperimentBuilderError,
            OSError,
            yaml.YAMLError,
        ) as err:
            logger.error(f"Invalid configuration: {err}")
            return EXIT_USAGE
        return EXIT_OK if code is None else code

    return wrapper
