# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for common utilities used across the cqss tool.

This module provides various utility functions that are used in multiple places
across the cqss tool. These include:

- env_vars_constructor: A YAML constructor resolving `${NAME}` references to
  environment variables inside configuration documents.

- stream_rng: A function deriving an independent, reproducible random stream from a
  session seed and a tuple of stream tags, so that rounds can run in any order or on
  any worker and still produce the same transcript.

- RoundStreams: The per-round streams of a session, read from one bit generator that
  is moved to a fixed position for each round.

- parse_digits / format_digits: Conversions between digit strings as written in
  configuration documents and the integer lists used for keys and messages.

- setup_logger: A function for setting up the logging configuration for the cqss
    tool. This includes setting the logging level and format based on environment
    variables or provided arguments.

These utilities are designed to be general-purpose and reusable, and they do not depend
on any specific features or components of the protocol simulator.
"""

import logging
import os
from logging import Logger
from typing import Any, List, Sequence

import numpy as np

from cqss.defaults import PATTERN_ENV_VARS

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_DIGIT_BASE = len(_DIGITS)


def env_vars_constructor(loader: Any, node: Any) -> str:
    """
    YAML Constructor for resolving Environment Variables

    Args:
        loader (Any): YAML Loader class object
        node (Any): node matching the regex pattern for environment variables

    Returns:
        The node with values resolved by environment variables lookup or node itself if
        environment variables are not found
    """
    value = loader.construct_scalar(node)
    for group in PATTERN_ENV_VARS.findall(value):
        value = value.replace(f"${{{group}}}", os.environ.get(group, group))
    return value


def stream_rng(seed: int, *tags: int) -> np.random.Generator:
    """
    Args:
        seed (int): 64-bit session seed
        tags (int): Stream identifiers, e.g. (ROUND_STREAM, round_id)

    Returns:
        A generator whose output depends only on the seed and the tags
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tags))


class RoundStreams:
    """
    The random streams of the rounds of one session, from a single bit generator.

    Round r reads the tagged stream from position r * 2**64 onwards, so its draws depend
    only on the seed, the tags and r, never on which rounds were drawn before. The
    generator returned for a round is reused for the next one.
    """

    def __init__(self, seed: int, *tags: int):
        self._bit_generator = np.random.PCG64(
            np.random.SeedSequence(seed, spawn_key=tags)
        )
        self._start = self._bit_generator.state
        self._generator = np.random.Generator(self._bit_generator)

    def __call__(self, round_id: int) -> np.random.Generator:
        self._bit_generator.state = self._start
        self._bit_generator.advance(int(round_id) << 64)
        return self._generator


def parse_digits(digits: str, base: int = 2) -> List[int]:
    """
    Args:
        digits (str): Digit string such as "1011"; whitespace, commas and underscores
            are ignored
        base (int): Digit base, at most 36

    Returns:
        List of integer digits
    """
    cleaned = [c for c in digits.lower() if c not in " ,_\n\t"]
    values = []
    for char in cleaned:
        value = _DIGITS.find(char)
        if value < 0 or value >= base:
            raise ValueError(f"'{char}' is not a base-{base} digit")
        values.append(value)
    return values


def format_digits(values: Sequence[int]) -> str:
    return "".join(_DIGITS[int(v)] for v in values)


def setup_logger(logger: Logger, verbose: bool = False):  # pragma: no cover
    """

    Args:
        logger (Logger): Instance of the logger.
        verbose (bool): If true, enable debug logging.

    Returns:

    """
    level = (
        logging.DEBUG if verbose else (os.environ.get("CQSS_LOG_LEVEL", "INFO").upper())
    )
    format_ = os.environ.get(
        "CQSS_LOG_FORMAT",
        "[%(asctime)s] [%(name)s] [%(processName)s] [%(levelname)s]: %(message)s",
    )

    log_handler = logging.StreamHandler()
    log_handler.setLevel(level)

    log_format = logging.Formatter(format_)
    log_handler.setFormatter(log_format)

    logger.setLevel(level)
    # subcommands may run several times in one process
    logger.handlers.clear()
    logger.addHandler(log_handler)
