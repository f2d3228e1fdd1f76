# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for defining default constants for the cqss tool.

This module defines the constants that are used as default values or identifiers
across the cqss tool. These include:

- HIERA_FILE: The default filename for the configuration document.
- CQSS_HIERA_FILE: The environment variable name for specifying a custom
    configuration document.
- SESSION, ATTACK, SWEEP, SPLIT, QUDIT: The top-level sections of a configuration
    document.
- Numerical tolerances shared by the state algebra and its tests.
- Protocol defaults (control-mode probability, second sample fraction).
- Exit codes of the command line interface.
- TRANSCRIPT_HEADER: The version line written at the top of every transcript.

These constants help maintain consistency and readability across the cqss codebase.
"""

import math
import re

HIERA_FILE = "hiera.yaml"
CQSS_HIERA_FILE = "CQSS_HIERA_FILE"
PATTERN_ENV_VARS = re.compile(r".*?\${(.*?)}.*?")

# Configuration sections
SESSION = "session"
ATTACK = "attack"
SWEEP = "sweep"
SPLIT = "split"
QUDIT = "qudit"
DEFAULT_PROFILE = "default"

# Tolerances
NORM_TOL = 1e-12
ALGEBRA_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

# Protocol
DEFAULT_P_CONTROL = 0.1
DEFAULT_F_SAMPLE2 = 0.1
DEFAULT_ROUNDS = 10000
MAX_SEED = 2**64
MAX_PHI = math.pi / 4
QUBIT = 2
BASES = ("Z", "X")
GHZ_BASELINE_EFFICIENCY = 0.5
LOW_CONFIDENCE_SAMPLES = 100
Z_SCORE_FLAG = 3.0

# Random stream tags, combined with the session seed
ROUND_STREAM = 0
SAMPLE_STREAM = 1
MESSAGE_STREAM = 2
VERIFY_STREAM = 3
ALGEBRA_STREAM = 4

# Exit codes
EXIT_OK = 0
EXIT_ABORT = 1
EXIT_USAGE = 2

# Artifacts
OUTPUT_DIR = "."
CURVE_POINTS = 101
TRANSCRIPT_HEADER = "cqss-transcript v1"
TRANSCRIPT_FILE = "transcript.jsonl"
SUMMARY_FILE = "summary.yaml"
KEYS_FILE = "keys.yaml"
CURVE_FILE = "curve.csv"
QUDIT_REPORT_FILE = "qudit_check.yaml"
SPLIT_REPORT_FILE = "split_demo.yaml"
CURVE_COLUMNS = (
    "phi",
    "epsilon_B_theory",
    "epsilon_B_empirical",
    "I_B_theory",
    "I_empirical_estimate",
    "n_conclusive",
)
