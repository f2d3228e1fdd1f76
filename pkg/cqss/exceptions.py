# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for defining custom exceptions for the cqss tool.

This module provides the custom exception classes that are used throughout the cqss
tool to handle various error conditions. These exceptions include:

- QuantumStateError: A base exception for errors in the state and operator algebra.
- ProtocolError: A base exception for errors raised by a running protocol session,
including the abort raised when an error rate exceeds its threshold.
- ExperimentBlueprintError: A base exception for errors in configuration documents.
- ExperimentBuilderError: Thrown when a configuration cannot be turned into a session.
- AnalysisError: A base exception for errors when comparing simulation and theory.

Each exception class is derived from the built-in Python Exception class.
"""


class QuantumStateError(Exception):
    """Base class for all state and operator algebra exceptions"""


class InvalidStateError(QuantumStateError):
    """Thrown when a state, density matrix, operator or basis violates its invariants"""


class DimensionMismatchError(QuantumStateError):
    """Thrown when subsystem dimensions do not line up"""


class UnknownLabelError(QuantumStateError):
    """Thrown in case of an unknown ket or Bell label, or an index out of range"""


class ProtocolError(Exception):
    """Base class for all protocol session exceptions"""


class ProtocolAbortError(ProtocolError):
    """Thrown when an estimated error rate exceeds the abort threshold"""


class KeyLengthError(ProtocolError):
    """Thrown when a message is longer than the key available to encrypt it"""


class ExperimentBlueprintError(Exception):
    """Base class for all experiment blueprint exceptions"""


class BlueprintValidationError(ExperimentBlueprintError):
    """Thrown in case of validation errors in a hierarchical configuration file"""


class ExperimentBuilderError(Exception):
    """Thrown when a configuration is rejected while building an experiment"""


class AnalysisError(Exception):
    """Base class for analysis exceptions"""


class PhiMismatchError(AnalysisError):
    """Thrown when a simulation is compared against theory at a different phi"""
