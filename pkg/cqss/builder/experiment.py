# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for building validated experiments from configuration documents.

This module provides the ExperimentBuilder class, which collects the sections of a
configuration document and any command line overrides and validates them into an
Experiment: the ProtocolConfig of the session, the optional AttackConfig, and the
settings of the attack sweep, the secret splitting demo and the qudit algebra check.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from cqss.defaults import ATTACK, MAX_PHI, QUBIT, QUDIT, SESSION, SPLIT, SWEEP
from cqss.exceptions import ExperimentBuilderError
from cqss.protocol.config import AttackConfig, ProtocolConfig

logger = logging.getLogger(__name__)


class SweepConfig(BaseModel):
    """
    Attributes:
        phis (List[float]): Explicit attack strengths; takes precedence over `points`.
        points (Optional[int]): Number of evenly spaced strengths in [0, stop].
        stop (float): Largest strength of the evenly spaced grid.
        rounds (Optional[int]): Rounds per strength; defaults to the session rounds.
    """

    model_config = ConfigDict(frozen=True)

    phis: List[float] = Field(default_factory=list)
    points: Optional[int] = Field(default=None, ge=1)
    stop: float = Field(default=MAX_PHI, ge=0)
    rounds: Optional[int] = Field(default=None, ge=1)

    @field_validator("phis")
    @classmethod
    def non_negative(cls, phis):
        if any(phi < 0 for phi in phis):
            raise ValueError(f"Attack strengths must be >= 0, found {phis}")
        return phis

    @property
    def grid(self) -> List[float]:
        if self.phis or not self.points:
            return list(self.phis)
        return np.linspace(0, self.stop, self.points).tolist()


class SplitConfig(BaseModel):
    """
    Attributes:
        message (Optional[str]): Digits of the secret, in the session's digit base.
        length (int): Length of a random secret, used when no message is given.
    """

    model_config = ConfigDict(frozen=True)

    message: Optional[str] = None
    length: int = Field(default=128, ge=1)


class QuditCheckConfig(BaseModel):
    """
    Attributes:
        dimensions (List[int]): Particle dimensions checked exhaustively.
        max_agents (int): Largest number of coding agents in the round trip check.
    """

    model_config = ConfigDict(frozen=True)

    dimensions: List[int] = Field(default_factory=lambda: [2, 3, 5])
    max_agents: int = Field(default=3, ge=1)

    @field_validator("dimensions")
    @classmethod
    def at_least_two(cls, dimensions):
        if not dimensions or any(d < 2 for d in dimensions):
            raise ValueError(f"Dimensions must be >= 2, found {dimensions}")
        return dimensions


class Experiment(BaseModel):
    model_config = ConfigDict(frozen=True)

    session: ProtocolConfig
    attack: Optional[AttackConfig] = None
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    split: SplitConfig = Field(default_factory=SplitConfig)
    qudit: QuditCheckConfig = Field(default_factory=QuditCheckConfig)

    def document(self) -> Dict[str, Any]:
        """The effective configuration with every default spelled out."""
        return self.model_dump(mode="json")


class ExperimentBuilder:
    """A class to build a validated Experiment"""

    def __init__(self):
        self.session = {}
        self.attack = None
        self.sweep = {}
        self.split = {}
        self.qudit = {}

    def set_document(self, document: Dict[str, Any]):
        """

        Args:
            document (Dict[str, Any]): Configuration sections keyed by section name

        Returns:
            An instance of the `ExperimentBuilder` class.
        """
        self.set_session(document.get(SESSION) or {})
        if document.get(ATTACK) is not None:
            self.set_attack(document[ATTACK])
        self.sweep.update(document.get(SWEEP) or {})
        self.split.update(document.get(SPLIT) or {})
        self.qudit.update(document.get(QUDIT) or {})
        return self

    def set_session(self, session: Dict[str, Any]):
        self.session.update(session)
        return self

    def set_attack(self, attack: Dict[str, Any]):
        self.attack = {**(self.attack or {}), **attack}
        return self

    def set_seed(self, seed: Optional[int]):
        return self._override_session("rng_seed", seed)

    def set_rounds(self, rounds: Optional[int]):
        return self._override_session("rounds", rounds)

    def set_agents(self, agents: Optional[int]):
        return self._override_session("num_agents", agents)

    def set_variant(self, variant: Optional[str]):
        return self._override_session("variant", variant)

    def set_phi(self, phi: Optional[float]):
        """Overrides the attack strength; adds an attack with defaults if none is set."""
        if phi is not None:
            self.set_attack({"phi": phi})
        return self

    def _override_session(self, key: str, value: Any):
        if value is not None:
            logger.debug(f"Overriding session {key} with {value}")
            self.session[key] = value
        return self

    def build(self) -> Experiment:
        """

        Returns:
            The validated Experiment

        Raises:
            ExperimentBuilderError: If any section fails validation, or the attack does
                not fit the ring or the variant.
        """
        try:
            experiment = Experiment(
                session=self.session,
                attack=self.attack,
                sweep=self.sweep,
                split=self.split,
                qudit=self.qudit,
            )
            if experiment.attack is not None:
                experiment.attack.validate_ring(experiment.session.num_agents)
                if experiment.session.variant.dimension != QUBIT:
                    raise ValueError(
                        f"Attacks are only simulated for d = 2, found "
                        f"{experiment.session.variant}"
                    )
        except (ValidationError, ValueError) as err:
            raise ExperimentBuilderError(f"Invalid configuration: {err}") from err
        return experiment
