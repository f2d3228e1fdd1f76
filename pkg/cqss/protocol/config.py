# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the configuration models of a circular secret sharing session.

This module provides the ProtocolConfig and AttackConfig classes, which hold every free
choice of a session: ring size, round count, control-mode probability, the fraction of
returned carriers drawn into the second sample, the seed, and the carrier variant
(single photons, EPR pairs, or d-level two-particle states).

The variant is a tagged union: the discriminator function inspects the raw value and
the matching Tag selects the model.
Strings such as "single", "epr" and "qudit:3" are accepted wherever a variant is.
"""

from typing import Annotated, Any, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Discriminator,
    Field,
    Tag,
    field_validator,
)

from cqss.defaults import (
    DEFAULT_F_SAMPLE2,
    DEFAULT_P_CONTROL,
    DEFAULT_ROUNDS,
    MAX_PHI,
    MAX_SEED,
    QUBIT,
)


class SinglePhotonVariant(BaseModel):
    """Polarized single photons prepared in one of the four BB84 states."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["single"] = "single"

    @property
    def dimension(self) -> int:
        return QUBIT

    @property
    def digit_base(self) -> int:
        return QUBIT

    def __str__(self):
        return self.kind


class EprVariant(BaseModel):
    """EPR pairs starting in the singlet, coded with the four Pauli operations."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["epr"] = "epr"

    @property
    def dimension(self) -> int:
        return QUBIT

    @property
    def digit_base(self) -> int:
        return QUBIT**2

    def __str__(self):
        return self.kind


class QuditVariant(BaseModel):
    """d-level two-particle states starting in the generalized Bell state 00."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["qudit"] = "qudit"
    d: int = Field(ge=2, le=16)

    @property
    def dimension(self) -> int:
        return self.d

    @property
    def digit_base(self) -> int:
        return self.d**2

    def __str__(self):
        return f"{self.kind}:{self.d}"


def parse_variant(value: Any) -> Any:
    """Turns "single", "epr" or "qudit:<d>" into the mapping form of a variant."""
    if isinstance(value, str):
        kind, _, d = value.strip().lower().partition(":")
        if kind == "qudit":
            return {"kind": kind, "d": int(d) if d else QUBIT}
        return {"kind": kind}
    return value


def get_variant_discriminator(v: Any) -> str:
    """Discriminator function for the carrier variant.

    Returns:
        "single", "epr" or "qudit", read from a parsed mapping or a variant model.

    Raises:
        ValueError: If the value names no known variant.
    """
    kind = v.get("kind") if isinstance(v, dict) else getattr(v, "kind", None)
    match kind:
        case "single" | "epr" | "qudit":
            return kind
        case _:
            raise ValueError(f"Unknown variant {v!r}; use single, epr or qudit:<d>")


Variant = Annotated[
    Union[
        Annotated[SinglePhotonVariant, Tag("single")],
        Annotated[EprVariant, Tag("epr")],
        Annotated[QuditVariant, Tag("qudit")],
    ],
    Discriminator(get_variant_discriminator),
]


class ProtocolConfig(BaseModel):
    """
    The free choices of one session.

    Attributes:
        num_agents (int): Agents on the ring between Alice's send and receive legs; 2
            gives the classic two-agent split.
        rounds (int): Carriers sent by Alice.
        p_control (float): Probability that an agent chooses control mode per carrier.
        f_sample2 (float): Fraction of returned all-code carriers drawn into s_2.
        rng_seed (int): 64-bit seed; a session is fully determined by it.
        variant (Variant): Carrier variant.
        abort_threshold (Optional[float]): Error rate above which the session aborts.
        check_fraction (Optional[float]): Fraction of the sifted key disclosed when
            agents verify their combined key against Alice's.
        max_workers (Optional[int]): Process pool size for running rounds; None runs
            in-process.
    """

    model_config = ConfigDict(frozen=True)

    num_agents: int = Field(default=2, ge=1)
    rounds: int = Field(default=DEFAULT_ROUNDS, ge=1)
    p_control: float = Field(default=DEFAULT_P_CONTROL, ge=0, lt=1)
    f_sample2: float = Field(default=DEFAULT_F_SAMPLE2, ge=0, lt=1)
    rng_seed: int = Field(default=0, ge=0, lt=MAX_SEED)
    variant: Variant = Field(default_factory=SinglePhotonVariant)
    abort_threshold: Optional[float] = Field(default=None, ge=0, le=1)
    check_fraction: Optional[float] = Field(default=None, gt=0, le=1)
    max_workers: Optional[int] = Field(default=None, ge=1)

    @field_validator("variant", mode="before")
    @classmethod
    def variant_from_string(cls, value):
        return parse_variant(value)


class AttackConfig(BaseModel):
    """
    An individual entangling attack by a dishonest agent.

    Attributes:
        adversary_agent (int): Index of the dishonest agent.
        intercept_leg (Optional[int]): Leg on which the ancilla is attached; leg i
            carries the carrier into agent i and leg num_agents returns it to Alice.
            Defaults to the leg leaving the adversary.
        phi (float): Attack strength in [0, pi/4].
        ancilla_basis (str): "Z" or "X", the basis the ancilla is measured in.
    """

    model_config = ConfigDict(frozen=True)

    adversary_agent: int = Field(default=0, ge=0)
    intercept_leg: Optional[int] = Field(default=None, ge=0)
    phi: float = Field(default=MAX_PHI, ge=0)
    ancilla_basis: Literal["Z", "X"] = "Z"

    @field_validator("ancilla_basis", mode="before")
    @classmethod
    def upper_basis(cls, value):
        return value.upper() if isinstance(value, str) else value

    @field_validator("phi")
    @classmethod
    def phi_in_range(cls, phi):
        # Tolerate pi/4 written with a few digits less precision.
        if phi > MAX_PHI + 1e-9:
            raise ValueError(f"phi must be in [0, pi/4], found {phi}")
        return min(phi, MAX_PHI)

    @property
    def leg(self) -> int:
        if self.intercept_leg is None:
            return self.adversary_agent + 1
        return self.intercept_leg

    def validate_ring(self, num_agents: int):
        """Raises ValueError when the attack does not fit a ring of `num_agents`."""
        if self.adversary_agent >= num_agents:
            raise ValueError(
                f"Adversary agent {self.adversary_agent} is not on a ring of "
                f"{num_agents} agents"
            )
        if self.leg > num_agents:
            raise ValueError(
                f"Leg {self.leg} does not exist on a ring of "
                f"{num_agents} agents"
            )
