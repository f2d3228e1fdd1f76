# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the records produced by a circular secret sharing session.

This module provides the event log of a session and the results derived from it:

- RoundRecord: the lifecycle of one single photon, from Alice's preparation through
  every agent it reached to Alice's final measurement.
- EprRoundRecord: the same for a two-particle carrier, where Alice keeps particle H and
  the ring carries particle T.
- SessionTranscript: the configuration, the attack (if any) and every round record.
- SampleReport: the control-mode samples of every agent (s_1b, s_1c, ...) and the
  second sample s_2 of returned carriers, with their error estimates.
- KeyMaterial: the sifted key digits of Alice and of every agent.

Both record kinds answer the same questions (which agent measured, was the check
conclusive, did the returned carrier decode to the combined coding labels) so that
sampling and sifting work on either.
"""

import math
from enum import Enum
from functools import reduce
from typing import Annotated, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from cqss.exceptions import UnknownLabelError
from cqss.protocol.config import AttackConfig, ProtocolConfig

Basis = Literal["Z", "X"]


class Mode(str, Enum):
    CONTROL = "control"
    CODE = "code"


class BellLabel(NamedTuple):
    """Index (n, m) of the generalized Bell state: phase n, shift m."""

    n: int
    m: int

    @classmethod
    def named(cls, name: str) -> "BellLabel":
        try:
            return BELL_NAMES[name.lower()]
        except KeyError as err:
            raise UnknownLabelError(f"Unknown Bell state name: {name}") from err

    @property
    def name(self) -> Optional[str]:
        """Conventional two-qubit name, if the label has one."""
        return _BELL_NAME_OF.get(self)


BELL_NAMES = {
    "phi_plus": BellLabel(0, 0),
    "phi_minus": BellLabel(1, 0),
    "psi_plus": BellLabel(0, 1),
    "psi_minus": BellLabel(1, 1),
}
_BELL_NAME_OF = {label: name for name, label in BELL_NAMES.items()}

# Pauli coding index i -> the (n, m) shift it applies: I, i*sigma_y, sigma_x, sigma_z
PAULI_SHIFTS = {
    0: BellLabel(0, 0),
    1: BellLabel(1, 1),
    2: BellLabel(0, 1),
    3: BellLabel(1, 0),
}
_PAULI_OF_SHIFT = {shift: index for index, shift in PAULI_SHIFTS.items()}


class ControlCheck(NamedTuple):
    agent: int
    basis: str
    conclusive: bool
    error: bool


def combine_shares(
    shares: Sequence[Sequence[int]], digit_base: int, component_modulus: int
) -> List[int]:
    """
    Args:
        shares (Sequence[Sequence[int]]): Equal-length digit strings
        digit_base (int): Base of every digit, a power of component_modulus
        component_modulus (int): Modulus of each base-component_modulus component

    Returns:
        The componentwise sum of the shares; XOR for bits and Pauli labels, the
        componentwise mod-d sum of (n, m) labels for d-level carriers
    """
    components = round(math.log(digit_base, component_modulus))
    weights = component_modulus ** np.arange(components)
    if not shares:
        return []
    stacked = np.asarray(shares, dtype=np.int64)
    split = (stacked[..., None] // weights) % component_modulus
    summed = split.sum(axis=0) % component_modulus
    return (summed * weights).sum(axis=-1).astype(int).tolist()


class AgentEntry(BaseModel):
    """What one agent did to a single photon."""

    model_config = ConfigDict(frozen=True)

    mode: Mode
    coding_label: Optional[int] = None
    control_basis: Optional[Basis] = None
    control_outcome: Optional[int] = None

    @model_validator(mode="after")
    def fields_match_mode(self):
        if self.mode is Mode.CODE:
            assert self.coding_label is not None, "code entries carry a label"
            assert self.control_basis is None and self.control_outcome is None
        else:
            assert self.coding_label is None, "control entries carry no label"
            assert self.control_basis is not None and self.control_outcome is not None
        return self


class _Round(BaseModel):
    """Ring invariants shared by both carrier kinds."""

    model_config = ConfigDict(frozen=True)

    round_id: int = Field(ge=0)
    ancilla_outcome: Optional[int] = None

    @property
    def control_agent(self) -> Optional[int]:
        last = self.agents[-1] if self.agents else None
        return len(self.agents) - 1 if last and last.mode is Mode.CONTROL else None

    @property
    def all_code(self) -> bool:
        return self.control_agent is None

    def check_ring(self):
        modes = [entry.mode for entry in self.agents]
        assert Mode.CONTROL not in modes[:-1], "a control entry ends the circulation"


class RoundRecord(_Round):
    """
    The lifecycle of one single photon.

    Attributes:
        alice_basis (str): Basis Alice prepared and measures in.
        alice_bit (int): 0 for the + state, 1 for the - state.
        agents (List[AgentEntry]): One entry per agent the photon reached, in ring
            order; a control entry is always the last.
        returned (bool): False iff some agent measured the photon.
        alice_outcome (Optional[int]): Alice's outcome, present iff returned.
        ancilla_outcome (Optional[int]): The adversary's ancilla outcome, if attached.
    """

    kind: Literal["photon"] = "photon"
    alice_basis: Basis
    alice_bit: int = Field(ge=0, le=1)
    agents: List[AgentEntry]
    returned: bool
    alice_outcome: Optional[int] = None

    @model_validator(mode="after")
    def circulation(self):
        self.check_ring()
        assert self.returned == self.all_code, "returned iff nobody measured"
        assert (self.alice_outcome is not None) == self.returned
        return self

    @property
    def labels(self) -> List[int]:
        return [e.coding_label for e in self.agents if e.mode is Mode.CODE]

    def agent_digit(self, agent: int) -> Optional[int]:
        """Key digit of `agent`, if the photon reached it in coding mode."""
        if agent >= len(self.agents) or self.agents[agent].mode is not Mode.CODE:
            return None
        return self.agents[agent].coding_label

    def control_check(self) -> Optional[ControlCheck]:
        agent = self.control_agent
        if agent is None:
            return None
        entry = self.agents[agent]
        conclusive = entry.control_basis == self.alice_basis
        expected = reduce(lambda a, b: a ^ b, self.labels, self.alice_bit)
        return ControlCheck(
            agent=agent,
            basis=entry.control_basis,
            conclusive=conclusive,
            error=conclusive and entry.control_outcome != expected,
        )

    def coding_error(self, declared: Optional[Sequence[int]] = None) -> bool:
        """Checks Alice's outcome against the labels the agents announced."""
        labels = self.labels if declared is None else declared
        expected = reduce(lambda a, b: a ^ b, labels, self.alice_bit)
        return self.alice_outcome != expected

    def key_digits(self) -> Tuple[int, List[int]]:
        return self.alice_bit ^ self.alice_outcome, self.labels


class EprAgentEntry(BaseModel):
    """What one agent did to the travelling particle T."""

    model_config = ConfigDict(frozen=True)

    mode: Mode
    coding_label: Optional[BellLabel] = None
    control_basis: Optional[Basis] = None
    control_outcome: Optional[int] = None

    @model_validator(mode="after")
    def fields_match_mode(self):
        if self.mode is Mode.CODE:
            assert self.coding_label is not None, "code entries carry a label"
            assert self.control_basis is None and self.control_outcome is None
        else:
            assert self.coding_label is None, "control entries carry no label"
            assert self.control_basis is not None and self.control_outcome is not None
        return self


class EprRoundRecord(_Round):
    """
    The lifecycle of one two-particle carrier.

    Attributes:
        variant (str): "epr" (Pauli coding, 2-bit digits) or "qudit" ((n, m) coding,
            base-d^2 digits).
        d (int): Particle dimension.
        reference (BellLabel): Bell state Alice prepared.
        agents (List[EprAgentEntry]): One entry per agent particle T reached.
        alice_bell_outcome (Optional[BellLabel]): Alice's Bell measurement on (H, T),
            present iff every agent coded.
        alice_control_outcome (Optional[int]): Alice's outcome on H in the basis the
            measuring agent announced, present iff some agent measured.
    """

    kind: Literal["pair"] = "pair"
    variant: Literal["epr", "qudit"]
    d: int = Field(ge=2)
    reference: BellLabel
    agents: List[EprAgentEntry]
    alice_bell_outcome: Optional[BellLabel] = None
    alice_control_outcome: Optional[int] = None

    @model_validator(mode="after")
    def circulation(self):
        self.check_ring()
        assert (self.alice_bell_outcome is not None) == self.all_code
        assert (self.alice_control_outcome is not None) == (not self.all_code)
        return self

    @property
    def returned(self) -> bool:
        return self.all_code

    @property
    def labels(self) -> List[BellLabel]:
        return [e.coding_label for e in self.agents if e.mode is Mode.CODE]

    def _shift(self, start: BellLabel, labels: Sequence[BellLabel]) -> BellLabel:
        n = (start.n + sum(label.n for label in labels)) % self.d
        m = (start.m + sum(label.m for label in labels)) % self.d
        return BellLabel(n, m)

    def decoded(self) -> BellLabel:
        """Alice's Bell outcome relative to the state she prepared."""
        outcome = self.alice_bell_outcome
        return BellLabel(
            (outcome.n - self.reference.n) % self.d,
            (outcome.m - self.reference.m) % self.d,
        )

    def digit(self, label: BellLabel) -> int:
        if self.variant == "epr":
            return _PAULI_OF_SHIFT[label]
        return label.n * self.d + label.m

    def control_check(self) -> Optional[ControlCheck]:
        agent = self.control_agent
        if agent is None:
            return None
        entry = self.agents[agent]
        state = self._shift(self.reference, self.labels)
        # Z outcomes of H and T differ by the shift m, X outcomes by the phase n.
        expected = state.m % 2 if entry.control_basis == "Z" else state.n % 2
        parity = entry.control_outcome ^ self.alice_control_outcome
        return ControlCheck(
            agent=agent,
            basis=entry.control_basis,
            conclusive=True,
            error=parity != expected,
        )

    def agent_digit(self, agent: int) -> Optional[int]:
        if agent >= len(self.agents) or self.agents[agent].mode is not Mode.CODE:
            return None
        return self.digit(self.agents[agent].coding_label)

    def label_of(self, digit: int) -> BellLabel:
        if self.variant == "epr":
            return PAULI_SHIFTS[digit]
        return BellLabel(*divmod(digit, self.d))

    def coding_error(self, declared: Optional[Sequence[int]] = None) -> bool:
        labels = (
            self.labels if declared is None else [self.label_of(d) for d in declared]
        )
        return self.decoded() != self._shift(BellLabel(0, 0), labels)

    def key_digits(self) -> Tuple[int, List[int]]:
        return self.digit(self.decoded()), [self.digit(label) for label in self.labels]


Record = Annotated[Union[RoundRecord, EprRoundRecord], Field(discriminator="kind")]


class SessionTranscript(BaseModel):
    """
    Attributes:
        config (ProtocolConfig): Configuration the session ran with.
        records (List[Record]): One record per round, in round order.
        adversary (Optional[AttackConfig]): Attack applied during the session.
    """

    model_config = ConfigDict(frozen=True)

    config: ProtocolConfig
    records: List[Record]
    adversary: Optional[AttackConfig] = None

    @model_validator(mode="after")
    def one_record_per_round(self):
        assert len(self.records) == self.config.rounds, "one record per round"
        return self

    @property
    def returned_fraction(self) -> float:
        return sum(record.returned for record in self.records) / len(self.records)


class ControlSample(BaseModel):
    """
    The control-mode sample of one agent (s_1b for agent 0, s_1c for agent 1, ...).

    The agent that measured publishes its own outcomes, whichever sample it feeds.
    Conclusive rounds are those where the agent's basis matched Alice's. For EPR
    carriers Alice measures H in the agent's basis, so every check is conclusive.
    """

    agent: int
    positions: List[int] = Field(default_factory=list)
    conclusive: int = 0
    errors: int = 0
    z_conclusive: int = 0
    z_errors: int = 0
    x_conclusive: int = 0
    x_errors: int = 0

    @model_validator(mode="after")
    def counts(self):
        assert self.conclusive <= len(self.positions)
        assert self.errors <= self.conclusive
        return self

    @computed_field
    @property
    def error_rate(self) -> float:
        return self.errors / self.conclusive if self.conclusive else 0.0


class CodingSample(BaseModel):
    """
    The second sample s_2: returned all-code rounds whose coding operations every agent
    discloses (s_2b, s_2c, ...).
    """

    positions: List[int] = Field(default_factory=list)
    declared: List[List[int]] = Field(default_factory=list)
    errors: int = 0

    @computed_field
    @property
    def error_rate(self) -> float:
        return self.errors / len(self.positions) if self.positions else 0.0


class SampleReport(BaseModel):
    """
    Results of the two eavesdropping checks.

    The fields are ordered as the announcements are made: each agent's control sample
    (for a downstream agent, its positions are announced before upstream agents
    disclose their operations on them, and only then its bases and outcomes), followed
    by the second sample.
    """

    s1: List[ControlSample]
    s2: CodingSample

    @property
    def error_rates(self) -> dict:
        rates = {f"s1[{sample.agent}]": sample.error_rate for sample in self.s1}
        rates["s2"] = self.s2.error_rate
        return rates

    @property
    def max_error_rate(self) -> float:
        return max(self.error_rates.values())

    @property
    def sampled_positions(self) -> set:
        positions = set(self.s2.positions)
        for sample in self.s1:
            positions.update(sample.positions)
        return positions


class KeyMaterial(BaseModel):
    """
    Sifted keys.

    Attributes:
        positions (List[int]): Round ids contributing a digit.
        k_alice (List[int]): Alice's key K_A.
        k_agents (List[List[int]]): One key per agent (K_B, K_C, ...).
        digit_base (int): 2 for photons, 4 for EPR pairs, d^2 for d-level pairs.
        component_modulus (int): Modulus of each digit component; keys combine
            componentwise modulo it.
    """

    model_config = ConfigDict(frozen=True)

    positions: List[int]
    k_alice: List[int]
    k_agents: List[List[int]]
    digit_base: int = 2
    component_modulus: int = 2

    @model_validator(mode="after")
    def equal_lengths(self):
        assert len(self.k_alice) == len(self.positions), "one digit per position"
        assert all(len(k) == len(self.positions) for k in self.k_agents)
        return self

    @property
    def length(self) -> int:
        return len(self.positions)

    @property
    def is_empty(self) -> bool:
        return not self.positions

    def combined_agent_key(self, agents: Optional[Sequence[int]] = None) -> List[int]:
        agents = range(len(self.k_agents)) if agents is None else agents
        shares = [self.k_agents[i] for i in agents]
        if not shares:
            return [0] * self.length
        return combine_shares(shares, self.digit_base, self.component_modulus)

    def discard(self, positions: Sequence[int]) -> "KeyMaterial":
        """A copy without the digits at the given round ids."""
        dropped = set(positions)
        keep = [i for i, p in enumerate(self.positions) if p not in dropped]
        return self.model_copy(
            update={
                "positions": [self.positions[i] for i in keep],
                "k_alice": [self.k_alice[i] for i in keep],
                "k_agents": [[key[i] for i in keep] for key in self.k_agents],
            }
        )
