# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the entanglement-based variant of circular secret sharing.

Alice prepares a two-particle state, keeps particle H and sends particle T round the
ring. Agents in coding mode apply a local operation to T; when T comes back, Alice
measures (H, T) in the Bell basis and reads the combined operation off the outcome
(dense coding: log2(d^2) bits per round). An agent in control mode measures T in Z
or X and Alice measures H in the same basis; the parity of the two outcomes is fixed
by the Bell state the pair is in.

The d-level Bell states and operators are

    |Psi_nm> = sum_j exp(2 pi i j n / d) |j> (x) |j + m mod d> / sqrt(d)
    U_nm = sum_j exp(2 pi i j n / d) |j + m mod d><j|

so that (I (x) U_n'm') |Psi_nm> equals |Psi_(n+n')(m+m')> up to a global phase. For
d = 2 the four Bell states are Psi_00 = phi+, Psi_10 = phi-, Psi_01 = psi+ and
Psi_11 = psi-, exactly, and the Pauli coding operations I, i sigma_y, sigma_x and
sigma_z act as the shifts (0, 0), (1, 1), (0, 1) and (1, 0).

The EPR variant starts from psi- and codes with the Pauli operations (2-bit digits);
the qudit variant starts from Psi_00 and codes with U_nm (digits n d + m). Control
mode is only defined for d = 2.
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from multipledispatch import dispatch
from pydantic import BaseModel, Field

from cqss.adversary import attach_ancilla
from cqss.defaults import BASES, QUBIT
from cqss.exceptions import DimensionMismatchError, UnknownLabelError
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.protocol.executor import execute_rounds
from cqss.protocol.records import (
    BELL_NAMES,
    PAULI_SHIFTS,
    BellLabel,
    EprAgentEntry,
    EprRoundRecord,
    Mode,
    SessionTranscript,
)
from cqss.qstate import (
    MeasBasis,
    PureState,
    UnitaryOp,
    apply,
    measure,
    outcome_probabilities,
    states_equal_up_to_phase,
)

logger = logging.getLogger(__name__)

_PAULI_MATRICES = {
    0: [[1, 0], [0, 1]],
    1: [[0, 1], [-1, 0]],
    2: [[0, 1], [1, 0]],
    3: [[1, 0], [0, -1]],
}


@dispatch(BellLabel)
def as_bell_label(label):
    return label


@dispatch(str)
def as_bell_label(label):  # noqa: F811
    return BellLabel.named(label)


@dispatch(tuple)
def as_bell_label(label):  # noqa: F811
    return BellLabel(*label)


@dispatch(int, int)
def as_bell_label(n, m):  # noqa: F811
    return BellLabel(n, m)


def _check_label(label: BellLabel, d: int) -> BellLabel:
    if d < 2:
        raise DimensionMismatchError(f"Bell states need d >= 2, found {d}")
    if not (0 <= label.n < d and 0 <= label.m < d):
        raise UnknownLabelError(f"Label {tuple(label)} out of range for d = {d}")
    return label


def _omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def bell_state(label: Union[BellLabel, str, tuple], d: int = QUBIT) -> PureState:
    """
    Args:
        label (Union[BellLabel, str, tuple]): (n, m), or a two-qubit name such as
            "psi_minus"
        d (int): Dimension of each particle

    Returns:
        |Psi_nm> over (H, T)
    """
    n, m = _check_label(as_bell_label(label), d)
    amplitudes = np.zeros(d * d, dtype=complex)
    for j in range(d):
        amplitudes[j * d + (j + m) % d] = _omega(d) ** (j * n) / math.sqrt(d)
    return PureState(dims=(d, d), amplitudes=amplitudes)


def qudit_op(n: int, m: int, d: int) -> UnitaryOp:
    """U_nm: phase n, shift m."""
    _check_label(BellLabel(n, m), d)
    matrix = np.zeros((d, d), dtype=complex)
    for j in range(d):
        matrix[(j + m) % d, j] = _omega(d) ** (j * n)
    return UnitaryOp(dim=d, matrix=matrix)


def pauli_coding_op(label: Union[int, str]) -> UnitaryOp:
    """
    Args:
        label (Union[int, str]): 0..3, or the bit strings "00", "01", "10", "11"

    Returns:
        I, i sigma_y, sigma_x or sigma_z respectively
    """
    index = int(label, 2) if isinstance(label, str) else int(label)
    if index not in _PAULI_MATRICES:
        raise UnknownLabelError(f"Pauli coding label must be 0..3, found {label}")
    return UnitaryOp(dim=QUBIT, matrix=_PAULI_MATRICES[index])


@lru_cache(maxsize=None)
def bell_basis(d: int) -> MeasBasis:
    """Bell states as a basis of the pair; outcome k is (n, m) = divmod(k, d)."""
    states = [bell_state(BellLabel(*divmod(k, d)), d) for k in range(d * d)]
    return MeasBasis.from_states(states)


def bell_measure(
    s: PureState, d: int, rng: np.random.Generator
) -> Tuple[BellLabel, float, PureState]:
    """
    Measures the first two subsystems of `s` in the Bell basis.

    Args:
        s (PureState): State whose subsystems 0 and 1 are the pair; further subsystems
            (such as an adversary's ancilla) are left alone
        d (int): Dimension of each particle
        rng (np.random.Generator): Random stream

    Returns:
        The outcome label, its probability, and the post-measurement state
    """
    if len(s.dims) < 2 or s.dims[:2] != (d, d):
        raise DimensionMismatchError(f"Expected a pair of dimension {d}, found {s.dims}")
    # H and T are the two slowest indices, so they merge into one d^2 subsystem
    merged = PureState.unchecked(dims=(d * d,) + s.dims[2:], amplitudes=s.amplitudes)
    basis = bell_basis(d)
    probabilities = outcome_probabilities(merged, basis, 0)
    outcome, post = measure(merged, basis, 0, rng)
    post = PureState.unchecked(dims=s.dims, amplitudes=post.amplitudes)
    return BellLabel(*divmod(outcome, d)), float(probabilities[outcome]), post


def channel_capacity(p: int, q: int) -> float:
    """Dense-coding capacity log2(p q) of a p x q channel, in bits."""
    if p < 2 or q < 2:
        raise ValueError(f"Dimensions must be at least 2, found ({p}, {q})")
    return math.log2(p * q)


class AlgebraReport(BaseModel):
    """
    Attributes:
        d (int): Particle dimension.
        operations (int): Labels (n, m) for which (I (x) U_nm)|Psi_00> = |Psi_nm>
            was checked.
        compositions (int): Label pairs whose composition was checked to decode as
            the componentwise sum.
        round_trips (int): Random chains of coding agents decoded by Bell measurement.
        failures (List[str]): One message per failed check.
    """

    d: int
    operations: int = 0
    compositions: int = 0
    round_trips: int = 0
    failures: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _all_labels(d: int) -> List[BellLabel]:
    return [BellLabel(*divmod(k, d)) for k in range(d * d)]


def algebra_check(
    d: int, rng: np.random.Generator, max_agents: int = 3, chains: int = 20
) -> AlgebraReport:
    """
    Verifies the dense-coding algebra for particles of dimension `d`.

    Every U_nm must map Psi_00 to Psi_nm, every composition U_b U_a must map Psi_00 to
    Psi_(a+b), and for 1..max_agents agents coding with random labels the Bell
    measurement must return the componentwise sum. For d = 2 the composition check is
    repeated with the Pauli coding operations on psi-.
    """
    report = AlgebraReport(d=d)
    reference = bell_state(BellLabel(0, 0), d)
    labels = _all_labels(d)
    ops = {label: qudit_op(label.n, label.m, d) for label in labels}

    for label in labels:
        report.operations += 1
        if not states_equal_up_to_phase(
            apply(ops[label], reference, [1]), bell_state(label, d)
        ):
            report.failures.append(f"U{tuple(label)} Psi_00 != Psi{tuple(label)}")

    for a in labels:
        coded = apply(ops[a], reference, [1])
        for b in labels:
            report.compositions += 1
            expected = BellLabel((a.n + b.n) % d, (a.m + b.m) % d)
            if not states_equal_up_to_phase(
                apply(ops[b], coded, [1]), bell_state(expected, d)
            ):
                report.failures.append(
                    f"U{tuple(b)} U{tuple(a)} Psi_00 != Psi{tuple(expected)}"
                )

    if d == QUBIT:
        psi_minus = BELL_NAMES["psi_minus"]
        start = bell_state(psi_minus, d)
        for i, shift_i in PAULI_SHIFTS.items():
            coded = apply(pauli_coding_op(i), start, [1])
            for j, shift_j in PAULI_SHIFTS.items():
                report.compositions += 1
                expected = BellLabel(
                    psi_minus.n ^ shift_i.n ^ shift_j.n,
                    psi_minus.m ^ shift_i.m ^ shift_j.m,
                )
                decoded = apply(pauli_coding_op(j), coded, [1])
                if not states_equal_up_to_phase(decoded, bell_state(expected, d)):
                    report.failures.append(f"Pauli {j} after {i} on psi- != {expected}")

    for agents in range(1, max_agents + 1):
        for _ in range(chains):
            chain = [labels[int(k)] for k in rng.integers(d * d, size=agents)]
            state = reference
            for label in chain:
                state = apply(ops[label], state, [1])
            report.round_trips += 1
            outcome, probability, _ = bell_measure(state, d, rng)
            expected = BellLabel(
                sum(label.n for label in chain) % d, sum(label.m for label in chain) % d
            )
            if outcome != expected or abs(probability - 1) > 1e-9:
                report.failures.append(
                    f"Chain {[tuple(label) for label in chain]} decoded as "
                    f"{tuple(outcome)} with probability {probability:.6f}"
                )

    logger.info(
        f"d={d}: checked {report.operations} operations, {report.compositions} "
        f"compositions and {report.round_trips} round trips; "
        f"{len(report.failures)} failures"
    )
    return report


def reference_label(config: ProtocolConfig) -> BellLabel:
    return BELL_NAMES["psi_minus"] if config.variant.kind == "epr" else BellLabel(0, 0)


def _draw_coding(
    config: ProtocolConfig, rng: np.random.Generator
) -> Tuple[BellLabel, UnitaryOp]:
    if config.variant.kind == "epr":
        index = int(rng.integers(4))
        return PAULI_SHIFTS[index], pauli_coding_op(index)
    d = config.variant.dimension
    n, m = (int(v) for v in rng.integers(d, size=2))
    return BellLabel(n, m), qudit_op(n, m, d)


def run_epr_round(
    config: ProtocolConfig,
    rng: np.random.Generator,
    attack: Optional[AttackConfig] = None,
    round_id: int = 0,
) -> EprRoundRecord:
    d = config.variant.dimension
    reference = reference_label(config)
    state = bell_state(reference, d)
    home, travel, ancilla = 0, 1, None
    entries = []
    alice_control = None
    for leg in range(config.num_agents + 1):
        if attack is not None and attack.leg == leg:
            state, ancilla = attach_ancilla(state, travel, attack)
        if leg == config.num_agents:
            break
        if d == QUBIT and rng.random() < config.p_control:
            basis = BASES[int(rng.random() < 0.5)]
            outcome, state = measure(state, MeasBasis.named(basis), travel, rng)
            alice_control, state = measure(state, MeasBasis.named(basis), home, rng)
            entries.append(
                EprAgentEntry(
                    mode=Mode.CONTROL, control_basis=basis, control_outcome=outcome
                )
            )
            break
        label, op = _draw_coding(config, rng)
        state = apply(op, state, [travel])
        entries.append(EprAgentEntry(mode=Mode.CODE, coding_label=label))

    bell_outcome = None
    if alice_control is None:
        bell_outcome, _, state = bell_measure(state, d, rng)
    ancilla_outcome = None
    if ancilla is not None:
        basis = MeasBasis.named(attack.ancilla_basis)
        ancilla_outcome, _ = measure(state, basis, ancilla, rng)

    return EprRoundRecord(
        round_id=round_id,
        variant=config.variant.kind,
        d=d,
        reference=reference,
        agents=entries,
        alice_bell_outcome=bell_outcome,
        alice_control_outcome=alice_control,
        ancilla_outcome=ancilla_outcome,
    )


def run_epr_session(
    config: ProtocolConfig, attack: Optional[AttackConfig] = None
) -> SessionTranscript:
    """
    Args:
        config (ProtocolConfig): Configuration of an "epr" or "qudit" session
        attack (Optional[AttackConfig]): Entangling attack on the travelling particle,
            supported for d = 2

    Returns:
        The transcript of EprRoundRecord rounds
    """
    variant = config.variant
    if variant.kind == "single":
        raise ValueError("run_epr_session needs an epr or qudit variant")
    if attack is not None:
        attack.validate_ring(config.num_agents)
        if variant.dimension != QUBIT:
            raise ValueError(f"Attacks are only simulated for d = 2, found {variant}")
    if variant.dimension != QUBIT and config.p_control > 0:
        logger.warning(
            f"Control mode is only defined for d = 2; agents of a {variant} session "
            "always code"
        )

    logger.info(
        f"Running {config.rounds} rounds of a {variant} session with "
        f"{config.num_agents} agents (seed {config.rng_seed})"
    )
    records = execute_rounds(config, run_epr_round, attack)
    transcript = SessionTranscript(config=config, records=records, adversary=attack)
    logger.info(f"Returned fraction: {transcript.returned_fraction:.4f}")
    return transcript
