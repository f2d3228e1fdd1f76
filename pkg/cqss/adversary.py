# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the entangling individual attack and its security quantities.

A dishonest agent attaches an ancilla in |0> to the carrier on one leg of the ring and
entangles the two with

    U_E|0>|0> = |0>|0>
    U_E|1>|0> = cos(phi)|1>|0> + sin(phi)|0>|1>

completed to a unitary by the opposite rotation on the ancilla-|1> sector. This module
provides the closed forms of the attack (the Z-conclusive error rate 1/2 sin^2(phi),
the ancilla state diag((1 + cos^2(phi))/2, sin^2(phi)/2) and its entropy I_B), the
density matrices they are derived from, and `simulate_attack`, which runs a session
under the attack and reports what the agents' checks and the adversary observed.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, computed_field

from cqss.defaults import QUBIT
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.protocol.records import SessionTranscript
from cqss.qstate import (
    DensityMatrix,
    PureState,
    UnitaryOp,
    apply,
    density_from_pure,
    evolve,
    ket,
    mix,
    partial_trace,
    tensor,
)

logger = logging.getLogger(__name__)

_U1 = UnitaryOp(dim=QUBIT, matrix=[[0, 1], [-1, 0]])
_FOUR_STATES = ("+z", "-z", "+x", "-x")


def attack_unitary(phi: float) -> UnitaryOp:
    """
    Args:
        phi (float): Attack strength in radians

    Returns:
        U_E(phi) on photon (x) ancilla, photon first
    """
    c, s = math.cos(phi), math.sin(phi)
    return UnitaryOp(
        dim=QUBIT**2,
        matrix=[
            [1, 0, 0, 0],
            [0, c, s, 0],
            [0, -s, c, 0],
            [0, 0, 0, 1],
        ],
    )


def attach_ancilla(
    s: PureState, target: int, attack: AttackConfig
) -> Tuple[PureState, int]:
    """Entangles the carrier at `target` with a fresh |0> ancilla through U_E(phi)."""
    joined = tensor(s, ket(0))
    ancilla = len(joined.dims) - 1
    return apply(attack_unitary(attack.phi), joined, [target, ancilla]), ancilla


def detection_rate(phi: float) -> float:
    """Error rate of Z-conclusive checks downstream of the attack, 1/2 sin^2(phi)."""
    return 0.5 * math.sin(phi) ** 2


def x_basis_error_rate(phi: float) -> float:
    """Error rate of X-conclusive checks, (1 - cos(phi)) / 2."""
    return (1 - math.cos(phi)) / 2


def average_error_rate(phi: float) -> float:
    """Error rate over all conclusive checks when Alice uses all four states."""
    return (detection_rate(phi) + x_basis_error_rate(phi)) / 2


def joint_state_after_coding(phi: float, p_c0: float) -> DensityMatrix:
    """
    Photon and ancilla after the downstream agent coded, with Alice's source taken as
    the Z-basis mixture 1/2 |0><0| + 1/2 |1><1|.

    Args:
        phi (float): Attack strength
        p_c0 (float): Probability the downstream agent applies U_0

    Returns:
        p_c0 rho_AP + (1 - p_c0) (U_1 (x) I) rho_AP (U_1 (x) I)^dagger
    """
    if not 0 <= p_c0 <= 1:
        raise ValueError(f"p_c0 must be in [0, 1], found {p_c0}")
    source = mix(
        (0.5, density_from_pure(tensor(ket(bit), ket(0)))) for bit in range(QUBIT)
    )
    attacked = evolve(attack_unitary(phi), source, [0, 1])
    flipped = evolve(_U1, attacked, [0])
    return mix([(p_c0, attacked), (1 - p_c0, flipped)])


def ancilla_state(phi: float, p_c0: float = 0.5) -> DensityMatrix:
    return partial_trace(joint_state_after_coding(phi, p_c0), keep=[1])


def ancilla_eigenvalues(phi: float) -> Tuple[float, float]:
    """Roots of the characteristic polynomial of the ancilla state."""
    return (1 + math.cos(phi) ** 2) / 2, math.sin(phi) ** 2 / 2


def binary_entropy(p: float) -> float:
    """-p log2 p - (1 - p) log2 (1 - p), with 0 log 0 = 0."""
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def eve_information(phi: float) -> float:
    """I_B as the binary entropy of the detection rate."""
    return binary_entropy(detection_rate(phi))


def eve_information_cos_form(phi: float) -> float:
    """1 - 1/2 {(1 + cos^2) log2(1 + cos^2) + sin^2 log2 sin^2}."""
    c2, s2 = math.cos(phi) ** 2, math.sin(phi) ** 2

    def xlog2x(x):
        return x * math.log2(x) if x > 0 else 0.0

    return 1 - 0.5 * (xlog2x(1 + c2) + xlog2x(s2))


def averaged_leg_state(upstream_p0: Sequence[float] = ()) -> DensityMatrix:
    """
    The photon on a leg as seen by whoever holds it there, averaged over Alice's four
    equiprobable states and over every upstream agent's choice of U_0 (with the given
    probability) or U_1.
    """
    state = mix((0.25, density_from_pure(ket(label))) for label in _FOUR_STATES)
    for p0 in upstream_p0:
        state = mix([(p0, state), (1 - p0, evolve(_U1, state, [0]))])
    return state


def _joint_distribution(xs: Sequence[int], ys: Sequence[int]) -> np.ndarray:
    xs, ys = np.asarray(xs, dtype=int), np.asarray(ys, dtype=int)
    joint = np.zeros((xs.max(initial=0) + 1, ys.max(initial=0) + 1))
    np.add.at(joint, (xs, ys), 1)
    return joint / max(len(xs), 1)


def _pointwise_information(joint: np.ndarray) -> np.ndarray:
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.log2(joint / (px * py))
    return np.where(joint > 0, terms, 0.0)


def mutual_information(xs: Sequence[int], ys: Sequence[int]) -> float:
    """Plug-in estimate of I(X; Y) in bits from paired samples."""
    if len(xs) != len(ys):
        raise ValueError(f"{len(xs)} guesses for {len(ys)} labels")
    if not len(xs):
        return 0.0
    joint = _joint_distribution(xs, ys)
    return max(float(np.sum(joint * _pointwise_information(joint))), 0.0)


def mutual_information_stderr(xs: Sequence[int], ys: Sequence[int]) -> float:
    """Delta-method standard error of the plug-in estimate."""
    if len(xs) < 2:
        return 0.0
    joint = _joint_distribution(xs, ys)
    terms = _pointwise_information(joint)
    mean = np.sum(joint * terms)
    variance = np.sum(joint * (terms - mean) ** 2)
    return float(math.sqrt(variance / len(xs)))


class AttackOutcome(BaseModel):
    """
    What the attack produced in one session.

    Attributes:
        phi (float): Attack strength used.
        ancilla_outcomes (List[Optional[int]]): Per round, the ancilla outcome, or None
            when the carrier never crossed the intercepted leg.
        eve_guesses (List[int]): Guesses for the label of the agent behind the
            intercepted leg; the guess is the ancilla outcome.
        target_labels (List[int]): That agent's actual labels, paired with the guesses.
        z_conclusive, z_errors, x_conclusive, x_errors (int): Conclusive control checks
            made downstream of the attack, and the errors among them.
        information_stderr (float): Standard error of the information estimate.
    """

    phi: float
    ancilla_outcomes: List[Optional[int]]
    eve_guesses: List[int] = Field(default_factory=list)
    target_labels: List[int] = Field(default_factory=list)
    z_conclusive: int = 0
    z_errors: int = 0
    x_conclusive: int = 0
    x_errors: int = 0
    information_stderr: float = 0.0

    @computed_field
    @property
    def detection_rate(self) -> float:
        return self.z_errors / self.z_conclusive if self.z_conclusive else 0.0

    @computed_field
    @property
    def x_error_rate(self) -> float:
        return self.x_errors / self.x_conclusive if self.x_conclusive else 0.0

    @computed_field
    @property
    def error_rate(self) -> float:
        conclusive = self.z_conclusive + self.x_conclusive
        return (self.z_errors + self.x_errors) / conclusive if conclusive else 0.0

    @computed_field
    @property
    def mutual_information(self) -> float:
        return mutual_information(self.eve_guesses, self.target_labels)


def attack_outcome(t: SessionTranscript, attack: AttackConfig) -> AttackOutcome:
    """Collects the adversary's view and the downstream checks from a transcript."""
    counts = {"Z": [0, 0], "X": [0, 0]}
    guesses, labels = [], []
    for record in t.records:
        check = record.control_check()
        if check is not None and check.conclusive and check.agent >= attack.leg:
            counts[check.basis][0] += 1
            counts[check.basis][1] += int(check.error)
        if record.ancilla_outcome is None:
            continue
        label = record.agent_digit(attack.leg)
        if label is not None:
            guesses.append(record.ancilla_outcome)
            labels.append(label)

    return AttackOutcome(
        phi=attack.phi,
        ancilla_outcomes=[record.ancilla_outcome for record in t.records],
        eve_guesses=guesses,
        target_labels=labels,
        z_conclusive=counts["Z"][0],
        z_errors=counts["Z"][1],
        x_conclusive=counts["X"][0],
        x_errors=counts["X"][1],
        information_stderr=mutual_information_stderr(guesses, labels),
    )


def simulate_attack(
    config: ProtocolConfig, attack: AttackConfig
) -> Tuple[SessionTranscript, AttackOutcome]:
    """
    Args:
        config (ProtocolConfig): Session configuration
        attack (AttackConfig): Attack to apply

    Returns:
        The attacked session and the adversary's outcome
    """
    # session depends on this module for the ancilla hook
    from cqss.protocol.session import run_session

    transcript = run_session(config, attack)
    outcome = attack_outcome(transcript, attack)
    logger.info(
        f"Attack phi={attack.phi:.4f} on leg {attack.leg}: Z-conclusive error rate "
        f"{outcome.detection_rate:.4f} over {outcome.z_conclusive} checks "
        f"(theory {detection_rate(attack.phi):.4f})"
    )
    return transcript, outcome
