# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for the circular secret sharing session engine.

Alice prepares a photon in one of the four states |+z>, |-z>, |+x>, |-x> and sends it
round the ring. Every agent independently chooses control mode (measure the photon in a
random basis, ending the circulation) or coding mode (apply U_0 or U_1 and pass it on).
A photon that comes back is measured by Alice in the basis she prepared it in; since
U_1 flips both bases, her outcome is her prepared bit XOR every agent's label.

After the rounds, the session is checked twice: once on the control-mode samples of
each agent, once on a random sample s_2 of returned photons whose coding operations
all agents disclose. The rest of the returned photons form the key, with
K_A = K_1 XOR K_2 XOR ... XOR K_N. A message is then split by one-time pad with K_A.

The EPR and d-level variants share the sampling, sifting and splitting functions; their
rounds are produced by `cqss.epr_qudit.run_epr_round`.
"""

import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from cqss.adversary import attach_ancilla
from cqss.defaults import BASES, QUBIT, SAMPLE_STREAM
from cqss.epr_qudit import run_epr_session
from cqss.exceptions import KeyLengthError, ProtocolAbortError
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.protocol.executor import execute_rounds
from cqss.protocol.records import (
    AgentEntry,
    CodingSample,
    ControlSample,
    KeyMaterial,
    Mode,
    RoundRecord,
    SampleReport,
    SessionTranscript,
    combine_shares,
)
from cqss.qstate import (
    MeasBasis,
    PureState,
    UnitaryOp,
    apply,
    ket,
    measure,
)
from cqss.utilities.common import stream_rng

logger = logging.getLogger(__name__)

U0 = UnitaryOp(dim=QUBIT, matrix=np.eye(QUBIT))
# |0><1| - |1><0|: U_1|+z> = -|-z>, U_1|-z> = |+z>, U_1|+x> = |-x>, U_1|-x> = -|+x>
U1 = UnitaryOp(dim=QUBIT, matrix=[[0, 1], [-1, 0]])


class Preparation(NamedTuple):
    state: PureState
    basis: MeasBasis
    bit: int


class ControlResult(NamedTuple):
    basis: str
    outcome: int


class CodeResult(NamedTuple):
    label: int
    state: PureState


def coding_op(label: int) -> UnitaryOp:
    """U_0 for label 0, U_1 for label 1."""
    if label not in (0, 1):
        raise ValueError(f"Coding label must be 0 or 1, found {label}")
    return U1 if label else U0


def alice_prepare(rng: np.random.Generator) -> Preparation:
    """
    Args:
        rng (np.random.Generator): Random stream

    Returns:
        One of the four states chosen uniformly, the basis it belongs to, and its bit:
        0 for the + state, 1 for the - state
    """
    basis = BASES[int(rng.random() < 0.5)]
    bit = int(rng.random() < 0.5)
    state = ket(f"{'+-'[bit]}{basis.lower()}")
    return Preparation(state=state, basis=MeasBasis.named(basis), bit=bit)


def agent_step(
    s: PureState,
    mode: Mode,
    rng: np.random.Generator,
    target: int = 0,
    label: Optional[int] = None,
    basis: Optional[str] = None,
) -> Union[ControlResult, CodeResult]:
    """
    Args:
        s (PureState): Photon state, possibly joined with adversary ancillas
        mode (Mode): Control or Code
        rng (np.random.Generator): Random stream
        target (int): Subsystem index of the photon
        label (Optional[int]): Coding label to use instead of a random one
        basis (Optional[str]): Control basis to use instead of a random one

    Returns:
        ControlResult with the basis and outcome of the measurement, or CodeResult with
        the label and the coded state
    """
    if mode is Mode.CONTROL:
        basis = BASES[int(rng.random() < 0.5)] if basis is None else basis
        outcome, _ = measure(s, MeasBasis.named(basis), target, rng)
        return ControlResult(basis=basis, outcome=outcome)
    label = int(rng.random() < 0.5) if label is None else label
    if not label:
        # U_0 is the identity
        return CodeResult(label=0, state=s)
    return CodeResult(label=label, state=apply(coding_op(label), s, [target]))


def run_round(
    config: ProtocolConfig,
    rng: np.random.Generator,
    attack: Optional[AttackConfig] = None,
    round_id: int = 0,
) -> RoundRecord:
    prep = alice_prepare(rng)
    state, photon, ancilla = prep.state, 0, None
    entries = []
    returned = True
    for leg in range(config.num_agents + 1):
        if attack is not None and attack.leg == leg:
            state, ancilla = attach_ancilla(state, photon, attack)
        if leg == config.num_agents:
            break
        mode = Mode.CONTROL if rng.random() < config.p_control else Mode.CODE
        result = agent_step(state, mode, rng, target=photon)
        if mode is Mode.CONTROL:
            entries.append(
                AgentEntry(
                    mode=mode,
                    control_basis=result.basis,
                    control_outcome=result.outcome,
                )
            )
            returned = False
            break
        entries.append(AgentEntry(mode=mode, coding_label=result.label))
        state = result.state

    alice_outcome = None
    if returned:
        alice_outcome, state = measure(state, prep.basis, photon, rng)
    ancilla_outcome = None
    if ancilla is not None:
        basis = MeasBasis.named(attack.ancilla_basis)
        ancilla_outcome, _ = measure(state, basis, ancilla, rng)

    record = RoundRecord(
        round_id=round_id,
        alice_basis=prep.basis.label,
        alice_bit=prep.bit,
        agents=entries,
        returned=returned,
        alice_outcome=alice_outcome,
        ancilla_outcome=ancilla_outcome,
    )
    logger.debug(f"Round {round_id}: returned={returned}")
    return record


def run_session(
    config: ProtocolConfig, attack: Optional[AttackConfig] = None
) -> SessionTranscript:
    """
    Runs config.rounds independent rounds of the configured variant.

    Args:
        config (ProtocolConfig): Session configuration
        attack (Optional[AttackConfig]): Entangling attack, if any

    Returns:
        The transcript; identical for identical configurations
    """
    if config.variant.kind != "single":
        return run_epr_session(config, attack)
    if attack is not None:
        attack.validate_ring(config.num_agents)

    logger.info(
        f"Running {config.rounds} rounds of a {config.variant} session with "
        f"{config.num_agents} agents (seed {config.rng_seed})"
    )
    records = execute_rounds(config, run_round, attack)
    transcript = SessionTranscript(config=config, records=records, adversary=attack)
    logger.info(f"Returned fraction: {transcript.returned_fraction:.4f}")
    return transcript


def draw_second_sample(t: SessionTranscript) -> List[int]:
    """round(f_sample2 * eligible) returned rounds, drawn without replacement."""
    eligible = [record.round_id for record in t.records if record.returned]
    size = round(t.config.f_sample2 * len(eligible))
    if not size:
        return []
    rng = stream_rng(t.config.rng_seed, SAMPLE_STREAM)
    return sorted(int(p) for p in rng.choice(eligible, size=size, replace=False))


def check_samples(
    t: SessionTranscript,
    declared_labels: Optional[Dict[int, Sequence[int]]] = None,
) -> SampleReport:
    """
    Args:
        t (SessionTranscript): Completed session
        declared_labels (Optional[Dict[int, Sequence[int]]]): Per agent, the digits it
            announces for the s_2 positions in order; agents not listed announce the
            truth

    Returns:
        The control sample of every agent and the second sample, with error counts
    """
    declared_labels = declared_labels or {}
    agents = range(t.config.num_agents)
    positions = [[] for _ in agents]
    # conclusive and error counts per agent and basis
    counts = np.zeros((t.config.num_agents, len(BASES), 2), dtype=int)
    for record in t.records:
        check = record.control_check()
        if check is None:
            continue
        positions[check.agent].append(record.round_id)
        if check.conclusive:
            counts[check.agent, BASES.index(check.basis)] += (1, int(check.error))

    s1 = [
        ControlSample(
            agent=i,
            positions=positions[i],
            conclusive=int(counts[i, :, 0].sum()),
            errors=int(counts[i, :, 1].sum()),
            z_conclusive=int(counts[i, 0, 0]),
            z_errors=int(counts[i, 0, 1]),
            x_conclusive=int(counts[i, 1, 0]),
            x_errors=int(counts[i, 1, 1]),
        )
        for i in agents
    ]

    sampled = draw_second_sample(t)
    declared = []
    for agent in agents:
        truth = [t.records[p].key_digits()[1][agent] for p in sampled]
        override = declared_labels.get(agent)
        if override is not None and len(override) != len(sampled):
            raise ValueError(
                f"Agent {agent} declared {len(override)} labels for "
                f"{len(sampled)} sampled positions"
            )
        declared.append(list(override) if override is not None else truth)
    errors = sum(
        t.records[p].coding_error([labels[j] for labels in declared])
        for j, p in enumerate(sampled)
    )
    report = SampleReport(
        s1=s1, s2=CodingSample(positions=sampled, declared=declared, errors=errors)
    )
    for name, rate in report.error_rates.items():
        logger.info(f"Error rate {name}: {rate:.4f}")
    return report


def check_abort(report: SampleReport, abort_threshold: Optional[float]):
    """Raises ProtocolAbortError when any error estimate exceeds the threshold."""
    if abort_threshold is None:
        return
    exceeded = {k: v for k, v in report.error_rates.items() if v > abort_threshold}
    if exceeded:
        raise ProtocolAbortError(
            f"Error rates {exceeded} exceed the abort threshold {abort_threshold}"
        )


def sift_keys(t: SessionTranscript, report: SampleReport) -> KeyMaterial:
    """
    Args:
        t (SessionTranscript): Completed session
        report (SampleReport): Samples drawn from it

    Returns:
        One digit per returned, all-code round outside s_2; may be empty
    """
    sampled = set(report.s2.positions)
    positions, k_alice = [], []
    k_agents = [[] for _ in range(t.config.num_agents)]
    for record in t.records:
        if not record.returned or record.round_id in sampled:
            continue
        alice, agents = record.key_digits()
        positions.append(record.round_id)
        k_alice.append(alice)
        for key, digit in zip(k_agents, agents):
            key.append(digit)

    if not positions:
        logger.warning("Every round was controlled or sampled; the key is empty")
    return KeyMaterial(
        positions=positions,
        k_alice=k_alice,
        k_agents=k_agents,
        digit_base=t.config.variant.digit_base,
        component_modulus=t.config.variant.dimension,
    )


def verify_key_agreement(
    k: KeyMaterial, check_fraction: float, rng: np.random.Generator
) -> Tuple[bool, List[int], KeyMaterial]:
    """
    Args:
        k (KeyMaterial): Sifted keys
        check_fraction (float): Fraction of the key disclosed, in (0, 1]
        rng (np.random.Generator): Random stream choosing the disclosed digits

    Returns:
        Whether K_A matched the combined agent key on every disclosed digit, the
        disclosed round ids, and the keys without them
    """
    if not 0 < check_fraction <= 1:
        raise ValueError(f"check_fraction must be in (0, 1], found {check_fraction}")
    if k.is_empty:
        return True, [], k
    size = math.ceil(check_fraction * k.length)
    chosen = np.sort(rng.choice(k.length, size=size, replace=False))
    combined = np.asarray(k.combined_agent_key())
    mismatches = int(np.count_nonzero(np.asarray(k.k_alice)[chosen] != combined[chosen]))
    disclosed = [k.positions[i] for i in chosen]
    if mismatches:
        logger.warning(f"{mismatches} of {size} disclosed key digits disagree")
    return not mismatches, disclosed, k.discard(disclosed)


def otp_split(message: Sequence[int], keys: KeyMaterial) -> List[int]:
    """C_A = S_A + K_A digitwise modulo the digit base; XOR for bits."""
    if len(message) > keys.length:
        raise KeyLengthError(
            f"Message of {len(message)} digits needs a key at least as long, "
            f"found {keys.length}"
        )
    if any(not 0 <= digit < keys.digit_base for digit in message):
        raise ValueError(f"Message digits must be in [0, {keys.digit_base})")
    return [
        (digit + key) % keys.digit_base for digit, key in zip(message, keys.k_alice)
    ]


def otp_reconstruct(
    ciphertext: Sequence[int],
    k_agents: Sequence[Sequence[int]],
    digit_base: int = QUBIT,
    component_modulus: int = QUBIT,
) -> List[int]:
    """
    Args:
        ciphertext (Sequence[int]): C_A
        k_agents (Sequence[Sequence[int]]): The agent keys that collaborate
        digit_base (int): Digit base of the keys
        component_modulus (int): Modulus the agent keys combine under

    Returns:
        C_A minus the combination of the given agent keys; S_A when every agent
        collaborates
    """
    shares = [list(key[: len(ciphertext)]) for key in k_agents]
    if any(len(share) < len(ciphertext) for share in shares):
        raise KeyLengthError("An agent key is shorter than the ciphertext")
    combined = (
        combine_shares(shares, digit_base, component_modulus)
        if shares
        else [0] * len(ciphertext)
    )
    return [(c - key) % digit_base for c, key in zip(ciphertext, combined)]
