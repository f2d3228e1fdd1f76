# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for aggregate statistics over finished sessions.

This module provides:

- information_curve / write_curve: the trade-off between the detection probability
  epsilon_B and the adversary's information I_B over a grid of attack strengths,
  optionally joined with simulated values, and its tabular form.
- efficiency: the intrinsic qubit efficiency epsilon_q = key length / rounds next to
  its asymptotic value (1 - p_control)^N (1 - f_sample2) and the 50% efficiency of the
  GHZ-based three-party scheme it is usually compared with.
- compare_theory: z-scores of a simulated attack against the closed forms.
- session_summary: the structured summary written for every session.

Standard errors use the normal approximation to the binomial. Estimates from fewer
than 100 samples are flagged as low confidence.
"""

import csv
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, computed_field, field_validator

from cqss.adversary import AttackOutcome, detection_rate, eve_information
from cqss.defaults import (
    CURVE_COLUMNS,
    GHZ_BASELINE_EFFICIENCY,
    LOW_CONFIDENCE_SAMPLES,
    QUBIT,
    Z_SCORE_FLAG,
)
from cqss.exceptions import PhiMismatchError
from cqss.protocol.records import KeyMaterial, SampleReport, SessionTranscript

logger = logging.getLogger(__name__)

PHI_TOLERANCE = 1e-9


def binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n) if n else 0.0


class CurvePoint(BaseModel):
    """
    One point of the detection/information trade-off.

    Attributes:
        phi (float): Attack strength.
        epsilon_B (float): 1/2 sin^2(phi).
        I_B (float): Binary entropy of epsilon_B.
        epsilon_B_empirical (Optional[float]): Simulated Z-conclusive error rate.
        epsilon_B_stderr (Optional[float]): Its binomial standard error.
        I_empirical (Optional[float]): Simulated information estimate.
        I_stderr (Optional[float]): Its standard error.
        n_conclusive (int): Z-conclusive checks behind the empirical rate.
    """

    phi: float = Field(ge=0)
    epsilon_B: float
    I_B: float
    epsilon_B_empirical: Optional[float] = None
    epsilon_B_stderr: Optional[float] = None
    I_empirical: Optional[float] = None
    I_stderr: Optional[float] = None
    n_conclusive: int = 0

    @field_validator("epsilon_B")
    @classmethod
    def at_most_half(cls, value):
        if not 0 <= value <= 0.5 + 1e-12:
            raise ValueError(f"epsilon_B must be in [0, 1/2], found {value}")
        return value

    @field_validator("I_B")
    @classmethod
    def at_most_one_bit(cls, value):
        if not 0 <= value <= 1 + 1e-12:
            raise ValueError(f"I_B must be in [0, 1], found {value}")
        return value

    def row(self) -> List[Any]:
        values = {
            "phi": self.phi,
            "epsilon_B_theory": self.epsilon_B,
            "epsilon_B_empirical": self.epsilon_B_empirical,
            "I_B_theory": self.I_B,
            "I_empirical_estimate": self.I_empirical,
            "n_conclusive": self.n_conclusive,
        }
        return ["" if values[c] is None else values[c] for c in CURVE_COLUMNS]


def information_curve(
    phi_grid: Sequence[float], outcomes: Optional[Sequence[AttackOutcome]] = None
) -> List[CurvePoint]:
    """
    Args:
        phi_grid (Sequence[float]): Attack strengths, each >= 0
        outcomes (Optional[Sequence[AttackOutcome]]): Simulated attacks, one per grid
            value, whose results join the analytic values

    Returns:
        One CurvePoint per grid value, in grid order
    """
    if outcomes is not None and len(outcomes) != len(phi_grid):
        raise ValueError(f"{len(outcomes)} outcomes for {len(phi_grid)} grid values")
    points = []
    for i, phi in enumerate(phi_grid):
        if phi < 0:
            raise ValueError(f"Grid values must be >= 0, found {phi}")
        point = {
            "phi": phi,
            "epsilon_B": detection_rate(phi),
            "I_B": eve_information(phi),
        }
        if outcomes is not None:
            sim = outcomes[i]
            point.update(
                epsilon_B_empirical=sim.detection_rate,
                epsilon_B_stderr=binomial_stderr(sim.detection_rate, sim.z_conclusive),
                I_empirical=sim.mutual_information,
                I_stderr=sim.information_stderr,
                n_conclusive=sim.z_conclusive,
            )
        points.append(CurvePoint(**point))
    return points


def write_curve(points: Sequence[CurvePoint], filename: str):
    with open(filename, "w", newline="", encoding="utf-8") as file_obj:
        writer = csv.writer(file_obj)
        writer.writerow(CURVE_COLUMNS)
        for point in points:
            writer.writerow(point.row())
    logger.info(f"Wrote {len(points)} curve points to {filename}")


class EfficiencyReport(BaseModel):
    """
    Attributes:
        rounds (int): Carriers Alice sent.
        key_length (int): Digits in the sifted key.
        announcements (int): Classical announcements the checks needed: one per
            control-mode round and one per agent for every s_2 position.
        expected_epsilon_q (float): (1 - p_control)^N (1 - f_sample2); the first factor
            is 1 for d > 2, whose agents never control.
        baseline_epsilon_q (float): Efficiency of the GHZ-based scheme, where half the
            instances are discarded for basis mismatch.
    """

    rounds: int = Field(ge=1)
    key_length: int = Field(ge=0)
    announcements: int = Field(ge=0)
    expected_epsilon_q: float
    baseline_epsilon_q: float = GHZ_BASELINE_EFFICIENCY

    @field_validator("key_length")
    @classmethod
    def key_not_longer_than_rounds(cls, value, info):
        rounds = info.data.get("rounds")
        if rounds is not None and value > rounds:
            raise ValueError(f"Key of {value} digits from {rounds} rounds")
        return value

    @computed_field
    @property
    def epsilon_q(self) -> float:
        return self.key_length / self.rounds


def efficiency(
    t: SessionTranscript, k: KeyMaterial, report: Optional[SampleReport] = None
) -> EfficiencyReport:
    config = t.config
    controlled = sum(not record.returned for record in t.records)
    sampled = len(report.s2.positions) if report is not None else 0
    # agents of a d > 2 session always code
    p_code = 1 - config.p_control if config.variant.dimension == QUBIT else 1.0
    return EfficiencyReport(
        rounds=config.rounds,
        key_length=k.length,
        announcements=controlled + sampled * config.num_agents,
        expected_epsilon_q=p_code**config.num_agents * (1 - config.f_sample2),
    )


class TheoryComparison(BaseModel):
    """z-scores of a simulated attack against the closed forms at `phi`."""

    phi: float
    simulated_phi: float
    n_conclusive: int
    detection_rate: float
    detection_theory: float
    detection_z: float
    information: float
    information_bound: float
    information_z: float
    low_confidence: bool
    flags: List[str] = Field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)


def _z_score(observed: float, expected: float, stderr: float) -> float:
    # rates equal up to rounding have no deviation
    if math.isclose(observed, expected, rel_tol=0.0, abs_tol=1e-12):
        return 0.0
    return (observed - expected) / stderr


def compare_theory(
    sim: AttackOutcome, phi: float, strict: bool = True
) -> TheoryComparison:
    """
    Args:
        sim (AttackOutcome): Simulated attack
        phi (float): Attack strength the closed forms are evaluated at
        strict (bool): Raise when `sim` was produced at another strength; otherwise
            the comparison is flagged

    Returns:
        The comparison; the detection rate is flagged when |z| > 3, the information
        estimate when it exceeds the bound I_B by more than 3 standard errors

    Raises:
        PhiMismatchError: If strict and `sim.phi` differs from `phi`.
    """
    if strict and abs(sim.phi - phi) > PHI_TOLERANCE:
        raise PhiMismatchError(f"Simulation ran at phi={sim.phi}, compared at phi={phi}")

    n = sim.z_conclusive
    theory = detection_rate(phi)
    # floor of 1/n keeps z finite when the theory rate is 0 or 1
    detection_z = (
        _z_score(sim.detection_rate, theory, max(binomial_stderr(theory, n), 1 / n))
        if n
        else 0.0
    )
    guesses = len(sim.eve_guesses)
    bound = eve_information(phi)
    information_z = (
        _z_score(
            sim.mutual_information, bound, max(sim.information_stderr, 1 / guesses)
        )
        if guesses
        else 0.0
    )

    flags = []
    if abs(sim.phi - phi) > PHI_TOLERANCE:
        flags.append("phi_mismatch")
    if abs(detection_z) > Z_SCORE_FLAG:
        flags.append("detection")
    if information_z > Z_SCORE_FLAG:
        flags.append("information")
    low_confidence = n < LOW_CONFIDENCE_SAMPLES
    if low_confidence:
        flags.append("low_confidence")
    comparison = TheoryComparison(
        phi=phi,
        simulated_phi=sim.phi,
        n_conclusive=n,
        detection_rate=sim.detection_rate,
        detection_theory=theory,
        detection_z=detection_z,
        information=sim.mutual_information,
        information_bound=bound,
        information_z=information_z,
        low_confidence=low_confidence,
        flags=flags,
    )
    if comparison.flagged:
        logger.warning(f"Comparison at phi={phi:.4f} flagged: {', '.join(flags)}")
    return comparison


def session_summary(
    t: SessionTranscript,
    report: SampleReport,
    keys: KeyMaterial,
    outcome: Optional[AttackOutcome] = None,
) -> Dict[str, Any]:
    """Counts, error estimates, key lengths and efficiency of one session."""
    summary = {
        "variant": str(t.config.variant),
        "num_agents": t.config.num_agents,
        "rounds": t.config.rounds,
        "rng_seed": t.config.rng_seed,
        "returned": sum(record.returned for record in t.records),
        "samples": {
            **{
                f"s1[{sample.agent}]": {
                    "size": len(sample.positions),
                    "conclusive": sample.conclusive,
                    "errors": sample.errors,
                    "z_conclusive": sample.z_conclusive,
                    "z_errors": sample.z_errors,
                    "x_conclusive": sample.x_conclusive,
                    "x_errors": sample.x_errors,
                }
                for sample in report.s1
            },
            "s2": {"size": len(report.s2.positions), "errors": report.s2.errors},
        },
        "error_rates": report.error_rates,
        "max_error_rate": report.max_error_rate,
        "key_length": keys.length,
        "efficiency": efficiency(t, keys, report).model_dump(),
    }
    if outcome is not None:
        comparison = compare_theory(outcome, outcome.phi)
        summary["attack"] = {
            **t.adversary.model_dump(),
            "leg": t.adversary.leg,
            "detection_rate": outcome.detection_rate,
            "detection_theory": comparison.detection_theory,
            "x_error_rate": outcome.x_error_rate,
            "mutual_information": outcome.mutual_information,
            "information_bound": comparison.information_bound,
            "flags": comparison.flags,
        }
    return summary
