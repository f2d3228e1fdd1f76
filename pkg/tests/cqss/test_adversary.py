# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import math
import unittest

import numpy as np
from cqss.adversary import (
    ancilla_eigenvalues,
    ancilla_state,
    attack_unitary,
    average_error_rate,
    averaged_leg_state,
    binary_entropy,
    detection_rate,
    eve_information,
    eve_information_cos_form,
    joint_state_after_coding,
    mutual_information,
    mutual_information_stderr,
    simulate_attack,
    x_basis_error_rate,
)
from cqss.analysis import binomial_stderr, compare_theory
from cqss.defaults import MAX_PHI
from cqss.protocol.config import AttackConfig, ProtocolConfig
from cqss.protocol.session import run_session
from cqss.qstate import apply, ket, tensor, von_neumann_entropy
from parameterized import parameterized


class TestClosedForms(unittest.TestCase):
    def test_unitary_action(self):
        phi = 0.3
        op = attack_unitary(phi)
        np.testing.assert_allclose(
            apply(op, tensor(ket(0), ket(0)), [0, 1]).amplitudes, [1, 0, 0, 0]
        )
        np.testing.assert_allclose(
            apply(op, tensor(ket(1), ket(0)), [0, 1]).amplitudes,
            [0, math.sin(phi), math.cos(phi), 0],
            atol=1e-12,
        )

    @parameterized.expand(
        [
            (0.0, 0.0, 0.0),
            (math.pi / 4, 0.25, (1 - math.sqrt(0.5)) / 2),
            (
                math.pi / 8,
                0.5 * math.sin(math.pi / 8) ** 2,
                0.5 - math.cos(math.pi / 8) / 2,
            ),
        ]
    )
    def test_error_rates(self, phi, z_rate, x_rate):
        self.assertAlmostEqual(z_rate, detection_rate(phi), places=12)
        self.assertAlmostEqual(x_rate, x_basis_error_rate(phi), places=12)
        self.assertAlmostEqual((z_rate + x_rate) / 2, average_error_rate(phi), places=12)

    @parameterized.expand(
        [(0.0, 0.0), (1.0, 0.0), (0.5, 1.0), (0.25, 0.8112781244591328)]
    )
    def test_binary_entropy(self, p, expected):
        self.assertAlmostEqual(expected, binary_entropy(p), places=10)

    def test_information_at_the_largest_strength(self):
        self.assertAlmostEqual(0.8113, eve_information(math.pi / 4), places=4)
        self.assertEqual(0.0, eve_information(0.0))
        self.assertAlmostEqual(1.0, eve_information(math.pi / 2), places=12)

    def test_information_is_increasing(self):
        values = [eve_information(phi) for phi in np.linspace(0, math.pi / 4, 30)]
        self.assertEqual(sorted(values), values)


class TestAncillaState(unittest.TestCase):
    def test_entropy_matches_the_closed_forms(self):
        rng = np.random.default_rng(2024)
        for phi, p_c0 in zip(rng.uniform(0, math.pi / 4, 50), rng.uniform(0, 1, 50)):
            entropy = von_neumann_entropy(ancilla_state(phi, p_c0))
            self.assertAlmostEqual(eve_information(phi), entropy, delta=1e-10)
            self.assertAlmostEqual(
                eve_information_cos_form(phi), entropy, delta=1e-10
            )

    @parameterized.expand([(0.0,), (0.4,), (math.pi / 4,)])
    def test_eigenvalues(self, phi):
        expected = sorted(ancilla_eigenvalues(phi))
        actual = sorted(ancilla_state(phi).eigenvalues())
        np.testing.assert_allclose(actual, expected, atol=1e-12)
        self.assertAlmostEqual(1.0, sum(expected), places=12)

    def test_joint_state_dimensions(self):
        rho = joint_state_after_coding(0.2, 0.5)
        self.assertEqual((2, 2), rho.dims)

    def test_joint_state_without_attack(self):
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[2, 2] = 0.5
        np.testing.assert_allclose(
            joint_state_after_coding(0.0, 0.5).matrix, expected, atol=1e-12
        )

    @parameterized.expand([(0.1,), (0.5,), (math.pi / 4,)])
    def test_ancilla_does_not_depend_on_coding_probability(self, phi):
        reference = ancilla_state(phi, 0.5).matrix
        for p_c0 in (0.0, 0.25, 1.0):
            np.testing.assert_allclose(
                reference, ancilla_state(phi, p_c0).matrix, atol=1e-12
            )

    @parameterized.expand([(-0.1,), (1.1,)])
    def test_coding_probability_range(self, p_c0):
        with self.assertRaises(ValueError):
            joint_state_after_coding(0.2, p_c0)

    @parameterized.expand([((),), ((0.5,),), ((0.9, 0.1),)])
    def test_leg_state_is_maximally_mixed(self, upstream):
        np.testing.assert_allclose(
            averaged_leg_state(upstream).matrix, np.eye(2) / 2, atol=1e-12
        )


class TestMutualInformation(unittest.TestCase):
    @parameterized.expand(
        [
            ([0, 1, 0, 1], [0, 1, 0, 1], 1.0),
            ([0, 1, 0, 1], [1, 0, 1, 0], 1.0),
            ([0, 0, 1, 1], [0, 1, 0, 1], 0.0),
            ([0, 0, 0, 0], [0, 1, 0, 1], 0.0),
            ([], [], 0.0),
        ]
    )
    def test_estimate(self, xs, ys, expected):
        self.assertAlmostEqual(expected, mutual_information(xs, ys), places=12)

    def test_lengths_must_match(self):
        with self.assertRaises(ValueError):
            mutual_information([0, 1], [0])

    def test_stderr(self):
        self.assertEqual(0.0, mutual_information_stderr([1], [1]))
        self.assertGreaterEqual(mutual_information_stderr([0, 1, 1], [0, 1, 0]), 0.0)


class TestSimulatedAttack(unittest.TestCase):
    def test_detection_rate_at_the_largest_strength(self):
        config = ProtocolConfig(rounds=6000, p_control=0.5, f_sample2=0.1, rng_seed=17)
        attack = AttackConfig(adversary_agent=0, phi=math.pi / 4)
        transcript, outcome = simulate_attack(config, attack)
        self.assertEqual(attack, transcript.adversary)
        self.assertGreater(outcome.z_conclusive, 200)
        # four binomial standard errors
        delta = 4 * math.sqrt(0.25 * 0.75 / outcome.z_conclusive)
        self.assertAlmostEqual(0.25, outcome.detection_rate, delta=delta)
        self.assertLessEqual(outcome.mutual_information, eve_information(attack.phi))

    def test_x_basis_rate_at_the_largest_strength(self):
        config = ProtocolConfig(rounds=20_000, p_control=0.5, f_sample2=0.0, rng_seed=23)
        attack = AttackConfig(adversary_agent=0, phi=MAX_PHI)
        _, outcome = simulate_attack(config, attack)
        self.assertGreater(outcome.x_conclusive, 1000)
        expected = x_basis_error_rate(MAX_PHI)
        delta = 4 * binomial_stderr(expected, outcome.x_conclusive)
        self.assertAlmostEqual(expected, outcome.x_error_rate, delta=delta)

    @parameterized.expand([(0.1,), (0.3,), (0.5,), (0.7,)])
    def test_detection_rate_follows_the_strength(self, phi):
        config = ProtocolConfig(rounds=10_000, p_control=0.5, f_sample2=0.0, rng_seed=31)
        _, outcome = simulate_attack(config, AttackConfig(adversary_agent=0, phi=phi))
        comparison = compare_theory(outcome, phi)
        self.assertGreater(comparison.n_conclusive, 1000)
        self.assertLessEqual(abs(comparison.detection_z), 3)

    def test_no_attack_strength_no_errors(self):
        config = ProtocolConfig(rounds=500, p_control=0.3, rng_seed=5)
        _, outcome = simulate_attack(config, AttackConfig(adversary_agent=0, phi=0.0))
        self.assertEqual(0, outcome.z_errors + outcome.x_errors)
        self.assertEqual(0.0, outcome.error_rate)
        crossed = [o for o in outcome.ancilla_outcomes if o is not None]
        self.assertTrue(crossed)
        self.assertEqual({0}, set(crossed))
        self.assertEqual(len(outcome.eve_guesses), len(outcome.target_labels))

    def test_ancilla_only_on_crossed_legs(self):
        config = ProtocolConfig(num_agents=3, rounds=300, p_control=0.4, rng_seed=8)
        attack = AttackConfig(adversary_agent=1, phi=0.5)
        transcript, outcome = simulate_attack(config, attack)
        for record, ancilla in zip(transcript.records, outcome.ancilla_outcomes):
            crossed = len(record.agents) > attack.leg or record.returned
            self.assertEqual(crossed, ancilla is not None)

    def test_entangled_pairs_under_attack(self):
        config = ProtocolConfig(rounds=200, variant="epr", p_control=0.2, rng_seed=3)
        _, outcome = simulate_attack(config, AttackConfig(adversary_agent=0, phi=0.0))
        self.assertEqual(0, outcome.z_errors + outcome.x_errors)

    def test_qudit_attack_is_rejected(self):
        config = ProtocolConfig(rounds=10, variant="qudit:3")
        with self.assertRaises(ValueError):
            run_session(config, AttackConfig(adversary_agent=0))

    def test_leg_outside_the_ring(self):
        with self.assertRaises(ValueError):
            simulate_attack(ProtocolConfig(rounds=10), AttackConfig(adversary_agent=2))


if __name__ == "__main__":
    unittest.main()
