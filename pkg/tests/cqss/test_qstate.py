# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

import math
import unittest

import numpy as np
from cqss.adversary import attack_unitary
from cqss.exceptions import DimensionMismatchError, InvalidStateError, UnknownLabelError
from cqss.qstate import (
    X_BASIS,
    Z_BASIS,
    DensityMatrix,
    MeasBasis,
    PureState,
    UnitaryOp,
    apply,
    density_from_pure,
    evolve,
    identity,
    ket,
    measure,
    mix,
    outcome_probabilities,
    partial_trace,
    states_equal_up_to_phase,
    tensor,
    von_neumann_entropy,
)
from parameterized import parameterized

SIGMA_X = UnitaryOp(dim=2, matrix=[[0, 1], [1, 0]])
U1 = UnitaryOp(dim=2, matrix=[[0, 1], [-1, 0]])
HALF = 1 / math.sqrt(2)


def bell_phi_plus():
    return PureState(dims=(2, 2), amplitudes=[HALF, 0, 0, HALF])


def random_unitary(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(z)
    return UnitaryOp(dim=dim, matrix=q)


def random_state(dims, rng):
    size = math.prod(dims)
    amplitudes = rng.normal(size=size) + 1j * rng.normal(size=size)
    return PureState(dims=dims, amplitudes=amplitudes / np.linalg.norm(amplitudes))


def attacked(phi):
    """Photon in |1> and ancilla in |0> after the entangling attack."""
    return apply(attack_unitary(phi), tensor(ket(1), ket(0)), [0, 1])


class TestStates(unittest.TestCase):
    @parameterized.expand(
        [
            ("+z", [1, 0]),
            ("-z", [0, 1]),
            ("+x", [HALF, HALF]),
            ("-x", [HALF, -HALF]),
            ("−X", [HALF, -HALF]),
        ]
    )
    def test_named_kets(self, label, expected):
        np.testing.assert_allclose(ket(label).amplitudes, expected)

    def test_computational_kets(self):
        np.testing.assert_allclose(ket(2, dim=3).amplitudes, [0, 0, 1])

    @parameterized.expand([("+y", 2), ("+z", 3), (2, 2), (-1, 2)])
    def test_unknown_kets(self, label, dim):
        with self.assertRaises(UnknownLabelError):
            ket(label, dim)

    def test_unnormalized_state(self):
        with self.assertRaises(InvalidStateError):
            PureState(dims=(2,), amplitudes=[1, 1])

    def test_dims_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            PureState(dims=(2, 2), amplitudes=[1, 0])

    def test_dims_at_least_two(self):
        with self.assertRaises(InvalidStateError):
            PureState(dims=(1,), amplitudes=[1])

    def test_amplitudes_from_pairs(self):
        state = PureState(dims=(2,), amplitudes=[[0, HALF], [HALF, 0]])
        np.testing.assert_allclose(state.amplitudes, [1j * HALF, HALF])

    def test_tensor_order(self):
        state = tensor(ket(0), ket(1))
        self.assertEqual((2, 2), state.dims)
        np.testing.assert_allclose(state.amplitudes, [0, 1, 0, 0])

    def test_tensor_operators(self):
        op = tensor(identity(2), SIGMA_X)
        self.assertEqual(4, op.dim)
        np.testing.assert_allclose(op.matrix, np.kron(np.eye(2), SIGMA_X.matrix))

    def test_global_phase(self):
        state = ket("+x")
        self.assertTrue(states_equal_up_to_phase(state, state.with_phase(1j)))
        self.assertTrue(states_equal_up_to_phase(state, -state))
        self.assertFalse(states_equal_up_to_phase(state, ket("-x")))
        self.assertNotEqual(state, -state)

    def test_phase_modulus(self):
        with self.assertRaises(InvalidStateError):
            ket(0).with_phase(2)


class TestOperators(unittest.TestCase):
    def test_non_unitary(self):
        with self.assertRaises(InvalidStateError):
            UnitaryOp(dim=2, matrix=[[1, 1], [0, 1]])

    @parameterized.expand(
        [
            ("+z", "-z", -1),
            ("-z", "+z", 1),
            ("+x", "-x", 1),
            ("-x", "+x", -1),
        ]
    )
    def test_u1_flips_both_bases(self, label, flipped, sign):
        actual = apply(U1, ket(label), [0])
        np.testing.assert_allclose(actual.amplitudes, sign * ket(flipped).amplitudes)

    def test_apply_second_subsystem(self):
        actual = apply(SIGMA_X, tensor(ket(0), ket(0)), [1])
        np.testing.assert_allclose(actual.amplitudes, [0, 1, 0, 0])

    def test_apply_joint_targets_reversed(self):
        cnot = UnitaryOp(
            dim=4, matrix=[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
        )
        # control on subsystem 1, target on subsystem 0
        actual = apply(cnot, tensor(ket(0), ket(1)), [1, 0])
        np.testing.assert_allclose(actual.amplitudes, [0, 0, 0, 1])

    @parameterized.expand([([0, 0],), ([2],)])
    def test_bad_targets(self, targets):
        with self.assertRaises(DimensionMismatchError):
            apply(SIGMA_X, tensor(ket(0), ket(0)), targets)

    def test_operator_dimension(self):
        with self.assertRaises(DimensionMismatchError):
            apply(tensor(SIGMA_X, SIGMA_X), ket(0), [0])

    def test_evolve_matches_apply(self):
        state = tensor(ket("+x"), ket(1))
        expected = density_from_pure(apply(U1, state, [1]))
        actual = evolve(U1, density_from_pure(state), [1])
        np.testing.assert_allclose(actual.matrix, expected.matrix, atol=1e-12)

    def test_dagger(self):
        product = U1 @ U1.dagger()
        np.testing.assert_allclose(product.matrix, np.eye(2))

    def test_u1_squares_to_minus_identity(self):
        np.testing.assert_allclose((U1 @ U1).matrix, -np.eye(2))

    @parameterized.expand(
        [((2,), [0]), ((3,), [0]), ((2, 3), [1]), ((2, 2, 2), [2, 0])]
    )
    def test_inner_products_are_preserved(self, dims, targets):
        rng = np.random.default_rng(len(dims) + sum(targets))
        side = math.prod(dims[t] for t in targets)
        for _ in range(5):
            op = random_unitary(side, rng)
            a, b = random_state(dims, rng), random_state(dims, rng)
            moved = apply(op, a, targets).inner(apply(op, b, targets))
            self.assertAlmostEqual(a.inner(b), moved, places=10)

    def test_operations_keep_unit_norm(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            state = random_state((2, 3, 2), rng)
            state = apply(random_unitary(4, rng), state, [2, 0])
            self.assertAlmostEqual(1.0, np.linalg.norm(state.amplitudes), places=12)
            basis = MeasBasis(matrix=random_unitary(3, rng).matrix)
            _, post = measure(state, basis, 1, rng)
            self.assertAlmostEqual(1.0, np.linalg.norm(post.amplitudes), places=12)


class TestMeasurement(unittest.TestCase):
    @parameterized.expand(
        [("+z", Z_BASIS, 0), ("-z", Z_BASIS, 1), ("+x", X_BASIS, 0), ("-x", X_BASIS, 1)]
    )
    def test_matching_basis_is_deterministic(self, label, basis, expected):
        rng = np.random.default_rng(1)
        for _ in range(20):
            outcome, post = measure(ket(label), basis, 0, rng)
            self.assertEqual(expected, outcome)
            self.assertTrue(states_equal_up_to_phase(post, ket(label)))

    def test_conjugate_basis_is_uniform(self):
        rng = np.random.default_rng(2)
        n = 4000
        ones = sum(measure(ket("+x"), Z_BASIS, 0, rng)[0] for _ in range(n))
        # three standard errors of a fair coin
        self.assertAlmostEqual(0.5, ones / n, delta=3 * math.sqrt(0.25 / n))

    def test_measurement_collapses_partner(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            outcome, post = measure(bell_phi_plus(), Z_BASIS, 0, rng)
            partner, _ = measure(post, Z_BASIS, 1, rng)
            self.assertEqual(outcome, partner)

    def test_outcome_probabilities(self):
        probabilities = outcome_probabilities(ket("+x"), Z_BASIS, 0)
        np.testing.assert_allclose(probabilities, [0.5, 0.5])

    @parameterized.expand([(0,), (1,)])
    def test_attacked_state_at_the_largest_strength(self, subsystem):
        probabilities = outcome_probabilities(attacked(math.pi / 4), Z_BASIS, subsystem)
        np.testing.assert_allclose(probabilities, [0.5, 0.5], atol=1e-12)

    @parameterized.expand(
        [
            ("uniform", ket("+x"), 0, 0.5),
            ("photon", attacked(math.pi / 8), 0, math.cos(math.pi / 8) ** 2),
            ("ancilla", attacked(math.pi / 8), 1, math.sin(math.pi / 8) ** 2),
        ]
    )
    def test_born_rule_frequencies(self, _, state, target, p_one):
        rng = np.random.default_rng(21)
        n = 100_000
        ones = sum(measure(state, Z_BASIS, target, rng)[0] for _ in range(n))
        # three binomial standard errors
        delta = 3 * math.sqrt(p_one * (1 - p_one) / n)
        self.assertAlmostEqual(p_one, ones / n, delta=delta)

    def test_basis_dimension(self):
        with self.assertRaises(DimensionMismatchError):
            measure(ket(0, dim=3), Z_BASIS, 0, np.random.default_rng(0))
        with self.assertRaises(DimensionMismatchError):
            outcome_probabilities(ket(0, dim=3), Z_BASIS, 0)

    def test_named_basis(self):
        self.assertIs(X_BASIS, MeasBasis.named("x"))
        with self.assertRaises(UnknownLabelError):
            MeasBasis.named("Y")

    def test_non_orthonormal_basis(self):
        with self.assertRaises(InvalidStateError):
            MeasBasis(matrix=[[1, 1], [0, 1]])

    def test_basis_from_states(self):
        basis = MeasBasis.from_states([ket("+x"), ket("-x")])
        np.testing.assert_allclose(basis.matrix, X_BASIS.matrix)
        self.assertEqual(2, len(basis.vectors))


class TestDensityMatrices(unittest.TestCase):
    def test_partial_trace_of_bell_state(self):
        reduced = partial_trace(density_from_pure(bell_phi_plus()), keep=[1])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)
        self.assertAlmostEqual(1.0, von_neumann_entropy(reduced), places=10)

    def test_partial_trace_of_product(self):
        rho = density_from_pure(tensor(ket("+x"), ket(1)))
        kept = partial_trace(rho, keep=[0])
        np.testing.assert_allclose(
            kept.matrix, density_from_pure(ket("+x")).matrix, atol=1e-12
        )

    def test_partial_trace_needs_a_subsystem(self):
        with self.assertRaises(DimensionMismatchError):
            partial_trace(density_from_pure(bell_phi_plus()), keep=[])

    def test_pure_state_entropy(self):
        self.assertAlmostEqual(
            0.0, von_neumann_entropy(density_from_pure(ket("-x"))), places=10
        )

    def test_entropy_of_unequal_mixture(self):
        rho = DensityMatrix(dims=(2,), matrix=np.diag([0.75, 0.25]))
        self.assertAlmostEqual(0.8113, von_neumann_entropy(rho), places=4)

    def test_entropy_is_unitarily_invariant(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            rho = mix(
                (weight, density_from_pure(random_state((2, 2), rng)))
                for weight in (0.5, 0.3, 0.2)
            )
            moved = evolve(random_unitary(4, rng), rho, [0, 1])
            self.assertAlmostEqual(
                von_neumann_entropy(rho), von_neumann_entropy(moved), places=8
            )

    def test_mix(self):
        rho = mix([(0.5, density_from_pure(ket(0))), (0.5, density_from_pure(ket(1)))])
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)
        np.testing.assert_allclose(rho.eigenvalues(), [0.5, 0.5])

    @parameterized.expand([([0.5, 0.4],), ([1.5, -0.5],)])
    def test_mix_weights(self, weights):
        states = [density_from_pure(ket(0)), density_from_pure(ket(1))]
        with self.assertRaises(InvalidStateError):
            mix(zip(weights, states))

    def test_mix_empty(self):
        with self.assertRaises(InvalidStateError):
            mix([])

    def test_non_hermitian(self):
        with self.assertRaises(InvalidStateError):
            DensityMatrix(dims=(2,), matrix=[[0.5, 0.5], [0, 0.5]])

    def test_negative_eigenvalue(self):
        with self.assertRaises(InvalidStateError):
            DensityMatrix(dims=(2,), matrix=[[1.5, 0], [0, -0.5]])


if __name__ == "__main__":
    unittest.main()
