# Copyright 2024-present, CQSS Contributors.
# All rights reserved.
#
# This source code is licensed under the Apache-2.0 license found in
# the LICENSE file in the root directory of this source tree.

"""Module for exact finite-dimensional quantum state and operator algebra.

This module provides the value types every other part of cqss computes with:

- PureState: a normalized complex vector over a tensor product of subsystems.
- DensityMatrix: a Hermitian, unit-trace, positive semidefinite matrix.
- UnitaryOp: a square unitary matrix.
- MeasBasis: an orthonormal measuring basis for one subsystem.

All of them are frozen pydantic models whose invariants are checked at construction.
Subsystem 0 is the slowest-varying tensor index everywhere: the amplitude of
|i_0 i_1 ... i_k> sits at the row-major index of (i_0, i_1, ..., i_k) in an array of
shape `dims`. Global phases are kept exactly; protocol-level comparisons use
`states_equal_up_to_phase`.

Random draws always come from an explicit `numpy.random.Generator` argument.
"""

import functools
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from multipledispatch import dispatch
from pydantic import (
    BaseModel,
    ConfigDict,
    field_serializer,
    field_validator,
    model_validator,
)

from cqss.defaults import ALGEBRA_TOL, EIGENVALUE_FLOOR, NORM_TOL, QUBIT
from cqss.exceptions import DimensionMismatchError, InvalidStateError, UnknownLabelError

Label = Union[str, int]

_SQRT_HALF = 1 / math.sqrt(2)
_NAMED_QUBIT_KETS = {
    "+z": (1.0, 0.0),
    "-z": (0.0, 1.0),
    "+x": (_SQRT_HALF, _SQRT_HALF),
    "-x": (_SQRT_HALF, -_SQRT_HALF),
}


def _as_complex_array(value, ndim: int) -> np.ndarray:
    """Accepts complex arrays or nested [re, im] pairs and returns a read-only copy."""
    array = np.array(value)
    if array.ndim == ndim + 1 and array.shape[-1] == 2 and not np.iscomplexobj(array):
        array = array[..., 0] + 1j * array[..., 1]
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _valid_dims(dims) -> Tuple[int, ...]:
    if not dims or any(d < 2 for d in dims):
        raise InvalidStateError(f"Subsystem dimensions must be >= 2, found {dims}")
    return tuple(int(d) for d in dims)


def _complex_pairs(array: np.ndarray) -> list:
    return np.stack([array.real, array.imag], axis=-1).tolist()


class _Quantity(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @classmethod
    def unchecked(cls, **fields):
        """Builds an instance without re-checking invariants the caller preserved."""
        return cls.model_construct(**fields)


class PureState(_Quantity):
    """
    A pure state over subsystems of the given dimensions.

    Attributes:
        dims (Tuple[int, ...]): Subsystem dimensions, each at least 2.
        amplitudes (np.ndarray): Complex amplitudes of length prod(dims).
    """

    dims: Tuple[int, ...]
    amplitudes: np.ndarray

    @field_validator("dims")
    @classmethod
    def dims_at_least_two(cls, dims):
        return _valid_dims(dims)

    @field_validator("amplitudes", mode="before")
    @classmethod
    def complex_vector(cls, value):
        return _as_complex_array(value, ndim=1).reshape(-1)

    @model_validator(mode="after")
    def normalized(self):
        if self.amplitudes.size != math.prod(self.dims):
            raise DimensionMismatchError(
                f"{self.amplitudes.size} amplitudes do not match dims {self.dims}"
            )
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1) > NORM_TOL:
            raise InvalidStateError(f"State norm is {norm}, expected 1")
        return self

    @field_serializer("amplitudes")
    def serialize_amplitudes(self, amplitudes):
        return _complex_pairs(amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "PureState") -> complex:
        """<self|other>"""
        if self.dims != other.dims:
            raise DimensionMismatchError(f"{self.dims} != {other.dims}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def with_phase(self, phase: complex) -> "PureState":
        if abs(abs(phase) - 1) > NORM_TOL:
            raise InvalidStateError(f"Global phase must have modulus 1, found {phase}")
        return PureState.unchecked(dims=self.dims, amplitudes=self.amplitudes * phase)

    def __neg__(self):
        return self.with_phase(-1)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(
            self.amplitudes, other.amplitudes
        )


class DensityMatrix(_Quantity):
    """
    A mixed state over subsystems of the given dimensions.

    Attributes:
        dims (Tuple[int, ...]): Subsystem dimensions.
        matrix (np.ndarray): Complex square matrix of side prod(dims).
    """

    dims: Tuple[int, ...]
    matrix: np.ndarray

    @field_validator("dims")
    @classmethod
    def dims_at_least_two(cls, dims):
        return _valid_dims(dims)

    @field_validator("matrix", mode="before")
    @classmethod
    def complex_matrix(cls, value):
        return _as_complex_array(value, ndim=2)

    @model_validator(mode="after")
    def physical(self):
        side = math.prod(self.dims)
        if self.matrix.shape != (side, side):
            raise DimensionMismatchError(
                f"Matrix of shape {self.matrix.shape} does not match dims {self.dims}"
            )
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > NORM_TOL:
            raise InvalidStateError("Density matrix is not Hermitian")
        trace = complex(np.trace(self.matrix))
        if abs(trace - 1) > NORM_TOL:
            raise InvalidStateError(f"Density matrix trace is {trace}, expected 1")
        if np.min(np.linalg.eigvalsh(self.matrix)) < EIGENVALUE_FLOOR:
            raise InvalidStateError("Density matrix has a negative eigenvalue")
        return self

    @field_serializer("matrix")
    def serialize_matrix(self, matrix):
        return _complex_pairs(matrix)

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues with floating-point drift below zero clamped to 0."""
        values = np.linalg.eigvalsh(self.matrix)
        return np.where(values > 0, values, 0.0)


class UnitaryOp(_Quantity):
    """
    A unitary operator.

    Attributes:
        dim (int): Side length.
        matrix (np.ndarray): Complex square matrix with U U^dagger = I.
    """

    dim: int
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def complex_matrix(cls, value):
        return _as_complex_array(value, ndim=2)

    @model_validator(mode="after")
    def unitary(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"Matrix of shape {self.matrix.shape} is not {self.dim}x{self.dim}"
            )
        product = self.matrix @ self.matrix.conj().T
        if np.max(np.abs(product - np.eye(self.dim))) > NORM_TOL:
            raise InvalidStateError("Operator is not unitary")
        return self

    @field_serializer("matrix")
    def serialize_matrix(self, matrix):
        return _complex_pairs(matrix)

    def dagger(self) -> "UnitaryOp":
        return UnitaryOp.unchecked(dim=self.dim, matrix=self.matrix.conj().T)

    def __matmul__(self, other: "UnitaryOp") -> "UnitaryOp":
        if self.dim != other.dim:
            raise DimensionMismatchError(f"{self.dim} != {other.dim}")
        return UnitaryOp.unchecked(dim=self.dim, matrix=self.matrix @ other.matrix)


class MeasBasis(_Quantity):
    """
    A projective measuring basis for one subsystem.

    Attributes:
        label (Optional[str]): "Z" or "X" for the qubit bases, else None.
        matrix (np.ndarray): Basis vectors as columns; outcome k is column k.
    """

    label: Optional[str] = None
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def complex_matrix(cls, value):
        return _as_complex_array(value, ndim=2)

    @model_validator(mode="after")
    def orthonormal(self):
        rows, columns = self.matrix.shape
        if rows != columns:
            raise DimensionMismatchError("A basis needs as many vectors as dimensions")
        gram = self.matrix.conj().T @ self.matrix
        if np.max(np.abs(gram - np.eye(rows))) > NORM_TOL:
            raise InvalidStateError("Basis vectors are not orthonormal")
        return self

    @field_serializer("matrix")
    def serialize_matrix(self, matrix):
        return _complex_pairs(matrix)

    @classmethod
    def from_states(cls, states: Sequence[PureState], label: Optional[str] = None):
        return cls(label=label, matrix=np.column_stack([s.amplitudes for s in states]))

    @classmethod
    def computational(cls, dim: int):
        return cls(label="Z" if dim == QUBIT else None, matrix=np.eye(dim))

    @classmethod
    def named(cls, label: str) -> "MeasBasis":
        try:
            return _NAMED_BASES[label.upper()]
        except KeyError as err:
            raise UnknownLabelError(f"Unknown measuring basis: {label}") from err

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> List[PureState]:
        return [
            PureState.unchecked(dims=(self.dim,), amplitudes=self.matrix[:, k])
            for k in range(self.dim)
        ]


def ket(label: Label, dim: int = QUBIT) -> PureState:
    """
    Args:
        label (Label): One of "+z", "-z", "+x", "-x" for a qubit, or a computational
            index j < dim
        dim (int): Dimension of the system

    Returns:
        The normalized named state
    """
    if isinstance(label, str):
        key = label.strip().replace("−", "-").lower()
        if dim != QUBIT or key not in _NAMED_QUBIT_KETS:
            raise UnknownLabelError(f"Unknown ket label '{label}' for dimension {dim}")
        return _named_ket(key)
    if not 0 <= int(label) < dim:
        raise UnknownLabelError(f"Index {label} out of range for dimension {dim}")
    return _computational_ket(int(label), dim)


# one shared instance per label; amplitudes are read-only
@functools.lru_cache(maxsize=None)
def _named_ket(key: str) -> PureState:
    return PureState(dims=(QUBIT,), amplitudes=_NAMED_QUBIT_KETS[key])


@functools.lru_cache(maxsize=None)
def _computational_ket(index: int, dim: int) -> PureState:
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[index] = 1
    return PureState(dims=(dim,), amplitudes=amplitudes)


def identity(dim: int) -> UnitaryOp:
    return UnitaryOp(dim=dim, matrix=np.eye(dim))


@dispatch(PureState, PureState)
def tensor(a, b):
    return PureState.unchecked(
        dims=a.dims + b.dims, amplitudes=np.kron(a.amplitudes, b.amplitudes)
    )


@dispatch(UnitaryOp, UnitaryOp)
def tensor(a, b):  # noqa: F811
    return UnitaryOp.unchecked(dim=a.dim * b.dim, matrix=np.kron(a.matrix, b.matrix))


@dispatch(DensityMatrix, DensityMatrix)
def tensor(a, b):  # noqa: F811
    return DensityMatrix.unchecked(
        dims=a.dims + b.dims, matrix=np.kron(a.matrix, b.matrix)
    )


def _check_targets(dims: Tuple[int, ...], targets: Sequence[int]) -> List[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionMismatchError(f"Repeated target in {targets}")
    if any(not 0 <= t < len(dims) for t in targets):
        raise DimensionMismatchError(f"Targets {targets} out of range for dims {dims}")
    return targets


def _apply_columns(
    matrix: np.ndarray, dims: Tuple[int, ...], targets: List[int], columns: np.ndarray
) -> np.ndarray:
    """Applies `matrix` to the target subsystems of every column of `columns`."""
    width = columns.shape[1]
    tensor_ = columns.reshape(dims + (width,))
    front = list(range(len(targets)))
    tensor_ = np.moveaxis(tensor_, targets, front)
    shape = tensor_.shape
    tensor_ = (matrix @ tensor_.reshape(matrix.shape[1], -1)).reshape(shape)
    return np.moveaxis(tensor_, front, targets).reshape(-1, width)


def _leading(targets: List[int]) -> bool:
    return targets == list(range(len(targets)))


def apply(U: UnitaryOp, s: PureState, targets: Sequence[int]) -> PureState:
    """
    Args:
        U (UnitaryOp): Operator acting on the listed subsystems jointly
        s (PureState): State to transform
        targets (Sequence[int]): Distinct subsystem indices; the first target is the
            slowest-varying index of U

    Returns:
        The state with U applied to the targets and identity elsewhere
    """
    targets = _check_targets(s.dims, targets)
    if math.prod(s.dims[t] for t in targets) != U.dim:
        raise DimensionMismatchError(
            f"Operator of dimension {U.dim} does not act on subsystems {targets} "
            f"of {s.dims}"
        )
    if _leading(targets):
        amplitudes = (U.matrix @ s.amplitudes.reshape(U.dim, -1)).reshape(-1)
    else:
        amplitudes = _apply_columns(
            U.matrix, s.dims, targets, s.amplitudes.reshape(-1, 1)
        ).reshape(-1)
    return PureState.unchecked(dims=s.dims, amplitudes=amplitudes)
def embed(U: UnitaryOp, dims: Tuple[int, ...], targets: Sequence[int]) -> UnitaryOp:
    """Lifts U on `targets` to the full space of `dims`."""
    targets = _check_targets(dims, targets)
    if math.prod(dims[t] for t in targets) != U.dim:
        raise DimensionMismatchError(f"Operator of dimension {U.dim} on {targets}")
    side = math.prod(dims)
    return UnitaryOp.unchecked(
        dim=side, matrix=_apply_columns(U.matrix, dims, targets, np.eye(side))
    )


def evolve(U: UnitaryOp, rho: DensityMatrix, targets: Sequence[int]) -> DensityMatrix:
    full = embed(U, rho.dims, targets).matrix
    return DensityMatrix.unchecked(
        dims=rho.dims, matrix=full @ rho.matrix @ full.conj().T
    )


def _basis_components(s: PureState, basis: MeasBasis, target: int) -> np.ndarray:
    """Row k holds the amplitudes of the rest of the system alongside outcome k."""
    (target,) = _check_targets(s.dims, [target])
    if basis.dim != s.dims[target]:
        raise DimensionMismatchError(
            f"Basis of dimension {basis.dim} on subsystem of dimension {s.dims[target]}"
        )
    if target == 0:
        front = s.amplitudes.reshape(basis.dim, -1)
    else:
        front = np.moveaxis(s.amplitudes.reshape(s.dims), target, 0)
        front = front.reshape(basis.dim, -1)
    return basis.matrix.conj().T @ front


def _draw_outcome(probabilities: List[float], u: float) -> int:
    total = 0.0
    outcome = 0
    for k, p in enumerate(probabilities):
        if p > 0:
            outcome = k
        total += p
        if u < total:
            break
    return outcome


def measure(
    s: PureState, basis: MeasBasis, target: int, rng: np.random.Generator
) -> Tuple[int, PureState]:
    """
    Args:
        s (PureState): State to measure
        basis (MeasBasis): Basis for the target subsystem
        target (int): Subsystem index
        rng (np.random.Generator): Random stream

    Returns:
        The outcome index k, drawn with the Born-rule probability, and the renormalized
        post-measurement state
    """
    components = _basis_components(s, basis, target)
    weights = np.square(np.abs(components)).sum(axis=1).tolist()
    norm = math.fsum(weights)
    outcome = _draw_outcome(weights, rng.random() * norm)
    post = np.outer(basis.matrix[:, outcome], components[outcome])
    post = post / math.sqrt(weights[outcome])
    if target != 0:
        rest = s.dims[:target] + s.dims[target + 1 :]
        post = np.moveaxis(post.reshape((basis.dim,) + rest), 0, target)
    return outcome, PureState.unchecked(dims=s.dims, amplitudes=post.reshape(-1))


def outcome_probabilities(s: PureState, basis: MeasBasis, target: int) -> np.ndarray:
    """Born-rule distribution of measuring `target` in `basis`, without sampling."""
    components = _basis_components(s, basis, target)
    return np.sum(np.abs(components) ** 2, axis=1)
def density_from_pure(s: PureState) -> DensityMatrix:
    return DensityMatrix.unchecked(
        dims=s.dims, matrix=np.outer(s.amplitudes, s.amplitudes.conj())
    )


def mix(entries: Iterable[Tuple[float, DensityMatrix]]) -> DensityMatrix:
    """
    Args:
        entries (Iterable[Tuple[float, DensityMatrix]]): (weight, state) pairs with
            non-negative weights summing to 1

    Returns:
        The convex combination
    """
    entries = list(entries)
    if not entries:
        raise InvalidStateError("Cannot mix an empty ensemble")
    dims = entries[0][1].dims
    total = 0.0
    matrix = np.zeros_like(entries[0][1].matrix)
    for weight, rho in entries:
        if weight < 0:
            raise InvalidStateError(f"Negative weight {weight}")
        if rho.dims != dims:
            raise DimensionMismatchError(f"{rho.dims} != {dims}")
        total += weight
        matrix = matrix + weight * rho.matrix
    if abs(total - 1) > NORM_TOL:
        raise InvalidStateError(f"Weights sum to {total}, expected 1")
    return DensityMatrix(dims=dims, matrix=matrix)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """
    Args:
        rho (DensityMatrix): Joint state
        keep (Sequence[int]): Subsystems to keep, in the order they should appear

    Returns:
        The reduced density matrix over the kept subsystems
    """
    if not keep:
        raise DimensionMismatchError("partial_trace needs at least one kept subsystem")
    keep = _check_targets(rho.dims, keep)
    n = len(rho.dims)
    traced = [i for i in range(n) if i not in keep]
    order = keep + traced
    kept_dim = math.prod(rho.dims[i] for i in keep)
    traced_dim = math.prod(rho.dims[i] for i in traced)
    tensor_ = rho.matrix.reshape(rho.dims + rho.dims)
    tensor_ = tensor_.transpose(order + [n + i for i in order])
    tensor_ = tensor_.reshape(kept_dim, traced_dim, kept_dim, traced_dim)
    reduced = np.trace(tensor_, axis1=1, axis2=3)
    return DensityMatrix(dims=tuple(rho.dims[i] for i in keep), matrix=reduced)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lambda log2 lambda) over the eigenvalues, with 0 log 0 = 0."""
    values = rho.eigenvalues()
    values = values[values > 0]
    entropy = float(-np.sum(values * np.log2(values)))
    return min(max(entropy, 0.0), math.log2(rho.matrix.shape[0]))


def states_equal_up_to_phase(
    a: PureState, b: PureState, tol: float = ALGEBRA_TOL
) -> bool:
    return abs(a.inner(b)) > 1 - tol


_NAMED_BASES = {
    "Z": MeasBasis(label="Z", matrix=np.eye(QUBIT)),
    "X": MeasBasis.from_states([ket("+x"), ket("-x")], label="X"),
}
Z_BASIS = _NAMED_BASES["Z"]
X_BASIS = _NAMED_BASES["X"]
