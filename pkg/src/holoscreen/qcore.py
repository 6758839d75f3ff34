"""Finite-dimensional quantum state kernel.

Dense state vectors and density matrices over bipartite splits, plus the
handful of operations the rest of the library leans on: Kronecker products,
partial traces, von Neumann entropy, Schmidt-rank separability tests and
unitary evolution.  Everything is double precision, value-semantic and capped
at joint dimension 2**12 so naive cross-check oracles stay affordable.

Entropy is reported in bits (log base 2); use :func:`bits_to_nats` to convert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import MAX_JOINT_DIM, TOL

LN2 = math.log(2.0)


class DimensionMismatchError(ValueError):
    """An operand's dimension disagrees with a split or an operator."""


class NonUnitaryError(ValueError):
    """Evolution was requested with a matrix that is not unitary."""

    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"matrix is not unitary: max|U^dag U - I| = {deviation:.3e}")


@dataclass(frozen=True)
class StateVector:
    """Pure state as a dense complex amplitude vector, unit norm enforced."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size < 1:
            raise ValueError("state needs at least one amplitude")
        if amps.size > MAX_JOINT_DIM:
            raise ValueError(f"dimension {amps.size} exceeds cap {MAX_JOINT_DIM}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > TOL.normalization:
            raise ValueError(f"state not normalized: norm = {norm!r}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state: Hermitian, unit-trace, (numerically) positive semidefinite.

    Hermiticity and trace are validated on construction; the eigenvalue floor
    is checked wherever a spectrum is actually computed (see
    :func:`von_neumann_entropy` and :meth:`validate_spectrum`).
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] > MAX_JOINT_DIM:
            raise ValueError(f"dimension {m.shape[0]} exceeds cap {MAX_JOINT_DIM}")
        herm_gap = float(np.max(np.abs(m - m.conj().T)))
        if herm_gap > TOL.hermiticity:
            raise ValueError(f"not Hermitian: max|rho - rho^dag| = {herm_gap:.3e}")
        trace_gap = abs(float(np.trace(m).real) - 1.0)
        if trace_gap > TOL.normalization:
            raise ValueError(f"trace differs from 1 by {trace_gap:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def validate_spectrum(self) -> np.ndarray:
        """Return the eigenvalues, raising if any is meaningfully negative."""
        evals = self.eigenvalues()
        if float(evals.min()) < TOL.eigenvalue_floor:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")
        return evals


@dataclass(frozen=True)
class BipartiteSplit:
    """A fixed factorization dim = dim_a * dim_b of a joint Hilbert space."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("split dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def check(self, dim: int):
        if dim != self.dim:
            raise DimensionMismatchError(
                f"split {self.dim_a}x{self.dim_b} does not match dimension {dim}"
            )


def basis_state(dim: int, index: int) -> StateVector:
    """Computational basis vector |index> in the given dimension."""
    if not 0 <= index < dim:
        raise ValueError(f"index {index} outside [0, {dim})")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def normalized(amplitudes) -> StateVector:
    """Build a state from an arbitrary nonzero amplitude vector."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return StateVector(amps / norm)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product of two pure states; a's index is the major one."""
    if a.dim * b.dim > MAX_JOINT_DIM:
        raise ValueError(
            f"product dimension {a.dim * b.dim} exceeds cap {MAX_JOINT_DIM}"
        )
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho: DensityMatrix, split: BipartiteSplit, keep: str) -> DensityMatrix:
    """Trace out one side of a bipartite density matrix.

    ``keep`` is ``"A"`` (major index, dimension ``split.dim_a``) or ``"B"``.
    """
    split.check(rho.dim)
    blocks = rho.entries.reshape(split.dim_a, split.dim_b, split.dim_a, split.dim_b)
    if keep == "A":
        reduced = np.einsum("ijkj->ik", blocks)
    elif keep == "B":
        reduced = np.einsum("ijil->jl", blocks)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(reduced)


def reduced_density(psi: StateVector, split: BipartiteSplit, keep: str) -> DensityMatrix:
    """Reduced density matrix of a pure joint state, without forming the joint rho.

    Equivalent to ``partial_trace(psi.density(), split, keep)`` but O(dim^2)
    in memory instead of O(dim^2) on the joint side.
    """
    split.check(psi.dim)
    mat = psi.amplitudes.reshape(split.dim_a, split.dim_b)
    if keep == "A":
        return DensityMatrix(mat @ mat.conj().T)
    if keep == "B":
        return DensityMatrix(mat.T @ mat.conj())
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def von_neumann_entropy(rho: DensityMatrix, cutoff: float | None = None) -> float:
    """Entropy -sum(lam * log2 lam) over eigenvalues above the cutoff, in bits."""
    if cutoff is None:
        cutoff = TOL.entropy_cutoff
    evals = rho.validate_spectrum()
    evals = evals[evals > cutoff]
    if evals.size == 0:
        return 0.0
    s = float(-np.sum(evals * np.log2(evals)))
    return max(s, 0.0)


def bits_to_nats(bits: float) -> float:
    return bits * LN2


def nats_to_bits(nats: float) -> float:
    return nats / LN2


@dataclass(frozen=True)
class SchmidtResult:
    separable: bool
    rank: int
    coefficients: np.ndarray  # singular values, descending


def schmidt_separability(
    psi: StateVector, split: BipartiteSplit, tol: float | None = None
) -> SchmidtResult:
    """Schmidt rank across the split; separable means exactly one coefficient."""
    if tol is None:
        tol = TOL.schmidt
    split.check(psi.dim)
    mat = psi.amplitudes.reshape(split.dim_a, split.dim_b)
    singular = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.count_nonzero(singular > tol))
    return SchmidtResult(separable=(rank == 1), rank=rank, coefficients=singular)


def unitarity_deviation(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def evolve(psi: StateVector, u: np.ndarray) -> StateVector:
    """Apply a unitary to the state.  Non-unitary input is rejected outright."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (psi.dim, psi.dim):
        raise DimensionMismatchError(
            f"operator shape {u.shape} does not match state dimension {psi.dim}"
        )
    deviation = unitarity_deviation(u)
    if deviation > TOL.unitarity:
        raise NonUnitaryError(deviation)
    return StateVector(u @ psi.amplitudes)
