"""Dense linear-algebra oracles on a weighted L2 space.

Operators act on vectors of point values; adjoints, norms, and every
decomposition here are taken with respect to the weighted inner product
<f, g> = sum_i f_i conj(g_i) mu_i. All computations conjugate by the
diagonal similarity D^(1/2) . D^(-1/2), with D = diag(mu), so that the
standard Euclidean Hermitian eigensolver and SVD apply, and map the
result back. In the conjugated frame the weighted inner product is the
Euclidean one, so orthonormality statements are exact there.

These routines are the independent side of every closed-form check in
the rest of the package: they only ever see a dense matrix and know
nothing about conditional-expectation structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    NotNormalError,
    NotPositiveError,
    NotSelfAdjointError,
    SpaceMismatchError,
)
from .measure import FiniteMeasureSpace, MeasurableFunction

# Relative singular-value cutoff deciding numerical kernels.
RANK_TOL = 1e-9
# Eigenvalues of a positive operator within this relative distance of zero
# are treated as exact kernel before taking roots.
CLAMP_TOL = 1e-10
# Allowed relative asymmetry before an operator is rejected as not
# self-adjoint.
SELF_ADJOINT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class WeightedOperator:
    """Square complex matrix acting on point-value vectors over a space."""

    space: FiniteMeasureSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.n
        if m.shape != (n, n):
            raise SpaceMismatchError(f"matrix shape {m.shape} does not match n={n}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, space: FiniteMeasureSpace) -> "WeightedOperator":
        return cls(space, np.eye(space.n, dtype=complex))

    @classmethod
    def zero(cls, space: FiniteMeasureSpace) -> "WeightedOperator":
        return cls(space, np.zeros((space.n, space.n), dtype=complex))

    @classmethod
    def multiplication(
        cls, space: FiniteMeasureSpace, symbol: "MeasurableFunction | np.ndarray"
    ) -> "WeightedOperator":
        """Diagonal operator f -> symbol * f."""
        vals = symbol.values if isinstance(symbol, MeasurableFunction) else np.asarray(symbol)
        return cls(space, np.diag(np.asarray(vals, dtype=complex)))

    def apply(self, f: "MeasurableFunction | np.ndarray") -> np.ndarray:
        vals = f.values if isinstance(f, MeasurableFunction) else np.asarray(f, dtype=complex)
        return self.matrix @ vals

    def _check_space(self, other: "WeightedOperator") -> None:
        if self.space != other.space:
            raise SpaceMismatchError("operators live on different spaces")

    def __matmul__(self, other: "WeightedOperator") -> "WeightedOperator":
        self._check_space(other)
        return WeightedOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "WeightedOperator") -> "WeightedOperator":
        self._check_space(other)
        return WeightedOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "WeightedOperator") -> "WeightedOperator":
        self._check_space(other)
        return WeightedOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "WeightedOperator":
        return WeightedOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Real spectrum and orthonormal eigenbasis of a self-adjoint operator.

    values are ascending; vectors holds the eigenvectors as columns,
    orthonormal in the weighted inner product.
    """

    space: FiniteMeasureSpace
    values: np.ndarray
    vectors: np.ndarray


def to_euclidean(a: WeightedOperator) -> np.ndarray:
    """Conjugated matrix D^(1/2) A D^(-1/2); Euclidean-frame representative."""
    s = a.space.sqrt_weights
    return a.matrix * s[:, None] / s[None, :]


def from_euclidean(space: FiniteMeasureSpace, m: np.ndarray) -> WeightedOperator:
    s = space.sqrt_weights
    return WeightedOperator(space, m / s[:, None] * s[None, :])


def weighted_adjoint(a: WeightedOperator) -> WeightedOperator:
    """Adjoint in the weighted inner product: D^(-1) A^H D."""
    w = a.space.weights
    return WeightedOperator(a.space, a.matrix.conj().T * (w[None, :] / w[:, None]))


def operator_norm(a: WeightedOperator) -> float:
    """Largest singular value with respect to the weighted inner product."""
    e = to_euclidean(a)
    if not e.any():
        return 0.0
    return float(np.linalg.svd(e, compute_uv=False)[0])


def op_deviation(a: WeightedOperator, b: WeightedOperator) -> float:
    """Relative distance ||a - b|| / (1 + max(||a||, ||b||)), weighted norms."""
    return operator_norm(a - b) / (1.0 + max(operator_norm(a), operator_norm(b)))


def _eigh_euclidean(
    a: WeightedOperator, sym_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and Euclidean-frame orthonormal eigenvectors.

    Rejects operators whose weighted asymmetry exceeds sym_tol * ||a||;
    the accepted asymmetry is folded away by symmetrizing the conjugated
    matrix before factorization.
    """
    dev = operator_norm(a - weighted_adjoint(a))
    if dev > sym_tol * operator_norm(a):
        raise NotSelfAdjointError(
            f"asymmetry {dev:.3e} exceeds {sym_tol:.1e} * norm"
        )
    h = to_euclidean(a)
    h = 0.5 * (h + h.conj().T)
    vals, vecs = scipy.linalg.eigh(h)
    return vals, vecs


def hermitian_eig(a: WeightedOperator, sym_tol: float = SELF_ADJOINT_TOL) -> EigenSystem:
    """Full spectrum and weighted-orthonormal eigenbasis of a self-adjoint
    operator. Raises NotSelfAdjointError when the asymmetry check fails."""
    vals, vecs = _eigh_euclidean(a, sym_tol)
    v = vecs / a.space.sqrt_weights[:, None]
    return EigenSystem(a.space, vals, v)


def positive_sqrt(
    a: WeightedOperator,
    clamp_tol: float = CLAMP_TOL,
    sym_tol: float = SELF_ADJOINT_TOL,
) -> WeightedOperator:
    """Positive square root of a positive self-adjoint operator.

    Eigenvalues below -clamp_tol * ||a|| raise NotPositiveError; values
    within clamp_tol * ||a|| of zero are treated as exact kernel, so the
    root of a singular operator has a clean kernel instead of spurious
    sqrt(rounding) eigenvalues.
    """
    vals, vecs = _eigh_euclidean(a, sym_tol)
    scale = float(np.abs(vals).max()) if vals.size else 0.0
    if float(vals.min()) < -clamp_tol * scale:
        raise NotPositiveError(
            f"minimum eigenvalue {vals.min():.3e} below -{clamp_tol:.1e} * norm"
        )
    snapped = np.where(vals <= clamp_tol * scale, 0.0, vals)
    root = (vecs * np.sqrt(snapped)[None, :]) @ vecs.conj().T
    return from_euclidean(a.space, root)


def func_calc_oracle(
    a: WeightedOperator,
    f: Callable[[float], complex],
    sym_tol: float = SELF_ADJOINT_TOL,
) -> WeightedOperator:
    """Continuous functional calculus of a self-adjoint operator by full
    eigendecomposition: sum_k f(lambda_k) v_k <v_k, .>."""
    vals, vecs = _eigh_euclidean(a, sym_tol)
    fvals = np.asarray([f(float(v)) for v in vals], dtype=complex)
    m = (vecs * fvals[None, :]) @ vecs.conj().T
    return from_euclidean(a.space, m)


def polar_oracle(
    a: WeightedOperator, rank_tol: float = RANK_TOL
) -> tuple[WeightedOperator, WeightedOperator]:
    """Polar decomposition a = U P via SVD in the conjugated frame.

    P is the positive factor (A* A)^(1/2); U is the partial isometry that
    agrees with A P^+ on the orthogonal complement of ker P and vanishes
    on ker P, so ker U = ker P = ker A. Singular values at or below
    rank_tol * sigma_max count as kernel.
    """
    e = to_euclidean(a)
    left, sig, right_h = np.linalg.svd(e)
    smax = float(sig.max()) if sig.size else 0.0
    keep = sig > rank_tol * smax if smax > 0.0 else np.zeros_like(sig, dtype=bool)
    u_eu = left[:, keep] @ right_h[keep, :]
    p_eu = (right_h.conj().T * np.where(keep, sig, 0.0)[None, :]) @ right_h
    return from_euclidean(a.space, u_eu), from_euclidean(a.space, p_eu)


def kernel_projection(a: WeightedOperator, rank_tol: float = RANK_TOL) -> WeightedOperator:
    """Orthogonal projection onto the numerical kernel of a.

    The kernel is spanned by the right singular vectors whose singular
    values are at most rank_tol * sigma_max; the zero operator maps to
    the identity.
    """
    e = to_euclidean(a)
    _, sig, right_h = np.linalg.svd(e)
    smax = float(sig.max()) if sig.size else 0.0
    null = sig <= rank_tol * smax if smax > 0.0 else np.ones_like(sig, dtype=bool)
    v0 = right_h[null, :].conj().T
    return from_euclidean(a.space, v0 @ v0.conj().T)


def normal_func_calc_oracle(
    a: WeightedOperator,
    f: Callable[[complex], complex],
    normal_tol: float = SELF_ADJOINT_TOL,
) -> WeightedOperator:
    """Functional calculus of a normal operator via complex Schur form.

    For a normal matrix the Schur factor is diagonal up to rounding; f is
    applied to the diagonal and the strictly triangular residue dropped.
    Raises NotNormalError when the commutator [A, A*] is not negligible.
    """
    e = to_euclidean(a)
    comm = e @ e.conj().T - e.conj().T @ e
    scale = 1.0 + float(np.linalg.norm(e, 2)) ** 2
    if float(np.linalg.norm(comm, 2)) > normal_tol * scale:
        raise NotNormalError("operator is not normal within tolerance")
    tri, q = scipy.linalg.schur(e, output="complex")
    fdiag = np.asarray([f(complex(z)) for z in np.diag(tri)], dtype=complex)
    m = (q * fdiag[None, :]) @ q.conj().T
    return from_euclidean(a.space, m)
