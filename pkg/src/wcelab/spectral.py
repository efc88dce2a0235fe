"""Normality, spectrum, and spectral decomposition of averaged
multiplication operators, plus projection-valued measures induced by
point maps.

The operator studied here sends f to E(u f): multiplication by a symbol
u followed by block averaging. It is normal exactly when u is blockwise
constant, its spectrum is the set of block means of u together with 0,
and in the normal case it diagonalizes over projections of the form
"indicator of a level set of u, then average".

A point map phi on the space induces the fiber partition (preimages of
single points), the pushforward density, and the projection-valued set
function S -> E_phi M_{indicator of preimage(S)}, where E_phi averages
over fibers. The axioms of a spectral measure are checked both on the
ambient space and compressed to the subspace of fiber-measurable
functions, because the identity axiom can only hold on the latter when
phi is not injective.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from .condexp import CondExp, cond_exp_operator, cond_exp_values
from .errors import NotFiberMeasurableError, NotNormalError, SpaceMismatchError
from .measure import (
    DEFAULT_SUPPORT_TOL,
    FiniteMeasureSpace,
    MeasurableFunction,
    Partition,
    is_measurable,
)
from .opalgebra import WeightedOperator

# Block means closer than this (relative) are merged into one eigenvalue.
EIGENVALUE_GROUP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PointMap:
    """Self-map of the point set: point i goes to point images[i].

    Every point has positive mass, so the pushforward measure is
    automatically absolutely continuous; no nonsingularity check is
    needed.
    """

    space: FiniteMeasureSpace
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        imgs = tuple(int(i) for i in self.images)
        n = self.space.n
        if len(imgs) != n or any(i < 0 or i >= n for i in imgs):
            raise ValueError(f"images must be {n} indices in 0..{n - 1}")
        object.__setattr__(self, "images", imgs)

    @cached_property
    def fibers(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """(target point, preimage indices) for each nonempty fiber,
        ordered by target point."""
        buckets: dict[int, list[int]] = {}
        for i, s in enumerate(self.images):
            buckets.setdefault(s, []).append(i)
        return tuple((s, tuple(buckets[s])) for s in sorted(buckets))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PointMap)
            and self.space == other.space
            and self.images == other.images
        )

    def __hash__(self) -> int:
        return hash((self.space, self.images))


@dataclass(frozen=True, eq=False)
class SpectralDecomp:
    """Distinct eigenvalues with their orthogonal spectral projections.

    Contains 0 (last) exactly when the operator has nontrivial kernel;
    the projections are mutually orthogonal and reconstruct the operator
    as sum_n lambda_n P_n.
    """

    eigenvalues: tuple[complex, ...]
    projections: tuple[WeightedOperator, ...]


def avg_mult_operator(u: MeasurableFunction, partition: Partition) -> WeightedOperator:
    """Matrix of f -> E(u f)."""
    if u.space != partition.space:
        raise SpaceMismatchError("symbol and partition live on different spaces")
    e = cond_exp_operator(CondExp(partition))
    return WeightedOperator(partition.space, e.matrix * u.values[None, :])


def is_normal_avg_mult(
    u: MeasurableFunction, partition: Partition, tol: float = DEFAULT_SUPPORT_TOL
) -> bool:
    """f -> E(u f) is normal iff u is blockwise constant."""
    return is_measurable(u, partition, tol)


def avg_mult_spectrum(
    u: MeasurableFunction,
    partition: Partition,
    group_tol: float = EIGENVALUE_GROUP_TOL,
) -> tuple[complex, ...]:
    """Spectrum of f -> E(u f): the block means of u together with 0.

    0 is always adjoined; when the partition is all singletons and u
    vanishes nowhere the operator is invertible and callers comparing
    against numerical eigenvalues must drop that adjoined 0 themselves.
    Values within group_tol * (1 + max block mean) merge.
    """
    eu = cond_exp_values(CondExp(partition), u.values)
    block_means = [complex(eu[b[0]]) for b in partition.blocks]
    tol = group_tol * (1.0 + max((abs(z) for z in block_means), default=0.0))
    distinct: list[complex] = [0j]
    for z in block_means:
        if all(abs(z - d) > tol for d in distinct):
            distinct.append(z)
    return tuple(sorted(distinct, key=lambda z: (z.real, z.imag)))


def star_poly_calc(
    u: MeasurableFunction,
    partition: Partition,
    coeffs: np.ndarray,
    tol: float = DEFAULT_SUPPORT_TOL,
) -> WeightedOperator:
    """Bivariate polynomial calculus p(A, A*) for the normal operator
    A: f -> E(u f).

    coeffs[n, m] multiplies A^m (A*)^n, equivalently u^m conj(u)^n; the
    result is multiplication by p(u, conj(u)) followed by averaging.
    Note the constant term acts through the averaging projection, not
    the identity, so certifications against directly assembled operator
    powers should use polynomials with zero constant term.
    """
    if not is_normal_avg_mult(u, partition, tol):
        raise NotNormalError("symbol must be blockwise constant")
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 2:
        raise ValueError("coeffs must be a 2-d array")
    vals = u.values
    pvals = np.zeros(u.space.n, dtype=complex)
    for n_bar in range(c.shape[0]):
        for m in range(c.shape[1]):
            if c[n_bar, m] != 0:
                pvals += c[n_bar, m] * vals**m * np.conj(vals) ** n_bar
    e = cond_exp_operator(CondExp(partition))
    return WeightedOperator(partition.space, pvals[:, None] * e.matrix)


def cont_func_calc(
    u: MeasurableFunction,
    partition: Partition,
    f: Callable[[complex], complex],
    tol: float = DEFAULT_SUPPORT_TOL,
) -> WeightedOperator:
    """Continuous calculus f(A) = M_{f o u} E for the normal operator
    A: f -> E(u f).

    As with star_poly_calc, a constant term in f acts through the
    averaging projection; comparisons against the eigenvalue-based
    calculus need f(0) = 0 unless the partition is all singletons.
    """
    if not is_normal_avg_mult(u, partition, tol):
        raise NotNormalError("symbol must be blockwise constant")
    fu = np.asarray([f(complex(z)) for z in u.values], dtype=complex)
    e = cond_exp_operator(CondExp(partition))
    return WeightedOperator(partition.space, fu[:, None] * e.matrix)


def spectral_decomposition(
    u: MeasurableFunction,
    partition: Partition,
    group_tol: float = EIGENVALUE_GROUP_TOL,
    tol: float = DEFAULT_SUPPORT_TOL,
) -> SpectralDecomp:
    """Diagonalize the normal operator f -> E(u f) over its level sets.

    For each distinct nonzero value lambda of u the projection is
    "restrict to the blocks where u = lambda, then average"; the kernel
    projection (eigenvalue 0) is the complement of all of them and is
    included only when it is nonzero.
    """
    if not is_normal_avg_mult(u, partition, tol):
        raise NotNormalError("symbol must be blockwise constant")
    space = partition.space
    e_matrix = cond_exp_operator(CondExp(partition)).matrix
    eu = cond_exp_values(CondExp(partition), u.values)
    block_means = [complex(eu[b[0]]) for b in partition.blocks]
    merge_tol = group_tol * (1.0 + max((abs(z) for z in block_means), default=0.0))

    groups: list[tuple[complex, list[int]]] = []  # (running mean, block ids)
    for k, z in enumerate(block_means):
        for idx, (rep, members) in enumerate(groups):
            if abs(z - rep) <= merge_tol:
                members.append(k)
                rep = sum(block_means[m] for m in members) / len(members)
                groups[idx] = (rep, members)
                break
        else:
            groups.append((z, [k]))

    eigenvalues: list[complex] = []
    projections: list[WeightedOperator] = []
    accumulated = np.zeros((space.n, space.n), dtype=complex)
    nonzero = [(rep, members) for rep, members in groups if abs(rep) > merge_tol]
    nonzero.sort(key=lambda g: (g[0].real, g[0].imag))
    for rep, members in nonzero:
        mask = np.zeros(space.n, dtype=float)
        for k in members:
            mask[list(partition.blocks[k])] = 1.0
        p = mask[:, None] * e_matrix
        eigenvalues.append(rep)
        projections.append(WeightedOperator(space, p))
        accumulated += p

    kernel = np.eye(space.n, dtype=complex) - accumulated
    if float(np.trace(kernel).real) > 0.5:
        eigenvalues.append(0j)
        projections.append(WeightedOperator(space, kernel))
    return SpectralDecomp(tuple(eigenvalues), tuple(projections))


def fiber_partition(phi: PointMap) -> Partition:
    """Partition of the space into the nonempty fibers of the point map."""
    return Partition(phi.space, tuple(fiber for _, fiber in phi.fibers))


def fiber_cond_exp(phi: PointMap) -> CondExp:
    return CondExp(fiber_partition(phi))


def pushforward_density(phi: PointMap) -> MeasurableFunction:
    """Density of the pushforward measure: h(x) = mu(preimage of x) / mu(x)."""
    w = phi.space.weights
    h = np.zeros(phi.space.n, dtype=float)
    for s, fiber in phi.fibers:
        h[s] = float(w[list(fiber)].sum())
    return MeasurableFunction(phi.space, h / w)


class SpectralMeasureTable:
    """Projection-valued set function S -> E_phi M_{chi_preimage(S)}.

    Built once per point map; the singleton operators form a partition
    of unity over the image points and arbitrary sets are assembled by
    summation, which is exact because the singleton column supports are
    disjoint.
    """

    def __init__(self, phi: PointMap):
        self.phi = phi
        self.space = phi.space
        self._e_matrix = cond_exp_operator(fiber_cond_exp(phi)).matrix
        self._images = np.asarray(phi.images, dtype=np.intp)

    def measure_of(self, members: Iterable[int]) -> WeightedOperator:
        mask = np.isin(self._images, np.fromiter(members, dtype=np.intp, count=-1))
        return WeightedOperator(self.space, self._e_matrix * mask[None, :])

    def singleton(self, s: int) -> WeightedOperator:
        return self.measure_of((s,))


def spectral_measure(phi: PointMap, members: Iterable[int]) -> WeightedOperator:
    """The operator E_phi M_{chi_preimage(members)}."""
    return SpectralMeasureTable(phi).measure_of(members)


@dataclass(frozen=True)
class SpectralAxiomReport:
    """Worst residuals for the four spectral-measure axioms.

    on_subspace selects the Hilbert space: compressed to the
    fiber-measurable functions when True, the ambient weighted L2 space
    when False. full_residual is ||measure(X) - I|| on that space; it is
    exactly 1 on the ambient space whenever the point map is not
    injective, which is why both readings are reported.
    """

    on_subspace: bool
    projection_residual: float
    empty_residual: float
    full_residual: float
    intersection_residual: float
    additivity_residual: float

    def passes(self, tol: float, include_full: bool = True) -> bool:
        residuals = [
            self.projection_residual,
            self.empty_residual,
            self.intersection_residual,
            self.additivity_residual,
        ]
        if include_full:
            residuals.append(self.full_residual)
        return max(residuals) <= tol


def _fiber_basis(phi: PointMap) -> np.ndarray:
    """Weighted-orthonormal basis of fiber indicators, as columns."""
    fp = fiber_partition(phi)
    n = phi.space.n
    cols = np.zeros((n, fp.block_count), dtype=complex)
    for k, b in enumerate(fp.blocks):
        cols[list(b), k] = 1.0 / np.sqrt(fp.block_masses[k])
    return cols


def check_spectral_axioms(
    phi: PointMap,
    on_subspace: bool,
    n_random: int = 12,
    seed: int = 0,
) -> SpectralAxiomReport:
    """Evaluate the spectral-measure axioms over all singletons and a
    seeded family of random subsets.

    (a) every value is an orthogonal projection, (b) the empty set maps
    to 0 and the whole set to the identity, (c) intersections map to
    products, (d) disjoint unions map to sums. Residuals are spectral
    norms on the selected space.
    """
    n = phi.space.n
    table = SpectralMeasureTable(phi)
    rng = np.random.default_rng(seed)

    if on_subspace:
        basis = _fiber_basis(phi)
        db = phi.space.weights[:, None] * basis
        dim = basis.shape[1]

        def rep(op: WeightedOperator) -> np.ndarray:
            return db.conj().T @ op.matrix @ basis

    else:
        dim = n

        def rep(op: WeightedOperator) -> np.ndarray:
            s = phi.space.sqrt_weights
            return op.matrix * s[:, None] / s[None, :]

    def dist(x: np.ndarray, y: np.ndarray) -> float:
        return float(np.linalg.norm(x - y, 2))

    sets: list[frozenset] = [frozenset((s,)) for s in range(n)]
    for _ in range(n_random):
        keep = rng.random(n) < rng.uniform(0.2, 0.8)
        sets.append(frozenset(int(i) for i in np.flatnonzero(keep)))

    eye = np.eye(dim)
    proj_res = 0.0
    for s in sets:
        m = rep(table.measure_of(s))
        proj_res = max(proj_res, dist(m @ m, m), dist(m.conj().T, m))

    empty_res = float(np.linalg.norm(rep(table.measure_of(())), 2))
    full_res = dist(rep(table.measure_of(range(n))), eye)

    inter_res = 0.0
    pairs = [(sets[i], sets[j]) for i, j in
             rng.integers(0, len(sets), size=(max(n_random, 4), 2))]
    pairs += [(sets[0], frozenset(range(n))), (sets[0], frozenset())]
    for s1, s2 in pairs:
        lhs = rep(table.measure_of(s1 & s2))
        rhs = rep(table.measure_of(s1)) @ rep(table.measure_of(s2))
        inter_res = max(inter_res, dist(lhs, rhs))

    add_res = 0.0
    for _ in range(max(n_random, 4)):
        whole = sets[int(rng.integers(0, len(sets)))]
        parts = int(rng.integers(2, 5))
        assignment = rng.integers(0, parts, size=n)
        pieces = [frozenset(i for i in whole if assignment[i] == p) for p in range(parts)]
        total = sum((rep(table.measure_of(p)) for p in pieces), np.zeros((dim, dim), complex))
        add_res = max(add_res, dist(rep(table.measure_of(whole)), total))

    return SpectralAxiomReport(
        on_subspace=on_subspace,
        projection_residual=proj_res,
        empty_residual=empty_res,
        full_residual=full_res,
        intersection_residual=inter_res,
        additivity_residual=add_res,
    )


def reconstruct_from_measure(
    phi: PointMap, u: MeasurableFunction, tol: float = DEFAULT_SUPPORT_TOL
) -> WeightedOperator:
    """Assemble sum_s v(s) * measure({s}) for the fiber-measurable symbol u,
    where v is the point function with v o phi = u (zero on points with
    empty fiber). The result must agree with the matrix of f -> E_phi(u f).
    """
    fp = fiber_partition(phi)
    if not is_measurable(u, fp, tol):
        raise NotFiberMeasurableError("u must be constant on the fibers of phi")
    table = SpectralMeasureTable(phi)
    acc = np.zeros((phi.space.n, phi.space.n), dtype=complex)
    for s, fiber in phi.fibers:
        acc += u.values[fiber[0]] * table.singleton(s).matrix
    return WeightedOperator(phi.space, acc)
