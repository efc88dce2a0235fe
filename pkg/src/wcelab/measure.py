"""Finite measure spaces, partitions, and measurable functions.

Everything downstream runs on a finite set of weighted points, so the
measure-theoretic qualifiers (almost everywhere, essential supremum)
collapse to plain pointwise statements. Point masses are strictly
positive by construction, which is exactly what makes that collapse
valid: a property holding up to a null set holds at every point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySpaceError,
    NonpositiveWeightError,
    NotAPartitionError,
    SpaceMismatchError,
)

# Relative threshold deciding "zero" in support and measurability tests.
# Closed forms downstream divide by block aggregates on their support, so
# support detection has to be robust against rounding.
DEFAULT_SUPPORT_TOL = 1e-10

IndexSet = frozenset


@dataclass(frozen=True, eq=False)
class FiniteMeasureSpace:
    """n weighted points; weights[i] is the mass of point i.

    All singletons are measurable and carry positive mass, so the space
    is purely atomic and sub-sigma-algebras are exactly set partitions.
    """

    weights: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise EmptySpaceError("a measure space needs at least one point")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise NonpositiveWeightError("point masses must be finite and > 0")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != w.size:
                raise ValueError("label count must match the point count")
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def sqrt_weights(self) -> np.ndarray:
        s = np.sqrt(self.weights)
        s.setflags(write=False)
        return s

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Weighted inner product sum_i f_i conj(g_i) mu_i."""
        return complex(np.sum(np.asarray(f) * np.conj(g) * self.weights))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(np.asarray(f)) ** 2 * self.weights)))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteMeasureSpace)
            and np.array_equal(self.weights, other.weights)
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.weights.tobytes(), self.labels))


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint nonempty index blocks covering all points.

    Each block is an atom of the sub-sigma-algebra the partition
    generates; the all-singletons partition represents the full algebra
    and the one-block partition the trivial one.
    """

    space: FiniteMeasureSpace
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = self.space.n
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise NotAPartitionError(f"empty block in {list(map(list, blocks))}")
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(n)) or len(flat) != n:
            raise NotAPartitionError(
                f"blocks {list(map(list, blocks))} do not partition 0..{n - 1} "
                "(overlap, gap, or out-of-range index)"
            )
        object.__setattr__(self, "blocks", blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @cached_property
    def block_of(self) -> np.ndarray:
        """Map point index -> block index."""
        idx = np.empty(self.space.n, dtype=np.intp)
        for k, b in enumerate(self.blocks):
            idx[list(b)] = k
        idx.setflags(write=False)
        return idx

    @cached_property
    def block_masses(self) -> np.ndarray:
        m = np.array([float(self.space.weights[list(b)].sum()) for b in self.blocks])
        m.setflags(write=False)
        return m

    def is_finest(self) -> bool:
        return self.block_count == self.space.n

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Partition)
            and self.space == other.space
            and sorted(self.blocks) == sorted(other.blocks)
        )

    def __hash__(self) -> int:
        return hash((self.space, tuple(sorted(self.blocks))))


@dataclass(frozen=True, eq=False)
class MeasurableFunction:
    """Complex-valued point function, an element of the (finite) L2 space."""

    space: FiniteMeasureSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1 or v.size != self.space.n:
            raise SpaceMismatchError(
                f"function has {v.size} values for a {self.space.n}-point space"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, space: FiniteMeasureSpace, value: complex) -> "MeasurableFunction":
        return cls(space, np.full(space.n, value, dtype=complex))

    @classmethod
    def indicator(cls, space: FiniteMeasureSpace, members: Iterable[int]) -> "MeasurableFunction":
        v = np.zeros(space.n, dtype=complex)
        v[list(members)] = 1.0
        return cls(space, v)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MeasurableFunction)
            and self.space == other.space
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.space, self.values.tobytes()))


def make_space(
    weights: Sequence[float], labels: Sequence[str] | None = None
) -> FiniteMeasureSpace:
    """Validated space from a list of strictly positive point masses."""
    if len(weights) == 0:
        raise EmptySpaceError("a measure space needs at least one point")
    return FiniteMeasureSpace(np.asarray(weights, dtype=float),
                              tuple(labels) if labels is not None else None)


def make_partition(
    space: FiniteMeasureSpace, blocks: Iterable[Iterable[int]]
) -> Partition:
    return Partition(space, tuple(tuple(b) for b in blocks))


def finest_partition(space: FiniteMeasureSpace) -> Partition:
    """All singletons; the sub-algebra equals the full algebra."""
    return Partition(space, tuple((i,) for i in range(space.n)))


def coarsest_partition(space: FiniteMeasureSpace) -> Partition:
    """One block; the trivial sub-algebra."""
    return Partition(space, (tuple(range(space.n)),))


def support(f: MeasurableFunction, tol: float = DEFAULT_SUPPORT_TOL) -> frozenset:
    """Indices where f is nonzero, with relative thresholding.

    Returns {i : |f_i| > tol * max_j |f_j|}; the empty set when f is
    identically zero. With tol = 0 this is the exact set of nonzero
    entries.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    mags = np.abs(f.values)
    peak = float(mags.max())
    if peak == 0.0:
        return frozenset()
    return frozenset(int(i) for i in np.flatnonzero(mags > tol * peak))


def is_measurable(
    f: MeasurableFunction, partition: Partition, tol: float = DEFAULT_SUPPORT_TOL
) -> bool:
    """True iff f is constant on every block of the partition up to tol.

    Constancy is measured against the weighted block mean; the allowed
    deviation is tol * (1 + max|f|).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if f.space != partition.space:
        raise SpaceMismatchError("function and partition live on different spaces")
    vals = f.values
    w = f.space.weights
    scale = 1.0 + float(np.abs(vals).max())
    worst = 0.0
    for k, b in enumerate(partition.blocks):
        idx = list(b)
        mean = np.sum(vals[idx] * w[idx]) / partition.block_masses[k]
        worst = max(worst, float(np.abs(vals[idx] - mean).max()))
    return worst <= tol * scale
