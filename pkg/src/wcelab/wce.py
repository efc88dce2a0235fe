"""Closed-form decompositions of weighted conditional-expectation operators.

An instance fixes a partition and two complex symbols u and w. The
operator under study sends f to w * E(u f), where E averages over the
partition blocks. Its norm, polar decomposition, Aluthge transform, and
the functional calculus of the two Gram-type products all reduce to
algebraic expressions in the block aggregates E(|u|^2), E(|w|^2) and
E(u w); this module builds those expressions as dense matrices so the
oracles in opalgebra can certify them.

Quotients such as E(|w|^2) / E(|u|^2) appearing under an indicator of
the support are evaluated as "reciprocal on the support, zero off it".
Supports are resolved blockwise: a block belongs to the support of a
block aggregate iff its (constant) value exceeds the relative tolerance,
which cannot split a block because the aggregates are blockwise constant
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .condexp import CondExp, cond_exp_operator, cond_exp_values
from .errors import NotMeasurableError, SpaceMismatchError
from .measure import (
    DEFAULT_SUPPORT_TOL,
    FiniteMeasureSpace,
    MeasurableFunction,
    Partition,
    is_measurable,
    support,
)
from .opalgebra import WeightedOperator, operator_norm


@dataclass(frozen=True, eq=False)
class WceInstance:
    """Partition plus symbols u, w, with the derived block aggregates cached."""

    partition: Partition
    u: MeasurableFunction
    w: MeasurableFunction
    support_tol: float = DEFAULT_SUPPORT_TOL

    @property
    def space(self) -> FiniteMeasureSpace:
        return self.partition.space

    @cached_property
    def expectation(self) -> CondExp:
        return CondExp(self.partition)

    @cached_property
    def eu2(self) -> np.ndarray:
        """E(|u|^2), blockwise constant, nonnegative."""
        return cond_exp_values(self.expectation, np.abs(self.u.values) ** 2)

    @cached_property
    def ew2(self) -> np.ndarray:
        """E(|w|^2), blockwise constant, nonnegative."""
        return cond_exp_values(self.expectation, np.abs(self.w.values) ** 2)

    @cached_property
    def euw(self) -> np.ndarray:
        """E(u w), blockwise constant, complex."""
        return cond_exp_values(self.expectation, self.u.values * self.w.values)

    def _block_support_mask(self, aggregate: np.ndarray) -> np.ndarray:
        peak = float(aggregate.max(initial=0.0))
        if peak <= 0.0:
            return np.zeros(self.space.n, dtype=bool)
        mask = np.zeros(self.space.n, dtype=bool)
        for b in self.partition.blocks:
            idx = list(b)
            if aggregate[idx[0]] > self.support_tol * peak:
                mask[idx] = True
        return mask

    @cached_property
    def s_mask(self) -> np.ndarray:
        """Indicator of S, the support of E(|u|^2), as a block union."""
        return self._block_support_mask(self.eu2)

    @cached_property
    def g_mask(self) -> np.ndarray:
        """Indicator of G, the support of E(|w|^2), as a block union."""
        return self._block_support_mask(self.ew2)

    @cached_property
    def sg_mask(self) -> np.ndarray:
        return self.s_mask & self.g_mask

    @cached_property
    def s_set(self) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(self.s_mask))

    @cached_property
    def g_set(self) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(self.g_mask))

    @cached_property
    def sg_set(self) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(self.sg_mask))


@dataclass(frozen=True, eq=False)
class PolarParts:
    """Partial isometry and positive factor with T = U @ absT."""

    U: WeightedOperator
    absT: WeightedOperator


def make_instance(
    partition: Partition,
    u: MeasurableFunction,
    w: MeasurableFunction,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> WceInstance:
    if u.space != partition.space or w.space != partition.space:
        raise SpaceMismatchError("u, w, and partition must share one space")
    return WceInstance(partition, u, w, support_tol)


def _masked_recip(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """1/values on the mask, 0 off it."""
    safe = np.where(mask, values, 1.0)
    return np.where(mask, 1.0 / safe, 0.0)


def _sandwich(
    inst: WceInstance, left: np.ndarray, right: np.ndarray
) -> WeightedOperator:
    """Matrix of diag(left) @ E @ diag(right)."""
    e = cond_exp_operator(inst.expectation)
    return WeightedOperator(inst.space, left[:, None] * e.matrix * right[None, :])


def build_operator(inst: WceInstance) -> WeightedOperator:
    """The operator f -> w * E(u f) as a dense matrix."""
    return _sandwich(inst, inst.w.values, inst.u.values)


def norm_formula(inst: WceInstance) -> float:
    """Closed-form operator norm: max_x sqrt(E(|w|^2) E(|u|^2))(x).

    The essential supremum is a plain maximum because every point has
    positive mass.
    """
    return float(np.sqrt((inst.ew2 * inst.eu2).max()))


def check_vanishing(
    inst: WceInstance,
    g: MeasurableFunction,
    zero_tol: float = 1e-10,
    support_tol: float | None = None,
) -> bool:
    """Test the implication: if M_g T vanishes then g vanishes on the
    support of E(|w|^2) E(|u|^2).

    g must be blockwise constant. Returns True when the implication
    holds for this g (vacuously when M_g T is not numerically zero).
    """
    if not is_measurable(g, inst.partition):
        raise NotMeasurableError("g must be constant on the partition blocks")
    stol = inst.support_tol if support_tol is None else support_tol
    t = build_operator(inst)
    mg_t = WeightedOperator(inst.space, g.values[:, None] * t.matrix)
    scale = (1.0 + operator_norm(t)) * (1.0 + float(np.abs(g.values).max()))
    antecedent = operator_norm(mg_t) <= zero_tol * scale
    if not antecedent:
        return True
    product = MeasurableFunction(inst.space, inst.ew2 * inst.eu2)
    return support(g, stol).isdisjoint(support(product, stol))


def partial_isometry_criterion(
    inst: WceInstance, tol: float = 1e-8
) -> tuple[bool, frozenset]:
    """Whether E(|w|^2) E(|u|^2) is an indicator function, and of which set.

    Returns (is_pi, A) with A the support of the product. is_pi is True
    iff every value of the product is within tol * (1 + max) of 0 or 1,
    which happens exactly when the operator is a partial isometry.
    """
    p = inst.ew2 * inst.eu2
    deviation = float(np.minimum(np.abs(p), np.abs(p - 1.0)).max())
    is_pi = deviation <= tol * (1.0 + float(p.max(initial=0.0)))
    return is_pi, inst.sg_set


def closed_func_calc_gram(
    inst: WceInstance, f: Callable[[float], complex]
) -> WeightedOperator:
    """f applied to T* T in closed form.

    f(T*T) = f(0) I + M_{chi_S / E(|u|^2)} (M_{f o (E(|u|^2) E(|w|^2))}
    - f(0) I) M_conj(u) E M_u. For f(t) = t^n this reduces to the power
    formula conj(u) E(|w|^2)^n E(|u|^2)^(n-1) E(u .).
    """
    f0 = complex(f(0.0))
    p = inst.eu2 * inst.ew2
    fp = np.asarray([f(float(v)) for v in p], dtype=complex)
    d = _masked_recip(inst.eu2, inst.s_mask) * (fp - f0)
    core = _sandwich(inst, d * np.conj(inst.u.values), inst.u.values)
    return WeightedOperator(
        inst.space, f0 * np.eye(inst.space.n, dtype=complex) + core.matrix
    )


def closed_func_calc_cogram(
    inst: WceInstance, g: Callable[[float], complex]
) -> WeightedOperator:
    """g applied to T T* in closed form; mirror of closed_func_calc_gram
    with the roles of u and w exchanged and conjugation on the right:
    g(TT*) = g(0) I + M_{chi_G / E(|w|^2)} (...) M_w E M_conj(w)."""
    g0 = complex(g(0.0))
    p = inst.eu2 * inst.ew2
    gp = np.asarray([g(float(v)) for v in p], dtype=complex)
    d = _masked_recip(inst.ew2, inst.g_mask) * (gp - g0)
    core = _sandwich(inst, d * inst.w.values, np.conj(inst.w.values))
    return WeightedOperator(
        inst.space, g0 * np.eye(inst.space.n, dtype=complex) + core.matrix
    )


def closed_polar(inst: WceInstance) -> PolarParts:
    """Closed-form polar decomposition T = U |T|.

    |T| f = sqrt(E(|w|^2) / E(|u|^2)) chi_S conj(u) E(u f)
    U f   = sqrt(chi_{S and G} / (E(|w|^2) E(|u|^2))) w E(u f)

    Both coefficients are taken as zero off the indicated supports. U is
    a partial isometry sharing the kernel of |T| and T, which makes the
    decomposition the unique one.
    """
    abs_coef = np.sqrt(inst.ew2 * _masked_recip(inst.eu2, inst.s_mask))
    abs_t = _sandwich(inst, abs_coef * np.conj(inst.u.values), inst.u.values)
    u_coef = np.sqrt(_masked_recip(inst.ew2 * inst.eu2, inst.sg_mask))
    u_op = _sandwich(inst, u_coef * inst.w.values, inst.u.values)
    return PolarParts(U=u_op, absT=abs_t)


def closed_abs_sqrt(inst: WceInstance) -> WeightedOperator:
    """Closed-form square root of |T|:

    V f = (E(|w|^2) / E(|u|^2)^3)^(1/4) chi_S conj(u) E(u f)

    V is positive with V^2 = |T|, so it equals |T|^(1/2); it is the
    half-power factor entering the Aluthge transform.
    """
    coef = (inst.ew2 * _masked_recip(inst.eu2, inst.s_mask) ** 3) ** 0.25
    return _sandwich(inst, coef * np.conj(inst.u.values), inst.u.values)


def closed_aluthge(inst: WceInstance) -> WeightedOperator:
    """Closed-form Aluthge transform |T|^(1/2) U |T|^(1/2):

    f -> (chi_S E(u w) / E(|u|^2)) conj(u) E(u f)
    """
    coef = inst.euw * _masked_recip(inst.eu2, inst.s_mask)
    return _sandwich(inst, coef * np.conj(inst.u.values), inst.u.values)


def w_algebra_norm(u: MeasurableFunction, partition: Partition) -> float:
    """Norm max_x sqrt(E(|u|^2))(x) of the algebra of symbols with bounded
    quadratic block aggregate."""
    e = CondExp(partition)
    agg = cond_exp_values(e, np.abs(u.values) ** 2)
    return float(np.sqrt(agg.max()))
