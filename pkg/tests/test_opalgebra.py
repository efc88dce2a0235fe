import numpy as np
import pytest

from wcelab.condexp import CondExp, cond_exp_operator
from wcelab.errors import NotNormalError, NotPositiveError, NotSelfAdjointError
from wcelab.measure import coarsest_partition, make_partition, make_space
from wcelab.opalgebra import (
    WeightedOperator,
    func_calc_oracle,
    hermitian_eig,
    kernel_projection,
    normal_func_calc_oracle,
    op_deviation,
    operator_norm,
    polar_oracle,
    positive_sqrt,
    weighted_adjoint,
)

from conftest import random_complex


def random_operator(rng, space):
    n = space.n
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return WeightedOperator(space, m)


def random_self_adjoint(rng, space):
    a = random_operator(rng, space)
    return 0.5 * (a + weighted_adjoint(a))


def power_iteration_norm(a, iters=2000, seed=3):
    """Independent largest-singular-value estimate: power iteration on
    the weighted Gram operator A* A."""
    rng = np.random.default_rng(seed)
    gram = weighted_adjoint(a) @ a
    v = rng.normal(size=a.space.n) + 1j * rng.normal(size=a.space.n)
    for _ in range(iters):
        v = gram.apply(v)
        norm = a.space.norm(v)
        if norm == 0.0:
            return 0.0
        v = v / norm
    return float(np.sqrt(np.real(a.space.inner(gram.apply(v), v))))


@pytest.fixture
def space():
    return make_space([1.0, 3.0, 0.5, 2.0])


class TestWeightedAdjoint:
    def test_identity(self, space):
        eye = WeightedOperator.identity(space)
        np.testing.assert_array_equal(weighted_adjoint(eye).matrix, eye.matrix)

    def test_multiplication_conjugates(self, space, rng):
        phi = random_complex(rng, space.n)
        m = WeightedOperator.multiplication(space, phi)
        np.testing.assert_allclose(
            weighted_adjoint(m).matrix, np.diag(np.conj(phi))
        )

    def test_cond_exp_is_self_adjoint(self, space):
        p = make_partition(space, [[0, 2], [1, 3]])
        e = cond_exp_operator(CondExp(p))
        assert operator_norm(weighted_adjoint(e) - e) < 1e-14

    def test_defining_identity(self, space, rng):
        a = random_operator(rng, space)
        adj = weighted_adjoint(a)
        for _ in range(5):
            f = random_complex(rng, space.n)
            g = random_complex(rng, space.n)
            lhs = space.inner(a.apply(f), g)
            rhs = space.inner(f, adj.apply(g))
            assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))

    def test_involution(self, space, rng):
        # Exact as a matrix identity; floating point leaves a few ulps
        # from the weight rescaling.
        a = random_operator(rng, space)
        np.testing.assert_allclose(
            weighted_adjoint(weighted_adjoint(a)).matrix, a.matrix,
            rtol=1e-13, atol=0.0,
        )


class TestOperatorNorm:
    def test_identity(self, space):
        assert operator_norm(WeightedOperator.identity(space)) == pytest.approx(1.0)

    def test_zero(self, space):
        assert operator_norm(WeightedOperator.zero(space)) == 0.0

    def test_diagonal(self):
        # Multiplication by (2, -3) has norm max|phi| = 3; confirmed by
        # power iteration.
        sp = make_space([1.0, 5.0])
        m = WeightedOperator.multiplication(sp, np.array([2.0, -3.0]))
        assert operator_norm(m) == pytest.approx(3.0)
        assert power_iteration_norm(m) == pytest.approx(3.0, rel=1e-6)

    def test_power_iteration_agreement(self, space, rng):
        a = random_operator(rng, space)
        assert operator_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-5)

    def test_cstar_identity(self, space, rng):
        for _ in range(5):
            a = random_operator(rng, space)
            lhs = operator_norm(weighted_adjoint(a) @ a)
            assert lhs == pytest.approx(operator_norm(a) ** 2, rel=1e-10)

    def test_averaging_projection_has_weighted_norm_one(self):
        # Pins the weighting convention: in the Euclidean norm this matrix
        # has largest singular value sqrt(1.25).
        sp = make_space([1.0, 3.0])
        e = cond_exp_operator(CondExp(coarsest_partition(sp)))
        assert operator_norm(e) == pytest.approx(1.0)
        assert np.linalg.svd(e.matrix, compute_uv=False)[0] == pytest.approx(
            np.sqrt(1.25)
        )


class TestHermitianEig:
    def test_identity_spectrum(self, space):
        es = hermitian_eig(WeightedOperator.identity(space))
        np.testing.assert_allclose(es.values, np.ones(space.n))

    def test_projection_spectrum_counts(self):
        # The averaging projection onto k blocks has eigenvalue 1 with
        # multiplicity k and 0 with multiplicity n - k; cross-checked by
        # the trace.
        sp = make_space([1.0, 2.0, 0.5, 3.0, 1.5])
        p = make_partition(sp, [[0, 1], [2, 4], [3]])
        e = cond_exp_operator(CondExp(p))
        es = hermitian_eig(e)
        ones = np.sum(np.abs(es.values - 1) < 1e-10)
        zeros = np.sum(np.abs(es.values) < 1e-10)
        assert ones == 3 and zeros == 2
        assert np.trace(e.matrix).real == pytest.approx(3.0)

    def test_diagonal(self):
        sp = make_space([1.0, 4.0])
        m = WeightedOperator.multiplication(sp, np.array([2.0, 5.0]))
        es = hermitian_eig(m)
        np.testing.assert_allclose(es.values, [2.0, 5.0])

    @pytest.mark.parametrize("n", [4, 48])
    def test_residual_and_orthonormality(self, n, rng):
        sp = make_space(rng.uniform(0.1, 10.0, n))
        a = random_self_adjoint(rng, sp)
        es = hermitian_eig(a)
        norm_a = operator_norm(a)
        for k in range(n):
            v = es.vectors[:, k]
            residual = sp.norm(a.apply(v) - es.values[k] * v)
            assert residual <= 1e-11 * norm_a
        gram = np.array([
            [sp.inner(es.vectors[:, i], es.vectors[:, j]) for j in range(n)]
            for i in range(n)
        ])
        np.testing.assert_allclose(gram, np.eye(n), atol=1e-11)

    def test_rejects_asymmetric(self, space, rng):
        a = random_operator(rng, space)
        with pytest.raises(NotSelfAdjointError):
            hermitian_eig(a)


class TestPositiveSqrt:
    def test_identity(self, space):
        root = positive_sqrt(WeightedOperator.identity(space))
        np.testing.assert_allclose(root.matrix, np.eye(space.n), atol=1e-14)

    def test_scaled_identity(self, space):
        root = positive_sqrt(4.0 * WeightedOperator.identity(space))
        np.testing.assert_allclose(root.matrix, 2.0 * np.eye(space.n), atol=1e-13)

    def test_projection_is_own_root(self, space):
        p = make_partition(space, [[0, 1, 3], [2]])
        e = cond_exp_operator(CondExp(p))
        root = positive_sqrt(e)
        assert op_deviation(root, e) < 1e-12
        assert op_deviation(root @ root, e) < 1e-12

    def test_squares_back(self, space, rng):
        b = random_operator(rng, space)
        a = weighted_adjoint(b) @ b
        root = positive_sqrt(a)
        assert op_deviation(root @ root, a) < 1e-12
        assert operator_norm(root @ a - a @ root) < 1e-10 * (1 + operator_norm(a))

    def test_rejects_negative(self, space):
        with pytest.raises(NotPositiveError):
            positive_sqrt(-1.0 * WeightedOperator.identity(space))


class TestPolarOracle:
    def test_identity(self, space):
        u, p = polar_oracle(WeightedOperator.identity(space))
        np.testing.assert_allclose(u.matrix, np.eye(space.n), atol=1e-13)
        np.testing.assert_allclose(p.matrix, np.eye(space.n), atol=1e-13)

    def test_scaled_projection(self, space):
        # A = 3E: A*A = 9E, so P = 3E and U = E.
        part = make_partition(space, [[0, 2], [1, 3]])
        e = cond_exp_operator(CondExp(part))
        u, p = polar_oracle(3.0 * e)
        assert op_deviation(p, 3.0 * e) < 1e-12
        assert op_deviation(u, e) < 1e-12

    def test_zero(self, space):
        u, p = polar_oracle(WeightedOperator.zero(space))
        assert operator_norm(u) == 0.0
        assert operator_norm(p) == 0.0

    def test_factorization_and_kernels(self, space, rng):
        for _ in range(5):
            a = random_operator(rng, space)
            u, p = polar_oracle(a)
            assert op_deviation(u @ p, a) < 1e-12
            assert op_deviation(p, positive_sqrt(weighted_adjoint(a) @ a)) < 1e-11
            uu = weighted_adjoint(u) @ u
            assert operator_norm(uu @ uu - uu) < 1e-12
            ker_u = kernel_projection(u)
            ker_p = kernel_projection(p)
            ker_a = kernel_projection(a)
            assert op_deviation(ker_u, ker_p) < 1e-10
            assert op_deviation(ker_p, ker_a) < 1e-10


class TestFuncCalcOracle:
    def test_identity_function(self, space, rng):
        a = random_self_adjoint(rng, space)
        assert op_deviation(func_calc_oracle(a, lambda t: t), a) < 1e-13

    def test_constant_one(self, space, rng):
        a = random_self_adjoint(rng, space)
        out = func_calc_oracle(a, lambda t: 1.0)
        np.testing.assert_allclose(out.matrix, np.eye(space.n), atol=1e-12)

    def test_square_on_diagonal(self):
        sp = make_space([1.0, 2.0])
        m = WeightedOperator.multiplication(sp, np.array([2.0, 5.0]))
        out = func_calc_oracle(m, lambda t: t * t)
        np.testing.assert_allclose(out.matrix, np.diag([4.0, 25.0]), atol=1e-12)
        assert op_deviation(out, m @ m) < 1e-14

    def test_multiplicative_on_polynomials(self, space, rng):
        a = random_self_adjoint(rng, space)
        assert op_deviation(func_calc_oracle(a, lambda t: t * t), a @ a) < 1e-12


class TestKernelProjection:
    def test_identity_has_trivial_kernel(self, space):
        k = kernel_projection(WeightedOperator.identity(space))
        assert operator_norm(k) == pytest.approx(0.0, abs=1e-14)

    def test_zero_has_full_kernel(self, space):
        k = kernel_projection(WeightedOperator.zero(space))
        np.testing.assert_allclose(k.matrix, np.eye(space.n), atol=1e-14)

    def test_projection_complement(self, space):
        # ker E is the complement of the blockwise-constant functions, so
        # the kernel projection must be I - E.
        p = make_partition(space, [[0, 1], [2, 3]])
        e = cond_exp_operator(CondExp(p))
        k = kernel_projection(e)
        eye = WeightedOperator.identity(space)
        assert op_deviation(k + e, eye) < 1e-12


class TestNormalFuncCalc:
    def test_matches_hermitian_calculus(self, space, rng):
        a = random_self_adjoint(rng, space)
        lhs = normal_func_calc_oracle(a, lambda z: z * z)
        assert op_deviation(lhs, a @ a) < 1e-11

    def test_rejects_nonnormal(self):
        sp = make_space([1.0, 1.0])
        shift = WeightedOperator(sp, np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NotNormalError):
            normal_func_calc_oracle(shift, lambda z: z)
