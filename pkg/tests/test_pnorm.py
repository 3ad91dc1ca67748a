import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complex_matrices, rand_complex
from lpalg.core import LpError, identity, vector_p_norm
from lpalg.pnorm import (
    check_subalgebra,
    interpolation_upper,
    oracle_starts,
    pnorm,
    pnorm_bracket,
    pnorm_closed_form,
    pnorm_oracle,
    pnorm_power,
    pnorm_svd,
    quotient_seminorm,
    unitization_norm,
)

E2 = np.full((2, 2), 0.5)
E3 = np.full((3, 3), 1 / 3)


def test_witness_reproduces_value(rng):
    a = rand_complex(rng, 4)
    for p in (1.3, 3.0):
        est = pnorm_oracle(a, p)
        assert vector_p_norm(est.witness, p) == pytest.approx(1.0, abs=1e-14)
        assert vector_p_norm(a @ est.witness, p) == pytest.approx(est.value, abs=1e-14)


def test_identity_and_idempotents():
    assert pnorm_oracle(identity(3), 3).value == pytest.approx(1.0, abs=2e-6)
    assert pnorm_oracle(np.full((4, 4), 0.25), 1.5).value == pytest.approx(1.0, abs=2e-6)
    assert pnorm_oracle(identity(2) - 2 * E2, 4).value == pytest.approx(1.0, abs=2e-6)


def test_one_minus_e3_beats_explicit_witness():
    w = np.array([1.0, -1.0, -1.0])
    ratio = vector_p_norm((identity(3) - E3) @ w, 4) / vector_p_norm(w, 4)
    assert ratio == pytest.approx((288 / 243) ** 0.25, abs=1e-12)
    assert pnorm_oracle(identity(3) - E3, 4).value >= ratio - 1e-9


def test_one_minus_2e3():
    assert pnorm_oracle(identity(3) - 2 * E3, 4).value >= 1.2517


def test_p2_matches_svd(rng):
    for _ in range(10):
        a = rand_complex(rng, 3)
        assert abs(pnorm_oracle(a, 2).value - pnorm_svd(a).value) <= 1e-8


@settings(max_examples=15)
@given(complex_matrices(2, 3), st.sampled_from([1.5, 3.0]))
def test_transpose_duality(a, p):
    q = p / (p - 1)
    assert abs(pnorm_oracle(a, p).value - pnorm_oracle(a.T, q).value) <= 2e-6 * max(1.0, np.abs(a).max())


@settings(max_examples=10)
@given(st.integers(0, 10**6), st.sampled_from([1.25, 3.0]))
def test_invariance_under_isometries_and_conjugation(seed, p):
    rng = np.random.default_rng(seed)
    a = rand_complex(rng, 3)
    perm = rng.permutation(3)
    u = np.diag(np.exp(2j * np.pi * rng.random(3)))[:, perm]
    v = np.diag(np.exp(2j * np.pi * rng.random(3)))[perm, :]
    base = pnorm_oracle(a, p).value
    assert pnorm_oracle(u @ a @ v, p).value == pytest.approx(base, abs=2e-6)
    assert pnorm_oracle(a.conj(), p).value == pytest.approx(base, abs=2e-6)


def test_bracket_contains_oracle(rng):
    for p in (1.25, 2.0, 4.0):
        a = rand_complex(rng, 4)
        lo, hi = pnorm_bracket(a, p)
        v = pnorm_oracle(a, p).value
        assert lo <= v + 1e-12
        assert v <= hi * (1 + 1e-12)
        assert hi == pytest.approx(max(interpolation_upper(a, p), lo))


def test_power_is_lower_bound(rng):
    a = rand_complex(rng, 3)
    for p in (1.5, 3.0):
        assert pnorm_power(a, p).value <= pnorm_oracle(a, p).value + 1e-12


def test_monotone_in_restarts(rng):
    a = rand_complex(rng, 3)
    vals = [pnorm_oracle(a, 3.3, restarts=r).value for r in (200, 300, 400, 600)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_starts_prefix():
    small, big = oracle_starts(3, 200, 7), oracle_starts(3, 300, 7)
    np.testing.assert_array_equal(small, big[:, :200])


def test_restart_floor_and_dim_cap():
    with pytest.raises(LpError):
        pnorm_oracle(identity(2), 3, restarts=50)
    with pytest.raises(LpError):
        pnorm_oracle(identity(9), 3)


def test_endpoint_dispatch():
    a = np.array([[1, 2], [-3j, 0.5]])
    assert pnorm(a, 1).value == 4.0
    assert pnorm(a, math.inf).value == 3.5
    for p in (1, math.inf):
        est = pnorm_closed_form(a, p)
        assert vector_p_norm(a @ est.witness, p) == pytest.approx(est.value)


def test_dispatch_methods(rng):
    a = rand_complex(rng, 3)
    assert pnorm(a, 2, method="svd").value == pytest.approx(np.linalg.norm(a, 2))
    with pytest.raises(LpError):
        pnorm(a, 3, method="svd")
    with pytest.raises(LpError):
        pnorm(a, 3, method="nope")
    est = pnorm(a, 3, method="bracket")
    assert est.upper >= est.value


def test_zero_matrix():
    assert pnorm_oracle(np.zeros((3, 3)), 3).value == 0.0
    with pytest.raises(LpError):
        pnorm_power(np.zeros((2, 2)), 3)


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_riesz_thorin_log_convexity(seed):
    rng = np.random.default_rng(seed)
    a = rand_complex(rng, 3)
    p0, p1, theta = 1.25, 4.0, 0.3
    pt = 1 / ((1 - theta) / p0 + theta / p1)
    lhs = pnorm_oracle(a, pt).value
    rhs = pnorm_oracle(a, p0).value ** (1 - theta) * pnorm_oracle(a, p1).value ** theta
    assert lhs <= rhs * (1 + 1e-5)


class TestQuotient:
    def test_empty_ideal_is_plain_norm(self, rng):
        a = rand_complex(rng, 3)
        assert quotient_seminorm(a, [], 3).value == pnorm_oracle(a, 3).value

    def test_contractive_images(self):
        f1 = np.diag(np.exp(2j * np.pi * np.arange(3) / 3)) @ E3 @ np.diag(np.exp(-2j * np.pi * np.arange(3) / 3))
        r = quotient_seminorm(f1, [E3], 6)
        assert r.value <= 1 + 2e-6
        assert r.converged

    def test_distance_to_scalar_multiples(self):
        # ||diag(1, 0.5 + lam)|| = max(1, |0.5 + lam|), minimized by the whole unit disc around -0.5
        r = quotient_seminorm(np.diag([1.0, 0.5]), [np.diag([0.0, 1.0])], 3)
        assert r.value == pytest.approx(1.0, abs=1e-7)
        assert abs(r.minimizer[0] + 0.5) <= 1 + 1e-6

    def test_dependent_basis(self):
        with pytest.raises(LpError):
            quotient_seminorm(identity(2), [E2, 2 * E2], 3)


class TestUnitization:
    def test_trivial(self):
        assert unitization_norm(np.zeros((2, 2)), 1.0, [identity(2)], 3) == pytest.approx(1.0, abs=2e-6)

    @pytest.mark.parametrize("mu,lam", [(1.0, 1.0), (2.0, -0.5), (1.0, 0.5j)])
    def test_one_dimensional_algebra(self, mu, lam):
        assert unitization_norm(mu * E2, lam, [E2], 4) == pytest.approx(abs(mu + lam), abs=2e-6)

    def test_nondegenerate_matches_identity_shift(self, oracle):
        units = [np.outer(np.eye(2)[i], np.eye(2)[j]) for i in range(2) for j in range(2)]
        a = np.array([[0.2, 1.0], [-0.4j, 0.1]])
        assert unitization_norm(a, -0.3, units, 3) == pytest.approx(oracle(a - 0.3 * identity(2), 3), abs=2e-6)

    def test_subalgebra_check(self):
        with pytest.raises(LpError):
            check_subalgebra([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])])
        with pytest.raises(LpError):
            unitization_norm(identity(2), 1.0, [E2], 3)


class TestPowerExamples:
    def test_identity(self):
        assert pnorm_power(identity(3), 3, start=np.array([1.0, 2.0, -1j])).value == pytest.approx(1.0, abs=1e-12)

    def test_e4_from_ones(self):
        est = pnorm_power(np.full((4, 4), 0.25), 1.5, start=np.ones(4))
        assert est.value == pytest.approx(1.0, abs=1e-12) and est.converged

    def test_diagonal(self):
        assert pnorm_power(np.diag([2.0, 1.0]), 4, start=np.ones(2)).value == pytest.approx(2.0, abs=1e-10)

    def test_iterates_monotone(self, rng):
        a = rand_complex(rng, 3)
        vals = [pnorm_power(a, 3.5, start=np.ones(3), max_iter=k).value for k in (1, 2, 4, 8, 16)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_one_minus_2e2_isometry(self):
        assert pnorm_oracle(identity(2) - 2 * E2, 4).value == pytest.approx(1.0, abs=2e-6)
