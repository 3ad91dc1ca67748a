import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpalg.core import LpError, identity
from lpalg.pnorm import pnorm_oracle
from lpalg.transforms import (
    PowerSeriesConfig,
    binomial_coefficients,
    cayley,
    f_transform,
    power_accretive,
    power_series,
    random_accretive,
    support_idempotent,
    support_invariance_check,
    support_route_resolvent,
    support_route_roots,
    support_routes,
)

E3 = np.full((3, 3), 1 / 3)


def test_f_transform_scalar_and_inverse():
    x = np.diag([0.0, 1.0, 3.0])
    np.testing.assert_allclose(np.diag(f_transform(x)).real, [0.0, 0.5, 0.75])
    with pytest.raises(LpError):
        f_transform(-identity(2))


def test_cayley_involution_like():
    x = np.array([[2.0, 1.0], [0.0, 3.0]])
    c = cayley(x)
    # x = (1 + c)(1 - c)^-1
    back = np.linalg.solve((identity(2) - c).T, (identity(2) + c).T).T
    np.testing.assert_allclose(back, x, atol=1e-13)


def test_binomial_coefficients():
    c = binomial_coefficients(0.5, 3)
    np.testing.assert_allclose(c, [1.0, -0.5, -0.125, -0.0625])


class TestPowers:
    @settings(max_examples=10)
    @given(st.integers(0, 10**6))
    def test_sqrt_squares_back(self, seed):
        x = random_accretive(3, 4.0, seed=seed)
        h = power_accretive(x, 0.5)
        assert np.abs(h @ h - x).max() < 1e-10

    def test_kernel_stays_zero(self):
        h = power_accretive(np.diag([4.0, 0.0]), 0.5)
        np.testing.assert_allclose(h, np.diag([2.0, 0.0]), atol=1e-14)

    def test_non_semisimple_kernel(self):
        with pytest.raises(LpError):
            power_accretive(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.5)

    def test_series_matches_spectral(self):
        x = random_accretive(3, 4.0, seed=3)
        one = identity(3)
        b = one - 0.99 * (one - f_transform(x))
        for t in (0.2, 0.5, 0.8):
            assert np.abs(power_series(b, t, 4.0) - power_accretive(b, t)).max() < 1e-8

    def test_series_outside_disc(self):
        with pytest.raises(LpError):
            power_series(3 * identity(2), 0.5, 4.0)

    def test_series_switches_near_boundary(self):
        b = np.diag([1.0, 0.0005])  # ||1 - b|| = 0.9995
        out = power_series(b, 0.5, 3.0)
        np.testing.assert_allclose(np.diag(out).real, [1.0, np.sqrt(0.0005)], atol=1e-12)

    def test_series_term_budget(self):
        b = np.diag([1.0, 0.05])
        with pytest.raises(LpError):
            power_series(b, 0.5, 3.0, PowerSeriesConfig(max_terms=5))
        with pytest.raises(LpError):
            PowerSeriesConfig(tolerance=0.0)

    def test_roots_of_FA_stay_in_FA(self):
        x = random_accretive(3, 1.5, seed=8)
        b = f_transform(x)
        for t in (0.3, 0.7):
            assert pnorm_oracle(identity(3) - power_series(b, t, 1.5), 1.5).value <= 1 + 2e-6

    def test_t_range(self):
        with pytest.raises(LpError):
            power_accretive(identity(2), 1.0)


class TestSupport:
    def test_diagonal(self):
        r = support_idempotent(np.diag([5.0, 0.0, 3.0]), 4)
        np.testing.assert_allclose(r.s, np.diag([1.0, 0.0, 1.0]), atol=1e-10)
        assert r.rank == 2
        assert r.norm_one_minus_s <= 1 + 2e-6

    def test_idempotent_is_own_support(self):
        # e_3 itself is not accretive at p = 4 since ||1 - e_3|| > 1
        for e in (identity(3) - E3, np.diag([1.0, 0.0, 1.0])):
            r = support_idempotent(e, 4)
            np.testing.assert_allclose(r.s, e, atol=1e-9)

    def test_routes_separately(self):
        x = np.diag([2.0, 0.0]) + np.array([[0.0, 0.0], [0.0, 0.0]])
        r1, n = support_route_roots(x)
        r2, eps = support_route_resolvent(x)
        np.testing.assert_allclose(r1, np.diag([1.0, 0.0]), atol=1e-9)
        np.testing.assert_allclose(r2, np.diag([1.0, 0.0]), atol=1e-9)
        assert n >= 8 and eps <= 1e-3

    def test_zero(self):
        r = support_routes(np.zeros((2, 2)))
        assert not np.any(r.s) and r.rank == 0

    @settings(max_examples=6)
    @given(st.integers(0, 10**6))
    def test_invertible_support_is_identity(self, seed):
        x = random_accretive(3, 4.0, seed=seed)
        r = support_idempotent(x, 4)
        np.testing.assert_allclose(r.s, identity(3), atol=1e-9)
        assert r.route_agreement < 1e-6

    def test_non_diagonal_kernel(self):
        # rank one accretive x = e_3-like block with an off-diagonal range
        v = np.array([1.0, 1.0, 0.0]) / 2
        x = np.outer(v, [1.0, 1.0, 0.0])
        r = support_idempotent(x, 4)
        np.testing.assert_allclose(r.s @ x, x, atol=1e-10)
        assert r.rank == 1

    def test_invariance(self):
        assert support_invariance_check(np.diag([5.0, 0.0, 3.0]), 4)

    def test_rejects_non_accretive(self):
        with pytest.raises(LpError):
            support_idempotent(-identity(2), 3)


def test_random_accretive_is_accretive():
    from lpalg.elements import is_real_positive

    for seed in range(3):
        assert is_real_positive(random_accretive(3, 1.5, seed=seed), 1.5, corroborate=False)
