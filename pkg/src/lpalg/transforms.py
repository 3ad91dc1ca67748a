"""Fractional powers, Cayley and F transforms, and support idempotents.

Every limit object is computed by two independent routes so that their
disagreement measures the numerical error:

* ``b^t``: binomial series in ``1 - b`` against principal-branch Schur-Parlett;
* ``s(x)``: ``x^(1/n)`` as ``n -> inf`` against ``x (x + eps)^-1`` as ``eps -> 0``.

Both support routes converge only like ``1/n`` and ``eps``, so each limit is
taken with Richardson extrapolation over its schedule (powers of two for
``n``, powers of ten for ``eps``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import binom

from .core import (
    LpError,
    as_exponent,
    as_matrix,
    identity,
    numerical_rank,
    power_function,
    principal_matrix_function,
)
from .pnorm import NORM_TOL, NormOracle, make_oracle

SUPPORT_TOL = 1e-6


@dataclass(frozen=True)
class PowerSeriesConfig:
    tolerance: float = 1e-12
    max_terms: int = 100000
    boundary_switch_threshold: float = 0.999

    def __post_init__(self):
        if not self.tolerance > 0:
            raise LpError("tolerance must be positive")
        if self.max_terms < 1:
            raise LpError("max_terms must be at least 1")


@dataclass
class SupportIdempotentResult:
    s: np.ndarray
    route_agreement: float
    n_used: int
    epsilon_used: float
    norm_one_minus_s: float | None = None
    rank: int = 0


def _solve_right(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``x @ inv(y)`` without forming the inverse."""
    if numerical_rank(y, rtol=1e-13) < y.shape[0]:
        raise LpError("x + 1 is singular (-1 is an eigenvalue of x)")
    return np.linalg.solve(y.T, x.T).T


def f_transform(x, p=None, oracle: NormOracle | None = None) -> np.ndarray:
    """``x (x + 1)^-1``.  With ``p`` given and ``x`` real positive, the result
    is checked to lie in ``F_A`` (``||1 - F(x)|| <= 1``)."""
    m = as_matrix(x)
    out = _solve_right(m, m + identity(m.shape[0]))
    if p is not None:
        from .elements import is_real_positive

        oracle = oracle or make_oracle()
        pe = as_exponent(p)
        if is_real_positive(m, pe, oracle, corroborate=False):
            nrm = oracle(identity(m.shape[0]) - out, pe.p)
            if nrm > 1.0 + NORM_TOL:
                raise LpError(f"F(x) escaped F_A: ||1 - F(x)|| = {nrm:.9f}")
    return out


def cayley(x) -> np.ndarray:
    """``(x - 1)(x + 1)^-1``."""
    m = as_matrix(x)
    one = identity(m.shape[0])
    return _solve_right(m - one, m + one)


def binomial_coefficients(t: float, k: int) -> np.ndarray:
    """``binom(t, j) (-1)^j`` for ``j = 0..k``."""
    return binom(t, np.arange(k + 1)) * (-1.0) ** np.arange(k + 1)


def power_series(
    b,
    t: float,
    p=4.0,
    cfg: PowerSeriesConfig = PowerSeriesConfig(),
    oracle: NormOracle | None = None,
) -> np.ndarray:
    """``b^t = sum_k binom(t, k) (-1)^k (1 - b)^k`` for ``||1 - b||_p <= 1``.

    Above ``cfg.boundary_switch_threshold`` the series converges too slowly
    and the principal-branch route is used instead.
    """
    m = as_matrix(b)
    if not 0.0 < t < 1.0:
        raise LpError("t must lie in (0, 1)")
    oracle = oracle or make_oracle()
    n = m.shape[0]
    c = identity(n) - m
    radius = oracle(c, as_exponent(p).p) if np.any(c) else 0.0
    if radius > 1.0 + NORM_TOL:
        raise LpError(f"||1 - b|| = {radius:.9f} > 1: the series need not converge")
    if radius > cfg.boundary_switch_threshold:
        return power_accretive(m, t, check=False)
    total = identity(n)
    term = identity(n)
    coef = 1.0
    for k in range(1, cfg.max_terms + 1):
        coef *= (k - 1 - t) / k
        term = term @ c
        inc = coef * term
        total = total + inc
        if np.abs(inc).max() < cfg.tolerance:
            return total
    raise LpError(f"power series did not converge in {cfg.max_terms} terms; use the spectral route")


def power_accretive(x, t: float, p=None, oracle: NormOracle | None = None, check: bool = True) -> np.ndarray:
    """Principal-branch ``x^t`` (``0^t = 0`` on the kernel) for accretive ``x``."""
    m = as_matrix(x)
    if not 0.0 < t < 1.0:
        raise LpError("t must lie in (0, 1)")
    if check and p is not None:
        from .elements import is_real_positive

        if not is_real_positive(m, p, oracle, corroborate=False):
            raise LpError("power_accretive needs a real positive matrix")
    if numerical_rank(m) != numerical_rank(m @ m):
        raise LpError("eigenvalue 0 is not semisimple; x cannot be accretive")
    return principal_matrix_function(m, power_function(t))


def _richardson(values, ratio: float, tol: float, depth: int = 5):
    """Neville-extrapolate ``values[k] ~ L + c1 h_k + c2 h_k^2 + ...`` with
    ``h_k = h_0 / ratio^k``.  Returns (estimate, index used, last change)."""
    table = []
    best, best_k, best_delta = values[0], 0, np.inf
    prev = None
    for k, v in enumerate(values):
        row = [v]
        for j in range(1, min(k, depth) + 1):
            f = ratio**j
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (f - 1.0))
        table.append(row)
        est = row[-1]
        if prev is not None:
            delta = float(np.abs(est - prev).max())
            if delta < best_delta:
                best, best_k, best_delta = est, k, delta
            if delta < tol:
                return est, k, delta
        prev = est
    return best, best_k, best_delta


def support_route_roots(x, tol: float = 1e-9, max_log2: int = 20):
    """``lim x^(1/n)``, ``n = 2^k``, extrapolated in ``1/n``."""
    m = as_matrix(x)
    vals = []
    out = None
    for k in range(1, max_log2 + 1):
        vals.append(principal_matrix_function(m, power_function(2.0**-k)))
        if k >= 3:
            out = _richardson(vals, 2.0, tol)
            if out[2] < tol:
                break
    est, k, _ = out
    return est, 2 ** (k + 1)


def support_route_resolvent(x, tol: float = 1e-9, max_log10: int = 12):
    """``lim x (x + eps)^-1 = lim 1 - eps (x + eps)^-1``, ``eps = 10^-k``, extrapolated in ``eps``."""
    m = as_matrix(x)
    one = identity(m.shape[0])
    vals = []
    out = None
    for k in range(1, max_log10 + 1):
        eps = 10.0**-k
        vals.append(one - eps * np.linalg.inv(m + eps * one))
        if k >= 3:
            out = _richardson(vals, 10.0, tol)
            if out[2] < tol:
                break
    est, k, _ = out
    return est, 10.0 ** -(k + 1)


def support_routes(x) -> SupportIdempotentResult:
    """Both limit routes for ``s(x)`` with no checks beyond a semisimple kernel."""
    m = as_matrix(x)
    n = m.shape[0]
    if numerical_rank(m) != numerical_rank(m @ m):
        raise LpError("eigenvalue 0 is not semisimple; x cannot be accretive")
    if not np.any(m):
        return SupportIdempotentResult(np.zeros((n, n), dtype=np.complex128), 0.0, 1, 0.0, 1.0, 0)
    r1, n_used = support_route_roots(m)
    s, eps = support_route_resolvent(m)
    return SupportIdempotentResult(s, float(np.abs(r1 - s).max()), n_used, eps, rank=numerical_rank(m))


def support_idempotent(x, p, oracle: NormOracle | None = None, check: bool = True) -> SupportIdempotentResult:
    """The support idempotent of an accretive ``x``: range ``range(x)``, kernel ``ker(x)``.

    The returned ``s`` is the resolvent route; ``route_agreement`` is its
    max-entry distance from the roots route.  With ``check`` the input is
    tested for accretivity and the result against ``s^2 = s``, ``sx = xs = x``,
    ``rank s = rank x`` and ``||1 - s|| <= 1``.
    """
    m = as_matrix(x)
    pe = as_exponent(p)
    oracle = oracle or make_oracle()
    n = m.shape[0]
    if check:
        from .elements import is_real_positive

        if not is_real_positive(m, pe, oracle, corroborate=False):
            raise LpError("support_idempotent needs a real positive matrix")
    result = support_routes(m)
    s = result.s
    if result.route_agreement > SUPPORT_TOL:
        raise LpError(f"support routes disagree by {result.route_agreement:.3e}")
    if check:
        if np.abs(s @ s - s).max() > 1e-8:
            raise LpError("support idempotent is not idempotent")
        if max(np.abs(s @ m - m).max(), np.abs(m @ s - m).max()) > 1e-8:
            raise LpError("support idempotent does not fix x")
        if numerical_rank(s) != result.rank:
            raise LpError("rank of s differs from rank of x")
        result.norm_one_minus_s = oracle(identity(n) - s, pe.p) if numerical_rank(s) < n else 0.0
        if result.norm_one_minus_s > 1.0 + NORM_TOL:
            raise LpError(f"||1 - s|| = {result.norm_one_minus_s:.9f} > 1")
    return result


def support_invariance_distance(x, p, oracle: NormOracle | None = None) -> float:
    """``max |s(F(x)) - s(x)|``."""
    m = as_matrix(x)
    oracle = oracle or make_oracle()
    s1 = support_idempotent(m, p, oracle).s
    s2 = support_idempotent(f_transform(m), p, oracle).s
    return float(np.abs(s1 - s2).max())


def support_invariance_check(x, p, oracle: NormOracle | None = None) -> bool:
    return support_invariance_distance(x, p, oracle) < SUPPORT_TOL


def random_accretive(n: int, p, seed: int = 0, margin: float = 0.05, scale: float = 1.0) -> np.ndarray:
    """A random complex matrix shifted right past its sampled numerical range."""
    from .states import numerical_range_abscissa

    pe = as_exponent(p)
    rng = np.random.default_rng(seed)
    m = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    alpha, _ = numerical_range_abscissa(m, pe, count=200, seed=seed)
    return m + (max(0.0, -alpha) + margin) * identity(n)

