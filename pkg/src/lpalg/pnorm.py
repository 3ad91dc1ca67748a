"""Estimation of l^p -> l^p operator norms.

The maximisation of ``||Ax||_p`` over the unit sphere is nonconvex for
``p != 2``.  Everything here returns *lower bounds* reproduced by an explicit
witness vector; the only upper bounds offered come from Riesz-Thorin
interpolation between the exact ``p = 1`` and ``p = inf`` norms.

The oracle runs all of its restarts as columns of one array, so a 400-start
estimate of a 3x3 norm costs a few milliseconds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .core import (
    LpError,
    PExponent,
    as_exponent,
    as_matrix,
    as_vector,
    endpoint_norm,
    identity,
    spectral_norm,
    vector_p_norm,
)

log = logging.getLogger(__name__)

ORACLE_MAX_DIM = 8
ALGEBRA_TOL = 1e-9
NORM_TOL = 2e-6
POLISH_TOP = 16

METHODS = ("power", "oracle", "closed_form", "svd")


@dataclass
class NormEstimate:
    """A certified lower bound for ``||A||_{p->p}``.

    ``value == ||A @ witness||_p`` with ``||witness||_p == 1``.
    """

    value: float
    witness: np.ndarray
    p: float
    method: str
    upper: float | None = None
    restarts_used: int = 1
    converged: bool = True
    spread: float = 0.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [[float(z.real), float(z.imag)] for z in self.witness],
            "p": self.p,
            "method": self.method,
            "upper": self.upper,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "spread": self.spread,
        }


@dataclass
class QuotientNormResult:
    value: float
    minimizer: np.ndarray
    converged: bool = True
    evaluations: int = 0


# ---------------------------------------------------------------------------
# column-wise helpers (each column of X is one candidate vector)


def _col_norms(y: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(y)
    if math.isinf(p):
        return a.max(axis=0)
    scale = a.max(axis=0)
    if scale.size and 1e-100 < scale.min() and scale.max() < 1e100:
        return np.einsum("ij->j", a**p) ** (1.0 / p)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * np.sum((a / safe) ** p, axis=0) ** (1.0 / p)


def _col_duals(y: np.ndarray, p: float) -> np.ndarray:
    """Column-wise duality map; zero columns map to zero."""
    nrm = _col_norms(y, p)
    safe = np.where(nrm > 0, nrm, 1.0)
    u = y / safe
    a = np.abs(u)
    if p >= 2.0 or a.min() > 0:
        return np.conj(u) * a ** (p - 2.0)
    out = np.zeros_like(u)
    nz = a > 0
    out[nz] = np.conj(u[nz]) * a[nz] ** (p - 2.0)
    return out


def _normalize_cols(x: np.ndarray, p: float) -> np.ndarray:
    nrm = _col_norms(x, p)
    return x / np.where(nrm > 0, nrm, 1.0)


def _power_iterate(a, x, p, q, max_iter, tol):
    """Nonlinear power method on every column of ``x`` at once.

    Each step maps ``x`` to the norming vector of ``A^T J_p(Ax)`` in l^q;
    the values ``||Ax||_p`` are nondecreasing.
    """
    x = _normalize_cols(x, p)
    y = a @ x
    vals = _col_norms(y, p)
    active = np.flatnonzero(vals > 0)
    converged = vals == 0
    at = a.T
    for _ in range(max_iter):
        if active.size == 0:
            break
        z = at @ _col_duals(y[:, active], p)
        xn = _col_duals(z, q)
        live = np.any(z != 0, axis=0)
        yn = a @ xn
        vn = _col_norms(yn, p)
        old = vals[active]
        up = live & (vn >= old)
        idx = active[up]
        x[:, idx] = xn[:, up]
        y[:, idx] = yn[:, up]
        vals[idx] = vn[up]
        still = up & (vn - old >= tol)
        converged[active[~still]] = True
        active = active[still]
    return x, vals, converged


def _polish(a, x, p, rounds=500):
    """Projected gradient ascent with backtracking on every column."""
    vals = _col_norms(a @ x, p)
    alpha = np.ones(x.shape[1])
    at = a.T
    for _ in range(rounds):
        y = a @ x
        g = np.conj(at @ _col_duals(y, p)) - vals * np.conj(_col_duals(x, p))
        gn = np.linalg.norm(g, axis=0)
        live = gn > 1e-15
        if not live.any():
            break
        improved_any = False
        step = g / np.where(live, gn, 1.0) * np.linalg.norm(x, axis=0)
        trial_alpha = alpha.copy()
        pending = live.copy()
        for _ in range(30):
            if not pending.any():
                break
            xt = _normalize_cols(x[:, pending] + trial_alpha[pending] * step[:, pending], p)
            vt = _col_norms(a @ xt, p)
            idx = np.flatnonzero(pending)
            ok = vt > vals[idx]
            x[:, idx[ok]] = xt[:, ok]
            vals[idx[ok]] = vt[ok]
            alpha[idx[ok]] = np.minimum(1.0, 2.0 * trial_alpha[idx[ok]])
            improved_any |= bool(ok.any())
            pending[idx[ok]] = False
            trial_alpha[idx[~ok]] *= 0.5
        alpha[pending] = trial_alpha[pending]
        if not improved_any:
            break
    return x, vals


def _finish(a, x, p, method, restarts, converged, spread=0.0, upper=None) -> NormEstimate:
    w = x / vector_p_norm(x, p)
    value = vector_p_norm(a @ w, p) if np.any(w) else 0.0
    return NormEstimate(
        value=float(value),
        witness=w,
        p=float(p),
        method=method,
        upper=upper,
        restarts_used=restarts,
        converged=bool(converged),
        spread=float(spread),
    )


# ---------------------------------------------------------------------------
# public estimators


def pnorm_power(a, p: float | PExponent, start=None, max_iter: int = 1000, tol: float = 1e-12) -> NormEstimate:
    """Single-start nonlinear power method (Boyd / Higham).

    Returns a stationary-point lower bound.  ``converged`` is False when
    ``max_iter`` ran out; the value is still a valid lower bound.
    """
    m = as_matrix(a)
    pe = as_exponent(p).require_interior()
    n = m.shape[0]
    if not np.any(m):
        raise LpError("pnorm_power needs a nonzero matrix")
    x0 = np.ones(n, dtype=np.complex128) if start is None else as_vector(start)
    if x0.shape != (n,) or not np.any(x0):
        raise LpError("start vector must be nonzero with matching dimension")
    x, _, conv = _power_iterate(m, x0.reshape(n, 1).copy(), pe.p, pe.q, max_iter, tol)
    return _finish(m, x[:, 0], pe.p, "power", 1, conv[0])


def default_restarts(n: int) -> int:
    return 400 if n <= 4 else 200


def oracle_starts(n: int, restarts: int, seed: int = 0) -> np.ndarray:
    """Deterministic start vectors; a smaller budget is always a prefix."""
    rng = np.random.default_rng(seed)
    cols = [np.eye(n, dtype=np.complex128)[:, k] for k in range(min(n, restarts))]
    k = 0
    while len(cols) < restarts:
        if k % 2 == 0:
            v = np.exp(2j * np.pi * rng.random(n))
        else:
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cols.append(v)
        k += 1
    return np.stack(cols, axis=1)


def pnorm_oracle(
    a,
    p: float | PExponent,
    restarts: int | None = None,
    seed: int = 0,
    max_iter: int = 200,
    polish: bool = True,
) -> NormEstimate:
    """Multi-start maximisation of ``||Ax||_p`` over the unit sphere.

    Starts are the standard basis vectors, all-ones vectors with random
    unimodular phases and normalised complex Gaussians; every start is driven
    to a stationary point by the power method and the best ``POLISH_TOP`` are
    polished by projected gradient ascent.  ``spread`` is best minus median restart value.
    """
    m = as_matrix(a, max_dim=ORACLE_MAX_DIM)
    pe = as_exponent(p).require_interior()
    n = m.shape[0]
    if restarts is None:
        restarts = default_restarts(n)
    if restarts < 200:
        raise LpError("the oracle needs at least 200 restarts")
    if not np.any(m):
        return NormEstimate(0.0, np.eye(n, dtype=np.complex128)[:, 0], pe.p, "oracle", restarts_used=restarts)
    x = oracle_starts(n, restarts, seed)
    x, vals, conv = _power_iterate(m, x, pe.p, pe.q, max_iter, 1e-12)
    if polish:
        top = np.argsort(vals)[-POLISH_TOP:]
        x[:, top], vals[top] = _polish(m, x[:, top].copy(), pe.p)
    best = int(np.argmax(vals))
    spread = float(vals[best] - np.median(vals))
    return _finish(m, x[:, best], pe.p, "oracle", restarts, bool(conv[best]), spread)


def pnorm_svd(a) -> NormEstimate:
    """Exact l^2 norm from the top singular pair."""
    m = as_matrix(a)
    _, s, vh = np.linalg.svd(m)
    return _finish(m, vh[0].conj(), 2.0, "svd", 1, True)


def pnorm_closed_form(a, p: float | PExponent) -> NormEstimate:
    """Exact norms at p = 1 and p = inf, with an extremal witness."""
    m = as_matrix(a)
    pp = as_exponent(p).p
    n = m.shape[0]
    if pp == 1.0:
        j = int(np.argmax(np.abs(m).sum(axis=0)))
        w = np.eye(n, dtype=np.complex128)[:, j]
    elif math.isinf(pp):
        i = int(np.argmax(np.abs(m).sum(axis=1)))
        row = m[i]
        w = np.where(row != 0, np.conj(row) / np.where(row != 0, np.abs(row), 1.0), 1.0).astype(np.complex128)
    else:
        raise LpError("closed-form norms exist only for p in {1, inf}")
    est = _finish(m, w, pp, "closed_form", 1, True)
    est.value = endpoint_norm(m, pp)
    est.upper = est.value
    return est


def interpolation_upper(a, p: float | PExponent) -> float:
    """Riesz-Thorin bound ``||A||_1^(1/p) ||A||_inf^(1-1/p)``."""
    pp = as_exponent(p).p
    n1 = endpoint_norm(a, 1.0)
    ninf = endpoint_norm(a, math.inf)
    if math.isinf(pp):
        return ninf
    return float(n1 ** (1.0 / pp) * ninf ** (1.0 - 1.0 / pp))


def pnorm_bracket(a, p: float | PExponent, max_iter: int = 1000, seed: int = 0) -> tuple[float, float]:
    """(lower, upper): power method from a few structured and seeded starts,
    upper by Riesz-Thorin interpolation."""
    m = as_matrix(a)
    pe = as_exponent(p)
    upper = interpolation_upper(m, pe)
    if not pe.is_interior:
        v = endpoint_norm(m, pe)
        return v, v
    if not np.any(m):
        return 0.0, 0.0
    n = m.shape[0]
    signs = np.array([(-1.0) ** (k > 0) for k in range(n)], dtype=np.complex128).reshape(n, 1)
    starts = np.concatenate([oracle_starts(n, n + 16, seed), np.ones((n, 1)), signs], axis=1)
    _, vals, _ = _power_iterate(m, starts, pe.p, pe.q, max_iter, 1e-12)
    lower = float(vals.max())
    return lower, max(upper, lower)


def pnorm(a, p: float | PExponent, method: str = "oracle", **kwargs) -> NormEstimate:
    """Dispatch to an estimator; endpoints always use the exact formulas."""
    pe = as_exponent(p)
    if not pe.is_interior:
        return pnorm_closed_form(a, pe)
    if method == "oracle":
        return pnorm_oracle(a, pe, **kwargs)
    if method == "power":
        return pnorm_power(a, pe, **kwargs)
    if method == "svd":
        if pe.p != 2.0:
            raise LpError("the svd route is exact only at p = 2")
        return pnorm_svd(a)
    if method == "bracket":
        lo, hi = pnorm_bracket(a, pe)
        est = pnorm_oracle(a, pe, **kwargs) if as_matrix(a).shape[0] <= ORACLE_MAX_DIM else pnorm_power(a, pe)
        est.upper = max(hi, est.value)
        return est
    raise LpError(f"unknown method {method!r}")


def oracle_value(a, p, restarts: int | None = None, seed: int = 0) -> float:
    """The oracle's value alone; the default ``norm_oracle`` callable."""
    return pnorm_oracle(a, p, restarts=restarts, seed=seed).value


NormOracle = Callable[[np.ndarray, float], float]


def make_oracle(restarts: int | None = None, seed: int = 0) -> NormOracle:
    return partial(oracle_value, restarts=restarts, seed=seed)


# ---------------------------------------------------------------------------
# quotient seminorm


def _golden_line(phi, f0, h, tol):
    """Minimise a convex 1-D function with phi(0) = f0; returns (s, value)."""
    fr = phi(h)
    if fr < f0:
        lo, mid, fmid = 0.0, h, fr
        hi = 2.0 * h
        fhi = phi(hi)
        while fhi < fmid and hi < 1e8:
            lo, mid, fmid = mid, hi, fhi
            hi *= 2.0
            fhi = phi(hi)
    else:
        fl = phi(-h)
        if fl < f0:
            hi, mid, fmid = 0.0, -h, fl
            lo = -2.0 * h
            flo = phi(lo)
            while flo < fmid and lo > -1e8:
                hi, mid, fmid = mid, lo, flo
                lo *= 2.0
                flo = phi(lo)
        else:
            lo, hi = -h, h
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = phi(c), phi(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = phi(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = phi(d)
    s, fs = (c, fc) if fc < fd else (d, fd)
    if fs < f0:
        return s, fs
    return 0.0, f0


def quotient_seminorm(
    m,
    ideal_basis: Sequence,
    p: float | PExponent,
    oracle: NormOracle | None = None,
    tol: float = 1e-10,
    max_sweeps: int = 40,
    seed: int = 0,
) -> QuotientNormResult:
    """``inf_lambda ||M + sum_i lambda_i N_i||_{p->p}`` by derivative-free descent.

    The objective is convex in the real and imaginary parts of the
    coefficients.  Each sweep runs golden-section line searches along every
    real coordinate, then along the sweep's net displacement and a few seeded
    random directions; sweeps stop once the improvement drops below ``tol``.
    """
    mm = as_matrix(m, max_dim=ORACLE_MAX_DIM)
    pe = as_exponent(p).require_interior()
    basis = [as_matrix(b, max_dim=ORACLE_MAX_DIM) for b in ideal_basis]
    oracle = oracle or make_oracle()
    k = len(basis)
    evals = 0

    def objective(theta):
        nonlocal evals
        evals += 1
        lam = theta[0::2] + 1j * theta[1::2]
        return oracle(mm + sum(c * b for c, b in zip(lam, basis)), pe.p)

    if k == 0:
        return QuotientNormResult(objective(np.zeros(0)), np.zeros(0, dtype=np.complex128), True, evals)
    flat = np.array([b.ravel() for b in basis]).T
    if np.linalg.matrix_rank(flat, tol=1e-10) < k:
        raise LpError("ideal basis is linearly dependent")

    rng = np.random.default_rng(seed)
    theta = np.zeros(2 * k)
    best = objective(theta)
    scale = max(best, 1e-3)
    steps = [scale / max(np.abs(b).max(), 1e-12) for b in basis for _ in (0, 1)]
    converged = False
    for _ in range(max_sweeps):
        start_val, start_theta = best, theta.copy()
        dirs = [np.eye(2 * k)[i] for i in range(2 * k)]
        for i, d in enumerate(dirs):
            s, val = _golden_line(lambda s: objective(theta + s * d), best, 0.25 * steps[i], 1e-8 * steps[i])
            theta = theta + s * d
            best = val
        extra = [theta - start_theta] + [rng.standard_normal(2 * k) for _ in range(2)]
        for d in extra:
            nd = np.linalg.norm(d)
            if nd == 0:
                continue
            d = d / nd
            s, val = _golden_line(lambda s: objective(theta + s * d), best, 0.25 * max(steps), 1e-8 * max(steps))
            theta = theta + s * d
            best = val
        if start_val - best < tol:
            converged = True
            break
    if not converged:
        log.warning("quotient minimisation stopped after %d sweeps", max_sweeps)
    return QuotientNormResult(float(best), theta[0::2] + 1j * theta[1::2], converged, evals)


# ---------------------------------------------------------------------------
# multiplier unitization


def span_residual(target, basis: Sequence) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of ``target`` over ``basis`` and the residual."""
    flat = np.array([as_matrix(b).ravel() for b in basis]).T
    t = as_matrix(target).ravel()
    coef, *_ = np.linalg.lstsq(flat, t, rcond=None)
    return coef, float(np.abs(flat @ coef - t).max())


def check_subalgebra(basis: Sequence, tol: float = ALGEBRA_TOL) -> None:
    """Raise unless ``basis`` is independent and its span is closed under products."""
    mats = [as_matrix(b) for b in basis]
    if not mats:
        raise LpError("empty algebra basis")
    flat = np.array([b.ravel() for b in mats]).T
    if np.linalg.matrix_rank(flat, tol=1e-10) < len(mats):
        raise LpError("algebra basis is degenerate (linearly dependent)")
    for x in mats:
        for y in mats:
            _, res = span_residual(x @ y, mats)
            if res > tol:
                raise LpError(f"span is not closed under multiplication (residual {res:.3g})")


def unitization_norm(
    a,
    lam: complex,
    algebra_basis: Sequence,
    p: float | PExponent,
    oracle: NormOracle | None = None,
    random_starts: int = 6,
    seed: int = 0,
) -> float:
    """Multiplier-unitization norm ``sup_{||c|| <= 1} ||ac + lam c||_{p->p}``.

    The supremum runs over the unit ball of the span of ``algebra_basis``; by
    homogeneity it is the supremum of ``||(a + lam) c|| / ||c||``.  Starts are
    the basis elements, the projection of the identity onto the span, and
    seeded random combinations; the best start is polished by Nelder-Mead.
    """
    from scipy.optimize import minimize

    pe = as_exponent(p).require_interior()
    mats = [as_matrix(b, max_dim=ORACLE_MAX_DIM) for b in algebra_basis]
    check_subalgebra(mats)
    am = as_matrix(a, max_dim=ORACLE_MAX_DIM)
    _, res = span_residual(am, mats)
    if res > ALGEBRA_TOL:
        raise LpError("a is not in the span of the algebra basis")
    oracle = oracle or make_oracle()
    n = am.shape[0]
    k = len(mats)
    shifted = am + lam * identity(n)

    def ratio(coef):
        c = sum(z * b for z, b in zip(coef, mats))
        den = oracle(c, pe.p)
        if den <= 1e-14:
            return 0.0
        return oracle(shifted @ c, pe.p) / den

    starts = [np.eye(k, dtype=np.complex128)[i] for i in range(k)]
    coef_id, res_id = span_residual(identity(n), mats)
    if res_id <= ALGEBRA_TOL:
        starts.append(coef_id)
    rng = np.random.default_rng(seed)
    starts += [rng.standard_normal(k) + 1j * rng.standard_normal(k) for _ in range(random_starts)]
    scored = [(ratio(s), i) for i, s in enumerate(starts)]
    best_val, best_i = max(scored, key=lambda t: (t[0], -t[1]))
    x0 = np.concatenate([starts[best_i].real, starts[best_i].imag])
    # k == 1: the ratio is constant on the line, nothing to polish
    if k > 1:
        sol = minimize(lambda x: -ratio(x[:k] + 1j * x[k:]), x0, method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-12, "maxfev": 50 * k})
        best_val = max(best_val, -sol.fun)
    return float(best_val)
