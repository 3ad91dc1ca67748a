"""Vector states on M_n^p, spatial numerical ranges and state-vanishing suites.

A vector state is ``phi(a) = <a xi, eta>`` with ``||xi||_p = ||eta||_q = 1``
and ``<xi, eta> = 1``; on l^p (1 < p < inf) ``eta`` is forced to be the
duality map of ``xi``.  The suites here sample such states and report the
worst residual of a law that should hold exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .core import LpError, as_exponent, as_matrix, duality_map, identity, numerical_rank, vector_p_norm
from .pnorm import ALGEBRA_TOL, NORM_TOL, NormOracle, make_oracle

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class VectorState:
    xi: np.ndarray
    eta: np.ndarray
    p: float

    def __call__(self, a) -> complex:
        return complex(np.sum((np.asarray(a) @ self.xi) * self.eta))

    def defects(self) -> tuple[float, float, float]:
        """Deviations of ||xi||_p, ||eta||_q and <xi, eta> from 1."""
        pe = as_exponent(self.p)
        return (
            abs(vector_p_norm(self.xi, pe) - 1.0),
            abs(vector_p_norm(self.eta, pe.q) - 1.0),
            abs(complex(np.sum(self.xi * self.eta)) - 1.0),
        )


def make_state(xi, p) -> VectorState:
    pe = as_exponent(p).require_interior()
    xi = np.asarray(xi, dtype=np.complex128)
    nrm = vector_p_norm(xi, pe)
    if nrm == 0.0:
        raise LpError("a vector state needs a nonzero vector")
    xi = xi / nrm
    return VectorState(xi, duality_map(xi, pe), pe.p)


def sample_states(p, n: int, count: int, seed: int = 0) -> list[VectorState]:
    """``count`` states from normalised complex Gaussian vectors."""
    rng = np.random.default_rng(seed)
    return [make_state(rng.standard_normal(n) + 1j * rng.standard_normal(n), p) for _ in range(count)]


@dataclass
class NumericalRangeSample:
    values: np.ndarray
    min_real: float
    max_abs: float


def spatial_numerical_range(a, states: Sequence[VectorState]) -> NumericalRangeSample:
    m = as_matrix(a)
    xi = np.stack([s.xi for s in states], axis=1)
    eta = np.stack([s.eta for s in states], axis=1)
    vals = np.sum((m @ xi) * eta, axis=0)
    return NumericalRangeSample(vals, float(vals.real.min()), float(np.abs(vals).max()))


def numerical_range_abscissa(a, p, count: int = 200, seed: int = 0, polish: int = 5) -> tuple[float, np.ndarray]:
    """Approximate ``min Re phi(a)`` over vector states: sampling, then local polish.

    Returns the smallest value found and its ``xi``.  Being a minimum over
    found points, it can only overestimate the true abscissa.
    """
    m = as_matrix(a)
    pe = as_exponent(p).require_interior()
    n = m.shape[0]
    states = sample_states(pe, n, count, seed)
    basis = [make_state(np.eye(n)[k], pe) for k in range(n)]
    states = basis + states
    cloud = spatial_numerical_range(m, states)
    order = np.argsort(cloud.values.real)

    def re_phi(x):
        v = x[:n] + 1j * x[n:]
        if not np.any(v):
            return np.inf
        return make_state(v, pe)(m).real

    best, best_xi = float(cloud.values.real[order[0]]), states[order[0]].xi
    for i in order[:polish]:
        x0 = np.concatenate([states[i].xi.real, states[i].xi.imag])
        sol = minimize(re_phi, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        if sol.fun < best:
            best = float(sol.fun)
            best_xi = make_state(sol.x[:n] + 1j * sol.x[n:], pe).xi
    return best, best_xi


# ---------------------------------------------------------------------------
# suites


@dataclass
class SuiteReport:
    name: str
    p: float
    count: int
    seed: int
    max_residual: float = 0.0
    min_slack: float | None = None
    threshold: float = RESIDUAL_TOL
    vacuous: bool = False
    passed: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def matrix_units(n: int, mask=None) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            if mask is None or mask(i, j):
                u = np.zeros((n, n), dtype=np.complex128)
                u[i, j] = 1.0
                out.append(u)
    return out


def _random_states_in(proj: np.ndarray, p, count: int, rng) -> list[VectorState]:
    n = proj.shape[0]
    out = []
    while len(out) < count:
        v = proj @ (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        if vector_p_norm(v, p) > 1e-8:
            out.append(make_state(v, p))
    return out


def vanishing_state_suite(
    e,
    p,
    algebra_basis: Sequence | None = None,
    count: int = 1000,
    seed: int = 0,
    oracle: NormOracle | None = None,
) -> SuiteReport:
    """States with ``phi(e) = 0`` annihilate ``ae`` and ``ea``.

    States are built from ``xi`` in the range of ``1 - e`` (so ``phi(e) = 0``)
    with ``eta`` its norming functional.  ``e`` must be an idempotent with
    ``||1 - e|| <= 1``.  The residual is the largest ``|phi(ae)|`` or
    ``|phi(ea)|`` over the samples and the basis (default: all matrix units).
    """
    em = as_matrix(e)
    pe = as_exponent(p).require_interior()
    n = em.shape[0]
    oracle = oracle or make_oracle()
    if np.abs(em @ em - em).max() > ALGEBRA_TOL:
        raise LpError("e is not idempotent")
    one_minus = identity(n) - em
    norm_1me = oracle(one_minus, pe.p)
    if norm_1me > 1.0 + NORM_TOL:
        raise LpError(f"||1 - e|| = {norm_1me:.9f} > 1: e is not real positive")
    report = SuiteReport("vanishing-state", pe.p, count, seed, details={"norm_one_minus_e": norm_1me})
    if numerical_rank(one_minus) == 0:
        report.vacuous = True
        return report
    basis = [as_matrix(b) for b in algebra_basis] if algebra_basis is not None else matrix_units(n)
    rng = np.random.default_rng(seed)
    states = _random_states_in(one_minus, pe, count, rng)
    worst_e = 0.0
    worst = 0.0
    for s in states:
        worst_e = max(worst_e, abs(s(em)))
        for a in basis:
            worst = max(worst, abs(s(a @ em)), abs(s(em @ a)))
    report.max_residual = worst
    report.details["max_abs_phi_e"] = worst_e
    report.passed = worst < report.threshold
    return report


def support_state_suite(x, p, count: int = 1000, seed: int = 0, oracle: NormOracle | None = None) -> SuiteReport:
    """Vanishing laws tying an accretive ``x`` to its support idempotent ``s``.

    Forward: states with ``phi(s) = 0`` (``xi`` in the range of ``1 - s``) kill
    ``x``.  Converse, checked when ``||1 - x|| <= 1``: states with
    ``phi(x) = 0`` (``xi`` in the kernel of ``x``) kill ``s``.
    """
    from .transforms import support_idempotent

    xm = as_matrix(x)
    pe = as_exponent(p).require_interior()
    n = xm.shape[0]
    oracle = oracle or make_oracle()
    sup = support_idempotent(xm, pe, oracle=oracle)
    s = sup.s
    rng = np.random.default_rng(seed)
    report = SuiteReport("support-state", pe.p, count, seed)
    one_minus_s = identity(n) - s
    forward = 0.0
    forward_vacuous = numerical_rank(one_minus_s) == 0
    if not forward_vacuous:
        for st in _random_states_in(one_minus_s, pe, count, rng):
            forward = max(forward, abs(st(s)), abs(st(xm)))
    in_fa = oracle(identity(n) - xm, pe.p) <= 1.0 + NORM_TOL
    converse = 0.0
    converse_vacuous = True
    if in_fa:
        _, sv, vh = np.linalg.svd(xm)
        kernel = vh[sv <= 1e-10 * max(1.0, sv[0])].conj().T
        if kernel.shape[1] > 0:
            converse_vacuous = False
            proj = kernel @ kernel.conj().T
            for st in _random_states_in(proj, pe, count, rng):
                converse = max(converse, abs(st(xm)), abs(st(s)))
    report.max_residual = max(forward, converse)
    report.vacuous = forward_vacuous and converse_vacuous
    report.details = {
        "forward_residual": forward,
        "forward_vacuous": forward_vacuous,
        "converse_checked": bool(in_fa),
        "converse_residual": converse,
        "converse_vacuous": converse_vacuous,
        "route_agreement": sup.route_agreement,
    }
    report.passed = report.max_residual < report.threshold
    return report


def _is_01_diagonal(z: np.ndarray, tol: float) -> bool:
    off = z - np.diag(np.diag(z))
    d = np.diag(z)
    return bool(np.abs(off).max() <= tol and np.all(np.minimum(np.abs(d), np.abs(d - 1.0)) <= tol))


def m_projection_check(
    z,
    p,
    algebra_basis: Sequence | None = None,
    count: int = 1000,
    seed: int = 0,
    oracle: NormOracle | None = None,
) -> SuiteReport:
    """Sample ``max(||x||, ||y||) - ||zxz + (1-z)y(1-z)||`` over the unit ball.

    ``z`` must be a real 0/1 diagonal matrix commuting with the algebra; the
    default algebra is the commutant of ``z`` (block diagonal matrices).  The
    reported ``min_slack`` should be nonnegative up to oracle tolerance.
    """
    zm = as_matrix(z)
    pe = as_exponent(p).require_interior()
    n = zm.shape[0]
    oracle = oracle or make_oracle()
    if not _is_01_diagonal(zm, ALGEBRA_TOL):
        raise LpError("z must be a real 0/1 diagonal matrix")
    zd = np.diag(zm).real.round()
    zm = np.diag(zd).astype(np.complex128)
    if algebra_basis is None:
        basis = matrix_units(n, lambda i, j: zd[i] == zd[j])
    else:
        basis = [as_matrix(b) for b in algebra_basis]
    for b in basis:
        if np.abs(zm @ b - b @ zm).max() > ALGEBRA_TOL:
            raise LpError("z is not central in the algebra")
    rng = np.random.default_rng(seed)
    w = identity(n) - zm
    slack = np.inf

    def ball_element():
        c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        m = sum(ci * b for ci, b in zip(c, basis))
        r = rng.random()
        # the oracle is homogeneous, so ||m r / ||m|| || is r up to rounding
        return m * (r / oracle(m, pe.p)), r

    for _ in range(count):
        (x, rx), (y, ry) = ball_element(), ball_element()
        lhs = oracle(zm @ x @ zm + w @ y @ w, pe.p)
        slack = min(slack, max(rx, ry) - lhs)
    report = SuiteReport("m-projection", pe.p, count, seed, min_slack=float(slack), threshold=-NORM_TOL)
    report.passed = slack >= -NORM_TOL
    return report
