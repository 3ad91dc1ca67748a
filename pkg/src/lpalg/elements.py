"""Classification of matrices as elements of the unital algebra M_n^p.

For ``p != 2`` hermitian elements of M_n^p are exactly the real diagonal
matrices and the invertible isometries are exactly the complex permutation
matrices.  Both facts give noise-free structural tests; the norm oracle
serves as an independent guard, and a disagreement between the two routes is
raised as :class:`InconsistencyError` rather than resolved silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import LpError, as_exponent, as_matrix, identity, matrix_exp
from .pnorm import ALGEBRA_TOL, NORM_TOL, NormOracle, make_oracle
from .states import numerical_range_abscissa

DYNAMICAL_TOL = 2e-5
STRUCTURE_TOL = 1e-9
HERMITIAN_GRID = np.pi / 50 * np.arange(-100, 101)
SEMIGROUP_GRID = 2.0 ** np.arange(-10, 5)


class InconsistencyError(LpError):
    """Two independent decision routes disagreed."""


@dataclass
class IsometryCertificate:
    """``a == diag(phases) @ P`` where row ``i`` of ``P`` has its 1 in column ``permutation[i]``."""

    permutation: np.ndarray
    phases: np.ndarray

    def matrix(self) -> np.ndarray:
        n = len(self.permutation)
        pm = np.zeros((n, n), dtype=np.complex128)
        pm[np.arange(n), self.permutation] = 1.0
        return np.diag(self.phases) @ pm


@dataclass
class HermitianResult:
    hermitian: bool
    diagonal: np.ndarray | None = None
    dynamical_max: float | None = None
    witness_lambda: float | None = None
    fallback: bool = False

    def __bool__(self):
        return self.hermitian


@dataclass
class RealPositiveResult:
    real_positive: bool
    max_semigroup_norm: float
    witness_t: float
    numerical_range_min: float | None = None

    def __bool__(self):
        return self.real_positive


@dataclass
class ElementReport:
    p: float
    is_idempotent: bool
    is_contractive: bool
    is_bicontractive: bool
    is_real_positive: bool
    in_FA: bool
    is_hermitian: bool
    is_invertible_isometry: bool
    norm: float
    norm_one_minus: float
    isometry: IsometryCertificate | None = None
    hermitian: HermitianResult | None = None
    real_positive: RealPositiveResult | None = None
    p2_fallback: bool = False
    tolerances: dict = field(default_factory=lambda: {"algebra": ALGEBRA_TOL, "norm": NORM_TOL, "dynamical": DYNAMICAL_TOL})

    def flags(self) -> dict:
        return {k: getattr(self, k) for k in ("is_idempotent", "is_contractive", "is_bicontractive", "is_real_positive", "in_FA", "is_hermitian", "is_invertible_isometry")}

    def to_dict(self) -> dict:
        out = {"p": self.p, **self.flags(), "norm": self.norm, "norm_one_minus": self.norm_one_minus, "p2_fallback": self.p2_fallback, "tolerances": self.tolerances}
        if self.isometry is not None:
            out["isometry"] = {"permutation": self.isometry.permutation.tolist(), "phases": [[z.real, z.imag] for z in self.isometry.phases]}
        if self.hermitian is not None and self.hermitian.diagonal is not None:
            out["hermitian_diagonal"] = self.hermitian.diagonal.tolist()
        if self.real_positive is not None:
            out["semigroup_max"] = self.real_positive.max_semigroup_norm
            out["semigroup_witness_t"] = self.real_positive.witness_t
            out["numerical_range_min"] = self.real_positive.numerical_range_min
        return out


def is_idempotent(a, tol: float = ALGEBRA_TOL) -> bool:
    m = as_matrix(a)
    return bool(np.abs(m @ m - m).max() <= tol)


def _structural_isometry(m: np.ndarray, tol: float) -> IsometryCertificate | None:
    n = m.shape[0]
    cols = np.argmax(np.abs(m), axis=1)
    if len(set(cols.tolist())) != n:
        return None
    phases = m[np.arange(n), cols]
    if np.any(np.abs(np.abs(phases) - 1.0) > tol):
        return None
    phases = phases / np.abs(phases)
    cert = IsometryCertificate(cols, phases)
    if np.abs(cert.matrix() - m).max() > tol:
        return None
    return cert


def is_invertible_isometry(a, p, oracle: NormOracle | None = None, tol: float = STRUCTURE_TOL) -> IsometryCertificate | None:
    """Fit ``a = D P`` (unimodular diagonal times permutation), cross-checked by norms."""
    m = as_matrix(a)
    pe = as_exponent(p).require_interior()
    if pe.p == 2.0:
        raise LpError("at p = 2 every unitary is an isometry; the Lamperti test does not apply")
    oracle = oracle or make_oracle()
    cert = _structural_isometry(m, tol)
    norms_ok = False
    if np.linalg.cond(m) < 1e12:
        norms_ok = oracle(m, pe.p) <= 1.0 + NORM_TOL and oracle(np.linalg.inv(m), pe.p) <= 1.0 + NORM_TOL
    if (cert is not None) != norms_ok:
        raise InconsistencyError(f"isometry structure fit ({cert is not None}) disagrees with norm test ({norms_ok})")
    return cert


def is_hermitian(a, p, oracle: NormOracle | None = None, grid=HERMITIAN_GRID, tol: float = STRUCTURE_TOL) -> HermitianResult:
    """Hermitian iff real diagonal (p != 2), guarded by ``sup ||exp(i lam a)|| <= 1``.

    At p = 2 the test falls back to conjugate symmetry and says so.
    """
    m = as_matrix(a)
    pe = as_exponent(p).require_interior()
    oracle = oracle or make_oracle()
    if pe.p == 2.0:
        return HermitianResult(bool(np.abs(m - m.conj().T).max() <= tol), fallback=True)
    d = np.diag(m)
    off = m - np.diag(d)
    structural = bool(np.abs(off).max() <= tol and np.abs(d.imag).max() <= tol)
    norms = np.array([oracle(matrix_exp(1j * lam * m), pe.p) for lam in grid])
    k = int(np.argmax(norms))
    dynamical = bool(norms[k] <= 1.0 + DYNAMICAL_TOL)
    if structural != dynamical:
        raise InconsistencyError(f"structural hermitian test ({structural}) disagrees with dynamical test (max {norms[k]:.8f})")
    return HermitianResult(structural, d.real.copy() if structural else None, float(norms[k]), float(grid[k]))


def is_real_positive(a, p, oracle: NormOracle | None = None, grid=SEMIGROUP_GRID, corroborate: bool = True) -> RealPositiveResult:
    """Accretivity via the contraction semigroup: ``||exp(-t a)|| <= 1`` on a t-grid.

    With ``corroborate`` the minimum real part of sampled spatial
    numerical-range points is attached for comparison (by Lumer's theorem
    both views agree at the level of convex hulls).
    """
    m = as_matrix(a)
    pe = as_exponent(p)
    oracle = oracle or make_oracle()
    norms = np.array([oracle(matrix_exp(-t * m), pe.p) for t in grid])
    k = int(np.argmax(norms))
    nr = None
    if corroborate and pe.is_interior:
        nr, _ = numerical_range_abscissa(m, pe, count=200, polish=2)
    return RealPositiveResult(bool(norms[k] <= 1.0 + DYNAMICAL_TOL), float(norms[k]), float(grid[k]), nr)


def in_FA(a, p, oracle: NormOracle | None = None) -> bool:
    """``||1 - a|| <= 1`` (up to the oracle tolerance)."""
    m = as_matrix(a)
    oracle = oracle or make_oracle()
    return bool(oracle(identity(m.shape[0]) - m, as_exponent(p).p) <= 1.0 + NORM_TOL)


def hermitian_decomposition(a, tol: float = STRUCTURE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split a real diagonal ``a`` into positive and negative parts ``a = b - c``, ``bc = 0``."""
    m = as_matrix(a)
    d = np.diag(m)
    if np.abs(m - np.diag(d)).max() > tol or np.abs(d.imag).max() > tol:
        raise LpError("hermitian_decomposition needs a hermitian (real diagonal) matrix")
    d = d.real
    return np.diag(np.maximum(d, 0.0)).astype(np.complex128), np.diag(np.maximum(-d, 0.0)).astype(np.complex128)


@dataclass
class OrderReport:
    fe_equals_e: bool
    ef_equals_e: bool
    e_le_f: bool
    e_le_r_f: bool
    precondition: str | None

    @property
    def checked(self) -> bool:
        return self.precondition is not None


def idempotent_order(e, f, p, oracle: NormOracle | None = None, tol: float = ALGEBRA_TOL) -> OrderReport:
    """Compare idempotents: ``e <=_r f`` iff ``fe = e``; ``e <= f`` iff ``ef = fe = e``.

    When both are contractive or both real positive, ``fe = e`` and ``ef = e``
    must coincide; a violation raises :class:`InconsistencyError`.
    """
    em, fm = as_matrix(e), as_matrix(f)
    if not (is_idempotent(em, tol) and is_idempotent(fm, tol)):
        raise LpError("idempotent_order needs two idempotents")
    oracle = oracle or make_oracle()
    pe = as_exponent(p)
    fe = bool(np.abs(fm @ em - em).max() <= tol)
    ef = bool(np.abs(em @ fm - em).max() <= tol)
    one = identity(em.shape[0])
    if oracle(em, pe.p) <= 1 + NORM_TOL and oracle(fm, pe.p) <= 1 + NORM_TOL:
        pre = "contractive"
    elif oracle(one - em, pe.p) <= 1 + NORM_TOL and oracle(one - fm, pe.p) <= 1 + NORM_TOL:
        pre = "real_positive"
    else:
        pre = None
    if pre is not None and fe != ef:
        raise InconsistencyError(f"fe = e is {fe} but ef = e is {ef} for {pre} idempotents")
    return OrderReport(fe, ef, fe and ef, fe, pre)


def classify(a, p, oracle: NormOracle | None = None, corroborate: bool = False) -> ElementReport:
    """Run every element test on ``a`` at exponent ``p``."""
    m = as_matrix(a)
    pe = as_exponent(p).require_interior()
    oracle = oracle or make_oracle()
    n = m.shape[0]
    idem = is_idempotent(m)
    norm = oracle(m, pe.p)
    norm_1m = oracle(identity(n) - m, pe.p)
    contractive = norm <= 1.0 + NORM_TOL
    fa = norm_1m <= 1.0 + NORM_TOL
    rp = is_real_positive(m, pe, oracle, corroborate=corroborate)
    herm = is_hermitian(m, pe, oracle)
    if pe.p == 2.0:
        iso = None
        unitary = bool(np.abs(m.conj().T @ m - identity(n)).max() <= STRUCTURE_TOL)
    else:
        iso = is_invertible_isometry(m, pe, oracle)
        unitary = iso is not None
    return ElementReport(
        p=pe.p,
        is_idempotent=idem,
        is_contractive=contractive,
        is_bicontractive=idem and contractive and fa,
        is_real_positive=rp.real_positive,
        in_FA=fa,
        is_hermitian=herm.hermitian,
        is_invertible_isometry=unitary,
        norm=norm,
        norm_one_minus=norm_1m,
        isometry=iso,
        hermitian=herm,
        real_positive=rp,
        p2_fallback=pe.p == 2.0,
    )
