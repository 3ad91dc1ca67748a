"""Explicit matrix families with their defining identities as self-checks.

Each constructor verifies the algebraic relations its matrices are supposed
to satisfy and raises :class:`GalleryError` if any fails.  Norm relations are
checked with the oracle at the exponents in ``check_p``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import LpError, as_exponent, identity, matrix_to_json
from .pnorm import NORM_TOL, NormOracle, make_oracle

EXACT_TOL = 1e-12
CHECK_P = (1.5, 4.0)


class GalleryError(LpError):
    """A gallery construction failed one of its own identities."""


@dataclass
class IdentityCheck:
    name: str
    residual: float
    tolerance: float
    kind: str = "exact"

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class GalleryItem:
    name: str
    matrices: dict[str, np.ndarray]
    identities: list[IdentityCheck] = field(default_factory=list)

    def __getitem__(self, key: str) -> np.ndarray:
        return self.matrices[key]

    def check(self, name: str, residual: float, tolerance: float = EXACT_TOL, kind: str = "exact"):
        c = IdentityCheck(name, float(residual), tolerance, kind)
        self.identities.append(c)
        if not c.passed:
            raise GalleryError(f"{self.name}: {name} failed (residual {residual:.3e} > {tolerance:.0e})")

    def manifest(self) -> dict:
        return {
            "name": self.name,
            "matrices": sorted(self.matrices),
            "identities": [{"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "kind": c.kind} for c in self.identities],
        }

    def save(self, directory) -> Path:
        """Write one matrix JSON file per matrix plus ``manifest.json``."""
        d = Path(directory) / self.name
        d.mkdir(parents=True, exist_ok=True)
        for key, m in self.matrices.items():
            (d / f"{key}.json").write_text(json.dumps(matrix_to_json(m)))
        (d / "manifest.json").write_text(json.dumps(self.manifest(), indent=2))
        return d


def _dist(a, b) -> float:
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def _is_idem(m) -> float:
    return _dist(m @ m, m)


# ---------------------------------------------------------------------------


def make_en(n: int) -> np.ndarray:
    """The n x n matrix with every entry 1/n."""
    if n < 2:
        raise LpError("e_n needs n >= 2")
    return np.full((n, n), 1.0 / n, dtype=np.complex128)


def make_dft_family(n: int, check_p: Sequence[float] = CHECK_P, oracle: NormOracle | None = None) -> GalleryItem:
    """``s = diag(zeta^k)``, the DFT unitary ``u`` and ``f_k = s^k e_n s^-k``."""
    if n < 2:
        raise LpError("the DFT family needs n >= 2")
    oracle = oracle or make_oracle()
    zeta = np.exp(2j * np.pi / n)
    powers = zeta ** np.arange(n)
    s = np.diag(powers)
    sinv = np.diag(powers.conj())
    e = make_en(n)
    u = np.stack([np.sqrt(1.0 / n) * powers**k for k in range(n)], axis=1)
    fs = [np.linalg.matrix_power(s, k) @ e @ np.linalg.matrix_power(sinv, k) for k in range(n)]
    item = GalleryItem(f"dft-{n}", {"s": s, "u": u, **{f"f_{k}": f for k, f in enumerate(fs)}})
    one = identity(n)
    item.check("u unitary", _dist(u.conj().T @ u, one))
    item.check("u* e_n u = diag(1,0,..)", _dist(u.conj().T @ e @ u, np.diag(np.eye(n)[0])))
    for k, f in enumerate(fs):
        item.check(f"f_{k} idempotent", _is_idem(f))
        item.check(f"u* f_{k} u = E_kk", _dist(u.conj().T @ f @ u, np.diag(np.eye(n)[k])))
        for j in range(k):
            item.check(f"f_{j} f_{k} = 0", max(np.abs(fs[j] @ f).max(), np.abs(f @ fs[j]).max()))
    item.check("sum f_k = 1", _dist(sum(fs), one))
    for p in check_p:
        for k, f in enumerate(fs):
            item.check(f"||f_{k}||_{p:g} <= 1", max(0.0, oracle(f, p) - 1.0), NORM_TOL, "oracle")
    return item


KLEIN_S = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)
KLEIN_T = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.complex128)


def make_klein_pair(check_p: Sequence[float] = CHECK_P, oracle: NormOracle | None = None) -> GalleryItem:
    """Two commuting order-2 permutations of four points and their averaging idempotents."""
    oracle = oracle or make_oracle()
    one = identity(4)
    s, t = KLEIN_S.copy(), KLEIN_T.copy()
    e, f = (one + s) / 2, (one + t) / 2
    w = np.diag([1.0, -1.0, -1.0, 1.0]).astype(np.complex128)
    g = e + f - e @ f
    item = GalleryItem("klein-pair", {"s": s, "t": t, "e": e, "f": f, "w": w, "e_plus_f_minus_ef": g})
    item.check("s^2 = 1", _dist(s @ s, one))
    item.check("t^2 = 1", _dist(t @ t, one))
    item.check("st = ts", _dist(s @ t, t @ s))
    item.check("ef = e_4", _dist(e @ f, make_en(4)))
    item.check("e + f - ef idempotent", _is_idem(g))
    item.check("w (1 - (e + f - ef)) w^-1 = e_4", _dist(w @ (one - g) @ np.linalg.inv(w), make_en(4)))
    for p in check_p:
        for key, m in (("e", e), ("f", f)):
            worst = max(oracle(m, p), oracle(one - m, p)) - 1.0
            item.check(f"{key} bicontractive at p={p:g}", max(0.0, worst), NORM_TOL, "oracle")
    return item


def make_cayley_counterexample(check_p: Sequence[float] = CHECK_P, oracle: NormOracle | None = None) -> np.ndarray:
    """``x = 2 e_2 - i 1``: accretive, yet its Cayley transform is not contractive for p near 1."""
    from .elements import is_real_positive

    x = 2 * make_en(2) - 1j * identity(2)
    for p in check_p:
        rp = is_real_positive(x, p, oracle, corroborate=False)
        if not rp:
            raise GalleryError(f"2 e_2 - i is not accretive at p={p:g} (semigroup max {rp.max_semigroup_norm:.9f})")
    return x


def cayley_counterexample_value(p: float) -> float:
    """Closed form of ``||kappa(x) (1, 0)||_p`` for the Cayley counterexample."""
    return (10.0 ** (p / 2) + 5.0 ** (p / 2)) ** (1.0 / p) / 5.0


def u_block(lam: complex, mu: complex, x) -> np.ndarray:
    """``[[lam 1, x], [0, mu 1]]`` acting on l^p_n (+)_p l^p_n."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n] = lam * np.eye(n)
    out[:n, n:] = x
    out[n:, n:] = mu * np.eye(n)
    return out


def u_reduced(lam: complex, mu: complex, xnorm: float) -> np.ndarray:
    return np.array([[abs(lam), xnorm], [0.0, abs(mu)]], dtype=np.complex128)


def u_construction_norm(lam: complex, mu: complex, xnorm: float, p, oracle: NormOracle | None = None) -> float:
    """``||[[|lam|, xnorm], [0, |mu|]]||`` in M_2^p: the norm of any block
    ``[[lam, x], [0, mu]]`` with ``||x|| = xnorm``."""
    if xnorm < 0:
        raise LpError("xnorm must be nonnegative")
    oracle = oracle or make_oracle()
    return oracle(u_reduced(lam, mu, xnorm), as_exponent(p).p)


def u_construction_validate(lam: complex, mu: complex, x, p, oracle: NormOracle | None = None) -> tuple[float, float]:
    """(norm of the full block matrix, reduced 2x2 norm), both by oracle."""
    oracle = oracle or make_oracle()
    pp = as_exponent(p).p
    xnorm = oracle(np.asarray(x, dtype=np.complex128), pp)
    return oracle(u_block(lam, mu, x), pp), u_construction_norm(lam, mu, xnorm, pp, oracle)


MP2_THRESHOLD = math.log(4.0) / (math.log(4.0) - math.log(3.0))


def mp2_lower_bound(p: float) -> float:
    """``(2 * 3^(-q/2))^(1/q)``: the first-row bound for ``||1 - 2f||`` in the quotient."""
    q = as_exponent(p).q
    return (2.0 * 3.0 ** (-q / 2.0)) ** (1.0 / q)


def make_mp2_quotient(check_p: Sequence[float] = CHECK_P, oracle: NormOracle | None = None) -> GalleryItem:
    """The span of the n = 3 DFT idempotents with ideal ``C e_3``."""
    fam = make_dft_family(3, check_p, oracle)
    item = GalleryItem("mp2-quotient", {"f_0": fam["f_0"], "f_1": fam["f_1"], "f_2": fam["f_2"], "e_3": make_en(3)})
    item.identities.extend(fam.identities)
    item.check("f_0 = e_3", _dist(fam["f_0"], make_en(3)))
    return item


def mp2_quotient_norms(p, oracle: NormOracle | None = None, seed: int = 0) -> dict:
    """Quotient norms of ``f``, ``1 - f`` and ``1 - 2f`` where ``f`` is the image of ``f_1``."""
    from .pnorm import quotient_seminorm

    oracle = oracle or make_oracle()
    pp = as_exponent(p).p
    f1 = _dft3()["f_1"]
    one = identity(3)
    j = [make_en(3)]
    out = {}
    for key, m in (("f", f1), ("one_minus_f", one - f1), ("one_minus_2f", one - 2 * f1)):
        r = quotient_seminorm(m, j, pp, oracle=oracle, seed=seed)
        out[key] = r.value
    out["lower_bound"] = mp2_lower_bound(pp)
    return out


def _dft3() -> GalleryItem:
    return make_dft_family(3, check_p=())


def make_unitization_pair(check_p: Sequence[float] = CHECK_P, oracle: NormOracle | None = None) -> GalleryItem:
    """``e = e_2`` and ``f = diag(1, 0)``: both bicontractive, but only ``f`` is hermitian."""
    oracle = oracle or make_oracle()
    e = make_en(2)
    f = np.diag([1.0, 0.0]).astype(np.complex128)
    item = GalleryItem("unitization-pair", {"e": e, "f": f})
    item.check("e idempotent", _is_idem(e))
    item.check("f idempotent", _is_idem(f))
    for p in check_p:
        for key, m in (("e", e), ("f", f)):
            worst = max(oracle(m, p), oracle(identity(2) - m, p)) - 1.0
            item.check(f"{key} bicontractive at p={p:g}", max(0.0, worst), NORM_TOL, "oracle")
    return item


def idempotents_of_span(f: np.ndarray) -> list[np.ndarray]:
    """The four idempotents ``0, f, 1 - f, 1`` of ``C f + C 1`` for an idempotent ``f``."""
    one = identity(f.shape[0])
    return [0 * one, f.copy(), one - f, one]


@dataclass
class GCurveRow:
    p: float
    g: float
    dg: float


def g_curve(n: int, p_grid) -> list[GCurveRow]:
    """``g(p) = (1 - 2/n)^p + (n - 1)(2/n)^p`` and its derivative, checked decreasing with ``g(2) = 1``."""
    if n < 3:
        raise LpError("g_curve needs n >= 3")
    a, b = 1.0 - 2.0 / n, 2.0 / n
    rows = []
    for p in p_grid:
        p = float(p)
        if p < 1:
            raise LpError("g_curve grid must lie in [1, inf)")
        g = a**p + (n - 1) * b**p
        dg = a**p * math.log(a) + (n - 1) * b**p * math.log(b)
        if dg >= 0:
            raise GalleryError(f"g'({p}) = {dg} is not negative")
        rows.append(GCurveRow(p, g, dg))
    g2 = a**2 + (n - 1) * b**2
    if abs(g2 - 1.0) > EXACT_TOL:
        raise GalleryError(f"g(2) = {g2} != 1")
    return rows


def default_p_grid(lo: float = 1.1, hi: float = 6.0, step: float = 0.1) -> np.ndarray:
    """``lo:hi:step`` with p = 2 always present."""
    k = int(round((hi - lo) / step))
    grid = np.round(lo + step * np.arange(k + 1), 10)
    if lo <= 2.0 <= hi and not np.any(grid == 2.0):
        grid = np.sort(np.append(grid, 2.0))
    return grid


GALLERY: dict[str, Callable[[], object]] = {
    "dft-3": lambda: make_dft_family(3),
    "klein-pair": make_klein_pair,
    "mp2-quotient": make_mp2_quotient,
    "unitization-pair": make_unitization_pair,
}
