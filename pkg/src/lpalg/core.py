"""Dense complex linear algebra and elementary l^p primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
and :func:`as_vector` validate and coerce.  Exponents are carried by
:class:`PExponent`, but every public function also accepts a bare float.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

# general routines; oracle-grade routines are capped separately in pnorm
MAX_DIM = 256


class LpError(ValueError):
    """Raised for invalid inputs to the lpalg routines."""


class BranchCutError(LpError):
    """A matrix function was requested at an eigenvalue on its branch cut."""

    def __init__(self, eigenvalue: complex, message: str = ""):
        self.eigenvalue = complex(eigenvalue)
        super().__init__(message or f"eigenvalue {self.eigenvalue} lies on the branch cut")


@dataclass(frozen=True)
class PExponent:
    """An exponent ``p`` in ``[1, inf]`` together with its conjugate ``q``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise LpError(f"exponent must lie in [1, inf], got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        p = self.p
        if p == 1.0:
            return math.inf
        if math.isinf(p):
            return 1.0
        return p / (p - 1.0)

    @property
    def is_interior(self) -> bool:
        return 1.0 < self.p < math.inf

    def conjugate(self) -> "PExponent":
        return PExponent(self.q)

    def require_interior(self) -> "PExponent":
        if not self.is_interior:
            raise LpError(f"this operation needs p in (1, inf), got p={self.p}")
        return self

    def __float__(self) -> float:
        return self.p


def as_exponent(p: float | PExponent) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


def as_matrix(a, max_dim: int = MAX_DIM) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise LpError(f"expected a nonempty square matrix, got shape {m.shape}")
    if m.shape[0] > max_dim:
        raise LpError(f"dimension {m.shape[0]} exceeds cap {max_dim}")
    if not np.all(np.isfinite(m)):
        raise LpError("matrix has non-finite entries")
    return m


def as_vector(v) -> np.ndarray:
    x = np.array(v, dtype=np.complex128)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size < 1:
        raise LpError(f"expected a nonempty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise LpError("vector has non-finite entries")
    return x


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def vector_p_norm(v, p: float | PExponent) -> float:
    """(sum |v_i|^p)^(1/p), or max |v_i| for p = inf."""
    x = as_vector(v)
    pp = as_exponent(p).p
    a = np.abs(x)
    if math.isinf(pp):
        return float(a.max())
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # rescale so large p does not overflow
    return float(scale * np.sum((a / scale) ** pp) ** (1.0 / pp))


def duality_map(v, p: float | PExponent) -> np.ndarray:
    """The unique norming functional of ``v`` in l^q.

    Returns ``eta`` with ``eta_i = conj(v_i)|v_i|^(p-2) / ||v||_p^(p-1)``, so that
    ``sum(v * eta) == ||v||_p`` and ``||eta||_q == 1``.  The pairing used
    throughout is bilinear: ``<v, eta> = sum_i v_i eta_i``.
    """
    x = as_vector(v)
    pe = as_exponent(p).require_interior()
    nrm = vector_p_norm(x, pe)
    if nrm == 0.0:
        raise LpError("duality map is undefined at the zero vector")
    u = x / nrm
    a = np.abs(u)
    out = np.zeros_like(u)
    nz = a > 0
    out[nz] = np.conj(u[nz]) * a[nz] ** (pe.p - 2.0)
    return out


def pairing(v, eta) -> complex:
    """Bilinear pairing ``sum_i v_i eta_i`` between l^p and l^q."""
    return complex(np.sum(as_vector(v) * as_vector(eta)))


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring with Pade approximants."""
    return scipy.linalg.expm(as_matrix(a))


def endpoint_norm(a, p: float | PExponent) -> float:
    """Exact operator norm for p = 1 (max column sum) or p = inf (max row sum)."""
    m = as_matrix(a)
    pp = as_exponent(p).p
    if pp == 1.0:
        return float(np.abs(m).sum(axis=0).max())
    if math.isinf(pp):
        return float(np.abs(m).sum(axis=1).max())
    raise LpError("closed-form norms exist only for p in {1, inf}")


def spectral_norm(a) -> float:
    """Largest singular value: the exact l^2 operator norm."""
    return float(np.linalg.norm(as_matrix(a), 2))


def numerical_rank(a, rtol: float = 1e-9) -> int:
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * max(1.0, s[0])))


# ---------------------------------------------------------------------------
# Matrix functions


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function with the data Schur-Parlett evaluation needs.

    ``taylor(sigma, k)`` returns ``f^(j)(sigma) / j!`` for ``j = 0..k-1``.
    ``on_cut(z)`` flags eigenvalues where ``f`` is not analytic.  When
    ``zero_value`` is not None, a cluster of eigenvalues at the origin is sent
    to ``zero_value * I`` (used for ``0^t := 0`` on a semisimple kernel).
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    taylor: Callable[[complex, int], np.ndarray]
    on_cut: Callable[[complex], bool] = lambda z: False
    zero_value: complex | None = None


def _identity_taylor(sigma, k):
    c = np.zeros(k, dtype=np.complex128)
    c[0] = sigma
    if k > 1:
        c[1] = 1.0
    return c


IDENTITY_FN = ScalarFunction("identity", lambda z: np.asarray(z, dtype=np.complex128), _identity_taylor)


def _exp_taylor(sigma, k):
    return np.exp(sigma) / np.array([math.factorial(j) for j in range(k)], dtype=float)


EXP_FN = ScalarFunction("exp", np.exp, _exp_taylor)


def power_function(t: float, cut_tol: float = 1e-12) -> ScalarFunction:
    """Principal branch of ``z -> z^t`` with ``0^t := 0``."""
    t = float(t)

    def value(z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros_like(z)
        nz = z != 0
        out[nz] = np.exp(t * np.log(z[nz]))
        return out

    def taylor(sigma, k):
        c = np.empty(k, dtype=np.complex128)
        base = complex(np.exp(t * np.log(sigma)))
        coef = 1.0 + 0j
        for j in range(k):
            c[j] = coef * base / sigma**j
            coef *= (t - j) / (j + 1)
        return c

    def on_cut(z):
        z = complex(z)
        return z.real < 0 and abs(z.imag) <= cut_tol * max(1.0, abs(z))

    return ScalarFunction(f"power({t})", value, taylor, on_cut, zero_value=0.0)


SQRT_FN = power_function(0.5)


def _givens_swap(t: np.ndarray, q: np.ndarray, k: int) -> None:
    """Swap diagonal entries k and k+1 of an upper triangular ``t`` in place."""
    a, b = t[k, k], t[k + 1, k + 1]
    x = t[k, k + 1]
    y = b - a
    r = math.hypot(abs(x), abs(y))
    if r == 0.0:
        return
    c = x / r
    s = y / r
    g = np.array([[np.conj(c), np.conj(s)], [-s, c]], dtype=np.complex128)
    t[k : k + 2, :] = g @ t[k : k + 2, :]
    t[:, k : k + 2] = t[:, k : k + 2] @ g.conj().T
    q[:, k : k + 2] = q[:, k : k + 2] @ g.conj().T
    t[k + 1, k] = 0.0


def _cluster(eigs: np.ndarray, delta: float) -> np.ndarray:
    """Group eigenvalues whose chains of neighbours lie within ``delta``."""
    n = len(eigs)
    labels = np.arange(n)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= delta and labels[i] != labels[j]:
                old = labels[j]
                labels[labels == old] = labels[i]
    _, dense = np.unique(labels, return_inverse=True)
    return dense


def _reorder_schur(t, q, labels):
    """Bubble-sort the Schur form so each cluster is contiguous."""
    labels = labels.copy()
    n = len(labels)
    changed = True
    while changed:
        changed = False
        for k in range(n - 1):
            if labels[k] > labels[k + 1]:
                _givens_swap(t, q, k)
                labels[k], labels[k + 1] = labels[k + 1], labels[k]
                changed = True
    return labels


def _block_function(tb: np.ndarray, f: ScalarFunction, zero_tol: float) -> np.ndarray:
    m = tb.shape[0]
    sigma = complex(np.trace(tb) / m)
    if f.zero_value is not None and abs(sigma) <= zero_tol:
        return f.zero_value * np.eye(m, dtype=np.complex128)
    if m == 1:
        return f.value(tb.reshape(1)).reshape(1, 1)
    nmat = tb - sigma * np.eye(m)
    # Taylor expansion about the cluster mean; nilpotent-ish part converges fast
    kmax = 60
    coeffs = f.taylor(sigma, kmax)
    out = coeffs[0] * np.eye(m, dtype=np.complex128)
    power = np.eye(m, dtype=np.complex128)
    for j in range(1, kmax):
        power = power @ nmat
        term = coeffs[j] * power
        out += term
        if np.abs(term).max() <= 1e-17 * max(1.0, np.abs(out).max()):
            break
    return out


def principal_matrix_function(a, f: ScalarFunction = IDENTITY_FN, delta: float = 0.1, zero_tol: float = 1e-9) -> np.ndarray:
    """Evaluate ``f(a)`` by blocked Schur-Parlett.

    Eigenvalues are clustered (neighbour distance ``delta``), the complex
    Schur form is reordered to make clusters contiguous, each diagonal block
    is evaluated by a Taylor series about its mean, and off-diagonal blocks
    come from the block Parlett recurrence (Sylvester solves).

    Raises :class:`BranchCutError` if an eigenvalue sits on ``f``'s cut, or at
    the origin when ``f`` has no declared value there.
    """
    m = as_matrix(a)
    n = m.shape[0]
    t, q = scipy.linalg.schur(m, output="complex")
    eigs = np.diag(t).copy()
    scale = max(1.0, float(np.abs(eigs).max()))
    for z in eigs:
        if f.on_cut(z) and not (f.zero_value is not None and abs(z) <= zero_tol * scale):
            raise BranchCutError(z)
    labels = _cluster(eigs, delta)
    # clusters at the origin are treated separately when f(0) is prescribed
    if f.zero_value is not None:
        near0 = np.abs(eigs) <= zero_tol * scale
        if near0.any():
            labels = np.where(near0, -1, labels + 1)
            labels = np.unique(labels, return_inverse=True)[1]
    labels = _reorder_schur(t, q, labels)
    starts = [0] + [k for k in range(1, n) if labels[k] != labels[k - 1]] + [n]
    blocks = [slice(starts[i], starts[i + 1]) for i in range(len(starts) - 1)]
    fmat = np.zeros_like(t)
    for b in blocks:
        fmat[b, b] = _block_function(t[b, b], f, zero_tol * scale)
    nb = len(blocks)
    for d in range(1, nb):
        for i in range(nb - d):
            j = i + d
            bi, bj = blocks[i], blocks[j]
            rhs = fmat[bi, bi] @ t[bi, bj] - t[bi, bj] @ fmat[bj, bj]
            for k in range(i + 1, j):
                bk = blocks[k]
                rhs += fmat[bi, bk] @ t[bk, bj] - t[bi, bk] @ fmat[bk, bj]
            fmat[bi, bj] = scipy.linalg.solve_sylvester(t[bi, bi], -t[bj, bj], rhs)
    return q @ fmat @ q.conj().T


def eig_matrix_function(a, f: ScalarFunction) -> tuple[np.ndarray, float]:
    """``V f(D) V^-1`` together with the eigenvector condition number."""
    m = as_matrix(a)
    w, v = np.linalg.eig(m)
    cond = float(np.linalg.cond(v))
    return v @ np.diag(f.value(w)) @ np.linalg.inv(v), cond


# ---------------------------------------------------------------------------
# Matrix JSON


def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    n = m.shape[0]
    return {"rows": n, "cols": n, "data": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    """Strict parse of ``{"rows": n, "cols": n, "data": [[re, im], ...]}``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or set(obj) != {"rows", "cols", "data"}:
        raise LpError("matrix JSON needs exactly the keys rows, cols, data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or isinstance(rows, bool) or isinstance(cols, bool):
        raise LpError("rows and cols must be integers")
    if rows != cols or rows < 1:
        raise LpError(f"matrix must be square and nonempty, got {rows}x{cols}")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise LpError(f"data must hold {rows * cols} entries")
    vals = []
    for entry in data:
        if not isinstance(entry, list) or len(entry) != 2:
            raise LpError("each entry must be a [re, im] pair")
        re, im = entry
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            raise LpError("entries must be numbers")
        vals.append(complex(re, im))
    return as_matrix(np.array(vals).reshape(rows, cols))


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(a, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(a), fh)
