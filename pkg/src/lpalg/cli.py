"""Command-line front end: ``norm``, ``classify``, ``verify`` and ``sweep``.

Exit status is 0 when everything passes, 1 when a verification check fails
and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import gallery as gal
from .core import LpError, as_exponent, identity, load_matrix
from .elements import classify
from .experiments import REGISTRY, ExperimentParams, dumps17, run_experiment
from .pnorm import make_oracle, pnorm, pnorm_oracle, quotient_seminorm
from .transforms import cayley

FAMILIES = ("en", "mp2-quot", "g", "cayley", "klein")
QUANTITIES = ("norm", "norm-one-minus", "norm-one-minus-two", "quotient", "g")


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            k = int(round((b - a) / step))
            return np.round(a + step * np.arange(k + 1), 10)
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"bad p-grid {text!r}; expected a:b:step") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _digest(v) -> str:
    v = np.atleast_1d(np.asarray(v))
    return " ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in v.astype(np.complex128))


# ---------------------------------------------------------------------------


def cmd_norm(args) -> int:
    if not args.matrix:
        raise UsageError("norm needs --matrix")
    m = load_matrix(args.matrix)
    kw = {}
    if args.method == "oracle" or args.method == "bracket":
        kw = {"restarts": args.restarts, "seed": args.seed}
    est = pnorm(m, args.p, method=args.method, **kw)
    if args.json:
        _emit(dumps17(est.to_dict()), args.out)
    else:
        lines = [
            f"value     {est.value:.12g}",
            f"witness   {_digest(est.witness)}",
            f"method    {est.method}",
            f"converged {est.converged}",
        ]
        if est.upper is not None:
            lines.append(f"upper     {est.upper:.12g}")
        _emit("\n".join(lines), args.out)
    return 0


def cmd_classify(args) -> int:
    if not args.matrix:
        raise UsageError("classify needs --matrix")
    m = load_matrix(args.matrix)
    rep = classify(m, args.p, make_oracle(args.restarts, args.seed))
    if args.json:
        _emit(dumps17(rep.to_dict()), args.out)
    else:
        _emit("\n".join(f"{k:24s}{v}" for k, v in rep.to_dict().items() if k != "tolerances"), args.out)
    return 0


def cmd_verify(args) -> int:
    params = ExperimentParams(
        p=args.p_given,
        p_grid=tuple(parse_grid(args.p_grid)) if args.p_grid else None,
        n=args.n,
        seed=args.seed,
        restarts=args.restarts,
        count=args.count,
    )
    res = run_experiment(args.experiment, params)
    if args.json or args.out:
        _emit(dumps17(res.to_dict()), args.out)
    if not args.json:
        for c in res.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  (actual {c.actual}, expected {c.relation} {c.expected}, tol {c.tol:g})")
        print(f"{res.experiment}: {'PASS' if res.passed else 'FAIL'} in {res.runtime_ms} ms")
    if args.csv and res.table:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(res.table[0]))
            w.writeheader()
            w.writerows(res.table)
    return 0 if res.passed else 1


def sweep_rows(family: str, quantity: str, n: int, grid, restarts=None, seed=0) -> list[tuple[float, float, str]]:
    """One ``(p, value, witness)`` row per grid point."""
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if quantity not in QUANTITIES:
        raise UsageError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    if family == "g" or quantity == "g":
        if not (family == "g" and quantity == "g"):
            raise UsageError("quantity g goes with family g")
        return [(r.p, r.g, f"{r.dg:.17g}") for r in gal.g_curve(n, grid)]
    if family == "en":
        base = gal.make_en(n)
    elif family == "mp2-quot":
        base = gal.make_dft_family(3, check_p=())["f_1"]
    elif family == "cayley":
        base = cayley(gal.make_cayley_counterexample(check_p=()))
    else:
        base = gal.make_klein_pair(check_p=())["e_plus_f_minus_ef"]
    one = identity(base.shape[0])
    if quantity == "quotient" and family != "mp2-quot":
        raise UsageError("quantity quotient needs family mp2-quot")
    m = {
        "norm": base,
        "norm-one-minus": one - base,
        "norm-one-minus-two": one - 2 * base,
        "quotient": one - 2 * base,
    }[quantity]
    rows = []
    oracle = make_oracle(restarts, seed)
    for p in grid:
        p = float(p)
        if family == "mp2-quot":
            r = quotient_seminorm(m, [gal.make_en(3)], p, oracle=oracle, seed=seed)
            rows.append((p, r.value, _digest(r.minimizer)))
        else:
            est = pnorm_oracle(m, p, restarts=restarts, seed=seed)
            rows.append((p, est.value, _digest(est.witness)))
    return rows


def cmd_sweep(args) -> int:
    grid = parse_grid(args.p_grid) if args.p_grid else gal.default_p_grid()
    for p in grid:
        as_exponent(p).require_interior()
    rows = sweep_rows(args.family, args.quantity, args.n or 3, grid, args.restarts, args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "value", "witness"])
    for p, v, wit in rows:
        w.writerow([f"{p:.17g}", f"{v:.17g}", wit])
    target = args.csv or args.out
    if target:
        Path(target).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpalg", description="Norms, classification and verification experiments for matrix algebras on l^p.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="exponent in [1, inf]")
    common.add_argument("--p-grid", default=None, help="a:b:step grid of exponents")
    common.add_argument("--n", type=int, default=None, help="matrix size for families")
    common.add_argument("--matrix", default=None, help="path to a matrix JSON file")
    common.add_argument("--method", choices=("oracle", "power", "bracket", "svd"), default="oracle")
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=None, help="sample count for suites")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--csv", default=None, help="write CSV to PATH")
    common.add_argument("--out", default=None, help="write output to PATH")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("norm", parents=[common], help="estimate ||A||_p")
    sub.add_parser("classify", parents=[common], help="element classification report")
    v = sub.add_parser("verify", parents=[common], help="run a named experiment")
    v.add_argument("experiment", choices=sorted(REGISTRY))
    s = sub.add_parser("sweep", parents=[common], help="CSV of a quantity over a p-grid")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--quantity", choices=QUANTITIES, default="norm")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.p_given = args.p
    if args.p is None:
        args.p = 4.0
    handlers = {"norm": cmd_norm, "classify": cmd_classify, "verify": cmd_verify, "sweep": cmd_sweep}
    try:
        return handlers[args.verb](args)
    except (UsageError, LpError, OSError) as exc:
        print(f"lpalg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
