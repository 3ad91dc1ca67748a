"""Run registry experiments and write one JSON report per experiment.

    python3 scripts/run_experiments.py                 # everything
    python3 scripts/run_experiments.py cayley-sweep riesz-thorin --out results
"""

import argparse
import sys
from pathlib import Path

from lpalg.experiments import REGISTRY, ExperimentParams, dumps17, run_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help=f"any of: {', '.join(sorted(REGISTRY))}")
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    unknown = set(args.names) - set(REGISTRY)
    if unknown:
        ap.error(f"unknown experiments: {', '.join(sorted(unknown))}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in args.names or sorted(REGISTRY):
        res = run_experiment(name, ExperimentParams(seed=args.seed))
        (out / f"{name}.json").write_text(dumps17(res.to_dict()) + "\n")
        print(f"{'PASS' if res.passed else 'FAIL'}  {name:18s} {res.runtime_ms / 1000:7.1f} s", flush=True)
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
