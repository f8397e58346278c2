"""Run every config in configs/ and collect the summary CSVs under one directory.

    python scripts/run_configs.py --out results --threads 4
    python scripts/run_configs.py --only table1 blocks --replicas 50

Each experiment keeps its own journal, so an interrupted run picks up where it
stopped.
"""
import argparse
import sys
import time
from pathlib import Path

from rqubo.cli import parse_config, run_experiment
from rqubo.solvers import worker_count

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", default=str(ROOT / "configs"))
    ap.add_argument("--out", default="results")
    ap.add_argument("--only", nargs="*", default=None, help="config stems to run")
    ap.add_argument("--replicas", type=int, default=None)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    paths = sorted(Path(args.configs).glob("*.cfg"))
    if args.only:
        paths = [p for p in paths if p.stem in args.only]
    for path in paths:
        cfg = parse_config(path.read_text(encoding="utf-8"))
        if args.replicas:
            cfg.replicas = args.replicas
        t0 = time.perf_counter()
        out = Path(args.out) / path.stem
        rows = run_experiment(cfg, out, worker_count(args.threads))
        print(f"{path.stem}: {len(rows)} rows -> {out} ({time.perf_counter() - t0:.0f}s)",
              file=sys.stderr)


if __name__ == "__main__":
    main()
