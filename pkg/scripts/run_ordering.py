"""Compare the full model with early fusion and the unimodal baselines over several seeds.

    python3 scripts/run_ordering.py --seeds 0 1 2 3 4 --kinds full early image-only
"""

from __future__ import annotations

import argparse
import json
import time

from fashsent.experiments import KINDS, OrderingSetup, run_kind
from fashsent.metrics import aggregate_runs


def main(argv=None) -> dict:
    d = OrderingSetup()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=d.n)
    p.add_argument("--seeds", type=int, nargs="+", default=list(d.seeds))
    p.add_argument("--epochs", type=int, default=d.epochs)
    p.add_argument("--signal", type=float, default=d.signal)
    p.add_argument("--modality", type=float, nargs=3, default=list(d.modality_strength), metavar=("V", "T", "A"))
    p.add_argument("--preset", default=d.preset, choices=("paper", "small"))
    p.add_argument("--kinds", nargs="+", default=list(KINDS), choices=KINDS)
    p.add_argument("--json", help="write mean accuracies here")
    args = p.parse_args(argv)
    setup = OrderingSetup(args.n, tuple(args.seeds), args.signal, tuple(args.modality), args.epochs, args.preset)

    summary = {}
    for kind in args.kinds:
        reports = []
        for seed in setup.seeds:
            t0 = time.time()
            report, log = run_kind(kind, seed, setup)
            reports.append(report)
            print(f"{kind:<11s} seed {seed}: test acc {report.accuracy:.4f} "
                  f"(best val {log.best_val_accuracy:.4f} @ {log.best_epoch}, {time.time() - t0:.0f}s)", flush=True)
        summary[kind] = sum(r.accuracy for r in reports) / len(reports)
        if len(reports) > 1:
            print(f"{kind:<11s} " + aggregate_runs(reports).lines()[0], flush=True)
    print(json.dumps(summary, indent=2))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    return summary


if __name__ == "__main__":
    main()
