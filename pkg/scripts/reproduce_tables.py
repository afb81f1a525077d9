"""Run SST-SVM and the baselines on every benchmark dataset found in ``data/``.

    python scripts/fetch_datasets.py
    python scripts/reproduce_tables.py --seeds 0 1 2 --out runs/tables

Writes one report directory per (dataset, setting, seed) plus ``summary.csv``
with mean and standard deviation of AUC and AUPR3 across seeds.
"""

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from sst.counter import default_threads
from sst.io import load_static, load_temporal
from sst.predictor import (StaticTrainConfig, TemporalTrainConfig, run_static_lp, run_temporal_lp,
                           write_outputs)

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(os.environ.get("SST_DATA_DIR", ROOT / "data"))

# name, file stem, mode, directed, k
SETTINGS = [
    ("Eu-core", "email-Eu-core.txt", "static", False, 3),
    ("Eu-core (D)", "email-Eu-core.txt", "static", True, 3),
    ("Cora ML", "cora_ml.txt", "static", False, 3),
    ("Cora ML (D)", "cora_ml.txt", "static", True, 3),
    ("CiteSeer", "citeseer.txt", "static", False, 4),
    ("CiteSeer (D)", "citeseer.txt", "static", True, 3),
    ("College Messages", "CollegeMsg.txt", "temporal", True, 3),
    ("Eu-core Temporal", "email-Eu-core-temporal.txt", "temporal", True, 3),
]


def locate(stem: str) -> Path | None:
    for suffix in ("", ".gz"):
        p = DATA_DIR / (stem + suffix)
        if p.exists():
            return p
    return None


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description="benchmark tables")
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--only", nargs="*", help="dataset names to run (default: all found)")
    p.add_argument("--out", default="runs/tables")
    args = p.parse_args(argv)
    out = Path(args.out)
    rows = []
    for name, stem, mode, directed, k in SETTINGS:
        if args.only and name not in args.only:
            continue
        path = locate(stem)
        if path is None:
            print(f"{name}: missing {DATA_DIR / stem}, skipped", file=sys.stderr)
            continue
        results = []
        for seed in args.seeds:
            if mode == "static":
                cfg = StaticTrainConfig(k=k, seed=seed, threads=default_threads())
                res = run_static_lp(load_static(path, directed), cfg, name)
            else:
                cfg = TemporalTrainConfig(k=k, seed=seed, threads=default_threads())
                res = run_temporal_lp(load_temporal(path, directed), cfg, name)
            tag = name.lower().replace(" ", "_").replace("(", "").replace(")", "")
            write_outputs(res, out / f"{tag}_seed{seed}")
            results.append(res.report)
            print(f"{name} seed={seed} auc={res.report.auc:.4f} aupr3={res.report.aupr3:.4f}")
        for model in ["sst_svm", "common_neighbors", "random"]:
            if model == "sst_svm":
                aucs = [r.auc for r in results]
                prs = [r.aupr3 for r in results]
            else:
                aucs = [r.baselines[model]["auc"] for r in results]
                prs = [r.baselines[model]["aupr3"] for r in results]
            rows.append([name, f"{model}-{k}" if model == "sst_svm" else model,
                         f"{np.mean(aucs):.4f}", f"{np.std(aucs):.4f}",
                         f"{np.mean(prs):.4f}", f"{np.std(prs):.4f}", len(results)])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "model", "auc_mean", "auc_std", "aupr3_mean", "aupr3_std", "seeds"])
        w.writerows(rows)
    print(f"wrote {out / 'summary.csv'} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
