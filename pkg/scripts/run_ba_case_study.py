"""Train the temporal SST model on a preferential-attachment stream and print the top SSTs.

    python scripts/run_ba_case_study.py --n 1000 --m 2 --seed 1 --out runs/ba

Only the training phase is needed for interpretation, so the (slow) 3-hop
evaluation is skipped unless ``--evaluate`` is given.
"""

import argparse
import sys
from pathlib import Path

from sst.counter import default_threads
from sst.generators import barabasi_albert_stream
from sst.io import bucket_stream
from sst.predictor import (TemporalTrainConfig, interpret, run_temporal_lp, to_dot, train_temporal,
                           write_interpretation, write_outputs)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description="preferential-attachment interpretation case study")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--top", type=int, default=12)
    p.add_argument("--out", default="runs/ba")
    p.add_argument("--evaluate", action="store_true", help="also run the full test-bucket evaluation")
    args = p.parse_args(argv)

    stream = barabasi_albert_stream(args.n, args.m, args.seed)
    cfg = TemporalTrainConfig(k=3, seed=args.seed, threads=default_threads())
    out = Path(args.out)
    if args.evaluate:
        result = run_temporal_lp(stream, cfg, f"ba-n{args.n}-m{args.m}")
        write_outputs(result, out, top_dot=args.top)
        rows = result.interpretation
        print(f"auc={result.report.auc:.4f} aupr3={result.report.aupr3:.4f}")
    else:
        model, _ = train_temporal(bucket_stream(stream, cfg.tau), cfg, stream.directed)
        rows = interpret(model)
        (out / "ssts").mkdir(parents=True, exist_ok=True)
        write_interpretation(rows, out / "interpretation.csv")
        model.save(out / "model.json")
        for row in rows[:args.top]:
            (out / "ssts" / f"sst_{row.rank:03d}.dot").write_text(
                to_dot(row.H, f"rank {row.rank} weight {row.weight:+.3f}"))
    for row in rows[:args.top]:
        print(f"{row.rank:3d} {row.weight:+.3f}  {row.decode}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
