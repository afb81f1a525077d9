"""Exhaustively compare canonical labels with the brute-force permutation oracle.

Usage: python scripts/verify_labeler.py --nodes 5 --directed [--trait node|edge]

Prints case and class counts plus every mismatch. Slow for 5-node directed
graphs (tens of millions of transitions); meant to be run once, not in CI.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from exhaustive import EDGE_COLOR, NODE_COLOR, Agreement, check, transitions  # noqa: E402


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--trait", choices=["node", "edge"])
    p.add_argument("--decode-every", type=int, default=50)
    args = p.parse_args(argv)
    trait = {"node": NODE_COLOR, "edge": EDGE_COLOR, None: None}[args.trait]
    start = time.perf_counter()
    agreement = Agreement()
    # one n at a time keeps the label tables small
    check(transitions(args.nodes, args.directed, trait), (trait,) if trait else (), agreement,
          decode_every=args.decode_every)
    elapsed = time.perf_counter() - start
    print(f"nodes={args.nodes} directed={args.directed} trait={args.trait} cases={agreement.cases} "
          f"classes={agreement.classes} mismatches={len(agreement.mismatches)} seconds={elapsed:.0f}")
    for m in agreement.mismatches[:20]:
        print("MISMATCH", m)
    return 1 if agreement.mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
