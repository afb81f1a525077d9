"""Download the benchmark graphs into ``data/`` (or ``$SST_DATA_DIR``).

    python scripts/fetch_datasets.py            # everything
    python scripts/fetch_datasets.py cora_ml    # one dataset

SNAP files are kept gzipped as published. The LINQS citation archives are
unpacked and their ``.cites`` lists (``cited citing``) rewritten as
``citing cited`` edge lists. SHA-256 digests are printed after each download;
copy them into ``SHA256`` to pin a verified copy.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import os
import sys
import tarfile
import urllib.request
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(os.environ.get("SST_DATA_DIR", ROOT / "data"))

SOURCES = {
    "email-Eu-core": ("https://snap.stanford.edu/data/email-Eu-core.txt.gz", "email-Eu-core.txt.gz"),
    "email-Eu-core-temporal": ("https://snap.stanford.edu/data/email-Eu-core-temporal.txt.gz",
                               "email-Eu-core-temporal.txt.gz"),
    "CollegeMsg": ("https://snap.stanford.edu/data/CollegeMsg.txt.gz", "CollegeMsg.txt.gz"),
    "cora_ml": ("https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz", "cora_ml.txt"),
    "citeseer": ("https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz", "citeseer.txt"),
}

# Filled in once a download has been checked by hand; None means "not pinned".
SHA256: dict[str, str | None] = {name: None for name in SOURCES}


def download(url: str) -> bytes:
    with urllib.request.urlopen(url, timeout=120) as resp:
        return resp.read()


def cites_to_edges(archive: bytes) -> str:
    """Pull the ``.cites`` member out of a LINQS archive, flipping to citing -> cited."""
    with tarfile.open(fileobj=io.BytesIO(archive), mode="r:gz") as tar:
        member = next(m for m in tar.getmembers() if m.name.endswith(".cites"))
        text = tar.extractfile(member).read().decode()
    lines = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 2:
            cited, citing = parts
            lines.append(f"{citing} {cited}\n")
    return "".join(lines)


def fetch(name: str, force: bool = False) -> Path:
    url, filename = SOURCES[name]
    target = DATA_DIR / filename
    if target.exists() and not force:
        print(f"{name}: already present at {target}")
        return target
    print(f"{name}: downloading {url}")
    raw = download(url)
    digest = hashlib.sha256(raw).hexdigest()
    pinned = SHA256.get(name)
    if pinned and pinned != digest:
        raise SystemExit(f"{name}: checksum mismatch, got {digest}, expected {pinned}")
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    if url.endswith(".tgz"):
        target.write_text(cites_to_edges(raw))
    else:
        target.write_bytes(raw)
    print(f"{name}: sha256 {digest}{'' if pinned else ' (unpinned)'} -> {target}")
    return target


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description="download benchmark graphs")
    p.add_argument("names", nargs="*", help=f"subset of {', '.join(sorted(SOURCES))}")
    p.add_argument("--force", action="store_true", help="download even if the file exists")
    args = p.parse_args(argv)
    names = args.names or sorted(SOURCES)
    unknown = [n for n in names if n not in SOURCES]
    if unknown:
        p.error(f"unknown dataset(s): {', '.join(unknown)}")
    failed = []
    for name in names:
        try:
            fetch(name, args.force)
        except OSError as exc:
            print(f"{name}: failed: {exc}", file=sys.stderr)
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
