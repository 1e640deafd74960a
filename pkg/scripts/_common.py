"""Shared CSV writer for the figure scripts (same formatting as the CLI)."""

import argparse
import os

from loopmaps.cli import fmt


def out_dir(description: str) -> str:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", default="figures", help="directory for the CSV files")
    d = p.parse_args().out_dir
    os.makedirs(d, exist_ok=True)
    return d


def write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(fmt(v) for v in r) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")
