#!/usr/bin/env python3
"""Render a running-time summary table from one benchmark results CSV.

    plot_summary.py --in results.csv --out table.svg

Percentiles use the nearest-rank definition.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from profile_plots import render_summary, runtime_summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        summary = runtime_summary(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for key, val in summary.items():
        print(f"{key} = {val}")
    render_summary(args.out, summary)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
