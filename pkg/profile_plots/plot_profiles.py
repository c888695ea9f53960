#!/usr/bin/env python3
"""Render a performance profile from benchmark results CSVs.

    plot_profiles.py --in a.csv b.csv --labels A B --out profile.svg

Writes the figure plus a profile CSV next to it (same stem, .csv suffix).
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from profile_plots import dolan_more, render_profiles, write_profile_csv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True)
    parser.add_argument("--labels", nargs="+", required=True)
    parser.add_argument("--out", required=True, help="figure path (.svg or .png)")
    parser.add_argument("--linear-tau", action="store_true", help="linear tau axis")
    args = parser.parse_args(argv)
    try:
        labels, profiles = dolan_more(args.inputs, args.labels)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    render_profiles(out, labels, profiles, log_tau=not args.linear_tau)
    csv_out = out.with_suffix(".csv")
    write_profile_csv(csv_out, labels, profiles)
    print(f"wrote {out} and {csv_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
