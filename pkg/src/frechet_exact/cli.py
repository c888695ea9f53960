"""Benchmark harness: dataset ingestion, 32-bit quantization, a pairwise
runner with per-pair time limits, lossless results CSVs, and verification
subcommands.

Exit codes: 0 ok, 1 usage, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import signal
import sys
import time
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from .exact_numbers import EQUAL, ExactRoot
from .geometry import Curve
from .oracles import brute_force_exact, decide
from .refinement import TraceRecord, compute_exact_frechet
from .simplification import LosslessReport, lossless_compute

INT32_MIN, INT32_MAX = -(2**31), 2**31 - 1


class InputError(ValueError):
    """Bad file contents or out-of-range coordinates (exit code 2)."""


# -- parsing and quantization ---------------------------------------------------


def _round_half_away(q: Fraction) -> int:
    num, den = q.numerator, q.denominator
    sign = 1 if num >= 0 else -1
    return sign * ((2 * abs(num) + den) // (2 * den))


def quantize(value: Fraction, scale_pow10: int) -> int:
    scaled = value * Fraction(10) ** scale_pow10
    q = _round_half_away(scaled)
    if not INT32_MIN <= q <= INT32_MAX:
        raise InputError(f"quantized coordinate {q} exceeds 32-bit range")
    return q


def parse_curve_file(path, scale_pow10: int = 0) -> Curve:
    """Whitespace-separated decimal coordinates, one vertex per line.

    Lines starting with ``#`` are comments; coordinates are scaled by the
    decimal power, rounded half away from zero, and range-checked to 32-bit.
    Consecutive duplicate vertices collapse.
    """
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) < 2:
                raise InputError(f"{path}:{lineno}: expected two coordinates")
            try:
                coords = [Fraction(Decimal(tok)) for tok in parts[:2]]
            except Exception as exc:
                raise InputError(f"{path}:{lineno}: bad coordinate ({exc})") from exc
            try:
                points.append(tuple(quantize(c, scale_pow10) for c in coords))
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not points:
        raise InputError(f"{path}: no vertices")
    return Curve.from_points(points)


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    curves: Tuple[str, ...]
    scale_pow10: int

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except Exception as exc:
            raise InputError(f"{path}: bad manifest ({exc})") from exc
        try:
            curves = tuple(str(path.parent / c) for c in raw["curves"])
            return cls(str(raw.get("name", path.stem)), curves, int(raw.get("scale_pow10", 0)))
        except KeyError as exc:
            raise InputError(f"{path}: manifest missing field {exc}") from exc


# -- result records ---------------------------------------------------------------

RESULT_COLUMNS = [
    "pair_id",
    "file_a",
    "file_b",
    "scale_pow10",
    "n",
    "m",
    "engine",
    "simplify",
    "seconds",
    "parse_seconds",
    "value_rat_num",
    "value_rat_den",
    "value_rad_num",
    "value_rad_den",
    "value_sign",
    "iterations",
    "inserted",
    "status",
]


@dataclass
class ResultRecord:
    pair_id: str
    file_a: str
    file_b: str
    scale_pow10: int
    n: int
    m: int
    engine: str
    simplify: bool
    seconds: float
    parse_seconds: float
    value: Optional[ExactRoot]
    iterations: int
    inserted: int
    status: str  # ok | timeout | error

    def row(self) -> List[str]:
        v = self.value
        return [
            self.pair_id,
            self.file_a,
            self.file_b,
            str(self.scale_pow10),
            str(self.n),
            str(self.m),
            self.engine,
            "1" if self.simplify else "0",
            repr(self.seconds),
            repr(self.parse_seconds),
            str(v.rational.numerator) if v else "",
            str(v.rational.denominator) if v else "",
            str(v.radicand.numerator) if v else "",
            str(v.radicand.denominator) if v else "",
            str(v.sign) if v else "",
            str(self.iterations),
            str(self.inserted),
            self.status,
        ]

    @classmethod
    def from_row(cls, row: dict) -> "ResultRecord":
        value = None
        if row["status"] == "ok":
            value = ExactRoot(
                Fraction(int(row["value_rat_num"]), int(row["value_rat_den"])),
                Fraction(int(row["value_rad_num"]), int(row["value_rad_den"])),
                int(row["value_sign"]),
            )
        return cls(
            pair_id=row["pair_id"],
            file_a=row["file_a"],
            file_b=row["file_b"],
            scale_pow10=int(row["scale_pow10"]),
            n=int(row["n"]),
            m=int(row["m"]),
            engine=row["engine"],
            simplify=row["simplify"] == "1",
            seconds=float(row["seconds"]),
            parse_seconds=float(row["parse_seconds"]),
            value=value,
            iterations=int(row["iterations"]),
            inserted=int(row["inserted"]),
            status=row["status"],
        )


def load_results(path) -> List[ResultRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [ResultRecord.from_row(row) for row in reader]


# -- the pairwise runner -----------------------------------------------------------


class _PairTimeout(BaseException):
    # BaseException so per-pair alarm delivery cannot be swallowed by the
    # broad exception handling inside parsing or computation.
    pass


def _with_time_limit(seconds: float, fn):
    """Run fn() under a wall-clock alarm; single-threaded POSIX only."""
    if seconds is None or seconds <= 0:
        return fn()

    def handler(signum, frame):
        raise _PairTimeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        return fn()
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0.0)
        signal.signal(signal.SIGALRM, old)


def select_pairs(count: int, selection: str) -> List[Tuple[int, int]]:
    choose2 = [(i, j) for i in range(count) for j in range(i + 1, count)]
    if selection == "choose2":
        return choose2
    if selection == "all":
        return [(i, j) for i in range(count) for j in range(count) if i != j]
    if selection.startswith("first:"):
        return choose2[: int(selection.split(":", 1)[1])]
    raise InputError(f"unknown pair selection {selection!r}")


def compute_pair(
    file_a,
    file_b,
    scale_pow10: int = 0,
    engine: str = "dijkstra",
    simplify: bool = True,
    trace=None,
) -> Tuple[ExactRoot, int, int, float]:
    """Parse both files and compute the distance; returns value, iteration
    count, inserted-vertex count, and the parse time."""
    t0 = time.perf_counter()
    a = parse_curve_file(file_a, scale_pow10)
    b = parse_curve_file(file_b, scale_pow10)
    parse_seconds = time.perf_counter() - t0
    iterations = 0
    inserted = 0
    if simplify:
        rep = LosslessReport()
        value = lossless_compute(a, b, engine=engine, report=rep, trace=trace)
        iterations, inserted = rep.iterations, rep.inserted
    else:
        counters = [0, 0]

        def counting_trace(rec: TraceRecord):
            counters[0] += 1
            counters[1] += rec.inserted
            if trace is not None:
                trace(rec)

        value = compute_exact_frechet(a, b, engine=engine, trace=counting_trace)
        iterations, inserted = counters
    return value, iterations, inserted, parse_seconds


def run_pairs(
    manifest: DatasetManifest,
    selection: str = "choose2",
    engine: str = "dijkstra",
    simplify: bool = True,
    timeout: float = 300.0,
    out_path=None,
) -> Iterable[ResultRecord]:
    """Run the selected pairs in deterministic order, appending each record
    to the CSV as soon as it finishes; timeouts and errors do not abort."""
    writer = None
    out_fh = None
    if out_path is not None:
        out_fh = open(out_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(out_fh)
        writer.writerow(RESULT_COLUMNS)
    try:
        for i, j in select_pairs(len(manifest.curves), selection):
            fa, fb = manifest.curves[i], manifest.curves[j]
            pair_id = f"{Path(fa).stem}:{Path(fb).stem}"
            t0 = time.perf_counter()
            value = None
            iterations = inserted = 0
            parse_seconds = 0.0
            n = m = 0
            try:
                def work():
                    return compute_pair(fa, fb, manifest.scale_pow10, engine, simplify)

                value, iterations, inserted, parse_seconds = _with_time_limit(timeout, work)
                status = "ok"
                n = len(parse_curve_file(fa, manifest.scale_pow10))
                m = len(parse_curve_file(fb, manifest.scale_pow10))
            except _PairTimeout:
                status = "timeout"
            except Exception as exc:  # isolate the pair, keep the run going
                print(f"error on {pair_id}: {exc}", file=sys.stderr)
                status = "error"
            seconds = time.perf_counter() - t0
            record = ResultRecord(
                pair_id,
                fa,
                fb,
                manifest.scale_pow10,
                n,
                m,
                engine,
                simplify,
                seconds,
                parse_seconds,
                value,
                iterations,
                inserted,
                status,
            )
            if writer is not None:
                writer.writerow(record.row())
                out_fh.flush()
            yield record
    finally:
        if out_fh is not None:
            out_fh.close()


# -- accuracy reporting ---------------------------------------------------------


def accuracy_report(records: List[ResultRecord], out_path=None) -> dict:
    """Compare recorded values against the brute-force oracle.

    Exact error is zero iff the algebraic values match; the double error is
    the difference after conversion to float.
    """
    exact_mismatches = 0
    double_errors = []
    compared = 0
    for rec in records:
        if rec.status != "ok":
            continue
        a = parse_curve_file(rec.file_a, rec.scale_pow10)
        b = parse_curve_file(rec.file_b, rec.scale_pow10)
        oracle = brute_force_exact(a, b)
        compared += 1
        if rec.value.compare(oracle) != EQUAL:
            exact_mismatches += 1
        double_errors.append(abs(float(rec.value) - float(oracle)))
    if not double_errors:
        raise InputError("no ok-records to compare")
    double_errors.sort()
    summary = {
        "pairs": compared,
        "exact_mismatches": exact_mismatches,
        "double_max": max(double_errors),
        "double_mean": sum(double_errors) / len(double_errors),
        "double_median": double_errors[len(double_errors) // 2],
    }
    if out_path is not None:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(list(summary))
            w.writerow([summary[k] for k in summary])
    return summary


# -- synthetic curves -------------------------------------------------------------


def synth_curve(rng: random.Random, vertices: int, span: int = 100000) -> List[Tuple[int, int]]:
    """A smooth momentum walk; heavy lossless simplification by design."""
    x, y = rng.randint(-span, span), rng.randint(-span, span)
    vx, vy = rng.randint(-40, 40), rng.randint(-40, 40)
    out = [(x, y)]
    for _ in range(vertices - 1):
        vx += rng.randint(-3, 3)
        vy += rng.randint(-3, 3)
        x += vx
        y += vy
        out.append((x, y))
    return out


# -- CLI ---------------------------------------------------------------------------


def _print_value(value: ExactRoot) -> None:
    rat, rad = value.rational, value.radicand
    if rad == 0:
        print(f"distance = {rat.numerator}/{rat.denominator} (exact rational)")
    elif rat == 0 and value.sign > 0:
        print(f"distance = sqrt({rad.numerator}/{rad.denominator})")
    else:
        op = "+" if value.sign > 0 else "-"
        print(
            f"distance = {rat.numerator}/{rat.denominator} {op} "
            f"sqrt({rad.numerator}/{rad.denominator})"
        )
    print(f"approx   = {float(value):.17g}")


def _cmd_compute(args) -> int:
    def trace(rec: TraceRecord):
        b2 = Fraction(rec.path.bottleneck2)
        print(
            f"iter={rec.iteration} bottleneck2={b2.numerator}/{b2.denominator} "
            f"inserted={rec.inserted}"
        )

    value, iterations, inserted, _ = compute_pair(
        args.file_a,
        args.file_b,
        args.scale,
        args.engine,
        simplify=not args.no_simplify,
        trace=trace if args.trace else None,
    )
    _print_value(value)
    print(f"iterations = {iterations}, inserted vertices = {inserted}")
    return 0


def _cmd_bench(args) -> int:
    manifest = DatasetManifest.load(args.manifest)
    count = 0
    timeouts = 0
    for rec in run_pairs(
        manifest,
        selection=args.pairs,
        engine=args.engine,
        simplify=not args.no_simplify,
        timeout=args.timeout,
        out_path=args.out,
    ):
        count += 1
        timeouts += rec.status == "timeout"
    print(f"{count} pairs, {timeouts} timeouts -> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    a = parse_curve_file(args.file_a, args.scale)
    b = parse_curve_file(args.file_b, args.scale)
    oracle = brute_force_exact(a, b)
    ok = True
    for engine in ("dijkstra", "sweepline"):
        for simplify in (False, True):
            value = (
                lossless_compute(a, b, engine=engine)
                if simplify
                else compute_exact_frechet(a, b, engine=engine)
            )
            same = value.compare(oracle) == EQUAL
            ok = ok and same
            label = f"{engine}/{'simplify' if simplify else 'direct'}"
            print(f"{label}: {'agrees' if same else 'MISMATCH'} ({float(value):.12g})")
    d2 = oracle.radicand if oracle.rational == 0 else Fraction(float(oracle) ** 2)
    print(f"oracle   = {float(oracle):.12g}; decide(d2)={decide(a, b, d2)}")
    if not ok:
        raise AssertionError("engine disagreement against the oracle")
    print("all engines agree with the oracle")
    return 0


def _cmd_accuracy(args) -> int:
    records = load_results(args.results)
    summary = accuracy_report(records, args.out)
    for key, val in summary.items():
        print(f"{key} = {val}")
    return 0


def _cmd_synth(args) -> int:
    rng = random.Random(args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for k in range(args.count):
        pts = synth_curve(rng, args.vertices)
        name = f"curve_{k:03d}.txt"
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            fh.write(f"# synthetic curve {k}\n")
            for x, y in pts:
                fh.write(f"{x} {y}\n")
        names.append(name)
    manifest = {"name": out_dir.name, "scale_pow10": 0, "curves": names}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"wrote {args.count} curves and manifest.json to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frechet-exact",
        description="Exact continuous Frechet distance for integer curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--engine", choices=("dijkstra", "sweepline"), default="dijkstra")
        p.add_argument("--no-simplify", action="store_true", help="disable lossless simplification")

    p = sub.add_parser("compute", help="distance between two curve files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--scale", type=int, default=0, help="decimal power for quantization")
    p.add_argument("--trace", action="store_true", help="log one line per refinement iteration")
    add_common(p)
    p.set_defaults(fn=_cmd_compute)

    p = sub.add_parser("bench", help="pairwise benchmark over a manifest")
    p.add_argument("manifest")
    p.add_argument("--pairs", default="choose2", help="all | choose2 | first:K")
    p.add_argument("--timeout", type=float, default=300.0, help="seconds per pair")
    p.add_argument("--out", default="results.csv")
    add_common(p)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("verify", help="cross-check both engines against the oracle")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--scale", type=int, default=0)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("accuracy", help="error table of a results CSV vs the oracle")
    p.add_argument("results")
    p.add_argument("--oracle", action="store_true", help="compare against brute force (default)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_accuracy)

    p = sub.add_parser("synth", help="generate synthetic benchmark curves")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--vertices", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal invariant violations
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
