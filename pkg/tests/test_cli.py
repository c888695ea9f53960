import csv
import json
import random
from fractions import Fraction as F

import pytest

from frechet_exact.cli import (
    DatasetManifest,
    InputError,
    accuracy_report,
    load_results,
    main,
    parse_curve_file,
    quantize,
    run_pairs,
    select_pairs,
    synth_curve,
)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_parse_examples(tmp_path):
    p = _write(tmp_path, "a.txt", "0 0\n3 4\n")
    assert parse_curve_file(p).points == ((0, 0), (3, 4))
    p = _write(tmp_path, "b.txt", "# comment\n0.5 0\n")
    assert parse_curve_file(p, 1).points == ((5, 0),)
    p = _write(tmp_path, "c.txt", "3000000000 0\n0 0\n")
    with pytest.raises(InputError):
        parse_curve_file(p)
    p = _write(tmp_path, "d.txt", "1 1\n1 1\n2 2\n")
    assert parse_curve_file(p).points == ((1, 1), (2, 2))  # duplicates collapse
    p = _write(tmp_path, "e.txt", "oops 3\n")
    with pytest.raises(InputError):
        parse_curve_file(p)


def test_quantize_half_away_and_idempotent(tmp_path):
    assert quantize(F(1, 2), 0) == 1
    assert quantize(F(-1, 2), 0) == -1
    assert quantize(F(123456, 100000), 5) == 123456
    # quantizing an already-quantized file again is the identity
    p = _write(tmp_path, "q.txt", "12.345 -0.5\n7 9\n")
    c1 = parse_curve_file(p, 3)
    q = _write(tmp_path, "q2.txt", "\n".join(f"{x} {y}" for x, y in c1.points))
    assert parse_curve_file(q, 0).points == c1.points


def _make_dataset(tmp_path, curves, scale=0):
    names = []
    for i, pts in enumerate(curves):
        name = f"c{i}.txt"
        _write(tmp_path, name, "\n".join(f"{x} {y}" for x, y in pts))
        names.append(name)
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps({"name": "t", "scale_pow10": scale, "curves": names}))
    return mpath


def test_select_pairs():
    assert select_pairs(3, "choose2") == [(0, 1), (0, 2), (1, 2)]
    assert len(select_pairs(3, "all")) == 6
    assert select_pairs(4, "first:2") == [(0, 1), (0, 2)]
    with pytest.raises(InputError):
        select_pairs(3, "bogus")


def test_run_pairs_and_roundtrip(tmp_path):
    mpath = _make_dataset(
        tmp_path,
        [
            [(0, 0), (10, 0)],
            [(0, 1), (10, 1)],
            [(0, 3), (8, 3), (4, 3), (12, 3)],
        ],
    )
    manifest = DatasetManifest.load(mpath)
    out = tmp_path / "results.csv"
    records = list(run_pairs(manifest, "choose2", out_path=out))
    assert len(records) == 3
    assert all(r.status == "ok" for r in records)
    loaded = load_results(out)
    for orig, back in zip(records, loaded):
        assert back.value == orig.value  # bit-exact algebraic round-trip
        assert back.pair_id == orig.pair_id and back.n == orig.n


def test_value_fields_deterministic(tmp_path):
    rng = random.Random(2)
    curves = [synth_curve(rng, 40, span=50) for _ in range(4)]
    mpath = _make_dataset(tmp_path, curves)
    manifest = DatasetManifest.load(mpath)
    rows = []
    for run in range(2):
        out = tmp_path / f"r{run}.csv"
        list(run_pairs(manifest, "choose2", out_path=out))
        with open(out, newline="") as fh:
            rows.append(
                [
                    tuple(r[k] for k in r if k.startswith("value_") or k == "pair_id")
                    for r in csv.DictReader(fh)
                ]
            )
    assert rows[0] == rows[1]


def test_timeout_status(tmp_path):
    rng = random.Random(5)
    mpath = _make_dataset(tmp_path, [synth_curve(rng, 220) for _ in range(2)])
    manifest = DatasetManifest.load(mpath)
    records = list(run_pairs(manifest, "choose2", timeout=1e-6))
    assert [r.status for r in records] == ["timeout"]


def test_accuracy_report_exact_and_fault_detection(tmp_path):
    mpath = _make_dataset(
        tmp_path, [[(0, 0), (10, 0)], [(0, 1), (10, 1)], [(2, 5), (9, 9), (4, 1)]]
    )
    manifest = DatasetManifest.load(mpath)
    records = list(run_pairs(manifest, "choose2"))
    summary = accuracy_report(records)
    assert summary["exact_mismatches"] == 0
    assert summary["double_max"] == 0.0
    # inject a perturbation of about 2^-20 and expect detection
    bad = records[0]
    bad.value = bad.value.add_rational(F(1, 2**20))
    summary = accuracy_report(records)
    assert summary["exact_mismatches"] == 1
    assert 0 < summary["double_max"] < 2e-5


def test_cli_compute_and_exit_codes(tmp_path, capsys):
    a = _write(tmp_path, "a.txt", "0 0\n12 0\n")
    b = _write(tmp_path, "b.txt", "0 3\n8 3\n4 3\n12 3\n")
    assert main(["compute", str(a), str(b), "--trace"]) == 0
    out = capsys.readouterr().out
    assert "sqrt(13/1)" in out
    assert "iter=1" in out
    assert main(["compute", str(a), str(b), "--no-simplify", "--engine", "sweepline"]) == 0
    assert main(["verify", str(a), str(b)]) == 0
    assert main(["compute", str(tmp_path / "missing.txt"), str(b)]) == 2
    bad = _write(tmp_path, "bad.txt", "zek 1\n")
    assert main(["compute", str(bad), str(b)]) == 2
    assert main(["bogus-subcommand"]) == 1


def test_cli_bench_and_accuracy(tmp_path, capsys):
    mpath = _make_dataset(
        tmp_path, [[(0, 0), (10, 0)], [(0, 1), (10, 1)], [(1, 1), (5, 6), (9, 2)]]
    )
    out = tmp_path / "res.csv"
    assert main(["bench", str(mpath), "--out", str(out)]) == 0
    assert main(["accuracy", str(out), "--oracle"]) == 0
    text = capsys.readouterr().out
    assert "exact_mismatches = 0" in text


def test_cli_synth(tmp_path):
    out = tmp_path / "synthset"
    assert main(["synth", "--out", str(out), "--count", "3", "--vertices", "50"]) == 0
    manifest = DatasetManifest.load(out / "manifest.json")
    assert len(manifest.curves) == 3
    for c in manifest.curves:
        assert len(parse_curve_file(c)) > 10
