"""Acceptance gate: every shipping criterion at its stated scale.

Each test prints one PASS line on success; run with ``pytest -v -s
tests/test_acceptance.py`` to see them.  Tolerances are zero everywhere:
all comparisons are exact algebraic comparisons.
"""

import csv
import json
import random
from fractions import Fraction as F

import pytest

from frechet_exact.exact_numbers import (
    EQUAL,
    GREATER,
    LESS,
    ExactRoot,
    compare_root_expressions,
)
from frechet_exact.geometry import Curve
from frechet_exact.oracles import brute_force_exact, decide
from frechet_exact.refinement import (
    build_column_instance,
    compute_exact_frechet,
    iteration_bound,
    run_refinement,
    sweep_column,
)
from frechet_exact.simplification import (
    initial_simplification,
    lossless_compute,
    weighted_lower_bound,
)
from frechet_exact.ve_graph import VEGraph, interpolated_ve_distance

from _helpers import (
    assert_minimal,
    backtracking_pairs,
    curve_pairs,
    harvest_bad_bands,
    interval_compare,
)

CORPUS_SIZE = 500


@pytest.fixture(scope="module")
def corpus():
    pairs = curve_pairs(20260101, CORPUS_SIZE, lo=2, hi=8, span=100)
    return [(a, b, brute_force_exact(a, b)) for a, b in pairs]


def test_oracle_exactness(corpus):
    """Both engines, simplification on and off, equal the brute-force oracle
    as exact algebraic values on the full corpus."""
    failures = 0
    for a, b, oracle in corpus:
        for value in (
            compute_exact_frechet(a, b, engine="dijkstra"),
            compute_exact_frechet(a, b, engine="sweepline"),
            lossless_compute(a, b, engine="dijkstra"),
            lossless_compute(a, b, engine="sweepline"),
        ):
            failures += value.compare(oracle) != EQUAL
    assert failures == 0
    print(f"PASS oracle exactness: {len(corpus)} pairs x 4 configurations, 0 mismatches")


def test_decision_consistency(corpus):
    """decide(delta2) holds exactly when the computed distance squared is at
    most delta2, for ten random thresholds per pair."""
    rng = random.Random(777)
    checks = failures = 0
    for a, b, oracle in corpus:
        o2 = oracle.radicand if oracle.rational == 0 else F(oracle.rational) ** 2
        for _ in range(10):
            delta2 = F(rng.randint(0, 2 * int(o2) + 20), rng.randint(1, 9))
            want = o2 <= delta2
            got = decide(a, b, delta2)
            checks += 1
            failures += got != want
    assert failures == 0
    print(f"PASS decision consistency: {checks} thresholds, 0 failures")


def test_sandwich_invariant(corpus):
    """In every refinement iteration, V_E^2 <= oracle D_F^2 <= I_VE^2."""
    iterations = failures = 0
    for a, b, oracle in corpus[:250]:
        o2 = oracle.radicand if oracle.rational == 0 else F(oracle.rational) ** 2
        records = []
        run_refinement(a, b, trace=records.append)
        for rec in records:
            iterations += 1
            ive2 = interpolated_ve_distance(rec.graph, rec.path)
            if not rec.path.bottleneck2 <= o2 <= ive2:
                failures += 1
    assert failures == 0
    print(f"PASS sandwich invariant: {iterations} iterations, 0 violations")


def test_convergence_bound(corpus):
    """Iteration counts respect n*m^2 + m*n^2; the backtracking fixture
    terminates after exactly one refinement with value sqrt(13)."""
    for a, b, _ in corpus:
        res = run_refinement(a, b)
        assert res.iterations <= iteration_bound(len(a), len(b))
    traces = []
    value = compute_exact_frechet(
        Curve.from_points([(0, 0), (12, 0)]),
        Curve.from_points([(0, 3), (8, 3), (4, 3), (12, 3)]),
        trace=traces.append,
    )
    assert value == ExactRoot.sqrt(13)
    assert len(traces) == 2 and sum(t.inserted for t in traces) == 1
    print("PASS convergence bound: all runs within n*m^2 + m*n^2; fixture solved in 2 passes")


def test_refinement_minimality():
    """On >= 200 non-monotone bands with at most 6 cells, the returned vertex
    set is minimal per the subset brute-force oracle."""
    pairs = backtracking_pairs(31337, 900) + curve_pairs(31338, 200, hi=6, span=40)
    instances = harvest_bad_bands(pairs)
    assert len(instances) >= 200, f"only {len(instances)} instances harvested"
    for g, axis, band, na, nb in instances[:260]:
        verts, final = sweep_column(build_column_instance(g, axis, band, na, nb))
        assert_minimal(g, axis, band, na, nb, verts, final)
    print(f"PASS minimality: {min(len(instances), 260)} bands, all minimal per subset oracle")


def test_lower_bound_soundness(corpus):
    """The weighted lower bound never exceeds the true distance and always
    dominates the global bound M - A - B, as exact comparisons."""
    nontrivial = 0
    for a, b, oracle in corpus:
        mu2 = F(160)
        sa = initial_simplification(a, mu2)
        sb = initial_simplification(b, mu2)
        run = run_refinement(sa.curve(), sb.curve())
        lb, _ = weighted_lower_bound(sa, sb, simplified_distance=run.distance)
        assert lb.compare(oracle) != GREATER
        shift = sa.max_weight_bound(32) + sb.max_weight_bound(32)
        assert lb.compare(run.distance.add_rational(-shift)) != LESS
        nontrivial += not (sa.is_identity and sb.is_identity)
    assert nontrivial >= 100
    print(f"PASS lower-bound soundness: {len(corpus)} pairs ({nontrivial} simplified), 0 violations")


def test_predicate_kernel():
    """10^5 random root expressions agree with a 256-bit interval oracle;
    total-order properties hold on 10^4 random triples."""
    rng = random.Random(424242)

    def rand_root():
        return ExactRoot(
            F(rng.randint(-(2**31), 2**31), rng.randint(1, 2**31)),
            F(rng.randint(0, 2**31), rng.randint(1, 2**31)),
            rng.choice([1, -1]),
        )

    ties = 0
    for _ in range(100_000):
        x, y = rand_root(), rand_root()
        got = compare_root_expressions(x, y)
        oracle = interval_compare(x, y)
        if oracle is None:
            ties += 1
            assert got == EQUAL  # interval straddles zero only on exact ties
        else:
            assert got == oracle
    triples = [(rand_root(), rand_root(), rand_root()) for _ in range(10_000)]
    for x, y, z in triples:
        cxy, cyx = x.compare(y), y.compare(x)
        assert cxy == -cyx  # antisymmetry (trichotomy with the exhaustive enum)
        if cxy != GREATER and y.compare(z) != GREATER:
            assert x.compare(z) != GREATER  # transitivity
    print(f"PASS predicate kernel: 100000 oracle comparisons ({ties} exact ties), 10000 triples")


def test_engine_equivalence_and_determinism(corpus, tmp_path):
    """Both engines report identical bottlenecks; repeated benchmark runs
    serialize byte-identical value fields."""
    from frechet_exact.ve_graph import min_cost_path_dijkstra, min_cost_path_sweepline

    for a, b, _ in corpus[:300]:
        g = VEGraph(a, b)
        assert min_cost_path_dijkstra(g).bottleneck2 == min_cost_path_sweepline(g).bottleneck2

    from frechet_exact.cli import DatasetManifest, run_pairs, synth_curve

    rng = random.Random(5)
    names = []
    for i in range(4):
        pts = synth_curve(rng, 60, span=200)
        p = tmp_path / f"c{i}.txt"
        p.write_text("\n".join(f"{x} {y}" for x, y in pts))
        names.append(f"c{i}.txt")
    (tmp_path / "manifest.json").write_text(
        json.dumps({"name": "det", "scale_pow10": 0, "curves": names})
    )
    manifest = DatasetManifest.load(tmp_path / "manifest.json")
    snapshots = []
    for rep in range(2):
        out = tmp_path / f"res{rep}.csv"
        list(run_pairs(manifest, "choose2", out_path=out))
        with open(out, newline="") as fh:
            snapshots.append(
                [
                    [row[c] for c in row if c.startswith("value_")]
                    for row in csv.DictReader(fh)
                ]
            )
    assert snapshots[0] == snapshots[1]
    print("PASS engine equivalence & determinism: 300 pairs equal, CSV value fields identical")


def test_smoke_benchmark(tmp_path):
    """Desk-scale stand-in for corpus-scale timing runs: one hundred pairs
    of 1000-vertex synthetic curves finish under the default 300 s per-pair
    limit with zero timeouts."""
    from frechet_exact.cli import DatasetManifest, run_pairs, synth_curve

    rng = random.Random(99)
    names = []
    for i in range(15):
        pts = synth_curve(rng, 1000)
        p = tmp_path / f"big{i}.txt"
        p.write_text("\n".join(f"{x} {y}" for x, y in pts))
        names.append(f"big{i}.txt")
    (tmp_path / "manifest.json").write_text(
        json.dumps({"name": "smoke", "scale_pow10": 0, "curves": names})
    )
    manifest = DatasetManifest.load(tmp_path / "manifest.json")
    out = tmp_path / "smoke.csv"
    records = list(run_pairs(manifest, "first:100", timeout=300.0, out_path=out))
    assert len(records) == 100
    statuses = {r.status for r in records}
    assert statuses == {"ok"}, f"unexpected statuses {statuses}"
    worst = max(r.seconds for r in records)
    print(f"PASS smoke benchmark: 100 pairs of 1000-vertex curves, 0 timeouts, worst {worst:.2f}s")
