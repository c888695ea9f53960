import random
from fractions import Fraction as F

from frechet_exact.exact_numbers import EQUAL, EXACT_ZERO, ExactRoot, GREATER, LESS
from frechet_exact.geometry import Curve
from frechet_exact.oracles import brute_force_exact
from frechet_exact.refinement import compute_exact_frechet, run_refinement
from frechet_exact.simplification import (
    SimplificationState,
    build_gamma_star,
    compute_slack,
    greedy_joint_traversal,
    initial_simplification,
    lossless_compute,
    propagate_slack,
    weighted_lower_bound,
)

from _helpers import curve_pairs

ZIG_PI = Curve.from_points([(0, 0), (12, 0)])
ZIG_SG = Curve.from_points([(0, 3), (8, 3), (4, 3), (12, 3)])


def test_greedy_traversal_examples():
    params, w2, split = greedy_joint_traversal((0, 0), (10, 0), [(0, 0), (10, 0)])
    assert w2 == 0
    params, w2, split = greedy_joint_traversal(
        (0, 0), (10, 0), [(0, 0), (4, 3), (10, 0)]
    )
    assert w2 == 9 and split == 1 and params[1] == F(2, 5)
    # backtracking projections ride the running max and stay monotone
    params, _, _ = greedy_joint_traversal(
        (0, 0), (10, 0), [(0, 0), (8, 1), (2, 1), (10, 0)]
    )
    assert params == sorted(params)


def test_greedy_two_approximation():
    rng = random.Random(31)
    for _ in range(40):
        pts = [(0, 0)]
        for _ in range(rng.randint(1, 4)):
            pts.append((rng.randint(0, 20), rng.randint(-5, 5)))
        pts.append((20, 0))
        sub = Curve.from_points(pts)
        if len(sub) < 2:
            continue
        _, w2, _ = greedy_joint_traversal(pts[0], pts[-1], sub.points)
        edge = Curve.from_points([pts[0], pts[-1]])
        opt = compute_exact_frechet(edge, sub)
        opt2 = opt.radicand if opt.rational == 0 else F(opt.rational) ** 2
        assert w2 <= 4 * opt2
        assert ExactRoot.sqrt(w2).compare(opt) != LESS  # over-estimates


def test_initial_simplification_examples():
    c = Curve.from_points([(0, 0), (4, 3), (10, 0)])
    assert initial_simplification(c, 0).selected == [0, 1, 2]
    assert initial_simplification(c, 9).selected == [0, 2]
    collinear = Curve.from_points([(0, 0), (3, 0), (7, 0), (19, 0)])
    assert initial_simplification(collinear, 0).selected == [0, 3]
    # budgets are honored on every accepted edge
    rng = random.Random(5)
    for _ in range(30):
        c = Curve.from_points(
            [(rng.randint(0, 60), rng.randint(0, 60)) for _ in range(12)]
        )
        if len(c) < 2:
            continue
        st = initial_simplification(c, 25)
        assert st.selected[0] == 0 and st.selected[-1] == len(c) - 1
        assert all(e.weight2 <= 25 for e in st.edges)


def test_weighted_lower_bound_identity_is_exact():
    for a, b in curve_pairs(606, 20, hi=6):
        sa = SimplificationState.build(a, range(len(a)))
        sb = SimplificationState.build(b, range(len(b)))
        lb, _ = weighted_lower_bound(sa, sb)
        assert lb.compare(brute_force_exact(a, b)) == EQUAL


def test_weighted_lower_bound_sound_and_dominates_global():
    checked_nontrivial = 0
    for a, b in curve_pairs(909, 60, hi=7):
        mu2 = F(160)
        sa = initial_simplification(a, mu2)
        sb = initial_simplification(b, mu2)
        run = run_refinement(sa.curve(), sb.curve())
        lb, _ = weighted_lower_bound(sa, sb, simplified_distance=run.distance)
        oracle = brute_force_exact(a, b)
        assert lb.compare(oracle) != GREATER  # LB <= D_F
        shift = sa.max_weight_bound(32) + sb.max_weight_bound(32)
        global_lb = run.distance.add_rational(-shift)  # M - A - B
        assert lb.compare(global_lb) != LESS
        if not (sa.is_identity and sb.is_identity):
            checked_nontrivial += 1
    assert checked_nontrivial >= 20


def test_weighted_lower_bound_beats_global_bound_somewhere():
    # the max-weight edge sits far from the bottleneck, so the local
    # reweighting must beat M - A - B strictly
    base = [(0, 0), (10, 0), (20, 0), (30, 0), (40, 0), (40, 30), (80, 30)]
    wig = [(0, 0), (10, 0), (20, 0), (30, 0), (40, 0), (40, 30), (60, 36), (80, 30)]
    pi = Curve.from_points(wig)
    sg = Curve.from_points([(0, 2), (40, 2), (40, 28), (80, 28)])
    sp = SimplificationState.build(pi, [0, 1, 2, 3, 4, 5, 7])
    ss = SimplificationState.build(sg, range(len(sg)))
    run = run_refinement(sp.curve(), ss.curve())
    lb, _ = weighted_lower_bound(sp, ss, simplified_distance=run.distance)
    shift = sp.max_weight_bound(32) + ss.max_weight_bound(32)
    global_lb = run.distance.add_rational(-shift)
    assert lb.compare(global_lb) == GREATER
    assert lb.compare(brute_force_exact(pi, sg)) != GREATER


def test_slack_translated_curves():
    a = Curve.from_points([(0, 0), (10, 0), (20, 5)])
    b = Curve.from_points([(0, 2), (10, 2), (20, 7)])
    sa = SimplificationState.build(a, range(len(a)))
    sb = SimplificationState.build(b, range(len(b)))
    run = run_refinement(sa.curve(), sb.curve())
    lb, _ = weighted_lower_bound(sa, sb, simplified_distance=run.distance)
    gamma, ub2 = build_gamma_star(sa, sb, run)
    assert ub2 == 4  # constant leash 2
    slack = compute_slack(sa, sb, lb, gamma)
    for s in slack.pi + slack.sigma:
        assert s.compare(EXACT_ZERO) == EQUAL
    assert not slack.any_negative()


def test_propagation_window_two_marks_subset_of_window_four():
    for a, b in curve_pairs(111, 30, hi=7):
        mu2 = F(30)
        sa = initial_simplification(a, mu2)
        sb = initial_simplification(b, mu2)
        run = run_refinement(sa.curve(), sb.curve())
        lb, _ = weighted_lower_bound(sa, sb, simplified_distance=run.distance)
        gamma, _ = build_gamma_star(sa, sb, run)
        slack = compute_slack(sa, sb, lb, gamma)
        for values, state in ((slack.pi, sa), (slack.sigma, sb)):
            narrow = propagate_slack(values, state, window=2)
            wide = propagate_slack(values, state, window=4)
            marks2 = {k for k, s in enumerate(narrow) if s.compare(EXACT_ZERO) == LESS}
            marks8 = {k for k, s in enumerate(wide) if s.compare(EXACT_ZERO) == LESS}
            assert marks2 <= marks8


def test_lossless_fixtures():
    assert lossless_compute(ZIG_PI, ZIG_SG) == ExactRoot.sqrt(13)
    c = Curve.from_points([(0, 0), (5, 1), (9, 0)])
    assert lossless_compute(c, c) == ExactRoot.from_rational(0)


def test_lossless_equals_direct_on_fuzz():
    for a, b in curve_pairs(2222, 80):
        direct = compute_exact_frechet(a, b)
        assert lossless_compute(a, b).compare(direct) == EQUAL


def test_unsimplification_grows_selected_monotonically():
    a = Curve.from_points([(0, 0), (3, 4), (9, 1), (14, 6), (20, 0)])
    st = initial_simplification(a, F(1000))
    assert st.selected == [0, 4]
    st2 = st.unsimplify([0])
    assert set(st.selected) < set(st2.selected)
    assert all(e.weight2 >= 0 for e in st2.edges)
