"""Lossless vertex-restricted curve simplification.

A simplification keeps a subset of the original vertices.  Each kept edge
carries the squared max leash of a greedy joint traversal against its
subcurve (a 2-approximation of the true edge-to-subcurve distance) and the
split vertex realizing it.  The distance of the simplified pair, a weighted
lower bound, and per-vertex slack decide which edges must be un-simplified.
The loop returns early only on a certificate: when no vertex attains a leash
beyond the lower bound, the bound is squeezed between itself and the
combined-traversal upper bound and therefore *is* the exact distance of the
original pair; failing that it finishes at full resolution.

Edge weights enter the bottleneck computation as rational over-estimates of
the greedy leashes, keeping every node value inside the one-root comparison
kernel; over-estimating a subtracted weight keeps the bound a lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact_numbers import (
    EXACT_ZERO,
    ExactRoot,
    GREATER,
    div,
    exact_min,
    rational_upper_bound,
)
from .geometry import Curve, Point, lerp, nearest_parameter_on_segment, squared_distance
from .refinement import (
    ENGINES,
    RefinementResult,
    _split_decreasing_step,
    build_column_instance,
    iteration_bound,
    refine_column,
    run_refinement,
)
from .ve_graph import VEGraph, VEPath, monotonicity_report


def greedy_joint_traversal(
    edge_a: Point, edge_b: Point, points: Sequence[Point]
) -> Tuple[List[Fraction], Fraction, int]:
    """Monotone matching of a subcurve against one segment.

    Every subcurve vertex is matched to the running maximum of the clamped
    projections, which keeps the matching monotone.  Returns the per-vertex
    parameters, the squared max leash, and the offset of the split vertex
    attaining it.
    """
    params: List[Fraction] = []
    running = Fraction(0)
    weight2 = Fraction(0)
    split = 0
    for k, p in enumerate(points):
        t, _ = nearest_parameter_on_segment(edge_a, edge_b, p)
        if t > running:
            running = t
        params.append(running)
        d2 = Fraction(squared_distance(p, lerp(edge_a, edge_b, running)))
        if d2 > weight2:
            weight2 = d2
            split = k
    return params, weight2, split


@dataclass(frozen=True)
class EdgeTraversal:
    weight2: Fraction
    split: int  # base-curve index realizing the max leash
    params: Tuple[Fraction, ...]  # matched edge parameter per base vertex


@dataclass
class SimplificationState:
    base: Curve
    selected: List[int]
    edges: List[EdgeTraversal]

    @classmethod
    def build(cls, base: Curve, selected: Sequence[int]) -> "SimplificationState":
        selected = sorted(set(selected))
        if selected[0] != 0 or selected[-1] != len(base) - 1:
            raise ValueError("simplification must keep both endpoints")
        edges = [cls._edge(base, a, b) for a, b in zip(selected, selected[1:])]
        return cls(base, list(selected), edges)

    @staticmethod
    def _edge(base: Curve, lo: int, hi: int) -> EdgeTraversal:
        pts = base.points[lo : hi + 1]
        params, weight2, split = greedy_joint_traversal(pts[0], pts[-1], pts)
        if weight2 > 0 and not lo < lo + split < hi:
            raise AssertionError("positive greedy leash must split interior")
        if weight2 == 0:
            split = (hi - lo) // 2  # any interior vertex works for a flat edge
        return EdgeTraversal(weight2, lo + split, tuple(params))

    def curve(self) -> Curve:
        pts = tuple(self.base.points[i] for i in self.selected)
        return Curve(pts, tuple(self.selected))

    @property
    def is_identity(self) -> bool:
        return len(self.selected) == len(self.base)

    def edge_is_original(self, k: int) -> bool:
        return self.selected[k + 1] == self.selected[k] + 1

    def max_weight_bound(self, slack_bits: int) -> Fraction:
        """Rational over-estimate of the max greedy edge leash."""
        best = Fraction(0)
        for e in self.edges:
            r = rational_upper_bound(ExactRoot.sqrt(e.weight2), slack_bits)
            if r > best:
                best = r
        return best

    def unsimplify(self, marked: Sequence[int]) -> "SimplificationState":
        """Splice the split vertex into every marked edge."""
        inserts = []
        for k in marked:
            if self.edge_is_original(k):
                raise ValueError("original edges cannot be un-simplified")
            inserts.append(self.edges[k].split)
        return SimplificationState.build(self.base, self.selected + inserts)


def _edge_within_budget(c: Curve, i: int, j: int, mu2) -> bool:
    """Greedy leash of subcurve i..j against its chord, capped at mu2."""
    a, b = c.points[i], c.points[j]
    running = Fraction(0)
    for k in range(i, j + 1):
        t, _ = nearest_parameter_on_segment(a, b, c.points[k])
        if t > running:
            running = t
        if squared_distance(c.points[k], lerp(a, b, running)) > mu2:
            return False
    return True


def initial_simplification(c: Curve, mu2) -> SimplificationState:
    """Greedy forward scan: gallop to an endpoint whose edge exceeds the
    budget, bisect back to a feasible one, restart there.  Every accepted
    edge has greedy leash within the budget, which is all the
    mu-simplification contract needs."""
    if mu2 < 0:
        raise ValueError("mu2 must be non-negative")
    n = len(c)
    selected = [0]
    i = 0
    while i < n - 1:
        step = 1
        lo = i + 1  # a plain edge is always within budget
        while lo + step <= n - 1 and _edge_within_budget(c, i, lo + step, mu2):
            lo += step
            step *= 2
        hi = min(lo + step, n - 1)
        if hi > lo and _edge_within_budget(c, i, hi, mu2):
            lo = hi
        else:
            while lo + 1 < hi:  # lo feasible, hi not
                mid = (lo + hi) // 2
                if _edge_within_budget(c, i, mid, mu2):
                    lo = mid
                else:
                    hi = mid
        selected.append(lo)
        i = lo
    return SimplificationState.build(c, selected)


# -- the weighted bottleneck run ----------------------------------------------


@dataclass
class _WeightedCurve:
    curve: Curve
    vertex_shift: List[Fraction]  # subtracted weight at each current vertex
    edge_shift: List[Fraction]  # subtracted weight on each current edge

    @classmethod
    def from_state(cls, state: SimplificationState, slack_bits: int) -> "_WeightedCurve":
        curve = state.curve()
        shifts = [
            rational_upper_bound(ExactRoot.sqrt(e.weight2), slack_bits)
            for e in state.edges
        ]
        return cls(curve, [Fraction(0)] * len(curve), shifts)

    def insert(self, insertions: Dict[int, List[Fraction]]) -> "_WeightedCurve":
        pts, tags, vs, es = [], [], [], []
        points, origin = self.curve.points, self.curve.origin
        for i, (p, tag) in enumerate(zip(points, origin)):
            pts.append(p)
            tags.append(tag)
            vs.append(self.vertex_shift[i])
            if i < len(points) - 1:
                extra = sorted(set(insertions.get(i, ())))
                for t in extra:
                    pts.append(lerp(points[i], points[i + 1], t))
                    tags.append(tag)
                    # interior of the original simplification edge keeps its weight
                    vs.append(self.edge_shift[i])
                es.extend([self.edge_shift[i]] * (1 + len(extra)))
        return _WeightedCurve(Curve(tuple(pts), tuple(tags)), vs, es)


def _weighted_value_fn(g: VEGraph, wp: _WeightedCurve, ws: _WeightedCurve):
    vp, ep = wp.vertex_shift, wp.edge_shift
    vs, es = ws.vertex_shift, ws.edge_shift
    n, m = g.n, g.m

    def value(nid):
        kind, i, j = nid
        if kind == "H":
            shift = ep[i] + vs[j]
        elif kind == "V":
            shift = vp[i] + es[j]
        else:
            shift = vp[i] + vs[j]
            # An eddy whose projection clamps merges into this corner; its
            # value is the infimum of the weighted elevation approached from
            # inside the edge, which keeps the edge weight.
            for c in (i - 1, i):
                if 0 <= c < n - 1 and g.h_eddy(c, j)[0] == nid:
                    cand = ep[c] + vs[j]
                    if cand > shift:
                        shift = cand
            for r in (j - 1, j):
                if 0 <= r < m - 1 and g.v_eddy(i, r)[0] == nid:
                    cand = vp[i] + es[r]
                    if cand > shift:
                        shift = cand
        return ExactRoot(-shift, g.weight2(nid))

    return value


def weighted_lower_bound(
    sp: SimplificationState,
    ss: SimplificationState,
    slack_bits: int = 32,
    engine: str = "dijkstra",
    simplified_distance: Optional[ExactRoot] = None,
) -> Tuple[ExactRoot, Optional[VEPath]]:
    """Bottleneck distance of the simplified pair with per-edge negative
    weights applied to every node interior to a simplification edge.

    The result is a lower bound on the distance of the original pair.  The
    refinement subroutine sweeps each column in unweighted threshold space,
    which generates the exact events whenever the rows of the column carry
    one common weight; should the run not converge within the iteration
    bound, the global bound ``M - A - B`` is returned instead (with A and B
    the rational over-estimates, so the fallback is exact and still a lower
    bound).
    """
    engine_fn = ENGINES[engine]
    wp = _WeightedCurve.from_state(sp, slack_bits)
    ws = _WeightedCurve.from_state(ss, slack_bits)
    # The column events are generated in unweighted threshold space, which is
    # exact only when one weight rules the column; give the weighted run a
    # short budget and fall back to the global bound rather than chase
    # convergence.
    bound = min(iteration_bound(len(wp.curve), len(ws.curve)), 12)
    iterations = 0
    while iterations < bound:
        iterations += 1
        g = VEGraph(wp.curve, ws.curve)
        value = _weighted_value_fn(g, wp, ws)
        path = engine_fn(g, value_fn=value)
        report = monotonicity_report(path)
        if report.monotone:
            return path.bottleneck2, path
        ins_pi: Dict[int, List[Fraction]] = {}
        for band, a, b in report.bad_columns:
            verts = refine_column(build_column_instance(g, "col", band, a, b))
            if verts:
                ins_pi[band] = [t for t, _ in verts]
        ins_sigma: Dict[int, List[Fraction]] = {}
        for band, a, b in report.bad_rows:
            verts = refine_column(build_column_instance(g, "row", band, a, b))
            if verts:
                ins_sigma[band] = [t for t, _ in verts]
        if not ins_pi and not ins_sigma:
            for band, _, _ in report.bad_columns:
                t = _split_decreasing_step(path, band, 0)
                if t is not None:
                    ins_pi[band] = [t]
            for band, _, _ in report.bad_rows:
                t = _split_decreasing_step(path, band, 1)
                if t is not None:
                    ins_sigma[band] = [t]
        if not ins_pi and not ins_sigma:
            break  # no progress possible; fall back to the global bound
        if ins_pi:
            wp = wp.insert(ins_pi)
        if ins_sigma:
            ws = ws.insert(ins_sigma)
    # Fallback: the global bound with rational over-estimates of A and B.
    if simplified_distance is None:
        simplified_distance = run_refinement(sp.curve(), ss.curve(), engine).distance
    shift = sp.max_weight_bound(slack_bits) + ss.max_weight_bound(slack_bits)
    return simplified_distance.add_rational(-shift), None


# -- combined traversals and slack ---------------------------------------------


def _monotone_breakpoints(path: VEPath) -> List[Tuple[Fraction, Fraction]]:
    """Greedy monotone morph of a path, as parameter-space breakpoints."""
    first = path.nodes[0]
    cx, cy = first.x, first.y
    out = [(cx, cy)]
    for node in path.nodes[1:]:
        tx = node.x if node.x > cx else cx
        ty = node.y if node.y > cy else cy
        if (tx, ty) != (cx, cy):
            out.append((tx, ty))
            cx, cy = tx, ty
    return out


def _state_staircase(state: SimplificationState) -> List[Tuple[Fraction, Fraction]]:
    """Joint traversal (base parameter, simplified parameter) breakpoints."""
    out: List[Tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(0))]
    for k, edge in enumerate(state.edges):
        lo = state.selected[k]
        for off, t in enumerate(edge.params):
            pt = (Fraction(lo + off), k + t)
            if pt != out[-1]:
                out.append(pt)
    return out


def _merge_on_shared(a_poly, b_poly):
    """Compose traversals (a, c) and (c, b) into (a, b) along the shared c."""
    assert a_poly[0][1] == b_poly[0][0] and a_poly[-1][1] == b_poly[-1][0]
    i = j = 0
    out = [(a_poly[0][0], b_poly[0][1])]
    a_cur, b_cur = a_poly[0][0], b_poly[0][1]
    while i < len(a_poly) - 1 or j < len(b_poly) - 1:
        ca = a_poly[i + 1][1] if i < len(a_poly) - 1 else None
        cb = b_poly[j + 1][0] if j < len(b_poly) - 1 else None
        adv_a = cb is None or (ca is not None and ca <= cb)
        adv_b = ca is None or (cb is not None and cb <= ca)
        if adv_a and adv_b:
            i += 1
            j += 1
            a_cur, b_cur = a_poly[i][0], b_poly[j][1]
        elif adv_a:
            i += 1
            a_cur = a_poly[i][0]
            if cb is not None:  # B mid-segment: cut it at the shared c
                c0, b0 = b_poly[j]
                c1, b1 = b_poly[j + 1]
                b_cur = b0 + (b1 - b0) * div(ca - c0, c1 - c0)
        else:
            j += 1
            b_cur = b_poly[j][1]
            if ca is not None:
                a0, c0 = a_poly[i]
                a1, c1 = a_poly[i + 1]
                a_cur = a0 + (a1 - a0) * div(cb - c0, c1 - c0)
        if (a_cur, b_cur) != out[-1]:
            out.append((a_cur, b_cur))
    return out


def _subdivide_at_integers(poly):
    out = [poly[0]]
    for (a0, b0), (a1, b1) in zip(poly, poly[1:]):
        cuts = set()
        for c0, c1 in ((a0, a1), (b0, b1)):
            if c1 > c0:
                for k in range(int(c0) + 1, int(c1) + 1):
                    if c0 < k < c1:
                        cuts.add(div(k - c0, c1 - c0))
        for s in sorted(cuts):
            pt = (a0 + (a1 - a0) * s, b0 + (b1 - b0) * s)
            if pt != out[-1]:
                out.append(pt)
        if (a1, b1) != out[-1]:
            out.append((a1, b1))
    return out


def _param_map(refined: Curve, base: Curve) -> List[Fraction]:
    """Parameter on ``base`` of every vertex of its refined version."""
    out = []
    k = 0
    for p in refined.points:
        if k + 1 < len(base) and p == base.points[k + 1]:
            k += 1
        if p == base.points[k]:
            out.append(Fraction(k))
            continue
        a, b = base.points[k], base.points[k + 1]
        t = div(p[0] - a[0], b[0] - a[0]) if b[0] != a[0] else div(p[1] - a[1], b[1] - a[1])
        assert 0 < t < 1, "refined vertex off its base edge"
        out.append(k + t)
    return out


def _reparametrize(breakpoints, param_map) -> List[Tuple[Fraction, Fraction]]:
    out = []
    for x, y in breakpoints:
        out.append((_map_param(x, param_map[0]), _map_param(y, param_map[1])))
    return out


def _map_param(x, pmap) -> Fraction:
    i = int(x)
    if i == len(pmap) - 1:
        return pmap[-1]
    t = x - i
    return pmap[i] + (pmap[i + 1] - pmap[i]) * t


def build_gamma_star(
    sp: SimplificationState, ss: SimplificationState, run: RefinementResult
) -> Tuple[List[Tuple[Fraction, Fraction]], Fraction]:
    """Combined traversal of the original pair through the simplified one.

    Returns its breakpoints over original parameters (subdivided at every
    vertex crossing) together with the squared max leash, which upper-bounds
    the true distance.
    """
    gamma0 = _state_staircase(sp)  # (pi param, simplified pi param)
    gamma2 = [(c, a) for a, c in _state_staircase(ss)]  # (simplified sigma, sigma)
    gamma1 = _reparametrize(
        _monotone_breakpoints(run.path),
        (_param_map(run.final_pi, sp.curve()), _param_map(run.final_sigma, ss.curve())),
    )
    combined = _merge_on_shared(gamma0, gamma1)  # (pi param, simplified sigma param)
    combined = _merge_on_shared(combined, gamma2)  # (pi param, sigma param)
    combined = _subdivide_at_integers(combined)
    base_pi, base_sigma = sp.base, ss.base
    ub2 = Fraction(0)
    for u, w in combined:
        d2 = squared_distance(base_pi.point_at(u), base_sigma.point_at(w))
        if d2 > ub2:
            ub2 = Fraction(d2)
    return combined, ub2


@dataclass
class SlackMap:
    pi: List[ExactRoot]  # per original pi vertex
    sigma: List[ExactRoot]  # per original sigma vertex
    g2_pi: List[Fraction]  # exact squared leashes behind the slacks
    g2_sigma: List[Fraction]
    lower_bound: ExactRoot
    upper_bound2: Fraction

    def negative_pi(self, k: int) -> bool:
        """Exact sign of the vertex slack (no over-estimation slop)."""
        return ExactRoot.sqrt(self.g2_pi[k]).compare(self.lower_bound) == GREATER

    def negative_sigma(self, k: int) -> bool:
        return ExactRoot.sqrt(self.g2_sigma[k]).compare(self.lower_bound) == GREATER

    def any_negative(self) -> bool:
        return any(map(self.negative_pi, range(len(self.g2_pi)))) or any(
            map(self.negative_sigma, range(len(self.g2_sigma)))
        )


def compute_slack(
    sp: SimplificationState,
    ss: SimplificationState,
    lower_bound: ExactRoot,
    gamma_star: List[Tuple[Fraction, Fraction]],
    slack_bits: int = 32,
) -> SlackMap:
    """Per-vertex slack: the lower bound minus the max leash attained near
    the vertex along the combined traversal.

    Every traversal segment charges its max leash to the vertices bounding
    the edges it runs on, for both curves; hence the largest leash of the
    whole traversal always appears in some vertex's slack, which is what
    makes a slack-free state a certificate.  Leashes are over-estimated
    rationally so the slack stays a single-root value; under-estimating
    slack only marks more edges.
    """
    base_pi, base_sigma = sp.base, ss.base
    g2_pi = [Fraction(0)] * len(base_pi)
    g2_sigma = [Fraction(0)] * len(base_sigma)
    ub2 = Fraction(0)

    def charge(arr, lo, hi, d2):
        for k in range(int(lo), min(int(-((-hi) // 1)), len(arr) - 1) + 1):
            if d2 > arr[k]:
                arr[k] = d2

    leashes = [
        Fraction(squared_distance(base_pi.point_at(u), base_sigma.point_at(w)))
        for u, w in gamma_star
    ]
    ub2 = max(leashes)
    for (u0, w0), (u1, w1), d0, d1 in zip(
        gamma_star, gamma_star[1:], leashes, leashes[1:]
    ):
        d2 = d0 if d0 > d1 else d1
        charge(g2_pi, u0, u1, d2)
        charge(g2_sigma, w0, w1, d2)
    if len(gamma_star) == 1:
        u, w = gamma_star[0]
        charge(g2_pi, u, u, leashes[0])
        charge(g2_sigma, w, w, leashes[0])

    def slack_of(g2):
        leash_ub = rational_upper_bound(ExactRoot.sqrt(g2), slack_bits)
        return lower_bound.add_rational(-leash_ub)

    return SlackMap(
        [slack_of(g2) for g2 in g2_pi],
        [slack_of(g2) for g2 in g2_sigma],
        g2_pi,
        g2_sigma,
        lower_bound,
        ub2,
    )


def _marked_edges(
    g2: List[Fraction],
    state: SimplificationState,
    lower_bound: ExactRoot,
    window: int = 2,
) -> List[int]:
    """Non-original edges whose propagated leash exceeds the lower bound.

    Works on the exact squared leashes so the sign test has no rounding
    slop; mirrors `propagate_slack` (min slack == max leash)."""
    sel = state.selected
    own = []
    for k, v in enumerate(sel):
        hi = sel[k + 1] if k + 1 < len(sel) else v + 1
        own.append(max(g2[v:hi]))
    prop = [
        max(own[max(0, k - window) : min(len(own), k + window + 1)])
        for k in range(len(own))
    ]
    out = []
    for k in range(len(own) - 1):
        if state.edge_is_original(k):
            continue
        edge_g2 = prop[k] if prop[k] > prop[k + 1] else prop[k + 1]
        if ExactRoot.sqrt(edge_g2).compare(lower_bound) == GREATER:
            out.append(k)
    return out


def propagate_slack(
    vertex_slack: List[ExactRoot], state: SimplificationState, window: int = 2
) -> List[ExactRoot]:
    """Per-edge slack after the bounded propagation rule.

    A simplification vertex first inherits the minimum slack of the original
    vertices it covers, then adopts the minimum over vertices reachable
    along at most ``window`` incident simplification edges; an edge takes
    the minimum of its endpoints.  ``window=4`` reproduces the coarser
    eight-neighbour reference rule.
    """
    sel = state.selected
    own: List[ExactRoot] = []
    for k, v in enumerate(sel):
        hi = sel[k + 1] if k + 1 < len(sel) else v + 1
        cur = vertex_slack[v]
        for u in range(v + 1, hi):
            cur = exact_min(cur, vertex_slack[u])
        own.append(cur)
    prop = []
    for k in range(len(own)):
        lo = max(0, k - window)
        hi = min(len(own), k + window + 1)
        cur = own[lo]
        for u in range(lo + 1, hi):
            cur = exact_min(cur, own[u])
        prop.append(cur)
    return [exact_min(prop[k], prop[k + 1]) for k in range(len(own) - 1)]


# -- the lossless loop -----------------------------------------------------------


def _diameter2_estimate(c: Curve) -> Fraction:
    xs = [p[0] for p in c.points]
    ys = [p[1] for p in c.points]
    return Fraction((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2)


@dataclass
class LosslessReport:
    rounds: int = 0
    halvings: int = 0
    iterations: int = 0
    inserted: int = 0


def lossless_compute(
    pi: Curve,
    sigma: Curve,
    engine: str = "dijkstra",
    mu2=None,
    slack_bits: int = 32,
    report: Optional[LosslessReport] = None,
    trace=None,
) -> ExactRoot:
    """Exact distance of the original pair via lossless simplification.

    Repeats: simplify, solve the simplified pair, bound from below with the
    weighted graph, mark negative-slack non-original edges, un-simplify them;
    returns once no marked edge remains.  A non-positive lower bound halves
    the simplification budget instead.
    """
    from .refinement import compute_exact_frechet  # degenerate-input delegate

    pi = Curve.from_points(pi.points, pi.origin)
    sigma = Curve.from_points(sigma.points, sigma.origin)
    if report is None:
        report = LosslessReport()
    if len(pi) < 2 or len(sigma) < 2:
        return compute_exact_frechet(pi, sigma, engine=engine, trace=trace)
    if mu2 is None:
        mu2 = max(_diameter2_estimate(pi), _diameter2_estimate(sigma)) / 256

    while True:
        sp = initial_simplification(pi, mu2)
        ss = initial_simplification(sigma, mu2)
        halved = False
        for _ in range(len(pi) + len(sigma) + 2):
            run = run_refinement(sp.curve(), ss.curve(), engine=engine, trace=trace)
            report.rounds += 1
            report.iterations += run.iterations
            report.inserted += run.inserted
            if sp.is_identity and ss.is_identity:
                return run.distance
            lb, _ = weighted_lower_bound(
                sp, ss, slack_bits, engine, simplified_distance=run.distance
            )
            if lb.compare(EXACT_ZERO) != GREATER:
                report.halvings += 1
                if mu2 == 0 or report.halvings > 64:
                    sp = SimplificationState.build(pi, range(len(pi)))
                    ss = SimplificationState.build(sigma, range(len(sigma)))
                    continue
                mu2 = mu2 / 4
                halved = True
                break
            gamma, _ = build_gamma_star(sp, ss, run)
            slack = compute_slack(sp, ss, lb, gamma, slack_bits)
            marked_pi = _marked_edges(slack.g2_pi, sp, lb)
            marked_sigma = _marked_edges(slack.g2_sigma, ss, lb)
            if not marked_pi and not marked_sigma:
                if not slack.any_negative():
                    # No vertex is a bottleneck, so the lower bound dominates
                    # every attained leash: LB >= UB >= D_F >= LB, and the
                    # lower bound IS the exact distance of the original pair.
                    return lb
                # Negative slack survives only on original edges; certainty is
                # gone, finish at full resolution.
                return compute_exact_frechet(pi, sigma, engine=engine, trace=trace)
            if marked_pi:
                sp = sp.unsimplify(marked_pi)
            if marked_sigma:
                ss = ss.unsimplify(marked_sigma)
        else:
            # round budget exhausted; finish at full resolution
            return compute_exact_frechet(pi, sigma, engine=engine, trace=trace)
        assert halved  # the only break out of the round loop
