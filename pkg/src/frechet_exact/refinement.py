"""Output-sensitive refinement: monotonicity vertices on demand.

When the bottleneck path is non-monotone inside a column, the offending edge
gets the minimum set of monotonicity vertices that lets a monotone path cross
the column.  An event sweep raises a threshold from zero over the column's
horizontal segments, processing three event kinds:

* spawn   -- a segment's free interval becomes non-empty (its eddy weight);
* join    -- the bucket's rightmost left endpoint meets the next segment's
             right endpoint (the coincidence is an equidistance point);
* undertake -- two left endpoints swap order, invalidating a cached
             comparison in the loser tree.

The sweep yields the exact threshold at which the exit becomes reachable;
the vertices are then placed by stabbing the per-segment crossing windows at
that threshold, so one inserted vertex can serve several squeezed segments.
Rows are refined by transposing the instance and reusing the same sweep.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from .exact_numbers import EQUAL, ExactRoot, GREATER, LESS, div, simplest_between
from .geometry import (
    Curve,
    Point,
    equidistant_parameter,
    line_projection,
    nearest_parameter_on_segment,
    squared_distance,
)
from .ve_graph import (
    GridNode,
    PathMonotonicityReport,
    VEGraph,
    VEPath,
    min_cost_path_dijkstra,
    min_cost_path_sweepline,
    monotonicity_report,
)

ENGINES = {
    "dijkstra": min_cost_path_dijkstra,
    "sweepline": min_cost_path_sweepline,
}


class RefinementBoundError(RuntimeError):
    """The convergence bound was exceeded; indicates an implementation bug."""


class MalformedInstanceError(ValueError):
    pass


# -- column instances ---------------------------------------------------------


@dataclass(frozen=True)
class RowSegment:
    """One horizontal segment: a grid line of the column, sliced by free space."""

    point: Point  # the opposite-curve vertex that induces the line
    t_center: Fraction  # unclamped projection parameter onto the column edge
    m: Fraction  # squared distance to the supporting line
    spawn_d2: Fraction  # lowest threshold with a non-empty free interval
    eddy_t: Fraction  # clamped projection (the interval at spawn time)


@dataclass(frozen=True)
class ColumnInstance:
    """A non-monotone column (or transposed row) prepared for the sweep.

    ``rows`` are the grid lines strictly between the entry and exit heights;
    together with the two point sentinels they form the k+1 horizontal
    segments of the k cells kept.
    """

    axis: str  # 'col' refines an edge of pi, 'row' one of sigma
    edge_index: int
    edge_a: Point
    edge_b: Point
    q: Fraction  # squared edge length
    entry_w2: Fraction
    exit_w2: Fraction
    rows: Tuple[RowSegment, ...]

    @property
    def cell_count(self) -> int:
        return len(self.rows) + 1


def build_column_instance(
    g: VEGraph, axis: str, band: int, a: GridNode, b: GridNode
) -> ColumnInstance:
    if axis == "col":
        curve, other = g.pi, g.sigma
        a_along, a_cross = a.x, a.y
        b_along, b_cross = b.x, b.y
    else:
        curve, other = g.sigma, g.pi
        a_along, a_cross = a.y, a.x
        b_along, b_cross = b.y, b.x
    ea, eb = curve.edge(band)
    if a_along != band or b_along != band + 1:
        raise MalformedInstanceError("entry/exit not on the column boundary")
    q = squared_distance(ea, eb)
    rows = []
    # grid lines strictly between the entry and exit heights
    first = int(a_cross) + 1
    for r in range(first, len(other)):
        if r >= b_cross:
            break
        if not a_cross < r:
            continue
        s = other.points[r]
        t_c, m = line_projection(ea, eb, s)
        eddy_t, spawn = nearest_parameter_on_segment(ea, eb, s)
        rows.append(
            RowSegment(s, Fraction(t_c), Fraction(m), Fraction(spawn), Fraction(eddy_t))
        )
    return ColumnInstance(
        axis=axis,
        edge_index=band,
        edge_a=ea,
        edge_b=eb,
        q=Fraction(q),
        entry_w2=Fraction(a.weight2),
        exit_w2=Fraction(b.weight2),
        rows=tuple(rows),
    )


# -- refine events and the loser tree ----------------------------------------

_SPAWN, _JOIN, _UNDERTAKE = 0, 1, 2


@dataclass(frozen=True)
class RefineEvent:
    kind: int  # _SPAWN | _JOIN | _UNDERTAKE
    delta2: Fraction
    a: int = -1
    b: int = -1


class LoserTree:
    """Tournament over the column segments.

    Each internal node caches the child whose left endpoint lies farther
    right; a prefix query combines O(log k) cached winners with fresh
    comparisons.  Cached comparisons are kept valid by undertake events,
    generated lazily the first time a pair is compared.
    """

    def __init__(self, sweep: "_ColumnSweep"):
        self.sweep = sweep
        k = sweep.count
        size = 1
        while size < k:
            size *= 2
        self.size = size
        self.win: List[Optional[int]] = [None] * (2 * size)

    def activate(self, idx: int, d2: Fraction) -> None:
        node = self.size + idx
        self.win[node] = idx
        self._pull_up(node, d2)

    def refresh(self, idx: int, d2: Fraction) -> None:
        if self.win[self.size + idx] is not None:
            self._pull_up(self.size + idx, d2)

    def _pull_up(self, node: int, d2: Fraction) -> None:
        node //= 2
        while node >= 1:
            a, b = self.win[2 * node], self.win[2 * node + 1]
            if a is None:
                self.win[node] = b
            elif b is None:
                self.win[node] = a
            else:
                self.win[node] = self.sweep.left_winner(a, b, d2, schedule=True)
            node //= 2

    def prefix_winner(self, hi: int, d2: Fraction) -> int:
        """Winner over active segments 0..hi (inclusive)."""
        result = self._query(1, 0, self.size - 1, hi, d2)
        assert result is not None
        return result

    def _query(self, node, node_lo, node_hi, hi, d2):
        if node_lo > hi or self.win[node] is None:
            return None
        if node_hi <= hi:
            return self.win[node]
        mid = (node_lo + node_hi) // 2
        left = self._query(2 * node, node_lo, mid, hi, d2)
        right = self._query(2 * node + 1, mid + 1, node_hi, hi, d2)
        if left is None:
            return right
        if right is None:
            return left
        return self.sweep.left_winner(left, right, d2, schedule=False)


class BucketList:
    """Linked buckets of consecutive segments; the bottom one is the
    reachable prefix, every other segment is its own bucket."""

    def __init__(self, count: int):
        self.count = count
        self.bottom_end = 0  # bottom bucket is 0..bottom_end inclusive

    @property
    def complete(self) -> bool:
        return self.bottom_end == self.count - 1

    def merge_next(self) -> int:
        self.bottom_end += 1
        return self.bottom_end

    def buckets(self) -> List[Tuple[int, int]]:
        out = [(0, self.bottom_end)]
        out.extend((i, i) for i in range(self.bottom_end + 1, self.count))
        return out


class _ColumnSweep:
    """Event loop over one column instance (all thresholds squared)."""

    _SENTINEL_BOTTOM = "a"
    _SENTINEL_TOP = "b"

    def __init__(self, instance: ColumnInstance):
        self.inst = instance
        self.q = instance.q
        # segment 0 and segment count-1 are the point sentinels at the entry
        # and exit; the rows sit in between, bottom to top.
        self.count = len(instance.rows) + 2
        self.rows = instance.rows
        self.zero = ExactRoot.from_rational(0)
        self.one = ExactRoot.from_rational(1)

    # segment accessors ------------------------------------------------------

    def is_sentinel(self, idx: int) -> bool:
        return idx == 0 or idx == self.count - 1

    def row(self, idx: int) -> RowSegment:
        return self.rows[idx - 1]

    def spawn_d2(self, idx: int) -> Fraction:
        if idx == 0:
            return self.inst.entry_w2
        if idx == self.count - 1:
            return self.inst.exit_w2
        return self.row(idx).spawn_d2

    def left(self, idx: int, d2: Fraction) -> ExactRoot:
        if idx == 0:
            return self.zero
        if idx == self.count - 1:
            return self.one
        seg = self.row(idx)
        raw = ExactRoot(seg.t_center, div(d2 - seg.m, self.q), -1)
        return raw if raw.compare(self.zero) == GREATER else self.zero

    def right(self, idx: int, d2: Fraction) -> ExactRoot:
        if idx == 0:
            return self.zero
        if idx == self.count - 1:
            return self.one
        seg = self.row(idx)
        raw = ExactRoot(seg.t_center, div(d2 - seg.m, self.q), 1)
        return raw if raw.compare(self.one) == LESS else self.one

    # comparisons and events ---------------------------------------------------

    def left_winner(self, a: int, b: int, d2: Fraction, schedule: bool) -> int:
        c = self.left(a, d2).compare(self.left(b, d2))
        if c == EQUAL:
            winner = self._tie_winner(a, b)
        else:
            winner = a if c == GREATER else b
        if schedule:
            self._maybe_schedule_undertake(a, b, d2)
        return winner

    def _tie_winner(self, a: int, b: int) -> int:
        # At a tie the future winner is the endpoint that shrinks slower:
        # sentinels are constant, and a row's root term sqrt((d2 - m)/q)
        # grows slower the *smaller* its line distance m.  Remaining ties
        # are value-identical; pick the lower id.
        sa, sb = self.is_sentinel(a), self.is_sentinel(b)
        if sa != sb:
            return a if sa else b
        if not sa:
            ma, mb = self.row(a).m, self.row(b).m
            if ma != mb:
                return a if ma < mb else b
        return min(a, b)

    def _maybe_schedule_undertake(self, a: int, b: int, d2: Fraction) -> None:
        key = (a, b) if a < b else (b, a)
        if key in self._pair_seen:
            return
        self._pair_seen.add(key)
        if self.is_sentinel(a) or self.is_sentinel(b):
            self._schedule_sentinel_cross(a, b, d2)
            return
        ra, rb = self.row(a), self.row(b)
        # Clamping a left endpoint to zero can flip the order without an
        # unclamped crossing; schedule the clamp thresholds as well (extra
        # events are harmless, refreshes are idempotent).
        for seg in (ra, rb):
            if seg.t_center > 0:
                d_clamp = seg.m + self.q * seg.t_center * seg.t_center
                if d_clamp > d2:
                    self._push(RefineEvent(_UNDERTAKE, d_clamp, a, b))
        delta = ra.t_center - rb.t_center
        if delta == 0 or ra.m == rb.m:
            return  # unclamped left endpoints never swap order
        gap2 = (rb.m - ra.m) ** 2
        d_swap = (ra.m + rb.m + div(gap2, 2 * delta * delta * self.q) + delta * delta * self.q / 2) / 2
        if d_swap <= d2:
            return
        if d_swap < ra.m or d_swap < rb.m:
            return  # spurious root of the squared system
        la = ExactRoot(ra.t_center, div(d_swap - ra.m, self.q), -1)
        lb = ExactRoot(rb.t_center, div(d_swap - rb.m, self.q), -1)
        if la.compare(lb) != EQUAL:
            return
        if la.compare(self.zero) != GREATER:
            return  # both clamped by then; order is irrelevant at zero
        self._push(RefineEvent(_UNDERTAKE, d_swap, a, b))

    def _schedule_sentinel_cross(self, a: int, b: int, d2: Fraction) -> None:
        # A row's left endpoint can sink to a sentinel's constant endpoint.
        row_idx = b if self.is_sentinel(a) else a
        sent_idx = a if self.is_sentinel(a) else b
        if self.is_sentinel(row_idx):
            return
        const = Fraction(0) if sent_idx == 0 else Fraction(1)
        seg = self.row(row_idx)
        if seg.t_center <= const:
            return
        d_swap = seg.m + self.q * (seg.t_center - const) ** 2
        if d_swap > d2:
            self._push(RefineEvent(_UNDERTAKE, d_swap, a, b))

    def join_threshold(self, a: int, b: int) -> Tuple[Fraction, Fraction]:
        """Lowest threshold at which segments a and b overlap vertically.

        Returns ``(delta2, t)`` with t the overlap point.  For two rows this
        is the min-max of two equal-leading-coefficient parabolas; point
        sentinels contribute their fixed location.
        """
        sa, sb = self.is_sentinel(a), self.is_sentinel(b)
        if sa and sb:
            raise MalformedInstanceError("sentinel-sentinel join")
        if sa or sb:
            sent = a if sa else b
            row = b if sa else a
            t = Fraction(0) if sent == 0 else Fraction(1)
            d2 = max(self._row_d2_at(row, t), self.spawn_d2(sent))
            return d2, t
        ra, rb = self.row(a), self.row(b)
        got = equidistant_parameter(self.inst.edge_a, self.inst.edge_b, ra.point, rb.point)
        candidates = []
        if got is not None:
            candidates.append(got)
        for t in (ra.eddy_t, rb.eddy_t, Fraction(0), Fraction(1)):
            candidates.append((t, max(self._row_d2_at(a, t), self._row_d2_at(b, t))))
        d2, t = min((d2, t) for t, d2 in candidates)
        return Fraction(d2), Fraction(t)

    def _row_d2_at(self, idx: int, t: Fraction) -> Fraction:
        seg = self.row(idx)
        return self.q * (t - seg.t_center) ** 2 + seg.m

    # the event loop -----------------------------------------------------------

    def _push(self, ev: RefineEvent) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (ev.delta2, ev.kind, self._seq, ev))

    def run(self) -> Tuple[List[Tuple[Fraction, Fraction]], Fraction]:
        delta2 = self._final_threshold()
        return self._stab_windows(delta2), delta2

    def _final_threshold(self) -> Fraction:
        """Sweep the event queue until the exit sentinel joins the bucket;
        the resulting threshold first admits a monotone crossing."""
        self._heap = []
        self._seq = 0
        self._pair_seen = set()
        self._spawn_pushed = set()
        self._last_join = None
        tree = LoserTree(self)
        buckets = BucketList(self.count)
        d2_now = self.spawn_d2(0)
        tree.activate(0, d2_now)

        while not buckets.complete:
            gate = buckets.bottom_end + 1
            if self.spawn_d2(gate) <= d2_now:
                win = tree.prefix_winner(buckets.bottom_end, d2_now)
                if self.left(win, d2_now).compare(self.right(gate, d2_now)) != GREATER:
                    buckets.merge_next()
                    tree.activate(gate, d2_now)
                    self._last_join = None
                    continue
                jd2, _ = self.join_threshold(win, gate)
                signature = (win, gate, jd2)
                if self._last_join != signature:
                    self._last_join = signature
                    self._push(RefineEvent(_JOIN, jd2, win, gate))
            elif gate not in self._spawn_pushed:
                self._spawn_pushed.add(gate)
                self._push(RefineEvent(_SPAWN, self.spawn_d2(gate), gate))

            delta2, _, _, ev = heapq.heappop(self._heap)
            if delta2 > d2_now:
                d2_now = delta2
            if ev.kind == _UNDERTAKE:
                tree.refresh(ev.a, d2_now)
                tree.refresh(ev.b, d2_now)
                self._last_join = None
            elif ev.kind == _JOIN:
                self._last_join = None
            # spawn events need no bookkeeping: the loop head re-tests the gate

        return d2_now

    def _stab_windows(self, delta2: Fraction) -> List[Tuple[Fraction, Fraction]]:
        """Minimum vertex set for a monotone node crossing at the threshold.

        Rows are crossed bottom-up at non-decreasing positions inside their
        free intervals; a position is usable only up to the running minimum
        of the right endpoints above (anything farther right strands a later
        row).  Rows lacking a usable node open a deferred stab, narrowed
        while consecutive rows can ride it and closed into one inserted
        vertex; join coincidences appear as degenerate windows whose stab is
        the equidistance point.
        """
        k = self.count
        caps = [None] * k  # min of right endpoints from row i upward
        run_hi = self.right(k - 1, delta2)
        for i in range(k - 1, -1, -1):
            hi = self.right(i, delta2)
            if hi.compare(run_hi) == LESS:
                run_hi = hi
            caps[i] = run_hi

        cur = self.zero  # position of the last fixed crossing
        open_window = None  # deferred stab position interval
        stabs: List[Tuple[Fraction, Fraction]] = []

        def close():
            nonlocal cur, open_window
            pos = self._rational_in(*open_window)
            stabs.append((pos, delta2))
            cur = ExactRoot.from_rational(pos)
            open_window = None

        for i in range(1, k - 1):
            row_lo = self.left(i, delta2)
            win_hi = caps[i]
            if open_window is not None:
                glo, ghi = open_window
                glo = row_lo if row_lo.compare(glo) == GREATER else glo
                ghi = win_hi if win_hi.compare(ghi) == LESS else ghi
                if glo.compare(ghi) != GREATER:
                    open_window = (glo, ghi)  # this row rides the open stab
                    continue
                close()
            lo = row_lo if row_lo.compare(cur) == GREATER else cur
            assert lo.compare(win_hi) != GREATER, "infeasible window at the threshold"
            best = None
            for cand in (Fraction(0), self.row(i).eddy_t, Fraction(1)):
                root = ExactRoot.from_rational(cand)
                if lo.compare(root) != GREATER and win_hi.compare(root) != LESS:
                    if best is None or cand < best:
                        best = cand
            if best is not None:
                cur = ExactRoot.from_rational(best)
            else:
                open_window = (lo, win_hi)
        if open_window is not None:
            close()
        return stabs

    def _rational_in(self, lo: ExactRoot, hi: ExactRoot) -> Fraction:
        """A rational strictly inside (0,1) lying in [lo, hi]."""
        for cand in (hi, lo):
            if cand.is_rational and 0 < cand.rational < 1:
                return cand.rational
        # Degenerate windows always end at a rational coincidence, so here
        # the window is open and the simplest rational inside keeps later
        # arithmetic small.
        assert lo.compare(hi) == LESS, "irrational degenerate window"
        return simplest_between(lo, hi)


def sweep_column(instance: ColumnInstance) -> Tuple[List[Tuple[Fraction, Fraction]], Fraction]:
    """Run the event sweep; returns the monotonicity vertices and the final
    threshold at which the exit becomes reachable."""
    return _ColumnSweep(instance).run()


def refine_column(instance: ColumnInstance) -> List[Tuple[Fraction, Fraction]]:
    """Minimum set of monotonicity vertices for one non-monotone column."""
    return sweep_column(instance)[0]


# -- the refinement loop -------------------------------------------------------


def _split_decreasing_step(path: VEPath, band: int, axis: int):
    """Local midpoint of the first coordinate-decreasing step in a band;
    splitting there removes the offending eddy-to-eddy edge."""
    coords = [(node.x, node.y)[axis] for node in path.nodes]
    for c0, c1 in zip(coords, coords[1:]):
        if c1 < c0 and band <= c1 and c0 <= band + 1:
            return (c0 + c1) / 2 - band
    return None


def refine_step(
    g: VEGraph, pi: Curve, sigma: Curve, report: PathMonotonicityReport, path: Optional[VEPath] = None
) -> Tuple[Curve, Curve, int]:
    """Insert monotonicity vertices for every non-monotone column and row."""
    ins_pi = {}
    for band, a, b in report.bad_columns:
        verts = refine_column(build_column_instance(g, "col", band, a, b))
        if verts:
            ins_pi[band] = [t for t, _ in verts]
    ins_sigma = {}
    for band, a, b in report.bad_rows:
        verts = refine_column(build_column_instance(g, "row", band, a, b))
        if verts:
            ins_sigma[band] = [t for t, _ in verts]
    if not ins_pi and not ins_sigma and path is not None:
        # Every window was already stabbed, yet no monotone path realizes the
        # bottleneck: split the observed backtracking edges directly.
        for band, _, _ in report.bad_columns:
            t = _split_decreasing_step(path, band, 0)
            if t is not None:
                ins_pi[band] = [t]
        for band, _, _ in report.bad_rows:
            t = _split_decreasing_step(path, band, 1)
            if t is not None:
                ins_sigma[band] = [t]
    inserted = sum(len(v) for v in ins_pi.values()) + sum(len(v) for v in ins_sigma.values())
    new_pi = pi.with_inserted(ins_pi) if ins_pi else pi
    new_sigma = sigma.with_inserted(ins_sigma) if ins_sigma else sigma
    return new_pi, new_sigma, inserted


@dataclass
class TraceRecord:
    iteration: int
    graph: VEGraph
    path: VEPath
    report: PathMonotonicityReport
    inserted: int


def iteration_bound(n: int, m: int) -> int:
    return n * m * m + m * n * n


def _point_to_curve_d2(p: Point, curve: Curve):
    # leash to a point is convex along each edge, so vertices carry the max
    return max(squared_distance(p, v) for v in curve.points)


@dataclass
class RefinementResult:
    distance: ExactRoot
    graph: VEGraph
    path: VEPath
    iterations: int
    inserted: int
    final_pi: Curve = None
    final_sigma: Curve = None


def run_refinement(
    pi: Curve,
    sigma: Curve,
    engine: str = "dijkstra",
    trace: Optional[Callable[[TraceRecord], None]] = None,
) -> RefinementResult:
    """The refinement loop on canonical curves of length >= 2 each.

    Loops solve -> monotone? -> refine until a monotone path realizes the
    bottleneck; the iteration count is asserted against the convergence
    bound ``n*m^2 + m*n^2`` for the input sizes.
    """
    engine_fn = ENGINES[engine]
    bound = iteration_bound(len(pi), len(sigma))
    cur_pi, cur_sigma = pi, sigma
    iterations = 0
    total_inserted = 0
    while True:
        iterations += 1
        if iterations > bound:
            raise RefinementBoundError(
                f"refinement exceeded {bound} iterations for sizes "
                f"{len(pi)}x{len(sigma)}"
            )
        g = VEGraph(cur_pi, cur_sigma)
        path = engine_fn(g)
        report = monotonicity_report(path)
        if report.monotone:
            if trace is not None:
                trace(TraceRecord(iterations, g, path, report, 0))
            return RefinementResult(
                ExactRoot.sqrt(path.bottleneck2),
                g,
                path,
                iterations,
                total_inserted,
                cur_pi,
                cur_sigma,
            )
        cur_pi, cur_sigma, inserted = refine_step(g, cur_pi, cur_sigma, report, path)
        total_inserted += inserted
        if trace is not None:
            trace(TraceRecord(iterations, g, path, report, inserted))
        assert inserted >= 1, "non-monotone path but nothing to refine"


def compute_exact_frechet(
    pi: Curve,
    sigma: Curve,
    engine: str = "dijkstra",
    trace: Optional[Callable[[TraceRecord], None]] = None,
) -> ExactRoot:
    """Exact continuous Frechet distance of two integer-coordinate curves."""
    pi = Curve.from_points(pi.points, pi.origin)
    sigma = Curve.from_points(sigma.points, sigma.origin)
    if len(pi) == 1 and len(sigma) == 1:
        return ExactRoot.sqrt(squared_distance(pi.points[0], sigma.points[0]))
    if len(pi) == 1:
        return ExactRoot.sqrt(_point_to_curve_d2(pi.points[0], sigma))
    if len(sigma) == 1:
        return ExactRoot.sqrt(_point_to_curve_d2(sigma.points[0], pi))
    return run_refinement(pi, sigma, engine=engine, trace=trace).distance
