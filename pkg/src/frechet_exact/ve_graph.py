"""Implicit vertex-event graph over a curve pair and its bottleneck engines.

The graph lives on the parameter grid ``[0, n-1] x [0, m-1]``: one corner per
vertex pair and one eddy per grid edge (the distance-minimizing point of the
edge's elevation slice).  Weights are computed on demand and memoized, the
grid is never materialized.  Eddys that land on a grid corner are merged into
that corner, taking the corner identity.

Two engines compute the same optimum: a bottleneck Dijkstra and a
left-to-right sweepline that only ever holds one column of values.  Both
extract the reported path the same way, preferring an xy-monotone path
whenever one realizes the optimum (that existence check is also the
refinement loop's termination test).
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from .geometry import Curve, nearest_parameter_on_segment, squared_distance

NodeId = Tuple[str, int, int]

_KIND_RANK = {"C": 0, "H": 1, "V": 2}


@dataclass(frozen=True)
class GridNode:
    """Materialized graph node: a corner or an eddy with its location."""

    kind: str  # 'C' corner, 'H' eddy on a row line, 'V' eddy on a column line
    i: int
    j: int
    x: Fraction
    y: Fraction
    weight2: Fraction

    @property
    def node_id(self) -> NodeId:
        return (self.kind, self.i, self.j)


@dataclass(frozen=True)
class VEPath:
    nodes: Tuple[GridNode, ...]
    bottleneck2: object  # squared distance; an ExactRoot under edge weights


@dataclass(frozen=True)
class PathMonotonicityReport:
    monotone: bool
    bad_columns: Tuple[Tuple[int, GridNode, GridNode], ...]
    bad_rows: Tuple[Tuple[int, GridNode, GridNode], ...]


class VEGraph:
    """Implicit graph handle; immutable after construction."""

    def __init__(self, pi: Curve, sigma: Curve):
        if len(pi) < 2 or len(sigma) < 2:
            raise ValueError("VE-graph needs curves with at least two vertices")
        self.pi = pi
        self.sigma = sigma
        self.n = len(pi)
        self.m = len(sigma)
        self._corner: dict = {}
        self._h: dict = {}
        self._v: dict = {}

    # -- node construction -------------------------------------------------

    def corner_w2(self, i: int, j: int):
        key = (i, j)
        w = self._corner.get(key)
        if w is None:
            w = squared_distance(self.pi.points[i], self.sigma.points[j])
            self._corner[key] = w
        return w

    def h_eddy(self, i: int, j: int):
        """Eddy of row line j within column i: ``(node_id, t, w2)``."""
        key = (i, j)
        got = self._h.get(key)
        if got is None:
            a, b = self.pi.edge(i)
            t, w2 = nearest_parameter_on_segment(a, b, self.sigma.points[j])
            if t == 0:
                got = (("C", i, j), t, w2)
            elif t == 1:
                got = (("C", i + 1, j), t, w2)
            else:
                got = (("H", i, j), t, w2)
            self._h[key] = got
        return got

    def v_eddy(self, i: int, j: int):
        """Eddy of column line i within row j."""
        key = (i, j)
        got = self._v.get(key)
        if got is None:
            a, b = self.sigma.edge(j)
            t, w2 = nearest_parameter_on_segment(a, b, self.pi.points[i])
            if t == 0:
                got = (("C", i, j), t, w2)
            elif t == 1:
                got = (("C", i, j + 1), t, w2)
            else:
                got = (("V", i, j), t, w2)
            self._v[key] = got
        return got

    def location(self, nid: NodeId) -> Tuple:
        kind, i, j = nid
        if kind == "C":
            return (i, j)
        if kind == "H":
            _, t, _ = self.h_eddy(i, j)
            return (i + t, j)
        _, t, _ = self.v_eddy(i, j)
        return (i, j + t)

    def weight2(self, nid: NodeId):
        kind, i, j = nid
        if kind == "C":
            return self.corner_w2(i, j)
        if kind == "H":
            return self.h_eddy(i, j)[2]
        return self.v_eddy(i, j)[2]

    def materialize(self, nid: NodeId) -> GridNode:
        x, y = self.location(nid)
        return GridNode(nid[0], nid[1], nid[2], Fraction(x), Fraction(y), Fraction(self.weight2(nid)))

    @property
    def start(self) -> NodeId:
        return ("C", 0, 0)

    @property
    def goal(self) -> NodeId:
        return ("C", self.n - 1, self.m - 1)

    def node_census(self):
        """Distinct node counts (corners, row-line eddys, column-line eddys)."""
        corners = self.n * self.m
        h = sum(
            1
            for i in range(self.n - 1)
            for j in range(self.m)
            if self.h_eddy(i, j)[0][0] == "H"
        )
        v = sum(
            1
            for i in range(self.n)
            for j in range(self.m - 1)
            if self.v_eddy(i, j)[0][0] == "V"
        )
        return corners, h, v

    # -- adjacency ---------------------------------------------------------

    def cells_of(self, nid: NodeId):
        kind, i, j = nid
        if kind == "C":
            cells = ((i - 1, j - 1), (i - 1, j), (i, j - 1), (i, j))
        elif kind == "H":
            cells = ((i, j - 1), (i, j))
        else:
            cells = ((i - 1, j), (i, j))
        return [
            (ci, cj)
            for ci, cj in cells
            if 0 <= ci < self.n - 1 and 0 <= cj < self.m - 1
        ]

    def cell_roles(self, ci: int, cj: int):
        """The up-to-eight distinct nodes of a cell, with the special pairs."""
        bottom = self.h_eddy(ci, cj)[0]
        top = self.h_eddy(ci, cj + 1)[0]
        left = self.v_eddy(ci, cj)[0]
        right = self.v_eddy(ci + 1, cj)[0]
        nodes = {
            ("C", ci, cj),
            ("C", ci + 1, cj),
            ("C", ci, cj + 1),
            ("C", ci + 1, cj + 1),
            bottom,
            top,
            left,
            right,
        }
        return nodes, (bottom, top), (left, right)

    def dominates(self, u: NodeId, v: NodeId) -> bool:
        ux, uy = self.location(u)
        vx, vy = self.location(v)
        return vx >= ux and vy >= uy

    def successors(self, u: NodeId) -> List[NodeId]:
        """Out-neighbours: monotone pairs within shared cells plus the two
        directed eddy-to-eddy edges per cell (which may be non-monotone)."""
        out = set()
        for ci, cj in self.cells_of(u):
            nodes, (bottom, top), (left, right) = self.cell_roles(ci, cj)
            for v in nodes:
                if v != u and self.dominates(u, v):
                    out.add(v)
            if u == bottom and top != u:
                out.add(top)
            if u == left and right != u:
                out.add(right)
        return sorted(out, key=self._sort_key)

    def successors_respecting(self, u: NodeId, tx: bool, ty: bool):
        """State-aware steps that keep the path VE-respecting.

        A decreasing step may drop at most to the floor of the band the path
        is still inside; landing exactly on the floor is a measure-zero touch
        and sets the touch flag for that axis, after which no further descent
        is allowed there until the path rises again.  Row and column
        restrictions stay connected by construction, at the cost of one
        history bit per axis instead of path-dependent state.
        """
        ux, uy = self.location(u)
        floor_x = -((-ux) // 1) - 1  # ceil(ux) - 1
        floor_y = -((-uy) // 1) - 1
        out = []
        for v in self.successors(u):
            vx, vy = self.location(v)
            if vx < ux and (tx or vx < floor_x):
                continue
            if vy < uy and (ty or vy < floor_y):
                continue
            ntx = vx == int(vx) and (vx < ux or (vx == ux and tx))
            nty = vy == int(vy) and (vy < uy or (vy == uy and ty))
            out.append((v, bool(ntx), bool(nty)))
        return out

    def _sort_key(self, nid: NodeId):
        x, y = self.location(nid)
        return (x, y, _KIND_RANK[nid[0]])


def build_graph(pi: Curve, sigma: Curve) -> VEGraph:
    return VEGraph(pi, sigma)


# -- engines ----------------------------------------------------------------


def _default_value(g: VEGraph) -> Callable[[NodeId], Fraction]:
    return g.weight2


def _bottleneck_dijkstra(g: VEGraph, value) -> object:
    start, goal = g.start, g.goal
    init = (start, False, False)
    best = {init: value(start)}
    heap = [(best[init], g._sort_key(start), init)]
    settled = set()
    while heap:
        d, _, state = heapq.heappop(heap)
        if state in settled:
            continue
        settled.add(state)
        u = state[0]
        if u == goal:
            return d
        for v, tx, ty in g.successors_respecting(*state):
            w = value(v)
            cand = w if w > d else d
            nstate = (v, tx, ty)
            old = best.get(nstate)
            if old is None or cand < old:
                best[nstate] = cand
                heapq.heappush(heap, (cand, g._sort_key(v), nstate))
    raise AssertionError("VE-graph sink unreachable")  # boundary walk always exists


def _bottleneck_sweepline(g: VEGraph, value) -> object:
    """Left-to-right scan holding one column of values at a time."""
    start, goal = g.start, g.goal
    frontier = {(start, False, False): value(start)}
    for ci in range(g.n - 1):
        nodes = set()
        for cj in range(g.m - 1):
            cell_nodes, _, _ = g.cell_roles(ci, cj)
            nodes |= cell_nodes
        states = [(u, tx, ty) for u in nodes for tx in (False, True) for ty in (False, True)]
        edges = {}
        indeg = {s: 0 for s in states}
        for s in states:
            succ = [
                (v, tx, ty)
                for v, tx, ty in g.successors_respecting(*s)
                if v in nodes
            ]
            edges[s] = succ
            for t in succ:
                indeg[t] += 1
        vals = {s: frontier.get(s) for s in states}
        queue = deque(s for s in states if indeg[s] == 0)
        while queue:
            s = queue.popleft()
            du = vals[s]
            for t in edges[s]:
                if du is not None:
                    w = value(t[0])
                    cand = w if w > du else du
                    if vals[t] is None or cand < vals[t]:
                        vals[t] = cand
                indeg[t] -= 1
                if indeg[t] == 0:
                    queue.append(t)
        frontier = {
            s: dv
            for s, dv in vals.items()
            if dv is not None and g.location(s[0])[0] >= ci + 1
        }
    results = [dv for (u, _, _), dv in frontier.items() if u == goal]
    assert results, "VE-graph sink unreachable"
    return min(results)


def _dfs_path(g: VEGraph, value, limit, monotone_only: bool) -> Optional[List[NodeId]]:
    """Deterministic DFS through nodes with value <= limit.

    With ``monotone_only`` this is the termination test: does a monotone path
    realize the bottleneck value?  Otherwise the walk still honours the
    VE-respecting step rule via the touch-state machine.
    """
    start, goal = g.start, g.goal
    if value(start) > limit or value(goal) > limit:
        return None
    if monotone_only:
        parent = {start: None}
        stack = [start]
        while stack:
            u = stack.pop()
            if u == goal:
                path = []
                cur = u
                while cur is not None:
                    path.append(cur)
                    cur = parent[cur]
                path.reverse()
                return path
            for v in reversed(g.successors(u)):
                if v in parent or not g.dominates(u, v) or value(v) > limit:
                    continue
                parent[v] = u
                stack.append(v)
        return None
    init = (start, False, False)
    parent = {init: None}
    stack = [init]
    while stack:
        state = stack.pop()
        if state[0] == goal:
            path = []
            cur = state
            while cur is not None:
                path.append(cur[0])
                cur = parent[cur]
            path.reverse()
            return path
        for nxt in reversed(g.successors_respecting(*state)):
            if nxt in parent or value(nxt[0]) > limit:
                continue
            parent[nxt] = state
            stack.append(nxt)
    return None


def _extract_path(g: VEGraph, value, limit) -> VEPath:
    nids = _dfs_path(g, value, limit, monotone_only=True)
    if nids is None:
        nids = _dfs_path(g, value, limit, monotone_only=False)
    assert nids is not None, "no path at the optimal bottleneck"
    return VEPath(tuple(g.materialize(nid) for nid in nids), limit)


def min_cost_path_dijkstra(g: VEGraph, value_fn=None) -> VEPath:
    value = value_fn if value_fn is not None else _default_value(g)
    return _extract_path(g, value, _bottleneck_dijkstra(g, value))


def min_cost_path_sweepline(g: VEGraph, value_fn=None) -> VEPath:
    value = value_fn if value_fn is not None else _default_value(g)
    return _extract_path(g, value, _bottleneck_sweepline(g, value))


# -- path analysis -----------------------------------------------------------


def _runs(path: VEPath, axis: int):
    """Non-monotone visits: one maximal run per offending unit band."""
    coords = [(node.x, node.y)[axis] for node in path.nodes]
    spans = {}
    for idx in range(len(coords) - 1):
        c0, c1 = coords[idx], coords[idx + 1]
        if c1 >= c0:
            continue
        # Decreasing step: both endpoints lie in the band [int(c1), int(c1)+1].
        band = int(c1)
        lo, hi = spans.get(band, (idx, idx + 1))
        spans[band] = (min(lo, idx), max(hi, idx + 1))
    out = []
    for band in sorted(spans):
        lo, hi = spans[band]
        while lo > 0 and band <= coords[lo - 1] <= band + 1:
            lo -= 1
        while hi < len(coords) - 1 and band <= coords[hi + 1] <= band + 1:
            hi += 1
        out.append((band, path.nodes[lo], path.nodes[hi]))
    return tuple(out)


def monotonicity_report(path: VEPath) -> PathMonotonicityReport:
    bad_columns = _runs(path, 0)
    bad_rows = _runs(path, 1)
    return PathMonotonicityReport(
        monotone=not bad_columns and not bad_rows,
        bad_columns=bad_columns,
        bad_rows=bad_rows,
    )


def interpolated_ve_distance(g: VEGraph, path: VEPath):
    """Squared max leash of the greedy monotone morph of the path.

    The morph clamps every step to be non-decreasing in both coordinates.
    Each morphed segment stays inside one grid cell, where the squared
    elevation is a convex quadratic, so its maximum sits at a breakpoint and
    the whole value is evaluated exactly at the breakpoints.
    """
    first = path.nodes[0]
    cx, cy = first.x, first.y
    best = squared_distance(g.pi.point_at(cx), g.sigma.point_at(cy))
    for node in path.nodes[1:]:
        tx = node.x if node.x > cx else cx
        ty = node.y if node.y > cy else cy
        if (tx, ty) != (cx, cy):
            cx, cy = tx, ty
            d2 = squared_distance(g.pi.point_at(cx), g.sigma.point_at(cy))
            if d2 > best:
                best = d2
    return best
