"""Planar curves with rational coordinates and the primitives on them.

All distances are kept squared so that every quantity stays rational; square
roots appear only at API boundaries as `ExactRoot`.  Original input vertices
are 32-bit integers, vertices inserted later by refinement are rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from .exact_numbers import ExactRoot, GREATER, LESS, div

Coord = Union[int, Fraction]
Point = Tuple[Coord, Coord]
SquaredDistance = Union[int, Fraction]


class DegenerateCurveError(ValueError):
    """Curve too short for the requested operation."""


def squared_distance(p: Point, q: Point) -> SquaredDistance:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def lerp(a: Point, b: Point, t: Coord) -> Point:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def _dot(ux, uy, vx, vy):
    return ux * vx + uy * vy


def segment_length2(a: Point, b: Point) -> SquaredDistance:
    return squared_distance(a, b)


def line_projection(a: Point, b: Point, p: Point) -> Tuple[Fraction, Fraction]:
    """Unclamped projection of p onto the line through a, b.

    Returns ``(t, m)`` with the squared distance along the segment parameter
    expressible as ``q*(x - t)**2 + m`` where ``q = |b - a|**2``.  Requires
    ``a != b``.
    """
    q = squared_distance(a, b)
    if q == 0:
        raise DegenerateCurveError("projection onto a zero-length segment")
    t = div(_dot(p[0] - a[0], p[1] - a[1], b[0] - a[0], b[1] - a[1]), q)
    m = squared_distance(p, a) - q * t * t
    return t, m


def nearest_parameter_on_segment(
    a: Point, b: Point, p: Point
) -> Tuple[Fraction, SquaredDistance]:
    """Clamped projection: the eddy location and weight on segment ab.

    Zero-length segments are not an error; they yield ``t = 0``.
    """
    q = squared_distance(a, b)
    if q == 0:
        return Fraction(0), squared_distance(p, a)
    t, m = line_projection(a, b, p)
    if t <= 0:
        return Fraction(0), squared_distance(p, a)
    if t >= 1:
        return Fraction(1), squared_distance(p, b)
    return t, m


def equidistant_parameter(
    a: Point, b: Point, s: Point, s2: Point
) -> Optional[Tuple[Fraction, SquaredDistance]]:
    """Minimizer of ``max(d(., s), d(., s2))`` on segment ab, when it is an
    equidistance point.

    Both squared-distance parabolas share the leading coefficient
    ``|b - a|**2``, so the equidistance condition is linear and the crossing
    parameter rational.  Returns None when the unconstrained minimizer is the
    minimum of a single distance (the event degenerates to an edge event);
    the crossing is the min-max exactly when it lies between the two
    unclamped projection parameters.  The returned parameter is clamped to
    [0, 1] with the max squared distance evaluated there.
    """
    if s == s2:
        return nearest_parameter_on_segment(a, b, s)
    q = squared_distance(a, b)
    if q == 0:
        raise DegenerateCurveError("equidistant point on a zero-length segment")
    dxe, dye = b[0] - a[0], b[1] - a[1]
    denom = 2 * _dot(s2[0] - s[0], s2[1] - s[1], dxe, dye)
    if denom == 0:
        return None
    t_star = div(squared_distance(s2, a) - squared_distance(s, a), denom)
    t_s, _ = line_projection(a, b, s)
    t_s2, _ = line_projection(a, b, s2)
    lo, hi = (t_s, t_s2) if t_s <= t_s2 else (t_s2, t_s)
    if not (lo <= t_star <= hi):
        return None
    t = min(max(t_star, Fraction(0)), Fraction(1))
    pt = lerp(a, b, t)
    return t, max(squared_distance(pt, s), squared_distance(pt, s2))


def free_interval_on_segment(
    a: Point, b: Point, p: Point, delta2: SquaredDistance
) -> Optional[Tuple[ExactRoot, ExactRoot]]:
    """The sublevel slice ``{t in [0,1] : |p - (a + t(b-a))|^2 <= delta2}``.

    Returns the (possibly degenerate) interval with endpoints as exact
    quadratic roots, or None when empty.
    """
    q = squared_distance(a, b)
    if q == 0:
        raise DegenerateCurveError("free interval on a zero-length segment")
    t, m = line_projection(a, b, p)
    rad = div(delta2 - m, q)
    if rad < 0:
        return None
    lo = ExactRoot(t, rad, -1)
    hi = ExactRoot(t, rad, 1)
    zero = ExactRoot.from_rational(0)
    one = ExactRoot.from_rational(1)
    if hi.compare(zero) == LESS or lo.compare(one) == GREATER:
        return None
    if lo.compare(zero) == LESS:
        lo = zero
    if hi.compare(one) == GREATER:
        hi = one
    return lo, hi


@dataclass(frozen=True)
class Curve:
    """Ordered vertex list with per-vertex original-input index tags."""

    points: Tuple[Point, ...]
    origin: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.origin:
            object.__setattr__(self, "origin", tuple(range(len(self.points))))
        if len(self.origin) != len(self.points):
            raise ValueError("origin tags must parallel the vertex list")

    @classmethod
    def from_points(
        cls, points: Iterable[Point], origin: Optional[Sequence[int]] = None
    ) -> "Curve":
        """Build a curve, collapsing runs of consecutive duplicate vertices."""
        pts = [(_as_coord(x), _as_coord(y)) for x, y in points]
        tags = list(origin) if origin is not None else list(range(len(pts)))
        if len(tags) != len(pts):
            raise ValueError("origin tags must parallel the vertex list")
        out_p, out_t = [], []
        for p, t in zip(pts, tags):
            if out_p and out_p[-1] == p:
                continue
            out_p.append(p)
            out_t.append(t)
        if not out_p:
            raise DegenerateCurveError("empty curve")
        return cls(tuple(out_p), tuple(out_t))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.points) - 1

    def edge(self, i: int) -> Tuple[Point, Point]:
        return self.points[i], self.points[i + 1]

    def point_at(self, x: Coord) -> Point:
        """Linear-interpolation parametrisation over [0, len-1]."""
        n = len(self.points)
        if x < 0 or x > n - 1:
            raise ValueError(f"parameter {x} outside [0, {n - 1}]")
        i = int(x)
        if i == n - 1:
            i -= 1
        t = x - i
        if t == 0:
            return self.points[i]
        return lerp(self.points[i], self.points[i + 1], t)

    def with_inserted(self, insertions: dict) -> "Curve":
        """Splice interior vertices into edges.

        ``insertions`` maps an edge index to a list of local parameters
        ``t in (0, 1)``, each becoming a new rational vertex inheriting the
        origin tag of the edge's left endpoint.
        """
        pts, tags = [], []
        for i, (p, tag) in enumerate(zip(self.points, self.origin)):
            pts.append(p)
            tags.append(tag)
            for t in sorted(set(insertions.get(i, ()))):
                if not 0 < t < 1:
                    raise ValueError(f"insertion parameter {t} not interior")
                pts.append(lerp(self.points[i], self.points[i + 1], t))
                tags.append(tag)
        return Curve.from_points(pts, tags)


def _as_coord(v) -> Coord:
    if isinstance(v, int):
        return v
    f = Fraction(v)
    return f.numerator if f.denominator == 1 else f
