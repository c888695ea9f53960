"""Independent verifiers, deliberately naive to stay decoupled from the
main pipeline: a discrete Frechet DP, an exact free-space decision
procedure, and a brute-force continuous oracle over all critical values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .exact_numbers import ExactRoot, GREATER, LESS, exact_max
from .geometry import (
    Curve,
    equidistant_parameter,
    free_interval_on_segment,
    nearest_parameter_on_segment,
    squared_distance,
)

VERTEX_EVENT = "vertex"
EDGE_EVENT = "edge"
MONOTONICITY_EVENT = "monotonicity"


class InstanceTooLargeError(ValueError):
    """The brute-force oracle is guarded to test-scale inputs."""


@dataclass(frozen=True)
class CriticalValue:
    kind: str
    d2: Fraction


def discrete_frechet(pi: Curve, sigma: Curve):
    """Squared discrete Frechet distance by the classic O(nm) DP."""
    n, m = len(pi), len(sigma)
    prev = None
    for i in range(n):
        cur = [None] * m
        for j in range(m):
            d2 = squared_distance(pi.points[i], sigma.points[j])
            if i == 0 and j == 0:
                best = d2
            else:
                options = []
                if j > 0 and cur[j - 1] is not None:
                    options.append(cur[j - 1])
                if prev is not None:
                    if prev[j] is not None:
                        options.append(prev[j])
                    if j > 0 and prev[j - 1] is not None:
                        options.append(prev[j - 1])
                best = max(min(options), d2)
            cur[j] = best
        prev = cur
    return prev[m - 1]


def _point_to_curve_d2(p, curve: Curve):
    return max(squared_distance(p, v) for v in curve.points)


def decide(pi: Curve, sigma: Curve, delta2) -> bool:
    """Exact decision ``D_F(pi, sigma)**2 <= delta2`` over closed free space.

    Classic cell-boundary propagation with interval endpoints kept as exact
    quadratic roots.
    """
    if delta2 < 0:
        return False
    pi = Curve.from_points(pi.points, pi.origin)
    sigma = Curve.from_points(sigma.points, sigma.origin)
    n, m = len(pi), len(sigma)
    if n == 1 and m == 1:
        return squared_distance(pi.points[0], sigma.points[0]) <= delta2
    if n == 1:
        return _point_to_curve_d2(pi.points[0], sigma) <= delta2
    if m == 1:
        return _point_to_curve_d2(sigma.points[0], pi) <= delta2

    if squared_distance(pi.points[0], sigma.points[0]) > delta2:
        return False
    if squared_distance(pi.points[n - 1], sigma.points[m - 1]) > delta2:
        return False

    def free_bottom(i, j):
        # slice on the row line j across column i (parameter along pi edge i)
        return free_interval_on_segment(*pi.edge(i), sigma.points[j], delta2)

    def free_left(i, j):
        # slice on the column line i across row j (parameter along sigma edge j)
        return free_interval_on_segment(*sigma.edge(j), pi.points[i], delta2)

    zero = ExactRoot.from_rational(0)
    # reach_bottom[i] is the reachable sub-interval of the bottom edge of the
    # current cell row; reach_left[j] likewise per column, updated in place.
    reach_bottom: List[Optional[Tuple[ExactRoot, ExactRoot]]] = [None] * (n - 1)
    reach_left: List[Optional[Tuple[ExactRoot, ExactRoot]]] = [None] * (m - 1)

    for i in range(n - 1):
        cur = free_bottom(i, 0)
        if cur is None or cur[0].compare(zero) == GREATER:
            break
        reach_bottom[i] = (zero, cur[1]) if i == 0 else cur
        if cur[1].compare(ExactRoot.from_rational(1)) == LESS:
            break
    for j in range(m - 1):
        cur = free_left(0, j)
        if cur is None or cur[0].compare(zero) == GREATER:
            break
        reach_left[j] = (zero, cur[1]) if j == 0 else cur
        if cur[1].compare(ExactRoot.from_rational(1)) == LESS:
            break

    for j in range(m - 1):
        carry_left = reach_left[j]
        for i in range(n - 1):
            bottom = reach_bottom[i]
            left = carry_left
            # exit through the right edge of cell (i, j)
            fr = free_left(i + 1, j)
            right = None
            if fr is not None:
                if bottom is not None:
                    right = fr
                elif left is not None:
                    lo = exact_max(fr[0], left[0])
                    if lo.compare(fr[1]) != GREATER:
                        right = (lo, fr[1])
            # exit through the top edge of cell (i, j)
            ft = free_bottom(i, j + 1)
            top = None
            if ft is not None:
                if left is not None:
                    top = ft
                elif bottom is not None:
                    lo = exact_max(ft[0], bottom[0])
                    if lo.compare(ft[1]) != GREATER:
                        top = (lo, ft[1])
            carry_left = right
            reach_bottom[i] = top
        reach_left[j] = carry_left

    final = reach_left[m - 2]
    one = ExactRoot.from_rational(1)
    if final is not None and final[1].compare(one) != LESS:
        if final[0].compare(one) != GREATER:
            return True
    final_b = reach_bottom[n - 2]
    if final_b is not None and final_b[1].compare(one) != LESS:
        if final_b[0].compare(one) != GREATER:
            return True
    return False


def enumerate_critical_values(pi: Curve, sigma: Curve) -> List[CriticalValue]:
    """All candidate thresholds that can realize the continuous distance."""
    out = []
    for p in pi.points:
        for s in sigma.points:
            out.append(CriticalValue(VERTEX_EVENT, Fraction(squared_distance(p, s))))
    for i in range(pi.n_edges):
        a, b = pi.edge(i)
        for s in sigma.points:
            out.append(
                CriticalValue(EDGE_EVENT, Fraction(nearest_parameter_on_segment(a, b, s)[1]))
            )
        pts = sigma.points
        for u in range(len(pts)):
            for v in range(u + 1, len(pts)):
                got = equidistant_parameter(a, b, pts[u], pts[v])
                if got is not None:
                    out.append(CriticalValue(MONOTONICITY_EVENT, Fraction(got[1])))
    for j in range(sigma.n_edges):
        a, b = sigma.edge(j)
        for p in pi.points:
            out.append(
                CriticalValue(EDGE_EVENT, Fraction(nearest_parameter_on_segment(a, b, p)[1]))
            )
        pts = pi.points
        for u in range(len(pts)):
            for v in range(u + 1, len(pts)):
                got = equidistant_parameter(a, b, pts[u], pts[v])
                if got is not None:
                    out.append(CriticalValue(MONOTONICITY_EVENT, Fraction(got[1])))
    return out


def brute_force_exact(pi: Curve, sigma: Curve, size_limit: int = 12) -> ExactRoot:
    """Exact continuous distance: sort every critical value, binary-search
    with the decision procedure.  Guarded to small instances."""
    pi = Curve.from_points(pi.points, pi.origin)
    sigma = Curve.from_points(sigma.points, sigma.origin)
    if len(pi) > size_limit or len(sigma) > size_limit:
        raise InstanceTooLargeError(
            f"brute-force oracle limited to {size_limit} vertices per curve"
        )
    if len(pi) == 1 or len(sigma) == 1:
        if len(pi) == 1 and len(sigma) == 1:
            return ExactRoot.sqrt(squared_distance(pi.points[0], sigma.points[0]))
        if len(pi) == 1:
            return ExactRoot.sqrt(_point_to_curve_d2(pi.points[0], sigma))
        return ExactRoot.sqrt(_point_to_curve_d2(sigma.points[0], pi))

    values = sorted({cv.d2 for cv in enumerate_critical_values(pi, sigma)})
    lo, hi = 0, len(values) - 1
    assert decide(pi, sigma, values[hi]), "largest critical value must be feasible"
    while lo < hi:
        mid = (lo + hi) // 2
        if decide(pi, sigma, values[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ExactRoot.sqrt(values[lo])
