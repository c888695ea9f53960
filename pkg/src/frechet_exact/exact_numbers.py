"""Exact comparison kernel for quadratic irrationals.

Every predicate in this package eventually reduces to ordering two numbers of
the form ``a/b + s*sqrt(c/d)`` with integer components.  Such comparisons are
decided exactly with integer arithmetic by squaring under a sign case
analysis; no epsilons, no floating point.  Python integers are unbounded, so
the 128-bit headroom the decision tree needs for 32-bit inputs is available
by construction and the kernel never overflows.

Sums of three or more square roots are out of scope; callers that would need
them substitute a rational over-estimate (`rational_upper_bound`) instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import isqrt
from typing import Union

Rational = Union[int, Fraction]

LESS = -1
EQUAL = 0
GREATER = 1


class InvalidRadicandError(ValueError):
    """Square root of a negative rational was requested."""


def _cmp(a, b) -> int:
    if a < b:
        return LESS
    if a > b:
        return GREATER
    return EQUAL


def _sign(q) -> int:
    if q < 0:
        return -1
    if q > 0:
        return 1
    return 0


def div(num: Rational, den: Rational) -> Fraction:
    """Exact rational division (int/int must not fall into float division)."""
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)
    return Fraction(num) / Fraction(den)


def compare_fraction_to_root(lhs: Rational, root: Rational, sign: int = 1) -> int:
    """Order ``lhs`` against ``sign*sqrt(root)`` exactly.

    Squaring both sides is only sound once their signs agree, hence the
    four-way case split before the single integer comparison.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if root < 0:
        raise InvalidRadicandError(f"negative radicand: {root}")
    if sign > 0:
        if lhs < 0:
            return LESS
        return _cmp(lhs * lhs, root)
    if lhs > 0:
        return GREATER
    return -_cmp(lhs * lhs, root)


def _sign_rat_plus_root(r: Rational, sign: int, v: Rational) -> int:
    """Sign of ``r + sign*sqrt(v)``."""
    # cmp(-r, s*sqrt(v)) is GREATER exactly when r + s*sqrt(v) < 0.
    return -compare_fraction_to_root(-r, v, sign)


def _cmp_rat_root_vs_root(r: Rational, s1: int, v1: Rational, s2: int, v2: Rational) -> int:
    """Order ``r + s1*sqrt(v1)`` against ``s2*sqrt(v2)``."""
    left = _sign_rat_plus_root(r, s1, v1)
    right = s2 if v2 > 0 else 0
    if left != right:
        return _cmp(left, right)
    if left == 0:
        return EQUAL
    # Both sides share the same strict sign: compare squares, flipping the
    # verdict when both are negative.
    #   (r + s1*sqrt(v1))^2 - v2 = (r^2 + v1 - v2) + sgn(r*s1)*sqrt(4*r^2*v1)
    rr = r * r
    inner = _sign_rat_plus_root(rr + v1 - v2, _sign(r * s1) or 1, 4 * rr * v1)
    return inner if left > 0 else -inner


@dataclass(frozen=True)
class ExactRoot:
    """A value ``rational + sign*sqrt(radicand)`` with rational components.

    Construction canonicalizes: a perfect-square radicand is folded into the
    rational part, so field equality coincides with value equality and the
    default dataclass hash is consistent.
    """

    rational: Fraction
    radicand: Fraction
    sign: int = 1

    def __post_init__(self):
        rat = Fraction(self.rational)
        rad = Fraction(self.radicand)
        sign = self.sign
        if rad < 0:
            raise InvalidRadicandError(f"negative radicand: {rad}")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        if rad != 0:
            rn, rd = rad.numerator, rad.denominator
            sn, sd = isqrt(rn), isqrt(rd)
            if sn * sn == rn and sd * sd == rd:
                rat += sign * Fraction(sn, sd)
                rad = Fraction(0)
        if rad == 0:
            sign = 1
        object.__setattr__(self, "rational", rat)
        object.__setattr__(self, "radicand", rad)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def from_rational(cls, q: Rational) -> "ExactRoot":
        return cls(Fraction(q), Fraction(0), 1)

    @classmethod
    def sqrt(cls, q: Rational) -> "ExactRoot":
        if q < 0:
            raise InvalidRadicandError(f"negative radicand: {q}")
        return cls(Fraction(0), Fraction(q), 1)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 0

    def compare(self, other: "ExactRoot") -> int:
        return compare_root_expressions(self, other)

    def add_rational(self, q: Rational) -> "ExactRoot":
        return ExactRoot(self.rational + q, self.radicand, self.sign)

    def scale(self, c: Rational) -> "ExactRoot":
        if c == 0:
            return ExactRoot.from_rational(0)
        sign = self.sign if c > 0 else -self.sign
        return ExactRoot(self.rational * c, self.radicand * c * c, sign)

    def __neg__(self) -> "ExactRoot":
        return self.scale(-1)

    def __lt__(self, other):
        return self.compare(other) == LESS

    def __le__(self, other):
        return self.compare(other) != GREATER

    def __gt__(self, other):
        return self.compare(other) == GREATER

    def __ge__(self, other):
        return self.compare(other) != LESS

    def to_decimal(self, digits: int = 50) -> Decimal:
        """Decimal approximation, accurate to roughly ``digits`` places."""
        with localcontext() as ctx:
            ctx.prec = digits + 10
            rat = Decimal(self.rational.numerator) / Decimal(self.rational.denominator)
            if self.radicand == 0:
                return +rat
            root = (
                Decimal(self.radicand.numerator) / Decimal(self.radicand.denominator)
            ).sqrt()
            return rat + self.sign * root

    def __float__(self) -> float:
        return float(self.to_decimal(40))

    def __repr__(self):
        if self.radicand == 0:
            return f"ExactRoot({self.rational})"
        op = "+" if self.sign > 0 else "-"
        return f"ExactRoot({self.rational} {op} sqrt({self.radicand}))"


EXACT_ZERO = ExactRoot.from_rational(0)
EXACT_ONE = ExactRoot.from_rational(1)


def compare_root_expressions(x: ExactRoot, y: ExactRoot) -> int:
    """Exact ordering of two ``a/b + s*sqrt(c/d)`` values."""
    return _cmp_rat_root_vs_root(
        x.rational - y.rational, x.sign, x.radicand, y.sign, y.radicand
    )


def exact_max(a: ExactRoot, b: ExactRoot) -> ExactRoot:
    return b if compare_root_expressions(a, b) == LESS else a


def exact_min(a: ExactRoot, b: ExactRoot) -> ExactRoot:
    return b if compare_root_expressions(a, b) == GREATER else a


def rational_upper_bound(x: ExactRoot, slack_bits: int = 32) -> Fraction:
    """A fraction >= x with gap at most ``2**-slack_bits * max(1, |x|)``.

    The root term is bracketed by an integer square root of the radicand
    scaled by ``4**slack_bits``, rounded outward, so the result is an exact
    over-estimate; pure rationals pass through unchanged.
    """
    if slack_bits < 0:
        raise ValueError("slack_bits must be non-negative")
    if x.radicand == 0:
        return x.rational
    c, d = x.radicand.numerator, x.radicand.denominator
    scaled = (c * d) << (2 * slack_bits)
    r = isqrt(scaled)
    if x.sign > 0:
        if r * r < scaled:
            r += 1  # round the root up so the sum over-estimates
        return x.rational + Fraction(r, d << slack_bits)
    # Subtracted root: round the root down instead.
    return x.rational - Fraction(r, d << slack_bits)


def rational_lower_bound(x: ExactRoot, slack_bits: int = 32) -> Fraction:
    """Mirror of `rational_upper_bound`: a fraction <= x with the same gap."""
    return -rational_upper_bound(-x, slack_bits)


def simplest_between(lo: ExactRoot, hi: ExactRoot) -> Fraction:
    """Smallest-denominator rational strictly inside (lo, hi) within [0, 1].

    Stern-Brocot mediant descent with exact comparisons; keeping stab points
    simple stops coefficient growth from compounding across refinement
    rounds.  Requires lo < hi and the interval to meet (0, 1).
    """
    an, ad, bn, bd = 0, 1, 1, 1
    while True:
        mn, md = an + bn, ad + bd
        m = Fraction(mn, md)
        if _cmp_rat_root_vs_root(m - lo.rational, 1, 0, lo.sign, lo.radicand) != GREATER:
            an, ad = mn, md  # mediant <= lo: move right
        elif _cmp_rat_root_vs_root(m - hi.rational, 1, 0, hi.sign, hi.radicand) != LESS:
            bn, bd = mn, md  # mediant >= hi: move left
        else:
            return m
