"""The curve x(x+1)...(x+k-1) = y^ell: evaluation, known families, point searches."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import gmpy2

from .arith import is_perfect_ell_power, rational_ell_root
from .errors import BudgetExceeded, PreconditionError

# Upper limit on (numerator, denominator) pairs a single rational search may visit.
SEARCH_BUDGET = 5 * 10**7


@dataclass(frozen=True)
class CurveInstance:
    k: int
    ell: int

    def __post_init__(self):
        if self.k < 2 or self.ell < 2:
            raise PreconditionError(f"need k >= 2 and ell >= 2, got k={self.k}, ell={self.ell}")


@dataclass(frozen=True, order=True)
class RationalPoint:
    x: Fraction
    y: Fraction

    @property
    def trivial(self) -> bool:
        return self.y == 0

    @property
    def height(self) -> int:
        return max(abs(self.x.numerator), self.x.denominator)


@dataclass(frozen=True)
class IntegerForm:
    """``n (n + d^ell) ... (n + (k-1) d^ell) = m^ell`` with ``x = n/d^ell``, ``y = m/d^k``."""

    n: int
    d: int
    m: int
    k: int
    ell: int

    def terms(self) -> list[int]:
        step = self.d**self.ell
        return [self.n + i * step for i in range(self.k)]

    def point(self) -> RationalPoint:
        return RationalPoint(Fraction(self.n, self.d**self.ell), Fraction(self.m, self.d**self.k))


def evaluate_product(x: Fraction, k: int) -> Fraction:
    """Exact value of ``x (x+1) ... (x+k-1)``."""
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}")
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    prod = 1
    for i in range(k):
        prod *= num + i * den
    return Fraction(prod, den**k)


def is_on_curve(point: RationalPoint, curve: CurveInstance) -> bool:
    return evaluate_product(point.x, curve.k) == Fraction(point.y) ** curve.ell


def clear_denominators(point: RationalPoint, curve: CurveInstance) -> IntegerForm:
    """Rewrite an on-curve point with ``y != 0`` as an integral progression.

    Writing ``x = n/s`` and ``y = m/t`` in lowest terms forces ``s^k = t^ell``;
    when ``gcd(k, ell) = 1`` this means ``s = d^ell`` and ``t = d^k``.
    """
    k, ell = curve.k, curve.ell
    if math.gcd(k, ell) != 1:
        raise PreconditionError(f"gcd(k, ell) = gcd({k}, {ell}) != 1; denominators need not be ell-th powers")
    if point.y == 0:
        raise PreconditionError("y = 0 is a trivial point; nothing to clear")
    if not is_on_curve(point, curve):
        raise PreconditionError(f"point {point} is not on the curve k={k}, ell={ell}")
    s, t = point.x.denominator, point.y.denominator
    if s**k != t**ell:
        raise AssertionError("on-curve point with s^k != t^ell")
    d = is_perfect_ell_power(s, ell)
    if d is None or d**k != t:
        raise AssertionError("denominator of x is not an ell-th power despite gcd(k, ell) = 1")
    form = IntegerForm(point.x.numerator, d, point.y.numerator, k, ell)
    prod = 1
    for term in form.terms():
        prod *= term
    assert prod == form.m**ell
    return form


# known families --------------------------------------------------------------


@dataclass(frozen=True)
class FamilyPoint:
    family: str
    point: RationalPoint
    curve: CurveInstance
    on_curve: bool


def family_point(family: str, *params: int) -> FamilyPoint:
    """A point from one of the three known families of nontrivial rational points.

    ``ex1(a, b)``: x = a^2/(b^2-a^2), y = ab/(b^2-a^2) on k = ell = 2.
    ``ex2(j)``: x = (1-2j)/2, y = prod_{i<=j}(2i-1) / 2^j on k = 2j, ell = 2.
    ``ex3(index)``: (-4/3, 2/3) or (-2/3, -2/3) on k = ell = 3.

    ``on_curve`` is computed rather than assumed; for ``ex2`` it is False for odd j,
    where the product is negative.
    """
    if family == "ex1":
        a, b = params
        if b * b == a * a:
            raise PreconditionError("ex1 needs a != +-b")
        den = b * b - a * a
        pt = RationalPoint(Fraction(a * a, den), Fraction(a * b, den))
        curve = CurveInstance(2, 2)
    elif family == "ex2":
        (j,) = params
        if j < 1:
            raise PreconditionError("ex2 needs j >= 1")
        odd = 1
        for i in range(1, j + 1):
            odd *= 2 * i - 1
        pt = RationalPoint(Fraction(1 - 2 * j, 2), Fraction(odd, 2**j))
        curve = CurveInstance(2 * j, 2)
    elif family == "ex3":
        (index,) = params
        table = {1: (Fraction(-4, 3), Fraction(2, 3)), 2: (Fraction(-2, 3), Fraction(-2, 3))}
        if index not in table:
            raise PreconditionError("ex3 index must be 1 or 2")
        pt = RationalPoint(*table[index])
        curve = CurveInstance(3, 3)
    else:
        raise PreconditionError(f"unknown family {family!r}")
    return FamilyPoint(family, pt, curve, is_on_curve(pt, curve))


def attribute_family(point: RationalPoint, curve: CurveInstance) -> Optional[str]:
    """Which known family a nontrivial point belongs to, if any."""
    if point.y == 0:
        return None
    x, y = point.x, point.y
    if curve.k == 2 and curve.ell == 2:
        # x = a^2/(b^2-a^2) iff x/(x+1) = (a/b)^2; then y = +-x b/a
        if x == -1:
            return None
        ratio = rational_ell_root(x / (x + 1), 2)
        if ratio is not None and ratio != 0 and abs(y) == abs(x / ratio):
            return "ex1"
        return None
    if curve.ell == 2 and curve.k % 2 == 0:
        j = curve.k // 2
        fp = family_point("ex2", j)
        if x == fp.point.x and abs(y) == fp.point.y:
            return "ex2"
    if curve.k == 3 and curve.ell == 3:
        for index in (1, 2):
            if point == family_point("ex3", index).point:
                return "ex3"
    return None


def ex1_parameters(point: RationalPoint) -> Optional[tuple[int, int]]:
    """Smallest positive ``(a, b)`` reproducing an ex1 point up to the sign of y."""
    if attribute_family(point, CurveInstance(2, 2)) != "ex1":
        return None
    ratio = rational_ell_root(point.x / (point.x + 1), 2)
    return abs(ratio.numerator), ratio.denominator


# searches ---------------------------------------------------------------------


def _denominators(curve: CurveInstance, height: int) -> list[int]:
    """Denominators s <= height for which s^k can be an ell-th power."""
    k, ell = curve.k, curve.ell
    g = math.gcd(k, ell)
    if g == 1:
        # s^k an ell-th power with gcd(k, ell) = 1 forces s = d^ell
        out, d = [], 1
        while d**ell <= height:
            out.append(d**ell)
            d += 1
        return out
    return [s for s in range(1, height + 1) if gmpy2.iroot(s**k, ell)[1]]


def _points_for_denominator(args: tuple[int, int, int, int]) -> list[RationalPoint]:
    k, ell, height, s = args
    den_root = is_perfect_ell_power(s**k, ell)
    out = []
    for n in range(-height, height + 1):
        if math.gcd(n, s) != 1:
            continue
        prod = 1
        for i in range(k):
            prod *= n + i * s
        if prod == 0:
            out.append(RationalPoint(Fraction(n, s), Fraction(0)))
            continue
        root = is_perfect_ell_power(prod, ell)
        if root is None:
            continue
        y = Fraction(root, den_root)
        out.append(RationalPoint(Fraction(n, s), y))
        if ell % 2 == 0:
            out.append(RationalPoint(Fraction(n, s), -y))
    return out


def search_rational_points(curve: CurveInstance, height: int, threads: int = 1) -> list[RationalPoint]:
    """Every on-curve point with ``max(|num(x)|, den(x)) <= height``, sorted by (x, y).

    Both signs of y are listed for even ell. Trivial points (y = 0) are included.
    """
    if height < 1:
        raise PreconditionError(f"height must be >= 1, got {height}")
    dens = _denominators(curve, height)
    if len(dens) * (2 * height + 1) > SEARCH_BUDGET:
        raise BudgetExceeded(f"search would visit {len(dens) * (2 * height + 1)} candidates")
    jobs = [(curve.k, curve.ell, height, s) for s in dens]
    points: list[RationalPoint] = []
    for chunk in _map(_points_for_denominator, jobs, threads):
        points.extend(chunk)
    return sorted(set(points))


@dataclass(frozen=True, order=True)
class IntegerSolution:
    x: int
    k: int
    ell: int
    y: int

    @property
    def trivial(self) -> bool:
        return self.y == 0


def _integer_scan(args: tuple[int, int, int, int, int]) -> list[IntegerSolution]:
    k, x_lo, x_hi, ell_max, x_max = args
    out = []
    for x in range(x_lo, x_hi + 1):
        if x + k - 1 > x_max:
            break
        prod = 1
        for i in range(k):
            prod *= x + i
        if prod == 0:
            out.extend(IntegerSolution(x, k, ell, 0) for ell in range(2, ell_max + 1))
            continue
        # is_power rejects almost every candidate before any root extraction
        if abs(prod) != 1 and not gmpy2.is_power(abs(prod)):
            continue
        for ell in range(2, ell_max + 1):
            root = is_perfect_ell_power(prod, ell)
            if root is not None:
                out.append(IntegerSolution(x, k, ell, root))
    return out


def search_integer_solutions(
    k_max: int, x_max: int, ell_max: int, negative: bool = False, threads: int = 1
) -> list[IntegerSolution]:
    """All ``(x, k, ell, y)`` with ``x(x+1)...(x+k-1) = y^ell`` in the box.

    By default ``1 <= x`` and ``x + k - 1 <= x_max``. With ``negative=True``
    the scan starts at ``x = -x_max`` instead, which also picks up the trivial
    zero-product points.
    """
    if min(k_max, x_max, ell_max) < 2:
        raise PreconditionError("k_max, x_max and ell_max must all be >= 2")
    x_start = -x_max if negative else 1
    jobs = []
    shard = 2048
    for k in range(2, k_max + 1):
        for lo in range(x_start, x_max - k + 2, shard):
            jobs.append((k, lo, min(lo + shard - 1, x_max - k + 1), ell_max, x_max))
    out: list[IntegerSolution] = []
    for chunk in _map(_integer_scan, jobs, threads):
        out.extend(chunk)
    return sorted(out)


def _map(func, jobs: Iterable, threads: int):
    if threads <= 1:
        return map(func, jobs)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, jobs, chunksize=4))
