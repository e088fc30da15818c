"""Exact rational arithmetic and rigorous interval enclosures.

Every irrational quantity in the package is carried as an :class:`Enclosure`,
a closed interval with :class:`fractions.Fraction` endpoints that is
guaranteed to contain the true value. The elementary functions below
(``exp``, ``sqrt``, ``sin``/``cos`` and the Gaussian integral) return
enclosures whose width is at most ``10**-digits``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

Number = Union[int, Fraction]

DEFAULT_MAX_DOUBLINGS = 6
MAX_TERMS = 200_000
LOG2_10 = math.log2(10)


class DomainError(ValueError):
    """An operation was applied outside its mathematical domain."""


class Indeterminate(DomainError):
    """The answer depends on digits the current enclosure does not resolve.

    Raised e.g. when dividing by an interval that straddles zero. Callers that
    can raise their working precision catch this and retry.
    """


class PrecisionError(ArithmeticError):
    """Target width not reached before an iteration or escalation cap."""

    def __init__(self, message: str, best: "Enclosure | None" = None):
        super().__init__(message)
        self.best = best


def max_doublings() -> int:
    raw = os.environ.get("ERRSUMLAB_MAX_DOUBLINGS")
    if raw is None:
        return DEFAULT_MAX_DOUBLINGS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"ERRSUMLAB_MAX_DOUBLINGS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("ERRSUMLAB_MAX_DOUBLINGS must be >= 0")
    return value


def check_digits(digits: int) -> int:
    if isinstance(digits, bool) or not isinstance(digits, int) or digits < 1:
        raise ValueError(f"precision must be a positive integer number of digits, got {digits!r}")
    return digits


def tolerance(digits: int) -> Fraction:
    return Fraction(1, 10 ** check_digits(digits))


def _floor_div(x: Fraction, scale: int) -> Fraction:
    return Fraction((x.numerator * scale) // x.denominator, scale)


def _ceil_div(x: Fraction, scale: int) -> Fraction:
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: Number) -> "Enclosure":
        v = Fraction(value)
        return cls(v, v)

    @classmethod
    def around(cls, center: Number, radius: Number) -> "Enclosure":
        c, r = Fraction(center), abs(Fraction(radius))
        return cls(c - r, c + r)

    @classmethod
    def hull_of(cls, *values: "Enclosure | Number") -> "Enclosure":
        encs = [as_enclosure(v) for v in values]
        return cls(min(e.lo for e in encs), max(e.hi for e in encs))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: "Enclosure | Number") -> bool:
        other = as_enclosure(value)
        return self.lo <= other.lo and other.hi <= self.hi

    __contains__ = contains

    def intersects(self, other: "Enclosure | Number") -> bool:
        o = as_enclosure(other)
        return self.lo <= o.hi and o.lo <= self.hi

    def hull(self, other: "Enclosure | Number") -> "Enclosure":
        return Enclosure.hull_of(self, other)

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def rounded(self, bits: int) -> "Enclosure":
        """Round endpoints outward onto the grid ``2**-bits``."""
        scale = 1 << bits
        return Enclosure(_floor_div(self.lo, scale), _ceil_div(self.hi, scale))

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __abs__(self) -> "Enclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.lo, self.hi))

    def __add__(self, other):
        o = as_enclosure(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_enclosure(other)
        return Enclosure(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return as_enclosure(other) - self

    def __mul__(self, other):
        o = as_enclosure(other)
        if o.is_point:
            k = o.lo
            return Enclosure(self.lo * k, self.hi * k) if k >= 0 else Enclosure(self.hi * k, self.lo * k)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "Enclosure":
        if self.is_point and self.lo == 0:
            raise DomainError("division by zero")
        if self.contains_zero():
            raise Indeterminate(f"division by an enclosure containing zero: {self}")
        return Enclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        o = as_enclosure(other)
        if o.is_point:
            if o.lo == 0:
                raise DomainError("division by zero")
            return self * (1 / o.lo)
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return as_enclosure(other) / self

    def square(self) -> "Enclosure":
        a = abs(self)
        return Enclosure(a.lo * a.lo, a.hi * a.hi)

    def __pow__(self, n: int) -> "Enclosure":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Enclosure.point(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def __str__(self):
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def as_enclosure(value: "Enclosure | Number") -> Enclosure:
    if isinstance(value, Enclosure):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Enclosure.point(value)
    raise TypeError(f"cannot interpret {value!r} as an exact enclosure")


def denominator_bits(digits: int) -> int:
    """Bit budget above which interval endpoints get rounded outward."""
    return 16 * math.ceil(check_digits(digits) * LOG2_10)


def tidy(enc: Enclosure, digits: int) -> Enclosure:
    """Bound endpoint denominators; point enclosures are never touched."""
    if enc.is_point:
        return enc
    limit = denominator_bits(digits)
    if max(enc.lo.denominator.bit_length(), enc.hi.denominator.bit_length()) <= limit:
        return enc
    return enc.rounded(limit)


def refine(compute: Callable[[int], Enclosure], digits: int, *, guard: int = 5) -> Enclosure:
    """Call ``compute(working_digits)`` with geometric escalation.

    Starts at ``digits + guard`` working digits and doubles up to
    :func:`max_doublings` times until the result is at most ``10**-digits``
    wide. :class:`Indeterminate` from an under-resolved step also triggers a
    retry; if it persists at the cap it is re-raised as :class:`DomainError`.
    """
    target = tolerance(digits)
    working = digits + guard
    best = None
    last_error: Indeterminate | None = None
    for _ in range(max_doublings() + 1):
        try:
            enc = compute(working)
        except Indeterminate as exc:
            last_error = exc
        else:
            last_error = None
            if enc.width <= target:
                return enc
            if best is None or enc.width < best.width:
                best = enc
        working *= 2
    if last_error is not None and best is None:
        raise DomainError(str(last_error)) from last_error
    raise PrecisionError(f"could not reach width 1e-{digits} after escalation", best)


# Series engines


def sum_alternating(
    term: Callable[[int], Fraction],
    digits: int,
    n0: int = 0,
    max_terms: int = MAX_TERMS,
) -> Enclosure:
    """Enclose ``sum(term(n) for n >= 0)`` using the Leibniz remainder bound.

    The caller guarantees that from index ``n0`` on the terms alternate in
    sign and strictly decrease in absolute value to zero. After truncating at
    ``N >= n0 - 1`` the remainder lies between 0 and ``term(N + 1)``.
    """
    target = tolerance(digits)
    partial = Fraction(0)
    n = 0
    while n < max_terms:
        partial += Fraction(term(n))
        following = Fraction(term(n + 1))
        if n + 1 >= n0 and abs(following) <= target:
            return Enclosure.hull_of(partial, partial + following)
        n += 1
    following = Fraction(term(n))
    best = Enclosure.hull_of(partial, partial + following) if n >= n0 else None
    raise PrecisionError(f"alternating series did not converge within {max_terms} terms", best)


def sum_positive(
    term: Callable[[int], Fraction],
    ratio_bound: Callable[[int], Fraction],
    digits: int,
    max_terms: int = MAX_TERMS,
) -> Enclosure:
    """Enclose a series of nonnegative terms with a geometric tail.

    ``ratio_bound(k)`` must bound ``term(j + 1) / term(j)`` for every
    ``j >= k``. Once it drops below one the tail after index ``N`` is at most
    ``term(N + 1) / (1 - ratio_bound(N + 1))``.
    """
    target = tolerance(digits)
    partial = Fraction(0)
    for n in range(max_terms):
        partial += Fraction(term(n))
        rho = Fraction(ratio_bound(n + 1))
        if rho < 1:
            tail = Fraction(term(n + 1)) / (1 - rho)
            if tail <= target:
                return Enclosure(partial, partial + tail)
    raise PrecisionError(f"positive series did not converge within {max_terms} terms")


# Elementary functions


def _exp_taylor(y: Fraction, digits: int) -> Enclosure:
    # |y| <= 1: remainder after the x**N term is at most 3 |y|**(N+1) / (N+1)!
    target = tolerance(digits) / 2
    total = Fraction(0)
    term = Fraction(1)
    n = 0
    while True:
        total += term
        n += 1
        term = term * y / n
        remainder = 3 * abs(term)
        if remainder <= target:
            return Enclosure.around(total, remainder)


def exp_enclosure(x: Number, digits: int) -> Enclosure:
    """Enclosure of ``e**x`` for rational ``x``, width at most ``10**-digits``."""
    check_digits(digits)
    x = Fraction(x)
    if x == 0:
        return Enclosure.point(1)
    halvings = 0
    while abs(x) > (1 << halvings):
        halvings += 1
    y = x / (1 << halvings)
    magnitude = max(0, math.ceil(float(x) / math.log(10))) + 1

    def compute(working: int) -> Enclosure:
        enc = _exp_taylor(y, working + magnitude + halvings)
        for _ in range(halvings):
            enc = tidy(enc.square(), working + magnitude)
        return enc

    return refine(compute, digits)


def sqrt_enclosure(r: Number, digits: int) -> Enclosure:
    """Enclosure of the square root of a nonnegative rational."""
    check_digits(digits)
    r = Fraction(r)
    if r < 0:
        raise DomainError(f"square root of negative number {r}")
    num_root, den_root = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if num_root * num_root == r.numerator and den_root * den_root == r.denominator:
        return Enclosure.point(Fraction(num_root, den_root))
    bits = math.ceil(digits * LOG2_10) + 1
    scaled = (r.numerator << (2 * bits)) // r.denominator
    low = math.isqrt(scaled)
    return Enclosure(Fraction(low, 1 << bits), Fraction(low + 1, 1 << bits))


def sqrt_interval(enc: Enclosure, digits: int) -> Enclosure:
    """Square root of every point of ``enc`` (monotone, so endpoint-wise)."""
    if enc.hi < 0:
        raise DomainError(f"square root of negative enclosure {enc}")
    if enc.lo < 0:
        raise Indeterminate(f"square root of enclosure straddling zero {enc}")
    return Enclosure(sqrt_enclosure(enc.lo, digits).lo, sqrt_enclosure(enc.hi, digits).hi)


def _first_decreasing(x2: Fraction, offset: int) -> int:
    n = 0
    while (2 * n + offset) * (2 * n + offset + 1) <= x2:
        n += 1
    return n


def sin_cos_enclosure(x: Number, digits: int) -> tuple[Enclosure, Enclosure]:
    """Enclosures of ``(sin x, cos x)`` from their alternating Taylor series."""
    check_digits(digits)
    x = Fraction(x)
    x2 = x * x

    def sin_term(n: int) -> Fraction:
        return (-1) ** n * x ** (2 * n + 1) / math.factorial(2 * n + 1)

    def cos_term(n: int) -> Fraction:
        return (-1) ** n * x2**n / math.factorial(2 * n)

    sin = sum_alternating(sin_term, digits + 1, n0=_first_decreasing(x2, 2))
    cos = sum_alternating(cos_term, digits + 1, n0=_first_decreasing(x2, 1))
    return sin, cos


def gauss_integral(c: Number, digits: int) -> Enclosure:
    """Enclosure of ``integral_0^1 exp(-t**2 / c) dt`` for rational ``c > 0``.

    Expands the integrand termwise, giving the alternating series
    ``sum (-1)**n / (n! (2n+1) c**n)``; the terms decrease from
    ``n = ceil(1/c)`` on.
    """
    c = Fraction(c)
    if c <= 0:
        raise DomainError(f"gauss_integral needs c > 0, got {c}")

    def term(n: int) -> Fraction:
        return Fraction((-1) ** n, math.factorial(n) * (2 * n + 1)) / c**n

    return sum_alternating(term, digits, n0=math.ceil(1 / c))


# Decimal presentation


def agreed_digits(*encs: Enclosure, cap: int | None = None) -> int:
    """Largest ``k`` such that all enclosures fit in a common interval of width ``10**-k``."""
    hull = Enclosure.hull_of(*encs)
    w = hull.width
    if w == 0:
        return cap if cap is not None else 0
    k = -1
    # 10**-(k+1) >= w
    while Fraction(1, 10 ** (k + 1)) >= w:
        k += 1
        if cap is not None and k >= cap:
            return cap
    return max(k, 0)


def format_decimal(value: Fraction, places: int, rounding: str = "down") -> str:
    """Render ``value`` with ``places`` decimals, rounding toward -inf ("down"),
    +inf ("up") or zero ("truncate")."""
    value = Fraction(value)
    scale = 10**places
    scaled = value * scale
    if rounding == "down":
        n = math.floor(scaled)
    elif rounding == "up":
        n = math.ceil(scaled)
    elif rounding == "truncate":
        n = math.trunc(scaled)
    else:
        raise ValueError(f"unknown rounding mode {rounding!r}")
    sign = "-" if n < 0 else ""
    if n == 0 and value < 0 and rounding == "truncate":
        sign = "-"
    whole, frac = divmod(abs(n), scale)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"


def endpoint_strings(enc: Enclosure, places: int) -> tuple[str, str]:
    return format_decimal(enc.lo, places, "down"), format_decimal(enc.hi, places, "up")
