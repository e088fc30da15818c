"""Regular and generalized continued fractions.

Convergents follow the usual three-term recurrence, indexed from ``n = 0``
with ``p_0 / q_0 = a_0 / 1``. Partial quotients of an irrational constant are
read off a rigorous enclosure of its value: a quotient is emitted only when
every point of the enclosure agrees on it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .constexpr import ConstExpr, eval_enclosure, parse
from .numerics import DomainError, Enclosure, Indeterminate, PrecisionError, max_doublings

MAX_EXTRACT_DOUBLINGS = 20


@dataclass(frozen=True)
class Convergent:
    index: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents(quotients: Iterable[int]) -> Iterator[Convergent]:
    """Lazily yield the convergents of ``[a0; a1, a2, ...]``."""
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for n, a in enumerate(quotients):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield Convergent(n, p, q)


def convergents_from_quotients(quotients: Iterable[int], count: int) -> list[Convergent]:
    """The first ``count`` convergents; fewer if the quotients run out."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return list(itertools.islice(convergents(quotients), count))


def rational_quotients(x: Fraction) -> list[int]:
    """Canonical finite expansion of a rational (last quotient >= 2 when length >= 2)."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    out = []
    while den:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    if len(out) >= 2 and out[-1] == 1:
        out.pop()
        out[-1] += 1
    return out


def quotients_of_enclosure(enc: Enclosure, limit: int) -> tuple[list[int], bool]:
    """Partial quotients shared by every real in ``enc``.

    Returns ``(quotients, complete)``; ``complete`` is true when ``enc`` is a
    single rational whose whole canonical expansion has been returned.
    """
    if enc.is_point:
        digits = rational_quotients(enc.lo)
        return digits[:limit], len(digits) <= limit
    lo, hi = enc.lo, enc.hi
    out: list[int] = []
    while len(out) < limit:
        a = math.floor(lo)
        if math.floor(hi) != a or lo == a:
            # straddles an integer, or the fractional part could be zero
            break
        out.append(a)
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return out, False


def _as_expr(expr: ConstExpr | str) -> ConstExpr:
    return parse(expr) if isinstance(expr, str) else expr


def extract_cf(expr: ConstExpr | str, count: int, *, start_digits: int | None = None) -> list[int]:
    """First ``count`` canonical partial quotients of a positive constant.

    The working precision doubles (at most 20 times) until the enclosure
    determines ``count`` quotients. Rational constants given as exact
    rational expressions return their finite canonical expansion, possibly
    shorter than ``count``. If :func:`max_doublings` consecutive doublings
    resolve no new quotient (the signature of a rational value hidden behind
    irrational operations, such as ``sqrt(2)*sqrt(2)``) the search stops early.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    node = _as_expr(expr)
    digits = start_digits or max(20, 2 * count)
    best: list[int] = []
    stalled = 0
    for _ in range(MAX_EXTRACT_DOUBLINGS + 1):
        progress = False
        try:
            enc = eval_enclosure(node, digits)
        except (PrecisionError, Indeterminate):
            enc = None
        if enc is not None:
            if enc.hi <= 0:
                raise DomainError(f"continued fraction needs a positive value, got {enc}")
            if enc.lo > 0:
                found, complete = quotients_of_enclosure(enc, count)
                if complete or len(found) >= count:
                    return found
                if len(found) > len(best):
                    best = found
                    progress = True
        stalled = 0 if progress else stalled + 1
        if stalled > max_doublings():
            break
        digits *= 2
    raise PrecisionError(
        f"only {len(best)} of {count} partial quotients resolved "
        f"(last working precision {digits} digits)"
    )


@dataclass(frozen=True)
class HurwitzFamily:
    """``F1``: s*e^(1/(l*s)) with l >= 2, s >= 1.  ``F2``: s*e^(1/s) with s >= 1."""

    tag: str
    s: int
    ell: int | None = None

    def __post_init__(self):
        if self.tag not in ("F1", "F2"):
            raise DomainError(f"unknown Hurwitz family {self.tag!r}")
        if not isinstance(self.s, int) or self.s < 1:
            raise DomainError(f"s must be an integer >= 1, got {self.s!r}")
        if self.tag == "F1":
            if not isinstance(self.ell, int) or self.ell < 2:
                raise DomainError(f"F1 needs an integer l >= 2, got {self.ell!r}")
        elif self.ell is not None:
            raise DomainError("F2 takes no l parameter")

    @classmethod
    def f1(cls, ell: int, s: int) -> "HurwitzFamily":
        return cls("F1", s, ell)

    @classmethod
    def f2(cls, s: int) -> "HurwitzFamily":
        return cls("F2", s)

    @property
    def scale(self) -> int:
        """``l*s`` for F1, ``s`` for F2: the constant is ``s * e^(1/scale)``."""
        return self.ell * self.s if self.tag == "F1" else self.s

    def expression(self) -> str:
        return f"{self.s}*e^(1/{self.scale})"


def hurwitz_stream(family: HurwitzFamily) -> Iterator[int]:
    s = family.s
    if family.tag == "F1":
        ell = family.ell
        yield s
        for k in itertools.count(1):
            yield (2 * k - 1) * ell - 1
            yield 1
            yield 2 * s - 1
    else:
        yield s + 1
        for k in itertools.count(1):
            yield 2 * s - 1
            yield 2 * k
            yield 1


def _element(source: Sequence[Fraction] | Callable[[int], Fraction], i: int) -> Fraction:
    value = Fraction(source[i] if not callable(source) else source(i))
    if value <= 0:
        raise DomainError(f"generalized continued fraction element {i} is not positive: {value}")
    return value


def truncation(
    numerators: Sequence[Fraction] | Callable[[int], Fraction],
    denominators: Sequence[Fraction] | Callable[[int], Fraction],
    levels: int,
) -> Fraction:
    """``a0/(b0 + a1/(b1 + ... + a_{k-1}/b_{k-1}))`` with ``k = levels``, evaluated bottom-up."""
    value = Fraction(0)
    for i in reversed(range(levels)):
        value = _element(numerators, i) / (_element(denominators, i) + value)
    return value


def eval_generalized_cf(
    numerators: Sequence[Fraction] | Callable[[int], Fraction],
    denominators: Sequence[Fraction] | Callable[[int], Fraction],
    terms: int,
) -> Enclosure:
    """Bracket a generalized continued fraction with positive elements.

    Elements are indexed from 0, either as sequences or as callables. The
    result is the hull of the truncations with ``terms - 1`` and ``terms``
    levels (zero levels meaning 0); for positive elements consecutive
    truncations sit on opposite sides of the limit. Finite sequences cap
    ``terms`` at their length, and a one-level finite fraction is exact.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    finite = not callable(numerators) and not callable(denominators)
    if finite:
        terms = min(terms, len(numerators), len(denominators))
        if terms == 0:
            raise ValueError("empty continued fraction")
    deep = truncation(numerators, denominators, terms)
    if finite and terms == 1:
        return Enclosure.point(deep)
    return Enclosure.hull_of(truncation(numerators, denominators, terms - 1), deep)


def erfint_numerator(i: int) -> Fraction:
    if i == 0:
        return Fraction(5, 4)
    return Fraction(i * (i + 2) ** 2 * (2 * i - 1) ** 2)


def erfint_denominator(i: int) -> Fraction:
    if i == 0:
        return Fraction(3)
    return Fraction((2 * i + 5) * (i * i + i + 1))


ERFINT_OFFSET = Fraction(3, 8)


def erfint_cf(terms: int) -> Enclosure:
    """3/8 plus the conjectured continued fraction for integral_0^1 exp(-t^2) dt."""
    return ERFINT_OFFSET + eval_generalized_cf(erfint_numerator, erfint_denominator, terms)

