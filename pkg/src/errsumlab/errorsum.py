"""Error sums of continued fractions and the residual integrals of the Hurwitz families.

For ``alpha > 0`` with convergents ``p_n / q_n`` the error sum is
``E(alpha) = sum |q_n alpha - p_n| = sum (-1)**n (q_n alpha - p_n)``.
Truncating after index ``N`` leaves a tail below
``sum_{k > N} 1/q_k <= 2 (1/q_{N+1} + 1/q_{N+2})`` because ``q_{k+2} >= 2 q_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constexpr import ConstExpr, eval_enclosure, parse
from .contfrac import Convergent, HurwitzFamily, convergents, hurwitz_stream, quotients_of_enclosure
from .numerics import (
    DomainError,
    Enclosure,
    Indeterminate,
    PrecisionError,
    check_digits,
    exp_enclosure,
    gauss_integral,
    max_doublings,
    refine,
    sum_alternating,
    sum_positive,
    tolerance,
)

# 809/500 < golden ratio, so |x| * 500/809 bounds |x| / phi from above
PHI_LOWER = Fraction(809, 500)
POWER_SERIES_RADIUS = Fraction(3, 2)
QUOTIENT_LIMIT = 1_000_000


@dataclass(frozen=True)
class ErrorSumResult:
    value: Enclosure
    terms_used: int
    tail_bound: Fraction


def _decimal_size(n: int) -> int:
    return len(str(abs(n))) if n else 1


class _Expansion:
    """An enclosure of alpha together with the convergents it determines."""

    def __init__(self, node: ConstExpr, digits: int):
        enc = eval_enclosure(node, digits)
        if enc.hi <= 0:
            raise DomainError(f"error sum needs alpha > 0, got {enc}")
        if enc.lo <= 0:
            raise Indeterminate(f"sign of alpha unresolved: {enc}")
        self.alpha = enc
        quotients, self.complete = quotients_of_enclosure(enc, QUOTIENT_LIMIT)
        self.convergents: list[Convergent] = list(convergents(quotients))

    def signed_term(self, n: int) -> Enclosure:
        c = self.convergents[n]
        term = self.alpha * c.q - c.p
        return term if n % 2 == 0 else -term


def _expansions(node: ConstExpr, start_digits: int):
    """Yield expansions at escalating precision, at most ``max_doublings() + 1`` of them."""
    working = start_digits
    for _ in range(max_doublings() + 1):
        try:
            expansion = _Expansion(node, working)
        except (Indeterminate, PrecisionError):
            expansion = None
        if expansion is not None:
            yield expansion, working
        working *= 2


def error_sum_abs(expr: ConstExpr | str, digits: int) -> ErrorSumResult:
    """Enclose ``sum |q_n alpha - p_n|`` to width at most ``10**-digits``."""
    node = parse(expr) if isinstance(expr, str) else expr
    target = tolerance(digits)
    best = None
    for exp_, working in _expansions(node, 2 * digits + 20):
        conv = exp_.convergents
        if exp_.complete:
            last = len(conv) - 1
            tail = Fraction(0)
        else:
            last = None
            for n in range(len(conv) - 2):
                tail = 2 * (Fraction(1, conv[n + 1].q) + Fraction(1, conv[n + 2].q))
                if tail <= target / 2:
                    last = n
                    break
            if last is None:
                continue
        total = Enclosure.point(0)
        for n in range(last + 1):
            total = total + exp_.signed_term(n)
        value = Enclosure(total.lo, total.hi + tail)
        result = ErrorSumResult(value, last + 1, tail)
        if value.width <= target:
            return result
        best = value
    raise PrecisionError(f"error sum not resolved to 1e-{digits}", best)


def error_terms(expr: ConstExpr | str, count: int, digits: int = 50) -> list[tuple[Convergent, Enclosure]]:
    """The first ``count`` convergents of alpha with enclosures of ``(-1)**n (q_n alpha - p_n)``."""
    node = parse(expr) if isinstance(expr, str) else expr
    for exp_, _ in _expansions(node, digits):
        if len(exp_.convergents) >= count or exp_.complete:
            n_terms = min(count, len(exp_.convergents))
            return [(exp_.convergents[n], exp_.signed_term(n)) for n in range(n_terms)]
    raise PrecisionError(f"could not resolve {count} convergents")


def error_sum_power_series(expr: ConstExpr | str, x, digits: int) -> Enclosure:
    """Enclose ``sum (q_n alpha - p_n) x**n`` for ``|x| <= 3/2``.

    Each term is below ``(|x| / phi)**n`` in absolute value, which gives a
    geometric tail bound.
    """
    x = Fraction(x)
    if abs(x) > POWER_SERIES_RADIUS:
        raise DomainError(f"|x| must be <= 3/2, got {x}")
    node = parse(expr) if isinstance(expr, str) else expr
    target = tolerance(digits)
    ratio = abs(x) / PHI_LOWER
    last = 0
    tail = Fraction(0)
    if x != 0:
        power = ratio
        while power * ratio / (1 - ratio) > target / 2:
            power *= ratio
            last += 1
        tail = power * ratio / (1 - ratio)
    best = None
    for exp_, working in _expansions(node, 2 * digits + 20):
        conv = exp_.convergents
        if len(conv) <= last and not exp_.complete:
            continue
        total = Enclosure.point(0)
        for n in range(min(last + 1, len(conv))):
            c = conv[n]
            total = total + (exp_.alpha * c.q - c.p) * x**n
        value = Enclosure(total.lo - tail, total.hi + tail)
        if value.width <= target:
            return value
        best = value
    raise PrecisionError(f"power series not resolved to 1e-{digits}", best)


# Residual integrals


def beta_exp_series(m: int, k: int, c: Fraction, digits: int) -> Enclosure:
    """``B(m, k, c)`` with ``integral_0^1 x**m (x-1)**k e^(x/c) dx = (-1)**k B(m, k, c)``.

    Termwise integration gives ``sum_t (m+t)! k! / (t! c**t (m+t+k+1)!)``,
    all terms positive with ratio at most ``1 / ((t+1) c)``.
    """
    c = Fraction(c)
    k_fact = math.factorial(k)

    def term(t: int) -> Fraction:
        return Fraction(math.factorial(m + t) * k_fact, math.factorial(t) * math.factorial(m + t + k + 1)) / c**t

    def ratio(t: int) -> Fraction:
        return 1 / ((t + 1) * c)

    return sum_positive(term, ratio, digits)


def _moment(m: int, k: int, c: Fraction, digits: int) -> Enclosure:
    enc = beta_exp_series(m, k, c, digits)
    return enc if k % 2 == 0 else -enc


def residual_terms(family: HurwitzFamily, n: int, j: int) -> tuple[Fraction, list[tuple[Fraction, int, int]]]:
    """Prefactor and ``(coefficient, m, k)`` pieces of the residual integral.

    The residual ``p_{3n+j} - alpha q_{3n+j}`` equals
    ``prefactor * sum coefficient * integral_0^1 x**m (x-1)**k e^(x/c) dx``.
    """
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be an integer >= 0, got {n!r}")
    if j not in (0, 1, 2):
        raise DomainError(f"j must be 0, 1 or 2, got {j!r}")
    s = family.s
    c = Fraction(family.scale)
    if family.tag == "F1":
        base = Fraction(s, math.factorial(n)) / c ** (n + 1)
        if j == 0:
            return -base, [(Fraction(1), n, n)]
        if j == 1:
            return base / s, [(Fraction(1), n + 1, n), (Fraction(s - 1), n, n)]
        return base / s, [(Fraction(1), n, n + 1)]
    if j == 0:
        return Fraction(s, math.factorial(n)) / c ** (n + 2), [(Fraction(1), n, n + 1)]
    if j == 1:
        return -Fraction(s, math.factorial(n + 1)) / c ** (n + 2), [(Fraction(1), n + 1, n + 1)]
    return Fraction(s, math.factorial(n + 1)) / c ** (n + 3), [
        (Fraction(1), n + 2, n + 1),
        (Fraction(s - 1), n + 1, n + 1),
    ]


def residual_sign(family: HurwitzFamily, n: int, j: int) -> int:
    """Sign of the residual read off the formula: prefactor times the sign of (x-1)**k."""
    prefactor, pieces = residual_terms(family, n, j)
    k = pieces[0][2]
    return (1 if prefactor > 0 else -1) * (-1) ** k


def komatsu_residual(family: HurwitzFamily, n: int, j: int, digits: int = 50) -> Enclosure:
    """Enclose the residual integral for ``p_{3n+j} - alpha q_{3n+j}``."""
    check_digits(digits)
    prefactor, pieces = residual_terms(family, n, j)
    c = Fraction(family.scale)
    target = tolerance(digits)
    working = digits + 2 + _decimal_size(math.ceil(max(abs(coef) for coef, _, _ in pieces)))
    for _ in range(max_doublings() + 1):
        total = Enclosure.point(0)
        for coef, m, k in pieces:
            if coef:
                total = total + _moment(m, k, c, working) * coef
        result = total * prefactor
        if result.width <= target:
            return result
        working *= 2
    raise PrecisionError(f"residual integral not resolved to 1e-{digits}", result)


def convergent_residual(family: HurwitzFamily, m: int, digits: int = 50) -> Enclosure:
    """``p_m - alpha q_m`` from the pattern's convergents and an enclosure of alpha."""
    conv = None
    for conv in convergents(hurwitz_stream(family)):
        if conv.index == m:
            break
    extra = _decimal_size(conv.q) + 2

    def compute(working: int) -> Enclosure:
        alpha = exp_enclosure(Fraction(1, family.scale), working + extra) * family.s
        return conv.p - alpha * conv.q

    return refine(compute, digits)


# The alternating series A(l, s)


def _scale(ell, s) -> Fraction:
    c = Fraction(ell) * Fraction(s)
    if c <= 0:
        raise DomainError(f"l*s must be positive, got {c}")
    return c


def a_series(ell, s, digits: int) -> Enclosure:
    """``A(l, s) = sum (-1)**n / ((n+1)! (2n^2+7n+3) (l s)**n)`` by Leibniz summation."""
    c = _scale(ell, s)

    def term(n: int) -> Fraction:
        return Fraction((-1) ** n, math.factorial(n + 1) * (2 * n * n + 7 * n + 3)) / c**n

    return sum_alternating(term, digits, n0=math.ceil(1 / c))


def a_closed(ell, s, digits: int) -> Enclosure:
    """Closed form of ``A(l, s)`` with ``c = l s``::

        -c/2 + c**3/5 + (c (2 - c - c**2) / 5) e^(-1/c) + (4/5) integral_0^1 e^(-t^2/c) dt

    At ``c = 1`` this is ``-3/10 + (4/5) integral_0^1 e^(-t^2) dt``.
    """
    c = _scale(ell, s)
    constant = -c / 2 + c**3 / 5
    coefficient = c * (2 - c - c * c) / 5
    extra = _decimal_size(math.ceil(abs(coefficient)))

    def compute(working: int) -> Enclosure:
        value = constant + Fraction(4, 5) * gauss_integral(c, working)
        if coefficient:
            value = value + exp_enclosure(-1 / c, working + extra) * coefficient
        return value

    return refine(compute, digits)


def partial_fraction_parts(n: int) -> tuple[Fraction, Fraction]:
    """The split ``1/(2n^2+7n+3) = 2/(5(2n+1)) - 1/(5(n+3))``."""
    return Fraction(2, 5 * (2 * n + 1)), Fraction(1, 5 * (n + 3))
