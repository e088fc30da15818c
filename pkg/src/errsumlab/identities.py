"""Registry of error-sum identities and their verification.

Each identity pairs two independent evaluation routes. Error sums always go
through continued-fraction expansion (:mod:`errsumlab.contfrac` and
:func:`errsumlab.errorsum.error_sum_abs`); closed forms only use the
elementary enclosures of :mod:`errsumlab.numerics`. Throughout, ``I(c)``
denotes ``integral_0^1 exp(-t**2/c) dt`` and erf-bearing closed forms are
rewritten with it, e.g. ``e^(1/c) sqrt(pi c) erf(1/sqrt(c)) = 2 e^(1/c) I(c)``.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .constexpr import eval_enclosure
from .contfrac import HurwitzFamily, convergents, erfint_cf, extract_cf
from .errorsum import a_closed, a_series, error_sum_abs
from .numerics import (
    DomainError,
    Enclosure,
    PrecisionError,
    agreed_digits,
    endpoint_strings,
    exp_enclosure,
    gauss_integral,
    refine,
    sqrt_enclosure,
    sum_alternating,
    sum_positive,
    tolerance,
)

PROVED = "proved"
EMPIRICAL = "empirical"
DEFAULT_DIGITS = {PROVED: 50, EMPIRICAL: 30}

SIN_COS_EXPR = "4*(11*sin(1/2)-6*cos(1/2))/(53*cos(1/2)-97*sin(1/2))"
SIN_COS_HEAD = (4, 3, 4, 4, 4, 5, 4, 6, 4, 7, 4)
SIN_COS_DEPTH = 40
ERFINT_MAX_TERMS = 4096

Side = Callable[[dict, int], Enclosure]


class UnknownIdentity(KeyError):
    pass


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    minimum: int
    grid: tuple[int, ...]


@dataclass(frozen=True)
class Identity:
    id: str
    description: str
    status: str
    lhs: Side
    rhs: Side
    params: tuple[Param, ...] = ()
    check: Callable[[dict], tuple[bool, str]] | None = None

    @property
    def default_digits(self) -> int:
        return DEFAULT_DIGITS[self.status]

    def validate(self, params: dict | None) -> dict:
        params = dict(params or {})
        known = {p.name for p in self.params}
        unknown = sorted(set(params) - known)
        if unknown:
            raise ParameterError(f"{self.id} takes no parameter {unknown[0]!r}")
        out = {}
        for p in self.params:
            if p.name not in params:
                raise ParameterError(f"{self.id} needs parameter {p.name!r}")
            value = params[p.name]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParameterError(f"{self.id}: {p.name} must be an integer, got {value!r}")
            if value < p.minimum:
                raise ParameterError(f"{self.id}: {p.name} must be >= {p.minimum}, got {value}")
            out[p.name] = value
        return out

    def grid(self) -> list[dict]:
        names = [p.name for p in self.params]
        return [dict(zip(names, combo)) for combo in itertools.product(*(p.grid for p in self.params))]


@dataclass
class IdentityReport:
    id: str
    params: dict
    digits: int
    lhs: Enclosure | None
    rhs: Enclosure | None
    agreed_digits: int
    passed: bool
    status: str
    elapsed: float
    diagnostic: str | None = None

    def to_json(self) -> dict:
        places = self.digits + 5
        out = {
            "id": self.id,
            "params": dict(self.params),
            "digits": self.digits,
            "lhs": list(endpoint_strings(self.lhs, places)) if self.lhs else None,
            "rhs": list(endpoint_strings(self.rhs, places)) if self.rhs else None,
            "agreed_digits": self.agreed_digits,
            "pass": self.passed,
            "status": self.status,
            "elapsed_ms": round(self.elapsed * 1000, 3),
        }
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


# Side recipes


def _closed(compute: Callable[[dict, int], Enclosure]) -> Side:
    """Wrap a working-precision computation in geometric escalation."""
    return lambda params, digits: refine(lambda working: compute(params, working), digits)


def _error_sum(expression: Callable[[dict], str]) -> Side:
    return lambda params, digits: error_sum_abs(expression(params), digits).value


def _e(working: int) -> Enclosure:
    return exp_enclosure(1, working)


def _series_e_alt(digits: int) -> Enclosure:
    """sum (-1)**n / ((n+1)! (2n+1))"""
    return sum_alternating(lambda n: Fraction((-1) ** n, math.factorial(n + 1) * (2 * n + 1)), digits)


def _series_double_factorial(ell: int, digits: int) -> Enclosure:
    """sum 2^(2n+1) n! / (l^(n+1) (2n+1)!)"""

    def term(n: int) -> Fraction:
        return Fraction(2 ** (2 * n + 1) * math.factorial(n), ell ** (n + 1) * math.factorial(2 * n + 1))

    return sum_positive(term, lambda k: Fraction(2, ell * (2 * k + 3)), digits)


def _thm3_f1_rhs(p: dict, w: int) -> Enclosure:
    c = p["l"] * p["s"]
    return exp_enclosure(Fraction(1, c), w) * gauss_integral(c, w) * Fraction(2, p["l"])


def _thm3_f2_rhs(p: dict, w: int) -> Enclosure:
    s = p["s"]
    growth = exp_enclosure(Fraction(1, s), w + len(str(s)))
    return 2 * growth * gauss_integral(s, w) + s * (1 - growth) - 1


def _cor4_e_rhs(p: dict, w: int) -> Enclosure:
    e = _e(w)
    return 2 * e * gauss_integral(1, w) - e


def _cor4_epow_rhs(p: dict, w: int) -> Enclosure:
    ell = p["l"]
    return exp_enclosure(Fraction(1, ell), w) * gauss_integral(ell, w) * Fraction(2, ell)


def _eq1_rhs(p: dict, w: int) -> Enclosure:
    return _e(w + 2) / 4 * (-1 + 10 * a_series(1, 1, w + 2))


def _eq2_helper_lhs(p: dict, digits: int) -> Enclosure:
    return -_series_e_alt(digits)


def _eq2_helper_rhs(p: dict, w: int) -> Enclosure:
    return 1 - exp_enclosure(-1, w) - 2 * gauss_integral(1, w)


def _eq2_easier_rhs(p: dict, w: int) -> Enclosure:
    return _e(w + 1) * _series_e_alt(w + 1) - 1


def _eq3_rhs(p: dict, w: int) -> Enclosure:
    return _series_double_factorial(1, w) - _e(w)


def _eq4_rhs(p: dict, digits: int) -> Enclosure:
    return _series_double_factorial(p["l"], digits)


def _sqrt7_rhs(p: dict, w: int) -> Enclosure:
    return (7 + 5 * sqrt_enclosure(7, w + 1)) / 14


def _metallic_rhs(p: dict, w: int) -> Enclosure:
    m = p["m"]
    alpha = (m + sqrt_enclosure(4 + m * m, w + 2)) / 2
    return 1 / (alpha - 1)


def _golden_rhs(p: dict, w: int) -> Enclosure:
    return (1 + sqrt_enclosure(5, w + 1)) / 2


def sin_cos_pattern():
    """a_0 = 4, a_(2k+1) = k + 3, a_(2k+2) = 4."""
    yield 4
    for k in itertools.count():
        yield k + 3
        yield 4


def enclose_quotients(quotients, digits: int) -> Enclosure:
    """Enclose an infinite regular continued fraction between consecutive convergents."""
    target = tolerance(digits)
    previous = None
    for conv in convergents(quotients):
        if previous is not None:
            enc = Enclosure.hull_of(previous.value, conv.value)
            if enc.width <= target:
                return enc
        previous = conv
    raise PrecisionError("quotient stream ended before reaching the target width")


def _sin_cos_lhs(p: dict, digits: int) -> Enclosure:
    return enclose_quotients(sin_cos_pattern(), digits)


def _sin_cos_rhs(p: dict, digits: int) -> Enclosure:
    return eval_enclosure(SIN_COS_EXPR, digits)


def _sin_cos_check(p: dict) -> tuple[bool, str]:
    extracted = extract_cf(SIN_COS_EXPR, SIN_COS_DEPTH)
    expected = list(itertools.islice(sin_cos_pattern(), SIN_COS_DEPTH))
    if extracted[: len(SIN_COS_HEAD)] != list(SIN_COS_HEAD):
        return False, f"first quotients {extracted[:11]} differ from the printed expansion"
    if extracted != expected:
        first = next(i for i, (a, b) in enumerate(zip(extracted, expected)) if a != b)
        return False, f"quotient {first} is {extracted[first]}, pattern predicts {expected[first]}"
    return True, f"first {SIN_COS_DEPTH} extracted quotients match the pattern"


def _conj_lhs(p: dict, digits: int) -> Enclosure:
    target = tolerance(digits)
    terms = 8
    while terms <= ERFINT_MAX_TERMS:
        enc = erfint_cf(terms)
        if enc.width <= target:
            return enc
        terms *= 2
    raise PrecisionError(f"continued fraction not resolved within {ERFINT_MAX_TERMS} levels", enc)


def _conj_rhs(p: dict, digits: int) -> Enclosure:
    return gauss_integral(1, digits)


F1_GRID = (Param("l", 2, (2, 3, 4)), Param("s", 1, (1, 2, 3)))
F2_GRID = (Param("s", 1, (1, 2, 3, 4)),)
ELL_GRID = (Param("l", 2, (2, 3, 4, 5, 6)),)


def _f1_expr(p: dict) -> str:
    return HurwitzFamily.f1(p["l"], p["s"]).expression()


def _f2_expr(p: dict) -> str:
    return HurwitzFamily.f2(p["s"]).expression()


def _epow_expr(p: dict) -> str:
    return f"e^(1/{p['l']})"


_REGISTRY: tuple[Identity, ...] = (
    Identity(
        "eq1_main",
        "E(e) = (e/4) (-1 + 10 sum (-1)^n / ((n+1)! (2n^2+7n+3)))",
        PROVED,
        _error_sum(lambda p: "e"),
        _closed(_eq1_rhs),
    ),
    Identity(
        "thm3_f1",
        "E(s e^(1/(l s))) = e^(1/(l s)) sqrt(pi s / l) erf(1/sqrt(l s)) = (2/l) e^(1/(l s)) I(l s)",
        PROVED,
        _error_sum(_f1_expr),
        _closed(_thm3_f1_rhs),
        F1_GRID,
    ),
    Identity(
        "thm3_f2",
        "E(s e^(1/s)) = e^(1/s) sqrt(pi s) erf(1/sqrt(s)) + s (1 - e^(1/s)) - 1",
        PROVED,
        _error_sum(_f2_expr),
        _closed(_thm3_f2_rhs),
        F2_GRID,
    ),
    Identity(
        "cor4_e",
        "E(e) = 2 e I(1) - e = e sqrt(pi) erf(1) - e",
        PROVED,
        _error_sum(lambda p: "e"),
        _closed(_cor4_e_rhs),
    ),
    Identity(
        "cor4_epow",
        "E(e^(1/l)) = e^(1/l) sqrt(pi/l) erf(1/sqrt(l)) = (2/l) e^(1/l) I(l)",
        PROVED,
        _error_sum(_epow_expr),
        _closed(_cor4_epow_rhs),
        ELL_GRID,
    ),
    Identity(
        "cor5_closed",
        "A(l, s) = -c/2 + c^3/5 + (c (2 - c - c^2)/5) e^(-1/c) + (4/5) I(c), c = l s",
        PROVED,
        lambda p, d: a_series(p["l"], p["s"], d),
        lambda p, d: a_closed(p["l"], p["s"], d),
        (Param("l", 1, (1, 2, 3)), Param("s", 1, (1, 2, 3))),
    ),
    Identity(
        "eq2_helper",
        "sum (-1)^(n+1) / ((n+1)! (2n+1)) = 1 - e^(-1) - 2 I(1)",
        PROVED,
        _eq2_helper_lhs,
        _closed(_eq2_helper_rhs),
    ),
    Identity(
        "eq2_easier",
        "E(e) = e sum (-1)^n / ((n+1)! (2n+1)) - 1",
        PROVED,
        _error_sum(lambda p: "e"),
        _closed(_eq2_easier_rhs),
    ),
    Identity(
        "eq3_othere",
        "E(e) = sum 2^(2n+1) n! / (2n+1)! - e",
        PROVED,
        _error_sum(lambda p: "e"),
        _closed(_eq3_rhs),
    ),
    Identity(
        "eq4_otherpow",
        "E(e^(1/l)) = sum 2^(2n+1) n! / (l^(n+1) (2n+1)!)",
        PROVED,
        _error_sum(_epow_expr),
        _eq4_rhs,
        ELL_GRID,
    ),
    Identity(
        "elsner_sqrt7",
        "E(sqrt(7)) = (7 + 5 sqrt(7)) / 14",
        PROVED,
        _error_sum(lambda p: "sqrt(7)"),
        _closed(_sqrt7_rhs),
    ),
    Identity(
        "elsner_metallic",
        "E((m + sqrt(4 + m^2))/2) = 1 / ((m + sqrt(4 + m^2))/2 - 1)",
        PROVED,
        _error_sum(lambda p: f"({p['m']}+sqrt({4 + p['m'] ** 2}))/2"),
        _closed(_metallic_rhs),
        (Param("m", 1, (1, 2, 3, 4, 5)),),
    ),
    Identity(
        "elsner_golden",
        "E((1 + sqrt(5))/2) = (1 + sqrt(5))/2",
        PROVED,
        _error_sum(lambda p: "(1+sqrt(5))/2"),
        _closed(_golden_rhs),
    ),
    Identity(
        "hetyei_cf",
        "[4; 3, 4, 4, 4, 5, 4, 6, ...] = 4 (11 sin(1/2) - 6 cos(1/2)) / (53 cos(1/2) - 97 sin(1/2)); "
        "pattern a_(2k+1) = k+3, a_(2k+2) = 4 assumed beyond the printed quotients",
        PROVED,
        _sin_cos_lhs,
        _sin_cos_rhs,
        check=_sin_cos_check,
    ),
    Identity(
        "conj_cf",
        "I(1) = 3/8 + (5/4)/(3 + 9/(21 + 288/(63 + ... n(n+2)^2(2n-1)^2/((2n+5)(n^2+n+1) + ...))))",
        EMPIRICAL,
        _conj_lhs,
        _conj_rhs,
    ),
)

_BY_ID = {identity.id: identity for identity in _REGISTRY}


def registry() -> list[Identity]:
    return list(_REGISTRY)


def get(identity_id: str) -> Identity:
    try:
        return _BY_ID[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


def verify(identity_id: str, params: dict | None = None, digits: int | None = None) -> IdentityReport:
    """Evaluate both sides to width ``10**-digits`` and compare them.

    A precision failure yields a failing report with a diagnostic instead of
    an exception. Unknown ids and invalid parameters raise.
    """
    identity = get(identity_id)
    params = identity.validate(params)
    digits = identity.default_digits if digits is None else digits
    if isinstance(digits, bool) or not isinstance(digits, int) or digits < 1:
        raise ParameterError(f"digits must be a positive integer, got {digits!r}")
    start = time.perf_counter()
    lhs = rhs = None
    diagnostic = None
    try:
        # one spare digit keeps the hull of two agreeing sides within 10**-digits
        lhs = identity.lhs(params, digits + 1)
        rhs = identity.rhs(params, digits + 1)
    except (PrecisionError, DomainError) as exc:
        diagnostic = f"{type(exc).__name__}: {exc}"
    passed = False
    agreed = 0
    if lhs is not None and rhs is not None:
        target = tolerance(digits)
        agreed = agreed_digits(lhs, rhs, cap=digits + 1)
        passed = lhs.intersects(rhs) and lhs.width <= target and rhs.width <= target
        if not lhs.intersects(rhs):
            diagnostic = "enclosures are disjoint"
        if passed and identity.check is not None:
            ok, note = identity.check(params)
            passed = ok
            diagnostic = None if ok else note
    elapsed = time.perf_counter() - start
    return IdentityReport(
        identity.id, params, digits, lhs, rhs, agreed, passed, identity.status, elapsed, diagnostic
    )


def _verify_job(job: tuple[str, dict, int | None]) -> IdentityReport:
    return verify(*job)


def default_jobs() -> int:
    return os.cpu_count() or 1


def plan(digits: int | None = None) -> list[tuple[str, dict, int | None]]:
    """Every registry entry over its default parameter grid, in registry order."""
    return [(identity.id, params, digits) for identity in _REGISTRY for params in identity.grid()]


def verify_many(jobs_list: list[tuple[str, dict, int | None]], jobs: int = 1) -> list[IdentityReport]:
    """Run verifications, in parallel when ``jobs > 1``; results keep input order."""
    if jobs <= 1 or len(jobs_list) <= 1:
        return [_verify_job(job) for job in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_verify_job, jobs_list))


def verify_all(digits: int | None = None, jobs: int = 1) -> list[IdentityReport]:
    return verify_many(plan(digits), jobs)
