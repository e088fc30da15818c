"""Acceptance suite: one test per criterion, summarized at the end of the run."""

import itertools
import json
import random
import time
from fractions import Fraction

import pytest

import oracles
from errsumlab.cli import main
from errsumlab.constexpr import eval_enclosure
from errsumlab.contfrac import HurwitzFamily, convergents, erfint_cf, extract_cf, hurwitz_stream
from errsumlab.errorsum import (
    a_series,
    convergent_residual,
    error_sum_abs,
    error_terms,
    komatsu_residual,
    residual_sign,
    partial_fraction_parts,
)
from errsumlab.identities import SIN_COS_EXPR, get, sin_cos_pattern, verify
from errsumlab.numerics import DomainError, agreed_digits, exp_enclosure, gauss_integral, tolerance

criterion = pytest.mark.criterion


def check_grid(identity_id, digits=50):
    identity = get(identity_id)
    reports = [verify(identity_id, params, digits) for params in identity.grid()]
    failed = [r.params for r in reports if not r.passed]
    assert not failed, f"{identity_id} failed for {failed}"
    return reports


def min_agreed(reports):
    return min(r.agreed_digits for r in reports)


@criterion(1, "error sum of e against its alternating-series form, 50 digits, < 10 s")
def test_main_identity(record_property):
    start = time.perf_counter()
    report = verify("eq1_main", digits=50)
    elapsed = time.perf_counter() - start
    assert report.passed and report.agreed_digits >= 50
    assert elapsed < 10
    # independent value 2 e I(1) - e from the gauss_integral and exp oracles
    e = exp_enclosure(1, 20)
    derived = 2 * e * gauss_integral(1, 20) - e
    assert agreed_digits(report.lhs, derived) >= 12
    assert oracles.near(report.lhs.mid, "1.341875110098", 12)
    record_property("detail", f"agreed={report.agreed_digits} time={elapsed:.2f}s")


@criterion(2, "Hurwitz-family error sums over the default grids, 50 digits, < 2 min")
def test_hurwitz_grids(record_property):
    start = time.perf_counter()
    f1 = check_grid("thm3_f1")
    f2 = check_grid("thm3_f2")
    elapsed = time.perf_counter() - start
    assert len(f1) == 9 and len(f2) == 4
    assert elapsed < 120
    record_property("detail", f"13 cases, min agreed={min_agreed(f1 + f2)} time={elapsed:.2f}s")


@criterion(3, "Gauss-integral closed forms and A(l, s) at 50 digits; factor-free 2I - e rejected at 10 digits")
def test_corollaries(record_property):
    reports = check_grid("cor4_e") + check_grid("cor4_epow") + check_grid("cor5_closed")
    assert len(reports) == 1 + 5 + 9
    lhs = error_sum_abs("e", 10).value
    factor_free = 2 * gauss_integral(1, 12) - exp_enclosure(1, 12)
    assert not lhs.intersects(factor_free)
    e = exp_enclosure(1, 12)
    assert lhs.intersects(2 * e * gauss_integral(1, 12) - e)
    record_property("detail", f"{len(reports)} cases, min agreed={min_agreed(reports)}; 2I-e off by {float(lhs.mid - factor_free.mid):.3f}")


def test_factor_free_variant_fails():
    """The variant without the factor e misses the error sum of e by about 2.57."""
    lhs = error_sum_abs("e", 10).value
    assert not lhs.intersects(2 * gauss_integral(1, 12) - exp_enclosure(1, 12))


def test_printed_scaling_of_a_fails_away_from_one():
    """The -(3/10) l s variant of the A(l, s) closed form only holds when l s = 1."""

    def variant(c):
        c = Fraction(c)
        return (
            -Fraction(3, 10) * c
            + exp_enclosure(-1 / c, 20) * (c * (2 - c - c * c) / 5)
            + Fraction(4, 5) * gauss_integral(c, 20)
        )

    assert variant(1).intersects(a_series(1, 1, 15))
    for c in (2, 3, 4, 6, 9):
        assert not variant(c).intersects(a_series(c, 1, 15))


@criterion(4, "series rewrites of the error sums of e and e^(1/l), 50 digits")
def test_remark_identities(record_property):
    reports = []
    for identity_id in ("eq2_helper", "eq2_easier", "eq3_othere", "eq4_otherpow"):
        reports += check_grid(identity_id)
    assert len(reports) == 3 + 5
    record_property("detail", f"{len(reports)} cases, min agreed={min_agreed(reports)}")


@criterion(5, "quadratic irrational closed forms, 50 digits")
def test_quadratic_examples(record_property):
    reports = check_grid("elsner_sqrt7") + check_grid("elsner_golden") + check_grid("elsner_metallic")
    assert len(reports) == 7
    assert oracles.near(reports[0].lhs.mid, oracles.SQRT7_ERROR_SUM, 48)
    record_property("detail", f"{len(reports)} cases, min agreed={min_agreed(reports)}")


@criterion(6, "extracted partial quotients match the Euler and Hurwitz patterns")
def test_cf_patterns(record_property):
    euler = [2] + list(itertools.chain.from_iterable([1, 2 * k, 1] for k in range(1, 70)))
    assert extract_cf("e", 200) == euler[:200]
    cases = 0
    for ell, s in itertools.product([2, 3], [1, 2]):
        fam = HurwitzFamily.f1(ell, s)
        assert extract_cf(fam.expression(), 100) == list(itertools.islice(hurwitz_stream(fam), 100))
        cases += 1
    for s in (1, 2, 3):
        fam = HurwitzFamily.f2(s)
        assert extract_cf(fam.expression(), 100) == list(itertools.islice(hurwitz_stream(fam), 100))
        cases += 1
    record_property("detail", f"e: 200 quotients; {cases} families x 100 quotients")


@criterion(7, "sin/cos constant: 40 quotients follow the pattern, first 11 as printed")
def test_sin_cos_constant(record_property):
    extracted = extract_cf(SIN_COS_EXPR, 40)
    assert extracted[:11] == [4, 3, 4, 4, 4, 5, 4, 6, 4, 7, 4]
    assert extracted == list(itertools.islice(sin_cos_pattern(), 40))
    assert verify("hetyei_cf").passed
    record_property("detail", f"tail ... {extracted[-4:]}")


@criterion(8, "conjectured generalized continued fraction vs I(1), <= 200 terms, 30 digits")
def test_conjecture(record_property):
    reference = gauss_integral(1, 31)
    terms = next(n for n in range(2, 201) if erfint_cf(n).width <= tolerance(31))
    enc = erfint_cf(terms)
    assert enc.intersects(reference)
    assert agreed_digits(enc, reference) >= 30
    at_200 = erfint_cf(200)
    assert at_200.intersects(reference)
    report = verify("conj_cf")
    assert report.passed and report.status == "empirical"
    record_property("detail", f"{terms} levels suffice, agreed={agreed_digits(enc, reference)}, status empirical")


@criterion(9, "integral residuals vs convergent residuals, n <= 10, 40 digits, signs")
def test_residual_integrals(record_property):
    families = [HurwitzFamily.f1(ell, s) for ell, s in itertools.product([2, 3, 4], [1, 2, 3])]
    families += [HurwitzFamily.f2(s) for s in (1, 2, 3, 4)]
    checked = 0
    worst = None
    for fam in families:
        for n in range(11):
            for j in range(3):
                integral = komatsu_residual(fam, n, j, 41)
                conv = convergent_residual(fam, 3 * n + j, 41)
                agreed = agreed_digits(integral, conv)
                assert integral.intersects(conv) and agreed >= 40, (fam, n, j)
                sign = residual_sign(fam, n, j)
                assert (integral.lo > 0 and conv.lo > 0) if sign > 0 else (integral.hi < 0 and conv.hi < 0)
                worst = agreed if worst is None else min(worst, agreed)
                checked += 1
    record_property("detail", f"{checked} residuals, min agreed={worst}")


IN_SCOPE = [
    "e",
    "sqrt(7)",
    "(1+sqrt(5))/2",
    SIN_COS_EXPR,
    "e^(1/2)",
    "e^(1/3)",
    "e^(1/4)",
    "e^(1/5)",
    "e^(1/6)",
] + [HurwitzFamily.f1(ell, s).expression() for ell, s in itertools.product([2, 3, 4], [1, 2, 3])]
IN_SCOPE += [HurwitzFamily.f2(s).expression() for s in (1, 2, 3, 4)]
IN_SCOPE += [f"({m}+sqrt({4 + m * m}))/2" for m in range(1, 6)]


def random_expression(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([str(rng.randint(1, 12)), "e", "0.5", f"e^({rng.randint(-3, 3)}/{rng.randint(1, 5)})"])
    kind = rng.randrange(5)
    child = random_expression(rng, depth - 1)
    if kind == 0:
        return f"{rng.choice(['sqrt', 'sin', 'cos'])}({child})"
    if kind == 1:
        return f"exp({rng.choice(['sin', 'cos'])}({child}))"
    if kind == 2:
        return f"-{child}"
    return f"({child} {rng.choice('+-*/')} {random_expression(rng, depth - 1)})"


@criterion(10, "determinant, sign alternation, nesting and partial-fraction properties")
def test_properties(record_property):
    pairs = 0
    terms = 0
    for text in dict.fromkeys(IN_SCOPE):
        computed = error_terms(text, 60)
        convs = [c for c, _ in computed]
        for a, b in zip(convs, convs[1:]):
            assert b.p * a.q - a.p * b.q == (-1) ** (b.index + 1)
            pairs += 1
        for (conv, signed), (nxt, _) in zip(computed, computed[1:]):
            assert signed.lo > 0 and signed.hi < Fraction(1, nxt.q)
        terms += len(computed)
    for fam in [HurwitzFamily.f1(2, 1), HurwitzFamily.f2(3)]:
        convs = list(itertools.islice(convergents(hurwitz_stream(fam)), 300))
        assert all(b.p * a.q - a.p * b.q == (-1) ** (b.index + 1) for a, b in zip(convs, convs[1:]))
        pairs += len(convs) - 1

    rng = random.Random(20240601)
    nested = 0
    while nested < 100:
        text = random_expression(rng, 4)
        digits = rng.randint(3, 30)
        try:
            coarse = eval_enclosure(text, digits)
        except DomainError:
            continue
        fine = eval_enclosure(text, digits + 10)
        assert coarse.contains(fine), text
        nested += 1

    for n in range(101):
        first, second = partial_fraction_parts(n)
        assert first - second == Fraction(1, 2 * n * n + 7 * n + 3)
    record_property(
        "detail", f"{pairs} determinant pairs, {terms} signed terms, {nested} nested expressions, lemma n=0..100"
    )


@criterion(11, "command-line sweep: verify --all --digits 50 --format json exits 0")
def test_cli_full_registry(capsys, record_property):
    code = main(["verify", "--all", "--digits", "50", "--format", "json"])
    reports = json.loads(capsys.readouterr().out)
    assert code == 0
    assert len(reports) == 46 and all(r["pass"] for r in reports)
    record_property("detail", f"{len(reports)} reports, min agreed={min(r['agreed_digits'] for r in reports)}")
