import json
import math
from pathlib import Path

import numpy as np
import pytest
from sympy import isprime

from src.errors import ConfigError, PreconditionError
from src.experiments import (
    ExperimentReport,
    ExperimentRunner,
    ExperimentSpec,
    GoldenStore,
    Kind,
    Lcg64,
    ap_error,
    bv_lhs,
    chunk_bounds,
    conjecture_lhs,
    goldbach_pairs,
    hm_lemma_ratio,
    kawada_lhs,
    lemma_lhs,
    lemma_ratio,
    merge_sum,
    ordered_chunks,
    thm1_lhs,
    thm2_lhs,
    thm5_lhs,
    thm6_variance,
    thm7_lhs,
    twin_pairs,
)
from src.experiments.lemmas import LCG_INCREMENT
from src.sieve import sieve_window, totient
from src.singular import binary_h_integral, binary_sing_ap, h_integral, ternary_one_ap, ternary_two_ap

P_MAX = 10**4
GOLDEN_DIR = Path(__file__).parent / "golden"


def _primes(X, Y):
    return [p for p in range(X + 1, X + Y + 1) if isprime(p)]


def _pairs(r, X2, Y, q, a, weighted=True, twin=False):
    terms = []
    for p2 in _primes(X2, Y):
        if (p2 - a) % q:
            continue
        p3 = p2 - r if twin else r - p2
        if p3 >= 2 and isprime(p3):
            terms.append(math.log(p2) * math.log(p3) if weighted else 1.0)
    return math.fsum(terms)


def _binary_residual(r, X2, Y, q, a, weighted=True):
    sing = binary_sing_ap(r, q, a, P_MAX).value
    if sing == 0:
        main = 0.0
    else:
        main = sing * Y if weighted else sing * binary_h_integral(X2, Y, r)
    return _pairs(r, X2, Y, q, a, weighted) - main


def _ternary(n, P1, P2, weighted=True):
    """(p1, p2, weight) for every prime p3 = n - p1 - p2"""
    out = []
    for p1 in P1:
        for p2 in P2:
            p3 = n - p1 - p2
            if p3 >= 2 and isprime(p3):
                w = math.log(p1) * math.log(p2) * math.log(p3) if weighted else 1.0
                out.append((p1, p2, w))
    return out


def _close(got, expected):
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-6)


# Pair sums and the AP error

def test_goldbach_pairs_against_loops():
    window = sieve_window(40, 20)
    assert goldbach_pairs(100, window, weighted=False) == 4
    _close(goldbach_pairs(100, window), _pairs(100, 40, 20, 1, 0))
    _close(goldbach_pairs(100, window, q=3, a=2), _pairs(100, 40, 20, 3, 2))


def test_twin_pairs_counts_twins_below_hundred():
    window = sieve_window(0, 100)
    assert twin_pairs(2, window, weighted=False) == 8
    _close(twin_pairs(2, window), _pairs(2, 0, 100, 1, 0, twin=True))


def test_pairs_reject_uncovered_partner():
    with pytest.raises(PreconditionError):
        goldbach_pairs(100, sieve_window(40, 20), aux=sieve_window(0, 10))


def test_ap_error_against_loops():
    expected = math.fsum(math.log(p) for p in _primes(100, 100) if p % 3 == 1) - 100 / 2
    _close(ap_error(100, 100, 3, 1), expected)
    assert ap_error(100, 100, 3, 0) == 0.0
    with pytest.raises(PreconditionError):
        ap_error(100, 100, 3, 1, window=sieve_window(100, 50))


# Reduction

def test_chunk_bounds_are_fixed():
    assert chunk_bounds(10, 4) == [(0, 4), (4, 8), (8, 10)]
    assert chunk_bounds(0, 4) == []
    with pytest.raises(ValueError):
        chunk_bounds(10, 0)


def test_ordered_chunks_preserve_order_across_workers():
    indices = list(range(-10, 0))
    expected = [abs(i) for i in indices]
    assert ordered_chunks(abs, indices, workers=1, chunk_size=3) == expected
    assert ordered_chunks(abs, indices, workers=2, chunk_size=3) == expected


def test_merge_sum_is_exact():
    assert merge_sum([1e16, 1.0, -1e16]) == 1.0


# Theorem left-hand sides against brute force

def test_bv_lhs_against_loops():
    X, Y, Q = 200, 300, 5
    primes = _primes(X, Y)
    expected = []
    for q in range(1, Q + 1):
        main = Y / totient(q)
        expected.append(max(
            abs(math.fsum(math.log(p) for p in primes if p % q == a) - main)
            for a in range(q) if math.gcd(a, q) == 1
        ))
    report = bv_lhs(X, Y, Q)
    _close(report.lhs, math.fsum(expected))
    assert [q for q, _ in report.rows] == [1, 2, 3, 4, 5]
    assert report.main_scale == Y


@pytest.mark.parametrize("weighted", [True, False])
def test_kawada_lhs_against_loops(weighted):
    X1 = X2 = 100
    Y, Q2, a2 = 50, 3, 1
    expected = math.fsum(
        abs(_binary_residual(2 * k, X2, Y, q2, a2, weighted))
        for k in range(X1 + 1, X1 + Y + 1) for q2 in range(1, Q2 + 1)
    )
    report = kawada_lhs(X1, X2, Y, Q2, a2, weighted=weighted, P_max=P_MAX)
    _close(report.lhs, expected)
    assert report.main_scale == Y * Y
    assert len(report.rows) == Y


def test_kawada_warns_when_partners_fall_below_two():
    report = kawada_lhs(10, 40, 10, 1, 1, P_max=P_MAX)
    assert any("cut off" in w for w in report.warnings)
    assert any("2 X1 - Y" in w for w in report.warnings)


@pytest.mark.parametrize("max_over_a", [False, True])
def test_thm5_lhs_against_loops(max_over_a):
    X1 = X2 = 100
    Y, Q1, Q2, a1, a2 = 40, 3, 2, 1, 1
    per_k = {k: math.fsum(abs(_binary_residual(2 * k, X2, Y, q2, a2)) for q2 in range(1, Q2 + 1))
             for k in range(X1 + 1, X1 + Y + 1)}
    expected = []
    for q1 in range(1, Q1 + 1):
        sums = [math.fsum(v for k, v in per_k.items() if (2 * k) % q1 == b) for b in range(q1)]
        expected.append(max(sums) if max_over_a else sums[a1 % q1])
    report = thm5_lhs(X1, X2, Y, Q1, Q2, a1, a2, max_over_a=max_over_a, P_max=P_MAX)
    _close(report.lhs, math.fsum(expected))
    assert report.main_scale == Y * Y


def test_thm6_variance_against_loops():
    X1, R, X2, Y = 200, 20, 150, 100
    expected = math.fsum(_binary_residual(2 * k, X2, Y, 1, 0) ** 2 for k in range(X1 + 1, X1 + R + 1))
    report = thm6_variance(X1, R, X2, Y, P_max=P_MAX)
    _close(report.lhs, expected)
    assert report.main_scale == R * Y * Y
    assert report.warnings == []


@pytest.mark.parametrize("max_over_a", [False, True])
def test_thm7_lhs_against_loops(max_over_a):
    X1, X2, Y, R, Q, a = 200, 150, 100, 20, 3, 1
    per_k = {k: abs(_binary_residual(2 * k, X2, Y, 1, 0)) for k in range(X1 + 1, X1 + R + 1)}
    expected = []
    for q in range(1, Q + 1):
        sums = [math.fsum(v for k, v in per_k.items() if (2 * k) % q == b) for b in range(q)]
        expected.append(max(sums) if max_over_a else sums[a % q])
    report = thm7_lhs(X1, X2, Y, R, Q, a, max_over_a=max_over_a, P_max=P_MAX)
    _close(report.lhs, math.fsum(expected))


@pytest.mark.parametrize("equation,X1", [("goldbach", 300), ("twin", 0)])
def test_conjecture_lhs_against_loops(equation, X1):
    R, X2, Y, Q = 20, 100, 100, 3
    twin = equation == "twin"
    expected = []
    for r in range(X1 + 1, X1 + R + 1):
        if r % 2:
            continue
        for q in range(1, Q + 1):
            admissible = [a for a in range(q) if math.gcd(a, q) == 1 and math.gcd(a - r, q) == 1]
            if not admissible:
                continue
            expected.append(max(
                abs(_pairs(r, X2, Y, q, a, twin=twin) - binary_sing_ap(r, q, a, P_MAX).value * Y)
                for a in admissible
            ))
    report = conjecture_lhs(X1, R, X2, Y, Q, equation, P_max=P_MAX)
    _close(report.lhs, math.fsum(expected))
    assert report.kind == f"conjecture_{equation}"


def test_conjecture_rejects_unknown_equation():
    with pytest.raises(PreconditionError):
        conjecture_lhs(0, 10, 100, 100, 1, "cousin")


@pytest.mark.parametrize("n,weighted", [(161, True), (165, False)])
def test_thm1_lhs_against_loops(n, weighted):
    X1 = X2 = 50
    Y, Q1, Q2, a1, a2 = 30, 2, 2, 1, 1
    triples = _ternary(n, _primes(X1, Y), _primes(X2, Y), weighted)
    scale = Y * Y if weighted else h_integral(X1, X2, Y, n)
    expected = []
    for q1 in range(1, Q1 + 1):
        for q2 in range(1, Q2 + 1):
            total = math.fsum(w for p1, p2, w in triples if (p1 - a1) % q1 == 0 and (p2 - a2) % q2 == 0)
            main = ternary_two_ap(n, q1, a1, q2, a2, P_MAX, printed=False).value
            expected.append(abs(total - main * scale))
    report = thm1_lhs(n, X1, X2, Y, Q1, Q2, a1, a2, weighted=weighted, P_max=P_MAX)
    _close(report.lhs, math.fsum(expected))


@pytest.mark.parametrize("max_over_a", [False, True])
def test_thm2_lhs_against_loops(max_over_a):
    n, X1, Y1, X2, Y2, Q, a = 151, 50, 10, 50, 30, 3, 1
    triples = _ternary(n, _primes(X1, Y1), _primes(X2, Y2))

    def residual(q, b):
        total = math.fsum(w for p1, _, w in triples if (p1 - b) % q == 0)
        return abs(total - ternary_one_ap(n, q, b, P_MAX).value * Y1 * Y2)

    expected = []
    for q in range(1, Q + 1):
        if max_over_a:
            expected.append(max(residual(q, b) for b in range(q) if math.gcd(b, q) == 1))
        else:
            expected.append(residual(q, a))
    report = thm2_lhs(n, X1, Y1, X2, Y2, Q, a, max_over_a=max_over_a, P_max=P_MAX)
    _close(report.lhs, math.fsum(expected))
    assert report.main_scale == Y1 * Y2


@pytest.mark.parametrize("workers", [2, 8])
def test_reports_do_not_depend_on_worker_count(workers):
    one = thm6_variance(200, 20, 150, 100, P_max=P_MAX, workers=1, chunk_size=4)
    many = thm6_variance(200, 20, 150, 100, P_max=P_MAX, workers=workers, chunk_size=4)
    assert one.rows == many.rows
    assert one.lhs == many.lhs

    one = kawada_lhs(100, 100, 30, 2, 1, P_max=P_MAX, workers=1, chunk_size=7)
    many = kawada_lhs(100, 100, 30, 2, 1, P_max=P_MAX, workers=workers, chunk_size=7)
    assert one.summary() == many.summary()
    assert one.rows == many.rows

    one = bv_lhs(1000, 500, 5, workers=1, chunk_size=2)
    assert one.rows == bv_lhs(1000, 500, 5, workers=workers, chunk_size=2).rows


def test_unweighted_pair_counts_bracket_weighted_sums():
    X1, X2, Y = 300, 250, 50
    window, aux = sieve_window(X2, Y), sieve_window(0, 2 * (X1 + Y))
    for k1 in range(X1 + 1, X1 + Y + 1):
        r = 2 * k1
        count = goldbach_pairs(r, window, weighted=False, aux=aux)
        weighted = goldbach_pairs(r, window, aux=aux)
        # log p2 log p3 lies between these for p2 in (X2, X2 + Y]
        low = math.log(X2 + 1) * math.log(r - X2 - Y)
        high = math.log(X2 + Y) * math.log(r - X2 - 1)
        assert weighted / high <= count * (1 + 1e-12)
        assert count <= weighted / low * (1 + 1e-12)


# Lemma ratios

def test_lcg_is_deterministic():
    assert Lcg64(0).next_uniform() == (LCG_INCREMENT >> 11) / 2**53
    first, second = Lcg64(7).unit_box(16), Lcg64(7).unit_box(16)
    assert (first == second).all()
    assert (abs(first.real) <= 1).all() and (abs(first.imag) <= 1).all()


def test_lemma_lhs_on_constant_vector():
    ones = np.ones(10, dtype=np.complex128)
    assert lemma_lhs("lemma1", ones, 0, 1) == pytest.approx(10)
    # q in {2, 3}: largest classes hold 5 and 4 of n = 1..10
    assert lemma_lhs("lemma2", ones, 0, 2) == pytest.approx(9)


def test_lemma_ratio_preconditions():
    assert lemma_ratio("lemma1", np.zeros(5, dtype=np.complex128), 10, 2) == 0.0
    with pytest.raises(PreconditionError):
        lemma_ratio("lemma1", np.ones(5, dtype=np.complex128), 3, 4)
    with pytest.raises(PreconditionError):
        hm_lemma_ratio("lemma2", 1, 10, 2)
    with pytest.raises(PreconditionError):
        hm_lemma_ratio("lemma3", 10, 10, 2)


def test_hm_lemma_ratio_is_reproducible():
    first = hm_lemma_ratio("lemma2", 100, 60, 4, trials=3, rng_seed=11)
    assert first == hm_lemma_ratio("lemma2", 100, 60, 4, trials=3, rng_seed=11)
    assert first > 0


# Specs, reports and the runner

def test_spec_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        ExperimentSpec.from_dict({"kind": "thm6_variance", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentSpec.from_dict({"X1": 3})
    with pytest.raises(ConfigError):
        ExperimentSpec("thm99")
    with pytest.raises(ConfigError):
        ExperimentSpec(Kind.THM3_BV, q_rule="sqrt")


def test_spec_round_trips_through_dict():
    spec = ExperimentSpec.from_dict({"kind": "thm7", "X1": 200, "R": 20})
    assert spec.kind is Kind.THM7
    assert ExperimentSpec.from_dict(spec.to_dict()) == spec


def test_hypothesis_warnings():
    spec = ExperimentSpec(Kind.THM1, n=100, X1=10, X2=10, Y=5)
    assert "n = 100 is not odd" in spec.hypothesis_warnings()
    assert ExperimentSpec(Kind.THM6_VARIANCE, X1=200, X2=150, Y=100, R=20).hypothesis_warnings() == []


def test_report_normalisation():
    report = ExperimentReport(kind="thm3_bv", lhs=2.0, main_scale=4.0, scale_formula="Y",
                              log_scale=math.log(100), A_display=2, rows=[(1, 0.5), (2, 1.5)])
    assert report.normalized == 0.5
    assert report.normalized_la == pytest.approx(0.5 * math.log(100) ** 2)
    assert report.breakdown() == [{"q": 1, "partial": 0.5}, {"q": 2, "partial": 1.5}]
    assert report.summary()["rows"] == 2
    empty = ExperimentReport(kind="thm3_bv", lhs=1.0, main_scale=0.0, scale_formula="Y", log_scale=0.0)
    assert empty.normalized == 0.0


def test_runner_rejects_bad_worker_count():
    with pytest.raises(ConfigError):
        ExperimentRunner(workers=0)


def test_runner_dispatches_to_theorem():
    spec = ExperimentSpec(Kind.THM6_VARIANCE, X1=200, X2=150, Y=100, R=20, P_max=P_MAX)
    report = ExperimentRunner(workers=1).run(spec)
    assert report.lhs == thm6_variance(200, 20, 150, 100, P_max=P_MAX).lhs


def test_runner_lemma_and_golden(tmp_path):
    runner = ExperimentRunner(workers=1, golden=GoldenStore(str(tmp_path)))
    spec = ExperimentSpec(Kind.LEMMA1, M=100, N=50, Q=3, a=1, trials=3, seed=7)
    report = runner.run(spec)
    assert report.lhs == hm_lemma_ratio("lemma1", 100, 50, 3, 1, 3, 7)
    assert report.rows == [(3, report.lhs)]

    first = runner.check_golden(spec, report)
    assert first.recorded and first.passed
    assert (tmp_path / f"{runner.golden_name(spec)}.json").exists()
    again = runner.check_golden(spec, report)
    assert not again.recorded and again.passed

    with pytest.raises(PreconditionError):
        runner.check_golden(ExperimentSpec(Kind.THM3_BV), report)


def test_golden_tolerance(tmp_path):
    store = GoldenStore(str(tmp_path))
    store.check("ratio", 1.0)
    assert store.check("ratio", 1.05).passed
    assert not store.check("ratio", 1.2).passed
    assert store.load("ratio") == 1.0


def test_runner_save(tmp_path):
    report = bv_lhs(100, 100, 3)
    ExperimentRunner(workers=1).save(report, str(tmp_path / "bv"), config={"command": "run"})
    summary = json.loads((tmp_path / "bv.json").read_text())
    assert summary["kind"] == "thm3_bv"
    assert summary["config"] == {"command": "run"}
    assert (tmp_path / "bv.csv").read_text().startswith("q,partial")


def test_scale_spec_places_windows():
    runner = ExperimentRunner(workers=1)
    spec = runner.scale_spec(ExperimentSpec(Kind.THM6_VARIANCE, theta=0.5), 100)
    assert (spec.X1, spec.X2, spec.Y, spec.R) == (10000, 19800, 100, 10)
    assert spec.hypothesis_warnings() == []

    spec = runner.scale_spec(ExperimentSpec(Kind.THM2, theta=0.5), 100)
    assert spec.n == 20211
    assert (spec.Y1, spec.Y2) == (10, 100)

    spec = runner.scale_spec(ExperimentSpec(Kind.THM3_BV, theta=0.5, q_rule="bv", Q=7), 100)
    assert (spec.X1, spec.Q) == (10000, 1)

    spec = runner.scale_spec(ExperimentSpec(Kind.CONJECTURE_GOLDBACH, theta=0.5), 100)
    assert (spec.X1, spec.X2) == (20100, 10000)

    spec = runner.scale_spec(ExperimentSpec(Kind.LEMMA2, M=10), 100)
    assert (spec.M, spec.N) == (100, 100)


# Decay ladders

@pytest.mark.slow
@pytest.mark.parametrize("kind", [Kind.THM6_VARIANCE, Kind.THM4_KAWADA])
def test_decay_ladder_rows(kind):
    runner = ExperimentRunner(workers=1)
    rows = runner.decay_report(ExperimentSpec(kind, theta=0.75, P_max=P_MAX), [100, 200, 400])
    assert [row["Y"] for row in rows] == [100, 200, 400]
    assert rows[0]["ratio"] is None
    assert all(row["normalized"] >= 0 for row in rows)
    assert rows[1]["ratio"] == pytest.approx(rows[1]["normalized"] / rows[0]["normalized"])


@pytest.mark.slow
def test_bv_decay_ladder():
    runner = ExperimentRunner(workers=2)
    rows = runner.decay_report(ExperimentSpec(Kind.THM3_BV, theta=0.75, q_rule="bv"), [1000, 4000])
    assert [row["X1"] for row in rows] == [10000, round(4000 ** (4 / 3))]
    assert all(math.isfinite(row["normalized_LA"]) for row in rows)


@pytest.mark.slow
def test_thm6_variance_halves_over_a_decade():
    rows = ExperimentRunner(workers=2).decay_report(ExperimentSpec(Kind.THM6_VARIANCE, theta=0.9), [10**4, 10**5])
    assert [row["R"] for row in rows] == [100, 316]
    assert rows[1]["normalized"] <= rows[0]["normalized"] / 2
    assert rows[1]["ratio"] <= 0.5


@pytest.mark.slow
def test_kawada_decreases_over_a_decade():
    rows = ExperimentRunner(workers=2).decay_report(ExperimentSpec(Kind.THM4_KAWADA, theta=0.9), [10**3, 10**4])
    assert rows[1]["normalized"] < rows[0]["normalized"]


@pytest.mark.slow
def test_bv_decreases_over_a_decade():
    spec = ExperimentSpec(Kind.THM3_BV, theta=0.85, q_rule="bv")
    rows = ExperimentRunner(workers=2).decay_report(spec, [10**4, 10**5])
    assert [row["Q"] for row in rows] == [4, 11]
    assert rows[1]["normalized"] < rows[0]["normalized"]


# Committed lemma envelopes

@pytest.mark.parametrize("kind", [Kind.LEMMA1, Kind.LEMMA2])
def test_lemma_envelope_against_committed_golden(kind):
    runner = ExperimentRunner(workers=1, golden=GoldenStore(str(GOLDEN_DIR)))
    spec = ExperimentSpec(kind, M=10**5, N=10**3, Q=30, trials=200, seed=42)
    golden = runner.golden.load(runner.golden_name(spec))
    assert golden is not None

    report = runner.run(spec)
    check = runner.check_golden(spec, report)
    assert not check.recorded and check.passed
    assert report.lhs == pytest.approx(golden, rel=0.10)
