import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslab.errors import ArcBudgetExceeded
from qslab.induced import (
    GROWTH_EXPONENT,
    chopping_stats,
    growth_sandwich,
    induced_iterate,
    induced_map,
    lipschitz_witness,
    nu_prefix_closed_form,
    nu_prefix_sums,
    rotation_conjugacy_test,
)
from qslab.partition import IntervalPartition, is_simple, random_partition, sym_diff_distance, transversal_boundary
from qslab.rules import LinearRule, linear_as_general, lucas_binom, majority3, nu, parse_rule, power
from qslab.torus import GOLDEN, TorusPoint, ZERO, parse_angle, sort_points

GOLD = parse_angle(GOLDEN)
SMALL = parse_angle("quad:(3,-1,5,2)")
LED = LinearRule(2, ((0, 1), (1, 1)))
HALF = TorusPoint(0, Fraction(1, 2))
seeds = st.integers(0, 2**32 - 1)


def rand_part(seed, alphabet=2, max_arcs=6, angle=GOLD):
    return random_partition(angle, np.random.default_rng(seed), max_arcs, alphabet)


def rand_blca(seed):
    rng = np.random.default_rng(seed)
    offs = sorted({int(b) for b in rng.integers(-3, 4, size=int(rng.integers(1, 4)))})
    return LinearRule(2, tuple((b, 1) for b in offs))


def test_two_arc_image():
    P = IntervalPartition.make(SMALL, [(ZERO, 1), (HALF, 0)])
    Q = induced_map(LED, P)
    a_half = TorusPoint(1, Fraction(1, 2))
    assert Q == IntervalPartition.make(SMALL, [(ZERO, 1), (TorusPoint(1), 0), (HALF, 1), (a_half, 0)])


def test_identity_and_trivial():
    P = rand_part(3)
    assert induced_map(LinearRule.identity(2), P) == P
    O = IntervalPartition.trivial(GOLD, 1)
    assert induced_map(parse_rule("lin:p=2:1+x^1+x^2"), O) == O
    assert induced_map(LED, O) == IntervalPartition.trivial(GOLD, 0)
    assert induced_iterate(LED, P, 0) == P


def test_sturmian_image_boundary():
    S = IntervalPartition.sturmian(GOLD)
    assert induced_map(LED, S).boundary() == frozenset({ZERO, TorusPoint(2)})
    assert len(induced_iterate(LED, S, 2).starts) == 2 ** nu(3)


def test_count_law_against_polynomial_oracle():
    S = IntervalPartition.sturmian(GOLD)
    Q = S
    for n in range(1, 200):
        Q = induced_map(LED, Q)
        # boundary is the support of (1 + x)^(n+1) placed on the orbit of 0
        expected = {TorusPoint(k) for k in range(n + 2) if lucas_binom(n + 1, k, 2)}
        assert Q.boundary() == expected


def test_chopping_series():
    S = IntervalPartition.sturmian(GOLD)
    series = chopping_stats(LED, S, 512)
    assert series.counts == [2 ** nu(n + 1) for n in range(513)]
    assert series.counts[75] == 8
    assert series.average(4) == Fraction(2 + 2 + 4 + 2, 4)
    rows = list(csv.reader(io.StringIO(series.to_csv())))
    assert rows[0] == ["n", "count", "A(n)", "exponent_estimate"]
    assert len(rows) == 514
    T = chopping_stats(LED, IntervalPartition.trivial(GOLD), 20)
    assert T.counts == [0] * 21


def test_distinct_offsets_count_law():
    # all offsets distinct, so every boundary point is orbit-transversal
    pts = sort_points([ZERO, TorusPoint(0, Fraction(1, 3)), TorusPoint(2, Fraction(1, 2)),
                       TorusPoint(-1, Fraction(5, 7))], GOLD)
    P = IntervalPartition.make(GOLD, [(p, i % 2) for i, p in enumerate(pts)])
    assert len(P.starts) == 4
    assert transversal_boundary(P) == P.boundary()
    series = chopping_stats(LED, P, 100)
    assert series.counts == [2 ** nu(n) * 4 for n in range(101)]


def test_liminf_at_powers_of_two():
    S = IntervalPartition.sturmian(GOLD)
    for m in range(1, 14):
        Q = induced_iterate(LED, S, 2**m, "power")
        assert len(Q.starts) <= 2 * len(S.starts)


def test_image_stays_simple():
    S = IntervalPartition.sturmian(GOLD)
    assert is_simple(induced_map(LED, S))[0]


@settings(max_examples=60, deadline=None)
@given(seeds, seeds)
def test_boundary_sandwich_and_transversality(seed, rseed):
    P = rand_part(seed)
    rule = rand_blca(rseed)
    Q = induced_map(rule, P)
    translates = [frozenset(p.rotate(b) for p in P.starts) for b, _ in rule.terms]
    union = frozenset().union(*translates)
    sym = frozenset()
    for T in translates:
        sym = sym ^ T
    assert sym <= Q.boundary() <= union
    B = len(rule.terms)
    assert B * len(transversal_boundary(P)) <= len(Q.starts) <= B * len(P.starts)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from(["lin:p=2:1+x^1", "lin:p=2:1+x^-1+x^2", "lin:p=3:1+2x^1", "lin:p=3:2+x^-1+x^1"]))
def test_strategies_agree(seed, text):
    rule = parse_rule(text)
    P = rand_part(seed, alphabet=rule.p, max_arcs=4)
    assert induced_iterate(rule, P, 7, "step") == induced_iterate(rule, P, 7, "power")


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_linear_fast_path_matches_general(seed):
    # Z/2 fast path against the generic refine-and-label path
    P = rand_part(seed)
    rule = rand_blca(seed + 1)
    assert induced_map(rule, P) == induced_map(linear_as_general(rule), P)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_lipschitz(seed):
    P, Q = rand_part(seed, max_arcs=3), rand_part(seed + 1, max_arcs=3)
    for rule in (LED, majority3(), LinearRule.identity(2)):
        lhs, rhs = lipschitz_witness(rule, P, Q)
        assert lhs.lo <= rhs.hi
    lhs, rhs = lipschitz_witness(LED, P, P)
    assert lhs.hi == 0 and rhs.hi == 0
    lhs, _ = lipschitz_witness(LinearRule.identity(2), P, Q)
    assert lhs == sym_diff_distance(P, Q, 64)


def test_rotation_conjugacy():
    S = IntervalPartition.sturmian(GOLD)
    seventh = TorusPoint(0, Fraction(1, 7))
    assert rotation_conjugacy_test(S, S.rotate(seventh)) == seventh
    assert rotation_conjugacy_test(S, induced_map(LED, S)) is None
    for v in (1, 3, -2):
        shift = LinearRule(2, ((v, 1),))
        P = rand_part(v + 10)
        Q = induced_map(shift, P)
        assert Q == P.rotate(TorusPoint(v))
        t = rotation_conjugacy_test(P, Q)
        assert t is not None and P.rotate(t) == Q
        if not P.is_trivial and is_simple(P)[0]:
            assert t == TorusPoint(v)


def test_arc_budget():
    S = IntervalPartition.sturmian(GOLD)
    with pytest.raises(ArcBudgetExceeded):
        induced_map(power(LED, 2**12 - 1), S, cap=100)


def test_growth_prefix_sums_oracles():
    S = nu_prefix_sums(5000)
    brute = 0
    for N in range(5001):
        assert S[N] == brute == nu_prefix_closed_form(N)
        brute += 2 ** nu(N)


def test_growth_sandwich_small():
    sw = growth_sandwich(1 << 14)
    assert sw["violations"] == []
    assert 1 / 3 < sw["min_ratio"] and sw["max_ratio"] <= 3
    # A(2^m) = (3/2)^m exactly, so the exponent is exact at powers of two
    assert abs(sw["exponent_estimate"] - GROWTH_EXPONENT) < 1e-12
    assert Fraction(sw["A_last"]) == Fraction(3**14, 2**14)


def test_growth_sandwich_rejects_tight_bounds():
    sw = growth_sandwich(1 << 10, lower=Fraction(9, 10))
    assert sw["violations"]
    assert all(math.isfinite(r) for r in (sw["min_ratio"], sw["max_ratio"]))
