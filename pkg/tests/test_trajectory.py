from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslab.constructions import build_tower, paint
from qslab.errors import EmptyOverlap
from qslab.partition import IntervalPartition, random_partition
from qslab.rules import LinearRule, apply_window, majority3, parse_rule
from qslab.torus import GOLDEN, TorusPoint, ZERO, compare, make_special_angle, parse_angle
from qslab.trajectory import (
    conjugacy_check,
    labels_at_points,
    metric_identity_estimate,
    trajectory,
    verify_tiling,
)
from qslab.window import SymbolWindow, besicovitch_estimate, concat

mpmath.mp.dps = 60
GOLD = parse_angle(GOLDEN)
LED = LinearRule(2, ((0, 1), (1, 1)))
T5 = TorusPoint(0, Fraction(1, 5))
seeds = st.integers(0, 2**32 - 1)
GOLD_MP = (mpmath.sqrt(5) - 1) / 2


def mp_labels(P, t, lo, hi, alpha=GOLD_MP):
    """Oracle: label lookup with 60-digit floats."""
    b = [p.z * alpha + mpmath.mpf(p.q.numerator) / p.q.denominator for p in P.starts]
    b = [x - mpmath.floor(x) for x in b]
    out = []
    for ell in range(lo, hi):
        x = (t.z + ell) * alpha + mpmath.mpf(t.q.numerator) / t.q.denominator
        x -= mpmath.floor(x)
        idx = max((i for i, v in enumerate(b) if v <= x), default=len(b) - 1)
        out.append(P.labels[idx])
    return out


def rand_part(seed, alphabet=2, max_arcs=6):
    return random_partition(GOLD, np.random.default_rng(seed), max_arcs, alphabet)


# -- windows


def test_window_basics():
    w = SymbolWindow(-3, [0, 0, 1, 1, 1, 0], 2)
    assert w[-3] == 0 and w[-1] == 1 and w.end == 3
    assert SymbolWindow.from_rle(w.to_rle()) == w
    assert w.to_rle() == "origin=-3;A=2;2x0,3x1,1x0"
    assert concat([w.slice(-3, 0), w.slice(0, 3)]) == w
    with pytest.raises(IndexError):
        w[3]


@settings(max_examples=100)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=50), st.integers(-100, 100))
def test_rle_roundtrip(syms, origin):
    w = SymbolWindow(origin, syms, 3)
    assert SymbolWindow.from_rle(w.to_rle()) == w


def test_besicovitch_examples():
    w = SymbolWindow(0, [0, 1, 1, 0])
    assert besicovitch_estimate(w, w) == 0
    assert besicovitch_estimate(w, SymbolWindow(0, [1, 0, 0, 1])) == 1
    with pytest.raises(EmptyOverlap):
        besicovitch_estimate(w, SymbolWindow(10, [1]))


@settings(max_examples=100)
@given(st.data())
def test_besicovitch_metric(data):
    n = data.draw(st.integers(1, 40))
    ws = [SymbolWindow(0, data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))) for _ in range(3)]
    d = besicovitch_estimate
    assert d(ws[0], ws[1]) == d(ws[1], ws[0])
    assert d(ws[0], ws[2]) <= d(ws[0], ws[1]) + d(ws[1], ws[2])


# -- trajectories


def test_trivial_trajectory():
    w = trajectory(IntervalPartition.trivial(GOLD, 1), T5, 0, 10)
    assert w.tolist() == [1] * 10


def test_sturmian_trajectory_oracle():
    S = IntervalPartition.sturmian(GOLD)
    w = trajectory(S, T5, 0, 8)
    a = GOLD_MP
    assert w.tolist() == [int(mpmath.frac(mpmath.mpf(1) / 5 + ell * a) < a) for ell in range(8)]


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(-10**6, 10**6))
def test_trajectory_matches_oracle(seed, lo):
    P = rand_part(seed, 3)
    t = TorusPoint(int(seed % 17) - 8, Fraction(seed % 11, 11))
    assert trajectory(P, t, lo, lo + 200).tolist() == mp_labels(P, t, lo, lo + 200)


def test_trajectory_hits_boundaries_exactly():
    # t on the boundary orbit: every cell sits exactly on an arc start
    P = IntervalPartition.make(GOLD, [(TorusPoint(k), k % 2) for k in range(-5, 5)])
    w = trajectory(P, ZERO, -5, 5)
    assert w.tolist() == [P.label_at(TorusPoint(k)) for k in range(-5, 5)]


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(-1000, 1000))
def test_shift_equivariance(seed, m):
    P = rand_part(seed)
    t = TorusPoint(0, Fraction(seed % 7, 7))
    a = trajectory(P, t.rotate(m), 0, 500)
    b = trajectory(P, t, m, m + 500)
    assert a.tolist() == b.tolist()


def test_labels_at_points():
    P = rand_part(5, 3)
    pts = [TorusPoint(k, Fraction(k % 3, 3)) for k in range(50)]
    got = labels_at_points(P, pts, shift=7)
    assert got.tolist() == [P.label_at(p.rotate(7)) for p in pts]


# -- oracles


def test_conjugacy_examples():
    S = IntervalPartition.sturmian(GOLD)
    assert conjugacy_check(LinearRule.identity(2), S, T5, 5, (0, 100))
    assert conjugacy_check(LED, S, T5, 8, (0, 4096))
    P = rand_part(11, max_arcs=3)
    assert conjugacy_check(majority3(), P, T5, 3, (0, 4096))


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(["lin:p=2:1+x^1", "lin:p=2:1+x^1+x^2", "lin:p=3:1+2x^1",
                               "gen:A=2:B=[-1,0,1]:table=e8"]), st.integers(0, 16))
def test_conjugacy_random(seed, text, n):
    rule = parse_rule(text)
    P = rand_part(seed, rule.alphabet, 6)
    t = TorusPoint(seed % 5, Fraction(seed % 13, 13))
    assert conjugacy_check(rule, P, t, n, (-2048, 2048))


def test_conjugacy_is_not_vacuous():
    # the rule really changes the trajectory, so agreement above is informative
    S = IntervalPartition.sturmian(GOLD)
    w = trajectory(S, T5, 0, 200)
    assert apply_window(LED, w) != trajectory(S, T5, 1, 200)


def test_metric_identity_examples():
    S = IntervalPartition.sturmian(GOLD)
    d, twice = metric_identity_estimate(S, S, T5, (0, 1000))
    assert d.hi == 0 and twice == 0
    O = IntervalPartition.trivial(GOLD, 0)
    d, twice = metric_identity_estimate(S, O, T5, (0, 10**6))
    assert abs(float(d.mid) - float(twice)) <= 1e-2
    assert abs(float(d.mid) - 2 * float(GOLD_MP)) < 1e-15


@pytest.mark.parametrize("W,tol", [(10**4, 0.05), (10**5, 0.02), (10**6, 0.01)])
def test_distance_halving_schedule(W, tol):
    rng = np.random.default_rng(W)
    for _ in range(5):
        P = random_partition(GOLD, rng, 8, 2)
        Q = random_partition(GOLD, rng, 8, 2)
        d, twice = metric_identity_estimate(P, Q, T5, (0, W))
        assert abs(float(d.mid) - float(twice)) <= tol


# -- tiling


def test_tiling_all_spacer():
    w = SymbolWindow(0, [0] * 100)
    rep = verify_tiling(w, SymbolWindow(-2, [1, 0, 1, 1]), 0, 1)
    assert rep.skeleton == [] and rep.coverage == 0 and rep.violations == 0
    assert rep.passes()


def test_tiling_concatenation():
    tile = SymbolWindow(-3, [1, 1, 0, 1, 1, 1])
    pad = [0] * 30
    syms = pad + tile.tolist() + [0] * 5 + tile.tolist() + pad
    rep = verify_tiling(SymbolWindow(0, syms), tile, 0)
    assert len(rep.skeleton) == 2 and rep.violations == 0
    assert rep.skeleton == [30 + 3, 30 + 6 + 5 + 3]


def _painted(M=20, N=10, W=20000, seed=0):
    angle = make_special_angle("high_partial_quotient", M=M)
    tower = build_tower(angle, N, Fraction(1, 10))
    rng = np.random.default_rng(seed)
    word = SymbolWindow(-N, rng.integers(0, 2, size=2 * N), 2)
    P = paint(tower, word, 0)
    return tower, word, P, trajectory(P, ZERO, 0, W)


def test_painted_tiling_and_consistency():
    tower, word, P, tr = _painted()
    rep = verify_tiling(tr, word, 0, tower.achieved_epsilon)
    assert rep.violations == 0
    assert rep.passes()
    lam = float(tower.delta_interval().mid)
    assert abs(rep.density - lam) <= len(tr) ** -0.5 + 0.01
    # every skeleton point carries the word on j + [-N, N)
    for j in rep.skeleton:
        assert tr.slice(j - tower.N, j + tower.N).tolist() == word.tolist()
    # skeleton is exactly the visits of the base arc J = [0, delta)
    in_J = [ell for ell in range(rep.interior[0], rep.interior[1]) if _in_base(tower, ell)]
    sk = [j for j in rep.skeleton if rep.interior[0] <= j < rep.interior[1]]
    assert sk == in_J


def _in_base(tower, ell):
    # J = [0, frac(s * alpha))
    return compare(TorusPoint(ell), TorusPoint(tower.s), tower.angle) < 0


@pytest.mark.parametrize("delta", [0.0005, 0.002])
def test_tiling_stability(delta):
    tower, word, P, tr = _painted(W=50000, seed=3)
    eps = float(tower.achieved_epsilon)
    base = verify_tiling(tr, word, 0, tower.achieved_epsilon)
    rng = np.random.default_rng(7)
    syms = tr.symbols.copy()
    hit = rng.choice(syms.size, size=int(delta * syms.size), replace=False)
    syms[hit] ^= 1
    rep = verify_tiling(SymbolWindow(tr.origin, syms), word, 0)
    two_n = 2 * tower.N
    assert rep.coverage >= 1 - eps - two_n * delta - 0.01
    lo, hi = rep.interior
    n_inner = hi - lo
    common = set(base.skeleton) & set(rep.skeleton)
    overlap_density = sum(lo <= j < hi for j in common) / n_inner
    assert overlap_density >= base.density - delta - 0.01
