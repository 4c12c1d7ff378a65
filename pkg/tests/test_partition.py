from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslab.partition import (
    IntervalPartition,
    is_primitive,
    is_simple,
    joint_measure,
    parse_partition,
    random_partition,
    refine,
    sym_diff_distance,
    sym_diff_symbolic,
    transversal_boundary,
)
from qslab.torus import GOLDEN, TorusPoint, ZERO, eval_point, parse_angle

GOLD = parse_angle(GOLDEN)
SMALL = parse_angle("quad:(3,-1,5,2)")
HALF = TorusPoint(0, Fraction(1, 2))
QUARTER = TorusPoint(0, Fraction(1, 4))
A = float(eval_point(TorusPoint(1), GOLD, 60).mid)


def grid_labels(P, n=10**6):
    """Independent oracle: labels on a midpoint grid from float boundary values."""
    x = (np.arange(n) + 0.5) / n
    if P.is_trivial:
        return np.full(n, P.labels[0])
    b = np.array([float(eval_point(s, P.angle, 60).mid) for s in P.starts])
    idx = np.searchsorted(b, x, side="right") - 1
    return np.asarray(P.labels)[idx]  # index -1 is the wrapping arc


def grid_distance(P, Q, n=10**6):
    return 2 * np.count_nonzero(grid_labels(P, n) != grid_labels(Q, n)) / n


seeds = st.integers(0, 2**32 - 1)


def rand_part(seed, alphabet=2, max_arcs=6):
    return random_partition(GOLD, np.random.default_rng(seed), max_arcs, alphabet)


def test_canonical_merge():
    P = IntervalPartition.make(GOLD, [(ZERO, 1), (QUARTER, 1), (HALF, 0)])
    assert P.starts == (ZERO, HALF) and P.labels == (1, 0)
    T = IntervalPartition.make(GOLD, [(ZERO, 0), (HALF, 0)])
    assert T.is_trivial and T.boundary() == frozenset()


def test_measures_sum_to_one():
    for seed in range(20):
        P = rand_part(seed, alphabet=3)
        total = sum(P.measures().values(), start=type(P.measures()[0])(0, Fraction(0)))
        assert total.z == 0 and total.r == 1


def test_text_roundtrip():
    for seed in range(20):
        P = rand_part(seed, alphabet=3)
        assert parse_partition(P.text()) == P
    T = IntervalPartition.trivial(GOLD, 1)
    assert parse_partition(T.text()) == T


def test_label_at_half_open():
    P = IntervalPartition.sturmian(GOLD)
    assert P.label_at(ZERO) == 1
    assert P.label_at(TorusPoint(1)) == 0
    assert P.label_at(TorusPoint(0, Fraction(1, 5))) == 1


def test_distance_examples():
    P = IntervalPartition.make(GOLD, [(ZERO, 1), (HALF, 0)])
    assert sym_diff_symbolic(P, P).z == 0 and sym_diff_symbolic(P, P).r == 0
    Q = P.rotate(QUARTER)
    assert sym_diff_distance(Q, P, 64).contains(1)
    assert abs(grid_distance(P, Q) - 1) <= 1e-4
    S = IntervalPartition.sturmian(GOLD)
    O = IntervalPartition.trivial(GOLD, 0)
    d = sym_diff_symbolic(S, O)
    assert (d.z, d.r) == (2, 0)  # exactly 2a
    assert abs(grid_distance(S, O) - 2 * A) <= 1e-4


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_distance_matches_quadrature(seed):
    P, Q = rand_part(seed), rand_part(seed + 1)
    d = sym_diff_distance(P, Q, 64)
    assert abs(float(d.mid) - grid_distance(P, Q)) <= 1e-4


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_metric_axioms(seed):
    P, Q, R = rand_part(seed), rand_part(seed + 7), rand_part(seed + 13)
    assert sym_diff_symbolic(P, Q) == sym_diff_symbolic(Q, P)
    pq, qr, pr = (sym_diff_distance(*x, 80) for x in ((P, Q), (Q, R), (P, R)))
    slack = Fraction(1, 2**70)
    assert pr.lo <= pq.hi + qr.hi + slack
    assert (sym_diff_symbolic(P, Q).is_zero()) == (P == Q)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_distance_is_twice_off_diagonal_mass(seed):
    P, Q = rand_part(seed, 3), rand_part(seed + 3, 3)
    off = sum((joint_measure(P, Q, a, b) for a in range(3) for b in range(3) if a != b),
              start=sym_diff_symbolic(P, P))
    assert off * 2 == sym_diff_symbolic(P, Q)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(-20, 20), st.fractions(0, 1, max_denominator=12))
def test_rotation_is_isometry(seed, z, q):
    P, Q = rand_part(seed), rand_part(seed + 5)
    t = TorusPoint(z, q)
    assert sym_diff_symbolic(P.rotate(t), Q.rotate(t)) == sym_diff_symbolic(P, Q)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 4))
def test_refine_boundary_containment(seed, n):
    Ps = [rand_part(seed + i, 3) for i in range(n)]
    R, tuples = refine(Ps)
    assert R.boundary() <= frozenset().union(*(P.boundary() for P in Ps))
    assert len(R.starts) <= sum(len(P.starts) for P in Ps)
    for s, tp in zip(R.starts, tuples):
        assert tp == tuple(P.label_at(s) for P in Ps)


def test_refine_examples():
    P = IntervalPartition.sturmian(SMALL)
    R, tuples = refine([P])
    assert R.starts == P.starts and tuples == [(c,) for c in P.labels]
    a = TorusPoint(1)
    R, _ = refine([P, P.rotate(-a)])
    assert R.boundary() == frozenset({ZERO, a, -a})
    R, _ = refine([P, P.rotate(a)])
    assert R.boundary() == frozenset({ZERO, a, TorusPoint(2)})
    assert len(R) == 3


def test_refine_counting_bound():
    P = IntervalPartition.make(GOLD, [(ZERO, 1), (HALF, 0), (TorusPoint(3, Fraction(1, 3)), 1)])
    Ps = [P.rotate(TorusPoint(j)) for j in range(6)]
    R, _ = refine(Ps)
    assert len(R.starts) <= 6 * 3


def test_simplicity():
    assert is_simple(IntervalPartition.sturmian(GOLD)) == (True, None)
    q = [TorusPoint(0, Fraction(i, 4)) for i in range(4)]
    P = IntervalPartition.make(GOLD, zip(q, [0, 1, 0, 1]))
    assert is_simple(P) == (False, HALF)
    with pytest.raises(ValueError):
        is_simple(IntervalPartition.trivial(GOLD))


def test_primitivity_and_transversality():
    S = IntervalPartition.sturmian(GOLD)
    third = IntervalPartition.make(GOLD, [(ZERO, 1), (TorusPoint(0, Fraction(1, 3)), 0)])
    orbit = IntervalPartition.make(GOLD, [(TorusPoint(1), 1), (TorusPoint(2), 0)])
    assert is_primitive(S) and is_primitive(orbit)
    assert not is_primitive(third)
    assert transversal_boundary(S) == frozenset()
    assert transversal_boundary(third) == third.boundary()
    assert transversal_boundary(IntervalPartition.trivial(GOLD)) == frozenset()


def test_relabel_merges():
    P = IntervalPartition.make(GOLD, [(ZERO, 0), (HALF, 1), (TorusPoint(1), 2)], 3)
    R = P.relabel([0, 1, 1], 2)
    assert len(R) == 2
