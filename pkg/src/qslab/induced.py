"""The action of a cellular automaton on interval partitions."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .errors import ArcBudgetExceeded
from .partition import IntervalPartition, sweep, sym_diff_distance
from .rules import LinearRule, Rule, power
from .torus import Interval, TorusPoint, ZERO, sort_points

DEFAULT_ARC_CAP = 1 << 22


def _check_alphabet(rule: Rule, P: IntervalPartition):
    if rule.alphabet != P.alphabet:
        raise ValueError(f"rule alphabet {rule.alphabet} != partition alphabet {P.alphabet}")


def _linear_gf2(rule: LinearRule, P: IntervalPartition, cap: int) -> IntervalPartition:
    # Q_1 is the symmetric difference of the translates P_1 + b*alpha, so the
    # boundary is the odd-multiplicity part of the translated boundaries and
    # labels alternate around it.
    angle = P.angle
    if len(P.starts) * len(rule.terms) > cap:
        raise ArcBudgetExceeded(f"{len(P.starts) * len(rule.terms)} candidate boundary points exceed cap {cap}")
    cnt: Counter = Counter()
    for b, _ in rule.terms:
        for s in P.starts:
            cnt[TorusPoint(s.z + b, s.q)] += 1
    pts = [p for p, m in cnt.items() if m & 1]
    if not pts:
        v = sum(P.label_at(TorusPoint(-b)) for b, _ in rule.terms) & 1
        return IntervalPartition.trivial(angle, v, 2)
    pts = sort_points(pts, angle)
    u0 = pts[0]
    first = sum(P.label_at(TorusPoint(u0.z - b, u0.q)) for b, _ in rule.terms) & 1
    labels = tuple((first + i) & 1 for i in range(len(pts)))
    return IntervalPartition(angle, tuple(pts), labels, 2)


def induced_map(rule: Rule, P: IntervalPartition, cap: int = DEFAULT_ARC_CAP) -> IntervalPartition:
    """Phi_T(P): the partition whose trajectories are the rule applied to P's.

    A linear rule gives Q(s) = sum_b phi_b P(s - b*alpha); a general rule
    gives Q(s) = phi(P(s + b*alpha) for b in offsets).
    """
    _check_alphabet(rule, P)
    if P.is_trivial:
        c = P.labels[0]
        if isinstance(rule, LinearRule):
            v = sum(phi for _, phi in rule.terms) * c % rule.p
        else:
            v = rule.lookup([c] * len(rule.offsets))
        return IntervalPartition.trivial(P.angle, v, P.alphabet)
    if isinstance(rule, LinearRule):
        if rule.p == 2:
            return _linear_gf2(rule, P, cap)
        shifted = [P.rotate(TorusPoint(b)) for b, _ in rule.terms]
        coeffs = [c for _, c in rule.terms]
        combine = lambda tp: sum(c * a for c, a in zip(coeffs, tp)) % rule.p
    else:
        shifted = [P.rotate(TorusPoint(-b)) for b in rule.offsets]
        combine = rule.lookup
    total = sum(len(S.starts) for S in shifted)
    if total > cap:
        raise ArcBudgetExceeded(f"{total} candidate boundary points exceed cap {cap}")
    pts, tuples = sweep(shifted)
    return IntervalPartition._canonical(P.angle, pts or [ZERO], [combine(tp) for tp in tuples], P.alphabet)


def induced_iterate(rule: Rule, P: IntervalPartition, n: int, strategy: str = "step",
                    cap: int = DEFAULT_ARC_CAP) -> IntervalPartition:
    """Phi_T^n(P), by n single steps or by one step of the powered rule."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if strategy == "power":
        if not isinstance(rule, LinearRule):
            raise ValueError("the power strategy needs a linear rule")
        return induced_map(power(rule, n), P, cap) if n else P
    if strategy != "step":
        raise ValueError(f"unknown strategy {strategy!r}")
    for _ in range(n):
        P = induced_map(rule, P, cap)
    return P


@dataclass
class ChoppingSeries:
    """Boundary counts #d(Phi^n P) for n = 0..N with Cesaro averages."""

    rule: Rule
    partition: IntervalPartition
    counts: list[int] = field(default_factory=list)

    def average(self, N: int) -> Fraction:
        """A(N) = (1/N) sum_{n<N} counts[n]."""
        if not 1 <= N <= len(self.counts):
            raise ValueError(f"A(N) needs 1 <= N <= {len(self.counts)}")
        return Fraction(sum(self.counts[:N]), N)

    def averages(self) -> list[Optional[Fraction]]:
        out: list[Optional[Fraction]] = [None]
        s = 0
        for N in range(1, len(self.counts)):
            s += self.counts[N - 1]
            out.append(Fraction(s, N))
        return out

    def exponent_estimate(self, N: int) -> Optional[float]:
        """log A(N) / log N."""
        if N < 2:
            return None
        A = self.average(N)
        return math.log(A) / math.log(N) if A > 0 else None

    def loglog_slope(self) -> Optional[float]:
        """Least-squares slope of log counts against log n over n >= 1 with nonzero count."""
        xs, ys = [], []
        for n, c in enumerate(self.counts):
            if n >= 1 and c > 0:
                xs.append(math.log(n))
                ys.append(math.log(c))
        if len(xs) < 2:
            return None
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        sxx = sum((x - mx) ** 2 for x in xs)
        if sxx == 0:
            return None
        return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "count", "A(n)", "exponent_estimate"])
        avgs = self.averages()
        for n, c in enumerate(self.counts):
            A = avgs[n]
            e = self.exponent_estimate(n) if n >= 2 else None
            wr.writerow([n, c, "" if A is None else repr(float(A)), "" if e is None else repr(e)])
        return buf.getvalue()


def chopping_stats(rule: Rule, P: IntervalPartition, N: int, cap: int = DEFAULT_ARC_CAP) -> ChoppingSeries:
    if N < 1:
        raise ValueError("N must be >= 1")
    series = ChoppingSeries(rule, P, [len(P.starts)])
    Q = P
    for _ in range(N):
        Q = induced_map(rule, Q, cap)
        series.counts.append(len(Q.starts))
    return series


def lipschitz_witness(rule: Rule, P: IntervalPartition, Q: IntervalPartition,
                      k: int = 64) -> tuple[Interval, Interval]:
    """(d(Phi P, Phi Q), 2 B A^B d(P, Q)) as certified intervals."""
    B = len(rule.terms) if isinstance(rule, LinearRule) else len(rule.offsets)
    A = rule.alphabet
    lhs = sym_diff_distance(induced_map(rule, P), induced_map(rule, Q), k)
    rhs = sym_diff_distance(P, Q, k).scale(2 * B * A ** B)
    return lhs, rhs


def rotation_conjugacy_test(P: IntervalPartition, Q: IntervalPartition) -> Optional[TorusPoint]:
    """A rotation t with rho_t(P) == Q, or None.

    Any such t carries some start of P onto Q.starts[0], so those
    differences are the only candidates.
    """
    if P.alphabet != Q.alphabet or len(P.starts) != len(Q.starts):
        return None
    if sorted(P.labels) != sorted(Q.labels):
        return None
    if P.is_trivial:
        return ZERO if P.labels == Q.labels else None
    q0 = Q.starts[0]
    for s in P.starts:
        t = q0 - s
        if P.rotate(t) == Q:
            return t
    return None


GROWTH_EXPONENT = math.log2(1.5)


def nu_prefix_sums(n_max: int):
    """S(N) = sum_{n<N} 2**nu(n) for N = 0..n_max, as an int64 array."""
    n = np.arange(n_max, dtype=np.uint64)
    terms = np.left_shift(np.int64(1), np.bitwise_count(n).astype(np.int64))
    return np.concatenate(([0], np.cumsum(terms, dtype=np.int64)))


def nu_prefix_closed_form(N: int) -> int:
    """S(N) from the binary digits of N: each set bit at position j with m
    higher set bits contributes 2**m * 3**j."""
    total, higher = 0, 0
    for j in range(N.bit_length() - 1, -1, -1):
        if (N >> j) & 1:
            total += (1 << higher) * 3 ** j
            higher += 1
    return total


def growth_sandwich(n_max: int, lower=Fraction(1, 3), upper=Fraction(3)) -> dict:
    """Check lower * N**a < S(N)/N <= upper * N**a for 1 <= N <= n_max, a = log2(3/2).

    Ratios are formed in floating point with a relative error far below
    1e-9; any ratio within 1e-9 of a bound is re-decided with 60-digit
    arithmetic.
    """
    S = nu_prefix_sums(n_max)
    N = np.arange(1, n_max + 1, dtype=np.float64)
    ratio = S[1:].astype(np.float64) / N ** (1.0 + GROWTH_EXPONENT)
    lo, hi = float(lower), float(upper)
    tol = 1e-9
    bad_lower = np.flatnonzero(ratio <= lo + tol)
    bad_upper = np.flatnonzero(ratio > hi - tol)
    fails = []
    with mpmath.workdps(60):
        a = mpmath.log(mpmath.mpf(3) / 2, 2)
        for i in np.union1d(bad_lower, bad_upper).tolist():
            Nn = i + 1
            r = mpmath.mpf(int(S[Nn])) / mpmath.power(Nn, 1 + a)
            if not (mpmath.mpf(lower.numerator) / lower.denominator < r
                    <= mpmath.mpf(upper.numerator) / upper.denominator):
                fails.append(Nn)
    A_last = Fraction(int(S[n_max]), n_max)
    exponent = math.log(A_last) / math.log(n_max) if n_max > 1 else float("nan")
    return {
        "n_max": n_max,
        "min_ratio": float(ratio.min()),
        "argmin_N": int(ratio.argmin()) + 1,
        "max_ratio": float(ratio.max()),
        "argmax_N": int(ratio.argmax()) + 1,
        "rechecked": int(np.union1d(bad_lower, bad_upper).size),
        "violations": fails,
        "A_last": str(A_last),
        "exponent_estimate": exponent,
        "exponent_error": abs(exponent - GROWTH_EXPONENT),
    }
