"""Labelled partitions of the circle into finitely many half-open arcs."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .torus import (
    Angle,
    Interval,
    SymbolicReal,
    TorusPoint,
    ZERO,
    compare,
    parse_angle,
    parse_point,
    point_value,
    sort_points,
)

ONE = SymbolicReal(0, Fraction(1))


@dataclass(frozen=True)
class IntervalPartition:
    """Arcs [starts[i], starts[i+1]) labelled labels[i], cyclically.

    ``starts`` is sorted by position in [0, 1), so the last arc wraps past 0.
    The trivial partition has no starts and a single label.  Instances built
    through ``make`` are canonical: neighbouring arcs carry different labels.
    """

    angle: Angle
    starts: tuple[TorusPoint, ...]
    labels: tuple[int, ...]
    alphabet: int = 2

    def __post_init__(self):
        if len(self.labels) != max(len(self.starts), 1):
            raise ValueError("one label per arc required")
        if any(not 0 <= c < self.alphabet for c in self.labels):
            raise ValueError(f"labels must lie in 0..{self.alphabet - 1}")

    # -- construction
    @classmethod
    def make(cls, angle: Angle, arcs: Iterable[tuple[TorusPoint, int]], alphabet: int = 2,
             presorted: bool = False) -> "IntervalPartition":
        """Canonical partition from (start, label) pairs given in any order."""
        arcs = list(arcs)
        if not arcs:
            raise ValueError("at least one arc required")
        lab = {}
        for p, c in arcs:
            if p in lab:
                raise ValueError(f"duplicate arc start {p}")
            lab[p] = c
        pts = list(lab) if presorted else sort_points(lab, angle)
        return cls._canonical(angle, pts, [lab[p] for p in pts], alphabet)

    @classmethod
    def _canonical(cls, angle, pts, labels, alphabet):
        n = len(pts)
        keep = [i for i in range(n) if labels[i] != labels[i - 1]]
        if not keep:
            return cls(angle, (), (labels[0],), alphabet)
        return cls(angle, tuple(pts[i] for i in keep), tuple(labels[i] for i in keep), alphabet)

    @classmethod
    def trivial(cls, angle: Angle, label: int = 0, alphabet: int = 2) -> "IntervalPartition":
        return cls(angle, (), (label,), alphabet)

    @classmethod
    def sturmian(cls, angle: Angle) -> "IntervalPartition":
        """{[0, alpha) -> 1, [alpha, 1) -> 0}."""
        return cls.make(angle, [(ZERO, 1), (TorusPoint(1), 0)], 2)

    # -- queries
    @property
    def is_trivial(self) -> bool:
        return not self.starts

    def boundary(self) -> frozenset[TorusPoint]:
        return frozenset(self.starts)

    def __len__(self):
        return len(self.labels)

    def arcs(self) -> list[tuple[TorusPoint, int]]:
        return list(zip(self.starts, self.labels))

    def locate(self, t: TorusPoint) -> int:
        """Index of the arc containing t (half-open: a start belongs to its arc)."""
        if not self.starts:
            return 0
        lo, hi = 0, len(self.starts)
        while lo < hi:
            mid = (lo + hi) // 2
            if compare(self.starts[mid], t, self.angle) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1 if lo > 0 else len(self.starts) - 1

    def label_at(self, t: TorusPoint) -> int:
        return self.labels[self.locate(t)]

    def arc_lengths(self) -> list[SymbolicReal]:
        """Exact symbolic length of every arc, in order."""
        if not self.starts:
            return [ONE]
        vals = [point_value(p, self.angle) for p in self.starts]
        out = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
        out.append(ONE + vals[0] - vals[-1])
        return out

    def measures(self) -> dict[int, SymbolicReal]:
        """Exact symbolic measure of each cell."""
        acc: dict[int, SymbolicReal] = {c: SymbolicReal(0, Fraction(0)) for c in range(self.alphabet)}
        for c, ln in zip(self.labels, self.arc_lengths()):
            acc[c] = acc[c] + ln
        return acc

    def measure(self, label: int, k: int = 64) -> Interval:
        return self.measures()[label].evaluate(self.angle, k)

    # -- transformations
    def rotate(self, t: TorusPoint) -> "IntervalPartition":
        """rho_t: every cell translated by +t."""
        if not self.starts:
            return self
        moved = [p + t for p in self.starts]
        # translation preserves cyclic order; only the wrap point moves
        k = _min_index(moved, self.angle)
        pts = moved[k:] + moved[:k]
        labs = self.labels[k:] + self.labels[:k]
        return IntervalPartition(self.angle, tuple(pts), tuple(labs), self.alphabet)

    def relabel(self, mapping: Sequence[int] | dict, alphabet: Optional[int] = None) -> "IntervalPartition":
        a = self.alphabet if alphabet is None else alphabet
        pts = list(self.starts) or [ZERO]
        return IntervalPartition._canonical(self.angle, pts, [mapping[c] for c in self.labels], a)

    # -- text
    def text(self) -> str:
        a = self.angle.text()
        if not self.starts:
            return f"{a} | const:{self.labels[0]} | A={self.alphabet}"
        body = ", ".join(f"{p}:{c}" for p, c in zip(self.starts, self.labels))
        return f"{a} | {body} | A={self.alphabet}"

    def __str__(self):
        return self.text()

    def to_json(self) -> dict:
        return {
            "angle": self.angle.text(),
            "alphabet": self.alphabet,
            "arcs": [[str(p), c] for p, c in zip(self.starts, self.labels)],
            "constant": None if self.starts else self.labels[0],
        }


def _min_index(points: Sequence[TorusPoint], angle: Angle) -> int:
    best = 0
    for i in range(1, len(points)):
        if compare(points[i], points[best], angle) < 0:
            best = i
    return best


def parse_partition(text: str, angle: Optional[Angle] = None) -> IntervalPartition:
    """Parse ``angle | b0:l0, b1:l1 [| A=n]`` (``const:c`` for the trivial partition)."""
    parts = [s.strip() for s in text.split("|")]
    if len(parts) < 2:
        raise ValueError(f"cannot parse partition {text!r}")
    ang = parse_angle(parts[0]) if angle is None else angle
    alphabet = None
    if len(parts) >= 3:
        if not parts[2].startswith("A="):
            raise ValueError(f"bad alphabet field {parts[2]!r}")
        alphabet = int(parts[2][2:])
    body = parts[1]
    if body.startswith("const:"):
        c = int(body[6:])
        return IntervalPartition.trivial(ang, c, alphabet or max(2, c + 1))
    arcs = []
    for item in body.split(","):
        pt, _, lab = item.strip().rpartition(":")
        arcs.append((parse_point(pt), int(lab)))
    if alphabet is None:
        alphabet = max(2, max(c for _, c in arcs) + 1)
    return IntervalPartition.make(ang, arcs, alphabet)


def _check_same_angle(parts: Sequence[IntervalPartition]) -> Angle:
    angle = parts[0].angle
    for P in parts[1:]:
        if P.angle is not angle and P.angle != angle:
            raise ValueError("partitions use different angles")
    return angle


def sweep(parts: Sequence[IntervalPartition]) -> tuple[list[TorusPoint], list[tuple[int, ...]]]:
    """Common refinement as raw sorted points and per-arc label tuples.

    Labels are read combinatorially: each input contributes the label of its
    latest start at or before the current point, or its wrapping arc's label.
    Consecutive arcs may carry equal tuples (no merging).
    """
    _check_same_angle(parts)
    angle = parts[0].angle
    events: dict[TorusPoint, list[tuple[int, int]]] = defaultdict(list)
    for i, P in enumerate(parts):
        for p, c in zip(P.starts, P.labels):
            events[p].append((i, c))
    current = [P.labels[-1] for P in parts]
    if not events:
        return [], [tuple(current)]
    pts = sort_points(events, angle)
    tuples = []
    for p in pts:
        for i, c in events[p]:
            current[i] = c
        tuples.append(tuple(current))
    return pts, tuples


def refine(parts: Sequence[IntervalPartition]) -> tuple[IntervalPartition, list[tuple[int, ...]]]:
    """Join of the partitions.

    Returns the canonical refinement, labelled by the mixed-radix code of the
    label tuple (first partition most significant), together with the decoded
    tuple for each of its arcs.
    """
    pts, tuples = sweep(parts)
    radices = [P.alphabet for P in parts]
    size = math.prod(radices)

    def encode(tp):
        v = 0
        for c, r in zip(tp, radices):
            v = v * r + c
        return v

    codes = [encode(tp) for tp in tuples]
    R = IntervalPartition._canonical(parts[0].angle, pts or [ZERO], codes, size)
    by_code = dict(zip(codes, tuples))
    return R, [by_code[c] for c in R.labels]


def sym_diff_symbolic(P: IntervalPartition, Q: IntervalPartition) -> SymbolicReal:
    """Exact d_Delta(P, Q) = sum_a lambda(P_a sym-diff Q_a) as z*alpha + r."""
    if P.alphabet != Q.alphabet:
        raise ValueError("partitions have different alphabets")
    pts, tuples = sweep([P, Q])
    if not pts:
        return ONE * 2 if tuples[0][0] != tuples[0][1] else SymbolicReal(0, Fraction(0))
    angle = P.angle
    vals = [point_value(p, angle) for p in pts]
    total = SymbolicReal(0, Fraction(0))
    n = len(pts)
    for i in range(n):
        a, b = tuples[i]
        if a != b:
            end = vals[i + 1] if i + 1 < n else ONE + vals[0]
            total = total + (end - vals[i])
    return total * 2


def sym_diff_distance(P: IntervalPartition, Q: IntervalPartition, k: int = 64) -> Interval:
    """Certified interval of width <= 2**-k containing d_Delta(P, Q)."""
    iv = sym_diff_symbolic(P, Q).evaluate(P.angle, k)
    return Interval(max(iv.lo, Fraction(0)), min(iv.hi, Fraction(2)))


def is_simple(P: IntervalPartition) -> tuple[bool, Optional[TorusPoint]]:
    """Whether no nonzero rotation fixes P; returns a witness symmetry otherwise.

    A symmetry permutes the boundary, so it carries starts[0] onto some
    other start; those finitely many translations are checked exactly.
    """
    if P.is_trivial:
        raise ValueError("simplicity is undefined for the trivial partition")
    b0 = P.starts[0]
    for b in P.starts[1:]:
        t = b - b0
        if P.rotate(t) == P:
            return False, t
    return True, None


def is_primitive(P: IntervalPartition) -> bool:
    """No boundary-to-boundary translation lies in Z*alpha + (Q minus 0).

    Such a translation exists iff two boundary points have different
    rational offsets, so this reduces to comparing offsets.
    """
    return len({p.q for p in P.starts}) <= 1


def transversal_boundary(P: IntervalPartition) -> frozenset[TorusPoint]:
    """Boundary points whose rotation orbit meets the boundary only once."""
    groups: dict[Fraction, list[TorusPoint]] = defaultdict(list)
    for p in P.starts:
        groups[p.q].append(p)
    return frozenset(g[0] for g in groups.values() if len(g) == 1)


def random_partition(angle: Angle, rng, max_arcs: int = 6, alphabet: int = 2,
                     max_z: int = 8, denominators: Sequence[int] = (2, 3, 5, 7)) -> IntervalPartition:
    """A random canonical partition with boundary points in Z*alpha + Q."""
    n = int(rng.integers(1, max_arcs + 1))
    pts: set[TorusPoint] = set()
    while len(pts) < n:
        d = int(rng.choice(denominators))
        pts.add(TorusPoint(int(rng.integers(-max_z, max_z + 1)), Fraction(int(rng.integers(0, d)), d)))
    arcs = [(p, int(rng.integers(0, alphabet))) for p in pts]
    return IntervalPartition.make(angle, arcs, alphabet)


def joint_measure(P: IntervalPartition, Q: IntervalPartition, a: int, b: int) -> SymbolicReal:
    """Exact lambda(P_a intersect Q_b)."""
    pts, tuples = sweep([P, Q])
    if not pts:
        return ONE if tuples[0] == (a, b) else SymbolicReal(0, Fraction(0))
    angle = P.angle
    vals = [point_value(p, angle) for p in pts]
    total = SymbolicReal(0, Fraction(0))
    n = len(pts)
    for i, tp in enumerate(tuples):
        if tp == (a, b):
            end = vals[i + 1] if i + 1 < n else ONE + vals[0]
            total = total + (end - vals[i])
    return total
