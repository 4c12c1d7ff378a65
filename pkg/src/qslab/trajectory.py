"""Trajectories of partitions under the rotation and the estimators built on them."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .induced import induced_iterate
from .partition import IntervalPartition, sym_diff_distance
from .rules import LinearRule, Rule, apply_window_n
from .torus import KEY_BITS, Interval, TorusPoint
from .window import SymbolWindow, besicovitch_estimate

# Guard band, in units of 2**-64, added to every fixed-point error bound.
_SLACK = 16


def _fixed_point_alpha(P: IntervalPartition) -> np.uint64:
    L = P.angle.enclose(KEY_BITS)
    return np.uint64((L + 1) & ((1 << 64) - 1))


def _fixed_point(p: TorusPoint, P: IntervalPartition) -> int:
    lo, _ = P.angle.frac_key(p)
    return lo & ((1 << 64) - 1)


def _boundary_keys(P: IntervalPartition) -> tuple[np.ndarray, int]:
    keys = [P.angle.frac_key(s) for s in P.starts]
    lo = np.array([k[0] & ((1 << 64) - 1) for k in keys], dtype=np.uint64)
    width = max(k[1] - k[0] for k in keys)
    return lo, width


def locate_fixed(P: IntervalPartition, x: np.ndarray, err: np.ndarray, exact) -> np.ndarray:
    """Labels at 64-bit fixed-point positions ``x`` known to within ``err`` ulps.

    Cells whose uncertainty reaches a boundary are passed by index to
    ``exact``, which must return the corresponding TorusPoint for exact
    location.
    """
    labels = np.asarray(P.labels, dtype=np.uint8)
    if P.is_trivial:
        return np.full(x.shape, labels[0], dtype=np.uint8)
    B, width = _boundary_keys(P)
    B = np.maximum.accumulate(B)  # keys of nearly equal starts may cross
    n = B.size
    idx = np.searchsorted(B, x, side="right").astype(np.int64) - 1
    idx[idx < 0] = n - 1
    nxt = (idx + 1) % n
    below = x - B[idx]           # wrapping uint64 distances
    above = B[nxt] - x
    thresh = err + np.uint64(width + _SLACK)
    risky = np.flatnonzero((below <= thresh) | (above <= thresh))
    out = labels[idx]
    for i in risky.tolist():
        out[i] = P.label_at(exact(i))
    return out


def trajectory(P: IntervalPartition, t: TorusPoint, lo: int, hi: int) -> SymbolWindow:
    """Cells lo..hi-1 of the trajectory: symbol l is the label at frac(t + l*alpha)."""
    if hi <= lo:
        raise ValueError("empty window")
    if P.is_trivial:
        return SymbolWindow(lo, np.full(hi - lo, P.labels[0], dtype=np.uint8), P.alphabet)
    ell = np.arange(lo, hi, dtype=np.int64)
    A = _fixed_point_alpha(P)
    T = np.uint64(_fixed_point(t, P))
    with np.errstate(over="ignore"):
        x = T + ell.astype(np.uint64) * A
    err = np.abs(ell).astype(np.uint64) + np.uint64(4)
    sym = locate_fixed(P, x, err, lambda i: TorusPoint(t.z + lo + i, t.q))
    return SymbolWindow(lo, sym, P.alphabet)


def labels_at_points(P: IntervalPartition, points: Sequence[TorusPoint], shift: int = 0) -> np.ndarray:
    """Labels at frac(p + shift*alpha) for many base points p."""
    A = int(_fixed_point_alpha(P))
    x = np.array([(_fixed_point(p, P) + shift * A) & ((1 << 64) - 1) for p in points], dtype=np.uint64)
    err = np.full(len(points), abs(shift) + 4, dtype=np.uint64)
    return locate_fixed(P, x, err, lambda i: TorusPoint(points[i].z + shift, points[i].q))


def conjugacy_check(rule: Rule, P: IntervalPartition, t: TorusPoint, n: int,
                    window: tuple[int, int]) -> bool:
    """The rule applied n times to a trajectory equals the trajectory of Phi_T^n(P)."""
    w = trajectory(P, t, *window)
    lhs = apply_window_n(rule, w, n)
    strategy = "power" if isinstance(rule, LinearRule) else "step"
    Q = induced_iterate(rule, P, n, strategy)
    rhs = trajectory(Q, t, lhs.origin, lhs.end)
    return lhs == rhs


def metric_identity_estimate(P: IntervalPartition, Q: IntervalPartition, t: TorusPoint,
                             window: tuple[int, int], k: int = 64) -> tuple[Interval, Fraction]:
    """(d_Delta(P, Q), 2 * Besicovitch estimate of their trajectories from t)."""
    d = sym_diff_distance(P, Q, k)
    b = besicovitch_estimate(trajectory(P, t, *window), trajectory(Q, t, *window))
    return d, 2 * b


@dataclass
class TilingReport:
    tile_length: int
    window: tuple[int, int]
    interior: tuple[int, int]
    skeleton: list[int] = field(default_factory=list)
    raw_matches: int = 0
    density: float = 0.0
    t1_violations: int = 0
    t3_violations: int = 0
    t4_violations: int = 0
    coverage: float = 0.0
    eps: Optional[Fraction] = None

    @property
    def violations(self) -> int:
        return self.t1_violations + self.t3_violations + self.t4_violations

    def passes(self, eps=None, slack: float = 0.01) -> bool:
        eps = self.eps if eps is None else eps
        if eps is None:
            raise ValueError("no epsilon given or recorded")
        return self.violations == 0 and self.coverage >= 1 - float(eps) - slack

    def to_json(self, include_skeleton: bool = False) -> dict:
        d = asdict(self)
        if not include_skeleton:
            d["skeleton_size"] = len(d.pop("skeleton"))
        d["violations"] = self.violations
        d["eps"] = None if self.eps is None else str(self.eps)
        return d


def verify_tiling(w: SymbolWindow, tile: SymbolWindow, spacer: int, eps=None) -> TilingReport:
    """Recover an epsilon-tiling of ``w`` by ``tile`` (cells -N..N-1 around each skeleton point).

    Matches are thinned greedily from the left so that translates are
    disjoint; conditions are then checked on the interior of the window,
    which drops 2N cells at each edge.
    """
    two_n = len(tile)
    N = two_n // 2
    s = w.symbols
    L = s.size
    report = TilingReport(two_n, (w.origin, w.end), (w.origin, w.end),
                          eps=None if eps is None else Fraction(eps))
    if L < two_n:
        return report
    views = np.lib.stride_tricks.sliding_window_view(s, two_n)
    hits = np.flatnonzero((views == tile.symbols).all(axis=1))
    report.raw_matches = int(hits.size)
    skeleton: list[int] = []
    last = None
    for i in hits.tolist():
        if last is None or i >= last + two_n:
            skeleton.append(i)
            last = i
    lo_i, hi_i = min(2 * two_n, L), max(L - 2 * two_n, min(2 * two_n, L))
    report.interior = (w.origin + lo_i, w.origin + hi_i)
    covered = np.zeros(L, dtype=bool)
    for i in skeleton:
        covered[i:i + two_n] = True
    report.t1_violations = sum(1 for a, b in zip(skeleton, skeleton[1:]) if b - a < two_n)
    report.t3_violations = sum(1 for i in skeleton if not np.array_equal(s[i:i + two_n], tile.symbols))
    inner = slice(lo_i, hi_i)
    report.t4_violations = int(np.count_nonzero((~covered[inner]) & (s[inner] != spacer)))
    n_inner = hi_i - lo_i
    report.coverage = float(np.count_nonzero(covered[inner])) / n_inner if n_inner else 0.0
    report.skeleton = [w.origin + i + N for i in skeleton]
    inner_sk = [j for j in report.skeleton if report.interior[0] <= j < report.interior[1]]
    report.density = len(inner_sk) / n_inner if n_inner else 0.0
    return report
