"""Customized quasisturmian systems: Rokhlin towers, painting, Dirichlet SFTs,
and approximate preimages under 1 + x."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import CoreNotAdmissible, EpsilonUnreachable, PreimageFailed
from .induced import induced_map
from .partition import IntervalPartition, sym_diff_distance
from .rules import LinearRule
from .torus import (
    Angle,
    Interval,
    SymbolicReal,
    TorusPoint,
    ZERO,
    arc_length,
    circle_distance,
    point_value,
    sort_points,
)
from .window import SymbolWindow


@dataclass(frozen=True)
class TowerSpec:
    """Levels [b*alpha, b*alpha + delta) for b in -N..N-1, with delta = frac(s*alpha)."""

    angle: Angle
    N: int
    s: int
    j_star: int
    delta: SymbolicReal
    achieved_epsilon: Fraction

    @property
    def base(self) -> tuple[TorusPoint, TorusPoint]:
        return ZERO, TorusPoint(self.s)

    def levels(self) -> list[tuple[TorusPoint, TorusPoint]]:
        return [(TorusPoint(b), TorusPoint(b + self.s)) for b in range(-self.N, self.N)]

    def delta_interval(self, k: int = 64) -> Interval:
        return self.delta.evaluate(self.angle, k)

    def to_json(self) -> dict:
        return {
            "angle": self.angle.text(),
            "N": self.N,
            "base": [str(ZERO), str(TorusPoint(self.s))],
            "j_star": self.j_star,
            "delta": float(self.delta_interval().mid),
            "achieved_epsilon": str(self.achieved_epsilon),
            "achieved_epsilon_float": float(self.achieved_epsilon),
        }


def _argmin_norm(angle: Angle, count: int) -> int:
    """j in 1..count minimizing ||j*alpha|| (unique since alpha is irrational)."""
    best, best_d = 1, circle_distance(TorusPoint(1), angle)
    for j in range(2, count + 1):
        d = circle_distance(TorusPoint(j), angle)
        if (d - best_d).sign(angle) < 0:
            best, best_d = j, d
    return best


def levels_disjoint(tower: TowerSpec) -> bool:
    """Exact check: every cyclic gap between consecutive level starts is >= delta."""
    starts = sort_points([TorusPoint(b) for b in range(-tower.N, tower.N)], tower.angle)
    n = len(starts)
    for i in range(n):
        gap = arc_length(starts[i], starts[(i + 1) % n], tower.angle)
        if (gap - tower.delta).sign(tower.angle) < 0:
            return False
    return True


def build_tower(angle: Angle, N: int, eps_target, check: bool = True) -> TowerSpec:
    """Tower of height 2N over J = [0, delta), delta = min_{0<|j|<2N} ||j*alpha||.

    delta is also the smallest gap between the points {b*alpha}, so the 2N
    levels are disjoint and cover 2N*delta.  Raises EpsilonUnreachable
    unless 1 - 2N*delta <= eps_target.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    eps_target = Fraction(eps_target)
    if not 0 < eps_target < 1:
        raise ValueError("eps_target must lie in (0, 1)")
    j = _argmin_norm(angle, 2 * N - 1)
    s = j if (point_value(TorusPoint(j), angle) * 2 - SymbolicReal(0, Fraction(1))).sign(angle) < 0 else -j
    delta = point_value(TorusPoint(s), angle)
    gap = (SymbolicReal(0, Fraction(1)) - delta * (2 * N)).evaluate(angle, 64)
    tower = TowerSpec(angle, N, s, j, delta, gap.hi)
    if check and not levels_disjoint(tower):
        raise AssertionError("tower levels overlap")
    if tower.achieved_epsilon > eps_target:
        raise EpsilonUnreachable(
            f"achieved epsilon {float(tower.achieved_epsilon):.6g} exceeds target {float(eps_target):.6g}",
            achieved=tower.achieved_epsilon)
    return tower


def paint(tower: TowerSpec, word: SymbolWindow, spacer: int) -> IntervalPartition:
    """Level b gets symbol word[b]; the complement of the tower gets the spacer."""
    N = tower.N
    if len(word) != 2 * N:
        raise ValueError(f"word must have length 2N = {2 * N}")
    w = word.shifted(-N)
    arcs: dict[TorusPoint, int] = {}
    for b in range(-N, N):
        arcs[TorusPoint(b)] = w[b]
    for b in range(-N, N):
        end = TorusPoint(b + tower.s)
        if end not in arcs:
            arcs[end] = spacer
    return IntervalPartition.make(tower.angle, arcs.items(), max(word.alphabet, spacer + 1))


class DirichletSft:
    """A subshift given by a window checker, with an inert spacer and a valence."""

    def __init__(self, alphabet: int, spacer: int, valence: int,
                 violations: Callable[[np.ndarray], np.ndarray],
                 extend: Callable[[np.ndarray, int], np.ndarray], name: str = ""):
        self.alphabet = alphabet
        self.spacer = spacer
        self.valence = valence
        self._violations = violations
        self._extend = extend
        self.name = name

    def violations(self, w: SymbolWindow) -> np.ndarray:
        """Lattice cells where the window is certainly inadmissible."""
        return w.origin + self._violations(w.symbols)

    def admissible(self, w: SymbolWindow) -> bool:
        return self._violations(w.symbols).size == 0


def _majority_violations(s: np.ndarray) -> np.ndarray:
    # a cell is fixed by 3-cell majority iff some neighbour shares its value
    if s.size < 3:
        return np.zeros(0, dtype=np.int64)
    mid = s[1:-1]
    ok = (s[:-2] == mid) | (s[2:] == mid)
    return np.flatnonzero(~ok) + 1


def _majority_extend(s: np.ndarray, V: int) -> np.ndarray:
    out = np.zeros(s.size + 2 * V, dtype=np.uint8)
    out[V:V + s.size] = s
    # an isolated 1 at an edge needs one more 1 just outside the core
    if s[0] == 1 and (s.size == 1 or s[1] != 1):
        out[V - 1] = 1
    if s[-1] == 1 and (s.size == 1 or s[-2] != 1):
        out[V + s.size] = 1
    return out


def majority_sft() -> DirichletSft:
    """Fixed points of binary 3-cell majority: spacer 0, valence 2."""
    return DirichletSft(2, 0, 2, _majority_violations, _majority_extend, name="majority3-fixed")


def dirichlet_extension(sft: DirichletSft, core: SymbolWindow) -> SymbolWindow:
    """Pad ``core`` by ``valence`` cells each side so that, surrounded by the
    spacer, it is admissible; the core itself is kept unchanged."""
    if not sft.admissible(core):
        raise CoreNotAdmissible(f"core has inadmissible cells at {sft.violations(core).tolist()}")
    ext = sft._extend(core.symbols, sft.valence)
    return SymbolWindow(core.origin - sft.valence, ext, sft.alphabet)


def random_majority_core(length: int, rng) -> SymbolWindow:
    """Random binary word whose maximal runs all have length >= 2."""
    out: list[int] = []
    c = int(rng.integers(0, 2))
    while len(out) < length:
        run = int(rng.integers(2, 6))
        out.extend([c] * run)
        c ^= 1
    out = out[:length]
    if length >= 2 and out[-1] != out[-2]:
        out[-1] = out[-2]
    return SymbolWindow(0, out, 2)


def qs_point_in_sft(sft: DirichletSft, angle: Angle, eps, N: int,
                    core: Optional[SymbolWindow] = None, rng=None) -> tuple[IntervalPartition, TorusPoint, SymbolWindow]:
    """Paint a tower with a Dirichlet-extended core; returns (P, t, word).

    Every trajectory of P is a concatenation of copies of the word separated
    by spacers, hence admissible.
    """
    tower = build_tower(angle, N, eps)
    width = 2 * N - 2 * sft.valence
    if width < 1:
        raise ValueError("tower too short for the valence")
    if core is None:
        if rng is None:
            rng = np.random.default_rng(0)
        core = random_majority_core(width, rng)
    if len(core) != width:
        raise ValueError(f"core must have length 2N - 2V = {width}")
    word = dirichlet_extension(sft, core.shifted(0))
    P = paint(tower, word.shifted(0), sft.spacer)
    return P, ZERO, word.shifted(-N)


@dataclass
class PreimageResult:
    Q: IntervalPartition
    image: IntervalPartition
    distance: Interval
    tower: TowerSpec
    target_word: SymbolWindow
    preimage_word: SymbolWindow
    eps: Fraction

    @property
    def success(self) -> bool:
        return self.distance.hi < self.eps

    def to_json(self) -> dict:
        return {
            "tower": self.tower.to_json(),
            "distance": self.distance.to_json(),
            "eps": str(self.eps),
            "success": self.success,
            "arcs_Q": len(self.Q),
        }


def surjective_preimage_partition(rule: LinearRule, target: IntervalPartition, eps,
                                  N: int, tower_eps=None) -> PreimageResult:
    """Approximate preimage of ``target`` under Phi_T for the rule 1 + x over Z/2.

    The target is approximated by a tower painted with its labels at the
    level starts; the word is inverted by q_b = q_{b-1} + w_b (both choices
    of the free first bit are tried) and painted back.
    """
    if not (isinstance(rule, LinearRule) and rule.p == 2 and rule.terms == ((0, 1), (1, 1))):
        raise PreimageFailed("only the rule 1 + x over Z/2 has a preimage solver")
    eps = Fraction(eps)
    angle = target.angle
    tower = build_tower(angle, N, eps / 2 if tower_eps is None else tower_eps)
    w = np.array([target.label_at(TorusPoint(b)) for b in range(-N, N)], dtype=np.uint8)
    best: Optional[PreimageResult] = None
    for q0 in (0, 1):
        q = np.bitwise_xor.accumulate(np.concatenate(([q0], w[1:]))).astype(np.uint8)
        Q = paint(tower, SymbolWindow(-N, q, 2), 0)
        image = induced_map(rule, Q)
        d = sym_diff_distance(image, target, 64)
        cand = PreimageResult(Q, image, d, tower, SymbolWindow(-N, w, 2), SymbolWindow(-N, q, 2), eps)
        if best is None or d.hi < best.distance.hi:
            best = cand
    return best
