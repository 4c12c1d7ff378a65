"""The acceptance suite: one function per criterion, each returning a verdict."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .experiments import ExperimentConfig, run
from .induced import growth_sandwich, induced_map, rotation_conjugacy_test
from .partition import IntervalPartition, is_primitive, is_simple, transversal_boundary
from .rules import LinearRule
from .torus import GOLDEN, TorusPoint, ZERO, parse_angle


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    time_limit: Optional[float] = None

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.time_limit:.0f}s)" if self.time_limit else ""
        return f"[{verdict}] criterion {self.number:2d}: {self.title} [{self.seconds:.2f}s{limit}]"


def _failed_checks(rep) -> list[str]:
    return [c.name for c in rep.checks if not c.passed]


def criterion_1() -> dict:
    rep = run(ExperimentConfig("chopping", params={"N": 512, "sandwich_max": 0}))
    return {"passed": rep.passed, "failed": _failed_checks(rep), "max_count": rep.summary["max_count"]}


def criterion_2() -> dict:
    angle = parse_angle("quad:(3,-1,5,2)")  # (3 - sqrt 5)/2, below 1/2
    half = TorusPoint(0, Fraction(1, 2))
    P = IntervalPartition.make(angle, [(ZERO, 1), (half, 0)])
    Q = induced_map(LinearRule(2, ((0, 1), (1, 1))), P)
    expected = IntervalPartition.make(angle, [(ZERO, 1), (TorusPoint(1), 0), (half, 1),
                                              (TorusPoint(1, Fraction(1, 2)), 0)])
    return {"passed": Q == expected, "Q": Q.text()}


def criterion_3() -> dict:
    sw = growth_sandwich(1 << 20)
    ok = not sw["violations"] and sw["exponent_error"] <= 0.08
    return {"passed": ok, "min_ratio": sw["min_ratio"], "max_ratio": sw["max_ratio"],
            "exponent_error": sw["exponent_error"]}


def criterion_4() -> dict:
    rep = run(ExperimentConfig("suites", seed=4, params={"conjugacy_cases": 50, "metric_pairs": 0,
                                                         "conjugacy_window": 4096, "n_max": 16, "max_arcs": 6}))
    return {"passed": rep.passed, "agreeing": rep.summary["conjugacy_passed"], "cases": rep.summary["conjugacy_cases"]}


def criterion_5() -> dict:
    rep = run(ExperimentConfig("suites", seed=5, params={"conjugacy_cases": 0, "metric_pairs": 20,
                                                         "metric_window": 10 ** 6, "metric_boundaries": 8,
                                                         "metric_tolerance": 0.01}))
    return {"passed": rep.passed, "worst_abs_diff": rep.summary["metric_worst_abs_diff"]}


def criterion_6() -> dict:
    nil = run(ExperimentConfig("rigidity", params={"rule": "lin:p=2:1+x^1", "schedule": [1, 2, 3, 4, 5]}))
    rig = run(ExperimentConfig("rigidity", params={"rule": "lin:p=3:1+x^1", "schedule": [1, 2, 3, 4],
                                                   "threshold": "1/20"}))
    return {"passed": nil.passed and rig.passed, "failed": _failed_checks(nil) + _failed_checks(rig),
            "dyadic_distances": [float(r["distance"].hi) for r in nil.records],
            "triadic_distances": [float(r["distance"].hi) for r in rig.records]}


def criterion_7() -> dict:
    rep = run(ExperimentConfig("expansiveness", params={"target": 0.9, "max_stages": 12}))
    reached = rep.summary["status"] == "reached"
    recurrence_ok = rep.summary["claimed_recurrence_failures"] == 0
    steps = [(r["k"], r["claimed_recurrence"], r["corrected_recurrence"]) for r in rep.records[1:]]
    return {"passed": reached and recurrence_ok, "reached": reached, "stages": rep.summary["stages"],
            "claimed_recurrence_failures": rep.summary["claimed_recurrence_failures"],
            "steps": steps}


def criterion_8() -> dict:
    rep = run(ExperimentConfig("tiling", seed=8, params={"angle": "cf:[0;(20)]", "N": 10, "eps": 0.1,
                                                         "window": 10 ** 5}))
    return {"passed": rep.passed, "failed": _failed_checks(rep), "tiling": rep.summary["tiling"].copy()}


def criterion_9() -> dict:
    rep = run(ExperimentConfig("surjectivity", params={"angle": "cf:[0;(10000)]", "N": 5000, "eps": 0.2}))
    return {"passed": rep.passed, "distance_hi": float(Fraction(rep.summary["distance"]["hi"]))}


def criterion_10() -> dict:
    rep = run(ExperimentConfig("nonrandomization", seed=10, params={"k": 3, "samples": 10000}))
    return {"passed": rep.passed, "failed": _failed_checks(rep),
            "estimates": [float(r["estimate"]) for r in rep.records if "J" in r]}


def criterion_11() -> dict:
    angle = parse_angle(GOLDEN)
    P = IntervalPartition.sturmian(angle)
    third = IntervalPartition.make(angle, [(ZERO, 1), (TorusPoint(0, Fraction(1, 3)), 0)])
    seventh = TorusPoint(0, Fraction(1, 7))
    results = {
        "is_simple(sturmian)": is_simple(P)[0] is True,
        "is_primitive(sturmian)": is_primitive(P) is True,
        "is_primitive({0,1/3}) is false": is_primitive(third) is False,
        "transversal_boundary(sturmian) empty": transversal_boundary(P) == frozenset(),
        "conjugacy to rho_1/7": rotation_conjugacy_test(P, P.rotate(seventh)) == seventh,
        "no rotation onto Phi_T image": rotation_conjugacy_test(P, induced_map(LinearRule(2, ((0, 1), (1, 1))), P)) is None,
    }
    return {"passed": all(results.values()), **results}


CRITERIA: dict[int, tuple[str, Callable[[], dict], Optional[float]]] = {
    1: ("boundary-count law #d(Phi^n P) = 2^nu(n+1), n <= 512", criterion_1, 30.0),
    2: ("two-arc image Q_1 = [0,a) u [1/2,1/2+a) exactly", criterion_2, None),
    3: ("growth sandwich for N <= 2^20 and exponent within 0.08", criterion_3, 10.0),
    4: ("conjugacy oracle, 50 random cases", criterion_4, None),
    5: ("distance halving within 1e-2 at window 1e6, 20 pairs", criterion_5, 120.0),
    6: ("niltropic bound k=1..5 and rigid <= 0.05 by k=4", criterion_6, None),
    7: ("expansiveness: r_k > 0.9 within 12 stages with recurrence", criterion_7, None),
    8: ("painted tower tiling, window 1e5", criterion_8, None),
    9: ("surjectivity approximation d < 0.2", criterion_9, 60.0),
    10: ("nonrandomization witness and uniform control", criterion_10, None),
    11: ("predicate suite", criterion_11, None),
}


def evaluate(number: int) -> CriterionResult:
    title, fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    detail = fn()
    dt = time.perf_counter() - t0
    passed = bool(detail.pop("passed"))
    if limit is not None and dt > limit:
        passed = False
        detail["time_limit_exceeded"] = True
    return CriterionResult(number, title, passed, detail, dt, limit)


def run_all(numbers: Optional[Iterable[int]] = None, echo: Callable[[str], None] = print) -> list[CriterionResult]:
    out = []
    for n in numbers or sorted(CRITERIA):
        res = evaluate(n)
        echo(res.line())
        out.append(res)
    return out
