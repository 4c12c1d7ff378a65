"""Config-driven experiments producing deterministic JSON reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from .constructions import (
    build_tower,
    majority_sft,
    paint,
    qs_point_in_sft,
    surjective_preimage_partition,
)
from .errors import ConfigError
from .induced import (
    chopping_stats,
    growth_sandwich,
    induced_iterate,
)
from .partition import (
    ONE,
    IntervalPartition,
    joint_measure,
    parse_partition,
    random_partition,
    sweep,
    sym_diff_symbolic,
    transversal_boundary,
)
from .rules import LinearRule, apply_window, nu, parse_rule, power, trace
from .torus import (
    GOLDEN,
    Angle,
    SymbolicReal,
    TorusPoint,
    ZERO,
    make_special_angle,
    parse_angle,
    point_value,
    precision,
    recurrence_schedule,
)
from .trajectory import conjugacy_check, labels_at_points, metric_identity_estimate, trajectory, verify_tiling
from .window import SymbolWindow

PROVENANCE = ("exact-law", "proven-bound", "derived-tolerance", "statistical", "self-consistency")


@dataclass
class Check:
    name: str
    passed: bool
    value: Any
    threshold: Any
    provenance: str
    gate: bool = True

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "value": _jsonable(self.value),
                "threshold": _jsonable(self.threshold), "provenance": self.provenance, "gate": self.gate}


@dataclass
class Report:
    experiment: str
    config: dict
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    series_csv: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gate)

    def check(self, name: str, passed: bool, value, threshold, provenance: str, gate: bool = True) -> bool:
        self.checks.append(Check(name, bool(passed), value, threshold, provenance, gate))
        return bool(passed)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": _jsonable(self.config),
            "records": _jsonable(self.records),
            "summary": _jsonable(self.summary),
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, (TorusPoint,)):
        return str(x)
    return x


@dataclass
class ExperimentConfig:
    """One experiment: its kind, shared settings, and a flat set of parameters."""

    experiment: str
    seed: int = 0
    precision: int = 4096
    out: Optional[str] = None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment' field")
        exp = d.pop("experiment")
        seed = int(d.pop("seed", 0))
        prec = int(d.pop("precision", 4096))
        out = d.pop("out", None)
        return cls(exp, seed, prec, out, d)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: {e}") from e

    def to_dict(self) -> dict:
        d = {"experiment": self.experiment, "seed": self.seed, "precision": self.precision}
        d.update(self.params)
        return d

    def resolve(self, defaults: dict) -> dict:
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.experiment}: {sorted(unknown)}")
        out = dict(defaults)
        out.update(self.params)
        return out


def _angle(spec) -> Angle:
    if isinstance(spec, Angle):
        return spec
    try:
        return parse_angle(spec)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _rule(spec):
    try:
        return parse_rule(spec)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _partition(spec: Optional[str], angle: Angle, alphabet: int) -> IntervalPartition:
    """None or "sturmian" gives {[0, alpha) -> 1, [alpha, 1) -> 0}."""
    if spec in (None, "sturmian"):
        return IntervalPartition.make(angle, [(ZERO, 1), (TorusPoint(1), 0)], alphabet)
    if spec == "trivial":
        return IntervalPartition.trivial(angle, 0, alphabet)
    body = spec if "|" in spec else f"{angle.text()} | {spec}"
    try:
        return parse_partition(body, angle if "|" not in spec else None)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _fraction(x) -> Fraction:
    return Fraction(str(x)) if not isinstance(x, Fraction) else x


# ---------------------------------------------------------------------------


CHOPPING_DEFAULTS = {"angle": GOLDEN, "rule": "lin:p=2:1+x^1", "partition": "sturmian",
                     "N": 512, "sandwich_max": 1 << 20, "spot": [75]}


def run_chopping(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(CHOPPING_DEFAULTS)
    angle, rule = _angle(p["angle"]), _rule(p["rule"])
    P = _partition(p["partition"], angle, rule.alphabet)
    rep = Report("chopping", cfg.to_dict())
    series = chopping_stats(rule, P, int(p["N"]))
    rep.series_csv = series.to_csv()
    N = int(p["N"])
    rep.summary = {
        "boundary_count_initial": series.counts[0],
        "max_count": max(series.counts),
        "A(N)": series.average(N) if N >= 1 else None,
        "exponent_estimate": series.exponent_estimate(N),
        "loglog_slope": series.loglog_slope(),
        "degenerate": P.is_trivial,
        "window_context": f"n = 0..{N}, exact boundary counts",
    }
    for n in p["spot"]:
        if n <= N:
            rep.records.append({"n": n, "count": series.counts[n], "2^nu(n+1)": 2 ** nu(n + 1)})
    one_plus_x = isinstance(rule, LinearRule) and rule.p == 2 and rule.terms == ((0, 1), (1, 1))
    if P.is_trivial:
        rep.check("trivial partition stays trivial", all(c == 0 for c in series.counts),
                  max(series.counts), 0, "exact-law")
    elif one_plus_x and P == IntervalPartition.sturmian(angle):
        bad = [n for n, c in enumerate(series.counts) if c != 2 ** nu(n + 1)]
        rep.check("counts[n] == 2^nu(n+1)", not bad, {"mismatches": bad[:10]}, "all n <= N", "exact-law")
    elif one_plus_x and transversal_boundary(P) == P.boundary():
        b = len(P.starts)
        bad = [n for n, c in enumerate(series.counts) if c != 2 ** nu(n) * b]
        rep.check("counts[n] == 2^nu(n) * #boundary", not bad, {"mismatches": bad[:10]}, "all n <= N", "exact-law")
    if p["sandwich_max"]:
        sw = growth_sandwich(int(p["sandwich_max"]))
        rep.summary["sandwich"] = sw
        rep.check("(1/3) N^a < A~(N) <= 3 N^a", not sw["violations"],
                  {"min_ratio": sw["min_ratio"], "max_ratio": sw["max_ratio"]},
                  f"1 <= N <= {sw['n_max']}", "proven-bound")
        rep.check("|log A~(N)/log N - log2(3/2)|", sw["exponent_error"] <= 0.08,
                  sw["exponent_error"], 0.08, "proven-bound")
    return rep


RIGIDITY_DEFAULTS = {"angle": None, "rule": "lin:p=2:1+x^1", "partition": "sturmian",
                     "schedule": None, "threshold": 0.05}


def run_rigidity(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(RIGIDITY_DEFAULTS)
    rule = _rule(p["rule"])
    if not isinstance(rule, LinearRule):
        raise ConfigError("rigidity needs a linear rule")
    prime = rule.p
    if p["angle"] is None:
        angle = make_special_angle("dyadic_recurrent" if prime == 2 else "p_adic_recurrent", p=prime)
    else:
        angle = _angle(p["angle"])
    P = _partition(p["partition"], angle, prime)
    ks = p["schedule"] or list(range(1, 6 if prime == 2 else 5))
    ns = recurrence_schedule(max(ks))
    tr = trace(rule)
    rep = Report("rigidity", cfg.to_dict())
    rep.summary = {"trace": tr, "mode": "niltropic" if tr == 0 else "rigid",
                   "boundary_count": len(P.starts)}
    O = IntervalPartition.trivial(angle, 0, prime)
    prev: Optional[SymbolicReal] = None
    monotone = True
    last_hi = None
    for k in ks:
        nk = ns[k - 1]
        n = prime ** nk if tr == 0 else (prime - 1) * prime ** nk
        Q = induced_iterate(rule, P, n, "power")
        ref = O if tr == 0 else P
        d = sym_diff_symbolic(Q, ref)
        iv = d.evaluate(angle, 64)
        rec = {"k": k, "n_k": nk, "iterations": f"{'' if tr == 0 else str(prime - 1) + '*'}{prime}^{nk}",
               "arcs": len(Q), "distance": iv, "precision_bits": 64}
        if tr == 0:
            bound = Fraction(2 * len(P.starts), prime ** nk)
            rec["bound"] = bound
            rep.check(f"k={k}: d(Phi^n P, O) <= 2 #dP p^-n_k", iv.hi <= bound, iv.hi, bound, "proven-bound")
        if prev is not None and (d - prev).sign(angle) > 0:
            monotone = False
        prev = d
        last_hi = iv.hi
        rep.records.append(rec)
    if tr == 0:
        rep.check("distances non-increasing along the schedule", monotone, monotone, True, "proven-bound")
    else:
        thr = _fraction(p["threshold"])
        rep.check(f"d(Phi^n P, P) <= {thr} at k={ks[-1]}", last_hi is not None and last_hi <= thr,
                  last_hi, thr, "derived-tolerance")
    return rep


EXPANSIVENESS_DEFAULTS = {"angle": GOLDEN, "partition": "sturmian", "target": 0.9,
                          "max_stages": 12, "m_max": 40, "bits": 128}


def _cmp_symbolic(a: SymbolicReal, b: SymbolicReal, angle: Angle) -> int:
    return (a - b).sign(angle)


def run_expansiveness(cfg: ExperimentConfig) -> Report:
    """Greedy schedule P <- Phi^(2^m) P for 1 + x, m minimizing lambda(P_1 & rho_{2^m a} P_1)."""
    p = cfg.resolve(EXPANSIVENESS_DEFAULTS)
    angle = _angle(p["angle"])
    rule = LinearRule(2, ((0, 1), (1, 1)))
    P = _partition(p["partition"], angle, 2)
    bits = int(p["bits"])
    target = _fraction(p["target"])
    rep = Report("expansiveness", cfg.to_dict())
    r = P.measures()[1]
    r_iv = r.evaluate(angle, bits)
    rep.records.append({"k": 0, "r": r_iv, "arcs": len(P)})
    if P.is_trivial:
        rep.summary = {"status": "degenerate", "r_final": r_iv}
        rep.check("degenerate start stays degenerate", True, r_iv, "lambda(P_1) in {0, 1}", "exact-law")
        return rep
    status = "inconclusive"
    violations = 0
    corrected_violations = 0
    accepted = 0
    for k in range(1, int(p["max_stages"]) + 1):
        best_m, best = None, None
        for m in range(int(p["m_max"]) + 1):
            inter = joint_measure(P, P.rotate(TorusPoint(1 << m)), 1, 1)
            if best is None or _cmp_symbolic(inter, best, angle) < 0:
                best_m, best = m, inter
        inter_iv = best.evaluate(angle, bits)
        r_lo, r_hi = r_iv.lo, r_iv.hi
        certified = inter_iv.hi < r_lo * r_lo
        P = induced_iterate(rule, P, 1 << best_m, "power")
        r_new = P.measures()[1]
        new_iv = r_new.evaluate(angle, bits)
        claimed = _range_of(lambda x: (2 - x) * x, r_lo, r_hi)
        corrected = _range_of(lambda x: 2 * x * (1 - x), r_lo, r_hi)
        rec = {"k": k, "m": best_m, "r_prev": r_iv, "intersection": inter_iv,
               "r_prev_squared_lo": r_lo * r_lo, "intersection_below_r2": certified,
               "r": new_iv, "arcs": len(P), "precision_bits": bits,
               "claimed_bound": {"lo": claimed[0], "hi": claimed[1]},
               "corrected_bound": {"lo": corrected[0], "hi": corrected[1]}}
        rec["claimed_recurrence"] = _strict_status(new_iv, claimed)
        rec["corrected_recurrence"] = _strict_status(new_iv, corrected)
        if certified:
            accepted += 1
            if rec["claimed_recurrence"] != "holds":
                violations += 1
            if rec["corrected_recurrence"] != "holds":
                corrected_violations += 1
        rep.records.append(rec)
        r, r_iv = r_new, new_iv
        if r_iv.lo > target:
            status = "reached"
            break
    rep.summary = {"status": status, "stages": len(rep.records) - 1, "accepted_steps": accepted,
                   "r_final": r_iv, "claimed_recurrence_failures": violations,
                   "corrected_recurrence_failures": corrected_violations}
    rep.check("r_{k+1} > (2 - r_k) r_k at every accepted step", violations == 0,
              violations, 0, "proven-bound")
    rep.check("r_{k+1} > 2 r_k (1 - r_k) at every accepted step", corrected_violations == 0,
              corrected_violations, 0, "proven-bound", gate=False)
    # not reaching the target within budget is inconclusive rather than a failure
    rep.check(f"lambda(P_1^k) > {target} within {p['max_stages']} stages", status == "reached",
              r_iv.hi, target, "derived-tolerance", gate=False)
    return rep


def _range_of(f: Callable, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    # f is concave quadratic; extremes at endpoints or the vertex
    vals = [f(lo), f(hi)]
    for v in (Fraction(1), Fraction(1, 2)):
        if lo <= v <= hi:
            vals.append(f(v))
    return min(vals), max(vals)


def _strict_status(iv, bound: tuple[Fraction, Fraction]) -> str:
    if iv.lo > bound[1]:
        return "holds"
    if iv.hi <= bound[0]:
        return "violated"
    return "undecided"


NONRANDOM_DEFAULTS = {"angle": "digits2:dyadic-recurrent", "rule": "lin:p=2:1+x^1", "partition": "sturmian",
                      "delta": "1/20", "k": 3, "samples": 10000, "jitter": 1000, "control": True}


def stratified_points(S: int, rng, jitter: int) -> list[TorusPoint]:
    """Base points i/S shifted by a seeded integer multiple of alpha."""
    zs = rng.integers(-jitter, jitter + 1, size=S)
    return [TorusPoint(int(z), Fraction(i, S)) for i, z in enumerate(zs)]


def cylinder_measure(Q: IntervalPartition, word: list[int]) -> SymbolicReal:
    """Exact lambda{s : Q(s + l*alpha) = word[l] for all l}."""
    parts = [Q.rotate(TorusPoint(-ell)) for ell in range(len(word))]
    pts, tuples = sweep(parts)
    target = tuple(word)
    if not pts:
        return SymbolicReal(0, Fraction(1 if tuples[0] == target else 0))
    vals = [point_value(x, Q.angle) for x in pts]
    total = SymbolicReal(0, Fraction(0))
    for i, tp in enumerate(tuples):
        if tp == target:
            end = vals[i + 1] if i + 1 < len(pts) else ONE + vals[0]
            total = total + (end - vals[i])
    return total


def run_nonrandomization(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(NONRANDOM_DEFAULTS)
    angle = _angle(p["angle"])
    rule = _rule(p["rule"])
    P = _partition(p["partition"], angle, rule.alphabet)
    delta = _fraction(p["delta"])
    nb = len(P.starts)
    eps = 1 - 2 * delta * nb
    if eps <= 0:
        raise ConfigError(f"delta={delta} leaves epsilon = {eps} <= 0; need delta < 1/(2 #dP)")
    E = math.ceil(-math.log2(eps)) + 1
    k = int(p["k"])
    nk = recurrence_schedule(k)[-1]
    S = int(p["samples"])
    rng = np.random.default_rng(cfg.seed)
    pts = stratified_points(S, rng, int(p["jitter"]))
    uniform = Fraction(1, 2 ** E)
    rep = Report("nonrandomization", cfg.to_dict())
    js = [j for j in range(2 ** (nk - 1)) if j < delta * 2 ** (nk - 1)]
    rep.summary = {"epsilon": eps, "E": E, "n_k": nk, "J_values": [2 ** nk + j for j in js],
                   "samples": S, "uniform_value": uniform, "threshold": 2 * uniform}
    for j in js:
        J = 2 ** nk + j
        Q = induced_iterate(rule, P, J, "power")
        hits = np.ones(S, dtype=bool)
        for ell in range(E):
            hits &= labels_at_points(Q, pts, ell) == 0
        est = Fraction(int(hits.sum()), S)
        exact = cylinder_measure(Q, [0] * E).evaluate(angle, 64)
        rep.records.append({"J": J, "estimate": est, "exact_cylinder_measure": exact,
                            "samples": S, "arcs": len(Q)})
        rep.check(f"J={J}: Pr[0^E] > 2 * 2^-E", est > 2 * uniform, est, 2 * uniform, "statistical")
    if p["control"]:
        sigma = math.sqrt(float(uniform) * (1 - float(uniform)) / S)
        for j in js:
            J = 2 ** nk + j
            R = power(rule, J)
            hits = 0
            for _ in range(S):
                w = SymbolWindow(0, rng.integers(0, rule.alphabet, size=R.span + E), rule.alphabet)
                out = apply_window(R, w)
                hits += int(not out.symbols.any())
            est = hits / S
            rep.records.append({"control_J": J, "estimate": est, "sigma": sigma, "samples": S})
            rep.check(f"control J={J}: |Pr - 2^-E| <= 3 sigma", abs(est - float(uniform)) <= 3 * sigma,
                      est, {"center": uniform, "3sigma": 3 * sigma}, "statistical")
    return rep


SUITE_DEFAULTS = {"angle": GOLDEN, "conjugacy_cases": 50, "conjugacy_window": 4096, "n_max": 16,
                  "max_arcs": 6, "metric_pairs": 20, "metric_window": 1000000, "metric_boundaries": 8,
                  "metric_tolerance": 0.01,
                  "rules": ["lin:p=2:1+x^1", "lin:p=2:1+x^1+x^2", "lin:p=3:1+2x^1", "gen:A=2:B=[-1,0,1]:table=e8"]}


def _random_base_point(rng) -> TorusPoint:
    return TorusPoint(int(rng.integers(-50, 51)), Fraction(int(rng.integers(0, 997)), 997))


def run_suites(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(SUITE_DEFAULTS)
    angle = _angle(p["angle"])
    rules = [_rule(r) for r in p["rules"]]
    rng = np.random.default_rng(cfg.seed)
    rep = Report("suites", cfg.to_dict())
    W = int(p["conjugacy_window"])
    ok = 0
    n_cases = int(p["conjugacy_cases"])
    for i in range(n_cases):
        rule = rules[i % len(rules)]
        P = random_partition(angle, rng, int(p["max_arcs"]), rule.alphabet)
        n = int(rng.integers(0, int(p["n_max"]) + 1))
        t = _random_base_point(rng)
        res = conjugacy_check(rule, P, t, n, (0, W))
        ok += res
        rep.records.append({"suite": "conjugacy", "rule": rule.text(), "partition": P.text(), "n": n,
                            "t": str(t), "window": W, "agree": res})
    rep.check("conjugacy grid exact agreement", ok == n_cases, f"{ok}/{n_cases}", f"{n_cases}/{n_cases}",
              "exact-law")
    Wm = int(p["metric_window"])
    tol = float(p["metric_tolerance"])
    worst = 0.0
    n_pairs = int(p["metric_pairs"])
    for i in range(n_pairs):
        A = 2
        P = random_partition(angle, rng, int(p["metric_boundaries"]), A)
        Q = random_partition(angle, rng, int(p["metric_boundaries"]), A)
        t = _random_base_point(rng)
        d, twice = metric_identity_estimate(P, Q, t, (0, Wm))
        diff = abs(float(d.mid) - float(twice))
        worst = max(worst, diff)
        rep.records.append({"suite": "metric", "P": P.text(), "Q": Q.text(), "t": str(t), "window": Wm,
                            "d_delta": d, "twice_dB": float(twice), "abs_diff": diff})
    rep.summary = {"conjugacy_passed": ok, "conjugacy_cases": n_cases, "metric_pairs": n_pairs,
                   "metric_worst_abs_diff": worst, "metric_window": Wm}
    rep.check(f"|d_delta - 2 d_B| <= {tol} at window {Wm}", worst <= tol, worst, tol, "derived-tolerance")
    return rep


TILING_DEFAULTS = {"angle": "cf:[0;(20)]", "N": 10, "eps": 0.1, "window": 100000, "spacer": 0}


def run_tiling(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(TILING_DEFAULTS)
    angle = _angle(p["angle"])
    N = int(p["N"])
    rep = Report("tiling", cfg.to_dict())
    tower = build_tower(angle, N, _fraction(p["eps"]))
    rng = np.random.default_rng(cfg.seed)
    spacer = int(p["spacer"])
    word = SymbolWindow(-N, rng.integers(0, 2, size=2 * N), 2)
    P = paint(tower, word, spacer)
    W = int(p["window"])
    tr = trajectory(P, ZERO, 0, W)
    tiling = verify_tiling(tr, word, spacer, tower.achieved_epsilon)
    lam_J = float(tower.delta_interval().mid)
    rep.summary = {"tower": tower, "word": word.word(), "tiling": tiling.to_json(), "lambda_J": lam_J,
                   "window": W}
    eps = float(tower.achieved_epsilon)
    rep.check("zero T1/T3/T4 violations", tiling.violations == 0, tiling.violations, 0, "exact-law")
    rep.check("coverage >= 1 - eps - 0.01", tiling.coverage >= 1 - eps - 0.01, tiling.coverage,
              1 - eps - 0.01, "derived-tolerance")
    rep.check("|skeleton density - lambda(J)| <= 0.01", abs(tiling.density - lam_J) <= 0.01,
              abs(tiling.density - lam_J), 0.01, "derived-tolerance")
    return rep


SURJ_DEFAULTS = {"angle": "cf:[0;(10000)]", "partition": "0*al+0/1:1, 0*al+1/3:0", "N": 5000, "eps": 0.2}


def run_surjectivity(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(SURJ_DEFAULTS)
    angle = _angle(p["angle"])
    target = _partition(p["partition"], angle, 2)
    rule = LinearRule(2, ((0, 1), (1, 1)))
    eps = _fraction(p["eps"])
    rep = Report("surjectivity", cfg.to_dict())
    res = surjective_preimage_partition(rule, target, eps, int(p["N"]))
    rep.summary = res.to_json()
    rep.check(f"d(Phi_T Q, target) < {eps}", res.success, res.distance.hi, eps, "derived-tolerance")
    return rep


SFT_DEFAULTS = {"angle": "cf:[0;(20)]", "N": 10, "eps": 0.1, "window": 10000}


def run_sft(cfg: ExperimentConfig) -> Report:
    p = cfg.resolve(SFT_DEFAULTS)
    angle = _angle(p["angle"])
    sft = majority_sft()
    rng = np.random.default_rng(cfg.seed)
    P, t, word = qs_point_in_sft(sft, angle, _fraction(p["eps"]), int(p["N"]), rng=rng)
    tr = trajectory(P, t, 0, int(p["window"]))
    bad = sft.violations(tr)
    rep = Report("sft", cfg.to_dict())
    rep.summary = {"word": word.word(), "partition_arcs": len(P), "window": int(p["window"]),
                   "violations": int(bad.size), "nonconstant": bool(tr.symbols.min() != tr.symbols.max())}
    rep.check("trajectory admissible for majority fixed points", bad.size == 0, int(bad.size), 0, "exact-law")
    return rep


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "chopping": run_chopping,
    "rigidity": run_rigidity,
    "expansiveness": run_expansiveness,
    "nonrandomization": run_nonrandomization,
    "suites": run_suites,
    "tiling": run_tiling,
    "surjectivity": run_surjectivity,
    "sft": run_sft,
}


def run(cfg: ExperimentConfig) -> Report:
    fn = EXPERIMENTS.get(cfg.experiment)
    if fn is None:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}")
    with precision(cfg.precision):
        return fn(cfg)
