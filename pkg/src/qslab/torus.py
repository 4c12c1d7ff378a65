"""Exact arithmetic on the circle for points of the form frac(z*alpha + q).

Every boundary point produced by the partition machinery lives in
Z*alpha + Q, so a point is stored symbolically as an integer coefficient of
the rotation number plus a rational offset.  Irrationality of alpha makes
that representation unique, which gives exact equality for free; ordering is
decided by certified interval refinement, or exactly via conjugate
arithmetic when alpha is a quadratic irrational.
"""

from __future__ import annotations

import contextvars
import math
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Iterable, Optional, Sequence

from .errors import PrecisionExhausted

DEFAULT_BUDGET = 4096
KEY_BITS = 64
_CACHE_LIMIT = 1 << 21

_budget = contextvars.ContextVar("precision_budget", default=DEFAULT_BUDGET)


@contextmanager
def precision(bits: int):
    """Set the default precision budget for comparisons made inside the block."""
    if bits < 64:
        raise ValueError("precision budget must be at least 64 bits")
    token = _budget.set(bits)
    try:
        yield
    finally:
        _budget.reset(token)


def current_budget() -> int:
    return _budget.get()

Less, Equal, Greater = -1, 0, 1


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _floor_scaled(q: Fraction, k: int) -> int:
    return (q.numerator << k) // q.denominator


def _ceil_scaled(q: Fraction, k: int) -> int:
    return -((-q.numerator << k) // q.denominator)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with rational endpoints."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def point(cls, x) -> "Interval":
        x = _as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        other = _as_fraction(other)
        return Interval(self.lo + other, self.hi + other)

    def __sub__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        other = _as_fraction(other)
        return Interval(self.lo - other, self.hi - other)

    def scale(self, c) -> "Interval":
        c = _as_fraction(c)
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b))

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return Interval(-self.hi, -self.lo)
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def certainly_le(self, other) -> bool:
        hi_other = other.lo if isinstance(other, Interval) else _as_fraction(other)
        return self.hi <= hi_other

    def certainly_lt(self, other) -> bool:
        hi_other = other.lo if isinstance(other, Interval) else _as_fraction(other)
        return self.hi < hi_other

    def __float__(self):
        return float(self.mid)

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "mid": float(self.mid)}


# ---------------------------------------------------------------------------
# Angles


class Angle:
    """An irrational rotation number in (0, 1), given symbolically.

    Subclasses provide ``enclose(k)``: an integer L with
    alpha in [L / 2**k, (L + 2) / 2**k].
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._floor_cache: dict = {}
        self._key_cache: dict = {}

    # -- to implement
    def enclose(self, k: int) -> int:
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError

    @property
    def quadratic(self) -> Optional["QuadraticAngle"]:
        """Exact quadratic form of the angle when one is known."""
        return None

    # -- shared machinery
    def __str__(self):
        try:
            return self.text()
        except ValueError:
            return repr(self)

    def __float__(self):
        return self.enclose(64) / 2.0**64

    def value_bounds(self, z: int, q: Fraction, k: int) -> tuple[int, int]:
        """Integers (lo, hi) with lo <= (z*alpha + q) * 2**k <= hi."""
        if z == 0:
            return _floor_scaled(q, k), _ceil_scaled(q, k)
        kk = k + abs(z).bit_length() + 2
        L = self.enclose(kk)
        if z > 0:
            zlo, zhi = z * L, z * (L + 2)
        else:
            zlo, zhi = z * (L + 2), z * L
        vlo = zlo + _floor_scaled(q, kk)
        vhi = zhi + _ceil_scaled(q, kk)
        shift = kk - k
        return vlo >> shift, -((-vhi) >> shift)

    def sign(self, z: int, q: Fraction, budget: Optional[int] = None) -> int:
        """Sign of z*alpha + q, which is nonzero unless z == 0 and q == 0."""
        budget = budget or _budget.get()
        if z == 0:
            return (q > 0) - (q < 0)
        quad = self.quadratic
        if quad is not None:
            return quad._exact_sign(z, q)
        k = 64
        while k <= budget:
            lo, hi = self.value_bounds(z, q, k)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            k *= 2
        raise PrecisionExhausted(f"sign of {z}*alpha + {q} undecided at {budget} bits")

    def floor(self, z: int, q: Fraction, budget: Optional[int] = None) -> int:
        """floor(z*alpha + q), exact."""
        budget = budget or _budget.get()
        if z == 0:
            return math.floor(q)
        key = (z, q)
        f = self._floor_cache.get(key)
        if f is not None:
            return f
        quad = self.quadratic
        if quad is not None:
            f = quad._exact_floor(z, q)
        else:
            k = 64
            while True:
                lo, hi = self.value_bounds(z, q, k)
                if (lo >> k) == (hi >> k):
                    f = lo >> k
                    break
                k *= 2
                if k > budget:
                    raise PrecisionExhausted(f"floor of {z}*alpha + {q} undecided at {budget} bits")
        if len(self._floor_cache) >= _CACHE_LIMIT:
            self._floor_cache.clear()
        self._floor_cache[key] = f
        return f

    def frac_key(self, p: "TorusPoint") -> tuple[int, int]:
        """Cached certified bounds on frac(p) at KEY_BITS bits, for sorting."""
        key = (p.z, p.q)
        b = self._key_cache.get(key)
        if b is None:
            f = self.floor(p.z, p.q)
            lo, hi = self.value_bounds(p.z, p.q - f, KEY_BITS)
            b = (max(lo, 0), min(hi, 1 << KEY_BITS))
            if len(self._key_cache) >= _CACHE_LIMIT:
                self._key_cache.clear()
            self._key_cache[key] = b
        return b


class QuadraticAngle(Angle):
    """alpha = (p + q*sqrt(d)) / r."""

    def __init__(self, p: int, q: int, d: int, r: int):
        super().__init__()
        if r == 0 or q == 0:
            raise ValueError("quadratic angle needs q != 0 and r != 0")
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise ValueError(f"d={d} must be a positive nonsquare")
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        self.p, self.q, self.d, self.r = p // g, q // g, d, r // g
        if self._exact_floor(1, Fraction(0)) != 0:
            raise ValueError(f"quadratic angle {self.text()} does not lie in (0, 1)")

    @property
    def quadratic(self):
        return self

    def text(self) -> str:
        return f"quad:({self.p},{self.q},{self.d},{self.r})"

    def __repr__(self):
        return f"QuadraticAngle({self.p}, {self.q}, {self.d}, {self.r})"

    def __eq__(self, other):
        return isinstance(other, QuadraticAngle) and (self.p, self.q, self.d, self.r) == (
            other.p, other.q, other.d, other.r)

    def __hash__(self):
        return hash(("quad", self.p, self.q, self.d, self.r))

    def _split(self, z: int, q: Fraction) -> tuple[int, int, int]:
        # z*alpha + q = (A + B*sqrt(d)) / C with C > 0
        n, m = q.numerator, q.denominator
        return z * self.p * m + n * self.r, z * self.q * m, self.r * m

    def _floor_b_sqrt_d(self, B: int) -> int:
        if B == 0:
            return 0
        s = math.isqrt(B * B * self.d)
        return s if B > 0 else -s - 1

    def _exact_floor(self, z: int, q: Fraction) -> int:
        A, B, C = self._split(z, q)
        return (A + self._floor_b_sqrt_d(B)) // C

    def _exact_sign(self, z: int, q: Fraction) -> int:
        A, B, _ = self._split(z, q)
        sa = (A > 0) - (A < 0)
        sb = (B > 0) - (B < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        diff = A * A - B * B * self.d
        return sa if diff > 0 else sb

    def enclose(self, k: int) -> int:
        A = self.p << k
        B = self.q << k
        return (A + self._floor_b_sqrt_d(B)) // self.r


def _recurrent_positions(limit: int) -> Iterable[int]:
    n = 1
    while n <= limit:
        yield n
        n = 2 * n + 1


def recurrence_schedule(count: int) -> list[int]:
    """First ``count`` terms of n_1 = 1, n_{k+1} = 2*n_k + 1."""
    out, n = [], 1
    for _ in range(count):
        out.append(n)
        n = 2 * n + 1
    return out


class DigitStreamAngle(Angle):
    """alpha = sum_j digit(j) * base**(-j), j >= 1.

    ``schedule`` names a built-in digit rule ("recurrent") and makes the angle
    serializable; a bare ``digit`` callable is accepted for ad-hoc streams.
    """

    def __init__(self, base: int, digit: Optional[Callable[[int], int]] = None,
                 schedule: Optional[str] = None):
        super().__init__()
        if base < 2:
            raise ValueError("base must be >= 2")
        if (digit is None) == (schedule is None):
            raise ValueError("give exactly one of digit or schedule")
        if schedule is not None and schedule != "recurrent":
            raise ValueError(f"unknown digit schedule {schedule!r}")
        self.base = base
        self.schedule = schedule
        self._digit = digit
        self._prefix_len = 0
        self._prefix_val = 0

    def digit(self, j: int) -> int:
        if self.schedule == "recurrent":
            return 1 if j >= 1 and (j & (j + 1)) == 0 else 0
        return self._digit(j)

    def prefix(self, n: int) -> int:
        """Integer value of the first n digits, i.e. floor(alpha * base**n)."""
        if self.schedule == "recurrent":
            return sum(self.base ** (n - m) for m in _recurrent_positions(n))
        with self._lock:
            if n > self._prefix_len:
                val = self._prefix_val
                for j in range(self._prefix_len + 1, n + 1):
                    val = val * self.base + self.digit(j)
                self._prefix_len, self._prefix_val = n, val
                return val
            return self._prefix_val // self.base ** (self._prefix_len - n)

    def enclose(self, k: int) -> int:
        n = math.ceil(k / math.log2(self.base))
        while self.base ** n < (1 << k):
            n += 1
        return (self.prefix(n) << k) // self.base ** n

    def text(self) -> str:
        if self.schedule is None:
            raise ValueError("ad-hoc digit streams have no textual form")
        if self.base == 2:
            return "digits2:dyadic-recurrent"
        return f"digits{self.base}:recurrent"

    def __repr__(self):
        return f"DigitStreamAngle(base={self.base}, schedule={self.schedule!r})"

    def __eq__(self, other):
        if not isinstance(other, DigitStreamAngle):
            return False
        if self.schedule is None or other.schedule is None:
            return self is other
        return (self.base, self.schedule) == (other.base, other.schedule)

    def __hash__(self):
        return hash(("digits", self.base, self.schedule, None if self.schedule else id(self)))


class ContinuedFractionAngle(Angle):
    """alpha = [0; a_1, a_2, ...], eventually periodic or rule-generated."""

    def __init__(self, prefix: Sequence[int] = (), period: Sequence[int] = (),
                 quotient: Optional[Callable[[int], int]] = None):
        super().__init__()
        if (not period) == (quotient is None):
            raise ValueError("give exactly one of period or quotient")
        if any(a < 1 for a in list(prefix) + list(period)):
            raise ValueError("partial quotients must be positive")
        self.prefix_terms = tuple(prefix)
        self.period = tuple(period)
        self._quotient = quotient
        # convergent numerators/denominators h_n/k_n, n = 0, 1, ...
        self._h = [0, 1]
        self._k = [1, self.partial(1)]
        self._quad = self._to_quadratic() if self.period else None

    def partial(self, i: int) -> int:
        """Partial quotient a_i for i >= 1."""
        if self._quotient is not None:
            return self._quotient(i)
        if i <= len(self.prefix_terms):
            return self.prefix_terms[i - 1]
        j = (i - len(self.prefix_terms) - 1) % len(self.period)
        return self.period[j]

    @property
    def quadratic(self):
        return self._quad

    def _to_quadratic(self) -> QuadraticAngle:
        P, Pp, Q, Qp = 1, 0, 0, 1
        for a in self.period:
            P, Pp, Q, Qp = P * a + Pp, P, Q * a + Qp, Q
        # y = [p_1; p_2, ..., y] solves Q y^2 + (Qp - P) y - Pp = 0, y > 1
        u = P - Qp
        D = u * u + 4 * Q * Pp
        H, Hp, K, Kp = 0, 1, 1, 0  # a_0 = 0
        for a in self.prefix_terms:
            H, Hp, K, Kp = H * a + Hp, H, K * a + Kp, K
        A = H * u + 2 * Q * Hp
        C = K * u + 2 * Q * Kp
        return QuadraticAngle(A * C - H * K * D, H * C - A * K, D, C * C - K * K * D)

    def _convergent(self, n: int) -> tuple[int, int]:
        with self._lock:
            while len(self._h) <= n:
                i = len(self._h)
                a = self.partial(i)
                self._h.append(a * self._h[-1] + self._h[-2])
                self._k.append(a * self._k[-1] + self._k[-2])
            return self._h[n], self._k[n]

    def enclose(self, k: int) -> int:
        if self._quad is not None:
            return self._quad.enclose(k)
        n = 1
        while True:
            h0, k0 = self._convergent(n)
            h1, k1 = self._convergent(n + 1)
            if k0 * k1 >= (1 << k):
                break
            n += 1
        lo = min(Fraction(h0, k0), Fraction(h1, k1))
        return _floor_scaled(lo, k)

    def text(self) -> str:
        if self._quotient is not None:
            raise ValueError("rule-generated continued fractions have no textual form")
        body = ",".join(map(str, self.prefix_terms))
        per = "(" + ",".join(map(str, self.period)) + ")"
        return f"cf:[0;{body + ',' if body else ''}{per}]"

    def __repr__(self):
        return f"ContinuedFractionAngle(prefix={self.prefix_terms}, period={self.period})"

    def __eq__(self, other):
        if not isinstance(other, ContinuedFractionAngle):
            return False
        if self._quotient is not None or other._quotient is not None:
            return self is other
        return self.quadratic == other.quadratic

    def __hash__(self):
        return hash(("cf", self.quadratic)) if self._quad else id(self)


def eval_angle(angle: Angle, k: int) -> Interval:
    """Interval of width <= 2**-k containing alpha; nested as k grows."""
    L = angle.enclose(k + 1)
    return Interval(Fraction(L, 1 << (k + 1)), Fraction(L + 2, 1 << (k + 1)))


def make_special_angle(kind: str, p: int = 2, M: int = 1) -> Angle:
    """Angles used by the recurrence, rigidity and tower experiments.

    ``dyadic_recurrent``: binary digits with 1s at n_1 = 1, n_{k+1} = 2 n_k + 1
    (0.1 0 1 000 1 ...), so the zero blocks sit at (n_k, 2 n_k].
    ``p_adic_recurrent``: the same schedule in base ``p``.
    ``high_partial_quotient``: [0; M, M, M, ...].
    """
    if kind == "dyadic_recurrent":
        return DigitStreamAngle(2, schedule="recurrent")
    if kind == "p_adic_recurrent":
        if p < 2 or any(p % i == 0 for i in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"p={p} is not prime")
        return DigitStreamAngle(p, schedule="recurrent")
    if kind == "high_partial_quotient":
        if M < 1:
            raise ValueError("M must be positive")
        return ContinuedFractionAngle(period=(M,))
    raise ValueError(f"unknown special angle kind {kind!r}")


GOLDEN = "quad:(-1,1,5,2)"

_QUAD_RE = re.compile(r"^quad:\((-?\d+),(-?\d+),(\d+),(-?\d+)\)$")
_DIGITS_RE = re.compile(r"^digits(\d+):([a-z-]+)$")
_CF_RE = re.compile(r"^cf:\[0;(.*)\]$")


def _shortest_period(terms: list[int]) -> tuple[int, ...]:
    for p in range(1, len(terms) + 1):
        if all(terms[i] == terms[i + p] for i in range(len(terms) - p)):
            return tuple(terms[:p])
    return tuple(terms)


def parse_angle(text: str) -> Angle:
    """Parse the one-line form produced by ``Angle.text()``.

    ``cf:[0;a,b,(c,d)]`` has prefix a, b and period c, d; a trailing ``...``
    as in ``cf:[0;1,1,1,...]`` repeats the shortest period of the listed terms.
    """
    s = text.strip().replace(" ", "")
    m = _QUAD_RE.match(s)
    if m:
        return QuadraticAngle(*map(int, m.groups()))
    m = _DIGITS_RE.match(s)
    if m:
        base, name = int(m.group(1)), m.group(2)
        if name in ("recurrent", "dyadic-recurrent", "p-adic-recurrent"):
            if name == "dyadic-recurrent" and base != 2:
                raise ValueError("dyadic-recurrent needs base 2")
            return DigitStreamAngle(base, schedule="recurrent")
        raise ValueError(f"unknown digit schedule {name!r}")
    m = _CF_RE.match(s)
    if m:
        body = m.group(1)
        if body.endswith("..."):
            terms = [int(t) for t in body[:-3].strip(",").split(",") if t]
            return ContinuedFractionAngle(period=_shortest_period(terms))
        pm = re.match(r"^((?:\d+,)*)\(([\d,]+)\)$", body)
        if not pm:
            raise ValueError(f"cannot parse continued fraction {text!r}")
        prefix = [int(t) for t in pm.group(1).split(",") if t]
        period = [int(t) for t in pm.group(2).split(",") if t]
        return ContinuedFractionAngle(prefix=prefix, period=period)
    raise ValueError(f"cannot parse angle {text!r}")


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class TorusPoint:
    """The point frac(z*alpha + q), with q normalized into [0, 1)."""

    z: int
    q: Fraction = Fraction(0)

    def __post_init__(self):
        q = self.q
        if not isinstance(q, Fraction):
            q = Fraction(q)
        if q < 0 or q >= 1:
            q = q - math.floor(q)
        object.__setattr__(self, "q", q)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.z + other.z, self.q + other.q)

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-self.z, -self.q)

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.z - other.z, self.q - other.q)

    def rotate(self, ell: int) -> "TorusPoint":
        """sigma^ell: advance by ell * alpha."""
        return TorusPoint(self.z + ell, self.q)

    def __str__(self):
        return f"{self.z}*al+{self.q.numerator}/{self.q.denominator}"

    def __repr__(self):
        return f"TorusPoint({self.z}, {self.q})"


ZERO = TorusPoint(0, Fraction(0))

_POINT_RE = re.compile(r"^(?:(-?\d*)\*?al)?(?:\+?(-?\d+)(?:/(\d+))?)?$")


def parse_point(text: str) -> TorusPoint:
    """Parse ``z*al+p/q``; shorthands like ``al``, ``2*al`` and ``1/3`` also work."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty point")
    m = _POINT_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse torus point {text!r}")
    zs, num, den = m.groups()
    if "al" in s:
        z = 1 if zs in ("", "+") else -1 if zs == "-" else int(zs)
    else:
        z = 0
    q = Fraction(int(num), int(den) if den else 1) if num is not None else Fraction(0)
    return TorusPoint(z, q)


def point_value(p: TorusPoint, angle: Angle) -> "SymbolicReal":
    """frac(p) as an unreduced symbolic real z*alpha + r."""
    return SymbolicReal(p.z, p.q - angle.floor(p.z, p.q))


def eval_point(p: TorusPoint, angle: Angle, k: int) -> Interval:
    """Certified interval of width <= 2**-k containing frac(z*alpha + q)."""
    iv = point_value(p, angle).evaluate(angle, k)
    return Interval(max(iv.lo, Fraction(0)), min(iv.hi, Fraction(1)))


def compare(a: TorusPoint, b: TorusPoint, angle: Angle, budget: Optional[int] = None) -> int:
    """Order of frac(a) and frac(b) on [0, 1): Less, Equal or Greater."""
    if a == b:
        return Equal
    budget = budget or _budget.get()
    alo, ahi = angle.frac_key(a)
    blo, bhi = angle.frac_key(b)
    if ahi < blo:
        return Less
    if bhi < alo:
        return Greater
    fa = angle.floor(a.z, a.q, budget)
    fb = angle.floor(b.z, b.q, budget)
    return angle.sign(a.z - b.z, (a.q - fa) - (b.q - fb), budget)


def sort_points(points: Iterable[TorusPoint], angle: Angle) -> list[TorusPoint]:
    """Sort by position in [0, 1), exactly.

    Points are ordered by cached 64-bit enclosures; only runs whose
    enclosures overlap fall back to exact comparison.
    """
    items = [(angle.frac_key(p), p) for p in points]
    items.sort(key=lambda it: it[0][0])
    out: list[TorusPoint] = []
    i, n = 0, len(items)
    cmp = cmp_to_key(lambda x, y: compare(x, y, angle))
    while i < n:
        j, reach = i + 1, items[i][0][1]
        while j < n and items[j][0][0] <= reach:
            reach = max(reach, items[j][0][1])
            j += 1
        if j - i == 1:
            out.append(items[i][1])
        else:
            out.extend(sorted((it[1] for it in items[i:j]), key=cmp))
        i = j
    return out


@dataclass(frozen=True)
class SymbolicReal:
    """The real number z*alpha + r (not reduced mod 1)."""

    z: int
    r: Fraction

    def __add__(self, other: "SymbolicReal") -> "SymbolicReal":
        return SymbolicReal(self.z + other.z, self.r + other.r)

    def __sub__(self, other: "SymbolicReal") -> "SymbolicReal":
        return SymbolicReal(self.z - other.z, self.r - other.r)

    def __mul__(self, c: int) -> "SymbolicReal":
        return SymbolicReal(self.z * c, self.r * c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.z == 0 and self.r == 0

    def evaluate(self, angle: Angle, k: int) -> Interval:
        """Certified interval of width <= 2**-k."""
        if self.z == 0:
            return Interval.point(self.r)
        lo, hi = angle.value_bounds(self.z, self.r, k + 2)
        den = 1 << (k + 2)
        return Interval(Fraction(lo, den), Fraction(hi, den))

    def sign(self, angle: Angle, budget: Optional[int] = None) -> int:
        return angle.sign(self.z, self.r, budget)

    def __str__(self):
        return f"{self.z}*al+{self.r}"


ZERO_LENGTH = SymbolicReal(0, Fraction(0))


def arc_length(start: TorusPoint, end: TorusPoint, angle: Angle) -> SymbolicReal:
    """Length of the half-open arc [start, end) going counterclockwise."""
    d = point_value(end, angle) - point_value(start, angle)
    if compare(start, end, angle) >= 0:
        d = d + SymbolicReal(0, Fraction(1))
    return d


def circle_distance(p: TorusPoint, angle: Angle) -> SymbolicReal:
    """||p||: distance from frac(p) to the nearest integer, as a symbolic real."""
    v = point_value(p, angle)
    if (v * 2 - SymbolicReal(0, Fraction(1))).sign(angle) <= 0:
        return v
    return SymbolicReal(0, Fraction(1)) - v
