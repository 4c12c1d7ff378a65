"""Cellular automaton local rules: linear rules over Z/p and lookup-table rules.

A linear rule is a Laurent polynomial sum_b phi_b x^b over Z/p where x is the
right shift, (x^b a)_l = a_{l-b}.  A general rule reads the neighbourhood
a_{l+b} for its listed offsets b and looks the word up in a table.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import WindowTooSmall
from .window import SymbolWindow

MAX_TABLE = 1 << 24
_DENSE_SPAN = 1 << 24


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % i for i in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class LinearRule:
    """sum_b phi_b x^b over Z/p, stored as sorted (b, phi_b) with phi_b != 0."""

    p: int
    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not self.terms:
            raise ValueError("a linear rule needs at least one nonzero coefficient")
        if any(not 0 < c < self.p for _, c in self.terms):
            raise ValueError("coefficients must be nonzero residues")

    @classmethod
    def from_coeffs(cls, p: int, coeffs: dict[int, int]) -> "LinearRule":
        terms = tuple(sorted((int(b), c % p) for b, c in coeffs.items() if c % p))
        return cls(p, terms)

    @classmethod
    def identity(cls, p: int = 2) -> "LinearRule":
        return cls(p, ((0, 1),))

    @property
    def alphabet(self) -> int:
        return self.p

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self.terms)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.terms)

    @property
    def span(self) -> int:
        return self.terms[-1][0] - self.terms[0][0]

    def text(self) -> str:
        out = []
        for b, c in self.terms:
            coef = "" if c == 1 else str(c)
            out.append(str(c) if b == 0 else f"{coef}x^{b}")
        return f"lin:p={self.p}:" + "+".join(out)

    def __str__(self):
        return self.text()


@dataclass(frozen=True)
class GeneralRule:
    """phi(a_{l+b_0}, ..., a_{l+b_{k-1}}) via a table indexed by
    sum_i c_i A^(k-1-i), the first offset being most significant."""

    alphabet: int
    offsets: tuple[int, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        if self.alphabet < 1 or not self.offsets:
            raise ValueError("need a positive alphabet and a nonempty neighbourhood")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("neighbourhood offsets must be distinct")
        size = self.alphabet ** len(self.offsets)
        if size > MAX_TABLE:
            raise ValueError(f"table of {size} entries exceeds the {MAX_TABLE} limit")
        if len(self.table) != size:
            raise ValueError(f"table must have {size} entries")
        if any(not 0 <= c < self.alphabet for c in self.table):
            raise ValueError("table entries out of range")

    @classmethod
    def from_function(cls, alphabet: int, offsets, fn) -> "GeneralRule":
        k = len(offsets)
        table = []
        for idx in range(alphabet ** k):
            word, v = [], idx
            for _ in range(k):
                word.append(v % alphabet)
                v //= alphabet
            table.append(int(fn(tuple(reversed(word)))))
        return cls(alphabet, tuple(offsets), tuple(table))

    def lookup(self, word) -> int:
        idx = 0
        for c in word:
            idx = idx * self.alphabet + c
        return self.table[idx]

    @property
    def span(self) -> int:
        return max(self.offsets) - min(self.offsets)

    def text(self) -> str:
        code = 0
        for c in reversed(self.table):
            code = code * self.alphabet + c
        offs = ",".join(map(str, self.offsets))
        return f"gen:A={self.alphabet}:B=[{offs}]:table={code:x}"

    def __str__(self):
        return self.text()


Rule = Union[LinearRule, GeneralRule]


def majority3() -> GeneralRule:
    """Binary majority vote over offsets -1, 0, 1 (Wolfram code 232)."""
    return GeneralRule.from_function(2, (-1, 0, 1), lambda w: int(sum(w) >= 2))


def linear_as_general(rule: LinearRule) -> GeneralRule:
    """The same map written as a lookup rule (offsets negated: x^b reads a_{l-b})."""
    offs = tuple(-b for b, _ in rule.terms)
    cs = [c for _, c in rule.terms]
    return GeneralRule.from_function(rule.p, offs, lambda w: sum(c * a for c, a in zip(cs, w)) % rule.p)


_TERM_RE = re.compile(r"^(\d*)(?:x(?:\^(-?\d+))?)?$")


def parse_rule(text: str) -> Rule:
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"lin:p=(\d+):(.+)", s)
    if m:
        p = int(m.group(1))
        coeffs: dict[int, int] = Counter()
        for term in re.split(r"\+(?![^\[]*\])", m.group(2)):
            tm = _TERM_RE.match(term)
            if not tm or not term:
                raise ValueError(f"bad polynomial term {term!r}")
            c = int(tm.group(1)) if tm.group(1) else 1
            if "x" in term:
                b = int(tm.group(2)) if tm.group(2) is not None else 1
            else:
                b = 0
            coeffs[b] += c
        return LinearRule.from_coeffs(p, coeffs)
    m = re.fullmatch(r"gen:A=(\d+):B=\[([-\d,]+)\]:table=([0-9a-fA-F]+)", s)
    if m:
        A = int(m.group(1))
        offs = tuple(int(b) for b in m.group(2).split(","))
        code = int(m.group(3), 16)
        size = A ** len(offs)
        table = []
        for _ in range(size):
            table.append(code % A)
            code //= A
        if code:
            raise ValueError("table code has more digits than the table")
        return GeneralRule(A, offs, tuple(table))
    raise ValueError(f"cannot parse rule {text!r}")


# ---------------------------------------------------------------------------
# Polynomial arithmetic


def _mul_gf2(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    if len(a) > len(b):
        a, b = b, a
    alo, ahi = min(a), max(a)
    blo, bhi = min(b), max(b)
    if (ahi - alo) + (bhi - blo) < _DENSE_SPAN:
        bb = 0
        for e in b:
            bb |= 1 << (e - blo)
        acc = 0
        for e in a:
            acc ^= bb << (e - alo)
        base = alo + blo
        bits = _int_to_bits(acc, max(acc.bit_length(), 1))
        return {base + int(i): 1 for i in np.flatnonzero(bits)}
    cnt = Counter(ea + eb for ea in a for eb in b)
    return {e: 1 for e, n in cnt.items() if n & 1}


def _mul(a: dict[int, int], b: dict[int, int], p: int) -> dict[int, int]:
    if p == 2:
        return _mul_gf2(a, b)
    out: dict[int, int] = Counter()
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] += ca * cb
    return {e: c % p for e, c in out.items() if c % p}


def power(rule: LinearRule, n: int) -> LinearRule:
    """rule**n mod p.

    Uses f**(p**i) = f(x**(p**i)) over Z/p, so only base-p digit powers of
    Frobenius-substituted copies are ever multiplied.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = rule.p
    result = {0: 1}
    f = rule.coeffs
    scale = 1
    while n:
        n, d = divmod(n, p)
        if d:
            g = {e * scale: c for e, c in f.items()}
            for _ in range(d):
                result = _mul(result, g, p)
        scale *= p
    return LinearRule.from_coeffs(p, result)


def compose(r1: LinearRule, r2: LinearRule) -> LinearRule:
    if r1.p != r2.p:
        raise ValueError("rules over different fields")
    return LinearRule.from_coeffs(r1.p, _mul(r1.coeffs, r2.coeffs, r1.p))


def nu(n: int) -> int:
    """Number of 1s in the binary expansion of n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return bin(n).count("1")


def lucas_binom(N: int, n: int, p: int) -> int:
    """binomial(N, n) mod p via base-p digits."""
    if n < 0 or N < 0:
        raise ValueError("arguments must be nonnegative")
    out = 1
    while n or N:
        N, Ni = divmod(N, p)
        n, ni = divmod(n, p)
        if ni > Ni:
            return 0
        out = out * math.comb(Ni, ni) % p
    return out


def trace(rule: LinearRule) -> int:
    return sum(c for _, c in rule.terms) % rule.p


# ---------------------------------------------------------------------------
# Window application


def _bits_to_int(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


def _int_to_bits(v: int, n: int) -> np.ndarray:
    raw = np.frombuffer(v.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def apply_window(rule: Rule, w: SymbolWindow) -> SymbolWindow:
    """Apply the rule to every cell whose neighbourhood lies inside the window."""
    if rule.alphabet != w.alphabet:
        raise ValueError(f"rule alphabet {rule.alphabet} != window alphabet {w.alphabet}")
    L = len(w)
    span = rule.span
    if L <= span:
        raise WindowTooSmall(f"window of length {L} does not exceed neighbourhood span {span}")
    out_len = L - span
    a = w.symbols
    if isinstance(rule, LinearRule):
        bmax = rule.terms[-1][0]
        origin = w.origin + bmax
        if rule.p == 2:
            W = _bits_to_int(a)
            acc = 0
            for b, _ in rule.terms:
                acc ^= W >> (bmax - b)
            acc &= (1 << out_len) - 1
            return SymbolWindow(origin, _int_to_bits(acc, out_len), 2)
        acc = np.zeros(out_len, dtype=np.int64)
        for b, c in rule.terms:
            s = bmax - b
            acc += c * a[s:s + out_len].astype(np.int64)
        return SymbolWindow(origin, (acc % rule.p).astype(np.uint8), rule.p)
    bmin = min(rule.offsets)
    idx = np.zeros(out_len, dtype=np.int64)
    for b in rule.offsets:
        s = b - bmin
        idx = idx * rule.alphabet + a[s:s + out_len]
    table = np.asarray(rule.table, dtype=np.uint8)
    return SymbolWindow(w.origin - bmin, table[idx], rule.alphabet)


def apply_window_n(rule: Rule, w: SymbolWindow, n: int) -> SymbolWindow:
    for _ in range(n):
        w = apply_window(rule, w)
    return w
