"""Finite blocks of symbols anchored at an integer origin."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptyOverlap


class SymbolWindow:
    """Symbols for cells origin, origin+1, ..., origin+len-1."""

    __slots__ = ("origin", "symbols", "alphabet")

    def __init__(self, origin: int, symbols, alphabet: int = 2):
        arr = np.asarray(symbols, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a window holds at least one symbol")
        if arr.size and int(arr.max()) >= alphabet:
            raise ValueError(f"symbol out of range for alphabet {alphabet}")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        self.origin = int(origin)
        self.symbols = arr
        self.alphabet = int(alphabet)

    def __len__(self):
        return int(self.symbols.size)

    @property
    def end(self) -> int:
        return self.origin + len(self)

    def __getitem__(self, ell: int) -> int:
        """Symbol at lattice cell ell (not array index)."""
        i = ell - self.origin
        if not 0 <= i < len(self):
            raise IndexError(f"cell {ell} outside [{self.origin}, {self.end})")
        return int(self.symbols[i])

    def slice(self, lo: int, hi: int) -> "SymbolWindow":
        if lo < self.origin or hi > self.end or hi <= lo:
            raise IndexError(f"[{lo}, {hi}) not inside [{self.origin}, {self.end})")
        return SymbolWindow(lo, self.symbols[lo - self.origin:hi - self.origin], self.alphabet)

    def shifted(self, origin: int) -> "SymbolWindow":
        return SymbolWindow(origin, self.symbols, self.alphabet)

    def __eq__(self, other):
        return (isinstance(other, SymbolWindow) and self.origin == other.origin
                and self.alphabet == other.alphabet and np.array_equal(self.symbols, other.symbols))

    def __hash__(self):
        return hash((self.origin, self.alphabet, self.symbols.tobytes()))

    def __repr__(self):
        body = "".join(map(str, self.symbols[:40].tolist()))
        more = "..." if len(self) > 40 else ""
        return f"SymbolWindow(origin={self.origin}, A={self.alphabet}, {body}{more})"

    def tolist(self) -> list[int]:
        return self.symbols.tolist()

    def word(self) -> str:
        if self.alphabet > 10:
            raise ValueError("word form needs single-digit symbols")
        return "".join(map(str, self.symbols.tolist()))

    @classmethod
    def from_word(cls, word: str, origin: int = 0, alphabet: int = 2) -> "SymbolWindow":
        return cls(origin, [int(c) for c in word if not c.isspace()], alphabet)

    # run-length text: "origin=-3;A=2;4x0,1x1"
    def to_rle(self) -> str:
        s = self.symbols
        cuts = np.flatnonzero(np.diff(s)) + 1
        starts = np.concatenate(([0], cuts))
        lengths = np.diff(np.concatenate((starts, [s.size])))
        runs = ",".join(f"{int(n)}x{int(s[i])}" for i, n in zip(starts, lengths))
        return f"origin={self.origin};A={self.alphabet};{runs}"

    @classmethod
    def from_rle(cls, text: str) -> "SymbolWindow":
        m = re.fullmatch(r"origin=(-?\d+);A=(\d+);([\dx,]+)", text.strip())
        if not m:
            raise ValueError(f"cannot parse window {text!r}")
        runs = [r.split("x") for r in m.group(3).split(",")]
        sym = np.concatenate([np.full(int(n), int(c), dtype=np.uint8) for n, c in runs])
        return cls(int(m.group(1)), sym, int(m.group(2)))


def overlap(w1: SymbolWindow, w2: SymbolWindow) -> tuple[int, int]:
    lo, hi = max(w1.origin, w2.origin), min(w1.end, w2.end)
    if hi <= lo:
        raise EmptyOverlap(f"[{w1.origin}, {w1.end}) and [{w2.origin}, {w2.end}) do not overlap")
    return lo, hi


def besicovitch_estimate(w1: SymbolWindow, w2: SymbolWindow) -> Fraction:
    """Fraction of disagreeing cells over the common domain."""
    lo, hi = overlap(w1, w2)
    a = w1.symbols[lo - w1.origin:hi - w1.origin]
    b = w2.symbols[lo - w2.origin:hi - w2.origin]
    return Fraction(int(np.count_nonzero(a != b)), hi - lo)


def concat(parts: Sequence[SymbolWindow]) -> SymbolWindow:
    """Join windows that tile a contiguous range, in order."""
    for a, b in zip(parts, parts[1:]):
        if a.end != b.origin:
            raise ValueError("windows are not contiguous")
    return SymbolWindow(parts[0].origin, np.concatenate([p.symbols for p in parts]), parts[0].alphabet)
