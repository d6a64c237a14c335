"""Parity itineraries of a reduction ``f`` on ``X (+) Y`` codes, and the maps built from them.

The tau-word of ``n`` records, step by step, whether ``f^(k)(2n)`` is even
(``X``) or odd (``Y``).  Everything here looks at a finite horizon only, so
each result carries ``certified_to`` and says nothing past it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .algebra import ReductionTable
from .oracles import CeSetTable, pair, unpair


@dataclass(frozen=True)
class TauWord:
    letters: str
    source: int
    horizon: int
    truncated: bool = False

    def __str__(self) -> str:
        return self.letters + ("?" if self.truncated else "")


@dataclass(frozen=True)
class PeriodDecomposition:
    preperiod_len: int
    period_len: int
    certified_to: int


@dataclass(frozen=True)
class ClassSplit:
    cx: frozenset[int]
    cy: frozenset[int]
    undecided: frozenset[int]
    certified_to: int


@dataclass(frozen=True)
class Stalled:
    index: int


@dataclass
class PiecewiseMap:
    table: ReductionTable
    omitted: list[int] = field(default_factory=list)
    violations: list[tuple] = field(default_factory=list)


def tau_prefix(f: ReductionTable, n: int, h: int) -> TauWord:
    orbit = f.orbit(2 * n, h - 1) if h > 0 else []
    letters = "".join("X" if c % 2 == 0 else "Y" for c in orbit[:h])
    return TauWord(letters, n, h, truncated=len(letters) < h)


def approx_simf_classes(f: ReductionTable, sample: Iterable[int], h: int) -> list[list[int]]:
    """Group the sample by equal tau-words up to ``h``; coarser than the true relation."""
    blocks: dict[str, list[int]] = {}
    for n in sorted(set(sample)):
        blocks.setdefault(str(tau_prefix(f, n, h)), []).append(n)
    return sorted(blocks.values())


def _fits(w: str, p: int, q: int) -> bool:
    return all(w[i] == w[i - q] for i in range(p + q, len(w)))


def detect_period(w: TauWord | str) -> PeriodDecomposition | None:
    """Least preperiod, then least period, with the period seen at least twice.

    If nothing repeats twice within the word, the last letter is taken as a
    period of length 1 after a preperiod of everything before it.
    """
    letters = w.letters if isinstance(w, TauWord) else w
    n = len(letters)
    if n == 0:
        return None
    for p in range(n):
        for q in range(1, (n - p) // 2 + 1):
            if _fits(letters, p, q):
                return PeriodDecomposition(p, q, n)
    return PeriodDecomposition(n - 1, 1, n)


def expand(letters: str, d: PeriodDecomposition, h: int) -> str:
    """The word ``rho sigma sigma ...`` cut at ``h``, rebuilt from a decomposition."""
    rho = letters[: d.preperiod_len]
    sigma = letters[d.preperiod_len : d.preperiod_len + d.period_len]
    out = rho
    while len(out) < h:
        out += sigma
    return out[:h]


def iterate(f: ReductionTable, N: int) -> ReductionTable:
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        known = f.domain() | f.range()
        return ReductionTable({x: x for x in sorted(known)})
    out = {}
    for x in sorted(f.domain()):
        orbit = f.orbit(x, N)
        if len(orbit) == N + 1:
            out[x] = orbit[-1]
    return ReductionTable(out)


def classify_cx_cy(f2: ReductionTable, sample: Iterable[int], h: int) -> ClassSplit:
    """Split even codes ``2n`` for ``n`` in the sample into all-X, X-then-Y, and the rest."""
    cx, cy, undecided = set(), set(), set()
    for n in sorted(set(sample)):
        w = tau_prefix(f2, n, h)
        if w.truncated:
            undecided.add(2 * n)
        elif w.letters == "X" * h:
            cx.add(2 * n)
        elif w.letters == "X" + "Y" * (h - 1):
            cy.add(2 * n)
        else:
            undecided.add(2 * n)
    return ClassSplit(frozenset(cx), frozenset(cy), frozenset(undecided), h)


def g_from_cx(f2: ReductionTable, split: ClassSplit) -> PiecewiseMap:
    """``n -> f2(2n)/2`` on the all-X codes, ``n -> n`` on the X-then-Y codes."""
    table, omitted, bad = {}, [], []
    for c in sorted(split.cx | split.cy | split.undecided):
        n = c // 2
        if c in split.cy:
            table[n] = n
        elif c in split.cx and c in f2 and f2[c] % 2 == 0:
            table[n] = f2[c] // 2
        elif c in split.cx and c in f2:
            bad.append((n, f2[c]))
        else:
            omitted.append(n)
    return PiecewiseMap(ReductionTable(table), omitted, bad)


def g_onto_y(f2: ReductionTable, sample: Iterable[int] | None = None) -> PiecewiseMap:
    """``n -> (y - 1)/2`` for the first odd ``y`` among ``f2(2n+1), f2(f2(2n+1))``.

    An even first image followed by an even second image is reported as a
    violation: a genuine post-processed reduction never does that.
    """
    if sample is None:
        sample = sorted(x // 2 for x in f2.domain() if x % 2 == 1)
    table, omitted, bad = {}, [], []
    for n in sorted(set(sample)):
        orbit = f2.orbit(2 * n + 1, 2)
        if len(orbit) < 2:
            omitted.append(n)
        elif orbit[1] % 2 == 1:
            table[n] = (orbit[1] - 1) // 2
        elif len(orbit) < 3:
            omitted.append(n)
        elif orbit[2] % 2 == 1:
            table[n] = (orbit[2] - 1) // 2
        else:
            bad.append((n, orbit[1], orbit[2]))
    return PiecewiseMap(ReductionTable(table), omitted, bad)


def id_to_coceer(W: CeSetTable, n: int, stage_budget: int) -> list[int] | Stalled:
    """Values ``f(0..n)`` pairwise separated by ``V = complement of W``.

    ``f(i)`` is ``x`` for the least code ``<x, s>`` with ``s <= stage_budget``
    such that every ``<f(i'), x>`` (``i' < i``, either order) is in ``W_s``.
    """
    numbers = [v for e, _ in W.elems for v in unpair(e)]
    x_max = max(numbers, default=0)
    last = pair(x_max, stage_budget)
    out: list[int] = []
    for i in range(n + 1):
        found = None
        for c in range(last + 1):
            x, s = unpair(c)
            if x > x_max or s > stage_budget:
                continue
            if all(W.contains(pair(v, x), s) or W.contains(pair(x, v), s) for v in out):
                found = x
                break
        if found is None:
            return Stalled(i)
        out.append(found)
    return out


@dataclass
class Analysis:
    horizon: int
    words: dict[int, TauWord]
    periods: dict[int, PeriodDecomposition | None]
    N1: int
    N2: int
    words_f2: dict[int, TauWord]
    split: ClassSplit
    g_x: PiecewiseMap
    g_y: PiecewiseMap

    def to_dict(self) -> dict:
        def period(d):
            return None if d is None else [d.preperiod_len, d.period_len]

        return {
            "horizon": self.horizon,
            "tau": {str(n): str(w) for n, w in sorted(self.words.items())},
            "periods": {str(n): period(d) for n, d in sorted(self.periods.items())},
            "N1": self.N1,
            "N2": self.N2,
            "tau_f2": {str(n): str(w) for n, w in sorted(self.words_f2.items())},
            "cx": sorted(self.split.cx),
            "cy": sorted(self.split.cy),
            "undecided": sorted(self.split.undecided),
            "g_from_cx": sorted([x, v] for x, v in self.g_x.table.items()),
            "g_from_cx_omitted": self.g_x.omitted,
            "g_onto_y": sorted([x, v] for x, v in self.g_y.table.items()),
            "g_onto_y_omitted": self.g_y.omitted,
            "g_onto_y_violations": [list(v) for v in self.g_y.violations],
        }


def analyze(f: ReductionTable, sample: Iterable[int], h: int) -> Analysis:
    """Words, periods, ``f2 = (f^N1)^N2``, the X/Y split and both induced maps."""
    sample = sorted(set(sample))
    words = {n: tau_prefix(f, n, h) for n in sample}
    periods = {n: detect_period(w) for n, w in words.items()}
    N1 = 1
    for n, d in periods.items():
        if d is not None and not words[n].truncated:
            N1 = math.lcm(N1, d.period_len)
    f1 = iterate(f, N1)
    pre = [d.preperiod_len for n in sample
           if not (w := tau_prefix(f1, n, h)).truncated and (d := detect_period(w)) is not None]
    N2 = 1 + max(pre, default=0)
    f2 = iterate(f1, N2)
    words_f2 = {n: tau_prefix(f2, n, h) for n in sample}
    split = classify_cx_cy(f2, sample, h)
    return Analysis(h, words, periods, N1, N2, words_f2, split, g_from_cx(f2, split), g_onto_y(f2, sample))
