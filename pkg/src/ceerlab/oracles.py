"""Finite tables standing in for the standard numbering.

``phi_j`` are partial functions given by ``(input, output, stage)`` rows; a
value becomes visible at its convergence stage.  ``W_i`` are c.e. sets given
by ``(element, stage)`` rows.  ``V_j`` is the complement of ``W_j`` read as a
set of Cantor-coded pairs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebra import Verdict


class FixtureError(ValueError):
    """A fixture document is structurally malformed."""


def pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def unpair(n: int) -> tuple[int, int]:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    y = n - w * (w + 1) // 2
    return w - y, y


@dataclass(frozen=True)
class PartialFnTable:
    triples: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        index: dict[int, tuple[int, int]] = {}
        for x, v, t in self.triples:
            index.setdefault(x, (v, t))
        object.__setattr__(self, "_index", index)

    def lookup(self, x: int, s: int) -> int | None:
        hit = self._index.get(x)  # type: ignore[attr-defined]
        if hit is None or hit[1] > s:
            return None
        return hit[0]


@dataclass(frozen=True)
class CeSetTable:
    elems: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        first: dict[int, int] = {}
        for e, t in self.elems:
            first[e] = min(t, first.get(e, t))
        object.__setattr__(self, "_first", first)

    def at(self, s: int) -> frozenset[int]:
        return frozenset(e for e, t in self._first.items() if t <= s)  # type: ignore[attr-defined]

    def contains(self, e: int, s: int) -> bool:
        t = self._first.get(e)  # type: ignore[attr-defined]
        return t is not None and t <= s

    def max_stage(self) -> int:
        return max((t for _, t in self.elems), default=0)


@dataclass(frozen=True)
class OracleFamily:
    phis: tuple[PartialFnTable, ...] = ()
    wes: tuple[CeSetTable, ...] = ()
    name: str = "unnamed"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "num_phis": len(self.phis),
            "num_wes": len(self.wes),
            "phis": [[j, x, v, t] for j, tab in enumerate(self.phis) for x, v, t in tab.triples],
            "wes": [[i, e, t] for i, tab in enumerate(self.wes) for e, t in tab.elems],
        }


def make_family(name: str, phis=(), wes=()) -> OracleFamily:
    """Build a family from per-index row lists (``phis[j]`` of triples, ``wes[i]`` of pairs)."""
    return OracleFamily(
        phis=tuple(PartialFnTable(tuple(tuple(r) for r in rows)) for rows in phis),
        wes=tuple(CeSetTable(tuple(tuple(r) for r in rows)) for rows in wes),
        name=name,
    )


def _rows(doc: dict, key: str, width: int) -> list[list[int]]:
    rows = doc.get(key, [])
    if not isinstance(rows, list):
        raise FixtureError(f"{key!r} must be a list")
    for r in rows:
        if not (isinstance(r, list) and len(r) == width and all(isinstance(v, int) and v >= 0 for v in r)):
            raise FixtureError(f"{key!r} row {r!r} is not {width} naturals")
    return rows


def family_from_dict(doc: dict) -> OracleFamily:
    if not isinstance(doc, dict):
        raise FixtureError("family document must be a mapping")
    phi_rows = _rows(doc, "phis", 4)
    we_rows = _rows(doc, "wes", 3)
    num_phis = doc.get("num_phis", 1 + max((r[0] for r in phi_rows), default=-1))
    num_wes = doc.get("num_wes", 1 + max((r[0] for r in we_rows), default=-1))
    if any(r[0] >= num_phis for r in phi_rows) or any(r[0] >= num_wes for r in we_rows):
        raise FixtureError("row index beyond declared num_phis/num_wes")
    phis: list[list] = [[] for _ in range(num_phis)]
    wes: list[list] = [[] for _ in range(num_wes)]
    for j, x, v, t in phi_rows:
        phis[j].append((x, v, t))
    for i, e, t in we_rows:
        wes[i].append((e, t))
    return make_family(str(doc.get("name", "unnamed")), phis, wes)


def load_family(path: str | Path) -> OracleFamily:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read family {path}: {exc}") from exc
    return family_from_dict(doc)


def _check_index(seq, j: int, what: str) -> None:
    if not 0 <= j < len(seq):
        raise IndexError(f"{what} index {j} out of range (have {len(seq)})")


def phi_at(fam: OracleFamily, j: int, x: int, s: int) -> int | None:
    """``phi_j(x)`` if it has converged by stage ``s``, else ``None``."""
    _check_index(fam.phis, j, "phi")
    return fam.phis[j].lookup(x, s)


def we_at(fam: OracleFamily, i: int, s: int) -> frozenset[int]:
    _check_index(fam.wes, i, "W")
    return fam.wes[i].at(s)


def v_related(fam: OracleFamily, j: int, x: int, y: int, s: int) -> bool:
    """Whether ``x V_j y`` still looks true at stage ``s`` (both orientations read)."""
    _check_index(fam.wes, j, "W")
    if x == y:
        return True
    w = fam.wes[j]
    return not (w.contains(pair(x, y), s) or w.contains(pair(y, x), s))


def validate_family(fam: OracleFamily) -> Verdict:
    checked = set()
    for j, tab in enumerate(fam.phis):
        seen = set()
        for x, v, t in tab.triples:
            checked.add(("phi", j, x))
            if x in seen:
                return Verdict.fails(("phi", j, x), f"phi_{j} has two rows for input {x}", checked)
            if t < 1:
                return Verdict.fails(("phi", j, x), f"phi_{j}({x}) converges at stage {t} < 1", checked)
            seen.add(x)
    for i, tab in enumerate(fam.wes):
        seen = set()
        for e, _ in tab.elems:
            checked.add(("W", i, e))
            if e in seen:
                return Verdict.fails(("W", i, e), f"W_{i} lists element {e} twice", checked)
            seen.add(e)
    warnings = []
    for j, tab in enumerate(fam.wes):
        bad = _transitivity_violation(fam, j, tab.max_stage())
        if bad is not None:
            x, y, z = bad
            warnings.append(f"V_{j} not transitive on fragment: {x}~{y}, {y}~{z}, {x}!~{z}")
    return Verdict.holds(checked, warnings=warnings)


def _transitivity_violation(fam: OracleFamily, j: int, s: int):
    universe = sorted({n for e in we_at(fam, j, s) for n in unpair(e)})
    if len(universe) > 60:
        universe = universe[:60]
    for x in universe:
        for y in universe:
            if y == x or not v_related(fam, j, x, y, s):
                continue
            for z in universe:
                if z not in (x, y) and v_related(fam, j, y, z, s) and not v_related(fam, j, x, z, s):
                    return x, y, z
    return None
