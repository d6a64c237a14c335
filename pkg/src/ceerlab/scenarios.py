"""Shipped oracle families and base-ceer files used by the CLI and the tests."""
from __future__ import annotations

import json
from pathlib import Path

from .oracles import FixtureError, OracleFamily, make_family, pair

TABLE_SIZE = 1000


def join_family(name: str) -> OracleFamily:
    """``empty``: one function defined nowhere; ``successor`` and ``identity`` converge at stage 1."""
    if name == "empty":
        return make_family("empty", [[]])
    if name == "successor":
        return make_family("successor", [[(x, x + 1, 1) for x in range(TABLE_SIZE)]])
    if name == "identity":
        return make_family("identity", [[(x, x, 1) for x in range(TABLE_SIZE)]])
    raise KeyError(f"no shipped join family {name!r}")


def covers_family(name: str) -> OracleFamily:
    if name == "empty":
        return make_family("empty", [[]], [[]])
    if name == "identity":
        return make_family("identity", [[(x, x, 1) for x in range(TABLE_SIZE)]], [[]])
    if name == "double":
        return make_family("double", [[(x, 2 * x, 1) for x in range(TABLE_SIZE)]], [[]])
    if name == "pairs":
        # W_0 separates 3 from 5 early and later both from 41; pair(3, 5) = 41 and
        # 43, 45 double as odd singletons for sf
        w0 = [(pair(3, 5), 2), (pair(3, 41), 9), (pair(5, 41), 9), (43, 5), (45, 6)]
        w0 += [(pair(0, x), x) for x in range(20, 60)]
        return make_family("pairs", [[(x, x + 2, 3) for x in range(TABLE_SIZE)]], [w0])
    raise KeyError(f"no shipped covers family {name!r}")


JOIN_FAMILIES = ("empty", "successor", "identity")
COVERS_FAMILIES = ("empty", "identity", "double", "pairs")


def ceer_from_dict(doc) -> list[tuple[int, int, int]]:
    if isinstance(doc, dict):
        rows = doc.get("collapses")
    else:
        rows = doc
    if not isinstance(rows, list):
        raise FixtureError("ceer document needs a 'collapses' list of [x, y, stage]")
    for r in rows:
        if not (isinstance(r, list) and len(r) == 3 and all(isinstance(v, int) and v >= 0 for v in r)):
            raise FixtureError(f"collapse row {r!r} is not three naturals")
    return [tuple(r) for r in rows]


def load_ceer(path: str | Path) -> list[tuple[int, int, int]]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read ceer {path}: {exc}") from exc
    return ceer_from_dict(doc)


def table_from_dict(doc) -> list[tuple[int, int, int]]:
    """Reduction tables use the partial-function row format ``[x, value, stage]``."""
    rows = doc.get("rows") if isinstance(doc, dict) else doc
    if not isinstance(rows, list):
        raise FixtureError("table document needs a 'rows' list of [x, value, stage]")
    seen = set()
    for r in rows:
        if not (isinstance(r, list) and len(r) == 3 and all(isinstance(v, int) and v >= 0 for v in r)):
            raise FixtureError(f"table row {r!r} is not three naturals")
        if r[0] in seen:
            raise FixtureError(f"table lists input {r[0]} twice")
        seen.add(r[0])
    return [tuple(r) for r in rows]


def load_table(path: str | Path) -> list[tuple[int, int, int]]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read table {path}: {exc}") from exc
    return table_from_dict(doc)
