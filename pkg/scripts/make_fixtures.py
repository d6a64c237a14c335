"""Regenerate everything under fixtures/.

    python3 scripts/make_fixtures.py

Mutation traces are built by appending or editing events in a reference
trace; each one is kept only if exactly its target check fails.
"""
from __future__ import annotations

import copy
import json
from pathlib import Path

from ceerlab import covers, join, scenarios
from ceerlab.cli import replay_summary, verify_document
from ceerlab.oracles import make_family, pair, validate_family
from ceerlab.trace import TraceDocument

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


# -- families and ceers --------------------------------------------------------

def _valid(fam):
    verdict = validate_family(fam)
    if verdict.failed:
        raise SystemExit(f"family {fam.name} does not validate: {verdict.reason}")
    return fam.to_dict()


def write_families() -> None:
    for name in scenarios.JOIN_FAMILIES:
        dump(ROOT / "families" / f"join-{name}.json", _valid(scenarios.join_family(name)))
    for name in scenarios.COVERS_FAMILIES:
        dump(ROOT / "families" / f"covers-{name}.json", _valid(scenarios.covers_family(name)))
    dump(ROOT / "families" / "covers-ccr-wait.json", _valid(ccr_wait_family()))
    dump(ROOT / "families" / "malformed-duplicate.json",
         {"name": "dup", "phis": [[0, 1, 2, 1], [0, 1, 3, 2]], "wes": []})


def ccr_wait_family():
    # W_0 separates 1 from 3 and nothing else, so a ccr witness waits forever
    return make_family("ccr-wait", [[]], [[(pair(1, 3), 1)]])


def write_ceers() -> None:
    dump(ROOT / "ceers" / "identity.json", {"name": "identity", "collapses": []})
    dump(ROOT / "ceers" / "base-small.json", {"name": "base-small", "collapses": [[0, 1, 3], [2, 5, 7], [5, 9, 12]]})
    dump(ROOT / "ceers" / "standin-small.json", {"name": "standin-small", "collapses": [[0, 2, 5], [1, 3, 9]]})


# -- reference traces ----------------------------------------------------------

def write_reference_traces() -> None:
    doc = join.JoinConstruction(scenarios.join_family("successor")).run(200).document()
    (ROOT / "traces").mkdir(parents=True, exist_ok=True)
    doc.write(ROOT / "traces" / "join-successor-200.json")
    doc = covers.CoversConstruction([], [], scenarios.covers_family("identity"), 2).run(200).document()
    doc.write(ROOT / "traces" / "covers-identity-200.json")


# -- mutations -----------------------------------------------------------------

def _append(doc: TraceDocument, events: list[dict]) -> TraceDocument:
    out = TraceDocument(copy.deepcopy(doc.header), copy.deepcopy(doc.events), {})
    t = out.events[-1]["time"]
    for n, ev in enumerate(events, start=1):
        out.events.append({"time": [t[0], t[1] + n], **ev})
    out.summary = replay_summary(out)
    return out


def _only(doc: TraceDocument, target: str) -> bool:
    return verify_document(doc).failed() == [target]


def _first(target: str, candidates) -> TraceDocument:
    for doc in candidates:
        if _only(doc, target):
            return doc
    raise SystemExit(f"no mutation isolates {target}")


def join_mutations() -> dict[str, TraceDocument]:
    succ = join.JoinConstruction(scenarios.join_family("successor")).run(200).document()
    rp = join.replay(succ)
    images = sorted(rp.pre)
    top = rp.allocated
    out = {}

    def disjoint():
        for r in rp.phase:
            if rp.phase[r] != "satisfied":
                continue
            side = r[0]
            for v in images:
                if v % 2 == "XY".index(side):
                    params = dict(rp.params[r], w=v // 2)
                    yield _append(succ, [{"kind": "phase-change", "req": r, "phase": "await-partner", "params": params}])

    out["active-sets-disjoint"] = _first("active-sets-disjoint", disjoint())

    def images_rel():
        for stages in range(200, 240):
            doc = join.JoinConstruction(scenarios.join_family("identity")).run(stages).document()
            rp2 = join.replay(doc)
            for a in sorted(set(rp2.D.values()) | set(rp2.E.values())):
                for v in sorted(rp2.pre):
                    if v % 2 == a % 2:
                        yield _append(doc, [{"kind": "collapse", "cause": "injected", "pairs": [[a, v]], "merged": [[a, v]]}])

    out["related-active-are-images"] = _first("related-active-are-images", images_rel())
    out["no-cross-parity-collapse"] = _first("no-cross-parity-collapse", iter([
        _append(succ, [{"kind": "collapse", "cause": "injected", "pairs": [[top + 1, top + 2]], "merged": [[top + 1, top + 2]]}])
    ]))
    out["reduction-omits-zero-class"] = _first("reduction-omits-zero-class", (
        _append(succ, [{"kind": "collapse", "cause": "injected", "pairs": [[0, v]], "merged": [[0, v]]}])
        for v in images if v % 2 == 0
    ))
    out["single-actor"] = _first("single-actor", iter([
        _append(succ, [{"kind": "act", "req": "X(0,0)", "trigger": "injected"}])
    ]))

    def retag():
        for idx in range(len(succ.events) - 1, 0, -1):
            ev = succ.events[idx]
            if ev["kind"] == "f-extend" and ev["mode"] == "extend":
                doc = TraceDocument(copy.deepcopy(succ.header), copy.deepcopy(succ.events), {})
                bad = top + 1 if (top + 1) % 2 != ev["value"] % 2 else top + 2
                doc.events[idx]["value"] = bad
                doc.summary = replay_summary(doc)
                yield doc

    out["tag-respect"] = _first("tag-respect", retag())
    return out


def covers_mutations() -> dict[str, TraceDocument]:
    base = covers.CoversConstruction([], [], ccr_wait_family(), 3).run(60).document()
    rp = covers.replay(base)
    top = rp.allocated
    act = rp.active()
    diag = [w for w in act[0] if w[0].startswith("diag")]
    ccr = [w for w in act[0] if w[0].startswith("ccr")]
    odd = top + 1 if (top + 1) % 2 else top + 2
    even = odd + 1
    first_diag = diag[0][0]
    other = next(w for w in diag if w[0] != first_diag)
    own = [w for w in diag if w[0] == first_diag]
    lowest = base.header["config"]["priority"][-1]

    def collapse(l, a, b, cause="injected"):
        return {"kind": "collapse", "ceer": l, "cause": cause, "pairs": [[a, b]], "merged": [[a, b]]}

    return {
        "witnesses-separated": _first("witnesses-separated", iter([_append(base, [collapse(0, own[0][2], other[2])])])),
        "witness-links-mirror-T": _first("witness-links-mirror-T", iter([_append(base, [collapse(0, own[0][2], own[1][2])])])),
        "witnesses-avoid-evens": _first("witnesses-avoid-evens", iter([_append(base, [collapse(0, ccr[0][2], even)])])),
        "even-coding-reduction": _first("even-coding-reduction", iter([_append(base, [collapse(0, even, even + 2)])])),
        "restraint-respect": _first("restraint-respect", iter([_append(base, [collapse(0, ccr[0][2], odd, lowest)])])),
    }


def write_mutations() -> None:
    (ROOT / "mutations").mkdir(parents=True, exist_ok=True)
    for check, doc in join_mutations().items():
        doc.write(ROOT / "mutations" / f"join-{check}.json")
    for check, doc in covers_mutations().items():
        doc.write(ROOT / "mutations" / f"covers-{check}.json")


# -- genuine reductions for the tau-word pipeline -------------------------------
# A map f0 on codes of Id (+) Id that is injective is a reduction.  Lifting it
# to blocks of two (n ~ m iff n // 2 == m // 2 on both sides) keeps it one.

def f_split(c: int) -> int:
    # 0 fixed; 2n -> 4n+1 and 2y+1 -> 4y+3, so every other orbit turns odd at once
    return 0 if c == 0 else 2 * c + 1


def f_mixed(c: int) -> int:
    return {0: 2 * c, 2: 2 * c - 3, 1: 2 * c + 3, 3: 2 * c}[c % 4]


def f_swap(c: int) -> int:
    if c % 2 == 1:
        return c
    return 2 * ((c // 2) ^ 1)


BASE_MAPS = {"split": f_split, "mixed": f_mixed, "swap": f_swap}


def lift(f0, block: int = 2):
    """Act on block indices, sending every member of a block to the block's first member."""
    def f(c: int) -> int:
        side, u = c % 2, c // 2
        d = f0(2 * (u // block) + side)
        return 2 * ((d // 2) * block) + d % 2
    return f


def orbit_table(f, sample: list[int], depth: int, block: int) -> list[list[int]]:
    seen: set[int] = set()
    frontier = []
    for n in sample:
        for c in (2 * n, 2 * n + 1):
            u, side = c // 2, c % 2
            frontier += [2 * (block * (u // block) + b) + side for b in range(block)]
    for _ in range(depth):
        nxt = []
        for c in frontier:
            if c in seen:
                continue
            seen.add(c)
            nxt.append(f(c))
        frontier = nxt
    return [[c, f(c), 1] for c in sorted(seen)]


def write_reductions() -> None:
    sample = list(range(8))
    for name, f0 in BASE_MAPS.items():
        for block in (1, 2):
            f = lift(f0, block) if block > 1 else f0
            dump(ROOT / "reductions" / f"{name}-b{block}.json", {
                "name": f"{name}-b{block}",
                "x_block": block,
                "y_block": block,
                "sample": sample,
                "horizon": 6,
                "rows": orbit_table(f, sample, 16, block),
            })
    # tiny table from the two-step example, for the cli
    dump(ROOT / "reductions" / "two-step.json", {"name": "two-step", "rows": [[1, 2, 1], [2, 5, 1]]})
    dump(ROOT / "reductions" / "mixed-b1.expected.json", mixed_expected(sample, 6))


def mixed_expected(sample: list[int], h: int) -> dict:
    """Closed forms for f_mixed with no iteration beyond N1 = 1, N2 = 2.

    Codes 4m stay 0 mod 4 (word X...X); codes 4m+2 go to 1 mod 4 and stay odd
    (word XY...Y).  f2 = f o f: f2(4m) = 16m, f2(4m+1) = 16m+13, f2(4m+3) = 16m+9.
    """
    tau = {n: ("X" * h if n % 2 == 0 else "X" + "Y" * (h - 1)) for n in sample}
    return {
        "horizon": h,
        "tau": {str(n): w for n, w in tau.items()},
        "periods": {str(n): ([0, 1] if n % 2 == 0 else [1, 1]) for n in sample},
        "N1": 1,
        "N2": 2,
        "tau_f2": {str(n): w for n, w in tau.items()},
        "cx": [2 * n for n in sample if n % 2 == 0],
        "cy": [2 * n for n in sample if n % 2 == 1],
        "undecided": [],
        "g_from_cx": sorted([n, 4 * n if n % 2 == 0 else n] for n in sample),
        "g_from_cx_omitted": [],
        "g_onto_y": sorted([n, 4 * n + 6 if n % 2 == 0 else 4 * n] for n in sample),
        "g_onto_y_omitted": [],
        "g_onto_y_violations": [],
    }


def main() -> None:
    write_families()
    write_ceers()
    write_reference_traces()
    write_mutations()
    write_reductions()
    print(f"fixtures written under {ROOT}")


if __name__ == "__main__":
    main()
