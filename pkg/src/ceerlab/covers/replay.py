"""Replay a covers trace and check witness separation, even coding and restraints."""
from __future__ import annotations

from ..kernel import DisjointSet, StageCeer, TimePoint
from ..trace import Checker, Report, TraceDocument
from .construction import CoversConstruction, parse_name

CHECKS = [
    "witnesses-separated",
    "witness-links-mirror-T",
    "witnesses-avoid-evens",
    "even-coding-reduction",
    "restraint-respect",
]


class CoversReplay:
    def __init__(self, header: dict) -> None:
        cfg = header.get("config", {})
        self.L = int(cfg.get("L", 1))
        self.rank = {n: i for i, n in enumerate(cfg.get("priority", []))}
        self.base = [tuple(t) for t in header.get("base", [])]
        self.T = StageCeer.from_triples(header.get("standin", []))
        self.uf = [DisjointSet() for _ in range(self.L)]
        self.evens: list[set[int]] = [set() for _ in range(self.L)]
        self.phase: dict[str, str] = {n: "initialized" for n in self.rank}
        self.params: dict[str, dict] = {n: {} for n in self.rank}
        self.restraints: dict[str, set[tuple[int, int]]] = {}
        self.allocated = int(cfg.get("initial_bound", 0))
        self.stage = 0
        self.time = TimePoint(0, 0)

    def _mention(self, *ns: int) -> None:
        for n in ns:
            if n > self.allocated:
                self.allocated = n

    def active(self) -> list[list[tuple[str, str, int]]]:
        """Per ceer: ``(requirement, role, number)`` for every active witness."""
        out: list[list[tuple[str, str, int]]] = [[] for _ in range(self.L)]
        for name, ph in self.phase.items():
            pr = self.params.get(name, {})
            req = parse_name(name)
            if req.kind == "ccr" and ph == "waiting":
                out[req.idx[0]].append((name, "z", pr["z"]))
            elif req.kind == "diag" and ph == "running":
                for i, v in enumerate(pr["a"]):
                    out[req.idx[1]].append((name, f"a{i}", v))
            elif req.kind == "diag" and ph == "satisfied":
                out[req.idx[2]].append((name, "c", pr["c"]))
                out[req.idx[2]].append((name, "d", pr["d"]))
        return out

    def _restrained_above(self, cause: str, l: int, x: int) -> str | None:
        mine = self.rank.get(cause)
        if mine is None:
            return None
        uf = self.uf[l]
        for owner, held in sorted(self.restraints.items()):
            if self.rank.get(owner, len(self.rank)) < mine:
                for ll, n in held:
                    if ll == l and uf.same(x, n):
                        return owner
        return None

    def apply(self, ev: dict, chk: Checker | None = None) -> None:
        kind = ev["kind"]
        self.time = TimePoint(*ev["time"])
        if kind == "stage":
            self.stage = ev["stage"]
        elif kind == "collapse":
            l = ev["ceer"]
            for a, b in ev["pairs"]:
                self._mention(a, b)
                if chk is not None and not self.uf[l].same(a, b):
                    for x in (a, b):
                        owner = self._restrained_above(ev["cause"], l, x)
                        if owner is not None:
                            chk.fail("restraint-respect",
                                     {"time": ev["time"], "ceer": l, "pair": [a, b], "restrained_by": owner},
                                     f"{ev['cause']} merged a class restrained by {owner}")
                            break
                self.uf[l].union(a, b)
                self.evens[l].update(n for n in (a, b) if n % 2 == 0)
        elif kind == "param-assign":
            self._mention(ev["value"])
        elif kind == "param-cancel":
            self.phase[ev["req"]] = "initialized"
            self.params[ev["req"]] = {}
        elif kind == "phase-change":
            self.phase[ev["req"]] = ev["phase"]
            self.params[ev["req"]] = dict(ev.get("params", {}))
        elif kind == "restraint":
            held = self.restraints.setdefault(ev["req"], set())
            pairs = {(ev["ceer"], n) for n in ev["numbers"]}
            if ev["action"] == "place":
                held |= pairs
                self._mention(*ev["numbers"])
            else:
                held -= pairs
        elif kind == "mention":
            self._mention(*ev["numbers"])
        if chk is not None and kind in ("collapse", "phase-change", "param-cancel"):
            self.check_now(chk)

    def check_now(self, chk: Checker) -> None:
        tnow = TimePoint.end_of(self.stage)
        for l, wits in enumerate(self.active()):
            uf = self.uf[l]
            even_roots = {uf.find(n) for n in self.evens[l]}
            by_root: dict[int, list[tuple[str, str, int]]] = {}
            for w in wits:
                root = uf.find(w[2])
                if root in even_roots or w[2] % 2 == 0:
                    chk.fail("witnesses-avoid-evens", {"time": self.time.as_list(), "ceer": l, "witness": list(w)},
                             "an active witness is related to an even number")
                by_root.setdefault(root, []).append(w)
            for group in by_root.values():
                for n, (r1, role1, x) in enumerate(group):
                    for r2, role2, y in group[n + 1:]:
                        if r1 != r2:
                            chk.fail("witnesses-separated",
                                     {"time": self.time.as_list(), "ceer": l, "pair": [[r1, role1, x], [r2, role2, y]]},
                                     "active witnesses of different requirements are related")
                        elif not (role1[0] == role2[0] == "a"
                                  and self.T.related(int(role1[1:]), int(role2[1:]), tnow)):
                            chk.fail("witness-links-mirror-T",
                                     {"time": self.time.as_list(), "ceer": l, "pair": [[r1, role1, x], [r2, role2, y]]},
                                     "related witnesses of one requirement are not T-linked a's")

    def check_stage_end(self, chk: Checker) -> None:
        if not self.stage:
            return
        base, touched = DisjointSet(), set()
        for x, y, t in self.base:
            if t <= self.stage:
                base.union(x, y)
                touched |= {x, y}
        for l, uf in enumerate(self.uf):
            by_e: dict[int, int] = {}
            by_a: dict[int, int] = {}
            for x in sorted(touched | {n // 2 for n in self.evens[l]}):
                re_, ra = uf.find(2 * x), base.find(x)
                y = by_e.setdefault(re_, x)
                z = by_a.setdefault(ra, x)
                if base.find(y) != ra or uf.find(2 * z) != re_:
                    other = y if base.find(y) != ra else z
                    chk.fail("even-coding-reduction", {"stage": self.stage, "ceer": l, "pair": [other, x]},
                             f"2x ~ 2y in E_{l} disagrees with x ~ y in the base ceer")
                    break

    def summary(self) -> dict:
        return {
            "stage": self.stage,
            "allocated_max": self.allocated,
            "requirements": [{"req": n, "phase": self.phase[n], "params": self.params[n]} for n in self.rank],
            "restraints": sorted([o, l, n] for o, held in self.restraints.items() for l, n in held),
            "classes": [uf.nontrivial_classes() for uf in self.uf],
        }


def _doc(state) -> TraceDocument:
    return state.document() if isinstance(state, CoversConstruction) else state


def verify(state) -> Report:
    doc = _doc(state)
    rp = CoversReplay(doc.header)
    chk = Checker(CHECKS)
    for ev in doc.events:
        if ev["kind"] == "stage":
            rp.check_stage_end(chk)
        rp.apply(ev, chk)
    rp.check_stage_end(chk)
    return chk.report()


def replay(doc: TraceDocument, until: TimePoint | None = None) -> CoversReplay:
    rp = CoversReplay(doc.header)
    for ev in doc.events:
        if until is not None and TimePoint(*ev["time"]) > until:
            break
        rp.apply(ev)
    return rp


def diagonal_outcome(doc: TraceDocument, req: str) -> dict:
    """Final-stage view of a diag requirement: its witnesses split ``E_l`` from ``E_l2``."""
    rp = replay(doc)
    r = parse_name(req)
    j, l, l2 = r.idx
    pr = rp.params.get(req, {})
    if rp.phase.get(req) != "satisfied":
        return {"req": req, "phase": rp.phase.get(req), "holds": False}
    a, i, k = pr["a"], pr["i"], pr["k"]
    in_l = rp.uf[l].same(a[i], a[k])
    in_l2 = rp.uf[l2].same(a[i], a[k])
    images_l2 = rp.uf[l2].same(pr["c"], pr["d"])
    return {
        "req": req, "phase": "satisfied", "a_i": a[i], "a_k": a[k], "c": pr["c"], "d": pr["d"],
        "related_in_l": in_l, "related_in_l2": in_l2, "images_related_in_l2": images_l2,
        "holds": in_l and not images_l2,
    }
