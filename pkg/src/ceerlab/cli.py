"""Command-line front door: run constructions, verify traces, analyze tables, validate fixtures.

Exit codes: 0 ok, 1 verification failure, 2 fixture error, 3 config error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import covers, hsf, join, scenarios
from .algebra import ReductionTable
from .oracles import FixtureError, OracleFamily, family_from_dict, load_family, validate_family
from .trace import TraceDocument

OK, VERIFY_FAILED, FIXTURE_ERROR, CONFIG_ERROR = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str
    family_path: str | None = None
    family_name: str | None = None
    base_ceer_path: str | None = None
    universal_ceer_path: str | None = None
    stages: int = 100
    L: int = 2
    horizon: int = 16
    j_max: int | None = None
    i_max: int | None = None
    k_max: int | None = None
    free_parity: str = "odd"
    output_path: str | None = None

    def check(self) -> None:
        for name in ("stages", "horizon", "j_max", "i_max", "k_max"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.L < 1:
            raise ConfigError("L must be >= 1")
        if self.free_parity not in ("odd", "even"):
            raise ConfigError("free_parity must be odd or even")


def _family(cfg: RunConfig, shipped) -> OracleFamily:
    if cfg.family_path:
        fam = load_family(cfg.family_path)
    else:
        try:
            fam = shipped(cfg.family_name or "empty")
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    verdict = validate_family(fam)
    if verdict.failed:
        raise FixtureError(f"family does not validate: {verdict.reason}")
    for bound, seq, what in ((cfg.j_max, fam.phis, "j_max"), (cfg.i_max, fam.wes, "i_max")):
        if bound is not None and bound >= len(seq):
            raise ConfigError(f"{what}={bound} exceeds the family ({len(seq)} entries)")
    phis = fam.phis if cfg.j_max is None else fam.phis[: cfg.j_max + 1]
    wes = fam.wes if cfg.i_max is None else fam.wes[: cfg.i_max + 1]
    return OracleFamily(phis, wes, fam.name)


def build(cfg: RunConfig) -> TraceDocument:
    cfg.check()
    if cfg.scenario == "join":
        fam = _family(cfg, scenarios.join_family)
        if not fam.phis:
            raise ConfigError("the join construction needs at least one function")
        state = join.JoinConstruction(fam, k_max=cfg.k_max, free_parity=cfg.free_parity)
    elif cfg.scenario == "covers":
        fam = _family(cfg, scenarios.covers_family)
        base = scenarios.load_ceer(cfg.base_ceer_path) if cfg.base_ceer_path else []
        standin = scenarios.load_ceer(cfg.universal_ceer_path) if cfg.universal_ceer_path else []
        state = covers.CoversConstruction(base, standin, fam, cfg.L, k_max=3 if cfg.k_max is None else cfg.k_max)
    else:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    return state.run(cfg.stages).document()


def replay_summary(doc: TraceDocument) -> dict:
    scenario = doc.header.get("scenario")
    if scenario == "join":
        return join.replay(doc).summary()
    if scenario == "covers":
        return covers.replay(doc).summary()
    raise FixtureError(f"trace has unknown scenario {scenario!r}")


def verify_document(doc: TraceDocument):
    scenario = doc.header.get("scenario")
    if scenario == "join":
        return join.verify(doc)
    if scenario == "covers":
        return covers.verify(doc)
    raise FixtureError(f"trace has unknown scenario {scenario!r}")


def parse_sample(text: str) -> list[int]:
    """``"0-9"``, ``"0,2,5"`` or a mix such as ``"0-3,8"``."""
    out: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                out.update(range(lo, hi + 1))
            elif part:
                out.add(int(part))
    except ValueError as exc:
        raise ConfigError(f"bad sample {text!r}") from exc
    if any(n < 0 for n in out):
        raise ConfigError("sample numbers must be >= 0")
    return sorted(out)


def analyze_table(rows, sample: list[int], horizon: int) -> dict:
    table = ReductionTable({x: v for x, v, _ in rows})
    return hsf.analyze(table, sample, horizon).to_dict()


# -- subcommands ---------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = RunConfig(
        scenario=args.scenario, family_path=args.family, family_name=args.family_name,
        base_ceer_path=args.base_ceer, universal_ceer_path=args.universal_ceer,
        stages=args.stages, L=args.L, horizon=args.horizon, j_max=args.j_max, i_max=args.i_max,
        k_max=args.k_max, free_parity=args.free_parity, output_path=args.output,
    )
    if cfg.scenario == "hsf":
        if not args.table:
            raise ConfigError("the hsf scenario needs --table")
        cfg.check()
        report = analyze_table(scenarios.load_table(args.table), parse_sample(args.sample), cfg.horizon)
        text = json.dumps(report, sort_keys=True, indent=1) + "\n"
        _write(text, cfg.output_path)
        return OK
    doc = build(cfg)
    _write(doc.dumps(), cfg.output_path)
    return OK


def cmd_verify(args) -> int:
    doc = TraceDocument.read(args.trace)
    report = verify_document(doc)
    lines = report.lines()
    same = not doc.summary or replay_summary(doc) == doc.summary
    lines.append("PASS summary-replay" if same else "FAIL summary-replay: replayed state differs from the summary")
    print("\n".join(lines))
    return OK if report.ok and same else VERIFY_FAILED


def cmd_analyze(args) -> int:
    if args.horizon < 1:
        raise ConfigError("horizon must be >= 1")
    report = analyze_table(scenarios.load_table(args.table), parse_sample(args.sample), args.horizon)
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    _write(text, args.output)
    if args.expected:
        try:
            expected = json.loads(Path(args.expected).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"cannot read expected report: {exc}") from exc
        if expected != report:
            diff = sorted(k for k in set(expected) | set(report) if expected.get(k) != report.get(k))
            print(f"FAIL analyze: report differs from {args.expected} in {diff}", file=sys.stderr)
            return VERIFY_FAILED
    return OK


def cmd_validate(args) -> int:
    status = OK
    if args.family:
        verdict = validate_family(load_family(args.family))
        for w in verdict.warnings:
            print(f"WARN {w}")
        if verdict.failed:
            print(f"FAIL family: {verdict.reason} witness={verdict.witness!r}")
            status = FIXTURE_ERROR
        else:
            print("PASS family")
    for label, path, loader in (("base ceer", args.base_ceer, scenarios.load_ceer),
                                ("stand-in ceer", args.universal_ceer, scenarios.load_ceer),
                                ("table", args.table, scenarios.load_table)):
        if path:
            loader(path)
            print(f"PASS {label}")
    if args.trace:
        TraceDocument.read(args.trace)
        print("PASS trace")
    if not any((args.family, args.base_ceer, args.universal_ceer, args.table, args.trace)):
        raise ConfigError("validate needs at least one of --family, --base-ceer, --universal-ceer, --table, --trace")
    return status


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ceerlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a construction and write its trace")
    run.add_argument("--scenario", choices=["join", "covers", "hsf"], required=True)
    run.add_argument("--family", help="oracle family JSON file")
    run.add_argument("--family-name", help="shipped family: " + ", ".join(
        sorted(set(scenarios.JOIN_FAMILIES) | set(scenarios.COVERS_FAMILIES))))
    run.add_argument("--base-ceer", help="base ceer A as collapse triples (covers)")
    run.add_argument("--universal-ceer", help="stand-in ceer T as collapse triples (covers)")
    run.add_argument("--stages", type=int, default=100)
    run.add_argument("--L", type=int, default=2, help="number of ceers to build (covers)")
    run.add_argument("--horizon", type=int, default=16, help="word length (hsf)")
    run.add_argument("--table", help="reduction table (hsf)")
    run.add_argument("--sample", default="0-15", help="sample of n, e.g. 0-15 (hsf)")
    run.add_argument("--j-max", type=int, help="use functions 0..j_max only")
    run.add_argument("--i-max", type=int, help="use c.e. sets 0..i_max only")
    run.add_argument("--k-max", type=int, help="class bound for requirements")
    run.add_argument("--free-parity", default="odd", help="parity of f-images of untagged numbers (join)")
    run.add_argument("--output", "-o", help="output file (default stdout)")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="replay a trace and check its invariants")
    ver.add_argument("trace")
    ver.set_defaults(func=cmd_verify)

    ana = sub.add_parser("analyze", help="tau-words, periods and induced maps of a reduction table")
    ana.add_argument("--table", required=True)
    ana.add_argument("--sample", default="0-15")
    ana.add_argument("--horizon", type=int, default=16)
    ana.add_argument("--expected", help="compare against a committed report")
    ana.add_argument("--output", "-o")
    ana.set_defaults(func=cmd_analyze)

    val = sub.add_parser("validate", help="check fixture files")
    val.add_argument("--family")
    val.add_argument("--base-ceer")
    val.add_argument("--universal-ceer")
    val.add_argument("--table")
    val.add_argument("--trace")
    val.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except IndexError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except FixtureError as exc:
        print(f"fixture error: {exc}", file=sys.stderr)
        return FIXTURE_ERROR


if __name__ == "__main__":
    sys.exit(main())
