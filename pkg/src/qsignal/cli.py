"""Command-line front end.

    qsignal normal-form [--classical|--quantum] SPEC
    qsignal nash        [--classical|--quantum] SPEC
    qsignal pbe         [--classical|--quantum] [--profile T2,T3,T4,T5] SPEC
    qsignal state       --profile T2,T3,T4,T5 SPEC
    qsignal classify    SPEC

Exit codes: 0 success, 2 spec or usage error, 3 numeric invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import __version__
from . import classical as cl
from .hilbert import InvariantViolation, psi_amplitudes
from .qpbe import q_pbe, sequential_rationality_q
from .qsignaling import GRID_LABELS, QProfile, q_final_state, q_normal_form, q_payoffs, q_pure_nash
from .search import fmt_angle
from .specfile import GameSpecFile, SpecError, load, parse_number

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("normal-form", "nash", "pbe", "state", "classify")
QUANTUM_ONLY = ("state", "classify")


def _round(obj):
    """Round every float to 15 significant digits; NaN becomes null."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.15g}") + 0.0
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _theta_label(thetas) -> str:
    return ",".join(fmt_angle(t) for t in thetas)


def _qprofile_json(prof: QProfile) -> dict:
    return {"profile": str(prof), "thetas": list(prof.thetas)}


def _bimatrix_json(g: cl.StrategicForm, rows, cols) -> dict:
    return {"rows": list(rows), "cols": list(cols), "payoffs": g.payoffs.tolist()}


# -- report builders ---------------------------------------------------------


def report_normal_form(gs: GameSpecFile, sides) -> dict:
    out = {}
    if "classical" in sides:
        g = cl.normal_form(gs.classical_spec())
        out["classical"] = _bimatrix_json(g, g.rows, g.cols)
    if "quantum" in sides:
        g = q_normal_form(gs.quantum_config())
        labels = [_theta_label(t) for t in GRID_LABELS]
        out["quantum"] = _bimatrix_json(g, labels, labels)
    return out


def report_nash(gs: GameSpecFile, sides) -> dict:
    out = {}
    if "classical" in sides:
        spec = gs.classical_spec()
        out["classical"] = [
            {"profile": p.label, "payoffs": list(cl.profile_payoffs(spec, p))} for p in cl.nash_profiles(spec)
        ]
    if "quantum" in sides:
        cfg = gs.quantum_config()
        out["quantum"] = [
            {**_qprofile_json(p), "payoffs": list(q_payoffs(cfg, p))} for p in q_pure_nash(cfg)
        ]
    return out


def _verdict_json(v) -> dict:
    return {
        "info_set": v.info_set,
        "on_path": v.on_path,
        "reach": v.reach,
        "beliefs": list(v.weights),
        "achieved": v.achieved_value,
        "max": v.max_value,
        "gap": v.gap,
        "passed": v.passed,
        "argmax": v.argmax_witness,
    }


def report_pbe(gs: GameSpecFile, sides, profile: QProfile | None = None) -> dict:
    out = {}
    if "classical" in sides:
        spec = gs.classical_spec()
        rows = []
        for prof in cl.all_profiles():
            c = cl.analyze_pbe(spec, prof)
            chosen = c.assessment
            rows.append({
                "profile": prof.label,
                "accepted": c.accepted,
                "consistent_beliefs": list(c.beliefs),
                "witness_beliefs": [chosen.b1, chosen.b2] if chosen else None,
                "verdicts": {
                    h: {"action": v.action, "values": v.values, "passed": v.passed}
                    for h, v in c.verdicts.items()
                },
                "free_sets": {
                    s: {str(b): {"values": v.values, "passed": v.passed} for b, v in vv.items()}
                    for s, vv in c.vertex_verdicts.items()
                },
            })
        out["classical"] = rows
    if "quantum" in sides:
        cfg = gs.quantum_config()
        profiles = [profile] if profile is not None else q_pure_nash(cfg)
        out["quantum"] = []
        for prof in profiles:
            verdicts = sequential_rationality_q(cfg, prof, gs.scope, gs.grid, gs.tol, gs.su2_grid)
            out["quantum"].append({
                **_qprofile_json(prof),
                "rational": all(v.passed for v in verdicts),
                "verdicts": [_verdict_json(v) for v in verdicts],
            })
    return out


def report_state(gs: GameSpecFile, profile: QProfile) -> dict:
    final = q_final_state(gs.quantum_config(), profile)
    terms = [
        {"label": lab, "re": a.real, "im": a.imag, "prob": abs(a) ** 2}
        for lab, a in psi_amplitudes(final, tol=1e-12)
    ]
    return {"quantum": {**_qprofile_json(profile), "terms": terms}}


def report_classify(gs: GameSpecFile) -> dict:
    rep = q_pbe(gs.quantum_config(), gs.scope, gs.grid, gs.tol)
    rows = [
        {
            **_qprofile_json(e.profile),
            "payoffs": list(e.payoffs),
            "nash": e.is_nash,
            "rational": e.rational,
            "class": e.kind,
            "off_path": list(e.off_path_sets),
        }
        for e in rep.entries
    ]
    return {
        "quantum": {
            "profiles": rows,
            "pbe": [str(p) for p in rep.pbe],
            "exploratory": {
                "note": "sequentially-type rational profiles that are not Nash equilibria",
                "profiles": [str(p) for p in rep.exploratory],
            },
        }
    }


# -- table rendering ----------------------------------------------------------


def _f(x, digits=6) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "-"
    return f"{x:.{digits}g}"


def _table_bimatrix(title, block) -> list[str]:
    cells = [[f"({_f(u1)}, {_f(u2)})" for u1, u2 in row] for row in block["payoffs"]]
    width = max(max(len(c) for row in cells for c in row), max(len(c) for c in block["cols"]))
    lw = max(len(r) for r in block["rows"])
    lines = [title, " " * lw + "  " + "  ".join(c.rjust(width) for c in block["cols"])]
    for r, row in zip(block["rows"], cells):
        lines.append(r.ljust(lw) + "  " + "  ".join(c.rjust(width) for c in row))
    return lines


def render_table(command: str, report: dict) -> str:
    lines = []
    if command == "normal-form":
        for side in ("classical", "quantum"):
            if side in report:
                lines += _table_bimatrix(f"{side} normal form", report[side]) + [""]
    elif command == "nash":
        for side in ("classical", "quantum"):
            if side in report:
                lines.append(f"{side} pure Nash equilibria")
                for e in report[side]:
                    lines.append(f"  {e['profile']:<16} ({_f(e['payoffs'][0])}, {_f(e['payoffs'][1])})")
                lines.append("")
    elif command == "pbe":
        if "classical" in report:
            lines.append("classical weak PBE")
            for e in report["classical"]:
                status = "accepted" if e["accepted"] else "rejected"
                wb = e["witness_beliefs"]
                beliefs = f"b1={_f(wb[0])} b2={_f(wb[1])}" if wb else ""
                lines.append(f"  {e['profile']:<6} {status:<9} {beliefs}")
                for h, v in e["verdicts"].items():
                    if not v["passed"]:
                        vals = " ".join(f"{a}={_f(x)}" for a, x in v["values"].items())
                        lines.append(f"         {h}: {v['action']} suboptimal ({vals})")
                for s, vv in e["free_sets"].items():
                    if not any(x["passed"] for x in vv.values()):
                        lines.append(f"         {s}: no belief in [0,1] supports the prescribed action")
            lines.append("")
        if "quantum" in report:
            lines.append("quantum sequential-type rationality")
            for e in report["quantum"]:
                lines.append(f"  {e['profile']}  {'rational' if e['rational'] else 'not rational'}")
                for v in e["verdicts"]:
                    if not v["on_path"]:
                        lines.append(f"    {v['info_set']:<6} off-path (vacuous pass)")
                        continue
                    beliefs = ",".join(_f(b) for b in v["beliefs"])
                    lines.append(
                        f"    {v['info_set']:<6} beliefs=({beliefs}) achieved={_f(v['achieved'], 10)} "
                        f"max={_f(v['max'], 10)} {'pass' if v['passed'] else 'FAIL'} argmax={v['argmax']}"
                    )
            lines.append("")
    elif command == "state":
        q = report["quantum"]
        lines.append(f"final state for profile {q['profile']}")
        for t in q["terms"]:
            lines.append(f"  Psi_{t['label']}  {_f(t['re'], 8):>12} {_f(t['im'], 8):>12}i  |amp|^2={_f(t['prob'], 8)}")
    elif command == "classify":
        q = report["quantum"]
        lines.append(f"{'profile':<14} {'payoffs':<18} {'nash':<5} {'rational':<8} class")
        for e in q["profiles"]:
            pay = f"({_f(e['payoffs'][0])}, {_f(e['payoffs'][1])})"
            extra = f"  off-path: {','.join(e['off_path'])}" if e["off_path"] else ""
            lines.append(f"{e['profile']:<14} {pay:<18} {str(e['nash']):<5} {str(e['rational']):<8} {e['class']}{extra}")
        lines.append("")
        lines.append("exploratory (" + q["exploratory"]["note"] + "): " + (", ".join(q["exploratory"]["profiles"]) or "none"))
    return "\n".join(lines).rstrip() + "\n"


# -- entry point ---------------------------------------------------------------


def parse_profile(text: str) -> QProfile:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"--profile needs four angles theta2,theta3,theta4,theta5, got {text!r}")
    return QProfile.from_thetas(*(parse_number(p.replace("π", "pi")) for p in parts))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsignal", description="Classical and quantum signaling game analysis.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("spec", help="game spec file (TOML), or @paper for the bundled example")
    side = ap.add_mutually_exclusive_group()
    side.add_argument("--classical", action="store_true", help="classical game only")
    side.add_argument("--quantum", action="store_true", help="quantum scheme only")
    ap.add_argument("--format", choices=("table", "json"), default="table")
    ap.add_argument("--grid", type=int, help="theta grid points for best-response search")
    ap.add_argument("--tol", type=float, help="optimality tolerance")
    ap.add_argument("--scope", choices=("pair", "single"), help="deviation scope at each information set")
    ap.add_argument("--profile", help="player angles theta2,theta3,theta4,theta5 (e.g. 0,0,pi,pi)")
    return ap


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    sides = ("classical",) if args.classical else ("quantum",) if args.quantum else ("classical", "quantum")
    try:
        gs = load(args.spec)
        overrides = {k: getattr(args, k) for k in ("grid", "tol", "scope") if getattr(args, k) is not None}
        if overrides:
            if overrides.get("grid", 3) < 3 or overrides.get("tol", 1.0) <= 0:
                raise SpecError("--grid must be >= 3 and --tol positive", field="flags")
            gs = GameSpecFile(**{**gs.__dict__, **overrides})
        profile = None
        if args.profile is not None:
            try:
                profile = parse_profile(args.profile)
            except ValueError as e:
                raise SpecError(str(e), field="--profile") from None
        if args.command in QUANTUM_ONLY and args.classical:
            raise SpecError(f"{args.command} is only defined for the quantum scheme", field="--classical")
        if args.command == "normal-form":
            report = report_normal_form(gs, sides)
        elif args.command == "nash":
            report = report_nash(gs, sides)
        elif args.command == "pbe":
            report = report_pbe(gs, sides, profile)
        elif args.command == "state":
            if profile is None:
                raise SpecError("state needs --profile", field="--profile")
            report = report_state(gs, profile)
        else:
            report = report_classify(gs)
    except SpecError as e:
        print(f"qsignal: {e}", file=err)
        return EXIT_SPEC
    except ValueError as e:
        print(f"qsignal: {e}", file=err)
        return EXIT_SPEC
    except InvariantViolation as e:
        print(f"qsignal: numeric invariant violated: {e}", file=err)
        return EXIT_NUMERIC

    if args.format == "json":
        doc = {"version": __version__, "command": args.command, **report}
        out.write(json.dumps(_round(doc), indent=2) + "\n")
    else:
        out.write(render_table(args.command, report))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
