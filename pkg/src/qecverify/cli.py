"""Command line front end.

Subcommands: verify-correction, verify-detection, wlp, gen-code,
gen-scenario, oracle-check, bench.  Exit codes: 0 verified (or unsat as
expected), 1 refuted, 2 unknown, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
import time
from typing import List, Optional, Sequence

from . import codes as codes_mod
from .codes import (Scenario, cnot_scenario, discreteness_constraint,
                    ec_cycle, get_code, ghz_scenario, locality_constraint)
from .oracle import brute_force_correct, brute_force_detect, replay_correction
from .parser import parse_hoare, parse_program
from .prog import pretty
from .runner import RunResult, run_parallel, split
from .stabcode import StabilizerCode, load_code
from .vc import build_correction_vc, build_detection_vc
from .wlp import PhaseForm, wlp_phaseform

EXIT_VERIFIED = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _resolve_code(spec: str, distance: Optional[int]) -> StabilizerCode:
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    if os.path.isfile(spec):
        with open(spec) as fh:
            return load_code(fh.read(), name=os.path.basename(spec))
    if distance is not None and ":" not in spec:
        spec = f"{spec}:{distance}"
    return get_code(spec)


def _load_constraints(scenario: Scenario, path: Optional[str]) -> List:
    """Constraint file: JSON object, keys "locality" (list of sites)
    and/or "discreteness" (segment length)."""
    if not path:
        return []
    with open(path) as fh:
        spec = json.load(fh)
    out = []
    if "locality" in spec:
        out.extend(locality_constraint(scenario, spec["locality"]))
    if "discreteness" in spec:
        out.extend(discreteness_constraint(scenario, int(spec["discreteness"])))
    return out


def _build_scenario(args) -> Scenario:
    if getattr(args, "scenario", None):
        return load_scenario(args.scenario)
    code = _resolve_code(args.code, getattr(args, "distance", None))
    logical = (args.logical or "none").upper()
    budget = args.budget
    if budget is None:
        budget = (code.d - 1) // 2
    sites = None
    if getattr(args, "sites", None):
        sites = [int(s) for s in args.sites.split(",")]
    basis = getattr(args, "basis", None) or "Z"
    if logical == "CNOT":
        return cnot_scenario(code, args.error, budget, logical_basis=basis)
    if logical == "GHZ":
        return ghz_scenario(code, args.error, budget)
    gate = "I" if logical in ("NONE", "") else logical
    return ec_cycle(code, gate, args.error, budget, error_sites=sites,
                    logical_basis=basis)


def _solver_cmd(args) -> Optional[List[str]]:
    if getattr(args, "solver_cmd", None):
        return shlex.split(args.solver_cmd)
    return None


def _emit(res: RunResult, label: str, out=sys.stdout) -> None:
    print(f"  id  verdict   wall(s)", file=out)
    for r in res.results:
        print(f"{r.id:>4}  {r.verdict:<8}  {r.wall:7.3f}", file=out)
    print(f"{label}: {res.verdict}  subtasks={len(res.results)} "
          f"completed={res.completed}  wall={res.wall:.2f}s", file=out)
    for line in res.records():
        print(line, file=out)


def _exit_code(verdict: str) -> int:
    return {"Verified": EXIT_VERIFIED, "Refuted": EXIT_REFUTED}.get(
        verdict, EXIT_UNKNOWN)


# ---------------------------------------------------------------------------
# Scenario files.

_SCEN_HEADER = "# scenario:"


def dump_scenario(scenario: Scenario, descriptor: dict) -> str:
    lines = [_SCEN_HEADER + " " + json.dumps(descriptor, sort_keys=True), ""]
    lines.append(pretty(scenario.prog))
    lines.append("")
    lines.append("# post:")
    for row in scenario.post_rows:
        phase = str(row.phase)
        lines.append(f"#   (-1)^({phase}) {row.op}")
    return "\n".join(lines) + "\n"


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    for ln in text.splitlines():
        if ln.startswith(_SCEN_HEADER):
            desc = json.loads(ln[len(_SCEN_HEADER):])
            break
    else:
        raise ValueError(f"{path}: missing '{_SCEN_HEADER}' header")
    code = get_code(desc["code"])
    logical = desc.get("logical", "none").upper()
    budget = desc.get("budget")
    sites = desc.get("sites")
    basis = desc.get("basis", "Z")
    if logical == "CNOT":
        return cnot_scenario(code, desc["error"], budget, logical_basis=basis)
    if logical == "GHZ":
        return ghz_scenario(code, desc["error"], budget)
    gate = "I" if logical == "NONE" else logical
    return ec_cycle(code, gate, desc["error"], budget, error_sites=sites,
                    logical_basis=basis)


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_verify_correction(args) -> int:
    scenario = _build_scenario(args)
    budget = scenario.budget
    extra = _load_constraints(scenario, args.constraints)
    vc = build_correction_vc(scenario, budget=budget, constraints=extra)
    if args.dump_vc:
        print(f"case: {vc.case}")
        for row in vc.form.rows:
            print(f"  row: (-1)^({row.phase}) {row.op}")
        for name, poly in vc.map_constraints:
            print(f"  map: {name} = {poly}")
        for e in vc.eliminated:
            print(f"  eliminated: {e.label}  branch pair {e.pair}")
    jobs = 1 if args.seq else args.jobs
    tasks = split(vc.classical, scenario.error_vars, scenario.code.d,
                  scenario.n, budget=budget)
    if args.dump_smt:
        os.makedirs(args.dump_smt, exist_ok=True)
    res = run_parallel(tasks, jobs=jobs, solver_cmd=_solver_cmd(args),
                       timeout=args.timeout, dump_smt=args.dump_smt)
    _emit(res, scenario.name)
    if res.verdict == "Refuted" and res.model:
        active = sorted(k for k, v in res.model.items() if v)
        print("counterexample:", " ".join(active) or "(empty)")
    return _exit_code(res.verdict)


def cmd_verify_detection(args) -> int:
    code = _resolve_code(args.code, args.distance)
    dt = args.dt if args.dt is not None else code.d
    vc = build_detection_vc(code, dt)
    if args.dump_vc:
        print(f"detection vc: n={code.n} dt={dt}")
    sub = split(vc.classical, [], code.d, code.n)
    jobs = 1 if args.seq else args.jobs
    if args.dump_smt:
        os.makedirs(args.dump_smt, exist_ok=True)
    res = run_parallel(sub, jobs=jobs, solver_cmd=_solver_cmd(args),
                       timeout=args.timeout, dump_smt=args.dump_smt)
    # sat here means an undetected low-weight logical exists
    status = res.results[0].verdict if res.results else "unknown"
    wall = res.wall
    print(f"  id  verdict   wall(s)")
    print(f"   0  {status:<8}  {wall:7.3f}")
    label = {"unsat": "all errors below d_t detected",
             "sat": "undetected logical error found"}.get(status, status)
    print(f"{code.name} dt={dt}: {label}  wall={wall:.2f}s")
    print(json.dumps({"id": 0, "verdict": status, "wall": round(wall, 4)}))
    if status == "sat":
        sites = []
        for q in range(1, code.n + 1):
            x = res.model.get(f"ex_{q}", 0)
            z = res.model.get(f"ez_{q}", 0)
            if x or z:
                sites.append((q, "Y" if x and z else ("X" if x else "Z")))
        from .pauli import PauliTerm
        witness = PauliTerm.from_sites(code.n, sites)
        print(f"witness: {witness}  weight={witness.weight()}")
        return EXIT_REFUTED
    if status == "unsat":
        return EXIT_VERIFIED
    return EXIT_UNKNOWN


def cmd_wlp(args) -> int:
    with open(args.file) as fh:
        text = fh.read()
    try:
        triple = parse_hoare(text)
        prog, post = triple.prog, triple.post
    except Exception:
        if not args.post:
            raise _UsageError("file is not a Hoare triple; pass --post")
        from .parser import parse_assertion
        prog = parse_program(text)
        post = parse_assertion(args.post)
    from .wlp import wlp as wlp_fn
    n = args.qubits or _max_qubit(prog)
    pre, obligations = wlp_fn(prog, post, n)
    print(pre)
    for ob in obligations:
        print(f"obligation: {ob}")
    return EXIT_VERIFIED


def _max_qubit(prog) -> int:
    from .prog import stmt_list, Unitary, Measure, InitQ
    best = 1
    for s in stmt_list(prog):
        if isinstance(s, Unitary):
            best = max(best, *s.qubits)
        elif isinstance(s, InitQ):
            best = max(best, s.qubit)
        elif isinstance(s, Measure) and hasattr(s.pauli, "n"):
            best = max(best, s.pauli.n)
    return best


def cmd_gen_code(args) -> int:
    code = _resolve_code(args.name, args.distance)
    text = code.dump()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output} ([[{code.n},{code.k},{code.d}]])")
    else:
        sys.stdout.write(text)
    return EXIT_VERIFIED


def cmd_gen_scenario(args) -> int:
    desc = {"code": args.name if ":" in args.name or not args.distance
            else f"{args.name}:{args.distance}",
            "error": args.error, "logical": args.logical or "none",
            "budget": args.budget, "basis": args.basis or "Z"}
    if args.sites:
        desc["sites"] = [int(s) for s in args.sites.split(",")]
    ns = argparse.Namespace(code=desc["code"], distance=None,
                            error=args.error, logical=args.logical,
                            budget=args.budget, sites=args.sites,
                            basis=args.basis, scenario=None)
    scenario = _build_scenario(ns)
    if desc["budget"] is None:
        desc["budget"] = scenario.budget
    text = dump_scenario(scenario, desc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output} ({scenario.name})")
    else:
        sys.stdout.write(text)
    return EXIT_VERIFIED


def cmd_oracle_check(args) -> int:
    if args.scenario:
        scenario = load_scenario(args.scenario)
        code = scenario.code
        error = scenario.meta.get("error", "X")
        logical = scenario.meta.get("logical", "I")
        budget = args.max_weight or scenario.budget or 1
    else:
        code = _resolve_code(args.code, args.distance)
        error = args.error
        logical = "I" if (args.logical or "none").upper() == "NONE" \
            else args.logical.upper()
        budget = args.max_weight or args.budget or (code.d - 1) // 2
    if logical in ("CNOT", "GHZ"):
        raise _UsageError("oracle-check handles single-block cycles only")
    t0 = time.monotonic()
    out = brute_force_correct(code, logical, error, budget)
    wall = time.monotonic() - t0
    verdict = "Verified" if out.verified else "Refuted"
    print(f"{code.name} error={error} logical={logical} budget={budget}: "
          f"{verdict}  wall={wall:.2f}s")
    print(json.dumps({"id": 0, "verdict": verdict.lower(),
                      "wall": round(wall, 4)}))
    if not out.verified and out.counterexample:
        active = sorted(k for k, v in out.counterexample.items() if v)
        print("counterexample:", " ".join(active))
    return EXIT_VERIFIED if out.verified else EXIT_REFUTED


def _bench_rows(jobs: int, solver_cmd, timeout):
    """(name, thunk) pairs for the paper-subset suite."""
    def correction(codespec, error, logical, budget, basis="Z", sites=None):
        def run():
            code = get_code(codespec)
            gate = "I" if logical == "none" else logical
            sc = ec_cycle(code, gate, error, budget, error_sites=sites,
                          logical_basis=basis)
            vc = build_correction_vc(sc, budget=budget)
            tasks = split(vc.classical, sc.error_vars, code.d, sc.n,
                          budget=budget)
            return run_parallel(tasks, jobs=jobs, solver_cmd=solver_cmd,
                                timeout=timeout).verdict
        return run

    def detection(codespec, dt, expect_sat):
        def run():
            code = get_code(codespec)
            vc = build_detection_vc(code, dt)
            tasks = split(vc.classical, [], code.d, code.n)
            res = run_parallel(tasks, jobs=1, solver_cmd=solver_cmd,
                               timeout=timeout)
            got = res.results[0].verdict
            return f"{got} ({'expected' if (got == 'sat') == expect_sat else 'UNEXPECTED'})"
        return run

    return [
        ("steane Y/H budget 1", correction("steane", "Y", "H", 1)),
        ("steane Y/H budget 2", correction("steane", "Y", "H", 2)),
        ("repetition:3 X budget 1", correction("repetition:3", "X", "none", 1)),
        ("surface:3 Y budget 1", correction("surface:3", "Y", "none", 1)),
        ("surface:3 detect dt=3", detection("surface:3", 3, False)),
        ("surface:3 detect dt=4", detection("surface:3", 4, True)),
    ]


def cmd_bench(args) -> int:
    if args.suite != "paper-subset":
        raise _UsageError(f"unknown suite {args.suite!r}")
    rows = _bench_rows(args.jobs, _solver_cmd(args), args.timeout)
    print(f"{'case':<28} {'result':<24} wall(s)")
    for name, thunk in rows:
        t0 = time.monotonic()
        result = thunk()
        wall = time.monotonic() - t0
        print(f"{name:<28} {str(result):<24} {wall:7.2f}")
        print(json.dumps({"id": name, "verdict": str(result),
                          "wall": round(wall, 4)}))
    return EXIT_VERIFIED


# ---------------------------------------------------------------------------
# Argument wiring.

def _add_common(p, detection=False):
    p.add_argument("--code", help="builtin:NAME, NAME:ARG, or a code file")
    p.add_argument("--distance", type=int, help="surface/repetition distance")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--timeout", type=float, default=300.0,
                   help="per-subtask solver timeout in seconds")
    p.add_argument("--solver-cmd", help="external SMT solver command")
    p.add_argument("--dump-smt", metavar="DIR",
                   help="write each subtask's SMT-LIB script to DIR")
    p.add_argument("--dump-vc", action="store_true",
                   help="print the reduced verification condition")
    p.add_argument("--seq", action="store_true",
                   help="sequential run (same splitting, one worker)")
    if not detection:
        p.add_argument("--error", default="X",
                       choices=["X", "Y", "Z", "H", "T"])
        p.add_argument("--logical", default="none",
                       choices=["none", "H", "S", "CNOT", "GHZ"])
        p.add_argument("--budget", type=int)
        p.add_argument("--constraints", metavar="FILE",
                       help="JSON constraint file (locality/discreteness)")
        p.add_argument("--sites", help="comma separated sites for H/T errors")
        p.add_argument("--basis", choices=["Z", "X"],
                       help="logical basis for the pre/post rows")
        p.add_argument("--scenario", metavar="FILE",
                       help="scenario file from gen-scenario")


def build_parser() -> _Parser:
    ap = _Parser(prog="qecverify",
                 description="Stabilizer-code program verification.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("verify-correction",
                       help="verify an error-correction cycle")
    _add_common(p)
    p.set_defaults(fn=cmd_verify_correction)

    p = sub.add_parser("verify-detection",
                       help="check for undetected low-weight logicals")
    _add_common(p, detection=True)
    p.add_argument("--dt", type=int, help="detection threshold (default d)")
    p.set_defaults(fn=cmd_verify_detection)

    p = sub.add_parser("wlp", help="print the weakest liberal precondition")
    p.add_argument("file", help="program or Hoare-triple file")
    p.add_argument("--post", help="postcondition when FILE is a bare program")
    p.add_argument("--qubits", type=int)
    p.set_defaults(fn=cmd_wlp)

    p = sub.add_parser("gen-code", help="emit a builtin code file")
    p.add_argument("name", help="steane | repetition | surface")
    p.add_argument("--distance", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_gen_code)

    p = sub.add_parser("gen-scenario", help="emit a scenario file")
    p.add_argument("name", help="code name as for gen-code")
    p.add_argument("--distance", type=int)
    p.add_argument("--error", default="X", choices=["X", "Y", "Z", "H", "T"])
    p.add_argument("--logical", default="none",
                   choices=["none", "H", "S", "CNOT", "GHZ"])
    p.add_argument("--budget", type=int)
    p.add_argument("--sites")
    p.add_argument("--basis", choices=["Z", "X"])
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_gen_scenario)

    p = sub.add_parser("oracle-check", help="brute-force ground truth")
    p.add_argument("--scenario", metavar="FILE")
    p.add_argument("--code")
    p.add_argument("--distance", type=int)
    p.add_argument("--error", default="X", choices=["X", "Y", "Z"])
    p.add_argument("--logical", default="none", choices=["none", "H", "S"])
    p.add_argument("--budget", type=int)
    p.add_argument("--max-weight", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_oracle_check)

    p = sub.add_parser("bench", help="run the benchmark suite")
    p.add_argument("--suite", default="paper-subset")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--solver-cmd")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if getattr(args, "fn", None) is cmd_verify_correction \
                and not args.code and not args.scenario:
            raise _UsageError("--code or --scenario is required")
        if getattr(args, "fn", None) is cmd_verify_detection \
                and not args.code:
            raise _UsageError("--code is required")
        if getattr(args, "fn", None) is cmd_oracle_check \
                and not args.code and not args.scenario:
            raise _UsageError("--code or --scenario is required")
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
