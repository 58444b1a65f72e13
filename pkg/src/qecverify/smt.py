"""SMT-LIB2 encoding of classical verification conditions and solver
dispatch.

Every variable is a width-1 bitvector; GF(2) sums are bvxor chains and
cardinality sums are ripple bvadd over zero-extended bits, so the output
stays inside an easy QF_BV fragment.  Validity checks assert the
hypothesis together with the negated goal and expect unsat; detection
queries assert the violation formula directly and expect unsat for a
passing code.

The solver is an external command (first of QECVERIFY_SOLVER, the
--solver-cmd template, or an auto-detected z3/cvc5; the bundled
`qecv-solve` fallback is used when none is present).  The command gets
the formula file as its final argument and must answer sat/unsat on
stdout, with `(get-value ...)` style model lines on sat.
"""

from __future__ import annotations

import os
import re
import shlex
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cexpr import (BConst, BVar, CExp, Cmp, IConst, Imp, NAry, Not,
                    PhasePoly, Sum, Var)
from .vc import ClassicalVC


class EncodingError(Exception):
    pass


def _bv1(bit: int) -> str:
    return "#b1" if bit else "#b0"


def _bvconst(value: int, width: int) -> str:
    return f"(_ bv{value} {width})"


class _Encoder:
    def __init__(self) -> None:
        self.vars: Dict[str, Var] = {}

    def bool1(self, e: CExp) -> str:
        """Encode a boolean expression as a width-1 bitvector term."""
        if isinstance(e, BConst):
            return _bv1(1 if e.value else 0)
        if isinstance(e, BVar):
            self.vars[e.var.name] = e.var
            return e.var.name
        if isinstance(e, Not):
            return f"(bvnot {self.bool1(e.arg)})"
        if isinstance(e, NAry):
            op = {"and": "bvand", "or": "bvor", "xor": "bvxor"}[e.op]
            args = [self.bool1(a) for a in e.args]
            if not args:
                return _bv1(e.op != "or")
            if len(args) == 1:
                return args[0]
            return f"({op} {' '.join(args)})"
        if isinstance(e, Imp):
            return (f"(bvor (bvnot {self.bool1(e.lhs)}) "
                    f"{self.bool1(e.rhs)})")
        if isinstance(e, Cmp):
            return self.cmp(e)
        raise EncodingError(f"not a boolean expression: {e!r}")

    def _int_width(self, e: CExp) -> int:
        if isinstance(e, IConst):
            return max(1, e.value.bit_length())
        if isinstance(e, Sum):
            return max(1, len(e.args).bit_length())
        raise EncodingError(f"not an integer expression: {e!r}")

    def intterm(self, e: CExp, width: int) -> str:
        if isinstance(e, IConst):
            if e.value >= (1 << width):
                raise EncodingError("constant too wide")
            return _bvconst(e.value, width)
        if isinstance(e, Sum):
            if not e.args:
                return _bvconst(0, width)
            parts = []
            for a in e.args:
                b = self.bool1(a)
                if width > 1:
                    parts.append(f"((_ zero_extend {width - 1}) {b})")
                else:
                    parts.append(b)
            out = parts[0]
            for p in parts[1:]:
                out = f"(bvadd {out} {p})"
            return out
        raise EncodingError(f"not an integer expression: {e!r}")

    def cmp(self, e: Cmp) -> str:
        width = max(self._int_width(e.lhs), self._int_width(e.rhs))
        lhs = self.intterm(e.lhs, width)
        rhs = self.intterm(e.rhs, width)
        rel = {"le": "bvule", "ge": "bvuge", "eq": "="}[e.op]
        return f"(ite ({rel} {lhs} {rhs}) #b1 #b0)"


def encode(vc: ClassicalVC, exists_form: bool = False,
           comment: str = "") -> str:
    """Render the VC as an SMT-LIB2 script (deterministic output)."""
    enc = _Encoder()
    if vc.mode == "sat":
        body = enc.bool1(vc.hypothesis)
        asserts = [f"(assert (= {body} #b1))"]
    elif exists_form:
        hyp = enc.bool1(vc.hypothesis)
        goal = enc.bool1(vc.goal)
        matrix = f"(=> (= {hyp} #b1) (= {goal} #b1))"
        inner = matrix
        if vc.exists_vars:
            binds = " ".join(f"({v.name} (_ BitVec 1))"
                             for v in vc.exists_vars)
            inner = f"(exists ({binds}) {matrix})"
        if vc.forall_vars:
            binds = " ".join(f"({v.name} (_ BitVec 1))"
                             for v in vc.forall_vars)
            inner = f"(forall ({binds}) {inner})"
        for v in list(vc.exists_vars) + list(vc.forall_vars):
            enc.vars.pop(v.name, None)
        asserts = [f"(assert {inner})"]
    else:
        hyp = enc.bool1(vc.hypothesis)
        goal = enc.bool1(vc.goal)
        asserts = [f"(assert (= {hyp} #b1))",
                   f"(assert (= {goal} #b0))"]

    lines = []
    if comment:
        for ln in comment.splitlines():
            lines.append(f"; {ln}")
    lines.append(f"(set-logic {'BV' if exists_form else 'QF_BV'})")
    names = sorted(enc.vars)
    for name in names:
        lines.append(f"(declare-const {name} (_ BitVec 1))")
    lines.extend(asserts)
    lines.append("(check-sat)")
    if names and not exists_form:
        lines.append(f"(get-value ({' '.join(names)}))")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


@dataclass
class SolveResult:
    status: str                      # "sat" | "unsat" | "unknown" | "timeout"
    model: Dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0
    solver: str = ""


_FALLBACKS = ("z3", "cvc5", "cvc4", "bitwuzla", "boolector")


def default_solver_cmd() -> List[str]:
    env = os.environ.get("QECVERIFY_SOLVER")
    if env:
        return shlex.split(env)
    for name in _FALLBACKS:
        path = shutil.which(name)
        if path:
            if name == "z3":
                return [path, "-smt2"]
            return [path]
    return [sys.executable, "-m", "qecverify.smtsolve"]


_VALUE_RE = re.compile(r"\((\w+)\s+#b([01])\)")


def run_solver(script: str, solver_cmd: Optional[Sequence[str]] = None,
               timeout: Optional[float] = None) -> SolveResult:
    cmd = list(solver_cmd) if solver_cmd else default_solver_cmd()
    start = time.monotonic()
    with tempfile.NamedTemporaryFile("w", suffix=".smt2",
                                     delete=False) as fh:
        fh.write(script)
        path = fh.name
    try:
        try:
            proc = subprocess.run(cmd + [path], capture_output=True,
                                  text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return SolveResult("timeout", {},
                               time.monotonic() - start, cmd[0])
        out = proc.stdout
        status = "unknown"
        for ln in out.splitlines():
            tok = ln.strip()
            if tok in ("sat", "unsat", "unknown"):
                status = tok
                break
        model: Dict[str, int] = {}
        if status == "sat":
            for name, bit in _VALUE_RE.findall(out):
                model[name] = int(bit)
        return SolveResult(status, model, time.monotonic() - start,
                           cmd[0])
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def solve(vc: ClassicalVC, solver_cmd: Optional[Sequence[str]] = None,
          timeout: Optional[float] = None, exists_form: bool = False,
          comment: str = "") -> SolveResult:
    return run_solver(encode(vc, exists_form=exists_form, comment=comment),
                      solver_cmd=solver_cmd, timeout=timeout)
