"""Program and assertion syntax trees.

The surface syntax allows `for` loops, index arithmetic on qubit subscripts
and generator aliases; `desugar` lowers all of that to the core statements
the wlp engines understand (skip, sequencing, initialization, unitaries,
classically controlled Paulis, measurement, classical assignment, if, while).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .cexpr import CExp, PhasePoly, Var, phase_exp
from .pauli import (ONE_QUBIT_GATES, TWO_QUBIT_GATES, PauliSum, PauliTerm)


_KIND_RE = re.compile(r"^(ep|e|s|cx|cz|b)\d*$")


def infer_kind(name: str) -> str:
    m = _KIND_RE.match(name.split("_", 1)[0])
    if not m:
        return "user"
    return {"e": "error", "ep": "perror", "s": "syndrome",
            "cx": "xcorr", "cz": "zcorr", "b": "param"}[m.group(1)]


def mkvar(name: str) -> Var:
    return Var(name, infer_kind(name))


# ---------------------------------------------------------------------------
# Index expressions (loop arithmetic in subscripts).

@dataclass(frozen=True)
class Index:
    """Linear expression: constant plus named loop variables with signs."""

    const: int = 0
    vars: tuple = ()  # of (name, coeff)

    @staticmethod
    def num(v: int) -> "Index":
        return Index(v, ())

    @staticmethod
    def var(name: str) -> "Index":
        return Index(0, ((name, 1),))

    def shift(self, delta: int) -> "Index":
        return Index(self.const + delta, self.vars)

    def resolve(self, env: Dict[str, int]) -> int:
        val = self.const
        for name, coeff in self.vars:
            if name not in env:
                raise KeyError(f"unbound loop variable {name!r}")
            val += coeff * env[name]
        return val

    def __str__(self) -> str:
        parts = []
        for name, coeff in self.vars:
            parts.append(name if coeff == 1 else f"-{name}")
        if self.const or not parts:
            parts.append(str(self.const))
        s = "+".join(parts).replace("+-", "-")
        return s if len(parts) == 1 and not s.startswith("-") else f"({s})"


IndexLike = Union[int, Index]


def _resolve(ix: IndexLike, env: Dict[str, int]) -> int:
    if isinstance(ix, int):
        return ix
    return ix.resolve(env)


# ---------------------------------------------------------------------------
# Statements.

class Stmt:
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Seq(Stmt):
    stmts: tuple

    @staticmethod
    def of(stmts: Sequence[Stmt]) -> Stmt:
        flat: List[Stmt] = []
        for s in stmts:
            if isinstance(s, Seq):
                flat.extend(s.stmts)
            elif not isinstance(s, Skip):
                flat.append(s)
        if not flat:
            return Skip()
        if len(flat) == 1:
            return flat[0]
        return Seq(tuple(flat))


@dataclass(frozen=True)
class InitQ(Stmt):
    qubit: IndexLike


@dataclass(frozen=True)
class Unitary(Stmt):
    gate: str
    qubits: tuple  # of IndexLike
    guard: Optional[str] = None  # variable name, possibly with loop parts


@dataclass(frozen=True)
class Measure(Stmt):
    var: str
    pauli: "PauliPattern"


@dataclass(frozen=True)
class Assign(Stmt):
    var: str
    expr: "AExpr"


@dataclass(frozen=True)
class If(Stmt):
    cond: "AExpr"
    then: Stmt
    els: Stmt


@dataclass(frozen=True)
class While(Stmt):
    cond: "AExpr"
    invariant: Optional["Assertion"]
    body: Stmt


@dataclass(frozen=True)
class For(Stmt):
    var: str
    lo: int
    hi: int
    body: Stmt


# Classical expressions in programs: boolean variables combined with xor
# (GF(2) sums), constants, and negation.  Kept deliberately small; the
# decoder outputs themselves stay opaque variables.
@dataclass(frozen=True)
class AExpr:
    const: int
    names: tuple  # variable names, xored together

    @staticmethod
    def var(name: str) -> "AExpr":
        return AExpr(0, (name,))

    @staticmethod
    def num(v: int) -> "AExpr":
        return AExpr(v & 1, ())

    def to_phase(self, env: Dict[str, int]) -> PhasePoly:
        atoms = []
        const = self.const
        for name in self.names:
            name = subst_name(name, env)
            atoms.append(mkvar(name))
        return PhasePoly.xor_all(atoms) ^ PhasePoly(const, frozenset())

    def __str__(self) -> str:
        parts = list(self.names)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class PauliPattern:
    """A Pauli string whose subscripts may involve loop variables."""

    sites: tuple  # of (letter, IndexLike)
    phase: Optional[AExpr] = None

    def resolve(self, n: int, env: Dict[str, int]) -> PauliSum:
        term = PauliTerm.from_sites(
            n, [(_resolve(ix, env), letter) for letter, ix in self.sites])
        if self.phase is not None:
            term = term.flip_sign(self.phase.to_phase(env))
        return PauliSum.of(term)

    def __str__(self) -> str:
        body = "".join(f"{l}{ix}" for l, ix in self.sites)
        if self.phase is not None:
            return f"(-1)^({self.phase}) {body}"
        return body


def subst_name(name: str, env: Dict[str, int]) -> str:
    """Substitute loop variables into underscore-separated name parts."""
    parts = name.split("_")
    out = []
    for p in parts:
        if p in env:
            out.append(str(env[p]))
        elif (p.startswith("(") and p.endswith(")")):
            out.append(str(_parse_inline_index(p[1:-1], env)))
        else:
            out.append(p)
    return "_".join(out)


def _parse_inline_index(text: str, env: Dict[str, int]) -> int:
    total = 0
    sign = 1
    token = ""
    def flush(tok, sgn, acc):
        if not tok:
            return acc
        if tok.isdigit():
            return acc + sgn * int(tok)
        if tok in env:
            return acc + sgn * env[tok]
        raise KeyError(f"unbound loop variable {tok!r}")
    for ch in text:
        if ch == "+":
            total = flush(token, sign, total)
            token, sign = "", 1
        elif ch == "-":
            total = flush(token, sign, total)
            token, sign = "", -1
        elif not ch.isspace():
            token += ch
    return flush(token, sign, total)


# ---------------------------------------------------------------------------
# Assertions.

class Assertion:
    pass


@dataclass(frozen=True)
class APauli(Assertion):
    op: PauliSum

    def __str__(self) -> str:
        return str(self.op)


@dataclass(frozen=True)
class AClass(Assertion):
    exp: CExp

    def __str__(self) -> str:
        return str(self.exp)


@dataclass(frozen=True)
class AAnd(Assertion):
    args: tuple

    def __str__(self) -> str:
        return "(" + " /\\ ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class AOr(Assertion):
    args: tuple

    def __str__(self) -> str:
        return "(" + " \\/ ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class ANot(Assertion):
    arg: Assertion

    def __str__(self) -> str:
        return f"~({self.arg})"


@dataclass(frozen=True)
class ABigVee(Assertion):
    vars: tuple  # of Var
    body: Assertion

    def __str__(self) -> str:
        names = ",".join(str(v) for v in self.vars)
        return f"bigvee {names} in {{0,1}}^{len(self.vars)} : ({self.body})"


def aand(args: Sequence[Assertion]) -> Assertion:
    flat: List[Assertion] = []
    for a in args:
        if isinstance(a, AAnd):
            flat.extend(a.args)
        else:
            flat.append(a)
    if len(flat) == 1:
        return flat[0]
    return AAnd(tuple(flat))


def aor(args: Sequence[Assertion]) -> Assertion:
    flat: List[Assertion] = []
    for a in args:
        if isinstance(a, AOr):
            flat.extend(a.args)
        else:
            flat.append(a)
    if len(flat) == 1:
        return flat[0]
    return AOr(tuple(flat))


# ---------------------------------------------------------------------------
# Desugaring.

class DesugarError(Exception):
    pass


def desugar(stmt: Stmt, n: int, env: Optional[Dict[str, int]] = None) -> Stmt:
    """Unroll for loops, resolve index arithmetic and loop variables.

    The result contains only core statements with concrete integer qubits
    and concrete variable names.
    """
    env = dict(env or {})

    def go(s: Stmt) -> Stmt:
        if isinstance(s, Skip):
            return s
        if isinstance(s, Seq):
            return Seq.of([go(x) for x in s.stmts])
        if isinstance(s, InitQ):
            return InitQ(_check_qubit(_resolve(s.qubit, env)))
        if isinstance(s, Unitary):
            gate = s.gate.upper()
            qubits = tuple(_check_qubit(_resolve(q, env)) for q in s.qubits)
            if gate in ONE_QUBIT_GATES and len(qubits) != 1:
                raise DesugarError(f"{gate} takes one qubit")
            if gate in TWO_QUBIT_GATES and len(qubits) != 2:
                raise DesugarError(f"{gate} takes two qubits")
            guard = subst_name(s.guard, env) if s.guard else None
            if guard is not None and gate not in ("X", "Y", "Z"):
                raise DesugarError(
                    f"classical control is limited to Pauli gates, got {gate}")
            return Unitary(gate, qubits, guard)
        if isinstance(s, Measure):
            op = s.pauli.resolve(n, env)
            return Measure(subst_name(s.var, env), _ConcretePauli(op))
        if isinstance(s, Assign):
            names = tuple(subst_name(x, env) for x in s.expr.names)
            return Assign(subst_name(s.var, env), AExpr(s.expr.const, names))
        if isinstance(s, If):
            names = tuple(subst_name(x, env) for x in s.cond.names)
            return If(AExpr(s.cond.const, names), go(s.then), go(s.els))
        if isinstance(s, While):
            names = tuple(subst_name(x, env) for x in s.cond.names)
            return While(AExpr(s.cond.const, names), s.invariant, go(s.body))
        if isinstance(s, For):
            if s.var in env:
                raise DesugarError(f"loop variable {s.var!r} shadows")
            out = []
            for val in range(s.lo, s.hi + 1):
                env[s.var] = val
                out.append(go(s.body))
            del env[s.var]
            return Seq.of(out)
        raise DesugarError(f"unknown statement {type(s).__name__}")

    def _check_qubit(q: int) -> int:
        if not 1 <= q <= n:
            raise DesugarError(f"qubit {q} out of range 1..{n}")
        return q

    return go(stmt)


@dataclass(frozen=True)
class _ConcretePauli:
    """Post-desugar measurement operand: an already resolved PauliSum."""

    op: PauliSum

    def resolve(self, n: int, env: Dict[str, int]) -> PauliSum:
        return self.op

    def __str__(self) -> str:
        return str(self.op)


def stmt_list(s: Stmt) -> List[Stmt]:
    if isinstance(s, Skip):
        return []
    if isinstance(s, Seq):
        return list(s.stmts)
    return [s]


# ---------------------------------------------------------------------------
# Pretty printing (surface syntax, round-trips through the parser).

def pretty(stmt: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(stmt, Skip):
        return pad + "skip"
    if isinstance(stmt, Seq):
        return ";\n".join(pretty(s, indent) for s in stmt.stmts)
    if isinstance(stmt, InitQ):
        return f"{pad}q_{stmt.qubit} := |0>"
    if isinstance(stmt, Unitary):
        qs = ", ".join(f"q_{q}" for q in stmt.qubits)
        guard = f"[{stmt.guard}] " if stmt.guard else ""
        return f"{pad}{qs} *= {guard}{stmt.gate}"
    if isinstance(stmt, Measure):
        return f"{pad}{stmt.var} := meas[{stmt.pauli}]"
    if isinstance(stmt, Assign):
        return f"{pad}{stmt.var} := {stmt.expr}"
    if isinstance(stmt, If):
        return (f"{pad}if {stmt.cond} then\n{pretty(stmt.then, indent + 1)}\n"
                f"{pad}else\n{pretty(stmt.els, indent + 1)}\n{pad}end")
    if isinstance(stmt, While):
        inv = f" inv {{ {stmt.invariant} }}" if stmt.invariant else ""
        return (f"{pad}while {stmt.cond}{inv} do\n"
                f"{pretty(stmt.body, indent + 1)}\n{pad}end")
    if isinstance(stmt, For):
        return (f"{pad}for {stmt.var} in {stmt.lo}..{stmt.hi} do\n"
                f"{pretty(stmt.body, indent + 1)}\n{pad}end")
    raise TypeError(type(stmt).__name__)
