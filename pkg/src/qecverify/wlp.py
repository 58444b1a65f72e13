"""Weakest liberal precondition engines.

Two engines share the proof rules: the generic engine works on arbitrary
assertion trees and produces the textbook branching disjunctions; the
structured engine works on phase-form assertions (a conjunction of
stabilizer rows whose phases are affine polynomials) and is what the VC
pipeline uses.  The structured measurement rule folds the (Meas) disjunction
into a bound syndrome variable plus a decoder-consistency record, which is
exactly the rewrite `P and Q = P and QP` applied to the duplicated
generator row.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

from .cexpr import CExp, PhasePoly, Var, phase_exp, Not as CNot
from .pauli import (PauliSum, PauliTerm, conditional_pauli, conjugate,
                    equal_up_to_phase)
from .prog import (AAnd, AClass, ANot, AOr, APauli, Assertion, Assign, For,
                   If, InitQ, Measure, Seq, Skip, Stmt, Unitary, While,
                   mkvar, stmt_list)


class WlpError(Exception):
    pass


class StructureError(WlpError):
    """The program or assertion leaves the structured fragment."""


# ---------------------------------------------------------------------------
# Shared helpers.

def _sum_substitute(p: PauliSum, v: Var, repl: PhasePoly) -> PauliSum:
    out = []
    for t in p.terms:
        out.append(t.with_sign(t.sign.substitute(v, repl)))
    return PauliSum(p.n, out)


def _pauli_guard_flip(p: PauliSum, gate: str, qubit: int,
                      guard: PhasePoly) -> PauliSum:
    """Conjugation by a Pauli raised to a classical bit."""
    err = PauliTerm.single(p.n, qubit, gate)
    out = []
    for t in p.terms:
        out.append(t if t.commutes(err) else t.flip_sign(guard))
    return PauliSum(p.n, out)


def _assign_phase(var_name: str, expr) -> Tuple[Var, PhasePoly]:
    v = mkvar(var_name)
    repl = expr.to_phase({}) if hasattr(expr, "to_phase") else expr
    return v, repl


# ---------------------------------------------------------------------------
# Structured (phase-form) engine.

@dataclass
class Row:
    """One stabilizer row: the subspace of (-1)^phase * op."""

    op: PauliSum
    phase: PhasePoly

    def substitute(self, v: Var, repl: PhasePoly) -> "Row":
        return Row(_sum_substitute(self.op, v, repl),
                   self.phase.substitute(v, repl))


@dataclass
class MeasRecord:
    """Measurement of row `row` bound outcome `var`; the displaced phase
    `cond` (the correction sum r_i) must equal the outcome."""

    var: Var
    row: int
    cond: PhasePoly
    op: Optional[PauliSum] = None


@dataclass
class PhaseForm:
    n: int
    rows: List[Row]
    bound: List[Var] = field(default_factory=list)
    records: List[MeasRecord] = field(default_factory=list)

    def copy(self) -> "PhaseForm":
        return PhaseForm(self.n, [Row(r.op, r.phase) for r in self.rows],
                         list(self.bound),
                         [MeasRecord(m.var, m.row, m.cond, m.op)
                          for m in self.records])

    def pretty(self) -> str:
        lines = []
        if self.bound:
            names = ",".join(v.name for v in sorted(self.bound))
            lines.append(f"bigvee {names} :")
        for r in self.rows:
            if r.phase.is_zero():
                lines.append(f"  {r.op}")
            else:
                lines.append(f"  (-1)^({r.phase}) {r.op}")
        return "\n".join(lines)


def wlp_phaseform(prog: Stmt, post: PhaseForm) -> PhaseForm:
    """Backward pass over a loop-free, init-free program."""
    form = post.copy()
    for stmt in reversed(stmt_list(prog)):
        _step_phaseform(stmt, form)
    return form


def _step_phaseform(stmt: Stmt, form: PhaseForm) -> None:
    if isinstance(stmt, Skip):
        return
    if isinstance(stmt, Seq):
        for s in reversed(stmt.stmts):
            _step_phaseform(s, form)
        return
    if isinstance(stmt, Unitary):
        if stmt.guard is None:
            for r in form.rows:
                r.op = conjugate(stmt.gate, stmt.qubits, r.op)
            return
        guard = PhasePoly.of(mkvar(stmt.guard))
        qubit = stmt.qubits[0]
        for r in form.rows:
            new = _pauli_guard_flip(r.op, stmt.gate, qubit, guard)
            if new == r.op.flip_sign(guard):
                # every term flipped: hoist the guard into the row phase
                r.phase = r.phase ^ guard
            else:
                r.op = new
        return
    if isinstance(stmt, Measure):
        op = stmt.pauli.resolve(form.n, {})
        if not op.is_single():
            raise StructureError("measured operator must be a Pauli string")
        var = mkvar(stmt.var)
        if var in form.bound:
            raise StructureError(f"syndrome variable {var.name} measured "
                                 "twice")
        for idx, r in enumerate(form.rows):
            rel = equal_up_to_phase(r.op, op)
            if rel is not None:
                cond = r.phase ^ rel
                form.records.append(MeasRecord(var, idx, cond, op))
                form.bound.append(var)
                r.op = op
                r.phase = PhasePoly.of(var)
                return
        raise StructureError(
            f"measured operator {op} matches no assertion row")
    if isinstance(stmt, Assign):
        v, repl = _assign_phase(stmt.var, stmt.expr)
        for i, r in enumerate(form.rows):
            form.rows[i] = r.substitute(v, repl)
        for m in form.records:
            m.cond = m.cond.substitute(v, repl)
        return
    raise StructureError(
        f"{type(stmt).__name__} is outside the structured fragment")


# ---------------------------------------------------------------------------
# Generic assertion engine.

@dataclass
class Obligation:
    """Side condition `hyp entails goal` produced by loop rules."""

    hyp: Assertion
    goal: Assertion


def _map_pauli(a: Assertion, f: Callable[[PauliSum], PauliSum]) -> Assertion:
    if isinstance(a, APauli):
        return APauli(f(a.op))
    if isinstance(a, AAnd):
        return AAnd(tuple(_map_pauli(x, f) for x in a.args))
    if isinstance(a, AOr):
        return AOr(tuple(_map_pauli(x, f) for x in a.args))
    if isinstance(a, ANot):
        return ANot(_map_pauli(a.arg, f))
    from .prog import ABigVee
    if isinstance(a, ABigVee):
        return ABigVee(a.vars, _map_pauli(a.body, f))
    return a


def _subst_assertion(a: Assertion, v: Var, bit: int) -> Assertion:
    repl_phase = PhasePoly(bit, frozenset())
    from .cexpr import BConst
    repl_c = BConst(bool(bit))

    def on_pauli(p: PauliSum) -> PauliSum:
        return _sum_substitute(p, v, repl_phase)

    def walk(x: Assertion) -> Assertion:
        if isinstance(x, APauli):
            return APauli(on_pauli(x.op))
        if isinstance(x, AClass):
            return AClass(x.exp.substitute(v, repl_c))
        if isinstance(x, AAnd):
            return AAnd(tuple(walk(y) for y in x.args))
        if isinstance(x, AOr):
            return AOr(tuple(walk(y) for y in x.args))
        if isinstance(x, ANot):
            return ANot(walk(x.arg))
        from .prog import ABigVee
        if isinstance(x, ABigVee):
            return ABigVee(x.vars, walk(x.body))
        return x

    return walk(a)


def wlp(prog: Stmt, post: Assertion,
        n: int) -> Tuple[Assertion, List[Obligation]]:
    obligations: List[Obligation] = []

    def go(stmt: Stmt, a: Assertion) -> Assertion:
        if isinstance(stmt, Skip):
            return a
        if isinstance(stmt, Seq):
            for s in reversed(stmt.stmts):
                a = go(s, a)
            return a
        if isinstance(stmt, Unitary):
            if stmt.guard is None:
                return _map_pauli(
                    a, lambda p: conjugate(stmt.gate, stmt.qubits, p))
            guard = PhasePoly.of(mkvar(stmt.guard))
            qubit = stmt.qubits[0]
            return _map_pauli(
                a, lambda p: _pauli_guard_flip(p, stmt.gate, qubit, guard))
        if isinstance(stmt, InitQ):
            z = APauli(PauliSum.of(PauliTerm.single(n, stmt.qubit, "Z")))
            mz = APauli(PauliSum.of(
                PauliTerm.single(n, stmt.qubit, "Z").negate()))
            flipped = _map_pauli(
                a, lambda p: _pauli_guard_flip(p, "X", stmt.qubit,
                                               PhasePoly.one()))
            return AOr((AAnd((z, a)), AAnd((mz, flipped))))
        if isinstance(stmt, Measure):
            op = stmt.pauli.resolve(n, {})
            var = mkvar(stmt.var)
            p0 = APauli(op)
            p1 = APauli(op.negate())
            return AOr((AAnd((p0, _subst_assertion(a, var, 0))),
                        AAnd((p1, _subst_assertion(a, var, 1)))))
        if isinstance(stmt, Assign):
            v, repl = _assign_phase(stmt.var, stmt.expr)

            def on_pauli(p: PauliSum) -> PauliSum:
                return _sum_substitute(p, v, repl)

            def on_class(e: CExp) -> CExp:
                from .cexpr import xor_exp, BVar, BConst
                terms: list = [BVar(x) for x in sorted(repl.atoms)]
                if repl.const:
                    terms.append(BConst(True))
                if not terms:
                    terms = [BConst(False)]
                return e.substitute(v, xor_exp(terms))

            def walk(x: Assertion) -> Assertion:
                if isinstance(x, APauli):
                    return APauli(on_pauli(x.op))
                if isinstance(x, AClass):
                    return AClass(on_class(x.exp))
                if isinstance(x, AAnd):
                    return AAnd(tuple(walk(y) for y in x.args))
                if isinstance(x, AOr):
                    return AOr(tuple(walk(y) for y in x.args))
                if isinstance(x, ANot):
                    return ANot(walk(x.arg))
                from .prog import ABigVee
                if isinstance(x, ABigVee):
                    return ABigVee(x.vars, walk(x.body))
                return x

            return walk(a)
        if isinstance(stmt, If):
            guard = stmt.cond.to_phase({})
            b = AClass(phase_exp(guard))
            nb = AClass(CNot(phase_exp(guard)))
            return AOr((AAnd((nb, go(stmt.els, a))),
                        AAnd((b, go(stmt.then, a)))))
        if isinstance(stmt, While):
            if stmt.invariant is None:
                raise WlpError("while loop requires an invariant annotation")
            inv = stmt.invariant
            guard = stmt.cond.to_phase({})
            b = AClass(phase_exp(guard))
            nb = AClass(CNot(phase_exp(guard)))
            obligations.append(Obligation(AAnd((inv, b)), go(stmt.body, inv)))
            obligations.append(Obligation(AAnd((inv, nb)), a))
            return inv
        raise WlpError(f"cannot take wlp of {type(stmt).__name__}")

    return go(prog, post), obligations
