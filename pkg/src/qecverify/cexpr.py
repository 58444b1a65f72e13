"""Classical expressions over typed boolean variables.

Assertion phases are GF(2)-affine polynomials (a constant bit xored with a
set of boolean atoms).  Hypotheses and goals of verification conditions are
ordinary boolean/arithmetic expressions over the same variables.  Everything
here is immutable and hashable so phases can live inside Pauli terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union


# Variable kinds.  The kind tags which quantifier block / role a variable
# belongs to when a VC is assembled; it never affects evaluation.
KINDS = ("error", "perror", "syndrome", "xcorr", "zcorr", "param", "user")


@dataclass(frozen=True, order=True)
class Var:
    """A boolean variable with a role tag."""

    name: str
    kind: str = "user"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    def __str__(self) -> str:
        return self.name


def evar(i: int, block: str = "") -> Var:
    return Var(f"e{block}_{i}", "error")


def epvar(i: int, block: str = "") -> Var:
    return Var(f"ep{block}_{i}", "perror")


def svar(i: int, block: str = "") -> Var:
    return Var(f"s{block}_{i}", "syndrome")


def xvar(i: int, block: str = "") -> Var:
    return Var(f"cx{block}_{i}", "xcorr")


def zvar(i: int, block: str = "") -> Var:
    return Var(f"cz{block}_{i}", "zcorr")


def pvar(name: str) -> Var:
    return Var(name, "param")


@dataclass(frozen=True)
class PhasePoly:
    """GF(2)-affine phase exponent: const xor (xor of boolean atoms)."""

    const: int = 0
    atoms: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.const not in (0, 1):
            raise ValueError("phase constant must be a bit")

    @staticmethod
    def zero() -> "PhasePoly":
        return PhasePoly(0, frozenset())

    @staticmethod
    def one() -> "PhasePoly":
        return PhasePoly(1, frozenset())

    @staticmethod
    def of(v: Var) -> "PhasePoly":
        return PhasePoly(0, frozenset([v]))

    @staticmethod
    def xor_all(items: Iterable[Union[Var, "PhasePoly", int]]) -> "PhasePoly":
        acc = PhasePoly.zero()
        for it in items:
            if isinstance(it, Var):
                acc = acc ^ PhasePoly.of(it)
            elif isinstance(it, PhasePoly):
                acc = acc ^ it
            else:
                acc = acc ^ PhasePoly(int(it) & 1, frozenset())
        return acc

    def __xor__(self, other: "PhasePoly") -> "PhasePoly":
        return PhasePoly(self.const ^ other.const,
                         self.atoms ^ other.atoms)

    def flip(self) -> "PhasePoly":
        return PhasePoly(self.const ^ 1, self.atoms)

    def is_zero(self) -> bool:
        return self.const == 0 and not self.atoms

    def is_const(self) -> bool:
        return not self.atoms

    def evaluate(self, env: Mapping[Var, int]) -> int:
        val = self.const
        for a in self.atoms:
            val ^= int(env[a]) & 1
        return val

    def substitute(self, v: Var, repl: Union[Var, "PhasePoly"]) -> "PhasePoly":
        """Replace atom v.  The replacement must itself be affine; anything
        else would make the phase nonlinear, which is a hard error upstream."""
        if v not in self.atoms:
            return self
        rest = PhasePoly(self.const, self.atoms - {v})
        if isinstance(repl, Var):
            return rest ^ PhasePoly.of(repl)
        return rest ^ repl

    def restrict(self, kinds: Iterable[str]) -> "PhasePoly":
        """Keep only atoms whose kind is in `kinds` (constant dropped)."""
        ks = set(kinds)
        return PhasePoly(0, frozenset(a for a in self.atoms if a.kind in ks))

    def __str__(self) -> str:
        parts = [str(a) for a in sorted(self.atoms)]
        if self.const:
            parts.insert(0, "1")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Boolean / integer expression trees for hypotheses and goals.

class CExp:
    """Base class; nodes are frozen dataclasses."""

    def substitute(self, v: Var, repl: "CExp") -> "CExp":
        raise NotImplementedError

    def variables(self) -> frozenset:
        raise NotImplementedError


@dataclass(frozen=True)
class BConst(CExp):
    value: bool

    def substitute(self, v, repl):
        return self

    def variables(self):
        return frozenset()

    def __str__(self):
        return "true" if self.value else "false"


TRUE = BConst(True)
FALSE = BConst(False)


@dataclass(frozen=True)
class BVar(CExp):
    var: Var

    def substitute(self, v, repl):
        return repl if self.var == v else self

    def variables(self):
        return frozenset([self.var])

    def __str__(self):
        return str(self.var)


@dataclass(frozen=True)
class Not(CExp):
    arg: CExp

    def substitute(self, v, repl):
        return Not(self.arg.substitute(v, repl))

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"~({self.arg})"


@dataclass(frozen=True)
class NAry(CExp):
    op: str  # "and" | "or" | "xor"
    args: tuple

    def substitute(self, v, repl):
        return NAry(self.op, tuple(a.substitute(v, repl) for a in self.args))

    def variables(self):
        out = frozenset()
        for a in self.args:
            out |= a.variables()
        return out

    def __str__(self):
        sep = {"and": " /\\ ", "or": " \\/ ", "xor": " + "}[self.op]
        return "(" + sep.join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Imp(CExp):
    lhs: CExp
    rhs: CExp

    def substitute(self, v, repl):
        return Imp(self.lhs.substitute(v, repl), self.rhs.substitute(v, repl))

    def variables(self):
        return self.lhs.variables() | self.rhs.variables()

    def __str__(self):
        return f"({self.lhs} => {self.rhs})"


@dataclass(frozen=True)
class IConst(CExp):
    value: int

    def substitute(self, v, repl):
        return self

    def variables(self):
        return frozenset()

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Sum(CExp):
    """Integer sum of boolean terms (each term counts 0 or 1)."""

    args: tuple  # of CExp, each boolean-valued

    def substitute(self, v, repl):
        return Sum(tuple(a.substitute(v, repl) for a in self.args))

    def variables(self):
        out = frozenset()
        for a in self.args:
            out |= a.variables()
        return out

    def __str__(self):
        return "(" + " + ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Cmp(CExp):
    """Comparison of integer-valued expressions: 'le' | 'eq' | 'ge'."""

    op: str
    lhs: CExp
    rhs: CExp

    def substitute(self, v, repl):
        return Cmp(self.op, self.lhs.substitute(v, repl),
                   self.rhs.substitute(v, repl))

    def variables(self):
        return self.lhs.variables() | self.rhs.variables()

    def __str__(self):
        sym = {"le": "<=", "eq": "=", "ge": ">="}[self.op]
        return f"({self.lhs} {sym} {self.rhs})"


def conj(args: Iterable[CExp]) -> CExp:
    flat = []
    for a in args:
        if isinstance(a, BConst):
            if not a.value:
                return FALSE
            continue
        if isinstance(a, NAry) and a.op == "and":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return NAry("and", tuple(flat))


def disj(args: Iterable[CExp]) -> CExp:
    flat = []
    for a in args:
        if isinstance(a, BConst):
            if a.value:
                return TRUE
            continue
        if isinstance(a, NAry) and a.op == "or":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return NAry("or", tuple(flat))


def xor_exp(args: Iterable[CExp]) -> CExp:
    flat = [a for a in args]
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return NAry("xor", tuple(flat))


def phase_exp(p: PhasePoly) -> CExp:
    """Lower a PhasePoly to a boolean expression (xor chain)."""
    terms: list = [BVar(a) for a in sorted(p.atoms)]
    if p.const:
        terms.append(TRUE)
    if not terms:
        return FALSE
    return xor_exp(terms)


def phase_eq_zero(p: PhasePoly) -> CExp:
    if p.is_zero():
        return TRUE
    if p.is_const():
        return FALSE
    return Not(phase_exp(p))


def weight_sum(vs: Iterable[Var]) -> CExp:
    return Sum(tuple(BVar(v) for v in vs))


def evaluate(e: CExp, env: Mapping[Var, Union[int, bool]]):
    """Evaluate an expression under a total assignment.

    Boolean nodes yield bool, integer nodes yield int.
    """
    if isinstance(e, BConst):
        return e.value
    if isinstance(e, BVar):
        return bool(env[e.var])
    if isinstance(e, Not):
        return not evaluate(e.arg, env)
    if isinstance(e, NAry):
        vals = [bool(evaluate(a, env)) for a in e.args]
        if e.op == "and":
            return all(vals)
        if e.op == "or":
            return any(vals)
        out = False
        for v in vals:
            out ^= v
        return out
    if isinstance(e, Imp):
        return (not evaluate(e.lhs, env)) or bool(evaluate(e.rhs, env))
    if isinstance(e, IConst):
        return e.value
    if isinstance(e, Sum):
        return sum(int(bool(evaluate(a, env))) for a in e.args)
    if isinstance(e, Cmp):
        l, r = evaluate(e.lhs, env), evaluate(e.rhs, env)
        if e.op == "le":
            return l <= r
        if e.op == "eq":
            return l == r
        return l >= r
    raise TypeError(f"cannot evaluate {type(e).__name__}")
