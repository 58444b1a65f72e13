"""Builtin code families and verification scenarios.

The rotated surface code layout: data qubit (r, c) is qubit r*d + c + 1,
bulk faces are checkerboard colored (X when r + c is even), weight-2
boundary checks alternate along each edge, logical X is the top row and
logical Z the left column.  The parity conventions were fixed by the
commutation/rank/logical invariants, which `StabilizerCode.validate`
re-checks on every construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cexpr import (CExp, PhasePoly, TRUE, Var, conj, Cmp, Sum, BVar, IConst, Not,
                    evar, epvar, svar, xvar, zvar, pvar)
from .pauli import PauliSum, PauliTerm
from .prog import (Assign, For, If, InitQ, Measure, PauliPattern, Seq, Skip,
                   Stmt, Unitary, desugar, mkvar, _ConcretePauli)
from .stabcode import StabilizerCode


def repetition(n: int = 3) -> StabilizerCode:
    """Bit-flip repetition code; the distance is against X errors only."""
    if n < 2:
        raise ValueError("repetition code needs n >= 2")
    gens = [PauliTerm.from_sites(n, [(i, "Z"), (i + 1, "Z")])
            for i in range(1, n)]
    lx = PauliTerm.from_sites(n, [(i, "X") for i in range(1, n + 1)])
    lz = PauliTerm.from_sites(n, [(1, "Z")])
    return StabilizerCode(f"repetition-{n}", n, 1, n, gens, [lx], [lz])


def steane() -> StabilizerCode:
    gens = [PauliTerm.from_label(7, lab) for lab in
            ["X1X3X5X7", "X2X3X6X7", "X4X5X6X7",
             "Z1Z3Z5Z7", "Z2Z3Z6Z7", "Z4Z5Z6Z7"]]
    lx = PauliTerm.from_label(7, "X1X2X3X4X5X6X7")
    lz = PauliTerm.from_label(7, "Z1Z2Z3Z4Z5Z6Z7")
    return StabilizerCode("steane", 7, 1, 3, gens, [lx], [lz])


def rotated_surface(d: int) -> StabilizerCode:
    if d < 3 or d % 2 == 0:
        raise ValueError("rotated surface code needs odd d >= 3")
    n = d * d

    def q(r: int, c: int) -> int:
        return r * d + c + 1

    gens: List[PauliTerm] = []
    for r in range(d - 1):
        for c in range(d - 1):
            letter = "X" if (r + c) % 2 == 0 else "Z"
            gens.append(PauliTerm.from_sites(
                n, [(q(r, c), letter), (q(r, c + 1), letter),
                    (q(r + 1, c), letter), (q(r + 1, c + 1), letter)]))
    for r in range(1, d - 1, 2):  # left edge, X pairs
        gens.append(PauliTerm.from_sites(
            n, [(q(r, 0), "X"), (q(r + 1, 0), "X")]))
    for r in range(0, d - 2, 2):  # right edge, X pairs
        gens.append(PauliTerm.from_sites(
            n, [(q(r, d - 1), "X"), (q(r + 1, d - 1), "X")]))
    for c in range(0, d - 2, 2):  # top edge, Z pairs
        gens.append(PauliTerm.from_sites(
            n, [(q(0, c), "Z"), (q(0, c + 1), "Z")]))
    for c in range(1, d - 1, 2):  # bottom edge, Z pairs
        gens.append(PauliTerm.from_sites(
            n, [(q(d - 1, c), "Z"), (q(d - 1, c + 1), "Z")]))
    lx = PauliTerm.from_sites(n, [(q(0, c), "X") for c in range(d)])
    lz = PauliTerm.from_sites(n, [(q(r, 0), "Z") for r in range(d)])
    return StabilizerCode(f"surface-{d}", n, 1, d, gens, [lx], [lz])


BUILTIN_CODES = {
    "repetition": lambda arg=3: repetition(int(arg)),
    "steane": lambda arg=None: steane(),
    "surface": lambda arg=3: rotated_surface(int(arg)),
}


def get_code(spec: str) -> StabilizerCode:
    """Resolve a code spec like 'steane', 'surface:5', 'repetition:3'."""
    name, _, arg = spec.partition(":")
    if name not in BUILTIN_CODES:
        raise ValueError(f"unknown code {name!r}; "
                         f"builtins: {', '.join(sorted(BUILTIN_CODES))}")
    return BUILTIN_CODES[name](arg) if arg else BUILTIN_CODES[name]()


# ---------------------------------------------------------------------------
# Scenarios.

from .wlp import Row  # noqa: E402  (Row is the shared assertion row type)


@dataclass
class Scenario:
    """A correction/detection verification problem instance."""

    name: str
    code: StabilizerCode
    n: int
    logical_basis: str
    prog: Stmt
    lhs_rows: List[Row]
    post_rows: List[Row]
    error_vars: List[Var]
    budget: Optional[int]
    weight_bounds: List[Tuple[List[Var], List[Var]]]
    constraints: List[CExp] = field(default_factory=list)
    meta: Dict = field(default_factory=dict)


# Ideal one-qubit logical images for transversal gates, in the wlp
# direction: basis letter -> (image letter, phase constant).
_LOGICAL_IMAGE = {
    "I": {"X": ("X", 0), "Z": ("Z", 0)},
    "X": {"X": ("X", 0), "Z": ("Z", 1)},
    "Y": {"X": ("X", 1), "Z": ("Z", 1)},
    "Z": {"X": ("X", 1), "Z": ("Z", 0)},
    "H": {"X": ("Z", 0), "Z": ("X", 0)},
}


def _shift(term: PauliTerm, n: int, offset: int) -> PauliTerm:
    return PauliTerm(n, term.xs << offset, term.zs << offset,
                     term.scalar, term.sign, term.iexp)


def _is_css_type(g: PauliTerm) -> Optional[str]:
    if g.zs == 0 and g.xs != 0:
        return "X"
    if g.xs == 0 and g.zs != 0:
        return "Z"
    return None


def _error_block(code: StabilizerCode, offset: int, tag: str, letter: str,
                 kind: str) -> Tuple[List[Stmt], List[Var]]:
    """Conditional Pauli injections on every data qubit of a block."""
    stmts: List[Stmt] = []
    vars_: List[Var] = []
    mk = epvar if kind == "perror" else evar
    for i in range(1, code.n + 1):
        v = mk(i, tag)
        vars_.append(v)
        stmts.append(Unitary(letter, (offset + i,), v.name))
    return stmts, vars_


def _cycle_tail(code: StabilizerCode, offset: int, tag: str, n: int,
                families: Sequence[str]
                ) -> Tuple[List[Stmt], Dict[str, List[Var]]]:
    """Syndrome measurement plus conditional corrections for one block."""
    stmts: List[Stmt] = []
    for j, g in enumerate(code.generators, start=1):
        shifted = _shift(g, n, offset)
        stmts.append(Measure(svar(j, tag).name,
                             _ConcretePauli(PauliSum.of(shifted))))
    corr: Dict[str, List[Var]] = {"X": [], "Z": []}
    for fam in families:
        mk = xvar if fam == "X" else zvar
        for i in range(1, code.n + 1):
            v = mk(i, tag)
            corr[fam].append(v)
            stmts.append(Unitary(fam, (offset + i,), v.name))
    return stmts, corr


def _correction_families(code: StabilizerCode, letter: str) -> List[str]:
    """Which correction families the syndrome can steer: X corrections
    answer Z-type checks and vice versa."""
    types = {_is_css_type(g) for g in code.generators}
    fams = []
    if letter in ("X", "Y", "H", "T") and "Z" in types:
        fams.append("X")
    if letter in ("Z", "Y", "H", "T") and "X" in types:
        fams.append("Z")
    return fams or ([f for t in types if t
                     for f in (("X",) if t == "Z" else ("Z",))])


def ec_cycle(code: StabilizerCode, logical: str = "I", error: str = "X",
             budget: Optional[int] = None,
             error_sites: Optional[Sequence[int]] = None,
             positions: Sequence[str] = ("propagated", "standard"),
             logical_basis: str = "Z") -> Scenario:
    """One error-corrected cycle: propagated errors, a transversal logical
    gate, standard errors, syndrome extraction and Pauli corrections."""
    logical = logical.upper()
    error = error.upper()
    basis = logical_basis.upper()
    if logical not in _LOGICAL_IMAGE:
        raise ValueError(f"unsupported logical gate {logical!r}")
    n = code.n
    stmts: List[Stmt] = []
    error_vars: List[Var] = []
    pauli_error = error in ("X", "Y", "Z")

    def inject(kind: str) -> None:
        nonlocal stmts, error_vars
        if pauli_error:
            blk, vs = _error_block(code, 0, "", error, kind)
            stmts.extend(blk)
            error_vars.extend(vs)
        else:
            for site in (error_sites or ()):
                stmts.append(Unitary(error, (site,), None))

    if "propagated" in positions:
        inject("perror")
    if logical != "I":
        for i in range(1, n + 1):
            stmts.append(Unitary(logical, (i,)))
    if "standard" in positions:
        inject("error")

    fams = _correction_families(code, error)
    tail, corr = _cycle_tail(code, 0, "", n, fams)
    stmts.extend(tail)

    b = pvar("b")
    lhs_rows = [Row(PauliSum.of(g), PhasePoly.zero())
                for g in code.generators]
    post_rows = [Row(PauliSum.of(g), PhasePoly.zero())
                 for g in code.generators]
    for i in range(1, code.k + 1):
        bp = PhasePoly.of(b) if code.k == 1 else PhasePoly.of(
            pvar(f"b_{i}"))
        lhs_rows.append(Row(PauliSum.of(code.logical(basis, i)), bp))
        img, const = _LOGICAL_IMAGE[logical][basis]
        post_rows.append(Row(PauliSum.of(code.logical(img, i)),
                             bp ^ PhasePoly(const, frozenset())))

    weight_bounds: List[Tuple[List[Var], object]] = []
    for fam in fams:
        if pauli_error:
            weight_bounds.append((corr[fam], list(error_vars)))
        else:
            weight_bounds.append((corr[fam], len(error_sites or ())))

    state = "" if pauli_error else f" at {list(error_sites or ())}"
    return Scenario(
        name=f"{code.name}({error},{logical}){state}",
        code=code, n=n, logical_basis=basis,
        prog=Seq.of(stmts), lhs_rows=lhs_rows, post_rows=post_rows,
        error_vars=error_vars, budget=budget,
        weight_bounds=weight_bounds,
        meta={"error": error, "logical": logical,
              "families": fams, "sites": list(error_sites or ())})


def _multi_block_rows(codes_: Sequence[StabilizerCode], n: int
                      ) -> List[Row]:
    rows = []
    offset = 0
    for code in codes_:
        for g in code.generators:
            rows.append(Row(PauliSum.of(_shift(g, n, offset)),
                            PhasePoly.zero()))
        offset += code.n
    return rows


def cnot_scenario(code: StabilizerCode, error: str = "X",
                  budget: Optional[int] = None,
                  logical_basis: str = "Z") -> Scenario:
    """Transversal CNOT between two blocks with propagated errors: errors
    hit block one, propagate through the CNOTs, then both blocks run a
    correction cycle."""
    error = error.upper()
    basis = logical_basis.upper()
    n = 2 * code.n
    stmts: List[Stmt] = []
    error_vars: List[Var] = []
    blk, vs = _error_block(code, 0, "", error, "perror")
    # propagated errors live on block one, before the CNOTs
    stmts.extend(blk)
    error_vars.extend(vs)
    for i in range(1, code.n + 1):
        stmts.append(Unitary("CNOT", (i, code.n + i)))
    fams = _correction_families(code, error)
    corr_bounds: List[Tuple[List[Var], List[Var]]] = []
    for b_i, offset in ((1, 0), (2, code.n)):
        tail, corr = _cycle_tail(code, offset, str(b_i), n, fams)
        stmts.extend(tail)
        for fam in fams:
            corr_bounds.append((corr[fam], list(error_vars)))

    lhs_rows = _multi_block_rows([code, code], n)
    post_rows = _multi_block_rows([code, code], n)
    b1, b2 = pvar("b_1"), pvar("b_2")
    l1 = _shift(code.logical(basis, 1), n, 0)
    l2 = _shift(code.logical(basis, 1), n, code.n)
    lhs_rows.append(Row(PauliSum.of(l1), PhasePoly.of(b1)))
    lhs_rows.append(Row(PauliSum.of(l2), PhasePoly.of(b2)))
    if basis == "Z":
        # logical CNOT pushes Z2 to Z1 Z2; signs ride along unchanged
        post_rows.append(Row(PauliSum.of(l1), PhasePoly.of(b1)))
        post_rows.append(Row(PauliSum.of(l1.mul(l2)), PhasePoly.of(b2)))
    else:
        # logical CNOT pushes X1 to X1 X2; signs ride along unchanged
        post_rows.append(Row(PauliSum.of(l1.mul(l2)), PhasePoly.of(b1)))
        post_rows.append(Row(PauliSum.of(l2), PhasePoly.of(b2)))
    return Scenario(
        name=f"cnot-{code.name}({error})", code=code, n=n,
        logical_basis=basis, prog=Seq.of(stmts),
        lhs_rows=lhs_rows, post_rows=post_rows, error_vars=error_vars,
        budget=budget, weight_bounds=corr_bounds,
        meta={"error": error, "logical": "CNOT", "families": fams,
              "blocks": 2})


def ghz_scenario(code: StabilizerCode, error: str = "X",
                 budget: Optional[int] = None) -> Scenario:
    """Three-block logical GHZ preparation followed by one correction
    cycle per block."""
    error = error.upper()
    n = 3 * code.n
    stmts: List[Stmt] = []
    error_vars: List[Var] = []
    for i in range(1, code.n + 1):  # logical H on block two
        stmts.append(Unitary("H", (code.n + i,)))
    blk, vs = _error_block(code, 0, "1", error, "perror")
    stmts.extend(blk)
    error_vars.extend(vs)
    blk, vs = _error_block(code, code.n, "2", error, "perror")
    stmts.extend(blk)
    error_vars.extend(vs)
    for i in range(1, code.n + 1):  # CNOT block two -> block one
        stmts.append(Unitary("CNOT", (code.n + i, i)))
    for i in range(1, code.n + 1):  # CNOT block one -> block three
        stmts.append(Unitary("CNOT", (i, 2 * code.n + i)))
    for b_i in (1, 2, 3):
        blk, vs = _error_block(code, (b_i - 1) * code.n, str(b_i),
                               error, "error")
        stmts.extend(blk)
        error_vars.extend(vs)
    fams = _correction_families(code, error)
    corr_bounds: List[Tuple[List[Var], List[Var]]] = []
    for b_i in (1, 2, 3):
        tail, corr = _cycle_tail(code, (b_i - 1) * code.n,
                                 str(b_i), n, fams)
        stmts.extend(tail)
        for fam in fams:
            corr_bounds.append((corr[fam], list(error_vars)))

    lhs_rows = _multi_block_rows([code, code, code], n)
    post_rows = _multi_block_rows([code, code, code], n)
    b1, b2, b3 = pvar("b_1"), pvar("b_2"), pvar("b_3")
    lz = [_shift(code.logical("Z", 1), n, off)
          for off in (0, code.n, 2 * code.n)]
    lx = [_shift(code.logical("X", 1), n, off)
          for off in (0, code.n, 2 * code.n)]
    for l, b in zip(lz, (b1, b2, b3)):
        lhs_rows.append(Row(PauliSum.of(l), PhasePoly.of(b)))
    # ideal GHZ images of Z1, Z2, Z3 under (H2; CNOT 2->1; CNOT 1->3)
    post_rows.append(Row(PauliSum.of(lz[0].mul(lz[1])), PhasePoly.of(b1)))
    post_rows.append(Row(PauliSum.of(lx[0].mul(lx[1]).mul(lx[2])),
                         PhasePoly.of(b2)))
    post_rows.append(Row(PauliSum.of(lz[0].mul(lz[2])), PhasePoly.of(b3)))
    return Scenario(
        name=f"ghz-{code.name}({error})", code=code, n=n,
        logical_basis="Z", prog=Seq.of(stmts),
        lhs_rows=lhs_rows, post_rows=post_rows, error_vars=error_vars,
        budget=budget, weight_bounds=corr_bounds,
        meta={"error": error, "logical": "GHZ", "families": fams,
              "blocks": 3})


# ---------------------------------------------------------------------------
# Error-shape constraints.

def locality_constraint(scenario: Scenario, sites: Sequence[int]
                        ) -> List[CExp]:
    """Errors may only occur on the given qubit sites; all other error
    indicators are pinned to zero."""
    allowed = set(sites)
    out: List[CExp] = []
    for v in scenario.error_vars:
        idx = int(v.name.rsplit("_", 1)[1])
        if idx not in allowed:
            out.append(Not(BVar(v)))
    return out


def discreteness_constraint(scenario: Scenario, segment: int
                            ) -> List[CExp]:
    """At most one error per consecutive segment of qubits."""
    groups: Dict[int, List[Var]] = {}
    for v in scenario.error_vars:
        idx = int(v.name.rsplit("_", 1)[1])
        groups.setdefault((idx - 1) // segment, []).append(v)
    out: List[CExp] = []
    for vs in groups.values():
        out.append(Cmp("le", Sum(tuple(BVar(v) for v in vs)), IConst(1)))
    return out
