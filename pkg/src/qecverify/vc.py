"""Reduction of stabilizer entailments to classical verification conditions.

The backward pass (wlp) leaves a phase form: a list of symbolic Pauli rows
with affine GF(2) phases, plus one measurement record per syndrome bit.
Entailment from the precondition rows reduces to classical formulas in
three escalating cases:

  case 1: every derived row is one of the precondition rows; compare
      phases directly.
  case 2: every derived row is a product of precondition rows; solve for
      the product over GF(2) on symplectic vectors and compare the phase
      against the sum of the factors' phases plus the sign of the actual
      operator product.
  case 3: some derived row is not in the precondition group (non-Clifford
      fragments).  Multiply a pivot row into the other stray rows until
      they land back in the group, then eliminate the leftover pivot: its
      branches pair up two syndrome outcomes onto the same subspace, so
      the big disjunction over outcomes is unchanged by dropping it.

The resulting verification condition splits into a hypothesis (error
budget, extra error-shape constraints, correction weight bounds, decoder
conditions, and the syndrome-defining equations from measured rows) and a
goal (the phase equations of the logical rows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cexpr import (BVar, CExp, Cmp, IConst, NAry, Not, PhasePoly, Sum,
                    TRUE, Var, conj, phase_eq_zero, weight_sum)
from .gf2 import solve as gf2_solve
from .pauli import PauliSum, PauliTerm, equal_up_to_phase
from .wlp import PhaseForm, Row, wlp_phaseform
from .codes import Scenario


class ReductionError(Exception):
    """The entailment does not fit the supported reduction cases."""


@dataclass
class Decomposition:
    """row = (-1)^rel * product of lhs rows at `factors` (index list)."""

    factors: Tuple[int, ...]
    rel: PhasePoly


@dataclass
class Eliminated:
    """Diagnostics for one row removed by outcome pairing."""

    label: str
    phase: PhasePoly
    pair: Optional[Tuple[str, str]]


@dataclass
class ClassicalVC:
    """hypothesis => goal over GF(2)/integer constraints.

    `mode` is "valid" (check hypothesis and not-goal unsatisfiable) or
    "sat" (detection style: the formula describes a violation, check
    satisfiability directly).
    """

    hypothesis: CExp
    goal: CExp
    mode: str = "valid"
    forall_vars: Tuple[Var, ...] = ()
    exists_vars: Tuple[Var, ...] = ()


@dataclass
class CorrectionVC:
    scenario: Scenario
    form: PhaseForm
    case: str
    classical: ClassicalVC
    equations: List[Tuple[int, PhasePoly]]
    map_constraints: List[Tuple[str, PhasePoly]]
    eliminated: List[Eliminated]
    meta: Dict = field(default_factory=dict)


def _normalize_row(row: Row) -> Row:
    """Fold a single term's symbolic sign into the row phase."""
    if not row.op.is_single():
        return row
    t = row.op.single()
    s, mag = t.scalar.sign_split()
    extra = t.sign ^ PhasePoly(s, frozenset())
    if extra.is_zero():
        return row
    clean = PauliTerm(t.n, t.xs, t.zs, mag, PhasePoly.zero(), t.iexp)
    return Row(PauliSum.of(clean), row.phase ^ extra)


def _lhs_basis(lhs_rows: Sequence[Row]):
    ops = [r.op.single() for r in lhs_rows]
    mat = [list(t.symplectic_bits()) for t in ops]
    return ops, [list(col) for col in zip(*mat)]


def decompose_product(term: PauliTerm, lhs_rows: Sequence[Row]
                      ) -> Optional[Decomposition]:
    """Express term as a signed product of the lhs operators, if possible."""
    ops = [r.op.single() for r in lhs_rows]
    a = [[(op.symplectic_bits())[j] for op in ops]
         for j in range(2 * term.n)]
    b = list(term.symplectic_bits())
    x = gf2_solve(a, b)
    if x is None:
        return None
    factors = tuple(i for i, xi in enumerate(x) if xi)
    prod = PauliTerm.identity(term.n)
    for i in factors:
        prod = prod.mul(ops[i])
    rel = equal_up_to_phase(PauliSum.of(term), PauliSum.of(prod))
    if rel is None:
        return None
    return Decomposition(factors, rel)


def classify(lhs_rows: Sequence[Row], form: PhaseForm) -> str:
    """Which reduction case the derived rows fall into."""
    bodies = {r.op.single().body_key() for r in lhs_rows}
    case = "case1"
    for row in form.rows:
        if not row.op.is_single():
            return "case3"
        nr = _normalize_row(row)
        if nr.op.single().body_key() in bodies:
            continue
        if decompose_product(nr.op.single(), lhs_rows) is None:
            return "case3"
        case = "case2"
    return case


def reduce_case2(lhs_rows: Sequence[Row], rows: Sequence[Row]
                 ) -> List[Tuple[int, PhasePoly]]:
    """Phase equation (must be 0) for each row, via product decomposition."""
    eqs: List[Tuple[int, PhasePoly]] = []
    for idx, row in enumerate(rows):
        nr = _normalize_row(row)
        if not nr.op.is_single():
            raise ReductionError(f"row {idx} is not a single Pauli")
        dec = decompose_product(nr.op.single(), lhs_rows)
        if dec is None:
            raise ReductionError(
                f"row {idx} ({nr.op.single().base_label()}) is outside the "
                "precondition group")
        poly = nr.phase ^ dec.rel
        for j in dec.factors:
            poly = poly ^ lhs_rows[j].phase
        eqs.append((idx, poly))
    return eqs


def reduce_case1(lhs_rows: Sequence[Row], rows: Sequence[Row]
                 ) -> List[Tuple[int, PhasePoly]]:
    return reduce_case2(lhs_rows, rows)


def _residual(row: Row, lhs_rows: Sequence[Row]) -> bool:
    nr = _normalize_row(row)
    if not nr.op.is_single():
        return True
    return decompose_product(nr.op.single(), lhs_rows) is None


def _majority_type(op: PauliSum) -> Optional[str]:
    """Dominant letter type over all terms: X-like vs Z-like sites."""
    nx = nz = 0
    for t in op.terms:
        for q in range(t.n):
            bit = 1 << q
            if t.xs & bit and not t.zs & bit:
                nx += 1
            elif t.zs & bit and not t.xs & bit:
                nz += 1
    if nx == nz:
        return None
    return "X" if nx > nz else "Z"


def _pauli_type(term: PauliTerm) -> Optional[str]:
    if term.zs == 0 and term.xs != 0:
        return "X"
    if term.xs == 0 and term.zs != 0:
        return "Z"
    return None


def eliminate_noncommuting(lhs_rows: Sequence[Row], form: PhaseForm
                           ) -> Tuple[PhaseForm, List[Eliminated], List[int]]:
    """Case 3 step: multiply stray rows back into the group, drop pivots.

    Returns the reduced form, diagnostics for eliminated rows, and the
    original indices of the rows kept (for record bookkeeping).
    """
    n_rows = len(form.rows)
    rows = [_normalize_row(r) for r in form.rows]
    keep = list(range(n_rows))
    recorded = {m.row for m in form.records}
    logical_idx = [i for i in range(n_rows) if i not in recorded]
    cap = max(1, len(lhs_rows) ** 2)
    eliminated: List[Eliminated] = []
    pivots: List[int] = []
    for _ in range(cap):
        resid = [i for i in keep if _residual(rows[i], lhs_rows)
                 and i not in pivots]
        if not resid:
            break
        # pick the pivot among recorded residual rows: prefer a measured
        # check whose Pauli type matches the stray logical rows (so the
        # product clears them cleanly), then the lowest index
        cand = [i for i in resid if i in recorded] or resid
        stray_types = {_majority_type(rows[i].op) for i in logical_idx
                       if _residual(rows[i], lhs_rows)} - {None}
        meas_type: Dict[int, Optional[str]] = {}
        for m in form.records:
            if m.op is not None and m.op.is_single():
                meas_type[m.row] = _pauli_type(m.op.single())

        def score(p: int) -> Tuple[int, int]:
            t = meas_type.get(p)
            return (0 if (t and t in stray_types) else 1, p)

        pivot = min(cand, key=score)
        pivots.append(pivot)
        prow = rows[pivot]
        for i in keep:
            if i == pivot or i in pivots:
                continue
            if not _residual(rows[i], lhs_rows):
                continue
            merged = rows[i].op.mul(prow.op)
            rows[i] = _normalize_row(Row(merged, rows[i].phase ^ prow.phase))
    resid = [i for i in keep if _residual(rows[i], lhs_rows)]
    if any(i not in pivots for i in resid):
        raise ReductionError("rows remain outside the group after pivoting")

    # drop pivots; each must commute with every kept row and carry a
    # syndrome-dependent phase so that outcomes pair up
    for pivot in pivots:
        others = [rows[i] for i in keep if i != pivot]
        prow = rows[pivot]
        for o in others:
            if not prow.op.commutes_with(o.op):
                raise ReductionError(
                    "eliminated row anticommutes with a kept row")
        syn = prow.phase.restrict(("syndrome",))
        if syn.atoms == frozenset():
            raise ReductionError(
                "eliminated row has no syndrome-dependent phase")
        label = " + ".join(sorted(t.base_label() for t in prow.op.terms))
        eliminated.append(Eliminated(label, prow.phase, None))
        keep = [i for i in keep if i != pivot]

    new_rows = [rows[i] for i in keep]
    new_records = [m for m in form.records if m.row in keep]
    remap = {old: new for new, old in enumerate(keep)}
    new_records = [type(m)(m.var, remap[m.row], m.cond, m.op)
                   for m in new_records]
    out = PhaseForm(form.n, new_rows, form.bound, new_records)
    return out, eliminated, keep


def _branch_pair(eliminated: Eliminated,
                 hyp_eqs: List[PhasePoly],
                 syn_vars: List[Var],
                 type_mask: Optional[Sequence[int]]) -> Optional[Tuple[str, str]]:
    """Representative pair of syndrome outcomes joined by the elimination.

    Base: the achievable outcome (all recorded phase equations hold with
    non-syndrome variables at zero) where the eliminated row's phase is 0.
    Partner: flip the block of same-type syndromes correlated with it.
    """
    idx = {v: i for i, v in enumerate(syn_vars)}
    m = len(syn_vars)
    a_rows: List[List[int]] = []
    b_vec: List[int] = []
    for eq in hyp_eqs:
        poly = eq.restrict(("syndrome",))
        row = [0] * m
        for v in poly.atoms:
            row[idx[v]] = 1
        a_rows.append(row)
        b_vec.append(eq.const)  # all non-syndrome variables set to zero
    target = eliminated.phase.restrict(("syndrome",))
    t_row = [0] * m
    for v in target.atoms:
        if v not in idx:
            return None
        t_row[idx[v]] = 1
    # base: solve the recorded equations together with "phase of the
    # eliminated row = 0"
    base = gf2_solve(a_rows + [t_row], b_vec + [eliminated.phase.const])
    if base is None:
        return None
    # homogeneous direction that flips the eliminated phase
    hom = gf2_solve(a_rows + [t_row], [0] * len(a_rows) + [1])
    if hom is None:
        return None
    if type_mask is not None:
        hom = [h & t for h, t in zip(hom, type_mask)]
    partner = [x ^ h for x, h in zip(base, hom)]
    return ("".join(str(int(x)) for x in base),
            "".join(str(int(x)) for x in partner))


def build_correction_vc(scenario: Scenario,
                        budget: Optional[int] = None,
                        constraints: Sequence[CExp] = (),
                        exists_form: bool = False) -> CorrectionVC:
    """Full pipeline: wlp, reduction, hypothesis/goal split."""
    post = PhaseForm(scenario.n, list(scenario.post_rows), (), [])
    form = wlp_phaseform(scenario.prog, post)
    lhs = scenario.lhs_rows
    case = classify(lhs, form)
    eliminated: List[Eliminated] = []
    work = form
    if case == "case3":
        work, eliminated, _ = eliminate_noncommuting(lhs, form)
    eqs = reduce_case2(lhs, work.rows)

    recorded = {m.row for m in work.records}
    hyp_polys = [poly for idx, poly in eqs if idx in recorded]
    goal_polys = [poly for idx, poly in eqs if idx not in recorded]

    syn_vars = sorted({a for poly in hyp_polys for a in poly.atoms
                       if a.kind == "syndrome"} |
                      {m.var for m in work.records})
    if eliminated:
        for el in eliminated:
            mask = _elim_type_mask(scenario, work, el, syn_vars)
            el.pair = _branch_pair(el, hyp_polys, syn_vars, mask)

    hyp_parts: List[CExp] = []
    bud = budget if budget is not None else scenario.budget
    if bud is not None and scenario.error_vars:
        hyp_parts.append(Cmp("le", weight_sum(scenario.error_vars),
                             IConst(bud)))
    hyp_parts.extend(scenario.constraints)
    hyp_parts.extend(constraints)
    for corr_vars, err_bound in scenario.weight_bounds:
        if isinstance(err_bound, int):
            hyp_parts.append(Cmp("le", weight_sum(corr_vars),
                                 IConst(err_bound)))
        elif err_bound:
            hyp_parts.append(Cmp("le", weight_sum(corr_vars),
                                 weight_sum(err_bound)))
    # decoder conditions survive elimination: the measurement happened
    # even if its row was paired away
    for m in form.records:
        hyp_parts.append(phase_eq_zero(PhasePoly.of(m.var) ^ m.cond))
    for poly in hyp_polys:
        hyp_parts.append(phase_eq_zero(poly))
    goal_parts = [phase_eq_zero(poly) for poly in goal_polys]

    hypothesis = conj(hyp_parts)
    goal = conj(goal_parts) if goal_parts else TRUE

    all_vars = set(hypothesis.variables()) | set(goal.variables())
    forall = tuple(sorted(v for v in all_vars
                          if v.kind in ("error", "perror", "param", "user")))
    exists = tuple(sorted(v for v in all_vars
                          if v.kind in ("syndrome", "xcorr", "zcorr")))
    classical = ClassicalVC(hypothesis, goal,
                            mode="valid",
                            forall_vars=forall, exists_vars=exists)
    meta = {"exists_form": exists_form, "syndrome_vars":
            [v.name for v in syn_vars]}
    map_constraints = [(f"t_{idx + 1}", poly) for idx, poly in eqs]
    return CorrectionVC(scenario, work, case, classical, eqs,
                        map_constraints, eliminated, meta)


def _elim_type_mask(scenario: Scenario, form: PhaseForm, el: Eliminated,
                    syn_vars: List[Var]) -> Optional[List[int]]:
    """Mask restricting the reported flip to syndromes of checks with the
    same Pauli type as the eliminated row's own measured check."""
    own = el.phase.restrict(("syndrome",)).atoms
    if not own:
        return None
    types: Dict[Var, Optional[str]] = {}
    # records were taken before elimination, so look the types up by
    # syndrome variable name against the scenario's generators
    gens = scenario.code.generators
    for v in syn_vars:
        try:
            j = int(v.name.split("_")[-1])
        except ValueError:
            types[v] = None
            continue
        if 1 <= j <= len(gens):
            types[v] = _pauli_type(gens[j - 1])
        else:
            types[v] = None
    own_types = {types.get(v) for v in own} - {None}
    if len(own_types) != 1:
        return None
    t = own_types.pop()
    return [1 if types.get(v) == t else 0 for v in syn_vars]


# ---------------------------------------------------------------------------
# Detection.

@dataclass
class DetectionVC:
    code: "StabilizerCode"
    dt: int
    classical: ClassicalVC
    xvars: List[Var]
    zvars: List[Var]


def build_detection_vc(code, dt: int,
                       constraints: Sequence[CExp] = ()) -> DetectionVC:
    """Satisfiability query for an undetected logical error of weight
    below dt: zero syndrome, some logical operator flipped.

    Unsatisfiable means every error of weight 1..dt-1 is detected.
    """
    n = code.n
    ex = [Var(f"ex_{i}", "error") for i in range(1, n + 1)]
    ez = [Var(f"ez_{i}", "error") for i in range(1, n + 1)]

    def overlap_phase(op: PauliTerm) -> PhasePoly:
        # anticommutation count of the error with op, as a parity
        poly = PhasePoly.zero()
        for i in range(n):
            bit = 1 << i
            if op.zs & bit:
                poly = poly ^ PhasePoly.of(ex[i])
            if op.xs & bit:
                poly = poly ^ PhasePoly.of(ez[i])
        return poly

    parts: List[CExp] = []
    weight = Sum(tuple(NAry("or", (BVar(a), BVar(b)))
                       for a, b in zip(ex, ez)))
    parts.append(Cmp("ge", weight, IConst(1)))
    parts.append(Cmp("le", weight, IConst(dt - 1)))
    for g in code.generators:
        parts.append(phase_eq_zero(overlap_phase(g)))
    flips = []
    for i in range(1, code.k + 1):
        for basis in ("X", "Z"):
            flips.append(Not(phase_eq_zero(overlap_phase(
                code.logical(basis, i)))))
    parts.append(NAry("or", tuple(flips)))
    parts.extend(constraints)
    classical = ClassicalVC(conj(parts), TRUE, mode="sat")
    return DetectionVC(code, dt, classical, ex, ez)
