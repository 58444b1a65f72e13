"""Self-contained SMT-LIB2 bitvector solver used when no external SMT
solver is installed.

Supports the small QF_BV fragment emitted by `smt.encode`: width-1
constants, bvnot/bvand/bvor/bvxor, ripple bvadd over zero-extended bits,
bvule/bvuge comparisons, ite, and boolean connectives.  Formulas are
bit-blasted through Tseitin encoding into CNF and decided by a CDCL
solver with two-watched-literal propagation, first-UIP clause learning,
VSIDS-style activity, phase saving, and Luby restarts.  Quantified input
answers `unknown`.

Usage: qecv-solve FILE.smt2
"""

from __future__ import annotations

import sys
from typing import Dict, List, Optional, Tuple


# ---------------------------------------------------------------------------
# S-expression reader.

def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.index("|", i + 1)
            yield text[i + 1:j]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str) -> List:
    stack: List[List] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            top = stack.pop()
            stack[-1].append(top)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parentheses")
    return stack[0]


# ---------------------------------------------------------------------------
# CDCL SAT core.  Literals are nonzero ints, DIMACS convention.

class Solver:
    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: List[List[int]] = []
        self.watches: Dict[int, List[int]] = {}
        self.assign: Dict[int, bool] = {}
        self.level: Dict[int, int] = {}
        self.reason: Dict[int, Optional[int]] = {}
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.activity: Dict[int, float] = {}
        self.var_inc = 1.0
        self.phase: Dict[int, bool] = {}
        self.ok = True

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.activity[v] = 0.0
        self.phase[v] = False
        return v

    def value(self, lit: int) -> Optional[bool]:
        v = self.assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def add_clause(self, lits: List[int]) -> None:
        lits = sorted(set(lits), key=abs)
        if any(-l in lits for l in lits):
            return
        if any(self.value(l) is True and self.level.get(abs(l), 0) == 0
               for l in lits):
            return
        lits = [l for l in lits if self.value(l) is not False
                or self.level.get(abs(l), 0) > 0]
        if not self.ok:
            return
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            if not self._enqueue(lits[0], None):
                self.ok = False
            elif self._propagate() is not None:
                self.ok = False
            return
        idx = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(idx)
        self.watches.setdefault(lits[1], []).append(idx)

    def _enqueue(self, lit: int, reason: Optional[int]) -> bool:
        val = self.value(lit)
        if val is not None:
            return val
        v = abs(lit)
        self.assign[v] = lit > 0
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> Optional[int]:
        """Unit propagation; returns a conflicting clause index or None."""
        qhead = getattr(self, "_qhead", 0)
        while qhead < len(self.trail):
            lit = self.trail[qhead]
            qhead += 1
            falsified = -lit
            watchlist = self.watches.get(falsified, [])
            i = 0
            while i < len(watchlist):
                ci = watchlist[i]
                clause = self.clauses[ci]
                # make sure the falsified literal is in slot 1
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) is True:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        watchlist[i] = watchlist[-1]
                        watchlist.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self.value(clause[0]) is False:
                    self._qhead = qhead
                    return ci
                self._enqueue(clause[0], ci)
                i += 1
        self._qhead = qhead
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] = self.activity.get(v, 0.0) + self.var_inc
        if self.activity[v] > 1e100:
            for k in self.activity:
                self.activity[k] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, confl: int) -> Tuple[List[int], int]:
        learnt = []
        seen = set()
        counter = 0
        lit = 0
        cur_level = len(self.trail_lim)
        idx = len(self.trail) - 1
        clause = self.clauses[confl]
        p = None
        while True:
            for q in clause:
                if q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] == cur_level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            v = abs(lit)
            seen.discard(v)
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[v]]
            p = lit
        learnt.insert(0, -lit)
        back = 0
        if len(learnt) > 1:
            # keep a literal of the backtrack level in the second watch
            # slot so the watch invariant survives future backtracking
            hi = max(range(1, len(learnt)),
                     key=lambda i: self.level[abs(learnt[i])])
            back = self.level[abs(learnt[hi])]
            learnt[1], learnt[hi] = learnt[hi], learnt[1]
        return learnt, back

    def _backtrack(self, lvl: int) -> None:
        while len(self.trail_lim) > lvl:
            lim = self.trail_lim.pop()
            while len(self.trail) > lim:
                lit = self.trail.pop()
                v = abs(lit)
                self.phase[v] = self.assign[v]
                del self.assign[v]
                del self.level[v]
                del self.reason[v]
            self._qhead = min(getattr(self, "_qhead", 0), len(self.trail))

    def _decide(self) -> Optional[int]:
        best, best_act = 0, -1.0
        for v in range(1, self.nvars + 1):
            if v not in self.assign:
                act = self.activity.get(v, 0.0)
                if act > best_act:
                    best, best_act = v, act
        if best == 0:
            return None
        return best if self.phase.get(best, False) else -best

    def solve(self) -> bool:
        if not self.ok:
            return False
        if self._propagate() is not None:
            self.ok = False
            return False
        conflicts = 0
        limit = 64
        luby_seq = _luby()
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                if not self.trail_lim:
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(idx)
                    self.watches.setdefault(learnt[1], []).append(idx)
                    self._enqueue(learnt[0], idx)
                self.var_inc /= 0.95
                if conflicts >= limit:
                    conflicts = 0
                    limit = 64 * next(luby_seq)
                    self._backtrack(0)
            else:
                lit = self._decide()
                if lit is None:
                    return True
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, None)


def _luby():
    u, v = 1, 1
    while True:
        yield v
        if (u & -u) == v:
            u += 1
            v = 1
        else:
            v *= 2


# ---------------------------------------------------------------------------
# Bit blasting.

class Blaster:
    """Lowers bitvector terms to literal vectors (LSB first)."""

    def __init__(self, solver: Solver) -> None:
        self.s = solver
        self.true_lit = solver.new_var()
        solver.add_clause([self.true_lit])
        self.consts: Dict[str, List[int]] = {}
        self.cache: Dict[Tuple, int] = {}

    def const_bit(self, b: int) -> int:
        return self.true_lit if b else -self.true_lit

    def _gate(self, key: Tuple, mk) -> int:
        if key in self.cache:
            return self.cache[key]
        out = mk()
        self.cache[key] = out
        return out

    def and_bit(self, a: int, b: int) -> int:
        if a == self.true_lit:
            return b
        if b == self.true_lit:
            return a
        if a == -self.true_lit or b == -self.true_lit:
            return -self.true_lit
        if a == b:
            return a
        if a == -b:
            return -self.true_lit
        key = ("and",) + tuple(sorted((a, b)))

        def mk() -> int:
            o = self.s.new_var()
            self.s.add_clause([-o, a])
            self.s.add_clause([-o, b])
            self.s.add_clause([o, -a, -b])
            return o
        return self._gate(key, mk)

    def or_bit(self, a: int, b: int) -> int:
        return -self.and_bit(-a, -b)

    def xor_bit(self, a: int, b: int) -> int:
        if a == self.true_lit:
            return -b
        if b == self.true_lit:
            return -a
        if a == -self.true_lit:
            return b
        if b == -self.true_lit:
            return a
        if a == b:
            return -self.true_lit
        if a == -b:
            return self.true_lit
        key = ("xor",) + tuple(sorted((abs(a), abs(b)))) + \
            ((a > 0) == (b > 0),)

        def mk() -> int:
            o = self.s.new_var()
            self.s.add_clause([-o, a, b])
            self.s.add_clause([-o, -a, -b])
            self.s.add_clause([o, -a, b])
            self.s.add_clause([o, a, -b])
            return o
        return self._gate(key, mk)

    def ite_bit(self, c: int, t: int, e: int) -> int:
        return self.or_bit(self.and_bit(c, t), self.and_bit(-c, e))

    def add_vec(self, a: List[int], b: List[int]) -> List[int]:
        width = max(len(a), len(b))
        a = a + [-self.true_lit] * (width - len(a))
        b = b + [-self.true_lit] * (width - len(b))
        out = []
        carry = -self.true_lit
        for x, y in zip(a, b):
            out.append(self.xor_bit(self.xor_bit(x, y), carry))
            carry = self.or_bit(self.and_bit(x, y),
                                self.and_bit(carry, self.xor_bit(x, y)))
        return out

    def ule(self, a: List[int], b: List[int]) -> int:
        width = max(len(a), len(b))
        a = a + [-self.true_lit] * (width - len(a))
        b = b + [-self.true_lit] * (width - len(b))
        le = self.true_lit
        for x, y in zip(a, b):
            eq = -self.xor_bit(x, y)
            lt = self.and_bit(-x, y)
            le = self.or_bit(lt, self.and_bit(eq, le))
        return le

    def eq_vec(self, a: List[int], b: List[int]) -> int:
        width = max(len(a), len(b))
        a = a + [-self.true_lit] * (width - len(a))
        b = b + [-self.true_lit] * (width - len(b))
        out = self.true_lit
        for x, y in zip(a, b):
            out = self.and_bit(out, -self.xor_bit(x, y))
        return out


class Translator:
    def __init__(self) -> None:
        self.solver = Solver()
        self.blaster = Blaster(self.solver)
        self.decls: Dict[str, List[int]] = {}
        self.order: List[str] = []
        self.status: Optional[str] = None

    def declare(self, name: str, width: int) -> None:
        self.decls[name] = [self.solver.new_var() for _ in range(width)]
        self.order.append(name)

    def term(self, e) -> List[int]:
        bl = self.blaster
        if isinstance(e, str):
            if e.startswith("#b"):
                return [bl.const_bit(int(c)) for c in reversed(e[2:])]
            if e in self.decls:
                return list(self.decls[e])
            if e == "true":
                return [bl.true_lit]
            if e == "false":
                return [-bl.true_lit]
            raise ValueError(f"unknown symbol {e}")
        head = e[0]
        if isinstance(head, list):  # ((_ zero_extend k) x)
            if head[0] == "_" and head[1] == "zero_extend":
                k = int(head[2])
                return self.term(e[1]) + [-bl.const_bit(1)] * k
            raise ValueError(f"unsupported operator {head}")
        if head == "_":  # (_ bvN w)
            value = int(e[1][2:])
            width = int(e[2])
            return [bl.const_bit((value >> i) & 1) for i in range(width)]
        if head in ("forall", "exists"):
            raise _Unsupported()
        args = [self.term(a) for a in e[1:]]
        if head == "bvnot" or head == "not":
            return [-b for b in args[0]]
        if head in ("bvand", "and"):
            return self._fold(bl.and_bit, args)
        if head in ("bvor", "or"):
            return self._fold(bl.or_bit, args)
        if head in ("bvxor", "xor"):
            return self._fold(bl.xor_bit, args)
        if head == "bvadd":
            out = args[0]
            for a in args[1:]:
                out = bl.add_vec(out, a)
            return out
        if head == "=":
            return [bl.eq_vec(args[0], args[1])]
        if head == "bvule":
            return [bl.ule(args[0], args[1])]
        if head == "bvuge":
            return [bl.ule(args[1], args[0])]
        if head == "=>":
            return [bl.or_bit(-args[0][0], args[1][0])]
        if head == "ite":
            return [bl.ite_bit(args[0][0], t, f)
                    for t, f in zip(args[1], args[2])]
        raise ValueError(f"unsupported operator {head}")

    def _fold(self, op, args: List[List[int]]) -> List[int]:
        out = args[0]
        for a in args[1:]:
            out = [op(x, y) for x, y in zip(out, a)]
        return out

    def run(self, commands: List, out) -> None:
        for cmd in commands:
            head = cmd[0]
            if head in ("set-logic", "set-info", "set-option"):
                continue
            if head == "declare-const":
                name, sort = cmd[1], cmd[2]
                width = 1
                if isinstance(sort, list) and sort[1] == "BitVec":
                    width = int(sort[2])
                elif sort == "Bool":
                    width = 1
                self.declare(name, width)
            elif head == "declare-fun":
                if cmd[2]:
                    raise _Unsupported()
                sort = cmd[3]
                width = int(sort[2]) if isinstance(sort, list) else 1
                self.declare(cmd[1], width)
            elif head == "assert":
                try:
                    bits = self.term(cmd[1])
                except _Unsupported:
                    out.write("unknown\n")
                    self.status = "unknown"
                    return
                self.solver.add_clause([bits[0]])
            elif head == "check-sat":
                sat = self.solver.solve()
                self.status = "sat" if sat else "unsat"
                out.write(self.status + "\n")
            elif head == "get-value":
                if self.status != "sat":
                    out.write('(error "no model")\n')
                    continue
                parts = []
                for name in cmd[1]:
                    bits = self.decls.get(name, [])
                    val = "".join(
                        "1" if self.solver.value(b) else "0"
                        for b in reversed(bits))
                    parts.append(f"({name} #b{val})")
                out.write("(" + " ".join(parts) + ")\n")
            elif head == "get-model":
                out.write('(error "unsupported")\n')
            elif head == "exit":
                return


class _Unsupported(Exception):
    pass


def solve_text(text: str, out=None) -> str:
    out = out or sys.stdout
    tr = Translator()
    tr.run(parse_sexprs(text), out)
    return tr.status or "unknown"


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        return 0 if argv else 64
    try:
        text = open(argv[0]).read()
    except OSError as exc:
        print(f"qecv-solve: {exc}", file=sys.stderr)
        return 64
    status = solve_text(text)
    return 0 if status in ("sat", "unsat") else 2


if __name__ == "__main__":
    sys.exit(main())
