"""Independent checking oracles.

Nothing here reuses the wlp/VC pipeline: the exact field arithmetic and
dense matrices validate the symbolic Pauli algebra, the statevector
simulator replays concrete counterexamples, and the brute-force
enumerators re-decide small correction/detection instances from first
principles (symplectic arithmetic plus exhaustive decoders).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2
from .cexpr import PhasePoly, Var
from .pauli import PauliSum, PauliTerm
from .prog import Assign, InitQ, Measure, Seq, Skip, Stmt, Unitary
from .stabcode import StabilizerCode


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(i, sqrt(2)).

@dataclass(frozen=True)
class QI2:
    """a + b*sqrt(2) + i*(c + d*sqrt(2)) with rational coefficients."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "QI2":
        if isinstance(x, QI2):
            return x
        return QI2(Fraction(x))

    def __add__(self, o: "QI2") -> "QI2":
        return QI2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "QI2") -> "QI2":
        return QI2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "QI2":
        return QI2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, o: "QI2") -> "QI2":
        # (a1 + b1 r + i c1 + i d1 r)(a2 + b2 r + i c2 + i d2 r), r^2 = 2
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        re_a = a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2
        re_b = a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2
        im_c = a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2)
        im_d = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2
        return QI2(re_a, re_b, im_c, im_d)

    def conj_i(self) -> "QI2":
        return QI2(self.a, self.b, -self.c, -self.d)

    def conj_r(self) -> "QI2":
        return QI2(self.a, -self.b, self.c, -self.d)

    def inverse(self) -> "QI2":
        # rationalize by the product of the three nontrivial conjugates
        p = self.conj_i() * self.conj_r() * self.conj_i().conj_r()
        denom = (self * p).a  # rational by construction
        if denom == 0:
            raise ZeroDivisionError("QI2 inverse of zero")
        inv = Fraction(1) / denom
        return QI2(p.a * inv, p.b * inv, p.c * inv, p.d * inv)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def to_complex(self) -> complex:
        r = 2 ** 0.5
        return complex(float(self.a) + float(self.b) * r,
                       float(self.c) + float(self.d) * r)


Q0 = QI2()
Q1 = QI2(Fraction(1))
QI = QI2(Fraction(0), Fraction(0), Fraction(1))
QH = QI2(Fraction(0), Fraction(1, 2))        # sqrt(2)/2 = 1/sqrt(2)

Matrix = List[List[QI2]]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m, k, n = len(a), len(b), len(b[0])
    out = [[Q0 for _ in range(n)] for _ in range(m)]
    for i in range(m):
        for j in range(n):
            acc = Q0
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            out[i][j] = acc
    return out


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return all((x - y).is_zero() for ra, rb in zip(a, b)
               for x, y in zip(ra, rb))


def mat_dagger(a: Matrix) -> Matrix:
    return [[a[j][i].conj_i() for j in range(len(a))]
            for i in range(len(a[0]))]


def kron(a: Matrix, b: Matrix) -> Matrix:
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


_M1 = {
    "I": [[Q1, Q0], [Q0, Q1]],
    "X": [[Q0, Q1], [Q1, Q0]],
    "Y": [[Q0, -QI], [QI, Q0]],
    "Z": [[Q1, Q0], [Q0, -Q1]],
    "H": [[QH, QH], [QH, -QH]],
    "S": [[Q1, Q0], [Q0, QI]],
    # T = diag(1, (1 + i)/sqrt(2))
    "T": [[Q1, Q0], [Q0, QI2(Fraction(0), Fraction(1, 2),
                             Fraction(0), Fraction(1, 2))]],
}

_M2 = {
    "CNOT": [[Q1, Q0, Q0, Q0], [Q0, Q1, Q0, Q0],
             [Q0, Q0, Q0, Q1], [Q0, Q0, Q1, Q0]],
    "CZ": [[Q1, Q0, Q0, Q0], [Q0, Q1, Q0, Q0],
           [Q0, Q0, Q1, Q0], [Q0, Q0, Q0, -Q1]],
    "ISWAP": [[Q1, Q0, Q0, Q0], [Q0, Q0, QI, Q0],
              [Q0, QI, Q0, Q0], [Q0, Q0, Q0, Q1]],
}


def gate_matrix(name: str) -> Matrix:
    name = name.upper()
    if name in _M1:
        return [row[:] for row in _M1[name]]
    if name in _M2:
        return [row[:] for row in _M2[name]]
    raise KeyError(name)


def embed(gate: Matrix, qubits: Sequence[int], n: int) -> Matrix:
    """Expand a 1- or 2-qubit gate to the full n-qubit matrix.

    Qubit 1 is the least significant bit of the basis index.
    """
    dim = 1 << n
    width = len(qubits)
    out = [[Q0 for _ in range(dim)] for _ in range(dim)]
    qs = [q - 1 for q in qubits]
    for col in range(dim):
        sub_col = 0
        for pos, q in enumerate(qs):
            sub_col |= ((col >> q) & 1) << (width - 1 - pos)
        base = col
        for q in qs:
            base &= ~(1 << q)
        for sub_row in range(1 << width):
            amp = gate[sub_row][sub_col]
            if amp.is_zero():
                continue
            row = base
            for pos, q in enumerate(qs):
                row |= ((sub_row >> (width - 1 - pos)) & 1) << q
            out[row][col] = amp
    return out


def term_matrix(term: PauliTerm, env: Optional[Dict[Var, int]] = None
                ) -> Matrix:
    """Exact dense matrix of a Pauli term; symbolic signs need env."""
    env = env or {}
    out = [[Q1]]
    for q in range(1, term.n + 1):
        bit = 1 << (q - 1)
        m = gate_matrix("I")
        if term.zs & bit:
            m = gate_matrix("Z")
        if term.xs & bit:
            m = mat_mul(gate_matrix("X"), m)  # X after Z: the XZ form
        out = kron(m, out)
    x, y, t = term.scalar.x, term.scalar.y, term.scalar.t
    scal = QI2(Fraction(x, 1 << t), Fraction(y, 1 << t))
    if term.iexp % 2:
        scal = scal * QI
    if term.sign.evaluate(env):
        scal = -scal
    return [[scal * v for v in row] for row in out]


def sum_matrix(op: PauliSum, env: Optional[Dict[Var, int]] = None
               ) -> Matrix:
    dim = 1 << op.n
    out = [[Q0 for _ in range(dim)] for _ in range(dim)]
    for t in op.terms:
        m = term_matrix(t, env)
        out = [[a + b for a, b in zip(ra, rb)]
               for ra, rb in zip(out, m)]
    return out


# ---------------------------------------------------------------------------
# Statevector simulation.

def apply_gate(state: np.ndarray, n: int, name: str,
               qubits: Sequence[int]) -> np.ndarray:
    gate = np.array([[c.to_complex() for c in row]
                     for row in gate_matrix(name)])
    qs = [q - 1 for q in qubits]
    width = len(qs)
    psi = state.reshape([2] * n)
    # axis k of the reshaped tensor is qubit n - k, so qubit q sits on
    # axis n - q (qubit 1 = least significant bit)
    axes = [n - 1 - q for q in qs]
    psi = np.moveaxis(psi, axes, range(width))
    shape = psi.shape
    psi = gate.reshape([2] * (2 * width)).reshape(
        1 << width, 1 << width) @ psi.reshape(1 << width, -1)
    psi = psi.reshape(shape)
    psi = np.moveaxis(psi, range(width), axes)
    return psi.reshape(-1)


def apply_term(state: np.ndarray, term: PauliTerm,
               env: Optional[Dict[Var, int]] = None) -> np.ndarray:
    """Pauli term action by bit manipulation (fast for large n)."""
    env = env or {}
    n = term.n
    idx = np.arange(1 << n)
    out_idx = idx ^ term.xs
    # Z part phase: parity of idx & zs (applied before the X flip since
    # X Z ordering is fixed by the term convention zs acting first)
    par = np.zeros(1 << n, dtype=np.int64)
    rest = idx & term.zs
    while rest.any():
        par ^= rest & 1
        rest >>= 1
    phase = np.where(par, -1.0, 1.0).astype(complex)
    scal = complex(float(term.scalar))
    if term.iexp % 2:
        scal *= 1j
    if term.sign.evaluate(env):
        scal = -scal
    out = np.zeros_like(state)
    out[out_idx] = phase * scal * state[idx]
    return out


def apply_sum(state: np.ndarray, op: PauliSum,
              env: Optional[Dict[Var, int]] = None) -> np.ndarray:
    out = np.zeros_like(state)
    for t in op.terms:
        out = out + apply_term(state, t, env)
    return out


def project(state: np.ndarray, term: PauliTerm, outcome: int,
            env: Optional[Dict[Var, int]] = None) -> np.ndarray:
    """(I + (-1)^outcome P)/2 without renormalization."""
    return (state + (-1) ** outcome * apply_term(state, term, env)) / 2


def stabilizer_state(n: int, rows: Sequence[Tuple[PauliTerm, int]],
                     seed: int = 7) -> np.ndarray:
    """The unique state stabilized by (-1)^phase * op for each row."""
    rng = np.random.default_rng(seed)
    state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    for op, phase in rows:
        state = project(state, op, phase)
    norm = np.linalg.norm(state)
    if norm < 1e-9:
        raise ValueError("inconsistent stabilizer rows")
    return state / norm


def expectation(state: np.ndarray, op: PauliSum,
                env: Optional[Dict[Var, int]] = None) -> complex:
    return complex(np.vdot(state, apply_sum(state, op, env)))


def simulate(prog: Stmt, n: int, env: Dict[Var, int],
             state: np.ndarray) -> Optional[np.ndarray]:
    """Run a desugared program on a statevector.

    Guards and measurement outcomes are read from env; returns None when
    a prescribed measurement branch has zero probability.
    """
    if isinstance(prog, Skip):
        return state
    if isinstance(prog, Seq):
        for s in prog.stmts:
            state = simulate(s, n, env, state)
            if state is None:
                return None
        return state
    if isinstance(prog, Unitary):
        if prog.guard is not None:
            g = _env_lookup(env, prog.guard)
            if not g:
                return state
        return apply_gate(state, n, prog.gate, prog.qubits)
    if isinstance(prog, InitQ):
        state = project(state, PauliTerm.single(n, prog.qubit, "Z"), 0)
        norm = np.linalg.norm(state)
        if norm < 1e-9:
            # the qubit was in |1>; flip it instead
            return None
        return state / norm
    if isinstance(prog, Measure):
        op = prog.pauli.resolve(n, {})
        outcome = _env_lookup(env, prog.var)
        state = project(state, op.single(), outcome)
        norm = np.linalg.norm(state)
        if norm < 1e-7:
            return None
        return state / norm
    if isinstance(prog, Assign):
        val = prog.expr.to_phase({v.name: b for v, b in env.items()})
        env[_mk(prog.var)] = val
        return state
    raise ValueError(f"cannot simulate {type(prog).__name__}")


def _mk(name: str) -> Var:
    from .prog import mkvar
    return mkvar(name)


def _env_lookup(env: Dict[Var, int], name: str) -> int:
    for v, b in env.items():
        if v.name == name:
            return b
    return 0


# ---------------------------------------------------------------------------
# Brute-force verification (symplectic level).

def _bits(mask: int, n: int) -> List[int]:
    return [(mask >> i) & 1 for i in range(n)]


def _subsets(n: int, max_weight: int) -> Iterable[int]:
    for w in range(max_weight + 1):
        for qs in itertools.combinations(range(n), w):
            mask = 0
            for q in qs:
                mask |= 1 << q
            yield mask


_LETTER_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# transversal single-qubit Clifford action on (x, z) error components
_CLIFFORD_XZ = {
    "I": lambda x, z: (x, z),
    "X": lambda x, z: (x, z),
    "Y": lambda x, z: (x, z),
    "Z": lambda x, z: (x, z),
    "H": lambda x, z: (z, x),
    "S": lambda x, z: (x, x ^ z),
}


def _syndrome(code: StabilizerCode, ex: int, ez: int) -> Tuple[int, ...]:
    out = []
    for g in code.generators:
        out.append((bin(g.zs & ex).count("1") +
                    bin(g.xs & ez).count("1")) % 2)
    return tuple(out)


def min_weight_decode(code: StabilizerCode, syndrome: Sequence[int]
                      ) -> Optional[Tuple[int, int]]:
    """Exhaustive minimum-weight (ex, ez) masks matching the syndrome."""
    n = code.n
    best = None
    for ex in _subsets(n, n):
        for ez in _subsets(n, n):
            w = bin(ex | ez).count("1")
            if best is not None and w >= best[0]:
                continue
            if _syndrome(code, ex, ez) == tuple(syndrome):
                best = (w, ex, ez)
    if best is None:
        return None
    return best[1], best[2]


def _is_stabilizer(code: StabilizerCode, ex: int, ez: int) -> bool:
    vec = np.array(_bits(ex, code.n) + _bits(ez, code.n), dtype=np.uint8)
    return bool(gf2.in_rowspace(code.check_matrix(), vec))


@dataclass
class OracleOutcome:
    verified: bool
    counterexample: Optional[Dict[str, int]] = None


def brute_force_correct(code: StabilizerCode, logical: str = "I",
                        error: str = "X", budget: int = 1,
                        positions: Sequence[str] = ("propagated",
                                                    "standard"),
                        allowed_sites: Optional[Sequence[int]] = None
                        ) -> OracleOutcome:
    """Exhaustively check one cycle against every syndrome-consistent
    bounded-weight correction (the same adversarial decoder the verifier
    quantifies over)."""
    if error not in _LETTER_XZ:
        raise ValueError("brute force handles Pauli errors only")
    lx, lz = _LETTER_XZ[error]
    act = _CLIFFORD_XZ[logical.upper()]
    n = code.n
    site_mask = 0
    for q in (allowed_sites or range(1, n + 1)):
        site_mask |= 1 << (q - 1)
    use_p = "propagated" in positions
    use_s = "standard" in positions

    for pmask in (_subsets(n, budget) if use_p else (0,)):
        if pmask & ~site_mask:
            continue
        wp = bin(pmask).count("1")
        for smask in (_subsets(n, budget - wp) if use_s else (0,)):
            if smask & ~site_mask:
                continue
            wtot = wp + bin(smask).count("1")
            if wtot == 0 or wtot > budget:
                continue
            # propagated part conjugates through the logical gate
            pex, pez = act(pmask * lx, pmask * lz)
            ex = pex ^ (smask * lx)
            ez = pez ^ (smask * lz)
            syn = _syndrome(code, ex, ez)
            for cx in _subsets(n, wtot):
                for cz in _subsets(n, wtot):
                    if _syndrome(code, cx, cz) != syn:
                        continue
                    if not _is_stabilizer(code, ex ^ cx, ez ^ cz):
                        model = {}
                        for q in range(n):
                            if pmask >> q & 1:
                                model[f"ep_{q + 1}"] = 1
                            if smask >> q & 1:
                                model[f"e_{q + 1}"] = 1
                            if cx >> q & 1:
                                model[f"cx_{q + 1}"] = 1
                            if cz >> q & 1:
                                model[f"cz_{q + 1}"] = 1
                        for j, s in enumerate(syn, start=1):
                            model[f"s_{j}"] = s
                        return OracleOutcome(False, model)
    return OracleOutcome(True)


def brute_force_detect(code: StabilizerCode, dt: int) -> OracleOutcome:
    """Search errors of weight 1..dt-1 with zero syndrome that move some
    logical operator."""
    n = code.n
    for mask in _subsets(n, dt - 1):
        if mask == 0:
            continue
        qs = [q for q in range(n) if mask >> q & 1]
        for letters in itertools.product("XYZ", repeat=len(qs)):
            ex = ez = 0
            for q, letter in zip(qs, letters):
                x, z = _LETTER_XZ[letter]
                ex |= x << q
                ez |= z << q
            if any(_syndrome(code, ex, ez)):
                continue
            flips = []
            for i in range(1, code.k + 1):
                for basis in ("X", "Z"):
                    lop = code.logical(basis, i)
                    par = (bin(lop.zs & ex).count("1") +
                           bin(lop.xs & ez).count("1")) % 2
                    flips.append(par)
            if any(flips):
                model = {}
                for q, letter in zip(qs, letters):
                    x, z = _LETTER_XZ[letter]
                    if x:
                        model[f"ex_{q + 1}"] = 1
                    if z:
                        model[f"ez_{q + 1}"] = 1
                return OracleOutcome(False, model)
    return OracleOutcome(True)


# ---------------------------------------------------------------------------
# Counterexample replay on the statevector simulator.

def replay_correction(scenario, model: Dict[str, int],
                      seed: int = 7) -> bool:
    """Confirm a Refuted model: simulate the cycle under the model's
    errors, condition measurements on its syndrome bits, apply its
    corrections, and test the postcondition rows.

    Returns True when the model really breaks the postcondition.
    """
    from .prog import mkvar
    n = scenario.n

    def ev(poly: PhasePoly) -> int:
        val = poly.const
        for a in poly.atoms:
            val ^= model.get(a.name, 0) & 1
        return val

    env: Dict[Var, int] = {}
    for name, bit in model.items():
        env[mkvar(name)] = bit
    pre = [(row.op.single(), ev(row.phase)) for row in scenario.lhs_rows]
    state = stabilizer_state(n, pre, seed=seed)
    state = simulate(scenario.prog, n, env, state)
    if state is None:
        return False  # the claimed syndrome branch has zero probability
    for row in scenario.post_rows:
        want = (-1) ** ev(row.phase)
        got = expectation(state, row.op)
        if abs(got - want) > 1e-6:
            return True
    return False
