"""Symbolic Pauli algebra with exact scalars and GF(2)-affine signs.

A term is  scalar * (-1)^sign * i^iexp * X^xs Z^zs  on n qubits, where xs/zs
are bitmasks (qubit 1 is bit 0), sign is a PhasePoly over classical bits and
iexp is a power of the imaginary unit left over from writing Y = i X Z.
Scalars live in Z[1/sqrt 2], which is closed under every gate conjugation the
proof rules need.  Sums are kept in a canonical merged form so that equality
is syntactic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .cexpr import PhasePoly, Var


class SRing:
    """Exact element (x + y*sqrt2) / 2^t of the ring Z[1/sqrt2]."""

    __slots__ = ("x", "y", "t")

    def __init__(self, x: int, y: int = 0, t: int = 0):
        while t > 0 and x % 2 == 0 and y % 2 == 0:
            x //= 2
            y //= 2
            t -= 1
        if x == 0 and y == 0:
            t = 0
        self.x, self.y, self.t = x, y, t

    def __add__(self, other: "SRing") -> "SRing":
        t = max(self.t, other.t)
        a = self.x << (t - self.t)
        b = self.y << (t - self.t)
        c = other.x << (t - other.t)
        d = other.y << (t - other.t)
        return SRing(a + c, b + d, t)

    def __mul__(self, other: "SRing") -> "SRing":
        return SRing(self.x * other.x + 2 * self.y * other.y,
                     self.x * other.y + self.y * other.x,
                     self.t + other.t)

    def __neg__(self) -> "SRing":
        return SRing(-self.x, -self.y, self.t)

    def __sub__(self, other: "SRing") -> "SRing":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SRing) and self.x == other.x
                and self.y == other.y and self.t == other.t)

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.t))

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def sign_split(self) -> Tuple[int, "SRing"]:
        """Return (bit, |self|) with self = (-1)^bit * |self|."""
        v = float(self)
        if v < 0:
            return 1, -self
        return 0, self

    def __float__(self) -> float:
        return (self.x + self.y * 2 ** 0.5) / 2 ** self.t

    def __repr__(self) -> str:
        if self.y == 0 and self.t == 0:
            return str(self.x)
        num = []
        if self.x:
            num.append(str(self.x))
        if self.y:
            num.append(f"{self.y}*sqrt2" if self.y != 1 else "sqrt2")
        s = " + ".join(num) if num else "0"
        if self.t:
            s = f"({s})/2^{self.t}" if len(num) > 1 else f"{s}/2^{self.t}"
        return s


S_ONE = SRing(1)
S_ZERO = SRing(0)
S_HALF_SQRT2 = SRing(0, 1, 1)  # 1/sqrt2


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class PauliTerm:
    n: int
    xs: int
    zs: int
    scalar: SRing = S_ONE
    sign: PhasePoly = PhasePoly.zero()
    iexp: int = 0

    def canonical(self) -> "PauliTerm":
        """Fold i^2 factors and the constant sign bit into the scalar."""
        iexp = self.iexp % 4
        scalar = self.scalar
        if iexp >= 2:
            iexp -= 2
            scalar = -scalar
        if self.sign.const:
            scalar = -scalar
        return PauliTerm(self.n, self.xs, self.zs, scalar,
                         PhasePoly(0, self.sign.atoms), iexp)

    @staticmethod
    def identity(n: int) -> "PauliTerm":
        return PauliTerm(n, 0, 0)

    @staticmethod
    def single(n: int, qubit: int, letter: str) -> "PauliTerm":
        return PauliTerm.from_sites(n, [(qubit, letter)])

    @staticmethod
    def from_sites(n: int, sites: Iterable[Tuple[int, str]]) -> "PauliTerm":
        """Build a Hermitian Pauli string from (qubit, letter) pairs."""
        xs = zs = 0
        iexp = 0
        for q, letter in sites:
            if not 1 <= q <= n:
                raise ValueError(f"qubit {q} out of range 1..{n}")
            bit = 1 << (q - 1)
            if (xs | zs) & bit:
                raise ValueError(f"qubit {q} mentioned twice")
            if letter == "X":
                xs |= bit
            elif letter == "Z":
                zs |= bit
            elif letter == "Y":
                xs |= bit
                zs |= bit
                iexp += 1
            elif letter != "I":
                raise ValueError(f"bad Pauli letter {letter!r}")
        return PauliTerm(n, xs, zs, S_ONE, PhasePoly.zero(), iexp).canonical()

    @staticmethod
    def from_label(n: int, label: str) -> "PauliTerm":
        """Parse strings like 'X1X3X5X7' or 'X1 Z3'."""
        sites = []
        i = 0
        s = label.replace(" ", "")
        while i < len(s):
            letter = s[i]
            i += 1
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            if j == i:
                raise ValueError(f"missing qubit index in {label!r}")
            sites.append((int(s[i:j]), letter))
            i = j
        return PauliTerm.from_sites(n, sites)

    def letter_at(self, qubit: int) -> str:
        bit = 1 << (qubit - 1)
        x = bool(self.xs & bit)
        z = bool(self.zs & bit)
        return {(False, False): "I", (True, False): "X",
                (False, True): "Z", (True, True): "Y"}[(x, z)]

    def support(self) -> Tuple[int, ...]:
        m = self.xs | self.zs
        return tuple(q for q in range(1, self.n + 1) if m & (1 << (q - 1)))

    def symplectic_bits(self) -> Tuple[int, ...]:
        """The [x | z] bit vector of length 2n."""
        xs = tuple((self.xs >> q) & 1 for q in range(self.n))
        zs = tuple((self.zs >> q) & 1 for q in range(self.n))
        return xs + zs

    def weight(self) -> int:
        return _popcount(self.xs | self.zs)

    def y_count(self) -> int:
        return _popcount(self.xs & self.zs)

    def is_hermitian(self) -> bool:
        c = self.canonical()
        return c.iexp % 2 == c.y_count() % 2

    def mul(self, other: "PauliTerm") -> "PauliTerm":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        reorder = _popcount(self.zs & other.xs)
        return PauliTerm(
            self.n, self.xs ^ other.xs, self.zs ^ other.zs,
            self.scalar * other.scalar, self.sign ^ other.sign,
            self.iexp + other.iexp + 2 * reorder).canonical()

    def commutes(self, other: "PauliTerm") -> bool:
        return (_popcount(self.xs & other.zs)
                + _popcount(self.zs & other.xs)) % 2 == 0

    def negate(self) -> "PauliTerm":
        return PauliTerm(self.n, self.xs, self.zs, -self.scalar,
                         self.sign, self.iexp)

    def flip_sign(self, phase: PhasePoly) -> "PauliTerm":
        return PauliTerm(self.n, self.xs, self.zs, self.scalar,
                         self.sign ^ phase, self.iexp).canonical()

    def with_sign(self, phase: PhasePoly) -> "PauliTerm":
        c = self.canonical()
        return PauliTerm(c.n, c.xs, c.zs, c.scalar, phase, c.iexp).canonical()

    def body_key(self) -> tuple:
        c = self.canonical()
        return (c.xs, c.zs, c.iexp)

    def base_label(self) -> str:
        parts = []
        for q in self.support():
            parts.append(f"{self.letter_at(q)}{q}")
        return "".join(parts) if parts else "I"

    def __str__(self) -> str:
        c = self.canonical()
        sbit, mag = c.scalar.sign_split()
        sign = c.sign if not sbit else c.sign.flip()
        out = ""
        if not sign.is_zero():
            out += f"(-1)^{{{sign}}} " if sign.atoms else "-"
        if c.iexp % 4:
            out += "i " if c.iexp % 4 == 1 else f"i^{c.iexp % 4} "
        if mag != S_ONE:
            out += f"{mag!r} "
        return out + c.base_label()


class PauliSum:
    """Canonical sum of PauliTerms (like terms merged, deterministic order)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Sequence[PauliTerm]):
        self.n = n
        merged = {}
        for t in terms:
            c = t.canonical()
            if c.scalar.is_zero():
                continue
            key = (c.xs, c.zs, c.iexp,
                   tuple(sorted((a.name, a.kind) for a in c.sign.atoms)))
            if key in merged:
                prev = merged[key]
                merged[key] = PauliTerm(n, c.xs, c.zs,
                                        prev.scalar + c.scalar, c.sign, c.iexp)
            else:
                merged[key] = c
        out = [t for t in merged.values() if not t.scalar.is_zero()]
        out.sort(key=lambda t: (t.xs, t.zs, t.iexp,
                                tuple(sorted((a.name, a.kind)
                                             for a in t.sign.atoms))))
        self.terms = tuple(out)

    @staticmethod
    def of(term: PauliTerm) -> "PauliSum":
        return PauliSum(term.n, [term])

    def is_zero(self) -> bool:
        return not self.terms

    def is_single(self) -> bool:
        return len(self.terms) == 1

    def single(self) -> PauliTerm:
        if not self.is_single():
            raise ValueError("not a single-term Pauli sum")
        return self.terms[0]

    def mul(self, other: "PauliSum") -> "PauliSum":
        out: List[PauliTerm] = []
        for a in self.terms:
            for b in other.terms:
                out.append(a.mul(b))
        return PauliSum(self.n, out)

    def add(self, other: "PauliSum") -> "PauliSum":
        return PauliSum(self.n, list(self.terms) + list(other.terms))

    def negate(self) -> "PauliSum":
        return PauliSum(self.n, [t.negate() for t in self.terms])

    def flip_sign(self, phase: PhasePoly) -> "PauliSum":
        return PauliSum(self.n, [t.flip_sign(phase) for t in self.terms])

    def commutes_with(self, other: "PauliSum") -> bool:
        return self.mul(other).add(other.mul(self).negate()).is_zero()

    def anticommutes_with(self, other: "PauliSum") -> bool:
        return self.mul(other).add(other.mul(self)).is_zero()

    def support(self) -> Tuple[int, ...]:
        m = 0
        for t in self.terms:
            m |= t.xs | t.zs
        return tuple(q for q in range(1, self.n + 1) if m & (1 << (q - 1)))

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliSum) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)


def equal_up_to_phase(a: PauliSum, b: PauliSum) -> Optional[PhasePoly]:
    """If a == (-1)^phi * b for an affine phi, return phi, else None.

    Multi-term sums qualify only when one global phase relates them.
    """
    if a.n != b.n or len(a.terms) != len(b.terms) or not a.terms:
        return None
    phi: Optional[PhasePoly] = None
    bmap = {}
    for t in b.terms:
        bmap[t.body_key()] = t
    for ta in a.terms:
        tb = bmap.get(ta.body_key())
        if tb is None:
            return None
        sa, ma = ta.scalar.sign_split()
        sb, mb = tb.scalar.sign_split()
        if ma != mb:
            return None
        rel = ta.sign ^ tb.sign ^ PhasePoly(sa ^ sb, frozenset())
        if phi is None:
            phi = rel
        elif phi != rel:
            return None
    return phi


# ---------------------------------------------------------------------------
# Gate conjugation (the wlp direction: P maps to U^dagger P U).

_Y = ("Y",)

# Images of X and Z on each gate qubit, written as lists of
# (letters per gate qubit, scalar, negate?) with the Y convention above.
_GATE_IMAGES = {
    "X": {"X": [(("X",), S_ONE, 0)], "Z": [(("Z",), S_ONE, 1)]},
    "Y": {"X": [(("X",), S_ONE, 1)], "Z": [(("Z",), S_ONE, 1)]},
    "Z": {"X": [(("X",), S_ONE, 1)], "Z": [(("Z",), S_ONE, 0)]},
    "H": {"X": [(("Z",), S_ONE, 0)], "Z": [(("X",), S_ONE, 0)]},
    "S": {"X": [(_Y, S_ONE, 1)], "Z": [(("Z",), S_ONE, 0)]},
    "T": {"X": [(("X",), S_HALF_SQRT2, 0), (_Y, S_HALF_SQRT2, 1)],
          "Z": [(("Z",), S_ONE, 0)]},
    "CNOT": {"X0": [(("X", "X"), S_ONE, 0)],
             "Z0": [(("Z", "I"), S_ONE, 0)],
             "X1": [(("I", "X"), S_ONE, 0)],
             "Z1": [(("Z", "Z"), S_ONE, 0)]},
    "CZ": {"X0": [(("X", "Z"), S_ONE, 0)],
           "Z0": [(("Z", "I"), S_ONE, 0)],
           "X1": [(("Z", "X"), S_ONE, 0)],
           "Z1": [(("I", "Z"), S_ONE, 0)]},
    "ISWAP": {"X0": [(("Z", "Y"), S_ONE, 1)],
              "Z0": [(("I", "Z"), S_ONE, 0)],
              "X1": [(("Y", "Z"), S_ONE, 1)],
              "Z1": [(("Z", "I"), S_ONE, 0)]},
}

ONE_QUBIT_GATES = ("X", "Y", "Z", "H", "S", "T")
TWO_QUBIT_GATES = ("CNOT", "CZ", "ISWAP")


def _image_sum(n: int, qubits: Sequence[int], images) -> PauliSum:
    terms = []
    for letters, scalar, neg in images:
        sites = [(q, l) for q, l in zip(qubits, letters) if l != "I"]
        t = PauliTerm.from_sites(n, sites)
        t = PauliTerm(n, t.xs, t.zs, scalar if not neg else -scalar,
                      t.sign, t.iexp)
        terms.append(t)
    return PauliSum(n, terms)


def conjugate_term(gate: str, qubits: Sequence[int],
                   term: PauliTerm) -> PauliSum:
    gate = gate.upper()
    if gate not in _GATE_IMAGES:
        raise ValueError(f"unknown gate {gate!r}")
    table = _GATE_IMAGES[gate]
    n = term.n
    if len(set(qubits)) != len(qubits):
        raise ValueError("gate qubits must be distinct")
    mask = 0
    for q in qubits:
        mask |= 1 << (q - 1)
    rest = PauliTerm(n, term.xs & ~mask, term.zs & ~mask,
                     term.scalar, term.sign, term.iexp)
    acc = PauliSum.of(rest)
    for pos, q in enumerate(qubits):
        bit = 1 << (q - 1)
        kx = "X" if len(qubits) == 1 else f"X{pos}"
        kz = "Z" if len(qubits) == 1 else f"Z{pos}"
        if term.xs & bit:
            acc = acc.mul(_image_sum(n, qubits, table[kx]))
        if term.zs & bit:
            acc = acc.mul(_image_sum(n, qubits, table[kz]))
    return acc


def conjugate(gate: str, qubits: Sequence[int], p: PauliSum) -> PauliSum:
    """Return U^dagger p U for the named gate applied on `qubits`."""
    out = PauliSum(p.n, [])
    for t in p.terms:
        out = out.add(conjugate_term(gate, qubits, t))
    return out


def conditional_pauli(guard: Var, gate: str, qubit: int,
                      p: PauliSum) -> PauliSum:
    """Conjugate by a classically controlled Pauli: flips the sign of every
    term whose restriction to `qubit` anticommutes with the error Pauli."""
    gate = gate.upper()
    if gate not in ("X", "Y", "Z"):
        raise ValueError("conditional application is limited to Pauli gates")
    err = PauliTerm.single(p.n, qubit, gate)
    out = []
    for t in p.terms:
        if t.commutes(err):
            out.append(t)
        else:
            out.append(t.flip_sign(PhasePoly.of(guard)))
    return PauliSum(p.n, out)
