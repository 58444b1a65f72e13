"""Stabilizer code descriptions and the on-disk code file format.

A code file is plain text: a header line `n k d`, one sparse Pauli line per
generator, then `LX` / `LZ` section markers each followed by k logical
operator lines.  `#` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import gf2
from .pauli import PauliTerm, PauliSum


class CodeError(Exception):
    pass


@dataclass
class StabilizerCode:
    name: str
    n: int
    k: int
    d: int
    generators: List[PauliTerm]
    logical_x: List[PauliTerm]
    logical_z: List[PauliTerm]

    def __post_init__(self) -> None:
        self.validate()

    # -- symplectic views ---------------------------------------------------

    def symplectic(self, t: PauliTerm) -> np.ndarray:
        row = np.zeros(2 * self.n, dtype=np.uint8)
        for q in range(self.n):
            bit = 1 << q
            row[q] = 1 if t.xs & bit else 0
            row[self.n + q] = 1 if t.zs & bit else 0
        return row

    def check_matrix(self) -> np.ndarray:
        return np.array([self.symplectic(g) for g in self.generators],
                        dtype=np.uint8)

    def syndrome(self, err: PauliTerm) -> np.ndarray:
        """Commutation pattern of a Pauli error with each generator."""
        out = np.zeros(len(self.generators), dtype=np.uint8)
        for i, g in enumerate(self.generators):
            out[i] = 0 if g.commutes(err) else 1
        return out

    def in_group(self, t: PauliTerm) -> bool:
        """Is t in the stabilizer group modulo phase?"""
        return gf2.in_rowspace(self.check_matrix(), self.symplectic(t))

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if len(self.generators) != self.n - self.k:
            raise CodeError(
                f"{self.name}: expected {self.n - self.k} generators, "
                f"got {len(self.generators)}")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise CodeError(f"{self.name}: need {self.k} logical X and Z")
        for i, g in enumerate(self.generators):
            for j in range(i):
                if not g.commutes(self.generators[j]):
                    raise CodeError(
                        f"{self.name}: generators {j + 1} and {i + 1} "
                        "anticommute")
        if gf2.rank(self.check_matrix()) != self.n - self.k:
            raise CodeError(f"{self.name}: generators are dependent")
        for ops, what in ((self.logical_x, "LX"), (self.logical_z, "LZ")):
            for i, l in enumerate(ops):
                for j, g in enumerate(self.generators):
                    if not l.commutes(g):
                        raise CodeError(
                            f"{self.name}: {what}{i + 1} anticommutes with "
                            f"generator {j + 1}")
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                want_anti = i == j
                anti = not lx.commutes(lz)
                if anti != want_anti:
                    raise CodeError(
                        f"{self.name}: LX{i + 1}/LZ{j + 1} commutation wrong")

    def logical(self, basis: str, i: int = 1) -> PauliTerm:
        ops = self.logical_x if basis.upper() == "X" else self.logical_z
        return ops[i - 1]

    # -- serialization ------------------------------------------------------

    def dump(self) -> str:
        lines = [f"# {self.name}", f"{self.n} {self.k} {self.d}"]
        for g in self.generators:
            lines.append(_sparse(g))
        lines.append("LX")
        for l in self.logical_x:
            lines.append(_sparse(l))
        lines.append("LZ")
        for l in self.logical_z:
            lines.append(_sparse(l))
        return "\n".join(lines) + "\n"


def _sparse(t: PauliTerm) -> str:
    return " ".join(f"{t.letter_at(q)}{q}" for q in t.support())


def load_code(text: str, name: str = "code") -> StabilizerCode:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise CodeError("empty code file")
    header = lines[0].split()
    if len(header) != 3:
        raise CodeError(f"bad header {lines[0]!r}, expected 'n k d'")
    try:
        n, k, d = (int(h) for h in header)
    except ValueError:
        raise CodeError(f"bad header {lines[0]!r}, expected integers")
    gens: List[PauliTerm] = []
    lx: List[PauliTerm] = []
    lz: List[PauliTerm] = []
    target = gens
    for line in lines[1:]:
        if line == "LX":
            target = lx
            continue
        if line == "LZ":
            target = lz
            continue
        try:
            target.append(PauliTerm.from_label(n, line))
        except ValueError as exc:
            raise CodeError(f"bad Pauli line {line!r}: {exc}")
    return StabilizerCode(name, n, k, d, gens, lx, lz)
