"""Hand-written recursive descent parser for programs, assertions and
Hoare triple files.

Errors carry line/column positions.  The grammar is LL(1) over the token
stream below; Pauli strings are re-split from identifier tokens because the
lexer cannot know whether `X1X3` is one atom or an identifier.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .cexpr import (BVar, Cmp, IConst, Sum, TRUE, FALSE, Var)
from .prog import (AAnd, ABigVee, AClass, AExpr, ANot, AOr, APauli, Assertion,
                   Assign, For, If, Index, InitQ, Measure, PauliPattern, Seq,
                   Skip, Stmt, Unitary, While, mkvar)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # INT | IDENT | SYM | EOF
    text: str
    line: int
    col: int


_SYMBOLS = [":=", "*=", "|0>", "/\\", "\\/", "=>", "..", "<=", ">=",
            "(", ")", "[", "]", "{", "}", ";", ",", ":", "~", "+", "-",
            "=", "^", "<", ">", "|"]


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = re.match(r"[A-Za-z][A-Za-z0-9_]*", text[i:])
        if m:
            toks.append(Token("IDENT", m.group(0), line, col))
            i += m.end()
            col += m.end()
            continue
        m = re.match(r"[0-9]+", text[i:])
        if m:
            toks.append(Token("INT", m.group(0), line, col))
            i += m.end()
            col += m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("SYM", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


_KEYWORDS = {"skip", "if", "then", "else", "end", "while", "do", "for",
             "meas", "in", "inv", "true", "false", "bigvee", "wt",
             "pre", "prog", "post"}


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.peek().text == text:
            self.next()
            return True
        return False

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind != "IDENT":
            self.fail(f"expected identifier, found {tok.text!r}")
        if tok.text in _KEYWORDS:
            self.fail(f"keyword {tok.text!r} cannot be used as a name")
        return self.next().text

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "INT":
            self.fail(f"expected integer, found {tok.text!r}")
        return int(self.next().text)

    # -- index expressions --------------------------------------------------

    def parse_index_group(self) -> Index:
        """Parse a parenthesized index expression like (i+7)."""
        self.expect("(")
        ix = self.parse_index_sum()
        self.expect(")")
        return ix

    def parse_index_sum(self) -> Index:
        ix = self.parse_index_atom(1)
        while self.peek().text in ("+", "-"):
            sign = 1 if self.next().text == "+" else -1
            nxt = self.parse_index_atom(sign)
            ix = Index(ix.const + nxt.const, ix.vars + nxt.vars)
        return ix

    def parse_index_atom(self, sign: int) -> Index:
        tok = self.peek()
        if tok.kind == "INT":
            return Index(sign * self.expect_int(), ())
        if tok.kind == "IDENT":
            return Index(0, ((self.expect_ident(), sign),))
        self.fail("expected index expression")

    def _split_subscript(self, text: str, allow_group: bool) -> Index:
        """Interpret the trailing part of a subscripted token."""
        if text.isdigit():
            return Index.num(int(text))
        if text:
            return Index.var(text)
        if allow_group and self.at("("):
            return self.parse_index_group()
        self.fail("missing subscript")

    # -- qubit references ---------------------------------------------------

    def parse_qubit(self) -> Index:
        tok = self.peek()
        if tok.kind != "IDENT" or not (tok.text == "q"
                                       or tok.text.startswith("q_")):
            self.fail(f"expected qubit reference, found {tok.text!r}")
        self.next()
        rest = tok.text[2:] if tok.text.startswith("q_") else ""
        if tok.text == "q" and self.at("_"):
            self.fail("write qubit references as q_<i>")
        return self._split_subscript(rest, allow_group=True)

    # -- Pauli strings ------------------------------------------------------

    def parse_pauli(self) -> PauliPattern:
        phase = None
        if self.at("(") and self.peek(1).text == "-" \
                and self.peek(2).text == "1":
            self.expect("(")
            self.expect("-")
            self.expect("1")
            self.expect(")")
            self.expect("^")
            self.expect("(")
            phase = self.parse_bool_sum()
            self.expect(")")
        sites: List[Tuple[str, Index]] = []
        while True:
            tok = self.peek()
            if tok.kind != "IDENT" or tok.text[0] not in "XYZI":
                break
            self.next()
            text = tok.text
            i = 0
            while i < len(text):
                letter = text[i]
                if letter not in "XYZI":
                    raise ParseError(f"bad Pauli letter {letter!r}",
                                     tok.line, tok.col + i)
                i += 1
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                if j > i:
                    sites.append((letter, Index.num(int(text[i:j]))))
                    i = j
                    continue
                if i < len(text) and text[i] == "_":
                    i += 1
                    j = i
                    while j < len(text) and (text[j].isalnum()):
                        j += 1
                    if j == i and i == len(text) and self.at("("):
                        sites.append((letter, self.parse_index_group()))
                        i = j
                        continue
                    if j == i:
                        raise ParseError("missing subscript",
                                         tok.line, tok.col + i)
                    sub = text[i:j]
                    sites.append((letter, Index.num(int(sub))
                                  if sub.isdigit() else Index.var(sub)))
                    i = j
                    continue
                if i == len(text) and self.at("("):
                    sites.append((letter, self.parse_index_group()))
                    continue
                raise ParseError("missing subscript", tok.line, tok.col + i)
        if not sites:
            self.fail("expected Pauli string")
        return PauliPattern(tuple(sites), phase)

    # -- classical expressions ---------------------------------------------

    def parse_bool_sum(self) -> AExpr:
        const = 0
        names: List[str] = []
        while True:
            tok = self.peek()
            if tok.kind == "INT":
                const ^= int(self.next().text) & 1
            elif tok.kind == "IDENT" and tok.text not in _KEYWORDS:
                names.append(self.expect_ident())
            else:
                self.fail("expected boolean expression")
            if not self.accept("+"):
                break
        return AExpr(const, tuple(names))

    # -- statements ---------------------------------------------------------

    def parse_program(self) -> Stmt:
        stmt = self.parse_seq()
        tok = self.peek()
        if tok.kind != "EOF":
            self.fail(f"unexpected {tok.text!r}")
        return stmt

    def parse_seq(self, stop=("end", "else", "")) -> Stmt:
        stmts = [self.parse_stmt()]
        while self.accept(";"):
            if self.peek().text in stop or self.peek().kind == "EOF":
                break
            stmts.append(self.parse_stmt())
        return Seq.of(stmts)

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.text == "skip":
            self.next()
            return Skip()
        if tok.text == "if":
            self.next()
            cond = self.parse_bool_sum()
            self.expect("then")
            then = self.parse_seq()
            if self.accept("else"):
                els = self.parse_seq()
            else:
                els = Skip()
            self.expect("end")
            return If(cond, then, els)
        if tok.text == "while":
            self.next()
            cond = self.parse_bool_sum()
            inv = None
            if self.accept("inv"):
                self.expect("{")
                inv = self.parse_assertion()
                self.expect("}")
            self.expect("do")
            body = self.parse_seq()
            self.expect("end")
            return While(cond, inv, body)
        if tok.text == "for":
            self.next()
            var = self.expect_ident()
            self.expect("in")
            lo = self.expect_int()
            self.expect("..")
            hi = self.expect_int()
            self.expect("do")
            body = self.parse_seq()
            self.expect("end")
            return For(var, lo, hi, body)
        if tok.kind == "IDENT" and (tok.text == "q"
                                    or tok.text.startswith("q_")):
            qubits = [self.parse_qubit()]
            while self.accept(","):
                qubits.append(self.parse_qubit())
            if self.accept(":="):
                self.expect("|0>")
                if len(qubits) != 1:
                    self.fail("initialization takes one qubit")
                return InitQ(qubits[0])
            self.expect("*=")
            guard = None
            if self.accept("["):
                guard = self.expect_ident()
                self.expect("]")
            gate = self.expect_ident()
            return Unitary(gate, tuple(qubits), guard)
        if tok.kind == "IDENT":
            var = self.expect_ident()
            self.expect(":=")
            if self.accept("meas"):
                self.expect("[")
                pauli = self.parse_pauli()
                self.expect("]")
                return Measure(var, pauli)
            return Assign(var, self.parse_bool_sum())
        self.fail(f"expected statement, found {tok.text!r}")

    # -- assertions ---------------------------------------------------------

    def parse_assertion(self) -> Assertion:
        return self.parse_imp()

    def parse_imp(self) -> Assertion:
        lhs = self.parse_or()
        if self.accept("=>"):
            rhs = self.parse_imp()
            return aor_imp(lhs, rhs)
        return lhs

    def parse_or(self) -> Assertion:
        args = [self.parse_and()]
        while self.accept("\\/"):
            args.append(self.parse_and())
        return AOr(tuple(args)) if len(args) > 1 else args[0]

    def parse_and(self) -> Assertion:
        args = [self.parse_not()]
        while self.accept("/\\"):
            args.append(self.parse_not())
        return AAnd(tuple(args)) if len(args) > 1 else args[0]

    def parse_not(self) -> Assertion:
        if self.accept("~"):
            return ANot(self.parse_not())
        return self.parse_atom()

    def parse_atom(self) -> Assertion:
        tok = self.peek()
        if tok.text == "true":
            self.next()
            return AClass(TRUE)
        if tok.text == "false":
            self.next()
            return AClass(FALSE)
        if tok.text == "bigvee":
            self.next()
            base = self.expect_ident()
            self.expect("in")
            self.expect("{")
            self.expect("0")
            self.expect(",")
            self.expect("1")
            self.expect("}")
            self.expect("^")
            m = self.expect_int()
            self.expect(":")
            body = self.parse_not() if self.at("(") else self.parse_assertion()
            vars_ = tuple(mkvar(f"{base}_{i}") for i in range(1, m + 1))
            return ABigVee(vars_, body)
        if tok.text == "wt":
            self.next()
            self.expect("(")
            names = [self.expect_ident()]
            while self.accept(","):
                names.append(self.expect_ident())
            self.expect(")")
            op = {"<=": "le", "=": "eq", ">=": "ge"}.get(self.peek().text)
            if op is None:
                self.fail("expected comparison after wt(...)")
            self.next()
            bound = self.expect_int()
            return AClass(Cmp(op, Sum(tuple(BVar(mkvar(x)) for x in names)),
                              IConst(bound)))
        if tok.text == "(" and self.peek(1).text == "-":
            return APauliPattern(self.parse_pauli())
        if tok.text == "(":
            self.next()
            inner = self.parse_assertion()
            self.expect(")")
            return inner
        if tok.kind == "IDENT" and tok.text[0] in "XYZI" \
                and _looks_like_pauli(tok.text):
            return APauliPattern(self.parse_pauli())
        if tok.kind == "IDENT":
            return AClass(BVar(mkvar(self.expect_ident())))
        self.fail(f"expected assertion, found {tok.text!r}")


def _looks_like_pauli(text: str) -> bool:
    return re.fullmatch(r"([XYZI](\d+|_[A-Za-z0-9]+|_?))+", text) is not None


def aor_imp(lhs: Assertion, rhs: Assertion) -> Assertion:
    # Material reading at the assertion level; the VC layer interprets
    # implication over subspaces via the classical reduction.
    return AOr((ANot(lhs), rhs))


@dataclass(frozen=True)
class APauliPattern(Assertion):
    """Assertion atom before subscript resolution."""

    pattern: PauliPattern

    def __str__(self) -> str:
        return str(self.pattern)


def resolve_assertion(a: Assertion, n: int, env=None) -> Assertion:
    """Resolve APauliPattern atoms into concrete Pauli sums."""
    env = dict(env or {})
    if isinstance(a, APauliPattern):
        return APauli(a.pattern.resolve(n, env))
    if isinstance(a, AAnd):
        return AAnd(tuple(resolve_assertion(x, n, env) for x in a.args))
    if isinstance(a, AOr):
        return AOr(tuple(resolve_assertion(x, n, env) for x in a.args))
    if isinstance(a, ANot):
        return ANot(resolve_assertion(a.arg, n, env))
    if isinstance(a, ABigVee):
        return ABigVee(a.vars, resolve_assertion(a.body, n, env))
    return a


# ---------------------------------------------------------------------------
# Entry points.

def parse_program(text: str) -> Stmt:
    return Parser(text).parse_program()


def parse_assertion(text: str, n: Optional[int] = None) -> Assertion:
    p = Parser(text)
    a = p.parse_assertion()
    if p.peek().kind != "EOF":
        p.fail(f"unexpected {p.peek().text!r}")
    if n is not None:
        a = resolve_assertion(a, n)
    return a


@dataclass
class HoareTriple:
    pre: Assertion
    prog: Stmt
    post: Assertion


def parse_hoare(text: str, n: Optional[int] = None) -> HoareTriple:
    """Parse a `pre { A } prog { S } post { B }` file."""
    p = Parser(text)
    p.expect("pre")
    p.expect("{")
    pre = p.parse_assertion()
    p.expect("}")
    p.expect("prog")
    p.expect("{")
    body = p.parse_seq(stop=("}",))
    p.expect("}")
    p.expect("post")
    p.expect("{")
    post = p.parse_assertion()
    p.expect("}")
    if p.peek().kind != "EOF":
        p.fail(f"unexpected {p.peek().text!r}")
    if n is not None:
        pre = resolve_assertion(pre, n)
        post = resolve_assertion(post, n)
    return HoareTriple(pre, body, post)
