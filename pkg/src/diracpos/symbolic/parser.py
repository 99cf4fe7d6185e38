"""Recursive-descent parser for the line-oriented expression grammar (docs/grammar.md)."""

from __future__ import annotations

import re
from dataclasses import dataclass

import sympy as sp

from .expr import (
    Contract,
    DDelta,
    Expression,
    Kin,
    Ladder,
    Mom,
    Monomial,
    Overlap,
    Phase,
    Tau,
    XInt,
    make_delta,
    make_spin_delta,
)


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownSymbolError(ExpressionSyntaxError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*'?(?:\+(?=\())?)
  | (?P<punct>[()\[\],:+\-*/^])
    """,
    re.VERBOSE,
)

_KIN = {"t", "p", "p'", "p0", "p0'"}
_KEYWORDS = {"sum", "delta", "ddelta", "tau", "exp", "xint", "dp", "kappa", "kappa+", "i"}
_LADDERS = {"c", "c+", "d", "d+"}
_BRAS = {"u+", "v+"}
_KETS = {"u", "v"}


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    out = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = mt.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Tok(kind, mt.group(), pos))
        pos = mt.end()
    out.append(Tok("eof", "", len(text)))
    return out


# intermediate product representation: (coef, atoms list, ladders list)
_Prod = tuple


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Tok | None = None):
        tok = tok or self.tok
        if tok.kind == "eof":
            prev = self.toks[self.i - 1] if self.i > 0 else tok
            raise ExpressionSyntaxError(f"unexpected end of input after {prev.text!r}: {message}", prev.pos)
        raise ExpressionSyntaxError(f"{message}, found {tok.text!r}", tok.pos)

    def skip_nl(self):
        while self.tok.kind == "nl":
            self.i += 1

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if self.tok.text != text or self.tok.kind == "eof":
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    # -- grammar
    def parse(self) -> Expression:
        terms: list[Monomial] = []
        bound: frozenset = frozenset()
        self.skip_nl()
        if self.tok.kind == "eof":
            return Expression(())
        while self.tok.kind != "eof":
            if self.tok.text == "sum":
                bound = self.sum_prefix()
            elif not terms and self.tok.text == "0":
                self.i += 1
                self.skip_nl()
                continue
            terms.extend(self.terms_line(bound))
            self.skip_nl()
        return Expression(tuple(terms))

    def sum_prefix(self) -> frozenset:
        self.expect("sum")
        self.expect("(")
        names = []
        if self.tok.text != ")":
            names.append(self.variable())
            while self.accept(","):
                names.append(self.variable())
        self.expect(")")
        self.expect(":")
        return frozenset(names)

    def variable(self) -> str:
        t = self.tok
        if t.text in ("p", "p'", "s", "s'"):
            self.i += 1
            return t.text
        self.error("expected summation variable p, p', s or s'")

    def terms_line(self, bound) -> list[Monomial]:
        """Terms until end of line; a new line starting with +/- continues the group."""
        out = []
        prods = self.sum_of_products(stop_at_newline=True)
        for coef, atoms, ladders, start in prods:
            out.append(self.finish(coef, atoms, ladders, bound, start))
        while self.tok.kind == "nl":
            j = self.i
            while self.toks[j].kind == "nl":
                j += 1
            if self.toks[j].text in ("+", "-"):
                self.i = j
                for coef, atoms, ladders, start in self.sum_of_products(stop_at_newline=True):
                    out.append(self.finish(coef, atoms, ladders, bound, start))
            else:
                break
        return out

    def finish(self, coef, atoms, ladders, bound, start) -> Monomial:
        resolved = []
        for a in atoms:
            if a == "tau?":
                species = {lad.species for lad in ladders}
                if len(species) != 1:
                    raise ExpressionSyntaxError("cannot infer the frequency sector of bare 'tau'", start)
                a = Tau(+1 if species == {"c"} else -1)
            resolved.append(a)
        return Monomial(sp.expand(coef), tuple(resolved), tuple(ladders), bound)

    def sum_of_products(self, stop_at_newline: bool):
        out = []
        sign = 1
        if self.tok.text in ("+", "-"):
            sign = -1 if self.tok.text == "-" else 1
            self.i += 1
        while True:
            start = self.tok.pos
            for coef, atoms, ladders in self.product():
                out.append((sign * coef, atoms, ladders, start))
            if self.tok.text in ("+", "-") and self.tok.kind == "punct":
                sign = -1 if self.tok.text == "-" else 1
                self.i += 1
                if not stop_at_newline:
                    self.skip_nl()
                continue
            break
        return out

    def product(self) -> list[_Prod]:
        acc: list[_Prod] = [(sp.Integer(1), [], [])]
        got = False
        while True:
            if self.tok.kind in ("eof", "nl") or self.tok.text in ("+", "-", ")"):
                break
            if got and self.accept("*"):
                pass
            factor = self.factor()
            got = True
            acc = [(c1 * c2, a1 + a2, l1 + l2) for c1, a1, l1 in acc for c2, a2, l2 in factor]
        if not got:
            self.error("expected a factor")
        return acc

    def factor(self) -> list[_Prod]:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            val = sp.Integer(int(t.text))
            if self.accept("/"):
                den = self.tok
                if den.kind != "num":
                    self.error("expected denominator")
                self.i += 1
                val = sp.Rational(int(t.text), int(den.text))
            return [(val, [], [])]
        if t.text == "(":
            self.i += 1
            inner = self.sum_of_products(stop_at_newline=False)
            self.expect(")")
            if all(not a and not lad for _, a, lad, _ in inner):
                return [(sp.expand(sum(c for c, *_ in inner)), [], [])]
            return [(c, list(a), list(lad)) for c, a, lad, _ in inner]
        if t.kind != "name":
            self.error("expected a factor")
        name = t.text
        if name == "i":
            self.i += 1
            return [(sp.I, [], [])]
        if name in _LADDERS:
            return [(sp.Integer(1), [], [self.ladder()])]
        if name in _BRAS:
            bra, bsign = self.spinor(_BRAS)
            ket, ksign = self.ket_after_bra()
            return [(bsign * ksign, [self.make_overlap(bra, ket)], [])]
        if name == "dp":
            return self.derivative()
        if name == "delta":
            return [(sp.Integer(1), self.delta(), [])]
        if name == "ddelta":
            return [(sp.Integer(1), [self.ddelta()], [])]
        if name == "tau":
            return [(sp.Integer(1), [self.tau()], [])]
        if name == "exp":
            return [(sp.Integer(1), [self.phase()], [])]
        if name == "xint":
            return [(sp.Integer(1), [self.xint()], [])]
        if name in ("kappa", "kappa+"):
            return [(sp.Integer(1), [self.kappa()], [])]
        if name in _KIN:
            self.i += 1
            power = 1
            if self.accept("^"):
                neg = self.accept("-")
                if self.tok.kind != "num":
                    self.error("expected integer exponent")
                power = int(self.tok.text) * (-1 if neg else 1)
                self.i += 1
            return [(sp.Integer(1), [Kin.of({name: power})], [])]
        raise UnknownSymbolError(f"unknown symbol {name!r}", t.pos)

    # -- pieces
    def mom(self) -> Mom:
        sign = -1 if self.accept("-") else 1
        t = self.tok
        if t.text not in ("p", "p'"):
            self.error("expected momentum p or p'")
        self.i += 1
        return Mom(sign, t.text)

    def spin(self) -> str:
        t = self.tok
        if t.text not in ("s", "s'"):
            self.error("expected spin s or s'")
        self.i += 1
        return t.text

    def args(self) -> tuple[Mom, str]:
        self.expect("(")
        m = self.mom()
        self.expect(",")
        s = self.spin()
        self.expect(")")
        return m, s

    def ladder(self, deriv: bool = False) -> Ladder:
        name = self.tok.text
        self.i += 1
        mom, spin = self.args()
        return Ladder(name[0], name.endswith("+"), mom, spin, deriv)

    def spinor(self, allowed, deriv: bool = False):
        t = self.tok
        if t.text not in allowed:
            self.error(f"expected one of {sorted(allowed)}")
        self.i += 1
        mom, spin = self.args()
        return (t.text[0], mom, spin, deriv), (mom.sign if deriv else 1)

    def ket_after_bra(self):
        if self.tok.text == "dp":
            self.i += 1
            self.expect("[")
            ket = self.spinor(_KETS, deriv=True)
            self.expect("]")
            return ket
        return self.spinor(_KETS)

    @staticmethod
    def make_overlap(bra, ket) -> Overlap:
        return Overlap(bra[0], bra[1], bra[2], ket[0], ket[1], ket[2], bra[3], ket[3])

    def derivative(self) -> list[_Prod]:
        self.expect("dp")
        self.expect("[")
        name = self.tok.text
        if name in _LADDERS:
            lad = self.ladder(deriv=True)
            self.expect("]")
            return [(sp.Integer(lad.mom.sign), [], [lad])]
        if name in _BRAS:
            bra, bsign = self.spinor(_BRAS, deriv=True)
            self.expect("]")
            ket, ksign = self.ket_after_bra()
            return [(sp.Integer(bsign * ksign), [self.make_overlap(bra, ket)], [])]
        self.error("dp[...] must wrap a ladder operator or a bra spinor")

    def delta(self) -> list:
        self.expect("delta")
        self.expect("(")
        if self.tok.text in ("s", "s'"):
            a = self.spin()
            self.expect(",")
            b = self.spin()
            self.expect(")")
            d = make_spin_delta(a, b)
            return [] if d is True else [d]
        a = self.mom()
        op = self.tok.text
        if op not in ("+", "-"):
            self.error("expected '+' or '-' inside delta")
        self.i += 1
        b = self.mom()
        self.expect(")")
        d = make_delta(a, b if op == "-" else b.neg())
        return [] if d is True else [d]

    def ddelta(self) -> DDelta:
        self.expect("ddelta")
        self.expect("(")
        a = self.mom()
        if a != Mom(1, "p'"):
            self.error("ddelta must be differentiated in p'")
        op = self.tok.text
        if op not in ("+", "-"):
            self.error("expected '+' or '-' inside ddelta")
        self.i += 1
        b = self.mom()
        self.expect(")")
        return DDelta(b if op == "-" else b.neg())

    def tau(self):
        self.expect("tau")
        if self.accept("("):
            t = self.tok
            if t.text not in ("+", "-"):
                self.error("expected tau(+) or tau(-)")
            self.i += 1
            self.expect(")")
            return Tau(1 if t.text == "+" else -1)
        return "tau?"

    def phase(self) -> Phase:
        self.expect("exp")
        self.expect("(")
        outer = -1 if self.accept("-") else 1
        self.expect("i")
        self.expect("*")
        self.expect("(")
        cp = cpp = 0
        first = True
        while self.tok.text != ")":
            sign = 1
            if self.tok.text in ("+", "-"):
                sign = -1 if self.tok.text == "-" else 1
                self.i += 1
            elif not first:
                self.error("expected '+' or '-'")
            mag = 1
            if self.tok.kind == "num":
                mag = int(self.tok.text)
                self.i += 1
                self.expect("*")
            name = self.tok.text
            if name == "p0":
                cp += sign * mag
            elif name == "p0'":
                cpp += sign * mag
            else:
                self.error("expected p0 or p0' in phase")
            self.i += 1
            first = False
        self.expect(")")
        self.expect("*")
        self.expect("t")
        self.expect(")")
        return Phase(outer * cp, outer * cpp)

    def xint(self) -> XInt:
        self.expect("xint")
        self.expect("(")
        t = self.tok
        if t.text not in ("0", "1"):
            self.error("xint component must be 0 or 1")
        self.i += 1
        self.expect(",")
        outer = self.tok.text
        if outer not in ("+", "-"):
            self.error("expected '+' or '-'")
        self.i += 1
        self.expect("(")
        self.expect("p'")
        op = self.tok.text
        if op not in ("+", "-"):
            self.error("expected '+' or '-'")
        self.i += 1
        self.expect("p")
        self.expect(")")
        self.expect(")")
        return XInt(int(t.text), 1 if outer == "-" else -1, 1 if op == "-" else -1)

    def kappa(self) -> Contract:
        side = "right" if self.tok.text == "kappa+" else "left"
        self.i += 1
        self.expect("(")
        sp_tok = self.tok
        if sp_tok.text not in ("c", "d"):
            self.error("expected species c or d")
        self.i += 1
        self.expect(",")
        m = self.mom()
        self.expect(")")
        return Contract(sp_tok.text, m, side)


def parse(text: str) -> Expression:
    return _Parser(text).parse()


def parse_corpus(text: str) -> dict[str, Expression]:
    """Blocks separated by blank lines; a '# name: X' comment names the block."""
    blocks: dict[str, Expression] = {}
    for k, raw in enumerate(re.split(r"\n\s*\n", text)):
        lines = raw.strip("\n").splitlines()
        name = None
        body = []
        for line in lines:
            mt = re.match(r"\s*#\s*name:\s*(\S+)", line)
            if mt:
                name = mt.group(1)
            body.append(line)
        src = "\n".join(body)
        if not src.strip() or all(ln.strip().startswith("#") for ln in body if ln.strip()):
            continue
        blocks[name or f"block{k}"] = parse(src)
    return blocks
