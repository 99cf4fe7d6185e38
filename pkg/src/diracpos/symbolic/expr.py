"""Immutable AST for fermionic ladder-operator expressions.

A ``Monomial`` is coefficient x commuting atoms x an ordered ladder string,
summed over the variables in ``bound``. Derivative flags on ladders and
overlaps always mean d/d(argument); the printer folds the chain-rule sign
when the argument is negated, so ``dp[u+(-p,s)]`` reads as d/dp of u^+(-p,s).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import sympy as sp

MOMENTUM_VARS = ("p", "p'")
SPIN_VARS = ("s", "s'")
KIN_ORDER = ("t", "p", "p'", "p0", "p0'")


class EngineError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Mom:
    sign: int
    var: str

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.var

    def neg(self) -> "Mom":
        return Mom(-self.sign, self.var)


@dataclass(frozen=True)
class Ladder:
    species: str  # "c" or "d"
    dagger: bool
    mom: Mom
    spin: str
    deriv: bool = False

    def key(self):
        return (0 if self.dagger else 1, self.species, self.mom.var, -self.mom.sign, self.spin, self.deriv)

    def __str__(self) -> str:
        core = f"{self.species}{'+' if self.dagger else ''}({self.mom},{self.spin})"
        return f"dp[{core}]" if self.deriv else core


# --------------------------------------------------------------------- atoms


@dataclass(frozen=True)
class Delta:
    """Kronecker/Dirac delta(a - b) of two momentum arguments."""

    a: Mom
    b: Mom

    def __str__(self) -> str:
        b = self.b
        op = "+" if b.sign < 0 else "-"
        return f"delta({self.a}{op}{b.var})"


@dataclass(frozen=True)
class DDelta:
    """d/dp' delta(p' - b)."""

    b: Mom

    def __str__(self) -> str:
        op = "+" if self.b.sign < 0 else "-"
        return f"ddelta(p'{op}{self.b.var})"


@dataclass(frozen=True)
class SpinDelta:
    a: str
    b: str

    def __str__(self) -> str:
        return f"delta({self.a},{self.b})"


@dataclass(frozen=True)
class Overlap:
    """bra^+(bmom, bspin) ket(kmom, kspin); bra, ket in {"u", "v"}."""

    bra: str
    bmom: Mom
    bspin: str
    ket: str
    kmom: Mom
    kspin: str
    bderiv: bool = False
    kderiv: bool = False

    def __str__(self) -> str:
        b = f"{self.bra}+({self.bmom},{self.bspin})"
        k = f"{self.ket}({self.kmom},{self.kspin})"
        if self.bderiv:
            b = f"dp[{b}]"
        if self.kderiv:
            k = f"dp[{k}]"
        return b + k


@dataclass(frozen=True)
class Phase:
    """exp(i (cp * p0 + cpp * p0') t)."""

    cp: int
    cpp: int

    def __str__(self) -> str:
        parts = []
        for c, name in ((self.cpp, "p0'"), (self.cp, "p0")):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            sign = "-" if c < 0 else ("+" if parts else "")
            parts.append(f"{sign}{mag}{name}")
        return f"exp(i*({''.join(parts)})*t)"


@dataclass(frozen=True)
class Kin:
    """Product of kinematic symbols t, p, p', p0, p0' with integer powers."""

    powers: tuple[tuple[str, int], ...]

    @staticmethod
    def of(d: dict[str, int]) -> "Kin":
        return Kin(tuple((k, d[k]) for k in KIN_ORDER if d.get(k, 0) != 0))

    def as_dict(self) -> dict[str, int]:
        return dict(self.powers)

    def __str__(self) -> str:
        return "*".join(k if n == 1 else f"{k}^{n}" for k, n in self.powers)


@dataclass(frozen=True)
class Tau:
    """-i d/dp0 acting on a positive (+1) or negative (-1) frequency factor."""

    sector: int

    def __str__(self) -> str:
        return f"tau({'+' if self.sector > 0 else '-'})"


@dataclass(frozen=True)
class XInt:
    """(1/V) int x^mu exp(-i sgn (p' - sigma p) x) dx."""

    mu: int
    sgn: int
    sigma: int

    def __str__(self) -> str:
        inner = f"p'{'-' if self.sigma > 0 else '+'}p"
        return f"xint({self.mu},{'-' if self.sgn > 0 else '+'}({inner}))"


@dataclass(frozen=True)
class Contract:
    """Anticommutator of a derivative-marked ladder with its plain conjugate at equal arguments.

    side "left": {dp[a(P)], a^+(P)}; side "right": {a(P), dp[a^+(P)]}.
    """

    species: str
    mom: Mom
    side: str

    def __str__(self) -> str:
        return f"kappa{'+' if self.side == 'right' else ''}({self.species},{self.mom})"


Atom = Union[Delta, DDelta, SpinDelta, Overlap, Phase, Kin, Tau, XInt, Contract]
_ATOM_RANK = {Kin: 0, Tau: 1, Overlap: 2, Phase: 3, Delta: 4, DDelta: 5, SpinDelta: 6, XInt: 7, Contract: 8}


def atom_key(a: Atom):
    return (_ATOM_RANK[type(a)], str(a))


# ----------------------------------------------------------------- helpers


def make_delta(a: Mom, b: Mom):
    """Normalized delta(a - b), or True when identically 1."""
    if a == b:
        return True
    # delta(a - b) = delta(b - a) = delta(-a + b): put a primed / positive first
    if (b.var, -b.sign) > (a.var, -a.sign):
        a, b = b, a
    if a.sign < 0:
        a, b = a.neg(), b.neg()
    return Delta(a, b)


def make_spin_delta(a: str, b: str):
    if a == b:
        return True
    return SpinDelta(*sorted((a, b)))


def deriv_sign(m_atoms, ladders) -> int:
    """Product of argument signs over derivative-marked factors (printer chain rule)."""
    s = 1
    for lad in ladders:
        if lad.deriv:
            s *= lad.mom.sign
    for a in m_atoms:
        if isinstance(a, Overlap):
            if a.bderiv:
                s *= a.bmom.sign
            if a.kderiv:
                s *= a.kmom.sign
    return s


def _merge_atoms(atoms) -> tuple:
    kin: dict[str, int] = {}
    phase = [0, 0]
    out = []
    for a in atoms:
        if isinstance(a, Kin):
            for k, n in a.powers:
                kin[k] = kin.get(k, 0) + n
        elif isinstance(a, Phase):
            phase[0] += a.cp
            phase[1] += a.cpp
        else:
            out.append(a)
    if any(kin.values()):
        out.append(Kin.of(kin))
    if phase != [0, 0]:
        out.append(Phase(*phase))
    return tuple(sorted(out, key=atom_key))


@dataclass(frozen=True)
class Monomial:
    coef: sp.Expr
    atoms: tuple = ()
    ladders: tuple = ()
    bound: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.coef, sp.Basic):
            object.__setattr__(self, "coef", sp.nsimplify(self.coef))
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))
        object.__setattr__(self, "bound", frozenset(self.bound))

    def key(self):
        return (
            tuple(sorted(self.bound)),
            tuple(lad.key() + (str(lad),) for lad in self.ladders),
            tuple(atom_key(a) for a in self.atoms),
        )

    def with_(self, **kw) -> "Monomial":
        return replace(self, **kw)

    def variables(self) -> set[str]:
        """Momentum and spin variables that occur in the monomial."""
        out: set[str] = set()
        for lad in self.ladders:
            out |= {lad.mom.var, lad.spin}
        for a in self.atoms:
            if isinstance(a, (Delta,)):
                out |= {a.a.var, a.b.var}
            elif isinstance(a, DDelta):
                out |= {"p'", a.b.var}
            elif isinstance(a, SpinDelta):
                out |= {a.a, a.b}
            elif isinstance(a, Overlap):
                out |= {a.bmom.var, a.kmom.var, a.bspin, a.kspin}
            elif isinstance(a, Kin):
                for k, _ in a.powers:
                    if k in ("p", "p0"):
                        out.add("p")
                    elif k in ("p'", "p0'"):
                        out.add("p'")
            elif isinstance(a, Phase):
                if a.cp:
                    out.add("p")
                if a.cpp:
                    out.add("p'")
            elif isinstance(a, XInt):
                out |= {"p", "p'"}
            elif isinstance(a, Contract):
                out.add(a.mom.var)
        return out


@dataclass(frozen=True)
class Expression:
    terms: tuple[Monomial, ...] = ()

    def __add__(self, other: "Expression") -> "Expression":
        return Expression(self.terms + other.terms)

    def __neg__(self) -> "Expression":
        return self.scaled(-1)

    def __sub__(self, other: "Expression") -> "Expression":
        return self + (-other)

    def scaled(self, c) -> "Expression":
        return Expression(tuple(m.with_(coef=sp.expand(m.coef * c)) for m in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __str__(self) -> str:
        return to_text(self)

    def map(self, fn) -> "Expression":
        """Apply a monomial -> iterable-of-monomials rewrite to every term."""
        out = []
        for m in self.terms:
            out.extend(fn(m))
        return Expression(tuple(out))


# ------------------------------------------------------------------ printer


def _var_order(v: str):
    return (MOMENTUM_VARS + SPIN_VARS).index(v) if v in MOMENTUM_VARS + SPIN_VARS else 99


def format_coef(c: sp.Expr) -> tuple[str, str]:
    """(sign, magnitude-text) for a Gaussian-rational coefficient; magnitude '' means 1."""
    c = sp.nsimplify(c)
    re, im = sp.re(c), sp.im(c)
    if im == 0:
        sign = "-" if re < 0 else "+"
        mag = abs(re)
        return sign, "" if mag == 1 else str(mag)
    if re == 0:
        sign = "-" if im < 0 else "+"
        mag = abs(im)
        return sign, "i" if mag == 1 else f"{mag}*i"
    return "+", f"({re}{'+' if im > 0 else '-'}{abs(im)}*i)"


def monomial_body(m: Monomial) -> tuple[str, str]:
    coef = m.coef * deriv_sign(m.atoms, m.ladders)
    sign, mag = format_coef(coef)
    parts = [mag] if mag else []
    parts += [str(lad) for lad in m.ladders]
    parts += [str(a) for a in m.atoms]
    if not parts:
        parts = ["1"]
    return sign, " ".join(parts)


def to_text(e: Expression) -> str:
    if not e.terms:
        return "0"
    lines = []
    current = None
    buf: list[str] = []
    for m in e.terms:
        if m.bound != current:
            if buf:
                lines.append("".join(buf))
            current = m.bound
            head = f"sum({','.join(sorted(m.bound, key=_var_order))}): "
            sign, body = monomial_body(m)
            buf = [head + ("-" if sign == "-" else "") + body]
        else:
            sign, body = monomial_body(m)
            buf.append(f" {sign} {body}")
    if buf:
        lines.append("".join(buf))
    return "\n".join(lines)
