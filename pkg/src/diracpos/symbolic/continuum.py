"""Continuum check of integration by parts against ddelta.

The box has no exact counterpart of d/dp' delta(p' - b), so the rule is
checked with sympy instead: ladder operators become distinct smooth test
functions, spinors are built symbolically, and
int dp' F(p') d/dp' delta(p' - b) = -F'(b) is compared against the rewritten
monomials at sample momenta.
"""

from __future__ import annotations

import sympy as sp

from .expr import DDelta, Delta, EngineError, Expression, Kin, Mom, Monomial, Overlap, Phase, SpinDelta, Tau
from .rules import collapse_delta

P, PP, T = sp.symbols("p pprime t", real=True)
M = sp.Symbol("m", positive=True)
_VAR = {"p": P, "p'": PP}
_SPIN = {"s": sp.Rational(1, 2), "s'": -sp.Rational(1, 2)}


def _energy(x):
    return sp.sqrt(x**2 + M**2)


def spinor(which: str, x, s) -> sp.Matrix:
    E = _energy(x)
    norm = sp.sqrt((E + M) / (2 * E))
    a = x / (E + M)
    chi = sp.Matrix([1, 0]) if s > 0 else sp.Matrix([0, 1])
    s3chi = sp.Matrix([chi[0], -chi[1]])
    if which == "u":
        return norm * sp.Matrix.vstack(chi, a * s3chi)
    return norm * sp.Matrix.vstack(a * s3chi, chi)


def _test_function(lad, seed: int):
    """Distinct smooth function per (species, dagger, spin)."""
    k = 1 + seed
    return lambda x: sp.exp(sp.Rational(k, 7) * x) * sp.cos(sp.Rational(k, 3) * x + k)


def _ladder_value(lad, arg, funcs: dict):
    key = (lad.species, lad.dagger, lad.spin)
    if key not in funcs:
        funcs[key] = _test_function(lad, len(funcs))
    f = funcs[key]
    if not lad.deriv:
        return f(arg)
    y = sp.Dummy("y", real=True)
    return sp.diff(f(y), y).subs(y, arg)


def _mom(m: Mom):
    return m.sign * _VAR[m.var]


def symbolic_value(m: Monomial, spins: dict, funcs: dict, skip=()) -> sp.Expr:
    val = sp.sympify(m.coef)
    for lad in m.ladders:
        val *= _ladder_value(lad, _mom(lad.mom), funcs)
    for a in m.atoms:
        if a in skip:
            continue
        if isinstance(a, Overlap):
            y = sp.Dummy("y", real=True)
            bra = spinor(a.bra, y, spins[a.bspin])
            bra = sp.diff(bra, y) if a.bderiv else bra
            bra = bra.subs(y, _mom(a.bmom))
            ket = spinor(a.ket, y, spins[a.kspin])
            ket = sp.diff(ket, y) if a.kderiv else ket
            ket = ket.subs(y, _mom(a.kmom))
            val *= (bra.T * ket)[0, 0]  # spinors are real
        elif isinstance(a, Phase):
            val *= sp.exp(sp.I * (a.cp * _energy(P) + a.cpp * _energy(PP)) * T)
        elif isinstance(a, Kin):
            for k, n in a.powers:
                base = {"t": T, "p": P, "p'": PP, "p0": _energy(P), "p0'": _energy(PP)}[k]
                val *= base**n
        elif isinstance(a, SpinDelta):
            val *= 1 if spins[a.a] == spins[a.b] else 0
        elif isinstance(a, Tau):
            val *= a.sector * T
        elif isinstance(a, (Delta, DDelta)):
            raise EngineError("deltas must be skipped or collapsed first")
        else:
            raise EngineError(f"no continuum meaning for {a!r}")
    return val


def ibp_residual(m: Monomial, samples=(0.3, -1.1, 2.4), mass: float = 1.0, t: float = 0.7) -> float:
    """max |lhs - rhs| over sample momenta and spin assignments for one ddelta monomial."""
    dd = next((a for a in m.atoms if isinstance(a, DDelta)), None)
    if dd is None or "p'" not in m.bound:
        raise ValueError("monomial must carry ddelta and bind p'")
    rhs_terms = collapse_delta(Expression((m,))).terms
    worst = 0.0
    for s1 in (sp.Rational(1, 2), -sp.Rational(1, 2)):
        for s2 in (sp.Rational(1, 2), -sp.Rational(1, 2)):
            spins = {"s": s1, "s'": s2}
            funcs: dict = {}
            F = symbolic_value(m, spins, funcs, skip=(dd,))
            lhs = -sp.diff(F, PP).subs(PP, _mom(dd.b))
            rhs = sum((symbolic_value(r, spins, funcs) for r in rhs_terms), sp.Integer(0))
            f = sp.lambdify((P, T, M), lhs - rhs, "numpy")
            for pv in samples:
                worst = max(worst, abs(complex(f(pv, t, mass))))
    return worst
