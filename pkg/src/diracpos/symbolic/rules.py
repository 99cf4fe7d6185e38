"""Rewrite rules. Each rule maps an Expression to an Expression."""

from __future__ import annotations

from itertools import product

import sympy as sp

from .expr import (
    Contract,
    DDelta,
    Delta,
    EngineError,
    Expression,
    Kin,
    Ladder,
    Mom,
    Monomial,
    Overlap,
    Phase,
    SpinDelta,
    Tau,
    XInt,
    make_delta,
    make_spin_delta,
)

# ------------------------------------------------------------- substitution


def _sub_mom(m: Mom, mapping: dict[str, Mom]) -> Mom:
    if m.var in mapping:
        tgt = mapping[m.var]
        return Mom(m.sign * tgt.sign, tgt.var)
    return m


def substitute(m: Monomial, mapping: dict[str, Mom] | None = None, spins: dict[str, str] | None = None) -> Monomial | None:
    """Rename momentum variables (var -> signed var) and spin variables. Returns None if the result vanishes."""
    mapping = mapping or {}
    spins = spins or {}
    sv = lambda s: spins.get(s, s)  # noqa: E731
    coef = m.coef
    atoms = []
    for a in m.atoms:
        if isinstance(a, Delta):
            d = make_delta(_sub_mom(a.a, mapping), _sub_mom(a.b, mapping))
            if d is not True:
                atoms.append(d)
        elif isinstance(a, DDelta):
            if "p'" in mapping:
                raise EngineError("cannot substitute p' inside ddelta")
            atoms.append(DDelta(_sub_mom(a.b, mapping)))
        elif isinstance(a, SpinDelta):
            d = make_spin_delta(sv(a.a), sv(a.b))
            if d is not True:
                atoms.append(d)
        elif isinstance(a, Overlap):
            atoms.append(
                Overlap(a.bra, _sub_mom(a.bmom, mapping), sv(a.bspin), a.ket, _sub_mom(a.kmom, mapping), sv(a.kspin), a.bderiv, a.kderiv)
            )
        elif isinstance(a, Kin):
            new: dict[str, int] = {}
            for k, n in a.powers:
                if k in ("p", "p'") and k in mapping:
                    tgt = mapping[k]
                    coef = coef * tgt.sign**n
                    k = tgt.var
                elif k in ("p0", "p0'"):
                    var = "p'" if k.endswith("'") else "p"
                    if var in mapping:
                        k = "p0'" if mapping[var].var == "p'" else "p0"
                new[k] = new.get(k, 0) + n
            atoms.append(Kin.of(new))
        elif isinstance(a, Phase):
            cp, cpp = 0, 0
            for c, var in ((a.cp, "p"), (a.cpp, "p'")):
                tgt = mapping.get(var, Mom(1, var)).var
                if tgt == "p":
                    cp += c
                else:
                    cpp += c
            atoms.append(Phase(cp, cpp))
        elif isinstance(a, XInt):
            if mapping:
                raise EngineError("integrate xint before substituting momenta")
            atoms.append(a)
        elif isinstance(a, Contract):
            atoms.append(Contract(a.species, _sub_mom(a.mom, mapping), a.side))
        else:
            atoms.append(a)
    ladders = tuple(Ladder(l.species, l.dagger, _sub_mom(l.mom, mapping), sv(l.spin), l.deriv) for l in m.ladders)
    return Monomial(sp.expand(coef), tuple(atoms), ladders, m.bound)


def _nonzero(ms):
    return [m for m in ms if m is not None and m.coef != 0]


# ---------------------------------------------------------- x integration


def integrate_x(e: Expression) -> Expression:
    """xint(0, ..) -> t delta(p' - sigma p);  xint(1, ..) -> i sgn ddelta(p' - sigma p)."""

    def rule(m: Monomial):
        atoms, coef = [], m.coef
        for a in m.atoms:
            if isinstance(a, XInt):
                b = Mom(a.sigma, "p")
                if a.mu == 0:
                    atoms += [Kin.of({"t": 1}), make_delta(Mom(1, "p'"), b)]
                else:
                    coef = coef * sp.I * a.sgn
                    atoms.append(DDelta(b))
            else:
                atoms.append(a)
        return [m.with_(coef=coef, atoms=tuple(atoms))]

    return e.map(rule)


def time_to_tau(e: Expression) -> Expression:
    """t exp(i a' p0' t ...) -> sign(a') tau(sign a') exp(...)."""

    def rule(m: Monomial):
        kin = next((a for a in m.atoms if isinstance(a, Kin)), None)
        phase = next((a for a in m.atoms if isinstance(a, Phase)), None)
        if kin is None or phase is None or phase.cpp == 0 or kin.as_dict().get("t", 0) != 1:
            return [m]
        sign = 1 if phase.cpp > 0 else -1
        d = kin.as_dict()
        d.pop("t")
        atoms = [a for a in m.atoms if a is not kin] + [Kin.of(d), Tau(sign)]
        return [Monomial(m.coef * sign, tuple(atoms), m.ladders, m.bound)]

    return e.map(rule)


# ----------------------------------------------------------- delta collapse


def _ibp_terms(m: Monomial, dd: DDelta) -> list[Monomial]:
    """-d/dp' of every p'-dependent factor (integration by parts against ddelta)."""
    rest = [a for a in m.atoms if a is not dd]
    out = []
    for i, lad in enumerate(m.ladders):
        if lad.mom.var == "p'":
            if lad.deriv:
                raise EngineError("second derivative of a ladder operator")
            ladders = list(m.ladders)
            ladders[i] = Ladder(lad.species, lad.dagger, lad.mom, lad.spin, True)
            out.append(Monomial(-m.coef * lad.mom.sign, tuple(rest), tuple(ladders), m.bound))
    for j, a in enumerate(rest):
        others = rest[:j] + rest[j + 1 :]
        if isinstance(a, Overlap):
            for side in ("b", "k"):
                mom = a.bmom if side == "b" else a.kmom
                flag = a.bderiv if side == "b" else a.kderiv
                if mom.var != "p'":
                    continue
                if flag:
                    raise EngineError("second derivative of a spinor")
                new = Overlap(
                    a.bra, a.bmom, a.bspin, a.ket, a.kmom, a.kspin,
                    a.bderiv or side == "b", a.kderiv or side == "k",
                )
                out.append(Monomial(-m.coef * mom.sign, tuple(others + [new]), m.ladders, m.bound))
        elif isinstance(a, Phase) and a.cpp:
            extra = Kin.of({"t": 1, "p'": 1, "p0'": -1})
            out.append(Monomial(-m.coef * sp.I * a.cpp, tuple(rest + [extra]), m.ladders, m.bound))
        elif isinstance(a, Kin):
            d = a.as_dict()
            for k in ("p'", "p0'"):
                n = d.get(k, 0)
                if n == 0:
                    continue
                nd = dict(d)
                nd[k] = n - 1 if k == "p'" else n - 2
                if k == "p0'":
                    nd["p'"] = nd.get("p'", 0) + 1
                out.append(Monomial(-m.coef * n, tuple(others + [Kin.of(nd)]), m.ladders, m.bound))
        elif isinstance(a, (Delta, DDelta, XInt)) and "p'" in m.variables() and _mentions(a, "p'"):
            raise EngineError(f"cannot integrate by parts through {a}")
    return out


def _mentions(a, var: str) -> bool:
    if isinstance(a, Delta):
        return var in (a.a.var, a.b.var)
    return isinstance(a, XInt)


def collapse_delta(e: Expression, var: str = "p'") -> Expression:
    """Sum out a bound momentum against delta(var - b) or ddelta(p' - b)."""

    def rule(m: Monomial):
        if var not in m.bound:
            return [m]
        bound = m.bound - {var}
        for a in m.atoms:
            if isinstance(a, Delta) and var in (a.a.var, a.b.var) and a.a.var != a.b.var:
                own, other = (a.a, a.b) if a.a.var == var else (a.b, a.a)
                # delta(own - other) with own = sign*var  =>  var = sign*other
                target = Mom(own.sign * other.sign, other.var)
                stripped = m.with_(atoms=tuple(x for x in m.atoms if x is not a))
                r = substitute(stripped, {var: target})
                return _nonzero([r.with_(bound=bound)])
        if var == "p'":
            dd = next((a for a in m.atoms if isinstance(a, DDelta)), None)
            if dd is not None:
                out = []
                for t in _ibp_terms(m, dd):
                    r = substitute(t, {"p'": dd.b})
                    out.append(r.with_(bound=bound))
                return _nonzero(out)
        return [m]

    return e.map(rule)


def collapse_all_deltas(e: Expression) -> Expression:
    return collapse_delta(collapse_delta(e, "p'"), "p")


# --------------------------------------------------------------- spinors


def apply_orthogonality(e: Expression) -> Expression:
    def rule(m: Monomial):
        atoms = []
        for a in m.atoms:
            if isinstance(a, Overlap) and not (a.bderiv or a.kderiv):
                if a.bra == a.ket and a.bmom == a.kmom:
                    d = make_spin_delta(a.bspin, a.kspin)
                    if d is not True:
                        atoms.append(d)
                    continue
                if a.bra != a.ket and a.bmom == a.kmom.neg():
                    return []
            atoms.append(a)
        return [m.with_(atoms=tuple(atoms))]

    return e.map(rule)


def collapse_spin(e: Expression) -> Expression:
    def rule(m: Monomial):
        for a in m.atoms:
            if not isinstance(a, SpinDelta):
                continue
            for drop, keep in ((a.b, a.a), (a.a, a.b)) if a.b == "s'" else ((a.a, a.b), (a.b, a.a)):
                if drop in m.bound:
                    stripped = m.with_(atoms=tuple(x for x in m.atoms if x is not a))
                    r = substitute(stripped, spins={drop: keep})
                    return collapse_spin(Expression((r.with_(bound=m.bound - {drop}),))).terms
        return [m]

    return e.map(rule)


# ---------------------------------------------------------- normal ordering


def _contraction(ann: Ladder, cre: Ladder):
    """{ann, cre} as a list of atoms, or None when it vanishes."""
    if ann.species != cre.species:
        return None
    if ann.deriv and cre.deriv:
        raise EngineError(f"anticommutator of two derivative ladders {ann}, {cre}")
    spin = make_spin_delta(ann.spin, cre.spin)
    spin_atoms = [] if spin is True else [spin]
    if ann.deriv or cre.deriv:
        if ann.mom != cre.mom:
            raise EngineError(f"anticommutator {{{ann}, {cre}}} at different momenta has no closed form")
        return [Contract(ann.species, ann.mom, "left" if ann.deriv else "right")] + spin_atoms
    d = make_delta(ann.mom, cre.mom)
    return ([] if d is True else [d]) + spin_atoms


def _order_one(m: Monomial) -> list[Monomial]:
    lads = list(m.ladders)
    for i in range(len(lads) - 1):
        a, b = lads[i], lads[i + 1]
        if a == b:
            return []
        if a.key() > b.key():
            swapped = lads[:i] + [b, a] + lads[i + 2 :]
            out = [m.with_(coef=-m.coef, ladders=tuple(swapped))]
            if not a.dagger and b.dagger:
                c = _contraction(a, b)
                if c is not None:
                    rest = lads[:i] + lads[i + 2 :]
                    out.append(Monomial(m.coef, m.atoms + tuple(c), tuple(rest), m.bound))
            return [r for x in out for r in _order_one(x)]
    return [m]


def normal_order(e: Expression) -> Expression:
    return e.map(_order_one)


# ------------------------------------------------------------ canonical form


def _sort_ladders(m: Monomial) -> Monomial | None:
    """Reorder ladders without contractions (only valid once already normal ordered)."""
    lads = list(m.ladders)
    sign = 1
    for i in range(len(lads)):
        for j in range(len(lads) - 1 - i):
            if lads[j].key() > lads[j + 1].key():
                if lads[j].dagger != lads[j + 1].dagger:
                    raise EngineError("relabelling broke normal order")
                lads[j], lads[j + 1] = lads[j + 1], lads[j]
                sign = -sign
    for a, b in zip(lads, lads[1:]):
        if a == b:
            return None
    return m.with_(coef=m.coef * sign, ladders=tuple(lads))


def _struct(m: Monomial):
    return (m.key(), m.ladders, m.atoms)


def _pref(m: Monomial):
    # prefer positive momentum arguments in the printed representative
    text = "".join(str(x) for x in m.ladders + m.atoms)
    return (text.count("(-") + text.count(",-"), str(_struct(m)))


def _relabelings(m: Monomial):
    flips_p = [False, True] if "p" in m.bound else [False]
    flips_pp = [False, True] if "p'" in m.bound else [False]
    swaps = [False, True] if {"s", "s'"} <= m.bound else [False]
    for fp, fpp, sw in product(flips_p, flips_pp, swaps):
        mapping = {}
        if fp:
            mapping["p"] = Mom(-1, "p")
        if fpp:
            mapping["p'"] = Mom(-1, "p'")
        spins = {"s": "s'", "s'": "s"} if sw else {}
        r = substitute(m, mapping, spins)
        r = _sort_ladders(r) if r is not None else None
        yield r


def _representative(m: Monomial) -> Monomial | None:
    variants = [v for v in _relabelings(m) if v is not None]
    best = min(variants, key=_pref)
    same = [v for v in variants if _struct(v) == _struct(best)]
    if any(sp.simplify(v.coef - same[0].coef) != 0 for v in same):
        return None  # odd under a symmetry of the summation
    return best


def merge(e: Expression) -> Expression:
    acc: dict = {}
    for m in e.terms:
        k = _struct(m)
        if k in acc:
            acc[k] = acc[k].with_(coef=sp.expand(acc[k].coef + m.coef))
        else:
            acc[k] = m
    terms = sorted((m for m in acc.values() if m.coef != 0), key=lambda m: m.key())
    return Expression(tuple(terms))


def canonicalize(e: Expression) -> Expression:
    e = collapse_spin(collapse_all_deltas(normal_order(e)))
    e = merge(e)
    reps = [_representative(m) for m in e.terms]
    return merge(Expression(tuple(r for r in reps if r is not None)))


def canonical_equal(a: Expression, b: Expression):
    """(equal, diff) where diff lists monomials only in a, only in b, and coefficient mismatches."""
    ca, cb = canonicalize(a), canonicalize(b)
    da = {_struct(m): m for m in ca.terms}
    db = {_struct(m): m for m in cb.terms}
    diff = {
        "missing": [db[k] for k in db if k not in da],
        "extra": [da[k] for k in da if k not in db],
        "mismatch": [(da[k], db[k]) for k in da if k in db and sp.simplify(da[k].coef - db[k].coef) != 0],
    }
    return not any(diff.values()), diff
