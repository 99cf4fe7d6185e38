"""Numerical semantics of symbolic expressions on a finite Fock space.

Momentum variables run over the box modes n = -N..N and spins over both
values. Deltas become Kronecker symbols, ``ddelta(p' - b)`` becomes
``-i D[n', b]`` with D the box position matrix, and a derivative-marked ladder
``dp[a(k)]`` becomes ``sum_j W[k, j] a_j`` for a caller-supplied W.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from scipy import sparse

from ..field import position_matrix
from ..fock import SPIN_ORDER, FockSpace, ladder
from ..spinors import make_spinors
from .expr import (
    Contract,
    DDelta,
    Delta,
    EngineError,
    Expression,
    Kin,
    Mom,
    Monomial,
    Overlap,
    Phase,
    SpinDelta,
    Tau,
    XInt,
)


class _Env:
    def __init__(self, space: FockSpace, t: float, W: np.ndarray | None):
        self.space = space
        self.table = space.table
        self.t = t
        N = self.table.N
        self.D = position_matrix(self.table)
        self.W = -1j * self.D if W is None else np.asarray(W, dtype=complex)
        if self.W.shape != (2 * N + 1, 2 * N + 1):
            raise ValueError("W must be (2N+1) x (2N+1)")
        self._lad: dict = {}

    def idx(self, n: int) -> int:
        return n + self.table.N

    def p(self, n: int) -> float:
        return float(self.table.momentum(n))

    def E(self, n: int) -> float:
        return float(self.table.energy(n))

    def in_box(self, n: int) -> bool:
        return -self.table.N <= n <= self.table.N

    def ladder(self, species: str, n: int, s: float, dagger: bool, deriv: bool):
        key = (species, n, s, dagger, deriv)
        if key not in self._lad:
            kind = "create" if dagger else "annihilate"
            if not deriv:
                op = ladder(self.space, self.table.slot(species, n, s), kind)
            else:
                row = self.W[self.idx(n)]
                op = None
                for j in self.table.ns:
                    w = row[self.idx(j)]
                    if w == 0:
                        continue
                    w = np.conj(w) if dagger else w
                    term = w * ladder(self.space, self.table.slot(species, j, s), kind)
                    op = term if op is None else op + term
                if op is None:
                    op = sparse.csr_matrix((self.space.dim, self.space.dim), dtype=complex)
            self._lad[key] = sparse.csr_matrix(op, dtype=complex)
        return self._lad[key]


def _spinor(env: _Env, which: str, n: int, s: float, deriv: bool) -> np.ndarray:
    ms = make_spinors(env.p(n), s, env.table.m)
    if which == "u":
        return ms.du_dp if deriv else ms.u
    return ms.dv_dp if deriv else ms.v


def _atom_value(a, env: _Env, mode, spin) -> complex:
    if isinstance(a, Delta):
        return 1.0 if mode(a.a) == mode(a.b) else 0.0
    if isinstance(a, DDelta):
        nb = mode(a.b)
        if not env.in_box(nb):
            return 0.0
        return -1j * env.D[env.idx(mode(Mom(1, "p'"))), env.idx(nb)]
    if isinstance(a, SpinDelta):
        return 1.0 if spin(a.a) == spin(a.b) else 0.0
    if isinstance(a, Overlap):
        bra = _spinor(env, a.bra, mode(a.bmom), spin(a.bspin), a.bderiv)
        ket = _spinor(env, a.ket, mode(a.kmom), spin(a.kspin), a.kderiv)
        return complex(np.vdot(bra, ket))
    if isinstance(a, Phase):
        e = a.cp * env.E(mode(Mom(1, "p"))) if a.cp else 0.0
        e += a.cpp * env.E(mode(Mom(1, "p'"))) if a.cpp else 0.0
        return np.exp(1j * e * env.t)
    if isinstance(a, Kin):
        val = 1.0
        for k, n in a.powers:
            if k == "t":
                val *= env.t**n
            elif k in ("p", "p'"):
                val *= env.p(mode(Mom(1, k))) ** n
            else:
                val *= env.E(mode(Mom(1, _kin_var(k)))) ** n
        return val
    if isinstance(a, Tau):
        return a.sector * env.t
    if isinstance(a, XInt):
        if a.mu == 0:
            return env.t if mode(Mom(1, "p'")) == mode(Mom(a.sigma, "p")) else 0.0
        kp, k = mode(Mom(1, "p'")), mode(Mom(a.sigma, "p"))
        if a.sgn < 0:
            kp, k = k, kp
        if not (env.in_box(kp) and env.in_box(k)):
            return 0.0
        return env.D[env.idx(kp), env.idx(k)]
    if isinstance(a, Contract):
        w = env.W[env.idx(mode(a.mom)), env.idx(mode(a.mom))]
        return w if a.side == "left" else np.conj(w)
    raise EngineError(f"no numerical meaning for {a!r}")


def _kin_var(k: str) -> str:
    return "p'" if k.endswith("'") else "p"


def materialize(e: Expression, space: FockSpace, t: float = 0.0, W: np.ndarray | None = None) -> sparse.csr_matrix:
    """Sparse operator for ``e`` on ``space`` at time ``t``."""
    env = _Env(space, t, W)
    out = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
    ident = space.identity().astype(complex)
    for m in e.terms:
        free = m.variables() - m.bound
        if free:
            raise EngineError(f"free variables {sorted(free)} in {m}")
        out = out + _monomial(m, env, ident)
    return out.tocsr()


def _monomial(m: Monomial, env: _Env, ident) -> sparse.csr_matrix:
    mom_vars = sorted(v for v in m.bound if v in ("p", "p'"))
    spin_vars = sorted(v for v in m.bound if v in ("s", "s'"))
    coef = complex(m.coef)
    acc = None
    for nvals in product(env.table.ns, repeat=len(mom_vars)):
        nmap = dict(zip(mom_vars, nvals))
        mode = lambda mo: mo.sign * nmap[mo.var]  # noqa: E731
        for svals in product(SPIN_ORDER, repeat=len(spin_vars)):
            smap = dict(zip(spin_vars, svals))
            spin = smap.__getitem__
            scalar = coef
            for a in m.atoms:
                scalar *= _atom_value(a, env, mode, spin)
                if scalar == 0:
                    break
            if scalar == 0:
                continue
            op = ident
            for lad in m.ladders:
                n = mode(lad.mom)
                if not env.in_box(n):
                    op = None
                    break
                op = op @ env.ladder(lad.species, n, spin(lad.spin), lad.dagger, lad.deriv)
            if op is None:
                continue
            term = scalar * op
            acc = term if acc is None else acc + term
    if acc is None:
        return sparse.csr_matrix(ident.shape, dtype=complex)
    return acc
