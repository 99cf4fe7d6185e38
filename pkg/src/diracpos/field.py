"""Mode expansion of the operator-valued field and exact box bilinears.

psi(t,x) = L^{-1/2} sum_{n,s} [c u e^{-i(p0 t - p x)} + d^+ v e^{+i(p0 t - p x)}]

All x-integrals over the box [-L/2, L/2] use closed forms; no spatial grid
enters operator assembly.
"""

from __future__ import annotations

from math import pi

import numpy as np

from .fock import FockSpace, ModeTable, QuadraticForm, ladder
from .gamma import GammaSet, build_gammas, hamiltonian_form
from .spinors import DomainError, make_spinors


def mode_overlap_plane(kp: int, k: int, L: float) -> complex:
    """int exp(i (p_k - p_kp) x) dx over the box."""
    return complex(L) if kp == k else 0j


def mode_overlap_x(kp: int, k: int, L: float) -> complex:
    """int x exp(i (p_k - p_kp) x) dx over the box."""
    if kp == k:
        return 0j
    q = 2 * pi * (k - kp) / L
    return L * (-1.0) ** (k - kp) / (1j * q)


def position_matrix(table: ModeTable) -> np.ndarray:
    """D[a, b] = mode_overlap_x(n_a, n_b) / L over n = -N..N."""
    ns = np.arange(-table.N, table.N + 1)
    diff = ns[None, :] - ns[:, None]
    out = np.zeros(diff.shape, dtype=complex)
    off = diff != 0
    q = 2 * pi * diff[off] / table.L
    out[off] = (-1.0) ** diff[off] / (1j * q)
    return out


class ModeArrays:
    """Per-(n, s) spinor data flattened in slot order (n ascending, then spin)."""

    def __init__(self, table: ModeTable):
        from .fock import SPIN_ORDER

        self.table = table
        self.n = np.array([n for n in table.ns for _ in SPIN_ORDER])
        self.s = np.array([s for _ in table.ns for s in SPIN_ORDER])
        self.p = table.momentum(self.n)
        self.E = table.energy(self.n)
        spin = [make_spinors(float(p), float(s), table.m) for p, s in zip(self.p, self.s)]
        self.U = np.array([x.u for x in spin])
        self.V = np.array([x.v for x in spin])
        self.dU = np.array([x.du_dp for x in spin])
        self.dV = np.array([x.dv_dp for x in spin])
        lookup = {(int(n), float(s)): i for i, (n, s) in enumerate(zip(self.n, self.s))}
        self.neg = np.array([lookup[(-int(n), float(s))] for n, s in zip(self.n, self.s)])
        self.nidx = self.n + table.N  # row into position_matrix

    @property
    def M(self) -> int:
        return len(self.n)


def _weight(table: ModeTable, modes: ModeArrays, weight: str) -> np.ndarray:
    if weight == "plane":
        base = np.eye(2 * table.N + 1, dtype=complex)
    elif weight == "x":
        base = position_matrix(table)
    else:
        raise ValueError(weight)
    return base[np.ix_(modes.nidx, modes.nidx)]


def bilinear(
    table: ModeTable,
    t: float,
    weight: str = "plane",
    kernel_c=None,
    kernel_d=None,
    modes: ModeArrays | None = None,
) -> QuadraticForm:
    """Normal-ordered form of int psi^+ w(x) K psi dx, computed mode by mode.

    ``kernel_c``/``kernel_d`` map the positive/negative frequency spinors to
    K u and K v (arrays of shape (M, 4)); defaults are the identity.
    """
    modes = modes or ModeArrays(table)
    M = modes.M
    Wc = modes.U if kernel_c is None else kernel_c
    Wd = modes.V if kernel_d is None else kernel_d
    Wm = _weight(table, modes, weight)
    E = modes.E
    neg = modes.neg
    ep = np.exp(1j * E * t)

    form = QuadraticForm.zeros(2 * M)
    # c^+_a c_b
    form.A[:M, :M] = (modes.U.conj() @ Wc.T) * np.outer(ep, ep.conj()) * Wm
    # c^+_a d^+_b
    form.B[:M, M:] = (modes.U.conj() @ Wd.T) * np.outer(ep, ep) * Wm[:, neg]
    # d_a c_b
    form.C[M:, :M] = (modes.V.conj() @ Wc.T) * np.outer(ep.conj(), ep.conj()) * Wm[neg, :]
    # d_a d^+_b = delta_ab - d^+_b d_a
    dd = (modes.V.conj() @ Wd.T) * np.outer(ep.conj(), ep) * Wm.T
    form.const = complex(np.trace(dd))
    form.A[M:, M:] = -dd.T
    return form


def assemble_field(space: FockSpace, t: float, x: float):
    """Four sparse operators psi_a(t, x), a = 0..3."""
    table = space.table
    if not -table.L / 2 <= x <= table.L / 2:
        raise DomainError(f"x={x} outside the box [-L/2, L/2]")
    modes = ModeArrays(table)
    M = modes.M
    phase = np.exp(-1j * (modes.E * t - modes.p * x)) / np.sqrt(table.L)
    comps = [None] * 4
    for i in range(M):
        a = ladder(space, i, "annihilate")
        bd = ladder(space, M + i, "create")
        for comp in range(4):
            term = (modes.U[i, comp] * phase[i]) * a + (modes.V[i, comp] * phase[i].conjugate()) * bd
            comps[comp] = term if comps[comp] is None else comps[comp] + term
    return [c.tocsr() for c in comps]


def field_coefficients(table: ModeTable, t: float, x: float) -> dict:
    """c-number coefficients of c(n,s) and d^+(n,s) in psi(t,x), keyed by (n, s)."""
    modes = ModeArrays(table)
    phase = np.exp(-1j * (modes.E * t - modes.p * x)) / np.sqrt(table.L)
    out = {}
    for i in range(modes.M):
        key = (int(modes.n[i]), float(modes.s[i]))
        out[("c",) + key] = modes.U[i] * phase[i]
        out[("d+",) + key] = modes.V[i] * phase[i].conjugate()
    return out


def charge_like_number(space: FockSpace, t: float = 0.0):
    """int psi^+ psi dx = sum (c^+c + d d^+); the phases cancel, t is accepted for symmetry."""
    return bilinear(space.table, t, "plane").to_sparse(space)


def momentum_two_ways(space: FockSpace, mu: int = 3, g: GammaSet | None = None):
    """P^mu built from p^mu = i d/dx_mu and from H^mu, both mode-exact.

    Returns (P_from_derivative, P_from_hamiltonian).
    """
    if mu not in (0, 3):
        raise ValueError("the (1+1)D reduction only has mu in {0, 3}")
    g = g or build_gammas()
    table = space.table
    modes = ModeArrays(table)
    if mu == 3:
        fac_c, fac_d = modes.p, -modes.p  # -i d/dx on e^{+ipx} and e^{-ipx}
    else:
        fac_c, fac_d = modes.E, -modes.E  # i d/dt on e^{-iEt} and e^{+iEt}
    pform = bilinear(table, 0.0, "plane", modes.U * fac_c[:, None], modes.V * fac_d[:, None], modes)

    h = hamiltonian_form(g, mu, table.m)
    raise_sign = g.metric[mu, mu]
    kc = np.empty_like(modes.U)
    kd = np.empty_like(modes.V)
    for i in range(modes.M):
        p_lower = np.array([modes.E[i], 0.0, 0.0, -modes.p[i]])
        kc[i] = raise_sign * h.on_plane_wave(p_lower, +1) @ modes.U[i]
        kd[i] = raise_sign * h.on_plane_wave(p_lower, -1) @ modes.V[i]
    hform = bilinear(table, 0.0, "plane", kc, kd, modes)
    return pform.to_sparse(space), hform.to_sparse(space)
