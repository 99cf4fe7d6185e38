"""Local-phase Noether machinery and the second-quantized position operator.

Covers the c-number checks (Lagrangian, gauge variation, generalized
continuity d_mu J^{mu nu} = I^nu) and the Fock-space operators X^0, X^3 in
their direct form int psi^+ x^mu psi dx and in the expanded form with
charge-center, ladder-derivative, spinor-derivative and pair terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .field import ModeArrays, bilinear, charge_like_number, position_matrix
from .fock import FockSpace, QuadraticForm, one_body_moments
from .gamma import build_gammas
from .spinors import make_spinors

_G = build_gammas()
_G0, _G3 = _G.gamma[0], _G.gamma[3]


# --------------------------------------------------------------------------
# c-number solutions


@dataclass(frozen=True)
class PlaneWaveTerm:
    p: float
    s: float
    sign: int  # +1: u e^{-i(p0 t - p x)}, -1: v e^{+i(p0 t - p x)}
    amplitude: complex = 1.0
    p0: float | None = None  # override to go off shell


@dataclass(frozen=True)
class ClassicalSolution:
    terms: tuple[PlaneWaveTerm, ...]
    m: float = 1.0
    L: float = 1.0  # amplitudes carry the 1/sqrt(L) box normalization

    def _parts(self, t: float, x: float):
        psi = np.zeros(4, dtype=complex)
        dt = np.zeros(4, dtype=complex)
        dx = np.zeros(4, dtype=complex)
        for term in self.terms:
            ms = make_spinors(term.p, term.s, self.m)
            w = ms.u if term.sign > 0 else ms.v
            e = ms.p0 if term.p0 is None else term.p0
            val = term.amplitude / np.sqrt(self.L) * w * np.exp(-1j * term.sign * (e * t - term.p * x))
            psi += val
            dt += -1j * term.sign * e * val
            dx += 1j * term.sign * term.p * val
        return psi, dt, dx

    def __call__(self, t: float, x: float) -> np.ndarray:
        return self._parts(t, x)[0]

    def norm2(self) -> float:
        return float(sum(abs(term.amplitude) ** 2 for term in self.terms) / self.L)


def superposition(specs, m: float = 1.0, L: float = 1.0) -> ClassicalSolution:
    """specs: iterable of (p, s, sign, amplitude)."""
    return ClassicalSolution(tuple(PlaneWaveTerm(*spec) for spec in specs), m=m, L=L)


def _bar(psi: np.ndarray) -> np.ndarray:
    return psi.conj() @ _G0


def lagrangian_density(sol: ClassicalSolution, t: float, x: float) -> complex:
    psi, dt, dx = sol._parts(t, x)
    return complex(_bar(psi) @ (1j * (_G0 @ dt + _G3 @ dx) - sol.m * psi))


@dataclass(frozen=True)
class LocalPhase:
    """theta(x) = eps_0 t + eps_3 x; the gauge potential A_mu = eps_mu is constant."""

    eps0: float
    eps3: float

    def theta(self, t: float, x: float) -> float:
        return self.eps0 * t + self.eps3 * x

    @property
    def potential(self) -> tuple[float, float]:
        return (self.eps0, self.eps3)


def _transformed_lagrangian(sol, phase: LocalPhase, t, x, mode: str) -> complex:
    psi, dt, dx = sol._parts(t, x)
    th = phase.theta(t, x)
    if mode == "exact_exponential":
        f, df = np.exp(-1j * th), -1j * np.exp(-1j * th)
    elif mode == "first_order":
        f, df = 1 - 1j * th, -1j
    else:
        raise ValueError(f"unknown mode {mode!r}")
    a0, a3 = phase.potential
    new = f * psi
    # D_mu psi' = d_mu psi' + i (d_mu theta) psi'
    d0 = df * a0 * psi + f * dt + 1j * a0 * new
    d3 = df * a3 * psi + f * dx + 1j * a3 * new
    return complex(_bar(new) @ (1j * (_G0 @ d0 + _G3 @ d3) - sol.m * new))


def gauge_variation(sol: ClassicalSolution, phase: LocalPhase, mode: str = "exact_exponential", points=None) -> float:
    """max |L' - L| over sample points."""
    if points is None:
        points = [(t, x) for t in (0.0, 0.7, -1.3) for x in (-0.9, 0.0, 0.4, 1.1)]
    return max(
        abs(_transformed_lagrangian(sol, phase, t, x, mode) - lagrangian_density(sol, t, x)) for t, x in points
    )


def currents(sol: ClassicalSolution, t: float, x: float):
    """J^{mu nu} = psibar gamma^mu x^nu psi and I^nu = psibar gamma^nu psi, mu, nu in {0, 3}."""
    psi = sol(t, x)
    bar = _bar(psi)
    current = np.array([bar @ _G0 @ psi, bar @ _G3 @ psi])
    coords = np.array([t, x])
    return np.outer(current, coords), current


def continuity_residual(sol: ClassicalSolution, t: float, x: float, h: float) -> np.ndarray:
    """Central-difference d_mu J^{mu nu} - I^nu for nu in {0, 3}."""
    if h <= 0:
        raise ValueError("h must be positive")
    jt_plus, _ = currents(sol, t + h, x)
    jt_minus, _ = currents(sol, t - h, x)
    jx_plus, _ = currents(sol, t, x + h)
    jx_minus, _ = currents(sol, t, x - h)
    _, source = currents(sol, t, x)
    div = (jt_plus[0] - jt_minus[0]) / (2 * h) + (jx_plus[1] - jx_minus[1]) / (2 * h)
    return div - source


def continuity_order(sol: ClassicalSolution, t: float, x: float, h: float) -> np.ndarray:
    """Observed convergence order per nu from steps h and h/2."""
    r1 = np.abs(continuity_residual(sol, t, x, h))
    r2 = np.abs(continuity_residual(sol, t, x, h / 2))
    return np.log2(r1 / r2)


# --------------------------------------------------------------------------
# second-quantized position operator


@dataclass(frozen=True)
class FormalTimeSymbol:
    """-i d/dp0, evaluated as +t on positive-frequency and -t on negative-frequency terms."""

    t: float

    def eval(self, sector: int) -> float:
        return self.t if sector > 0 else -self.t


def temporal_form(table, t: float) -> QuadraticForm:
    return bilinear(table, t, "plane").scaled(t)


def spatial_form(table, t: float, modes: ModeArrays | None = None) -> QuadraticForm:
    return bilinear(table, t, "x", modes=modes)


def position_numeric(space: FockSpace, t: float):
    """(X^0, X^3) from int psi^+ x^mu psi dx with closed-form box integrals."""
    X0 = t * charge_like_number(space, t)
    X3 = spatial_form(space.table, t).to_sparse(space)
    return X0, X3


TEMPORAL_TEXT = "sum(p,s): c+(p,s) c(p,s) tau(+) + d+(p,s) d(p,s) tau(-) - tau(-)"


def position_temporal_symbolic(space: FockSpace, t: float):
    """sum [c^+c + d^+d - 1](-i d/dp0) built symbolically and evaluated at time t."""
    from .symbolic import materialize, parse

    return materialize(parse(TEMPORAL_TEXT), space, t=t)


def zero_point_time(space_or_table, t: float) -> float:
    """Identity coefficient of X^0(t): t times the number of (p, s) modes."""
    table = getattr(space_or_table, "table", space_or_table)
    return float(t * table.n_modes)


def _dd_form(coef: np.ndarray, M: int) -> QuadraticForm:
    """sum coef[a, b] d_a d_b^+ in normal order."""
    form = QuadraticForm.zeros(2 * M)
    form.const = complex(np.trace(coef))
    form.A[M:, M:] = -coef.T
    return form


def expanded_forms(table, t: float, modes: ModeArrays | None = None) -> dict[str, QuadraticForm]:
    """The four groups of the expanded spatial operator as quadratic forms.

    A: charge-center drift t p/p0 (c^+c - d^+d)
    B: ladder-derivative terms, -i d/dp realized by the box position matrix
    C: spinor-derivative terms with analytic du/dp, dv/dp
    D: pair terms oscillating as exp(+-2i p0 t)
    """
    modes = modes or ModeArrays(table)
    M = modes.M
    same_n = modes.n[:, None] == modes.n[None, :]
    same_s = modes.s[:, None] == modes.s[None, :]
    vel = modes.p / modes.E
    Dm = position_matrix(table)[np.ix_(modes.nidx, modes.nidx)]

    A = QuadraticForm.zeros(2 * M)
    A.A[np.arange(M), np.arange(M)] = t * vel
    A.A[np.arange(M) + M, np.arange(M) + M] = -t * vel

    B = QuadraticForm.zeros(2 * M)
    B.A[:M, :M] = Dm * same_s
    B = B + _dd_form(Dm.T * same_s, M)

    C = QuadraticForm.zeros(2 * M)
    C.A[:M, :M] = -1j * (modes.dU.conj() @ modes.U.T) * same_n
    C = C + _dd_form(1j * (modes.dV.conj() @ modes.V.T) * same_n, M)

    # c^+(-p,s') d^+(p,s): rows a = (-n, s'), columns b = (n, s)
    pair = modes.n[:, None] == -modes.n[None, :]
    osc = np.exp(2j * modes.E * t)
    D = QuadraticForm.zeros(2 * M)
    D.B[:M, M:] = -1j * (modes.dU.conj() @ modes.V.T) * pair * osc[None, :]
    D.C[M:, :M] = 1j * (modes.dV.conj() @ modes.U.T) * pair * osc.conj()[None, :]
    return {"A": A, "B": B, "C": C, "D": D}


def position_expanded(space: FockSpace, t: float):
    forms = expanded_forms(space.table, t)
    return tuple(forms[k].to_sparse(space) for k in "ABCD")


# --------------------------------------------------------------------------
# trajectories and fits


@dataclass
class TrajectorySample:
    t: float
    x_expect: float
    x0_expect: float
    im_residual: float
    in_window: bool = True


@dataclass
class Trajectory:
    samples: list[TrajectorySample] = field(default_factory=list)
    operator: str = "numeric"

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def x(self) -> np.ndarray:
        return np.array([s.x_expect for s in self.samples])

    @property
    def x0(self) -> np.ndarray:
        return np.array([s.x0_expect for s in self.samples])

    @property
    def all_in_window(self) -> bool:
        return all(s.in_window for s in self.samples)


def trajectory(space: FockSpace, state: np.ndarray, times, operator: str = "numeric") -> Trajectory:
    """<X^3>(t) and <X^0>(t) on a fixed state.

    operator="numeric" uses int psi^+ x psi dx; operator="expanded" uses the sum
    of the expanded groups A..D. Samples with t >= L/4 are flagged.
    """
    table = space.table
    modes = ModeArrays(table)
    moments = one_body_moments(space, state)
    charge = bilinear(table, 0.0, "plane", modes=modes).expectation(space, state, moments)
    out = Trajectory(operator=operator)
    flagged = False
    for t in times:
        t = float(t)
        if operator == "numeric":
            form = spatial_form(table, t, modes)
        elif operator == "expanded":
            parts = expanded_forms(table, t, modes)
            form = parts["A"] + parts["B"] + parts["C"] + parts["D"]
        else:
            raise ValueError(f"unknown operator {operator!r}")
        val = form.expectation(space, state, moments)
        ok = abs(t) < table.L / 4
        flagged |= not ok
        out.samples.append(TrajectorySample(t, val.real, (t * charge).real, abs(val.imag), ok))
    if flagged:
        warnings.warn("trajectory samples outside the wrap window |t| < L/4", RuntimeWarning, stacklevel=2)
    return out


def mean_velocity(table, state_amplitudes: np.ndarray) -> float:
    """<p/p0> of a one-particle wavepacket given amplitudes over n = -N..N."""
    p = table.momentum(np.array(list(table.ns)))
    w = np.abs(state_amplitudes) ** 2
    return float(np.sum(w * p / table.energy(np.array(list(table.ns)))) / np.sum(w))


def gaussian_amplitudes(table, pbar: float, sigma: float) -> np.ndarray:
    p = table.momentum(np.array(list(table.ns)))
    a = np.exp(-((p - pbar) ** 2) / (4 * sigma**2))
    return a / np.linalg.norm(a)


def pbar_for_velocity(table, target: float, sigma: float) -> float:
    """Center momentum whose discrete Gaussian packet has <p/p0> = target."""
    f = lambda pb: mean_velocity(table, gaussian_amplitudes(table, pb, sigma)) - target  # noqa: E731
    return float(optimize.brentq(f, -10 * table.m, 10 * table.m, xtol=1e-14))


def fit_drift(times, xs) -> float:
    slope, _ = np.polyfit(np.asarray(times), np.asarray(xs), 1)
    return float(slope)


def fit_frequency(times, xs, omega_max: float | None = None, n_grid: int = 4000) -> float:
    """Dominant angular frequency of xs(t) ~ a + b t + A cos(w t) + B sin(w t).

    Grid scan of the linear least-squares residual, then bounded refinement.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(xs, dtype=float)
    span = t.max() - t.min()
    dt = np.min(np.diff(np.sort(t)))
    omega_max = omega_max or np.pi / dt
    omega_min = np.pi / span

    def resid(w):
        basis = np.column_stack([np.ones_like(t), t, np.cos(w * t), np.sin(w * t)])
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        return float(np.sum((basis @ coef - y) ** 2))

    grid = np.linspace(omega_min, omega_max, n_grid)
    vals = np.array([resid(w) for w in grid])
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    res = optimize.minimize_scalar(resid, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x)
