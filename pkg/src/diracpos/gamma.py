"""Dirac matrices, spin tensor and the four equivalent Hamiltonian forms.

Index conventions: upper indices are the defining ones (``gamma[mu]`` is
gamma^mu), lowered matrices use the flat metric diag(1, -1, -1, -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
IDENTITY = np.eye(4, dtype=complex)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class GammaSet:
    gamma: tuple[np.ndarray, ...]
    metric: np.ndarray = field(default_factory=lambda: METRIC.copy())

    def upper(self, mu: int) -> np.ndarray:
        return self.gamma[mu]

    def lower(self, mu: int) -> np.ndarray:
        return self.metric[mu, mu] * self.gamma[mu]

    def clifford_defect(self) -> float:
        """Largest entry of {g^mu, g^nu} - 2 g^{mu nu} I over all 16 pairs."""
        worst = 0.0
        for mu in range(4):
            for nu in range(4):
                a = self.gamma[mu] @ self.gamma[nu] + self.gamma[nu] @ self.gamma[mu]
                worst = max(worst, np.abs(a - 2 * self.metric[mu, nu] * IDENTITY).max())
        return float(worst)


@dataclass(frozen=True)
class DiffOperator:
    """sum_sigma a[sigma] d_sigma + b acting on 4-spinor fields.

    Derivatives are with respect to the contravariant coordinates x^sigma.
    """

    a: tuple[np.ndarray, ...]
    b: np.ndarray

    def on_plane_wave(self, p_lower: np.ndarray, sign: int = 1) -> np.ndarray:
        """Matrix acting on w for the field w * exp(-i sign p_mu x^mu).

        ``p_lower`` holds covariant components p_mu.
        """
        out = self.b.astype(complex)
        for sigma in range(4):
            out = out + self.a[sigma] * (-1j * sign * p_lower[sigma])
        return out


def build_gammas(representation: str = "dirac-pauli") -> GammaSet:
    if representation.lower().replace("_", "-") not in ("dirac-pauli", "dirac", "standard"):
        raise ConfigurationError(f"unsupported gamma representation {representation!r}")
    zero = np.zeros((2, 2), dtype=complex)
    one = np.eye(2, dtype=complex)
    g0 = np.block([[one, zero], [zero, -one]])
    gk = tuple(np.block([[zero, s], [-s, zero]]) for s in _PAULI)
    return GammaSet(gamma=(g0,) + gk)


def spin_tensor(g: GammaSet, mu: int, nu: int) -> np.ndarray:
    a, b = g.lower(mu), g.lower(nu)
    return 0.25j * (a @ b - b @ a)


def hamiltonian_form(g: GammaSet, mu: int, m: float) -> DiffOperator:
    """H_mu = -gamma_mu (i gamma^nu d_nu - i gamma^mu d_mu) + gamma_mu m.

    The subtracted term is the single unsummed one, so the derivative along
    mu itself drops out and H_0 is the usual alpha.p + beta m.
    """
    if m < 0:
        raise ValueError("mass must be non-negative")
    low = g.lower(mu)
    a = tuple(
        np.zeros((4, 4), dtype=complex) if sigma == mu else -1j * low @ g.upper(sigma)
        for sigma in range(4)
    )
    return DiffOperator(a=a, b=m * low)


def commutator_Hx(g: GammaSet, mu: int, nu: int, m: float = 1.0) -> np.ndarray:
    """Coefficient matrix of [H_mu, x_nu], read off the derivative coefficients.

    [a^sigma d_sigma, x_nu] = a^sigma g_{sigma nu}; the mass term commutes.
    """
    h = hamiltonian_form(g, mu, m)
    out = np.zeros((4, 4), dtype=complex)
    for sigma in range(4):
        out = out + h.a[sigma] * g.metric[sigma, nu]
    return out


def heisenberg_velocity(g: GammaSet, mu: int, nu: int) -> np.ndarray:
    """dx_nu/dx^mu = g_{mu nu} + i [H_mu, x_nu]."""
    return g.metric[mu, nu] * IDENTITY + 1j * commutator_Hx(g, mu, nu)


def momentum_commutator_residual(mu: int, nu: int, degree: int = 2) -> int:
    """Check [p_mu, x_nu] f = i g_{mu nu} f on a polynomial test spinor.

    p_mu = i d/dx^mu. Uses exact polynomial arithmetic (sympy) and returns the
    number of spinor components where the identity fails (0 on success).
    """
    import sympy as sp

    xs = sp.symbols("x0:4")
    lower = [sum(METRIC[n, s] * xs[s] for s in range(4)) for n in range(4)]
    f = [sum((k + 1 + c) * xs[k] ** degree for k in range(4)) + c * xs[0] * xs[3] + 1 for c in range(4)]
    bad = 0
    for comp in f:
        lhs = sp.I * sp.diff(lower[nu] * comp, xs[mu]) - lower[nu] * sp.I * sp.diff(comp, xs[mu])
        if sp.expand(lhs - sp.I * int(METRIC[mu, nu]) * comp) != 0:
            bad += 1
    return bad
