"""Box-normalized plane-wave spinors for momentum along the 3-axis.

u(p,s) = N (chi_s ; a sigma_3 chi_s),  v(p,s) = N (a sigma_3 chi_s ; chi_s)
with N = sqrt((p0+m)/(2 p0)) and a = p/(p0+m), so that u^+u = v^+v = 1.
The antiparticle two-spinor is taken equal to chi_s (no extra phase); every
orthogonality/completeness relation is insensitive to that choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SPINS = (0.5, -0.5)
_SIGMA3_DIAG = {0.5: 1.0, -0.5: -1.0}


class DomainError(ValueError):
    pass


def dispersion(p, m):
    return np.sqrt(np.asarray(p, dtype=float) ** 2 + m * m)


def _chi(s: float) -> np.ndarray:
    if s == 0.5:
        return np.array([1.0, 0.0])
    if s == -0.5:
        return np.array([0.0, 1.0])
    raise DomainError(f"spin label must be +1/2 or -1/2, got {s}")


@dataclass(frozen=True)
class ModeSpinor:
    p: float
    s: float
    m: float
    p0: float
    u: np.ndarray
    v: np.ndarray
    du_dp: np.ndarray
    dv_dp: np.ndarray


@lru_cache(maxsize=None)
def make_spinors(p: float, s: float, m: float) -> ModeSpinor:
    if m <= 0:
        raise DomainError("massless spinors are not supported (m must be > 0)")
    p = float(p)
    chi = _chi(s)
    sig = _SIGMA3_DIAG[s]
    p0 = float(np.sqrt(p * p + m * m))
    norm = np.sqrt((p0 + m) / (2 * p0))
    a = p / (p0 + m)
    # d/dp of N and of N*a, closed form
    dnorm = -m * p / (4 * p0**3 * norm)
    da = m / (p0 * (p0 + m))
    dna = dnorm * a + norm * da

    upper, lower = norm * chi, norm * a * sig * chi
    u = np.concatenate([upper, lower]).astype(complex)
    v = np.concatenate([lower, upper]).astype(complex)
    du = np.concatenate([dnorm * chi, dna * sig * chi]).astype(complex)
    dv = np.concatenate([dna * sig * chi, dnorm * chi]).astype(complex)
    for arr in (u, v, du, dv):
        arr.setflags(write=False)
    return ModeSpinor(p=p, s=s, m=m, p0=p0, u=u, v=v, du_dp=du, dv_dp=dv)


def spinor_dp(ms: ModeSpinor) -> tuple[np.ndarray, np.ndarray]:
    return ms.du_dp, ms.dv_dp


def finite_difference_dp(p: float, s: float, m: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference oracle for the spinor derivatives."""
    hi, lo = make_spinors(p + h, s, m), make_spinors(p - h, s, m)
    return (hi.u - lo.u) / (2 * h), (hi.v - lo.v) / (2 * h)


def relation_defects(p: float, m: float) -> dict[str, float]:
    """Largest violation of each orthonormality/completeness line at (p, m)."""
    from .gamma import build_gammas

    g = build_gammas()
    out = {"orthonormal": 0.0, "cross": 0.0, "completeness": 0.0, "dirac": 0.0}
    plus = {s: make_spinors(p, s, m) for s in SPINS}
    minus = {s: make_spinors(-p, s, m) for s in SPINS}
    for s in SPINS:
        for sp in SPINS:
            want = 1.0 if s == sp else 0.0
            out["orthonormal"] = max(
                out["orthonormal"],
                abs(np.vdot(plus[sp].u, plus[s].u) - want),
                abs(np.vdot(plus[sp].v, plus[s].v) - want),
            )
            out["cross"] = max(
                out["cross"],
                abs(np.vdot(minus[sp].v, plus[s].u)),
                abs(np.vdot(minus[sp].u, plus[s].v)),
            )
    total = sum(np.outer(plus[s].u, plus[s].u.conj()) + np.outer(minus[s].v, minus[s].v.conj()) for s in SPINS)
    out["completeness"] = float(np.abs(total - np.eye(4)).max())
    p0 = float(dispersion(p, m))
    slash = g.gamma[0] * p0 - g.gamma[3] * p
    for s in SPINS:
        out["dirac"] = max(
            out["dirac"],
            float(np.abs((slash - m * np.eye(4)) @ plus[s].u).max()),
            float(np.abs((slash + m * np.eye(4)) @ plus[s].v).max()),
        )
    return {k: float(v) for k, v in out.items()}
