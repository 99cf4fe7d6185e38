"""Materialization oracle for the rewrite pipeline."""

from __future__ import annotations

import numpy as np

from ..field import position_matrix
from ..fock import ModeTable, build_space
from .continuum import ibp_residual
from .derive import PIPELINE, templates
from .expr import DDelta, Expression
from .materialize import materialize


def oracle_weight(table: ModeTable) -> np.ndarray:
    """Derivative-ladder matrix with a non-trivial diagonal, so contractions are exercised."""
    N = table.N
    return -1j * position_matrix(table) + np.diag(0.3 + 0.2j * np.arange(-N, N + 1) / (N + 1))


def operator_gap(a: Expression, b: Expression, space, t: float, W) -> float:
    d = materialize(a, space, t, W) - materialize(b, space, t, W)
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0


def pipeline_residuals(N: int = 0, L: float = 2 * np.pi * 10, m: float = 1.0, t: float = 0.7) -> dict[str, float]:
    """Residual per (component, template, rule).

    Integration by parts against ddelta has no finite-box counterpart; that
    step is scored with the continuum check instead of the Fock oracle.
    """
    table = ModeTable(L, N, m)
    space = build_space(table)
    W = oracle_weight(table)
    out = {}
    for mu in (0, 1):
        for name, e in templates(mu).items():
            for step, rule in PIPELINE:
                new = rule(e)
                key = f"mu{mu}.{name}.{step}"
                if any(isinstance(a, DDelta) for mono in e for a in mono.atoms) and step == "collapse_delta":
                    out[key] = max(ibp_residual(mono, mass=m, t=t) for mono in e)
                else:
                    out[key] = operator_gap(e, new, space, t, W)
                e = new
    return out
