"""Named verification checks grouped into suites.

Each check returns a ``CheckResult``; the CLI and the acceptance tests share
these so that a reported number always comes from the same code path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import noether
from .config import RunConfig
from .field import ModeArrays, momentum_two_ways
from .fock import ModeTable, build_space, build_state, ladder, one_body_moments
from .gamma import build_gammas, commutator_Hx, momentum_commutator_residual, spin_tensor
from .spinors import relation_defects

SUITES = ("gamma", "spinor", "fock", "field", "noether", "symbolic")


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skip
    measured: float | None
    tolerance: float | str | None
    runtime: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _result(name, ok, measured, tol, t0, **detail) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", _num(measured), tol, time.perf_counter() - t0, detail)


def _num(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return float(x)


def _max_abs(a) -> float:
    a = a.tocoo() if hasattr(a, "tocoo") else np.asarray(a)
    data = a.data if hasattr(a, "data") and not isinstance(a, np.ndarray) else a
    return float(np.max(np.abs(data))) if np.size(data) else 0.0


# ------------------------------------------------------------------- gamma


def check_clifford(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    d = build_gammas().clifford_defect()
    return _result("clifford_algebra", d < 1e-15, d, 1e-15, t0)


def check_spin_tensor(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    g = build_gammas()
    worst = max(
        _max_abs(commutator_Hx(g, mu, nu, cfg.m) + 2 * spin_tensor(g, mu, nu)) for mu in range(4) for nu in range(4)
    )
    return _result("hamiltonian_position_commutator", worst < 1e-13, worst, 1e-13, t0)


def check_momentum_commutator(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    bad = sum(momentum_commutator_residual(mu, nu) for mu in range(4) for nu in range(4))
    return _result("canonical_commutator", bad == 0, bad, 0, t0)


# ------------------------------------------------------------------ spinor

SPINOR_GRID_P = (0.0, 0.1, -0.1, 1.0, -1.0, 10.0, -10.0)
SPINOR_GRID_M = (0.5, 1.0, 2.0)


def check_spinor_relations(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    worst = {}
    for p, m in product(SPINOR_GRID_P, SPINOR_GRID_M):
        for k, v in relation_defects(p, m).items():
            worst[k] = max(worst.get(k, 0.0), v)
    w = max(worst.values())
    return _result("spinor_relations", w < 1e-13, w, 1e-13, t0, **worst)


# -------------------------------------------------------------------- fock


def check_anticommutators(cfg: RunConfig, N: int | None = None) -> CheckResult:
    t0 = time.perf_counter()
    table = ModeTable(cfg.L, cfg.N if N is None else N, cfg.m)
    space = build_space(table, max_dim=cfg.max_dim)
    ann = [ladder(space, k, "annihilate") for k in range(table.n_slots)]
    cre = [a.conj().T.tocsr() for a in ann]
    ident = space.identity()
    worst = 0.0
    for i in range(table.n_slots):
        for j in range(i, table.n_slots):
            ac = ann[i] @ cre[j] + cre[j] @ ann[i]
            if i == j:
                ac = ac - ident
            aa = ann[i] @ ann[j] + ann[j] @ ann[i]
            worst = max(worst, _max_abs(ac), _max_abs(aa))
    return _result("anticommutators", worst < 1e-13, worst, 1e-13, t0, dim=space.dim)


# ------------------------------------------------------------------- field


def check_momentum_two_ways(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    space = build_space(ModeTable(cfg.L, cfg.N, cfg.m), cfg.sector, cfg.max_dim)
    worst = 0.0
    for mu in (0, 3):
        a, b = momentum_two_ways(space, mu)
        worst = max(worst, _max_abs(a - b))
    return _result("momentum_two_ways", worst < cfg.tol_exact, worst, cfg.tol_exact, t0)


# ----------------------------------------------------------------- noether

TEMPORAL_TIMES = (0.0, 1.3, -2.0)


def check_temporal_operator(cfg: RunConfig, times=TEMPORAL_TIMES) -> CheckResult:
    t0 = time.perf_counter()
    table = ModeTable(cfg.L, cfg.N, cfg.m)
    space = build_space(table, cfg.sector, cfg.max_dim)
    worst, vac_err = 0.0, 0.0
    vac = build_state(space, {"kind": "vacuum"})
    for t in sorted(set(times) | {cfg.t}):
        X0, _ = noether.position_numeric(space, t)
        sym = noether.position_temporal_symbolic(space, t)
        worst = max(worst, _max_abs(X0 - sym))
        v = complex(np.vdot(vac, X0 @ vac))
        vac_err = max(vac_err, abs(v - noether.zero_point_time(table, t)))
    count = vacuum_mode_count(table)
    ok = worst < cfg.tol_exact and vac_err < cfg.tol_exact and count == table.n_modes
    return _result(
        "temporal_operator", ok, worst, cfg.tol_exact, t0,
        vacuum_error=vac_err, vacuum_modes=count, expected_modes=table.n_modes,
    )


def vacuum_mode_count(table) -> int:
    """Integer identity coefficient of the symbolic temporal operator, in units of t."""
    from .symbolic import canonicalize, parse

    count = 0
    for mono in canonicalize(parse(noether.TEMPORAL_TEXT)):
        if not mono.ladders:
            if mono.variables() or mono.coef != -1:
                raise ValueError(f"unexpected identity term {mono}")
            # -tau(-) evaluates to +t once per (p, s) in the box
            count += (2 * table.N + 1) ** ("p" in mono.bound) * 2 ** ("s" in mono.bound)
    return count


GAUGE_EPS = (1e-2, 1e-3)


def _three_mode_solution(m: float):
    return noether.superposition([(0.4, 0.5, 1, 0.8), (-1.1, -0.5, -1, 0.5 + 0.3j), (2.0, 0.5, 1, 0.3j)], m=m, L=1.0)


def check_gauge(cfg: RunConfig) -> CheckResult:
    t0 = time.perf_counter()
    sol = _three_mode_solution(cfg.m)
    exact = max(
        noether.gauge_variation(sol, noether.LocalPhase(e, -0.6 * e), "exact_exponential") for e in (1.0, 0.1) + GAUGE_EPS
    )
    ratios = []
    for e in GAUGE_EPS:
        r1 = noether.gauge_variation(sol, noether.LocalPhase(e, -0.6 * e), "first_order")
        r2 = noether.gauge_variation(sol, noether.LocalPhase(e / 2, -0.3 * e), "first_order")
        ratios.append(r2 / r1)
    ok = exact < cfg.tol_exact and all(0.2 <= r <= 0.3 for r in ratios)
    return _result("gauge_invariance", ok, exact, cfg.tol_exact, t0, linearized_ratios=ratios)


def check_continuity(cfg: RunConfig, h: float = 1e-2) -> CheckResult:
    t0 = time.perf_counter()
    sol = _three_mode_solution(cfg.m)
    orders = noether.continuity_order(sol, 0.37, -0.21, h)
    ok = bool(np.all((orders >= 1.9) & (orders <= 2.1)))
    return _result("continuity_order", ok, orders.tolist(), "[1.9, 2.1]", t0)


# drift: one-particle Gaussian packet on the (N=32, sector <= 1) space
DRIFT = dict(N=32, sigma=0.3, velocity=0.6, samples=81)


def check_drift(cfg: RunConfig, operator: str = "numeric") -> CheckResult:
    t0 = time.perf_counter()
    table = ModeTable(cfg.L, DRIFT["N"], cfg.m)
    space = build_space(table, 1, cfg.max_dim)
    pbar = noether.pbar_for_velocity(table, DRIFT["velocity"], DRIFT["sigma"])
    amps = noether.gaussian_amplitudes(table, pbar, DRIFT["sigma"])
    state = build_state(space, {"kind": "wavepacket", "species": "c", "s": 0.5, "amplitudes": amps})
    times = np.linspace(0.0, cfg.L / 8, DRIFT["samples"])
    tr = noether.trajectory(space, state, times, operator)
    v = noether.mean_velocity(table, amps)
    slope = noether.fit_drift(tr.times, tr.x)
    rel = abs(slope - v) / abs(v)
    return _result("charge_center_drift", rel < 1e-3, rel, 1e-3, t0, slope=slope, mean_velocity=v, pbar=pbar)


# zitterbewegung: vacuum + pair superposition on its own sector-2 space
ZBW = dict(N=10, samples=801)


def check_zitterbewegung(cfg: RunConfig, p: float, m: float | None = None) -> CheckResult:
    t0 = time.perf_counter()
    m = cfg.m if m is None else m
    table = ModeTable(cfg.L, ZBW["N"], m)
    space = build_space(table, 2, cfg.max_dim)
    state = build_state(space, {"kind": "pair", "p": p, "s": 0.5, "sprime": 0.5, "alpha": 1.0, "beta": 1.0})
    times = np.linspace(0.0, cfg.L / 8, ZBW["samples"])
    tr = noether.trajectory(space, state, times, "expanded")
    expected = 2 * np.sqrt(p * p + m * m)
    omega = noether.fit_frequency(tr.times, tr.x, omega_max=4 * expected)
    rel = abs(omega - expected) / expected
    return _result(f"zitterbewegung_p{p:g}_m{m:g}", rel < 1e-3, rel, 1e-3, t0, omega=omega, expected=expected)


# spatial operator convergence: expanded form vs direct integration
CONVERGE = dict(pbar=0.3, sigma=0.03, t=2.0, N0=8)


def spatial_error(L: float, N: int, m: float) -> float:
    table = ModeTable(L, N, m)
    space = build_space(table, 1)
    state = build_state(space, {"kind": "wavepacket", "species": "c", "s": 0.5, "pbar": CONVERGE["pbar"], "sigma": CONVERGE["sigma"]})
    t = CONVERGE["t"]
    moments = one_body_moments(space, state)
    modes = ModeArrays(table)
    direct = noether.spatial_form(table, t, modes).expectation(space, state, moments)
    parts = noether.expanded_forms(table, t, modes)
    expanded = sum((f.expectation(space, state, moments) for f in parts.values()), 0j)
    return abs(direct - expanded)


def check_convergence(cfg: RunConfig, doublings: int = 2) -> CheckResult:
    if doublings < 1:
        raise ValueError("doublings must be at least 1")
    t0 = time.perf_counter()
    errs = [spatial_error(cfg.L * 2**k, CONVERGE["N0"] * 2**k, cfg.m) for k in range(doublings + 1)]
    ratios = [errs[k] / errs[k + 1] for k in range(doublings)]
    ok = all(r >= 2 for r in ratios)
    return _result("spatial_convergence", ok, min(ratios), 2.0, t0, errors=errs, ratios=ratios)


# ---------------------------------------------------------------- symbolic


def check_derivation(cfg: RunConfig, component: str) -> CheckResult:
    from .symbolic import check_against_target

    t0 = time.perf_counter()
    mu = 0 if component == "temporal" else 1
    ok, diff, d = check_against_target(mu)
    detail = {
        "expression": str(d.result),
        "diff": {k: [str(_pair(x)) for x in v] for k, v in diff.items()},
    }
    if mu == 0:
        vanish = all(len(d.parts[k]) == 0 for k in ("T2", "T3"))
        detail["pair_terms_vanish"] = vanish
        ok = ok and vanish
    n_diff = sum(len(v) for v in diff.values())
    return _result(f"derive_{component}", ok, n_diff, 0, t0, **detail)


def _pair(x):
    from .symbolic.expr import Expression

    if isinstance(x, tuple):
        return " vs ".join(str(Expression((m,))) for m in x)
    return str(Expression((x,)))


def check_rule_oracle(cfg: RunConfig, N: int = 0) -> CheckResult:
    """Every pipeline stage materializes to the same operator as its input."""
    from .symbolic.oracle import pipeline_residuals

    t0 = time.perf_counter()
    res = pipeline_residuals(N=N, L=cfg.L, m=cfg.m)
    worst = max(v for v in res.values() if v is not None)
    return _result("rewrite_oracle", worst < 1e-12, worst, 1e-12, t0, **{k: v for k, v in res.items()})


# ------------------------------------------------------------------ suites


def suite(name: str, cfg: RunConfig):
    """Checks scheduled for a suite, as zero-argument callables."""
    table = {
        "gamma": [check_clifford, check_spin_tensor, check_momentum_commutator],
        "spinor": [check_spinor_relations],
        "fock": [check_anticommutators],
        "field": [check_momentum_two_ways],
        "noether": [
            check_temporal_operator,
            check_gauge,
            check_continuity,
            check_drift,
            lambda c: check_zitterbewegung(c, 0.0),
            lambda c: check_zitterbewegung(c, 1.0),
        ],
        "symbolic": [
            lambda c: check_derivation(c, "temporal"),
            lambda c: check_derivation(c, "spatial"),
            check_rule_oracle,
        ],
    }
    if name == "all":
        return [lambda f=f: f(cfg) for s in SUITES for f in table[s]]
    if name not in table:
        raise ValueError(f"unknown suite {name!r}; expected one of {('all',) + SUITES}")
    return [lambda f=f: f(cfg) for f in table[name]]


__all__ = ["CheckResult", "SUITES", "suite"]
