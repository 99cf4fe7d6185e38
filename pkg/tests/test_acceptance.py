"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary so they show up without ``-s``.
"""

from math import pi

import pytest

from diracpos import checks
from diracpos.config import RunConfig

LINES: list[str] = []

CFG = RunConfig(m=1.0, L=20 * pi, N=1)


def record(number: int, title: str, ok: bool, measured, tolerance):
    line = f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {title}: measured={measured} tolerance={tolerance}"
    LINES.append(line)
    print(line)
    assert ok, line


def test_01_clifford_algebra():
    r = checks.check_clifford(CFG)
    record(1, "Clifford algebra", r.measured < 1e-15, r.measured, 1e-15)


def test_02_spin_tensor_commutator():
    r = checks.check_spin_tensor(CFG)
    record(2, "[H_mu, x_nu] = -2 S_mu_nu", r.measured < 1e-13, r.measured, 1e-13)


def test_03_spinor_relations():
    r = checks.check_spinor_relations(CFG)
    record(3, "spinor orthonormality and completeness", r.measured < 1e-13, r.measured, 1e-13)


def test_04_anticommutators():
    r = checks.check_anticommutators(CFG, N=1)
    assert r.detail["dim"] == 4096
    record(4, "ladder anticommutators, dim 4096", r.measured < 1e-13, r.measured, 1e-13)


def test_05_momentum_two_ways():
    r = checks.check_momentum_two_ways(CFG)
    record(5, "momentum from derivative vs Hamiltonian form", r.measured < 1e-12, r.measured, 1e-12)


def test_06_temporal_operator():
    r = checks.check_temporal_operator(CFG, times=(0.0, 1.3, -2.0))
    ok = r.measured < 1e-12 and r.detail["vacuum_modes"] == r.detail["expected_modes"] and r.detail["vacuum_error"] < 1e-12
    record(6, "direct X0 vs symbolic temporal operator; zero-point time t*M", ok, r.measured, 1e-12)


def test_07_gauge_invariance():
    r = checks.check_gauge(CFG)
    ratios = r.detail["linearized_ratios"]
    ok = r.measured < 1e-12 and all(0.2 <= x <= 0.3 for x in ratios)
    record(7, "local phase invariance (exact, linearized ratios)", ok, (r.measured, ratios), "1e-12, [0.2, 0.3]")


def test_08_continuity_order():
    r = checks.check_continuity(CFG)
    ok = all(abs(o - 2.0) <= 0.1 for o in r.measured)
    record(8, "generalized continuity FD order, nu in {0,3}", ok, r.measured, "2.0 +- 0.1")


def test_09_charge_center_drift():
    r = checks.check_drift(CFG)
    record(9, "drift slope vs <p/p0>, N=32", r.measured < 1e-3, r.measured, 1e-3)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_10_zitterbewegung(p):
    r = checks.check_zitterbewegung(CFG, p, m=1.0)
    record(10, f"pair-state frequency vs 2 p0 at p={p:g}, m=1", r.measured < 1e-3, r.measured, 1e-3)


def test_11_spatial_convergence():
    r = checks.check_convergence(CFG, doublings=2)
    ratios = r.detail["ratios"]
    record(11, "expanded vs direct X3 error ratio per doubling from N=8", all(x >= 2 for x in ratios), ratios, ">= 2")


def test_12_symbolic_derivation():
    temporal = checks.check_derivation(CFG, "temporal")
    spatial = checks.check_derivation(CFG, "spatial")
    oracle = checks.check_rule_oracle(CFG, N=0)
    ok = temporal.passed and spatial.passed and temporal.detail["pair_terms_vanish"] and oracle.measured < 1e-12
    measured = {"temporal_diff": temporal.measured, "spatial_diff": spatial.measured, "oracle": oracle.measured}
    record(12, "derivation diff empty; rewrite oracle on N=0", ok, measured, "0 / 1e-12")
