from math import pi

import numpy as np
import pytest

from diracpos import noether
from diracpos.fock import ModeTable, build_space, build_state


@pytest.fixture(scope="module")
def sol():
    return noether.superposition([(0.4, 0.5, 1, 0.8), (-1.1, -0.5, -1, 0.5 + 0.3j), (2.0, 0.5, 1, 0.3j)])


def test_lagrangian_vanishes_on_shell(sol):
    assert abs(noether.lagrangian_density(sol, 0.3, -0.7)) < 1e-13


def test_lagrangian_nonzero_off_shell():
    off = noether.ClassicalSolution((noether.PlaneWaveTerm(0.4, 0.5, 1, 1.0, p0=2.0),))
    assert abs(noether.lagrangian_density(off, 0.0, 0.0)) > 1e-3


def test_exact_gauge_invariance(sol):
    for eps in (1.0, 1e-2, 1e-3):
        assert noether.gauge_variation(sol, noether.LocalPhase(eps, 0.4 * eps)) < 1e-12


def test_linearized_gauge_residual_is_quadratic(sol):
    for eps in (1e-2, 1e-3):
        r1 = noether.gauge_variation(sol, noether.LocalPhase(eps, -0.6 * eps), "first_order")
        r2 = noether.gauge_variation(sol, noether.LocalPhase(eps / 2, -0.3 * eps), "first_order")
        assert 0.2 <= r2 / r1 <= 0.3


def test_unknown_gauge_mode(sol):
    with pytest.raises(ValueError):
        noether.gauge_variation(sol, noether.LocalPhase(0.1, 0.1), "second_order")


def test_continuity_residual_is_second_order(sol):
    orders = noether.continuity_order(sol, 0.37, -0.21, 1e-2)
    assert np.all(np.abs(orders - 2.0) < 0.1)


def test_continuity_source_is_current(sol):
    # d_mu (j^mu x^nu) = x^nu d_mu j^mu + j^nu, and d_mu j^mu = 0 on shell
    assert np.max(np.abs(noether.continuity_residual(sol, 0.1, 0.2, 1e-4))) < 1e-6


def test_continuity_rejects_nonpositive_step(sol):
    with pytest.raises(ValueError):
        noether.continuity_residual(sol, 0.0, 0.0, 0.0)


def test_formal_time_symbol():
    tau = noether.FormalTimeSymbol(1.5)
    assert tau.eval(+1) == 1.5 and tau.eval(-1) == -1.5


@pytest.mark.parametrize("t", [0.0, 1.3, -2.0])
def test_temporal_operator_agrees_with_symbolic_form(space1, t):
    X0, _ = noether.position_numeric(space1, t)
    assert abs(X0 - noether.position_temporal_symbolic(space1, t)).max() < 1e-12


def test_zero_point_time(space1):
    vac = build_state(space1, {"kind": "vacuum"})
    X0, X3 = noether.position_numeric(space1, 2.5)
    assert abs(np.vdot(vac, X0 @ vac) - 2.5 * 6) < 1e-12
    assert noether.zero_point_time(space1, 2.5) == 15.0
    assert abs(np.vdot(vac, X3 @ vac)) < 1e-13


def test_expanded_groups_are_hermitian(space1):
    for op in noether.position_expanded(space1, 0.9):
        assert abs(op - op.conj().T).max() < 1e-12


def test_expanded_form_converges_to_direct():
    errs = []
    for k in range(3):
        errs.append(_spatial_gap(20 * pi * 2**k, 8 * 2**k))
    assert errs[0] / errs[1] >= 2 and errs[1] / errs[2] >= 2


def _spatial_gap(L, N):
    from diracpos.checks import spatial_error

    return spatial_error(L, N, 1.0)


def test_drift_fit_recovers_velocity():
    table = ModeTable(20 * pi, 32, 1.0)
    space = build_space(table, 1)
    pbar = noether.pbar_for_velocity(table, 0.6, 0.3)
    amps = noether.gaussian_amplitudes(table, pbar, 0.3)
    state = build_state(space, {"kind": "wavepacket", "amplitudes": amps, "s": -0.5})
    tr = noether.trajectory(space, state, np.linspace(0, table.L / 8, 41))
    assert abs(noether.fit_drift(tr.times, tr.x) - 0.6) < 1e-3 * 0.6
    assert max(s.im_residual for s in tr.samples) < 1e-12


def test_trajectory_flags_wrap_window():
    table = ModeTable(4.0, 2, 1.0)
    space = build_space(table, 1)
    state = build_state(space, {"kind": "vacuum"})
    with pytest.warns(RuntimeWarning):
        tr = noether.trajectory(space, state, [0.0, 2.0])
    assert not tr.all_in_window


def test_fit_frequency_on_synthetic_signal():
    t = np.linspace(0, 8, 600)
    x = 0.3 + 0.1 * t + 0.05 * np.cos(2.7 * t + 0.4)
    assert abs(noether.fit_frequency(t, x) - 2.7) < 1e-8


def test_box_exact_operator_has_no_pair_oscillation():
    """The direct box operator has a zero vacuum-pair element at opposite momenta."""
    table = ModeTable(20 * pi, 4, 1.0)
    space = build_space(table, 2)
    state = build_state(space, {"kind": "pair", "p": 0.1, "s": 0.5, "sprime": 0.5, "alpha": 1, "beta": 1})
    tr = noether.trajectory(space, state, np.linspace(0, 5, 30))
    assert np.ptp(tr.x) < 1e-12
