import numpy as np
import pytest

from diracpos.gamma import (
    ConfigurationError,
    build_gammas,
    commutator_Hx,
    hamiltonian_form,
    heisenberg_velocity,
    momentum_commutator_residual,
    spin_tensor,
)


@pytest.fixture(scope="module")
def g():
    return build_gammas()


def test_clifford(g):
    assert g.clifford_defect() < 1e-15


def test_unknown_representation():
    with pytest.raises(ConfigurationError):
        build_gammas("weyl-ish")


def test_lowered_index_uses_metric(g):
    for mu in range(4):
        assert np.array_equal(g.lower(mu), g.metric[mu, mu] * g.upper(mu))


@pytest.mark.parametrize("mu", range(4))
@pytest.mark.parametrize("nu", range(4))
def test_commutator_is_minus_two_spin_tensor(g, mu, nu):
    assert np.max(np.abs(commutator_Hx(g, mu, nu) + 2 * spin_tensor(g, mu, nu))) < 1e-13


def test_commutator_independent_of_mass(g):
    assert np.array_equal(commutator_Hx(g, 0, 3, m=1.0), commutator_Hx(g, 0, 3, m=7.5))


def test_diagonal_terms_vanish(g):
    for mu in range(4):
        assert not np.any(hamiltonian_form(g, mu, 1.0).a[mu])
        assert not np.any(spin_tensor(g, mu, mu))


def test_velocity_diagonal_is_metric(g):
    for mu in range(4):
        assert np.allclose(heisenberg_velocity(g, mu, mu), g.metric[mu, mu] * np.eye(4))


def test_hamiltonian_reproduces_dirac_equation_on_spinors(g):
    # H_0 u e^{-ipx} = p_0 u for an on-shell positive-frequency solution
    from diracpos.spinors import make_spinors

    ms = make_spinors(0.7, 0.5, 1.0)
    p_lower = np.array([ms.p0, 0, 0, -0.7])
    h = hamiltonian_form(g, 0, 1.0)
    out = g.metric[0, 0] * h.on_plane_wave(p_lower, +1) @ ms.u
    assert np.allclose(out, ms.p0 * ms.u)


def test_canonical_commutator_polynomial():
    assert sum(momentum_commutator_residual(mu, nu) for mu in range(4) for nu in range(4)) == 0
