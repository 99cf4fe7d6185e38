import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracpos.spinors import DomainError, dispersion, finite_difference_dp, make_spinors, relation_defects


@pytest.mark.parametrize("p", [0.0, 0.1, -0.1, 1.0, -1.0, 10.0, -10.0])
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
def test_relations_on_grid(p, m):
    assert max(relation_defects(p, m).values()) < 1e-13


@settings(max_examples=60, deadline=None)
@given(st.floats(-50, 50), st.floats(0.05, 20))
def test_relations_property(p, m):
    assert max(relation_defects(p, m).values()) < 1e-12


def test_rest_frame():
    ms = make_spinors(0.0, 0.5, 1.0)
    assert np.allclose(ms.u, [1, 0, 0, 0])
    assert np.allclose(ms.v, [0, 0, 1, 0])
    assert ms.p0 == 1.0


@pytest.mark.parametrize("s", [0.5, -0.5])
@pytest.mark.parametrize("p", [-3.0, -0.2, 0.0, 0.9])
def test_analytic_derivative_matches_finite_difference(p, s):
    ms = make_spinors(p, s, 1.3)
    du, dv = finite_difference_dp(p, s, 1.3, 1e-5)
    assert np.max(np.abs(ms.du_dp - du)) < 1e-9
    assert np.max(np.abs(ms.dv_dp - dv)) < 1e-9


def test_spinors_are_cached_and_frozen():
    a = make_spinors(0.3, 0.5, 1.0)
    assert a is make_spinors(0.3, 0.5, 1.0)
    with pytest.raises(ValueError):
        a.u[0] = 2.0


@pytest.mark.parametrize("m", [0.0, -1.0])
def test_nonpositive_mass_rejected(m):
    with pytest.raises(DomainError):
        make_spinors(0.1, 0.5, m)


def test_dispersion():
    assert dispersion(3.0, 4.0) == 5.0
