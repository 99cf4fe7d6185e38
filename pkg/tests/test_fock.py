from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracpos.fock import (
    ModeTable,
    QuadraticForm,
    ResourceError,
    anticommutator,
    build_space,
    build_state,
    expectation,
    ladder,
    one_body_moments,
    sector_dimension,
)
from diracpos.spinors import DomainError


def test_dimension_n1(space1):
    assert space1.dim == 4096
    assert space1.table.n_slots == 12


def test_anticommutators_n1(space1):
    n = space1.table.n_slots
    ann = [ladder(space1, k) for k in range(n)]
    ident = space1.identity()
    for i in range(n):
        for j in range(n):
            ac = anticommutator(ann[i], ann[j].conj().T)
            target = ident if i == j else 0 * ident
            assert abs(ac - target).max() < 1e-13
            assert abs(anticommutator(ann[i], ann[j])).max() < 1e-13


def test_slot_order():
    t = ModeTable(1.0, 1, 1.0)
    assert t.slots[0] == ("c", -1, -0.5)
    assert t.slots[1] == ("c", -1, 0.5)
    assert t.slots[6] == ("d", -1, -0.5)
    assert t.slot("d", 1, 0.5) == 11


def test_resource_guard():
    with pytest.raises(ResourceError) as err:
        build_space(ModeTable(1.0, 3, 1.0), max_dim=10_000)
    assert err.value.dim == 2**28


def test_sector_dimension():
    assert sector_dimension(12, None) == 4096
    assert sector_dimension(12, 1) == 13
    assert sector_dimension(12, 2) == 1 + 12 + 66
    assert build_space(ModeTable(1.0, 1, 1.0), 2).dim == 79


def test_invalid_table():
    with pytest.raises(DomainError):
        ModeTable(-1.0, 1, 1.0)
    with pytest.raises(DomainError):
        ModeTable(1.0, 1, 1.0).mode_of_momentum(0.1)


def test_number_operator_counts(space1):
    N = space1.number_operator()
    diag = N.diagonal().real
    assert diag[0] == 0 and diag.max() == 12


def _random_form(rng, n):
    f = QuadraticForm.zeros(n)
    f.const = complex(rng.normal())
    f.A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    f.B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    f.C = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return f


def test_quadratic_form_matches_ladder_products():
    space = build_space(ModeTable(1.0, 0, 1.0))
    n = space.table.n_slots
    rng = np.random.default_rng(1)
    f = _random_form(rng, n)
    ann = [ladder(space, k) for k in range(n)]
    cre = [a.conj().T for a in ann]
    ref = f.const * space.identity()
    for i in range(n):
        for j in range(n):
            ref = ref + f.A[i, j] * cre[i] @ ann[j] + f.B[i, j] * cre[i] @ cre[j] + f.C[i, j] * ann[i] @ ann[j]
    assert abs(f.to_sparse(space) - ref).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_expectation_from_moments_matches_sparse(seed):
    space = build_space(ModeTable(1.0, 0, 1.0))
    rng = np.random.default_rng(seed)
    f = _random_form(rng, space.table.n_slots)
    psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    psi /= np.linalg.norm(psi)
    assert abs(f.expectation(space, psi) - expectation(f.to_sparse(space), psi)) < 1e-10


def test_moments_on_vacuum_vanish(space1):
    vac = build_state(space1, {"kind": "vacuum"})
    assert all(not np.any(m) for m in one_body_moments(space1, vac))


def test_wavepacket_state_is_one_particle():
    table = ModeTable(20 * pi, 8, 1.0)
    space = build_space(table, 1)
    psi = build_state(space, {"kind": "wavepacket", "species": "c", "s": 0.5, "pbar": 0.3, "sigma": 0.1})
    assert np.isclose(np.linalg.norm(psi), 1.0)
    assert np.isclose(expectation(space.number_operator("c"), psi).real, 1.0)


def test_pair_state_needs_two_particle_sector():
    table = ModeTable(20 * pi, 2, 1.0)
    with pytest.raises(DomainError):
        build_state(build_space(table, 1), {"kind": "pair", "p": 0.0, "s": 0.5, "sprime": 0.5, "alpha": 1, "beta": 1})
    psi = build_state(build_space(table, 2), {"kind": "pair", "p": 0.1, "s": 0.5, "sprime": -0.5, "alpha": 1, "beta": 1})
    assert np.isclose(np.linalg.norm(psi), 1.0)


def test_bad_states():
    space = build_space(ModeTable(1.0, 0, 1.0))
    with pytest.raises(DomainError):
        build_state(space, {"kind": "wavepacket", "amplitudes": [0.0]})
    with pytest.raises(DomainError):
        build_state(space, {"kind": "squeezed"})
