import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanodho import (
    BathSpectrum,
    DiscreteBath,
    InstabilityError,
    build_quadratic_form,
    discrete_evolve_a,
    discretize_bath,
    evolve_a_full,
    evolve_a_rwa,
    lineshape,
    rwa_kernel,
    symplectic_diagonalize,
)
from fanodho.discrete_oracle import propagator_expm

from conftest import params


def one_mode_bath(w1=1.0, C=0.2):
    return DiscreteBath([w1], [1.0], [C], 0.0)


def test_no_bath_is_single_mode():
    form = build_quadratic_form(None, params())
    assert form.dim == 1 and form.A[0, 0] == 1.0 and form.B[0, 0] == 0.0
    modes = symplectic_diagonalize(form)
    assert modes.frequencies == pytest.approx([1.0])


def test_rwa_form_has_no_anomalous_block():
    bath = discretize_bath(BathSpectrum.ohmic_sharp(0.1, 8.0), params(cutoff=8.0), 32)
    form = build_quadratic_form(bath, params(cutoff=8.0), rwa=True)
    assert not np.any(form.B)


def test_two_mode_matrices_by_hand():
    C, w1, M, w0 = 0.3, 1.4, 2.0, 1.1
    p = params(mass=M, omega0=w0)
    bath = DiscreteBath([w1], [0.7], [C], 0.0)
    k = -0.5 * np.sqrt(C ** 2 / (M * w0 * 0.7 * w1))
    d = C ** 2 / (0.7 * w1 ** 2) / M / (2 * w0)
    form = build_quadratic_form(bath, p, counter_term=False)
    assert np.allclose(form.A, [[w0, k], [k, w1]], rtol=1e-15)
    assert np.allclose(form.B, [[0, k], [k, 0]], rtol=1e-15)
    form = build_quadratic_form(bath, p, counter_term=True)
    assert np.allclose(form.A, [[w0 + d, k], [k, w1]], rtol=1e-15)
    assert np.allclose(form.B, [[d, k], [k, 0]], rtol=1e-15)


def test_rwa_two_mode_resonant():
    form = build_quadratic_form(one_mode_bath(1.0, 0.2), params(), rwa=True, counter_term=False)
    k = abs(form.A[0, 1])
    assert symplectic_diagonalize(form).frequencies == pytest.approx([1 - k, 1 + k], rel=1e-14)


def test_rwa_two_mode_detuned():
    form = build_quadratic_form(one_mode_bath(1.6, 0.5), params(), rwa=True, counter_term=False)
    k = abs(form.A[0, 1])
    r = np.sqrt(0.3 ** 2 + k * k)
    assert symplectic_diagonalize(form).frequencies == pytest.approx([1.3 - r, 1.3 + r], rel=1e-14)


def test_zero_coupling_is_identity():
    bath = DiscreteBath([0.5, 2.0, 3.0], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0], 0.0)
    modes = symplectic_diagonalize(build_quadratic_form(bath, params()))
    assert modes.frequencies == pytest.approx([0.5, 1.0, 2.0, 3.0])
    T = np.abs(modes.T)
    assert np.allclose(T, np.round(T), atol=1e-14)
    assert np.allclose(T.sum(axis=0), 1) and np.allclose(T.sum(axis=1), 1)


def test_discretized_zero_coupling():
    bath = discretize_bath(BathSpectrum.ohmic_sharp(0.0, 8.0), params(cutoff=8.0), 32)
    assert np.all(bath.couplings == 0)


def test_unstable_bare_form_rejected():
    bath = one_mode_bath(0.3, 1.0)     # C^2/(m w^2) = 11 > w0^2
    with pytest.raises(InstabilityError, match="omega0\\^2 > dw2"):
        symplectic_diagonalize(build_quadratic_form(bath, params(), counter_term=False))
    # the counter-term restores stability
    symplectic_diagonalize(build_quadratic_form(bath, params(), counter_term=True))


@pytest.fixture(scope="module")
def sharp64():
    p = params(cutoff=8.0)
    bath = discretize_bath(BathSpectrum.ohmic_sharp(0.1, 8.0), p, 64, omega_max=8.0)
    return p, bath


def test_paraunitarity_and_spectrum(sharp64):
    p, bath = sharp64
    for rwa in (False, True):
        modes = symplectic_diagonalize(build_quadratic_form(bath, p, rwa=rwa, counter_term=not rwa))
        assert modes.frequencies.size == bath.N + 1
        assert np.all(modes.frequencies > 0)
        assert modes.paraunitarity_residual() <= 1e-12
    # weak coupling: all but one eigenfrequency sit within one spacing of a grid point
    dist = np.min(np.abs(modes.frequencies[:, None] - bath.omegas[None, :]), axis=1)
    assert np.sum(dist > bath.spacing) <= 1


def test_identity_at_time_zero(sharp64):
    p, bath = sharp64
    e = discrete_evolve_a(symplectic_diagonalize(build_quadratic_form(bath, p)), 0.0)
    assert abs(e.c_a - 1) < 1e-12 and abs(e.c_adag) < 1e-12
    assert np.max(np.abs(e.c_b)) < 1e-12 and np.max(np.abs(e.c_bdag)) < 1e-12


def test_propagator_matches_expm(sharp64):
    p, bath = sharp64
    for rwa in (False, True):
        form = build_quadratic_form(bath, p, rwa=rwa)
        modes = symplectic_diagonalize(form)
        for t in (0.7, 13.0):
            assert np.max(np.abs(modes.propagator(t) - propagator_expm(form, t))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(g=st.floats(0.01, 0.6), t=st.floats(0.0, 500.0), N=st.integers(33, 80),
       rwa=st.booleans())
def test_sum_rule_exact(g, t, N, rwa):
    p = params(gamma=g, cutoff=8.0)
    bath = discretize_bath(BathSpectrum.ohmic_sharp(g, 8.0), p, N, omega_max=8.0)
    modes = symplectic_diagonalize(build_quadratic_form(bath, p, rwa=rwa))
    assert discrete_evolve_a(modes, t).sum_rule == pytest.approx(1.0, abs=1e-12)


def _max_dev(modes, kernel, times, rwa=False):
    evolve = evolve_a_rwa if rwa else evolve_a_full
    return max(abs(abs(discrete_evolve_a(modes, t).c_a) - abs(evolve(kernel, t).c_a)) for t in times)


def test_full_model_against_continuum(sharp64):
    p, bath = sharp64
    k = lineshape(BathSpectrum.ohmic_sharp(0.1, 8.0), p)
    modes = symplectic_diagonalize(build_quadratic_form(bath, p))
    t_end = min(5 / 0.1, np.pi / bath.spacing)
    inside = _max_dev(modes, k, np.linspace(0, t_end, 26))
    assert inside <= 0.02
    # past the recurrence time the finite bath feeds the excitation back
    beyond = _max_dev(modes, k, bath.recurrence_time + np.linspace(-3, 3, 13))
    assert beyond > 10 * inside and beyond > 0.1


def test_drude_full_model_against_continuum():
    p = params(cutoff=1.6)
    bath = discretize_bath(BathSpectrum.drude(0.1, 1.6), p, 64, omega_max=8.0)
    k = lineshape(BathSpectrum.drude(0.1, 1.6), p)
    modes = symplectic_diagonalize(build_quadratic_form(bath, p))
    assert _max_dev(modes, k, np.linspace(0, np.pi / bath.spacing, 21)) <= 0.02


def test_rwa_model_against_continuum(sharp64):
    p, bath = sharp64
    k = rwa_kernel(BathSpectrum.ohmic_sharp(0.1, 8.0), p)
    modes = symplectic_diagonalize(build_quadratic_form(bath, p, rwa=True, counter_term=False))
    assert _max_dev(modes, k, np.linspace(0, np.pi / bath.spacing, 21), rwa=True) <= 0.02
