import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from fanodho import (
    BathSpectrum,
    DomainError,
    alpha_sq_rwa,
    coherent_decay,
    coupling_sq,
    evolve_a_rwa,
    level_shift_F,
    rwa_kernel,
)

from conftest import params


def limit_kernel(g):
    return rwa_kernel(BathSpectrum.drude(g, limit=True), params(gamma=g, cutoff=np.inf), shift="H_R")


def test_peak_value_at_resonance_root():
    s = BathSpectrum.drude(0.01, 50.0)
    p = params(gamma=0.01)
    root = optimize.brentq(lambda w: w - 1 - float(level_shift_F(s, p, w)), 0.3, 1.5, xtol=1e-14)
    v2 = coupling_sq(s, p, root)
    assert alpha_sq_rwa(s, p, root) == pytest.approx(1 / (np.pi ** 2 * v2), rel=1e-8)


def test_limit_peak_is_one_over_pi_gamma():
    k = limit_kernel(0.01)
    assert float(k.weight(1.0)) == pytest.approx(1 / (np.pi * 0.01), rel=1e-12)


def test_alpha_sq_requires_positive_frequency():
    with pytest.raises(DomainError):
        alpha_sq_rwa(BathSpectrum.drude(0.1, 50.0), params(), 0.0)


def test_weak_coupling_normalization():
    k = rwa_kernel(BathSpectrum.drude(1e-4, 50.0), params(gamma=1e-4))
    assert k.normalization() == pytest.approx(1.0, abs=1e-4)
    assert k.bound_states == ()


def test_weak_coupling_lorentzian():
    g = 1e-3
    s = BathSpectrum.drude(g, 10.0)
    p = params(gamma=g, cutoff=10.0)
    k = rwa_kernel(s, p)
    F0 = float(level_shift_F(s, p, 1.0))
    rate = np.pi * coupling_sq(s, p, 1.0)
    w = np.linspace(1 + F0 - 10 * g, 1 + F0 + 10 * g, 2001)
    lor = (rate / np.pi) / ((w - 1 - F0) ** 2 + rate * rate)
    a = k.weight(w)
    assert np.max(np.abs(a - lor)) <= 0.01 * a.max()


def test_bound_state_below_band():
    s = BathSpectrum.drude(0.1, 50.0)
    p = params()
    k = rwa_kernel(s, p)
    assert len(k.bound_states) == 1
    wb, weight = k.bound_states[0]

    # independent oracle: ordinary integrals below the band
    def F(w):
        return integrate.quad(lambda x: coupling_sq(s, p, x) / (w - x), 0, np.inf, limit=400)[0]

    def dF(w):
        return -integrate.quad(lambda x: coupling_sq(s, p, x) / (w - x) ** 2, 0, np.inf, limit=400)[0]

    root = optimize.brentq(lambda w: w - 1 - F(w), -5.0, -0.01, xtol=1e-13)
    assert wb == pytest.approx(root, abs=1e-8)
    assert weight == pytest.approx(1 / (1 - dF(root)), rel=1e-6)


@pytest.mark.parametrize("case", [
    ("drude", 0.1, 50.0), ("drude", 0.05, 5.0), ("sharp", 0.3, 8.0), ("sharp", 0.02, 20.0),
])
def test_completeness(case):
    kind, g, c = case
    s = BathSpectrum.drude(g, c) if kind == "drude" else BathSpectrum.ohmic_sharp(g, c)
    k = rwa_kernel(s, params(gamma=g, cutoff=c))
    assert np.all(k.alpha_sq >= 0)
    assert k.normalization() == pytest.approx(1.0, abs=1e-4)


@settings(max_examples=12, deadline=None)
@given(g=st.floats(1e-3, 0.3), c=st.floats(10.0, 200.0))
def test_completeness_property(g, c):
    k = rwa_kernel(BathSpectrum.drude(g, c), params(gamma=g, cutoff=c))
    assert k.normalization() == pytest.approx(1.0, abs=1e-4)


def test_limit_mode_has_no_finite_normalization():
    with pytest.raises(DomainError):
        limit_kernel(0.1).normalization()


def test_identity_at_time_zero():
    k = rwa_kernel(BathSpectrum.drude(0.05, 5.0), params(gamma=0.05, cutoff=5.0))
    e = evolve_a_rwa(k, 0.0, omega_bath=np.linspace(0.1, 4, 7))
    assert e.c_a == 1
    assert np.all(e.c_b == 0)


@pytest.mark.parametrize("gt", [0.5, 1.0, 5.0])
def test_sum_rule(gt):
    g = 0.05
    k = rwa_kernel(BathSpectrum.drude(g, 5.0), params(gamma=g, cutoff=5.0))
    assert evolve_a_rwa(k, gt / g, sum_rule=True).sum_rule == pytest.approx(1.0, abs=1e-4)


def test_sum_rule_with_bound_state():
    k = rwa_kernel(BathSpectrum.ohmic_sharp(0.1, 4.0), params(gamma=0.1, cutoff=4.0))
    assert evolve_a_rwa(k, 10.0, sum_rule=True).sum_rule == pytest.approx(1.0, abs=1e-4)


def test_exponential_decay_in_limit():
    g = 1e-3
    k = limit_kernel(g)
    t = np.linspace(0, 5 / g, 26)
    ca = np.array([evolve_a_rwa(k, x).c_a for x in t])
    assert np.max(np.abs(np.abs(ca) / np.exp(-g * t) - 1)) <= 1e-3
    assert np.all(np.diff(np.abs(ca)) <= 1e-12)


def test_coherent_state():
    g = 1e-3
    k = limit_kernel(g)
    a0 = 0.8 - 0.3j
    assert coherent_decay(k, a0, 0.0).value == a0
    lor = coherent_decay(k, a0, 1 / g, approximation="lorentzian")
    assert abs(lor.value) == pytest.approx(abs(a0) * np.exp(-1), rel=1e-12)
    for t in np.linspace(0, 5 / g, 11):
        ex = coherent_decay(k, a0, t).value
        ap = coherent_decay(k, a0, t, approximation="lorentzian").value
        assert abs(abs(ex) / abs(ap) - 1) <= 1e-3
        assert abs(ex) <= abs(a0) * (1 + 1e-12)


def test_reservoir_amplitudes():
    k = rwa_kernel(BathSpectrum.drude(0.05, 5.0), params(gamma=0.05, cutoff=5.0))
    W = np.linspace(0.5, 1.5, 11)
    co = evolve_a_rwa(k, 20.0, omega_bath=W)
    amp = coherent_decay(k, 2.0, 20.0, omega_bath=W)
    assert np.allclose(amp.reservoir_amplitudes, 2.0 * co.c_b)
    # the emitted wave packet is centred near the resonance
    assert np.argmax(np.abs(co.c_b)) in range(3, 8)
