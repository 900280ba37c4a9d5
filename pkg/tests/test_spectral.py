import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanodho import BathSpectrum, DomainError, ModelParams, coupling_sq, spectral_density

from conftest import params


def test_ohmic_sharp_inside_cutoff():
    s = BathSpectrum.ohmic_sharp(0.1, 50.0)
    assert spectral_density(s, 1.0, 0.5) == pytest.approx(0.1, rel=1e-15)


def test_ohmic_sharp_above_cutoff_is_zero():
    s = BathSpectrum.ohmic_sharp(0.1, 50.0)
    assert spectral_density(s, 1.0, 60.0) == 0.0


@pytest.mark.parametrize("s", [
    BathSpectrum.ohmic_sharp(0.1, 50.0),
    BathSpectrum.drude(0.1, 50.0),
    BathSpectrum.drude(0.1, limit=True),
    BathSpectrum.tabulated([0.0, 1.0, 2.0], [0.0, 0.2, 0.1]),
])
def test_zero_frequency_vanishes(s):
    assert spectral_density(s, 1.0, 0.0) == 0.0
    assert coupling_sq(s, params(), 0.0) == 0.0


def test_negative_frequency_rejected():
    with pytest.raises(DomainError):
        spectral_density(BathSpectrum.drude(0.1, 50.0), 1.0, -1.0)


def test_drude_limit_coupling_at_resonance():
    s = BathSpectrum.drude(0.1, limit=True)
    v2 = coupling_sq(s, params(cutoff=np.inf), 1.0)
    assert v2 == pytest.approx(0.0318310, abs=5e-8)
    assert np.pi * v2 == pytest.approx(0.1, rel=1e-14)


def test_drude_coupling_closed_form():
    p = params()
    s = BathSpectrum.drude(0.1, 50.0)
    w = np.linspace(0, 200, 101)
    ref = 0.1 * w / (np.pi * (1 + (w / 50.0) ** 2))
    assert np.allclose(coupling_sq(s, p, w), ref, rtol=1e-14, atol=0)


def test_tabulated_drude_matches_analytic():
    p = params()
    s = BathSpectrum.drude(0.1, 50.0)
    w = np.linspace(0.0, 250.0, 10_000)
    tab = BathSpectrum.tabulated(w, spectral_density(s, 1.0, w))
    probe = np.linspace(0.0, 249.0, 3001) + 0.0123
    err = np.abs(coupling_sq(tab, p, probe) - coupling_sq(s, p, probe))
    assert err.max() <= 1e-6


def test_tabulated_zero_outside_table():
    tab = BathSpectrum.tabulated([0.5, 1.0, 2.0], [0.1, 0.2, 0.1])
    assert spectral_density(tab, 1.0, 0.25) == 0.0
    assert spectral_density(tab, 1.0, 3.0) == 0.0
    assert spectral_density(tab, 1.0, 1.5) == pytest.approx(0.15)


def test_table_csv_round_trip(tmp_path):
    path = tmp_path / "j.csv"
    path.write_text("omega,J\n0,0\n1,0.2\n2,0.3\n")
    tab = BathSpectrum.from_csv(path)
    assert spectral_density(tab, 1.0, 1.5) == pytest.approx(0.25)
    path.write_text("0,0\n1,0.2\n")
    assert spectral_density(BathSpectrum.from_csv(path), 1.0, 0.5) == pytest.approx(0.1)


@pytest.mark.parametrize("bad", [
    dict(omega=[0.0, 2.0, 1.0], J=[0, 1, 1]),
    dict(omega=[0.0, 1.0], J=[0, -1]),
    dict(omega=[-1.0, 1.0], J=[0, 1]),
])
def test_invalid_tables_rejected(bad):
    with pytest.raises(DomainError):
        BathSpectrum.tabulated(bad["omega"], bad["J"])


@pytest.mark.parametrize("field,value", [("mass", 0.0), ("omega0", -1.0), ("gamma", 0.0), ("kT", -1.0)])
def test_model_params_validation(field, value):
    kw = dict(mass=1.0, omega0=1.0, gamma=0.1, cutoff=50.0, kT=0.0)
    kw[field] = value
    with pytest.raises(DomainError):
        ModelParams(**kw)


def test_small_cutoff_only_warns():
    with pytest.warns(UserWarning):
        ModelParams(cutoff=2.0)


@settings(max_examples=60, deadline=None)
@given(gamma=st.floats(1e-4, 10.0), cutoff=st.floats(1.0, 1e4), w=st.floats(0.0, 1e5),
       M=st.floats(0.1, 10.0), w0=st.floats(0.1, 10.0))
def test_coupling_consistent_with_density(gamma, cutoff, w, M, w0):
    p = ModelParams(mass=M, omega0=w0, gamma=gamma, cutoff=np.inf)
    for s in (BathSpectrum.drude(gamma, cutoff), BathSpectrum.ohmic_sharp(gamma, cutoff)):
        v2 = coupling_sq(s, p, w)
        J = spectral_density(s, M, w)
        assert v2 >= 0
        assert v2 * 2 * np.pi * M * w0 == pytest.approx(J, rel=1e-14, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(gamma=st.floats(1e-3, 5.0), cutoff=st.floats(10.0, 1e4), w=st.floats(0.0, 1e3))
def test_drude_approaches_ohmic(gamma, cutoff, w):
    d = spectral_density(BathSpectrum.drude(gamma, cutoff), 1.0, w)
    o = spectral_density(BathSpectrum.drude(gamma, limit=True), 1.0, w)
    assert abs(d - o) <= 2 * gamma * w * (w / cutoff) ** 2 * (1 + 1e-9) + 4e-16 * o
