import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from fanodho import (
    BathSpectrum,
    DiscreteBath,
    DomainError,
    EnsembleConfig,
    InitialState,
    InstabilityError,
    classical_trajectory,
    discretize_bath,
    fluctuating_force_stats,
    integrate_eom,
    mean_position,
    memory_kernel_check,
    run_ensemble,
    sample_initial_conditions,
    spectral_density,
)
from fanodho.classical_bath import PhaseSpaceState, sample_generator

from conftest import params

SEED = 12345


@pytest.fixture(scope="module")
def sharp400():
    p = params(gamma=0.5, cutoff=100.0, kT=0.1)
    return p, discretize_bath(BathSpectrum.ohmic_sharp(0.5, 100.0), p, 400)


@pytest.fixture(scope="module")
def ensembles(sharp400):
    p, bath = sharp400
    out = {}
    for variant in ("shifted", "bare"):
        cfg = EnsembleConfig(n_samples=10_000, kT=0.1, seed=SEED, dt=9e-4, t_max=10.0,
                             ic_variant=variant)
        out[variant] = run_ensemble(bath, p, cfg)
    return out


# ---------------------------------------------------------------- discretization

def test_grid_and_couplings(sharp400):
    p, bath = sharp400
    dw = 100.0 / 400
    assert bath.spacing == pytest.approx(dw)
    assert np.allclose(bath.omegas, (np.arange(1, 401) - 0.5) * dw)
    J = spectral_density(BathSpectrum.ohmic_sharp(0.5, 100.0), 1.0, bath.omegas)
    assert np.allclose(bath.couplings ** 2, 2 / np.pi * bath.omegas * J * dw, rtol=1e-14)


def test_reconstructed_density_at_resonance(sharp400):
    _, bath = sharp400
    assert bath.reconstructed_J(1.0) == pytest.approx(1.0, rel=0.02)


def test_zero_coupling_bath():
    bath = discretize_bath(BathSpectrum.drude(0.0, 20.0), params(cutoff=20.0), 400)
    assert np.all(bath.couplings == 0)


def test_discrete_frequency_shift():
    p = params(cutoff=10.0)
    s = BathSpectrum.drude(0.1, 10.0)
    wide = discretize_bath(s, p, 2000, omega_max=400.0)
    assert wide.delta_sq() == pytest.approx(2 * 0.1 * 10.0, rel=0.02)
    default = discretize_bath(s, p, 2000)
    assert default.delta_sq() == pytest.approx(2 * 0.1 * 10.0 * 2 / np.pi * np.arctan(5.0), rel=1e-3)


@pytest.mark.parametrize("N,kw", [(1, {}), (40, {})])
def test_discretization_errors(N, kw):
    with pytest.raises(DomainError):
        discretize_bath(BathSpectrum.ohmic_sharp(0.5, 100.0), params(cutoff=100.0), N, **kw)


def test_limit_spectrum_needs_explicit_top():
    with pytest.raises(DomainError):
        discretize_bath(BathSpectrum.drude(0.1, limit=True), params(cutoff=np.inf), 400)


# ---------------------------------------------------------------- sampling

def test_cold_shifted_sample_is_exact(sharp400):
    p, bath = sharp400
    cfg = EnsembleConfig(kT=0.0)
    st = sample_initial_conditions(bath, cfg, 0.7, 0.2, 3)
    assert np.array_equal(st.qj, bath.couplings * 0.7 / (bath.masses * bath.omegas ** 2))
    assert np.all(st.pj == 0) and st.q == 0.7 and st.p == 0.2


def test_sample_statistics(sharp400):
    _, bath = sharp400
    cfg = EnsembleConfig(kT=0.1, seed=SEED)
    q0 = 1.0
    draws = np.array([sample_initial_conditions(bath, cfg, q0, 0.0, i).qj for i in range(10_000)])
    shift = bath.couplings * q0 / (bath.masses * bath.omegas ** 2)
    tilde = draws - shift
    se = tilde.std(axis=0, ddof=1) / np.sqrt(len(draws))
    # one mode at a time: a low, a middle and a high mode
    for j in (0, 3, 200, 399):
        assert abs(tilde[:, j].mean()) <= 3 * se[j]
        var = 0.1 / (bath.masses[j] * bath.omegas[j] ** 2)
        assert tilde[:, j].var(ddof=1) == pytest.approx(var, rel=0.05)


def test_streams_are_per_sample(sharp400):
    _, bath = sharp400
    cfg = EnsembleConfig(kT=0.1, seed=7)
    a = sample_initial_conditions(bath, cfg, 1.0, 0.0, 5)
    b = sample_initial_conditions(bath, cfg, 1.0, 0.0, sample_generator(7, 5))
    assert np.array_equal(a.qj, b.qj) and np.array_equal(a.pj, b.pj)
    c = sample_initial_conditions(bath, cfg, 1.0, 0.0, 6)
    assert not np.array_equal(a.qj, c.qj)


def test_config_validation(sharp400):
    _, bath = sharp400
    with pytest.raises(DomainError):
        EnsembleConfig(n_samples=0)
    with pytest.raises(DomainError):
        EnsembleConfig(kT=-1.0)
    with pytest.raises(DomainError):
        EnsembleConfig(dt=0.01).check(bath)


# ---------------------------------------------------------------- integration

def test_uncoupled_oscillator():
    bath = DiscreteBath([2.0, 3.0], [1.0, 1.0], [0.0, 0.0], 1.0)
    p = params(cutoff=np.inf)
    cfg = EnsembleConfig(dt=2e-4, t_max=20 * np.pi, n_out=501)
    tr = integrate_eom(bath, p, PhaseSpaceState(1.0, 0.0, np.zeros(2), np.zeros(2)), cfg)
    assert np.max(np.abs(tr.q - np.cos(tr.times))) <= 1e-6


def test_energy_drift(sharp400):
    p, bath = sharp400
    periods = 3
    cfg = EnsembleConfig(kT=0.1, dt=0.01 / bath.omegas.max(), t_max=2 * np.pi * periods, n_out=301)
    tr = integrate_eom(bath, p, sample_initial_conditions(bath, cfg, 1.0, 0.0, 0), cfg)
    assert np.max(np.abs(tr.energy / tr.energy[0] - 1)) <= 1e-6 * periods


def test_instability_detected():
    bath = DiscreteBath([0.5, 1.0], [1.0, 1.0], [0.01, 0.01], 0.5)
    p = params(omega0=100.0, cutoff=np.inf)
    cfg = EnsembleConfig(dt=0.05, t_max=5.0)
    with pytest.raises(InstabilityError, match="reduce dt"):
        integrate_eom(bath, p, PhaseSpaceState(1.0, 0.0, np.zeros(2), np.zeros(2)), cfg)


def test_single_cold_trajectory_and_recurrence(sharp400):
    p, bath = sharp400
    cfg = EnsembleConfig(kT=0.0, dt=9e-4, t_max=40.0, n_out=401)
    tr = integrate_eom(bath, p, sample_initial_conditions(bath, cfg, 1.0, 0.0, 0), cfg)
    dev = np.abs(tr.q - classical_trajectory(p, 1.0, 0.0, tr.times))
    before = tr.times <= min(5 / 0.5, 0.5 * bath.recurrence_time)
    assert dev[before].max() <= 0.02
    after = tr.times >= bath.recurrence_time - 1
    assert dev[after].max() > 10 * dev[before].max()


def test_adjoint_rows_match_direct_integration(sharp400):
    p, bath = sharp400
    cfg = EnsembleConfig(n_samples=3, kT=0.1, seed=1, dt=9e-4, t_max=3.0, n_out=31)
    res = run_ensemble(bath, p, cfg, keep_samples=True)
    for i in range(3):
        tr = integrate_eom(bath, p, sample_initial_conditions(bath, cfg, 1.0, 0.0, i), cfg)
        assert np.max(np.abs(tr.q - res.q_samples[:, i])) < 1e-12


# ---------------------------------------------------------------- ensembles

def test_shifted_mean_follows_classical(sharp400, ensembles):
    p, _ = sharp400
    r = ensembles["shifted"]
    ref = mean_position(p, InitialState(1.0, 0.0, "shifted"), r.times)
    z = np.abs(r.q_mean - ref)[1:] / r.q_stderr[1:]
    assert z.max() <= 3


def test_bare_mean_follows_dephased_form(sharp400, ensembles):
    p, _ = sharp400
    r = ensembles["bare"]
    ref = mean_position(p, InitialState(1.0, 0.0, "bare"), r.times)
    late = r.times >= 1.0
    assert (np.abs(r.q_mean - ref)[late] / r.q_stderr[late]).max() <= 3


def test_bare_kick_bias_shrinks_with_cutoff():
    bias = []
    for W in (100.0, 200.0):
        p = params(gamma=0.5, cutoff=W)
        bath = discretize_bath(BathSpectrum.ohmic_sharp(0.5, W), p, int(4 * W))
        cfg = EnsembleConfig(n_samples=1, kT=0.0, dt=0.09 / W, t_max=3.0, ic_variant="bare", n_out=301)
        r = run_ensemble(bath, p, cfg)
        ref = mean_position(p, InitialState(1.0, 0.0, "bare"), r.times)
        bias.append(np.max(np.abs(r.q_mean - ref)))
    assert bias[1] < 0.6 * bias[0]


def test_force_statistics(sharp400, ensembles):
    p, bath = sharp400
    sh = fluctuating_force_stats(bath, p, ensembles["shifted"])
    assert sh.max_abs_mean_over_se <= 3
    assert not sh.insufficient_samples
    assert sh.integrated_autocorr == pytest.approx(4 * 0.5 * 0.1, rel=0.1)
    bare = fluctuating_force_stats(bath, p, ensembles["bare"])
    assert bare.max_abs_mean_over_se <= 3          # follows -(4 M gamma/pi) sin(W t)/t
    impulse = bare.kick_impulse - sh.kick_impulse
    assert impulse == pytest.approx(-2 * 0.5 * 1.0, rel=0.05)


def test_determinism_across_workers(sharp400):
    p, bath = sharp400
    cfg = EnsembleConfig(n_samples=1200, kT=0.1, seed=99, dt=9e-4, t_max=1.0)
    a = run_ensemble(bath, p, cfg, workers=1)
    b = run_ensemble(bath, p, cfg, workers=3)
    assert a.q_mean.tobytes() == b.q_mean.tobytes()
    assert a.force_mean.tobytes() == b.force_mean.tobytes()
    assert a.impulse_mean == b.impulse_mean


# ---------------------------------------------------------------- memory kernel

def test_memory_kernel_constant_velocity():
    p = params(cutoff=50.0)
    bath = discretize_bath(BathSpectrum.ohmic_sharp(0.1, 50.0), p, 2000)
    t = np.linspace(0.0, 1.0, 1001)
    rep = memory_kernel_check(bath, p, t, np.ones_like(t))
    assert rep.max_rel_dev <= 0.03
    assert rep.memory_time == pytest.approx(np.pi / 50.0, rel=0.01)


def test_memory_kernel_vanishes_without_coupling():
    p = params(cutoff=50.0)
    bath = discretize_bath(BathSpectrum.ohmic_sharp(0.0, 50.0), p, 400)
    t = np.linspace(0.0, 1.0, 101)
    rep = memory_kernel_check(bath, p, t, np.cos(t), gamma=0.0)
    assert np.all(rep.kernel_integral == 0)


def test_memory_time_scales_with_grid_top():
    p = params(cutoff=50.0)
    s = BathSpectrum.ohmic_sharp(0.1, 50.0)
    t = np.linspace(0.0, 1.0, 201)
    times = [memory_kernel_check(discretize_bath(s, p, 2000, omega_max=W), p, t, np.ones_like(t)).memory_time
             for W in (50.0, 25.0, 12.5)]
    assert times[0] < times[1] < times[2]
    assert times[1] / times[0] == pytest.approx(2.0, rel=0.02)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), k=st.floats(0.1, 3.0))
def test_memory_integral_matches_direct_sum(a, b, k):
    bath = DiscreteBath([0.5, 1.5, 4.0], [1.0, 2.0, 0.5], [0.3, -0.2, 0.1], 0.0)
    t = np.linspace(0.0, 2.0, 81)
    v = a + b * np.sin(k * t)
    rep = memory_kernel_check(bath, params(cutoff=np.inf), t, v)
    direct = [trapezoid(bath.memory_kernel(x - t[: i + 1]) * v[: i + 1], t[: i + 1]) if i else 0.0
              for i, x in enumerate(t)]
    assert np.allclose(rep.kernel_integral, direct, atol=1e-12)
