"""Classical ensemble of the discrete coordinate-coupled oscillator bath.

The Hamiltonian is used in completed-square form,

    H = p^2/2M + M w0^2 q^2/2
        + sum_j [ p_j^2/2m_j + m_j w_j^2/2 (q_j - C_j q/(m_j w_j^2))^2 ],

so the counter-term is always present. Eliminating the bath gives

    M q'' + M w0^2 q + int_0^t K(t-s) q'(s) ds = F(t) - K(t) q(0) [bare only],
    K(t) = sum_j C_j^2/(m_j w_j^2) cos(w_j t),

with the fluctuating force F(t) = sum_j C_j [x_j cos(w_j t) + p_j/(m_j w_j) sin(w_j t)]
built from the shifted initial bath coordinates x_j = q_j(0) - C_j q(0)/(m_j w_j^2).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, InstabilityError
from .spectral import BathSpectrum, ModelParams, SpectrumKind, spectral_density

__all__ = [
    "Scheme",
    "ICVariant",
    "DiscreteBath",
    "EnsembleConfig",
    "PhaseSpaceState",
    "BathTrajectory",
    "EnsembleResult",
    "ForceStats",
    "MemoryKernelReport",
    "discretize_bath",
    "sample_initial_conditions",
    "integrate_eom",
    "run_ensemble",
    "fluctuating_force_stats",
    "memory_kernel_check",
]

CHUNK = 500


class Scheme(str, Enum):
    UNIFORM_FREQ = "uniform_freq"


class ICVariant(str, Enum):
    BARE = "bare"
    SHIFTED = "shifted"


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    """A finite set of bath oscillators.

    Attributes
    ----------
    omegas, masses, couplings : ndarray
        w_j > 0 ascending, m_j > 0, and C_j (force per length).
    spacing : float
        Frequency spacing of the grid (0 when not on a uniform grid).
    """

    omegas: np.ndarray
    masses: np.ndarray
    couplings: np.ndarray
    spacing: float = 0.0
    scheme: Scheme = Scheme.UNIFORM_FREQ

    def __post_init__(self):
        arrs = [np.atleast_1d(np.asarray(a, dtype=float)) for a in
                (self.omegas, self.masses, self.couplings)]
        if not (arrs[0].shape == arrs[1].shape == arrs[2].shape) or arrs[0].ndim != 1:
            raise DomainError("omegas, masses and couplings must be 1-d of equal length")
        if np.any(arrs[0] <= 0) or np.any(np.diff(arrs[0]) <= 0):
            raise DomainError("bath frequencies must be positive and ascending")
        if np.any(arrs[1] <= 0):
            raise DomainError("bath masses must be positive")
        for name, a in zip(("omegas", "masses", "couplings"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def N(self):
        return self.omegas.size

    @property
    def recurrence_time(self):
        return 2.0 * np.pi / self.spacing if self.spacing > 0 else np.inf

    def stiffness(self):
        """C_j^2 / (m_j w_j^2), the weights of the memory kernel."""
        return self.couplings ** 2 / (self.masses * self.omegas ** 2)

    def delta_sq(self, M=1.0):
        """Discrete frequency shift: sum_j C_j^2/(m_j w_j^2) / M."""
        return float(np.sum(self.stiffness())) / M

    def memory_kernel(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.cos(np.multiply.outer(tau, self.omegas)) @ self.stiffness()

    def reconstructed_J(self, omega):
        """(pi/2) sum_j C_j^2/(m_j w_j) box(w - w_j)/dw.

        The box takes the value 1/2 on its edges, so a probe on a cell
        boundary averages the two neighbouring cells.
        """
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        dw = self.spacing
        off = np.abs(w[:, None] - self.omegas[None, :]) / (0.5 * dw)
        box = np.where(np.isclose(off, 1.0, rtol=0, atol=1e-12), 0.5, (off < 1.0).astype(float))
        out = 0.5 * np.pi * (box @ (self.couplings ** 2 / (self.masses * self.omegas))) / dw
        return out if np.ndim(omega) else float(out[0])


def discretize_bath(s: BathSpectrum, p: ModelParams, N: int,
                    scheme: Scheme = Scheme.UNIFORM_FREQ,
                    omega_max: float | None = None) -> DiscreteBath:
    """Midpoint grid w_j = (j - 1/2) dw with C_j^2 = (2/pi) m_j w_j J(w_j) dw.

    ``omega_max`` defaults to 5 Omega_c for Drude spectra and to the support
    edge otherwise; an explicit value always takes precedence. All masses
    are one.
    """
    if Scheme(scheme) is not Scheme.UNIFORM_FREQ:
        raise DomainError(f"unknown scheme {scheme!r}")
    if N < 2:
        raise DomainError("N must be >= 2")
    if omega_max is None:
        if s.is_parametric and s.limit:
            raise DomainError("an infinite-cutoff spectrum needs an explicit omega_max")
        omega_max = 5.0 * s.cutoff if s.kind is SpectrumKind.DRUDE else s.support_edge
    if not omega_max > 0 or not np.isfinite(omega_max):
        raise DomainError("omega_max must be finite and > 0")
    dw = omega_max / N
    if dw > 0.25 * p.omega0:
        raise DomainError(
            f"grid spacing {dw:.4g} cannot resolve omega0 (needs <= omega0/4); raise N"
        )
    w = (np.arange(1, N + 1) - 0.5) * dw
    m = np.ones(N)
    C = np.sqrt(2.0 / np.pi * m * w * spectral_density(s, p.mass, w) * dw)
    return DiscreteBath(w, m, C, dw)


# --------------------------------------------------------------------------
# ensemble configuration and sampling

@dataclass(frozen=True)
class EnsembleConfig:
    n_samples: int = 1000
    kT: float = 0.0
    seed: int = 0
    dt: float = 1e-3
    t_max: float = 10.0
    ic_variant: ICVariant = ICVariant.SHIFTED
    n_out: int = 201

    def __post_init__(self):
        object.__setattr__(self, "ic_variant", ICVariant(self.ic_variant))
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")
        if not self.kT >= 0:
            raise DomainError("kT must be >= 0")
        if not (self.dt > 0 and self.t_max > 0):
            raise DomainError("dt and t_max must be > 0")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.n_out < 2:
            raise DomainError("n_out must be >= 2")

    def check(self, bath: DiscreteBath):
        if self.dt >= 0.1 / float(bath.omegas.max()):
            raise DomainError(
                f"dt={self.dt} must be < 0.1/max(w_j) = {0.1 / bath.omegas.max():.3g}"
            )

    @property
    def n_steps(self):
        return int(math.ceil(self.t_max / self.dt - 1e-9))


@dataclass(frozen=True)
class PhaseSpaceState:
    """System (q, p) and bath (q_j, p_j); bath arrays may carry a sample axis last."""

    q: float
    p: float
    qj: np.ndarray
    pj: np.ndarray


def sample_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one ensemble member."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_initial_conditions(bath: DiscreteBath, cfg: EnsembleConfig, q0: float, p0: float,
                              rng_stream) -> PhaseSpaceState:
    """Thermal bath draw around the bare or shifted centres.

    ``rng_stream`` is a ``numpy.random.Generator`` or a sample index, in
    which case the counter-based stream of ``cfg.seed`` is used.
    """
    rng = rng_stream if isinstance(rng_stream, np.random.Generator) else \
        sample_generator(cfg.seed, int(rng_stream))
    m, w, C = bath.masses, bath.omegas, bath.couplings
    zq = rng.standard_normal(bath.N)
    zp = rng.standard_normal(bath.N)
    centre = C * q0 / (m * w * w) if cfg.ic_variant is ICVariant.SHIFTED else np.zeros(bath.N)
    qj = centre + np.sqrt(cfg.kT / (m * w * w)) * zq
    pj = np.sqrt(cfg.kT * m) * zp
    return PhaseSpaceState(float(q0), float(p0), qj, pj)


# --------------------------------------------------------------------------
# deterministic integration

@dataclass(frozen=True)
class BathTrajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    qj: np.ndarray | None
    pj: np.ndarray | None
    energy: np.ndarray


def _forces(bath, M, w0, q, qj):
    C, m, w = bath.couplings, bath.masses, bath.omegas
    stretch = qj - C * q / (m * w * w)
    fq = -M * w0 * w0 * q + C @ stretch
    fj = -m * w * w * stretch
    return fq, fj


def _energy(bath, M, w0, q, p, qj, pj):
    C, m, w = bath.couplings, bath.masses, bath.omegas
    stretch = qj - C * q / (m * w * w)
    return (p * p / (2 * M) + 0.5 * M * w0 * w0 * q * q
            + np.sum(pj * pj / (2 * m)) + 0.5 * np.sum(m * w * w * stretch * stretch))


def integrate_eom(bath: DiscreteBath, p: ModelParams, state: PhaseSpaceState,
                  cfg: EnsembleConfig, keep_bath: bool = False) -> BathTrajectory:
    """Velocity-Verlet integration of one member of the ensemble.

    Raises
    ------
    InstabilityError
        When the total energy drifts by more than 1e-3 relative.
    """
    cfg.check(bath)
    M, w0, dt = p.mass, p.omega0, cfg.dt
    m = bath.masses
    n = cfg.n_steps
    stride = max(1, n // (cfg.n_out - 1))
    q, pq = float(state.q), float(state.p)
    qj, pj = np.array(state.qj, dtype=float), np.array(state.pj, dtype=float)
    E0 = _energy(bath, M, w0, q, pq, qj, pj)
    scale = max(abs(E0), 1e-300)
    fq, fj = _forces(bath, M, w0, q, qj)
    out_t, out_q, out_p, out_E, out_qj, out_pj = [0.0], [q], [pq], [E0], [qj.copy()], [pj.copy()]
    for k in range(1, n + 1):
        pq += 0.5 * dt * fq
        pj += 0.5 * dt * fj
        q += dt * pq / M
        qj += dt * pj / m
        fq, fj = _forces(bath, M, w0, q, qj)
        pq += 0.5 * dt * fq
        pj += 0.5 * dt * fj
        if k % stride == 0 or k == n:
            E = _energy(bath, M, w0, q, pq, qj, pj)
            if not np.isfinite(E) or abs(E - E0) > 1e-3 * scale:
                raise InstabilityError(
                    f"energy drift {abs(E - E0) / scale:.2e} at t={k * dt:.4g}; reduce dt"
                )
            out_t.append(k * dt)
            out_q.append(q)
            out_p.append(pq)
            out_E.append(E)
            if keep_bath:
                out_qj.append(qj.copy())
                out_pj.append(pj.copy())
    return BathTrajectory(
        np.array(out_t), np.array(out_q), np.array(out_p),
        np.array(out_qj) if keep_bath else None, np.array(out_pj) if keep_bath else None,
        np.array(out_E),
    )


def _system_rows(bath: DiscreteBath, p: ModelParams, cfg: EnsembleConfig):
    """Rows mapping the initial phase-space vector to q at the output times.

    The Verlet map S is linear, so q_k = e_q^T S^k x0. The row e_q^T S^k is
    carried forward by applying the transposed kick and drift factors, each
    O(N) for the star-shaped coupling.
    """
    M, w0, dt = p.mass, p.omega0, cfg.dt
    C, m, w = bath.couplings, bath.masses, bath.omegas
    kappa = C / (m * w * w)
    h = 0.5 * dt
    # row vector r = (r_q, r_j, s_q, s_j) acting on (q, q_j, p, p_j)
    rq, rj = 1.0, np.zeros(bath.N)
    sq, sj = 0.0, np.zeros(bath.N)
    n = cfg.n_steps
    stride = max(1, n // (cfg.n_out - 1))
    times, rows = [0.0], [np.concatenate([[rq], rj, [sq], sj])]

    def kick(rq, rj, sq, sj):
        # p += h * f(q); f_q = -(M w0^2 + sum C kappa) q + C.q_j, f_j = m w^2 (kappa q - q_j)
        a = -(M * w0 * w0 + C @ kappa)
        rq_new = rq + h * (sq * a + sj @ (m * w * w * kappa))
        rj_new = rj + h * (sq * C - sj * m * w * w)
        return rq_new, rj_new

    for k in range(1, n + 1):
        # x_{k} = K D K x_{k-1}; row of S^k = row of S^{k-1} times S
        # apply in the order K, D, K to the row (transposes compose in reverse)
        rq, rj = kick(rq, rj, sq, sj)
        sq, sj = sq + dt / M * rq, sj + dt / m * rj
        rq, rj = kick(rq, rj, sq, sj)
        if k % stride == 0 or k == n:
            times.append(k * dt)
            rows.append(np.concatenate([[rq], rj, [sq], sj]))
    return np.array(times), np.array(rows)


@dataclass(frozen=True)
class EnsembleResult:
    """Ensemble moments of q(t) and of the fluctuating force."""

    times: np.ndarray
    q_mean: np.ndarray
    q_stderr: np.ndarray
    force_times: np.ndarray
    force_mean: np.ndarray
    force_stderr: np.ndarray
    impulse_mean: float
    impulse_stderr: float
    integrated_force_var: float
    integrated_force_var_stderr: float
    autocorr_lags: np.ndarray
    autocorr: np.ndarray
    config: EnsembleConfig = field(repr=False)
    q_samples: np.ndarray | None = field(repr=False, default=None)


def _force_matrices(bath, times):
    """F(t) = A(t) . x + B(t) . p_j with x the shifted bath coordinates."""
    ph = np.multiply.outer(times, bath.omegas)
    return bath.couplings * np.cos(ph), bath.couplings / (bath.masses * bath.omegas) * np.sin(ph)


def _chunk_moments(bath, p, cfg, q0, p0, rows, Fa, Fb, Ia, Ib, idx):
    states = [sample_initial_conditions(bath, cfg, q0, p0, i) for i in idx]
    qj = np.stack([s.qj for s in states], axis=1)
    pj = np.stack([s.pj for s in states], axis=1)
    n = len(idx)
    X = np.concatenate([np.full((1, n), q0), qj, np.full((1, n), p0), pj])
    q = rows @ X
    x = qj - (bath.couplings / (bath.masses * bath.omegas ** 2))[:, None] * q0
    F = Fa @ x + Fb @ pj
    impulse = Ia @ x + Ib @ pj
    F0 = F[0]
    return dict(
        q1=q.sum(axis=1), q2=(q * q).sum(axis=1),
        F1=F.sum(axis=1), F2=(F * F).sum(axis=1),
        I1=impulse[0].sum(), I2=(impulse[0] ** 2).sum(),
        V1=impulse[1].sum(), V2=(impulse[1] ** 2).sum(), V4=(impulse[1] ** 4).sum(),
        C=(F * F0).sum(axis=1), q=q,
    )


def run_ensemble(bath: DiscreteBath, p: ModelParams, cfg: EnsembleConfig, q0: float = 1.0,
                 p0: float = 0.0, impulse_window: float | None = None,
                 workers: int = 1, keep_samples: bool = False) -> EnsembleResult:
    """Monte Carlo ensemble with per-sample counter-based streams.

    Samples are processed in fixed chunks whose partial sums are reduced in
    chunk order, so the result does not depend on ``workers``. The system
    coordinate is obtained from the exact linear Verlet map; the fluctuating
    force is evaluated from the free bath evolution.

    ``impulse_window`` sets the upper limit T of int_0^T F dt (default
    50 / max w_j); the long-window variance <(int_0^t_max F dt)^2>/t_max
    estimates the integrated autocorrelation.
    """
    cfg.check(bath)
    times, rows = _system_rows(bath, p, cfg)
    wmax = float(bath.omegas.max())
    T = impulse_window if impulse_window is not None else 50.0 / wmax
    ft = np.linspace(0.0, min(cfg.t_max, 4.0 * T), 401)
    Fa, Fb = _force_matrices(bath, ft)
    w, C, m = bath.omegas, bath.couplings, bath.masses
    Tw = cfg.t_max
    Ia = np.stack([C * np.sin(w * T) / w, C * np.sin(w * Tw) / w])
    Ib = np.stack([C / (m * w) * (1 - np.cos(w * T)) / w, C / (m * w) * (1 - np.cos(w * Tw)) / w])
    chunks = [range(i, min(i + CHUNK, cfg.n_samples)) for i in range(0, cfg.n_samples, CHUNK)]
    job = lambda idx: _chunk_moments(bath, p, cfg, q0, p0, rows, Fa, Fb, Ia, Ib, idx)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    n = cfg.n_samples
    tot = {k: sum(d[k] for d in parts) for k in parts[0] if k != "q"}

    def mean_se(s1, s2):
        mu = s1 / n
        var = np.maximum(s2 / n - mu * mu, 0.0) * n / max(n - 1, 1)
        return mu, np.sqrt(var / n)

    qm, qse = mean_se(tot["q1"], tot["q2"])
    Fm, Fse = mean_se(tot["F1"], tot["F2"])
    Im, Ise = mean_se(tot["I1"], tot["I2"])
    # <(int_0^Tw F)^2> / Tw, centred on the mean impulse
    Vm, _ = mean_se(tot["V1"], tot["V2"])
    m2 = tot["V2"] / n - Vm * Vm
    m4 = tot["V4"] / n
    ivar = m2 / Tw
    ivar_se = np.sqrt(max(m4 - m2 * m2, 0.0) / n) / Tw
    corr = tot["C"] / n - Fm * Fm[0]
    return EnsembleResult(
        times=times, q_mean=qm, q_stderr=qse, force_times=ft, force_mean=Fm,
        force_stderr=Fse, impulse_mean=float(Im), impulse_stderr=float(Ise),
        integrated_force_var=float(ivar), integrated_force_var_stderr=float(ivar_se),
        autocorr_lags=ft, autocorr=corr, config=cfg,
        q_samples=np.concatenate([d["q"] for d in parts], axis=1) if keep_samples else None,
    )


@dataclass(frozen=True)
class ForceStats:
    """Summary of the fluctuating force of one ensemble."""

    variant: ICVariant
    max_abs_mean_over_se: float
    mean_force: np.ndarray
    mean_force_stderr: np.ndarray
    predicted_mean: np.ndarray
    kick_impulse: float
    kick_impulse_stderr: float
    integrated_autocorr: float
    integrated_autocorr_stderr: float
    target_autocorr: float
    insufficient_samples: bool


def fluctuating_force_stats(bath: DiscreteBath, p: ModelParams, result: EnsembleResult,
                            q0: float = 1.0, gamma: float | None = None) -> ForceStats:
    """Compare the force statistics with their continuum predictions.

    The bare preparation should show <F(t)> = -(4 M gamma q0/pi) sin(W t)/t with
    W the top of the bath grid; the shifted one should show zero mean. The
    integrated autocorrelation targets 4 M gamma kT.
    """
    g = p.gamma if gamma is None else gamma
    M = p.mass
    cfg = result.config
    t = result.force_times
    Wtop = float(bath.omegas.max() + 0.5 * bath.spacing)
    if cfg.ic_variant is ICVariant.BARE:
        with np.errstate(invalid="ignore", divide="ignore"):
            pred = -4.0 * M * g * q0 / np.pi * np.where(t > 0, np.sin(Wtop * t) / np.where(t > 0, t, 1), Wtop)
    else:
        pred = np.zeros_like(t)
    se = np.where(result.force_stderr > 0, result.force_stderr, np.inf)
    ratio = float(np.max(np.abs(result.force_mean - pred) / se))
    target = 4.0 * M * g * cfg.kT
    meas = result.integrated_force_var
    insufficient = bool(result.integrated_force_var_stderr > 0.5 * abs(meas)) if cfg.kT > 0 else False
    return ForceStats(cfg.ic_variant, ratio, result.force_mean, result.force_stderr, pred,
                      result.impulse_mean, result.impulse_stderr, meas,
                      result.integrated_force_var_stderr, target, insufficient)


@dataclass(frozen=True)
class MemoryKernelReport:
    times: np.ndarray
    kernel_integral: np.ndarray
    target: np.ndarray
    max_rel_dev: float
    memory_time: float


def memory_kernel_check(bath: DiscreteBath, p: ModelParams, times, qdot, gamma: float | None = None):
    """sum_j C_j^2/(m_j w_j^2) int_0^t cos(w_j (t-s)) q'(s) ds against 2 M gamma q'(t).

    The integral uses the trapezoidal rule on the supplied ``times``. The
    memory time is the first zero of the kernel, pi / W for a flat grid.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(qdot, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or t.size < 2:
        raise DomainError("times and qdot must be 1-d arrays of equal length >= 2")
    g = p.gamma if gamma is None else gamma
    k = bath.stiffness()
    # cos(w(t-s)) = cos(wt)cos(ws) + sin(wt)sin(ws): two running integrals per mode
    ph = np.multiply.outer(t, bath.omegas)
    c, s = np.cos(ph), np.sin(ph)
    Ic = cumulative_trapezoid(c * v[:, None], t, axis=0, initial=0.0)
    Is = cumulative_trapezoid(s * v[:, None], t, axis=0, initial=0.0)
    out = (c * Ic + s * Is) @ k
    target = 2.0 * p.mass * g * v
    scale = np.max(np.abs(target)) if np.any(target) else 1.0
    rel = float(np.abs(out[-1] - target[-1]) / scale) if np.any(target) else float(np.max(np.abs(out)))
    # first zero of the kernel
    wtop = float(bath.omegas.max() + 0.5 * bath.spacing)
    tau = np.linspace(0.0, 4.0 * np.pi / wtop, 4001)
    K = bath.memory_kernel(tau)
    sign = np.nonzero(np.signbit(K) != np.signbit(K[0]))[0]
    tm = float(tau[sign[0]]) if sign.size else np.inf
    return MemoryKernelReport(t, out, target, rel, tm)
