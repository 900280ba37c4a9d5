"""Mean-position dynamics of the ohmic oscillator.

With factorized initial conditions the first moment obeys

    <q(t)> = q0 * dL/dt + (p0/M) * L(t)                  (bare reservoir)
    <q(t)> = q0 * (dL/dt + 2 gamma L) + (p0/M) * L(t)    (shifted reservoir)

where L(t) is the damping kernel of the infinite-cutoff model, the
Green function of  q'' + 2 gamma q' + w0^2 q = 0  with L(0) = 0, L'(0) = 1.
Only the shifted reservoir reproduces the classical damped trajectory; the
bare one carries an extra -2 gamma q0 L(t) left over from an impulsive
force at t = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

from .errors import DomainError
from .full_diag import DiagKernel, _edges, _osc_integral, _xs_quadrature, x_r_closed_form
from .pv_quadrature import DEFAULT_CFG, QuadratureConfig, quad_checked
from .spectral import BathSpectrum, ModelParams

__all__ = [
    "Regime",
    "ReservoirIC",
    "InitialState",
    "Trajectory",
    "regime",
    "damping_kernel_L",
    "mean_position",
    "classical_trajectory",
    "trajectory",
    "ShiftIdentityReport",
    "shift_identity_check",
    "bath_response_tables",
]

CRITICAL_TOL = 1e-8


class Regime(str, Enum):
    UNDER = "under"
    CRITICAL = "critical"
    OVER = "over"


class ReservoirIC(str, Enum):
    BARE = "bare"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class InitialState:
    """System means and the reservoir preparation.

    ``BARE`` leaves every bath coordinate centred at zero; ``SHIFTED``
    centres bath mode j at C_j q0 / (m_j w_j^2), the equilibrium position
    in the presence of the displaced system.
    """

    q0: float
    p0: float = 0.0
    reservoir_ic: ReservoirIC = ReservoirIC.SHIFTED

    def __post_init__(self):
        object.__setattr__(self, "reservoir_ic", ReservoirIC(self.reservoir_ic))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    q_mean: np.ndarray
    regime: Regime


def regime(p: ModelParams) -> Regime:
    if abs(p.gamma - p.omega0) < CRITICAL_TOL * p.omega0:
        return Regime.CRITICAL
    return Regime.UNDER if p.gamma < p.omega0 else Regime.OVER


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    return t


def damping_kernel_L(p: ModelParams, t, derivative: int = 0):
    """L(t) or its first two derivatives, closed form in every regime."""
    if derivative not in (0, 1, 2):
        raise DomainError("derivative must be 0, 1 or 2")
    t = _times(t)
    g, w0 = p.gamma, p.omega0
    reg = regime(p)
    if derivative == 2:
        return -2.0 * g * damping_kernel_L(p, t, 1) - w0 * w0 * damping_kernel_L(p, t, 0)
    e = np.exp(-g * t)
    if reg is Regime.CRITICAL:
        out = t * e if derivative == 0 else (1.0 - g * t) * e
    elif reg is Regime.UNDER:
        wp = np.sqrt(w0 * w0 - g * g)
        s, c = np.sin(wp * t), np.cos(wp * t)
        out = s / wp * e if derivative == 0 else (c - g / wp * s) * e
    else:
        sq = np.sqrt(g * g - w0 * w0)
        slow, fast = g - sq, g + sq
        es, ef = np.exp(-slow * t), np.exp(-fast * t)
        if derivative == 0:
            out = (es - ef) / (2.0 * sq)
        else:
            out = (fast * ef - slow * es) / (2.0 * sq)
    return out if out.ndim else float(out)


def mean_position(p: ModelParams, ic: InitialState, t):
    """<q(t)> for the bare or shifted reservoir preparation."""
    L = damping_kernel_L(p, t)
    dL = damping_kernel_L(p, t, 1)
    if ic.reservoir_ic is ReservoirIC.BARE:
        return ic.q0 * dL + ic.p0 / p.mass * L
    return ic.q0 * (dL + 2.0 * p.gamma * L) + ic.p0 / p.mass * L


def classical_trajectory(p: ModelParams, q0: float, p0: float, t):
    """Solution of M q'' + 2 M gamma q' + M w0^2 q = 0 with q(0)=q0, q'(0)=p0/M."""
    t = _times(t)
    g, w0 = p.gamma, p.omega0
    v0 = p0 / p.mass
    reg = regime(p)
    if reg is Regime.UNDER:
        wp = np.sqrt(w0 * w0 - g * g)
        s, c = np.sin(wp * t), np.cos(wp * t)
        out = (q0 * (c + g / wp * s) + v0 / wp * s) * np.exp(-g * t)
    elif reg is Regime.CRITICAL:
        out = (q0 * (1.0 + g * t) + v0 * t) * np.exp(-g * t)
    else:
        sq = np.sqrt(g * g - w0 * w0)
        r1, r2 = g + sq, g - sq
        A = -(v0 + r2 * q0) / (r1 - r2)
        B = (v0 + r1 * q0) / (r1 - r2)
        out = A * np.exp(-r1 * t) + B * np.exp(-r2 * t)
    return out if out.ndim else float(out)


def trajectory(p: ModelParams, ic: InitialState, times) -> Trajectory:
    times = _times(times)
    return Trajectory(times=times, q_mean=np.asarray(mean_position(p, ic, times)),
                      regime=regime(p))


# --------------------------------------------------------------------------
# identities behind the shifted preparation

@dataclass(frozen=True)
class ShiftIdentityReport:
    t: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    two_gamma_L: np.ndarray
    I1_max_abs: float
    H_vs_2gammaL_max_rel: float
    H_vs_2gammaL_max_abs: float


def _i1(kernel: DiagKernel, t: float, cfg: QuadratureConfig):
    """I1(t) = -4 w0 int dW/pi |v|^2/W * dW_R/dt, with dW_R/dt = X_R(W;t).

    X_R splits into a smooth part and the on-shell term -pi |L_R(W)|^2 sin(Wt);
    the latter is integrated with Fourier weights.
    """
    p, s = kernel.params, kernel.spectrum
    g, w0 = s.gamma, p.omega0
    slope = g / (np.pi * w0)             # |v|^2 / W in the ohmic limit
    if g < w0:
        X = lambda W: float(x_r_closed_form(W, t, g, w0))
    else:
        X = lambda W: float(kernel.response.xs_transforms(np.array([W]), t)[0][0])

    def smooth(W):
        return X(W) + np.pi * float(kernel.lsq(W)) * np.sin(W * t)

    edges = _edges(kernel)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += quad_checked(smooth, lo, hi, cfg)[0]
    total += quad_checked(smooth, edges[-1], np.inf, cfg)[0]
    total -= np.pi * _osc_integral(kernel.lsq, edges, t, "sin", cfg)
    return -4.0 * w0 * slope / np.pi * total


def _i2(kernel: DiagKernel, t: float, cfg: QuadratureConfig):
    """I2(t) = -4 w0 int dW/pi |v|^2/W * Z_R(W) cos(Wt)."""
    p = kernel.params
    w0 = p.omega0

    def f(W):
        v2 = kernel.v2(W)
        if W == 0:
            return 0.0
        Z = kernel.lsq(W) / v2 * ((W * W - w0 * w0) / (2 * w0) - kernel.shift(W))
        return float(-4.0 * w0 * v2 / W * Z / np.pi)

    out = integrate.quad(f, 0.0, np.inf, weight="cos", wvar=t, epsabs=cfg.abs_tol * 1e-3,
                         limlst=200)
    return out[0]


def shift_identity_check(kernel: DiagKernel, t_grid, cfg: QuadratureConfig = DEFAULT_CFG):
    """Evaluate I1(t) (should vanish) and I2(t) (should equal 2 gamma L(t)).

    Needs the infinite-cutoff ohmic model with the counter-term. The
    relative error is measured against max |2 gamma L| over the grid,
    since L(t) has zeros.
    """
    s = kernel.spectrum
    if not (s.limit and kernel.counter_term):
        raise DomainError("shift_identity_check needs the infinite-cutoff model with counter-term")
    t = _times(t_grid)
    if np.any(t == 0):
        raise DomainError("the identities hold for t > 0")
    p = ModelParams(mass=kernel.params.mass, omega0=kernel.params.omega0, gamma=s.gamma,
                    cutoff=np.inf, kT=kernel.params.kT, hbar=kernel.params.hbar)
    I1 = np.array([_i1(kernel, x, cfg) for x in t])
    I2 = np.array([_i2(kernel, x, cfg) for x in t])
    ref = 2.0 * s.gamma * np.asarray(damping_kernel_L(p, t))
    H = I1 + I2
    scale = np.max(np.abs(ref))
    return ShiftIdentityReport(
        t=t, I1=I1, I2=I2, two_gamma_L=ref, I1_max_abs=float(np.max(np.abs(I1))),
        H_vs_2gammaL_max_rel=float(np.max(np.abs(H - ref)) / scale),
        H_vs_2gammaL_max_abs=float(np.max(np.abs(H - ref))),
    )


def bath_response_tables(kernel: DiagKernel, Omega, t: float, method: str = "quadrature"):
    """W_R(W,t), its time derivative and Z_R(W) on a bath-frequency grid.

    W_R(W,t) = PV int_0^inf 2|L|^2 sin(wt) / (w^2 - W^2) dw = S(W;t)/W and
    dW_R/dt = X(W;t). ``method`` selects principal-value quadrature or the
    residue closed form.
    """
    W = np.atleast_1d(np.asarray(Omega, dtype=float))
    if np.any(W <= 0):
        raise DomainError("bath frequencies must be > 0")
    if method == "residue":
        if kernel.response is None:
            raise DomainError("no closed-form response for this spectrum")
        X, S = kernel.response.xs_transforms(W, t)
    elif method == "quadrature":
        if t == 0:
            X0 = np.array([_xs_quadrature(kernel, x, 0.0)[0] for x in W])
            X, S = X0, np.zeros_like(W)
        else:
            XS = np.array([_xs_quadrature(kernel, x, t) for x in W])
            X, S = XS[:, 0], XS[:, 1]
    else:
        raise DomainError(f"unknown method {method!r}")
    w0 = kernel.params.omega0
    v2 = kernel.v2(W)
    Z = kernel.lsq(W) / v2 * ((W * W - w0 * w0) / (2 * w0) - kernel.shift(W))
    return dict(omega=W, W_R=S / W, dW_R_dt=X, Z_R=Z)
