"""Exact diagonalization of the rotating-wave Hamiltonian.

    H = w0 a^dag a + int W b_W^dag b_W dW + int (v_W a^dag b_W + h.c.) dW

has continuum eigenoperators A_w = alpha_w a + int beta_{wW} b_W dW with

    |alpha_w|^2 = |v(w)|^2 / ([w - w0 - F(w)]^2 + [pi |v(w)|^2]^2).

When the resonance condition w - w0 - F(w) = 0 has a root outside the
support of |v|^2 the Hamiltonian also has a discrete (bound) mode, whose
weight 1 / (1 - F'(w_b)) completes the normalization.

Replacing F by H (or by H_R with the counter-term) gives the weight that
the full model reduces to under weak damping. That weight is not the
eigenbasis of any Hamiltonian; its integral is only approximately one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError
from .full_diag import EvolutionCoefficients, _osc_integral
from .pv_quadrature import (
    DEFAULT_CFG,
    QuadratureConfig,
    _table_pole_integral,
    analytic_shifts,
    frequency_shift_sq,
    gauss_panels,
    level_shift_H,
    quad_checked,
)
from .spectral import BathSpectrum, ModelParams, SpectrumKind, coupling_sq

__all__ = [
    "SHIFT_KINDS",
    "RwaKernel",
    "CoherentAmplitude",
    "rwa_kernel",
    "alpha_sq_rwa",
    "evolve_a_rwa",
    "rwa_bath_norm",
    "coherent_decay",
]

SHIFT_KINDS = ("F", "H", "H_R")


def _shift_callable(s: BathSpectrum, p: ModelParams, kind: str, cfg: QuadratureConfig):
    """Vectorized shift function of real frequency (any sign for F)."""
    if kind not in SHIFT_KINDS:
        raise DomainError(f"shift must be one of {SHIFT_KINDS}, got {kind!r}")
    closed = analytic_shifts(s, p)
    if s.is_parametric and s.limit:
        if kind != "H_R":
            raise DomainError(f"{kind} diverges in the infinite-cutoff limit; use H_R")
        return closed.H_R
    if closed is not None:
        return {"F": closed.F, "H": closed.H, "H_R": closed.H_R}[kind]
    if kind == "F":
        def F(w):
            w = np.asarray(w, dtype=float)
            out = np.array([_table_pole_integral(s, p, x) for x in w.ravel()]).reshape(w.shape)
            return out if out.ndim else float(out)
        return F
    delta = frequency_shift_sq(s, p, cfg) if kind == "H_R" else 0.0
    return lambda w: level_shift_H(s, p, w, cfg) + delta / (2.0 * p.omega0)


def _alpha_sq(w, v2, shift, w0):
    w = np.asarray(w, dtype=float)
    den = (w - w0 - shift) ** 2 + (np.pi * v2) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(v2 > 0, v2 / np.where(den > 0, den, 1.0), 0.0)
    return out


def _bound_states(s, p, F):
    """Roots of w - w0 - F(w) outside the support of |v|^2, with weights.

    Below zero the function is strictly increasing, so at most one root
    exists there; above a finite support edge the same holds.
    """
    w0 = p.omega0
    D = lambda w: w - w0 - float(F(w))
    out = []
    lo_edge = float(s.table[0][0]) if s.kind is SpectrumKind.TABULATED else 0.0
    hi_edge = s.support_edge
    scale = max(w0, s.cutoff if np.isfinite(s.cutoff) else w0)

    def weight(wb, edge):
        # F is analytic off the support; keep the stencil clear of the edge
        h = 1e-3 * min(abs(wb - edge), scale)
        d1 = (float(F(wb + h)) - float(F(wb - h))) / (2.0 * h)
        d2 = (float(F(wb + h / 2)) - float(F(wb - h / 2))) / h
        return 1.0 / (1.0 - (4.0 * d2 - d1) / 3.0)

    # below the support
    eps = 1e-12 * scale
    top = lo_edge - eps
    if D(top) > 0:
        lo = top - scale
        while D(lo) > 0:
            lo -= 2.0 * (top - lo)
        wb = optimize.brentq(D, lo, top, xtol=1e-14 * scale, rtol=1e-15)
        out.append((wb, weight(wb, lo_edge)))
    # above a finite support edge
    if np.isfinite(hi_edge):
        bot = hi_edge * (1.0 + 1e-15) + eps
        if D(bot) < 0:
            hi = hi_edge + scale
            while D(hi) < 0:
                hi += 2.0 * (hi - hi_edge)
            wb = optimize.brentq(D, bot, hi, xtol=1e-14 * scale, rtol=1e-15)
            out.append((wb, weight(wb, hi_edge)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class RwaKernel:
    """Tables of |alpha_w|^2 on a frequency grid.

    Attributes
    ----------
    omega_grid : ndarray
        Ascending positive frequencies.
    alpha_sq : ndarray
        |alpha_w|^2 on the grid; alpha_w is taken real and positive.
    F_values : ndarray
        The active shift on the grid (F, H or H_R, see ``shift_kind``).
    bound_states : tuple of (frequency, weight)
        Discrete modes outside the continuum; only for ``shift_kind == "F"``.
    """

    spectrum: BathSpectrum
    params: ModelParams
    shift_kind: str
    omega_grid: np.ndarray
    alpha_sq: np.ndarray
    F_values: np.ndarray
    bound_states: tuple = ()
    cfg: QuadratureConfig = field(repr=False, default=DEFAULT_CFG)
    _shift: object = field(repr=False, default=None)

    def v2(self, w):
        return coupling_sq(self.spectrum, self.params, w)

    def shift(self, w):
        return self._shift(w)

    def weight(self, w):
        """|alpha_w|^2 at arbitrary w >= 0."""
        w = np.asarray(w, dtype=float)
        return _alpha_sq(w, self.v2(w), self.shift(w), self.params.omega0)

    def resonance(self):
        """(peak frequency, half width) read off the grid."""
        k = int(np.argmax(self.alpha_sq))
        above = self.omega_grid[self.alpha_sq >= 0.5 * self.alpha_sq[k]]
        hw = 0.5 * (above[-1] - above[0]) if above.size > 1 else 0.0
        wk = float(self.omega_grid[k])
        return wk, float(max(hw, np.pi * float(self.v2(wk)), 1e-9))

    def top(self):
        s = self.spectrum
        if np.isfinite(s.support_edge):
            return float(s.support_edge)
        wk, hw = self.resonance()
        top = max(10.0 * self.params.omega0, wk + 40.0 * hw)
        if not s.limit:
            top = max(top, 5.0 * s.cutoff)
        return top

    def edges(self):
        wk, hw = self.resonance()
        top = self.top()
        lo = float(self.spectrum.table[0][0]) if self.spectrum.kind is SpectrumKind.TABULATED else 0.0
        pts = [lo, top]
        for k in (1.0, 5.0, 20.0):
            pts += [wk - k * hw, wk + k * hw]
        if self.spectrum.kind is SpectrumKind.TABULATED:
            pts += list(self.spectrum.table[0])
        pts = np.unique(np.clip(pts, lo, top))
        return pts

    def normalization(self):
        """int |alpha_w|^2 dw plus the bound-state weights."""
        s = self.spectrum
        if s.is_parametric and s.limit:
            raise DomainError("the reduced infinite-cutoff weight has a log-divergent norm")
        e = self.edges()
        total = sum(quad_checked(self.weight, a, b, self.cfg)[0]
                    for a, b in zip(e[:-1], e[1:]))
        if not np.isfinite(s.support_edge):
            total += quad_checked(self.weight, e[-1], np.inf, self.cfg)[0]
        return total + sum(wt for _, wt in self.bound_states)


def rwa_kernel(s: BathSpectrum, p: ModelParams, shift: str = "F",
               cfg: QuadratureConfig = DEFAULT_CFG, n_uniform: int = 2000,
               n_peak: int = 400) -> RwaKernel:
    """Tabulate |alpha_w|^2 for the chosen shift function."""
    S = _shift_callable(s, p, shift, cfg)
    w0 = p.omega0
    if np.isfinite(s.support_edge):
        wmax = s.support_edge
    elif s.limit:
        wmax = max(50.0 * w0, 50.0 * s.gamma)
    else:
        wmax = 5.0 * s.cutoff
    centre = w0 + float(S(w0))
    width = max(np.pi * float(coupling_sq(s, p, w0)), 1e-6 * w0)
    off = width * np.logspace(-3, np.log10(20.0), n_peak // 2)
    grid = np.concatenate([np.linspace(wmax / n_uniform, wmax, n_uniform),
                           centre - off, [centre], centre + off])
    grid = np.unique(grid[(grid > 0) & (grid < wmax if np.isfinite(s.support_edge) else grid <= wmax)])
    Sg = np.asarray(S(grid), dtype=float)
    a2 = _alpha_sq(grid, coupling_sq(s, p, grid), Sg, w0)
    bound = _bound_states(s, p, S) if shift == "F" else ()
    for arr in (grid, a2, Sg):
        arr.setflags(write=False)
    return RwaKernel(s, p, shift, grid, a2, Sg, bound, cfg, S)


def alpha_sq_rwa(s: BathSpectrum, p: ModelParams, omega, cfg: QuadratureConfig = DEFAULT_CFG,
                 shift: str = "F"):
    """|alpha_w|^2 for w > 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise DomainError("omega must be > 0")
    S = _shift_callable(s, p, shift, cfg)
    out = _alpha_sq(w, coupling_sq(s, p, w), S(w), p.omega0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# time evolution

def _c_a(kernel: RwaKernel, t: float):
    e = kernel.edges()
    f = lambda w: float(kernel.weight(w))
    re = _osc_integral(f, e, t, "cos", kernel.cfg)
    im = _osc_integral(f, e, t, "sin", kernel.cfg)
    val = re - 1j * im
    for wb, wt in kernel.bound_states:
        val += wt * np.exp(-1j * wb * t)
    return complex(val)


def _omega_panels(kernel: RwaKernel, t: float, top: float):
    """Panel edges resolving the resonance and the e^{-iwt} oscillation."""
    wk, hw = kernel.resonance()
    lo = float(kernel.spectrum.table[0][0]) if kernel.spectrum.kind is SpectrumKind.TABULATED else 0.0
    width = min(0.5 * kernel.params.omega0, 2.0 * np.pi / max(t, 1e-12))
    coarse = np.arange(lo, top, width)
    fine = wk + hw * np.linspace(-40.0, 40.0, 321)
    pts = np.concatenate([coarse, fine, [top]])
    if np.isfinite(kernel.spectrum.support_edge):
        pts = np.concatenate([pts, [kernel.spectrum.support_edge]])
    # geometric refinement toward the band edges where F is singular
    pts = np.concatenate([pts, lo + (top - lo) * np.logspace(-8, -2, 13)])
    if np.isfinite(kernel.spectrum.support_edge):
        pts = np.concatenate([pts, top - (top - lo) * np.logspace(-8, -2, 13)])
    return np.unique(pts[(pts >= lo) & (pts <= top)])


def _pv_rows(f_nodes, nodes, weights, Omega, f_Omega, a, b, chunk=4_000_000):
    """PV int_a^b f(w) / (w - W) dw for many W by singularity subtraction."""
    out = np.empty(Omega.size, dtype=complex)
    inside = (Omega > a) & (Omega < b)
    fO = np.where(inside, f_Omega, 0.0)
    with np.errstate(divide="ignore"):
        logs = np.where(inside, np.log(np.abs((b - Omega) / np.where(inside, Omega - a, 1.0))), 0.0)
    step = max(1, chunk // max(nodes.size, 1))
    for i in range(0, Omega.size, step):
        sl = slice(i, i + step)
        d = nodes[None, :] - Omega[sl, None]
        out[sl] = ((f_nodes[None, :] - fO[sl, None]) / d) @ weights
    return out + fO * logs


def _c_b(kernel: RwaKernel, Omega, t: float, order: int = 16):
    """PV bracket of a(t) times v(W); |alpha_w|^2 beyond ``kernel.top()`` is dropped."""
    W = np.asarray(Omega, dtype=float)
    w0 = kernel.params.omega0
    v2 = kernel.v2(W)
    edges = _omega_panels(kernel, t, kernel.top())
    top = float(edges[-1])
    nodes, wts = gauss_panels(edges, order)
    f_nodes = kernel.weight(nodes) * np.exp(-1j * nodes * t)
    f_W = kernel.weight(W) * np.exp(-1j * W * t)
    lo = float(edges[0])
    pv = _pv_rows(f_nodes, nodes, wts, W, f_W, lo, top)
    shift = np.asarray(kernel.shift(W), dtype=float)
    det = W - w0 - shift
    onshell = det / (det * det + (np.pi * v2) ** 2) * np.exp(-1j * W * t)
    onshell = np.where(v2 > 0, onshell, 0.0)
    bound = np.zeros_like(W, dtype=complex)
    for wb, wt in kernel.bound_states:
        bound += wt * np.exp(-1j * wb * t) / (wb - W)
    return np.sqrt(v2) * (pv + onshell + bound)


def rwa_bath_norm(kernel: RwaKernel, t: float, top: float | None = None, order: int = 14):
    """int |c_b(W,t)|^2 dW, with the large-W tail added in closed form.

    Beyond ``top`` the bracket behaves as e^{-iWt}/W - c_a/W, whose modulus
    squared averages to (1 + |c_a|^2)/W^2 once the cross term oscillates away.
    """
    s = kernel.spectrum
    if s.is_parametric and s.limit:
        raise DomainError("the reduced infinite-cutoff model has no finite bath norm")
    if t == 0:
        return 0.0
    c_a = _c_a(kernel, t)
    edge = s.support_edge
    if top is None:
        top = float(edge) if np.isfinite(edge) else 20.0 * max(s.cutoff, kernel.params.omega0)
    W, wts = gauss_panels(_omega_panels(kernel, t, top), order)
    cb = _c_b(kernel, W, t)
    total = float(np.sum(wts * np.abs(cb) ** 2))
    if not np.isfinite(edge) and s.kind is SpectrumKind.DRUDE:
        c = s.cutoff
        tail = s.gamma / (np.pi * kernel.params.omega0) * 0.5 * np.log1p((c / top) ** 2)
        total += (1.0 + abs(c_a) ** 2) * tail
    return total


def evolve_a_rwa(kernel: RwaKernel, t: float, omega_bath=None,
                 sum_rule: bool = False) -> EvolutionCoefficients:
    """Coefficients of a and b_W in a(t); c_adag and c_bdag vanish in the RWA.

    ``c_a(t) = int |alpha_w|^2 e^{-iwt} dw`` (plus bound modes) is computed
    with Fourier-weighted quadrature; c_b(W,t) is the principal-value
    bracket evaluated on Gauss panels by singularity subtraction.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    W = None if omega_bath is None else np.atleast_1d(np.asarray(omega_bath, dtype=float))
    if W is not None and np.any(W <= 0):
        raise DomainError("bath frequencies must be > 0")
    if t == 0:
        cb = None if W is None else np.zeros(W.size, dtype=complex)
        return EvolutionCoefficients(0.0, 1.0 + 0j, 0j, W, cb,
                                     None if W is None else np.zeros_like(cb),
                                     sum_rule=1.0 if sum_rule else None)
    if kernel.spectrum.is_parametric and kernel.spectrum.limit and t < 1e-3 / kernel.params.omega0:
        raise DomainError("the reduced infinite-cutoff model needs t > 0")
    c_a = _c_a(kernel, t)
    cb = None if W is None else _c_b(kernel, W, t)
    rule = None
    if sum_rule:
        rule = abs(c_a) ** 2 + rwa_bath_norm(kernel, t)
    return EvolutionCoefficients(float(t), c_a, 0j, W, cb,
                                 None if cb is None else np.zeros_like(cb), sum_rule=rule)


@dataclass(frozen=True)
class CoherentAmplitude:
    """alpha(t) of a coherent state decaying into a vacuum reservoir.

    ``reservoir_amplitudes`` holds the coherent amplitudes beta_W(t) of the
    bath modes on ``omega_bath`` when requested.
    """

    t: float
    value: complex
    omega_bath: np.ndarray | None = None
    reservoir_amplitudes: np.ndarray | None = None


def coherent_decay(kernel: RwaKernel, alpha0: complex, t: float, omega_bath=None,
                   approximation: str = "exact") -> CoherentAmplitude:
    """Amplitude of an initial coherent state |alpha0> with the bath in vacuum.

    ``approximation="exact"`` integrates |alpha_w|^2 e^{-iwt};
    ``"lorentzian"`` uses alpha0 exp(-i(w0 + dw)t - pi|v(w0)|^2 t) with dw the
    kernel's shift at w0.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    alpha0 = complex(alpha0)
    if approximation == "lorentzian":
        w0 = kernel.params.omega0
        dw = float(kernel.shift(w0))
        rate = np.pi * float(kernel.v2(w0))
        return CoherentAmplitude(float(t), alpha0 * np.exp(-1j * (w0 + dw) * t - rate * t))
    if approximation != "exact":
        raise DomainError(f"unknown approximation {approximation!r}")
    co = evolve_a_rwa(kernel, t, omega_bath)
    beta = None if co.c_b is None else alpha0 * co.c_b
    return CoherentAmplitude(float(t), alpha0 * co.c_a, co.omega_bath, beta)
