"""Exact diagonalization of the coordinate-coupled oscillator (no RWA).

The eigenoperators mix a, a^dagger, b_W and b_W^dagger. Everything observable
reduces to the lineshape

    |L(w)|^2 = 2 pi w0 |v|^2 / ([w^2 - w0^2 - 2 w0 H(w)]^2 + [2 pi w0 |v|^2]^2),

with H replaced by the dressed shift H_R when the counter-term is present.
The Heisenberg solution is

    a(t) = int dw/pi |L|^2 {A cos(wt) a - i [B a + C a^dagger] sin(wt)}
           + int dW/pi [B1(W;t) b_W + B2(W;t) b_W^dagger],

    A = 2w,  B = (w^2 + w0^2)/w0,  C = (w^2 - w0^2)/w0.

The system coefficients are computed by oscillatory quadrature. The bath
coefficients B1, B2 use the residue calculus of ``response`` when the
spectrum admits it and principal-value quadrature otherwise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, InstabilityError, QuadratureError, SingularityError
from .pv_quadrature import (
    DEFAULT_CFG,
    QuadratureConfig,
    analytic_shifts,
    cauchy_pv,
    frequency_shift_sq,
    gauss_panels,
    level_shift_F,
    level_shift_H,
    quad_checked,
)
from .response import RationalResponse, rational_response
from .spectral import BathSpectrum, ModelParams, SpectrumKind, coupling_sq

__all__ = [
    "DiagConfig",
    "DiagKernel",
    "ModeWeights",
    "EvolutionCoefficients",
    "RwaReductionReport",
    "lineshape",
    "z_of_omega",
    "mode_weights",
    "evolve_a_full",
    "commutator_sum_rule",
    "lineshape_curves",
    "x_r_closed_form",
    "system_coefficients",
    "bath_coefficients",
    "bath_norm",
    "rwa_reduction",
]


@dataclass(frozen=True)
class DiagConfig:
    """Grid and quadrature settings for the full-model kernel."""

    quad: QuadratureConfig = DEFAULT_CFG
    omega_max: float | None = None
    n_uniform: int = 2000
    n_peak: int = 400
    peak_halfwidth: float = 20.0
    rwa_threshold: float = 0.05


# --------------------------------------------------------------------------
# shift functions

def _shift_functions(s: BathSpectrum, p: ModelParams, cfg: QuadratureConfig):
    """Return (H, H_R, dw2) as vectorized callables; H is None in the limit."""
    closed = analytic_shifts(s, p)
    if closed is not None:
        return closed.H, closed.H_R, closed.delta
    delta = frequency_shift_sq(s, p, cfg)

    def H(w):
        return level_shift_H(s, p, w, cfg)

    def H_R(w):
        return H(w) + delta / (2.0 * p.omega0)

    return H, H_R, delta


def _lsq_formula(w, v2, shift, w0):
    gam = 2.0 * np.pi * w0 * v2
    return gam / ((w * w - w0 * w0 - 2.0 * w0 * shift) ** 2 + gam * gam)


@dataclass(frozen=True, eq=False)
class DiagKernel:
    """Lineshape tables of the full model on a frequency grid.

    Attributes
    ----------
    omega_grid : ndarray
        Ascending positive frequencies.
    z_values : ndarray
        z(w) for the active shift (H_R with the counter-term, H without).
    L_sq : ndarray or None
        Lineshape with the bare shift H; ``None`` when the bare model is
        unstable or the cutoff is infinite.
    L_sq_renorm : ndarray
        Lineshape with the dressed shift H_R.
    counter_term, limit_mode : bool
    """

    spectrum: BathSpectrum
    params: ModelParams
    counter_term: bool
    limit_mode: bool
    omega_grid: np.ndarray
    z_values: np.ndarray
    L_sq: np.ndarray | None
    L_sq_renorm: np.ndarray
    delta_sq: float
    config: DiagConfig = field(repr=False)
    response: RationalResponse | None = field(repr=False, default=None)
    _H: object = field(repr=False, default=None)
    _H_R: object = field(repr=False, default=None)

    # pointwise evaluation -------------------------------------------------
    def v2(self, w):
        return coupling_sq(self.spectrum, self.params, w)

    def shift(self, w):
        """Active shift: H_R with the counter-term, H without."""
        return self._H_R(w) if self.counter_term else self._H(w)

    def lsq(self, w):
        """Active lineshape at arbitrary w >= 0."""
        w = np.asarray(w, dtype=float)
        return _lsq_formula(w, self.v2(w), self.shift(w), self.params.omega0)

    def z(self, w):
        return _z(self, w)

    def mode_weights(self, w):
        return _mode_weights(self, w)

    @property
    def active_L_sq(self):
        return self.L_sq_renorm if self.counter_term else self.L_sq

    def peak(self):
        """(peak frequency, half width at half maximum) read off the grid."""
        L = self.active_L_sq
        k = int(np.argmax(L))
        above = self.omega_grid[L >= 0.5 * L[k]]
        hw = 0.5 * (above[-1] - above[0]) if above.size > 1 else self.spectrum.gamma
        return float(self.omega_grid[k]), float(max(hw, 1e-12))


def _grid(s: BathSpectrum, p: ModelParams, cfg: DiagConfig):
    w0 = p.omega0
    if cfg.omega_max is not None:
        wmax = cfg.omega_max
    elif s.limit:
        wmax = max(50.0 * w0, 50.0 * s.gamma)
    else:
        wmax = 5.0 * s.cutoff if s.kind is SpectrumKind.DRUDE else s.cutoff
    uni = np.linspace(wmax / cfg.n_uniform, wmax, cfg.n_uniform)
    g = s.gamma if s.gamma else 1e-3 * w0
    off = g * np.logspace(-3, np.log10(cfg.peak_halfwidth), cfg.n_peak // 2)
    peak = np.concatenate([w0 - off, [w0], w0 + off])
    grid = np.unique(np.concatenate([uni, peak]))
    grid = grid[(grid > 0) & (grid <= wmax)]
    if s.kind is SpectrumKind.OHMIC_SHARP and not s.limit:
        grid = grid[grid < s.cutoff]
    return grid


def lineshape(s: BathSpectrum, p: ModelParams, cfg: DiagConfig | None = None,
              counter_term: bool = True) -> DiagKernel:
    """Build the lineshape kernel.

    Raises
    ------
    InstabilityError
        Without the counter-term when w0^2 <= dw2, the bare model has no
        positive spectrum.
    """
    cfg = cfg or DiagConfig()
    if s.is_parametric and s.limit and not counter_term:
        raise InstabilityError(
            "unstable without counter-term: requires omega0^2 > dw2, but dw2 is infinite"
        )
    H, H_R, delta = _shift_functions(s, p, cfg.quad)
    bare_stable = np.isfinite(delta) and p.omega0 ** 2 > delta
    if not counter_term and not bare_stable:
        raise InstabilityError(
            f"unstable without counter-term: requires omega0^2 > dw2 "
            f"({p.omega0 ** 2:.6g} <= {delta:.6g})"
        )
    grid = _grid(s, p, cfg)
    v2 = coupling_sq(s, p, grid)
    hr = H_R(grid)
    L_R = _lsq_formula(grid, v2, hr, p.omega0)
    L = None
    h = None
    if H is not None and bare_stable:
        h = H(grid)
        L = _lsq_formula(grid, v2, h, p.omega0)
    active = hr if counter_term else h
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (grid ** 2 - p.omega0 ** 2 - 2.0 * p.omega0 * active) / (2.0 * p.omega0 * v2)
    try:
        resp = rational_response(s, p, counter_term)
    except (DomainError, InstabilityError):
        resp = None
    return DiagKernel(
        spectrum=s, params=p, counter_term=counter_term, limit_mode=bool(s.limit),
        omega_grid=grid, z_values=z, L_sq=L, L_sq_renorm=L_R, delta_sq=float(delta),
        config=cfg, response=resp, _H=H, _H_R=H_R,
    )


@dataclass(frozen=True, eq=False)
class _ModelView:
    spectrum: BathSpectrum
    params: ModelParams
    _shift: object

    def v2(self, w):
        return coupling_sq(self.spectrum, self.params, w)

    def shift(self, w):
        return self._shift(w)


def _view(s, p, counter_term, cfg):
    H, H_R, _ = _shift_functions(s, p, (cfg or DiagConfig()).quad)
    if not counter_term and H is None:
        raise DomainError("the bare shift H diverges in the infinite-cutoff limit")
    return _ModelView(s, p, H_R if counter_term else H)


def _z(view, omega):
    w = np.asarray(omega, dtype=float)
    v2 = view.v2(w)
    if np.any(v2 <= 0):
        raise SingularityError("z(w) is singular where the coupling vanishes")
    w0 = view.params.omega0
    out = (w * w - w0 * w0 - 2.0 * w0 * view.shift(w)) / (2.0 * w0 * v2)
    return out if out.ndim else float(out)


def z_of_omega(s: BathSpectrum, p: ModelParams, omega, counter_term: bool = True,
               cfg: DiagConfig | None = None):
    """z(w) = (w^2 - w0^2 - 2 w0 H_eff(w)) / (2 w0 |v(w)|^2).

    H_eff is H_R with the counter-term and H without. No stability check is
    made here, so the bare model can be probed even where it is unstable.
    """
    return _z(_view(s, p, counter_term, cfg), omega)


@dataclass(frozen=True)
class ModeWeights:
    """Weights of one eigenoperator A_w on a, b_W, a^dagger, b_W^dagger.

    The arbitrary phase is fixed so that ``alpha`` is real and positive.
    The bath weight splits into a principal-value part and an on-shell
    delta part, ``beta(W) = beta_pv(W) + beta_onshell * delta(w - W)``.
    """

    omega: float
    alpha: float
    chi: float
    z: float
    v: float
    prefactor: float
    _v: object = field(repr=False, default=None)

    @property
    def alpha_sq(self):
        return self.alpha ** 2

    @property
    def beta_onshell(self):
        return self.z * self.prefactor * self.v

    def beta_pv(self, Omega):
        W = np.asarray(Omega, dtype=float)
        return self.prefactor * self._v(W) / (self.omega - W)

    def sigma(self, Omega):
        W = np.asarray(Omega, dtype=float)
        return self.prefactor * self._v(W) / (self.omega + W)


def _mode_weights(view, omega):
    w = float(omega)
    w0 = view.params.omega0
    z = _z(view, w)
    v2 = float(view.v2(w))
    alpha = np.sqrt(((w + w0) / (2.0 * w0)) ** 2 / (v2 * (np.pi ** 2 + z * z)))

    def vfun(W):
        return np.sqrt(view.v2(W))

    return ModeWeights(
        omega=w, alpha=alpha, chi=(w - w0) / (w + w0) * alpha, z=z, v=np.sqrt(v2),
        prefactor=2.0 * w0 / (w + w0) * alpha, _v=vfun,
    )


def mode_weights(s: BathSpectrum, p: ModelParams, omega: float, counter_term: bool = True,
                 cfg: DiagConfig | None = None) -> ModeWeights:
    """Eigenoperator weights alpha, beta, chi, sigma at frequency w."""
    return _mode_weights(_view(s, p, counter_term, cfg), omega)


# --------------------------------------------------------------------------
# time evolution

@dataclass(frozen=True)
class EvolutionCoefficients:
    """Coefficients of a, a^dagger, b_W, b_W^dagger in a(t).

    ``c_b`` and ``c_bdag`` multiply b_W and b_W^dagger with the plain measure
    dW (continuum) or as per-mode amplitudes (discrete baths), so that

        |c_a|^2 - |c_adag|^2 + int (|c_b|^2 - |c_bdag|^2) dW = 1.

    For the full model ``B1 = pi c_b`` and ``B2 = pi c_bdag`` are kept as well,
    together with the auxiliary transforms X, Y+, Y-, Z.
    """

    t: float
    c_a: complex
    c_adag: complex
    omega_bath: np.ndarray | None = None
    c_b: np.ndarray | None = None
    c_bdag: np.ndarray | None = None
    B1: np.ndarray | None = None
    B2: np.ndarray | None = None
    X: np.ndarray | None = None
    Y_plus: np.ndarray | None = None
    Y_minus: np.ndarray | None = None
    Z: np.ndarray | None = None
    sum_rule: float | None = None


def _osc_integral(f, edges, t, kind, cfg):
    """int_0^inf f(w) {cos|sin}(w t) dw with QUADPACK's Fourier rules."""
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if t == 0:
            if kind == "sin":
                continue
            v, _ = quad_checked(f, a, b, cfg)
        else:
            v, _ = quad_checked(f, a, b, cfg, weight=kind, wvar=t)
        total += v
    if t == 0:
        if kind == "cos":
            v, _ = quad_checked(f, edges[-1], np.inf, cfg)
            total += v
        return total
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, edges[-1], np.inf, weight=kind, wvar=t,
                             epsabs=cfg.abs_tol, limlst=200, full_output=1)
    if len(out) > 3 and out[1] > 1e3 * cfg.abs_tol:
        raise QuadratureError(f"Fourier tail integral failed: {out[3]}", out[0], out[1])
    return total + out[0]


def _edges(kernel: DiagKernel):
    wp, hw = kernel.peak()
    w0 = kernel.params.omega0
    s = kernel.spectrum
    top = max(10.0 * w0, wp + 40.0 * hw)
    if not s.limit and s.kind is SpectrumKind.DRUDE:
        top = max(top, 5.0 * s.cutoff)
    pts = [wp + k * hw for k in (-20, -5, -1, 0, 1, 5, 20)]
    if not s.limit and s.kind is SpectrumKind.OHMIC_SHARP:
        top = s.cutoff
        pts.append(s.cutoff)
    pts = sorted(x for x in pts if 0 < x < top)
    return np.array([0.0] + pts + [top])


def system_coefficients(kernel: DiagKernel, t: float, method: str = "quadrature"):
    """(c_a, c_adag) at time t >= 0.

    ``method="residue"`` uses the closed-form response (t > 0 limits at t = 0
    are replaced by the exact identity there).
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    w0 = kernel.params.omega0
    if method == "residue":
        r = kernel.response
        if r is None:
            raise DomainError("no closed-form response for this spectrum")
        if t == 0:
            return 1.0 + 0j, 0j
        G0, G1, G2 = (float(r.green(t, k)) for k in range(3))
        return (G1 + 1j * G2 / (2 * w0) - 0.5j * w0 * G0,
                1j * G2 / (2 * w0) + 0.5j * w0 * G0)
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    cfg = kernel.config.quad
    edges = _edges(kernel)
    L = kernel.lsq
    a_cos = _osc_integral(lambda w: L(w) * 2.0 * w, edges, t, "cos", cfg)
    if t == 0:
        return complex(a_cos / np.pi), 0j
    b_sin = _osc_integral(lambda w: L(w) * (w * w + w0 * w0) / w0, edges, t, "sin", cfg)
    c_sin = _osc_integral(lambda w: L(w) * (w * w - w0 * w0) / w0, edges, t, "sin", cfg)
    return complex(a_cos, -b_sin) / np.pi, complex(0.0, -c_sin / np.pi)


def _xs_quadrature(kernel: DiagKernel, W: float, t: float):
    """X(W;t), S(W;t) by principal-value quadrature of the lineshape."""
    cfg = kernel.config.quad
    cfg = QuadratureConfig(cfg.excision_halfwidth, cfg.rel_tol, cfg.abs_tol,
                           max(cfg.max_subdivisions, 2000), cfg.grid_max)
    top = _edges(kernel)[-1] * 4.0
    L = kernel.lsq

    def part(trig):
        f = lambda w: L(w) * trig(w * t)
        pv, _ = cauchy_pv(f, W, 0.0, top, cfg, scale=kernel.params.omega0)
        reg, _ = quad_checked(lambda w: f(w) / (w + W), 0.0, top, cfg)
        return pv, reg

    pv_c, reg_c = part(np.cos)
    pv_s, reg_s = part(np.sin)
    # cauchy_pv integrates f/(W - w); the transforms use f/(w - W)
    return -pv_c + reg_c, -pv_s - reg_s


def bath_coefficients(kernel: DiagKernel, Omega, t: float, method: str = "auto"):
    """B1, B2 and the auxiliary X, Y+, Y-, Z on a bath-frequency grid.

    Parameters
    ----------
    method : {"auto", "residue", "quadrature"}
        ``auto`` uses residues when a rational response is available.
    """
    W = np.atleast_1d(np.asarray(Omega, dtype=float))
    w0 = kernel.params.omega0
    r = kernel.response
    if method == "auto":
        method = "residue" if r is not None else "quadrature"
    v2 = kernel.v2(W)
    v = np.sqrt(v2)
    with np.errstate(divide="ignore", invalid="ignore"):
        Zv = np.where(v2 > 0, kernel.lsq(W) / v2 *
                      ((W * W - w0 * w0) / (2 * w0) - kernel.shift(W)), 0.0)
    if method == "residue":
        if r is None:
            raise DomainError("no closed-form response for this spectrum")
        X, S = r.xs_transforms(W, t)
        G = float(r.green(t)) if t > 0 else 0.0
    else:
        XS = np.array([_xs_quadrature(kernel, x, t) for x in W])
        X, S = XS[:, 0], XS[:, 1]
        G = 0.0 if t == 0 else float(system_green(kernel, t))
    Yp = np.pi * G + (W + w0) * S
    Ym = np.pi * G + (W - w0) * S
    B1 = v * ((w0 + W) * (X + Zv * np.exp(-1j * W * t)) - 1j * Yp)
    B2 = v * ((w0 - W) * (X + Zv * np.exp(1j * W * t)) - 1j * Ym)
    return dict(X=X, Y_plus=Yp, Y_minus=Ym, Z=Zv, B1=B1, B2=B2)


def system_green(kernel: DiagKernel, t: float):
    """G(t) = (2/pi) int_0^inf |L|^2 sin(wt) dw by Fourier quadrature."""
    return 2.0 / np.pi * _osc_integral(kernel.lsq, _edges(kernel), t, "sin", kernel.config.quad)


def _bath_panels(kernel: DiagKernel, t: float, top: float):
    wp, hw = kernel.peak()
    w0 = kernel.params.omega0
    h = 0.25 * w0 if t == 0 else min(0.25 * w0, 0.5 * np.pi / t)
    fine = np.linspace(max(0.0, wp - 50 * hw), wp + 50 * hw, 401)
    coarse = np.arange(0.0, top + h, h)
    edges = np.unique(np.concatenate([fine, coarse, [top]]))
    edges = edges[edges <= top]
    if not kernel.spectrum.limit and kernel.spectrum.kind is SpectrumKind.OHMIC_SHARP:
        edges = np.unique(np.append(edges[edges < kernel.spectrum.cutoff], kernel.spectrum.cutoff))
    return gauss_panels(edges, 16)


def bath_norm(kernel: DiagKernel, t: float, top: float | None = None):
    """(1/pi^2) int_0^inf (|B1|^2 - |B2|^2) dW by composite Gauss rules.

    Needs the closed-form response. In the infinite-cutoff limit the
    integrand decays slowly,

        -(4g/pi) G sin(Wt)/W + (4g/pi) [1 + G'^2 - G G'' - 2(G' + g G) cos(Wt)] / W^2,

    and that tail is added analytically beyond ``top``.
    """
    r = kernel.response
    if r is None:
        raise DomainError("bath_norm needs a closed-form response")
    if t == 0:
        return 0.0
    s = kernel.spectrum
    if top is None:
        top = 2000.0 * kernel.params.omega0 if s.limit else 200.0 * max(s.cutoff, kernel.params.omega0)
    nodes, weights = _bath_panels(kernel, t, top)
    total = 0.0
    for chunk in np.array_split(np.arange(nodes.size), max(1, nodes.size // 200000)):
        co = bath_coefficients(kernel, nodes[chunk], t, "residue")
        total += np.dot(weights[chunk], np.abs(co["B1"]) ** 2 - np.abs(co["B2"]) ** 2)
    total /= np.pi ** 2
    if s.limit:
        g = s.gamma
        G0, G1, G2 = (float(r.green(t, k)) for k in range(3))
        x = top * t
        si_tail = 0.5 * np.pi - special.sici(x)[0]
        cos_tail = t * (np.cos(x) / x - si_tail)
        total += 4.0 * g / np.pi * (
            -G0 * si_tail + (1.0 + G1 * G1 - G0 * G2) / top - 2.0 * (G1 + g * G0) * cos_tail
        )
    return total


def commutator_sum_rule(kernel: DiagKernel, t: float, method: str = "quadrature"):
    """|c_a|^2 - |c_adag|^2 + (1/pi^2) int (|B1|^2 - |B2|^2) dW, ideally 1."""
    ca, cd = system_coefficients(kernel, t, method)
    return abs(ca) ** 2 - abs(cd) ** 2 + bath_norm(kernel, t)


def evolve_a_full(kernel: DiagKernel, t: float, omega_bath=None,
                  method: str = "quadrature", sum_rule: bool = False) -> EvolutionCoefficients:
    """Heisenberg coefficients of a(t) in the full model.

    Parameters
    ----------
    kernel : DiagKernel
    t : float
        Time, t >= 0.
    omega_bath : array_like, optional
        Bath frequencies at which B1, B2, X, Y+-, Z are tabulated.
    method : {"quadrature", "residue"}
        Route for c_a and c_adag.
    sum_rule : bool
        Also evaluate the commutator sum rule (needs a rational response).
    """
    ca, cd = system_coefficients(kernel, t, method)
    kw = {}
    if omega_bath is not None:
        co = bath_coefficients(kernel, omega_bath, t)
        kw = dict(omega_bath=np.atleast_1d(np.asarray(omega_bath, dtype=float)),
                  c_b=co["B1"] / np.pi, c_bdag=co["B2"] / np.pi, **co)
    rule = None
    if sum_rule:
        rule = abs(ca) ** 2 - abs(cd) ** 2 + bath_norm(kernel, t)
    return EvolutionCoefficients(t=float(t), c_a=ca, c_adag=cd, sum_rule=rule, **kw)


def lineshape_curves(kernel: DiagKernel, omega=None):
    """|L|^2 with its A, B, C weighted companions on a grid."""
    w = kernel.omega_grid if omega is None else np.asarray(omega, dtype=float)
    w0 = kernel.params.omega0
    L = kernel.lsq(w)
    return dict(omega=w, L_sq=L, A_L=2 * w * L, B_L=(w * w + w0 * w0) / w0 * L,
                C_L=(w * w - w0 * w0) / w0 * L)


def x_r_closed_form(Omega, t, gamma, omega0, variant="corrected"):
    """Closed form of X_R(W;t) for the infinite-cutoff model with gamma < w0.

    Parameters
    ----------
    variant : {"corrected", "printed"}
        ``corrected`` squares the leading term of both denominators and
        carries a factor pi on the on-shell sine term; it agrees with the
        residue evaluation. ``printed`` keeps the published typography
        (unsquared denominators, no pi) for comparison only.
    """
    W = np.asarray(Omega, dtype=float)
    wp = np.sqrt(omega0 ** 2 - gamma ** 2)
    a = W * W - wp * wp + gamma * gamma
    b = W * W - omega0 ** 2
    if variant == "corrected":
        d1 = a * a + (2 * gamma * wp) ** 2
        d2 = b * b + (2 * gamma * W) ** 2
        k2 = np.pi
    elif variant == "printed":
        d1 = a + (2 * gamma * wp) ** 2
        d2 = b + (2 * gamma * W) ** 2
        k2 = 1.0
    else:
        raise DomainError(f"unknown variant {variant!r}")
    e = np.exp(-gamma * t)
    s, c = np.sin(wp * t), np.cos(wp * t)
    # d/dt {[a/wp sin + 2 gamma cos] e^{-gamma t}}
    deriv = (a * c - 2 * gamma * wp * s - gamma * (a / wp * s + 2 * gamma * c)) * e
    return -np.pi / d1 * deriv - k2 * 2 * gamma * W * np.sin(W * t) / d2


# --------------------------------------------------------------------------
# reduction to the rotating-wave model

@dataclass(frozen=True)
class RwaReductionReport:
    valid: bool
    threshold: float
    max_damping_ratio: float
    max_shift_ratio: float
    omega: np.ndarray
    alpha_tilde_sq: np.ndarray
    lineshape_weight: np.ndarray
    max_rel_deviation: float
    shift_ratio_H_over_F: float | None
    reduced_condition: str


def rwa_reduction(kernel: DiagKernel, window: float = 0.1, n: int = 401,
                  threshold: float | None = None) -> RwaReductionReport:
    """Check the conditions under which the full model reduces to the RWA form.

    The conditions pi|v(w)|^2 << w0 and |H_eff(w)| << w0 are evaluated on
    |w - w0| <= window * w0. The reduced weight

        |alpha~_w|^2 = |v|^2 / ([w - w0 - H_eff]^2 + [pi |v|^2]^2)

    is compared with (2 w0/pi)|L|^2 inside the peak (|w - w0| <= 10 gamma).
    """
    thr = kernel.config.rwa_threshold if threshold is None else threshold
    p, s = kernel.params, kernel.spectrum
    w0 = p.omega0
    w = np.linspace(w0 * (1 - window), w0 * (1 + window), n)
    v2 = kernel.v2(w)
    sh = kernel.shift(w)
    damping = float(np.max(np.pi * v2) / w0)
    shift = float(np.max(np.abs(sh)) / w0)
    alpha_t = v2 / ((w - w0 - sh) ** 2 + (np.pi * v2) ** 2)
    weight = 2.0 * w0 / np.pi * kernel.lsq(w)
    g = s.gamma
    near = np.abs(w - w0) <= 10 * g
    if near.sum() < 5:
        w_near = np.linspace(w0 - 10 * g, w0 + 10 * g, 201)
        v2n = kernel.v2(w_near)
        at = v2n / ((w_near - w0 - kernel.shift(w_near)) ** 2 + (np.pi * v2n) ** 2)
        wt = 2.0 * w0 / np.pi * kernel.lsq(w_near)
    else:
        at, wt = alpha_t[near], weight[near]
    dev = float(np.max(np.abs(at - wt)) / np.max(wt))
    ratio = None
    if kernel._H is not None:
        F = float(level_shift_F(s, p, w0, kernel.config.quad))
        ratio = float(kernel._H(w0)) / F
    if s.limit and kernel.counter_term:
        cond = "gamma/omega0 < threshold"
        valid = s.gamma / w0 < thr
    else:
        cond = "pi|v|^2/omega0 < threshold and |H_eff|/omega0 < threshold near omega0"
        valid = damping < thr and shift < thr
    return RwaReductionReport(
        valid=bool(valid), threshold=thr, max_damping_ratio=damping, max_shift_ratio=shift,
        omega=w, alpha_tilde_sq=alpha_t, lineshape_weight=weight, max_rel_deviation=dev,
        shift_ratio_H_over_F=ratio, reduced_condition=cond,
    )
