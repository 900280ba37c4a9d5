"""Principal-value quadrature and the level-shift functions.

Sign convention: ``cauchy_pv(f, pole, a, b)`` returns

    PV int_a^b f(x) / (pole - x) dx,

the kernel of the pole integral F(w) = PV int |v(W)|^2 / (w - W) dW.

The shifts built on it are

    F(w)   = PV int |v|^2 / (w - W)
    G(w)   =    int |v|^2 / (w + W)
    H(w)   = F(w) - G(w)
    dw2    = 4 w0 int |v|^2 / W          (frequency shift squared)
    H_R(w) = H(w) + dw2 / (2 w0)         (counter-term dressed shift)

Parametric spectra also expose closed forms through ``analytic_shifts``;
these are used as oracles for the quadrature and as fast paths elsewhere.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError
from .spectral import BathSpectrum, ModelParams, SpectrumKind, coupling_sq

__all__ = [
    "QuadratureConfig",
    "cauchy_pv",
    "quad_checked",
    "gauss_panels",
    "level_shift_F",
    "level_shift_G",
    "level_shift_H",
    "frequency_shift_sq",
    "renormalized_shift_H_R",
    "analytic_shifts",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the adaptive principal-value quadrature.

    Parameters
    ----------
    excision_halfwidth : float, optional
        Half-width of the excised window around the pole. Defaults to
        ``1e-4 * max(scale, |pole|)``.
    rel_tol, abs_tol : float
        Tolerances handed to the adaptive integrator.
    max_subdivisions : int
        Subinterval budget of the adaptive integrator.
    grid_max : float, optional
        Upper limit of the numerical part of semi-infinite integrals.
        Defaults to 50 times the cutoff; an analytic tail covers the rest
        when one is available.
    """

    excision_halfwidth: float | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-9
    max_subdivisions: int = 200
    grid_max: float | None = None

    def __post_init__(self):
        if self.excision_halfwidth is not None and not self.excision_halfwidth > 0:
            raise DomainError("excision_halfwidth must be > 0")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.grid_max is not None and not self.grid_max > 0:
            raise DomainError("grid_max must be > 0")


DEFAULT_CFG = QuadratureConfig()


def quad_checked(f, a, b, cfg: QuadratureConfig = DEFAULT_CFG, **kw):
    """``scipy.integrate.quad`` that raises QuadratureError on real failures.

    Roundoff flags are tolerated when the reported error still meets the
    tolerance within a factor of ten.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions, full_output=1, **kw,
        )
    val, err = out[0], out[1]
    if len(out) > 3:
        allowed = 10.0 * max(cfg.abs_tol, cfg.rel_tol * abs(val))
        if not np.isfinite(val) or err > allowed:
            raise QuadratureError(
                f"quadrature on [{a}, {b}] did not converge: {out[3]}", val, err
            )
    return val, err


def cauchy_pv(f, pole, a, b, cfg: QuadratureConfig = DEFAULT_CFG, scale=1.0,
              method="window", points=None):
    """Principal value of int_a^b f(x) / (pole - x) dx.

    Parameters
    ----------
    f : callable
        Scalar real function, continuous at ``pole``.
    pole : float
        Location of the simple pole. When it lies outside ``(a, b)`` the
        integral is ordinary.
    a, b : float
        Integration limits; ``b`` may be ``np.inf`` for the window method.
    cfg : QuadratureConfig
    scale : float
        Frequency scale entering the default excision width.
    method : {"window", "subtract"}
        ``window`` pairs f(p-u) with f(p+u) on a symmetric window, excises
        ``[p-eps, p+eps]`` and Richardson-extrapolates eps -> 0.
        ``subtract`` integrates (f(x)-f(p))/(p-x) and adds the logarithm
        analytically; it needs a finite ``b``.
    points : sequence of float, optional
        Known kinks or steep features of ``f``, passed on as quadrature
        breakpoints.

    Returns
    -------
    value, error : float
    """
    if not a < b:
        raise DomainError("need a < b")
    kinks = np.asarray(points if points is not None else [], dtype=float)

    def brk(lo, hi, cand=kinks):
        # quad accepts breakpoints on finite intervals only
        if not np.isfinite(hi):
            return {}
        pts = sorted({float(x) for x in cand if lo < x < hi})
        return {"points": pts} if pts else {}

    if pole <= a or pole >= b:
        return quad_checked(lambda x: f(x) / (pole - x), a, b, cfg, **brk(a, b))

    if method == "subtract":
        if not np.isfinite(b):
            raise DomainError("pole subtraction needs a finite upper limit")
        fp = f(pole)
        val, err = quad_checked(lambda x: (f(x) - fp) / (pole - x), a, b, cfg,
                                **brk(a, b, np.r_[kinks, pole]))
        return val + fp * np.log((pole - a) / (b - pole)), err
    if method != "window":
        raise DomainError(f"unknown method {method!r}")

    w = min(pole - a, b - pole)
    eps = cfg.excision_halfwidth or 1e-4 * max(scale, abs(pole))
    eps = min(eps, w / 8.0)

    def paired(u):
        return (f(pole - u) - f(pole + u)) / u

    folded = np.abs(kinks - pole)
    main, e0 = quad_checked(paired, eps, w, cfg, **brk(eps, w, folded))
    c1, e1 = quad_checked(paired, eps / 2, eps, cfg)
    c2, e2 = quad_checked(paired, eps / 4, eps / 2, cfg)
    coarse = main + 2.0 * c1
    fine = main + c1 + 2.0 * c2
    val, err = fine, e0 + e1 + e2 + abs(fine - coarse)

    if pole - w > a:
        v, e = quad_checked(lambda x: f(x) / (pole - x), a, pole - w, cfg, **brk(a, pole - w))
        val, err = val + v, err + e
    if pole + w < b:
        v, e = quad_checked(lambda x: f(x) / (pole - x), pole + w, b, cfg, **brk(pole + w, b))
        val, err = val + v, err + e
    return val, err


def gauss_panels(edges, order=16):
    """Composite Gauss-Legendre nodes and weights over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, wt = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * wt).ravel()


# --------------------------------------------------------------------------
# closed forms

def _xlog(w, arg):
    """w * log(arg) with the w -> 0 limit set to 0."""
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = w * np.log(arg() if callable(arg) else arg)
    return np.where(w == 0, 0.0, out)


def _drude_forms(gamma, c, w0):
    K = gamma * c * c / (np.pi * w0)

    def F(w):
        w = np.asarray(w, dtype=float)
        return K / (w * w + c * c) * (_xlog(w, np.abs(w) / c) - 0.5 * np.pi * c)

    def G(w):
        return -F(-np.asarray(w, dtype=float))

    def H(w):
        w = np.asarray(w, dtype=float)
        return -(gamma * c / w0) / (1.0 + (w / c) ** 2)

    delta = 2.0 * gamma * c
    return F, G, H, delta


def _sharp_forms(gamma, c, w0):
    K = gamma / (np.pi * w0)

    def F(w):
        w = np.asarray(w, dtype=float)
        return K * (-c + _xlog(w, lambda: np.abs(w / (w - c))))

    def G(w):
        w = np.asarray(w, dtype=float)
        return K * (c - _xlog(w, lambda: np.abs((w + c) / w)))

    def H(w):
        w = np.asarray(w, dtype=float)
        return K * (-2.0 * c + _xlog(w, lambda: np.abs((w + c) / (w - c))))

    delta = 4.0 * gamma * c / np.pi
    return F, G, H, delta


def analytic_shifts(s: BathSpectrum, p: ModelParams):
    """Closed-form F, G, H, H_R and dw2 for parametric spectra.

    Returns ``None`` for tabulated spectra. In the infinite-cutoff limit
    only ``H_R`` (identically zero) is finite; F, G, H are ``None`` and
    ``delta`` is ``inf``.
    """
    if not s.is_parametric:
        return None
    if s.limit:
        return SimpleNamespace(F=None, G=None, H=None, delta=np.inf,
                               H_R=lambda w: np.zeros_like(np.asarray(w, dtype=float)))
    maker = _drude_forms if s.kind is SpectrumKind.DRUDE else _sharp_forms
    F, G, H, delta = maker(s.gamma, s.cutoff, p.omega0)

    def H_R(w):
        return H(w) + delta / (2.0 * p.omega0)

    return SimpleNamespace(F=F, G=G, H=H, delta=delta, H_R=H_R)


# --------------------------------------------------------------------------
# tabulated spectra: exact integrals of the piecewise-linear interpolant

def _table_pieces(s, p):
    # only the span of the table carries weight (zero extension outside)
    tw, tJ = s.table
    return tw, tJ / (2.0 * np.pi * p.mass * p.omega0)


def _table_pole_integral(s, p, w):
    """PV int f(x)/(w - x) dx for the piecewise-linear table."""
    x, f = _table_pieces(s, p)
    slope = np.diff(f) / np.diff(x)
    lin = f[:-1] + slope * (w - x[:-1])          # segment line extended to w
    d = np.abs(w - x)
    with np.errstate(divide="ignore"):
        ell = np.log(d)
    hit = d == 0
    if (hit[0] and f[0] != 0) or (hit[-1] and f[-1] != 0):
        raise DomainError("pole sits on a jump of the zero-extended table")
    # at an interior node the log terms cancel between neighbouring segments
    ell[hit] = 0.0
    return float(np.sum(lin * (ell[:-1] - ell[1:])) - np.sum(slope * np.diff(x)))


def _table_inverse_moment(s, p):
    x, f = _table_pieces(s, p)
    slope = np.diff(f) / np.diff(x)
    if x[0] == 0 and f[0] != 0:
        raise DomainError("tabulated J(0) != 0: the frequency shift integral diverges")
    x0 = x[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(x0 > 0, np.log(x[1:] / np.where(x0 > 0, x0, 1.0)), 0.0)
    return float(np.sum((f[:-1] - slope * x0) * logs + slope * np.diff(x)))


# --------------------------------------------------------------------------
# quadrature

def _drude_tail_F(gamma, c, w0, w, lam):
    K = gamma * c * c / (np.pi * w0)
    return K / (w * w + c * c) * (
        w * np.log(abs(lam - w) / np.hypot(lam, c)) - c * (0.5 * np.pi - np.arctan(lam / c))
    )


def _upper_limit(s, cfg, w):
    if s.kind is SpectrumKind.OHMIC_SHARP:
        return s.cutoff
    lam = cfg.grid_max or 50.0 * s.cutoff
    return max(lam, 4.0 * abs(w))


def _check_finite(s, name):
    if s.is_parametric and s.limit:
        raise DomainError(f"{name} diverges in the infinite-cutoff limit")


def _vectorize(fn, w):
    w_arr = np.asarray(w, dtype=float)
    if w_arr.ndim == 0:
        return fn(float(w_arr))
    return np.array([fn(float(x)) for x in w_arr.ravel()]).reshape(w_arr.shape)


def level_shift_F(s: BathSpectrum, p: ModelParams, omega, cfg: QuadratureConfig = DEFAULT_CFG):
    """Pole integral F(w) = PV int |v(W)|^2 / (w - W) dW.

    Below the support (w <= 0 for parametric spectra) the integral is ordinary.
    """
    _check_finite(s, "F")
    if s.kind is SpectrumKind.TABULATED:
        return _vectorize(lambda w: _table_pole_integral(s, p, w), omega)

    def one(w):
        lam = _upper_limit(s, cfg, w)
        val, _ = cauchy_pv(lambda x: coupling_sq(s, p, x), w, 0.0, lam, cfg, scale=p.omega0)
        if s.kind is SpectrumKind.DRUDE:
            val += _drude_tail_F(s.gamma, s.cutoff, p.omega0, w, lam)
        return val

    return _vectorize(one, omega)


def level_shift_G(s: BathSpectrum, p: ModelParams, omega, cfg: QuadratureConfig = DEFAULT_CFG):
    """Anti-resonant integral G(w) = int |v(W)|^2 / (w + W) dW, w >= 0."""
    _check_finite(s, "G")
    if s.kind is SpectrumKind.TABULATED:
        return _vectorize(lambda w: -_table_pole_integral(s, p, -w), omega)

    def one(w):
        if w < 0:
            raise DomainError("G is evaluated for w >= 0")
        lam = _upper_limit(s, cfg, w)
        pts = [s.cutoff] if s.kind is SpectrumKind.DRUDE and s.cutoff < lam else None
        val, _ = quad_checked(lambda x: coupling_sq(s, p, x) / (w + x), 0.0, lam, cfg, points=pts)
        if s.kind is SpectrumKind.DRUDE:
            val -= _drude_tail_F(s.gamma, s.cutoff, p.omega0, -w, lam)
        return val

    return _vectorize(one, omega)


def level_shift_H(s: BathSpectrum, p: ModelParams, omega, cfg: QuadratureConfig = DEFAULT_CFG):
    """H(w) = F(w) - G(w), by quadrature."""
    return level_shift_F(s, p, omega, cfg) - level_shift_G(s, p, omega, cfg)


def frequency_shift_sq(s: BathSpectrum, p: ModelParams, cfg: QuadratureConfig = DEFAULT_CFG):
    """dw2 = 4 w0 int |v(W)|^2 / W dW, by quadrature (``inf`` in the limit)."""
    if s.is_parametric and s.limit:
        return np.inf
    if s.kind is SpectrumKind.TABULATED:
        return 4.0 * p.omega0 * _table_inverse_moment(s, p)
    if s.gamma == 0:
        return 0.0
    # |v|^2 / W tends to J'(0) / (2 pi M w0) at W = 0
    slope = s.gamma / (np.pi * p.omega0)

    def integrand(x):
        return coupling_sq(s, p, x) / x if x > 0 else slope

    lam = _upper_limit(s, cfg, 0.0)
    pts = [s.cutoff] if s.kind is SpectrumKind.DRUDE and s.cutoff < lam else None
    val, _ = quad_checked(integrand, 0.0, lam, cfg, points=pts)
    if s.kind is SpectrumKind.DRUDE:
        c = s.cutoff
        val += s.gamma * c * (0.5 * np.pi - np.arctan(lam / c)) / (np.pi * p.omega0)
    return 4.0 * p.omega0 * val


def renormalized_shift_H_R(s: BathSpectrum, p: ModelParams, omega,
                           cfg: QuadratureConfig = DEFAULT_CFG):
    """H_R(w) = H(w) + dw2 / (2 w0); identically zero in the infinite-cutoff limit."""
    if s.is_parametric and s.limit:
        return np.zeros_like(np.asarray(omega, dtype=float)) + 0.0
    return level_shift_H(s, p, omega, cfg) + frequency_shift_sq(s, p, cfg) / (2.0 * p.omega0)
