"""Rational response functions and their residue calculus.

For the Drude and infinite-cutoff ohmic spectra the lineshape is the
imaginary part of a rational function analytic in the upper half plane,

    chi(w) = 1 / (w0^2 - w^2 + 2 w0 Sigma(w)),    |L(w)|^2 = Im chi(w),

with Sigma the (analytically continued) self energy. All poles lie in the
lower half plane for a stable model, so time-domain quantities and the
principal-value transforms of |L|^2 follow from a finite residue sum.
This gives closed forms independent of the adaptive quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InstabilityError
from .spectral import BathSpectrum, ModelParams, SpectrumKind

__all__ = ["RationalResponse", "rational_response"]


@dataclass(frozen=True, eq=False)
class RationalResponse:
    """chi(w) = num(w) / den(w) with simple poles.

    Attributes
    ----------
    num, den : ndarray
        Polynomial coefficients in w, highest power first.
    poles : ndarray
        Roots of ``den``.
    residues : ndarray
        Residues of chi at ``poles``.
    """

    num: np.ndarray
    den: np.ndarray
    poles: np.ndarray
    residues: np.ndarray

    @classmethod
    def from_polynomials(cls, num, den):
        num = np.asarray(num, dtype=complex)
        den = np.asarray(den, dtype=complex)
        poles = np.roots(den)
        scale = max(1.0, np.max(np.abs(poles)))
        gaps = np.abs(poles[:, None] - poles[None, :]) + np.eye(poles.size) * scale
        if np.min(gaps) < 1e-7 * scale:
            raise DomainError("response has (near) degenerate poles; use the quadrature route")
        if np.any(poles.imag >= 0):
            raise InstabilityError("response has a pole in the upper half plane")
        dden = np.polyder(den)
        residues = np.polyval(num, poles) / np.polyval(dden, poles)
        return cls(num, den, poles, residues)

    def chi(self, w):
        w = np.asarray(w, dtype=complex)
        return np.polyval(self.num, w) / np.polyval(self.den, w)

    def lsq(self, w):
        """|L(w)|^2 = Im chi(w) for real w."""
        return self.chi(np.asarray(w, dtype=float)).imag

    def green(self, t, order=0):
        """d^n/dt^n of G(t) = (2/pi) int_0^inf Im chi(w) sin(wt) dw, for t >= 0.

        At t = 0 the one-sided limit t -> 0+ is returned.
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("t must be >= 0")
        p = self.poles
        terms = self.residues * (-1j * p) ** order
        phase = np.exp(-1j * np.multiply.outer(t, p))
        return (-1j * (phase @ terms)).real

    # partial fractions of |L|^2 = sum_m R_m / (w - P_m)
    def _lsq_fractions(self):
        r = self.residues / 2j
        return np.concatenate([self.poles, -self.poles]), np.concatenate([r, r])

    def pv_exp(self, Omega, s):
        """I(W, s) = PV int_{-inf}^{inf} |L(w)|^2 exp(i s w) / (w - W) dw for real W."""
        W = np.asarray(Omega, dtype=float)
        P, R = self._lsq_fractions()
        if s > 0:
            E = np.where(P.imag > 0, 2j * np.pi * np.exp(1j * s * P), 0.0)
        elif s < 0:
            E = np.where(P.imag < 0, -2j * np.pi * np.exp(1j * s * P), 0.0)
        else:
            E = 1j * np.pi * np.sign(P.imag)
        onshell = self.lsq(W) * 1j * np.pi * np.sign(s) * np.exp(1j * s * W)
        poles = (R * E)[None, :] / (W.reshape(-1, 1) - P[None, :])
        return (onshell - poles.sum(axis=1)).reshape(W.shape)

    def xs_transforms(self, Omega, t):
        """X(W;t) and S(W;t), the cosine and sine principal-value transforms.

        X = PV int_0^inf 2|L|^2 w cos(wt) / (w^2 - W^2) dw
        S = PV int_{-inf}^{inf} |L|^2 sin(wt) / (w - W) dw
        """
        Ip = self.pv_exp(Omega, t)
        Im = self.pv_exp(Omega, -t)
        return (0.5 * (Ip + Im)).real, ((Ip - Im) / 2j).real


def rational_response(s: BathSpectrum, p: ModelParams, counter_term: bool):
    """Rational chi for Drude or infinite-cutoff spectra, else ``None``.

    The self energy of the Drude spectrum continues to
    2 w0 Sigma(w) = -2 gamma c^2 / (c - i w); the counter-term adds 2 gamma c.
    In the infinite-cutoff limit with the counter-term, 2 w0 Sigma = -2 i gamma w.
    """
    if not s.is_parametric:
        return None
    w0sq = p.omega0 ** 2
    g = s.gamma
    if s.limit:
        if s.kind is SpectrumKind.OHMIC_SHARP or s.kind is SpectrumKind.DRUDE:
            if not counter_term:
                raise InstabilityError(
                    "without the counter-term the infinite-cutoff model violates w0^2 > dw2"
                )
            return RationalResponse.from_polynomials([1.0], [-1.0, -2j * g, w0sq])
    if s.kind is not SpectrumKind.DRUDE:
        return None
    c = s.cutoff
    eff = w0sq + (2.0 * g * c if counter_term else 0.0)
    # (eff - w^2)(c - i w) - 2 g c^2
    den = np.polysub(np.polymul([-1.0, 0.0, eff], [-1j, c]), [2.0 * g * c * c])
    return RationalResponse.from_polynomials([-1j, c], den)
