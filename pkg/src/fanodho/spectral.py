"""Spectral densities J(w) and the coupling function |v(w)|^2.

The two dissipation models of the package are tied together by

    |v(w)|^2 = J(w) / (2 pi M w0),

so every continuum quantity downstream is a functional of the bath
spectrum declared here.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "SpectrumKind",
    "BathSpectrum",
    "ModelParams",
    "spectral_density",
    "coupling_sq",
]


class SpectrumKind(str, Enum):
    OHMIC_SHARP = "ohmic_sharp"
    DRUDE = "drude"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class BathSpectrum:
    """Parametric or tabulated spectral density.

    Parameters
    ----------
    kind : SpectrumKind
        Functional family.
    gamma : float
        Damping rate. Optional for tabulated spectra (nominal only).
    cutoff : float
        Cutoff frequency. Ignored when ``limit`` is set.
    table : tuple of ndarray, optional
        ``(omega, J)`` samples for ``TABULATED``, strictly increasing omega >= 0.
    limit : bool
        Select the infinite-cutoff forms, J = 2 M gamma w for every w.
    """

    kind: SpectrumKind
    gamma: float | None = None
    cutoff: float = np.inf
    table: tuple | None = field(default=None, repr=False)
    limit: bool = False

    def __post_init__(self):
        kind = SpectrumKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SpectrumKind.TABULATED:
            if self.table is None:
                raise DomainError("tabulated spectrum needs a table")
            if self.limit:
                raise DomainError("the infinite-cutoff flag applies to parametric spectra only")
            w = np.asarray(self.table[0], dtype=float)
            J = np.asarray(self.table[1], dtype=float)
            if w.ndim != 1 or w.shape != J.shape or w.size < 2:
                raise DomainError("table must hold two equal-length 1-d columns")
            if np.any(w < 0) or np.any(np.diff(w) <= 0):
                raise DomainError("table frequencies must be >= 0 and strictly increasing")
            if np.any(J < 0) or not np.all(np.isfinite(J)):
                raise DomainError("table values must be finite and >= 0")
            w.setflags(write=False)
            J.setflags(write=False)
            object.__setattr__(self, "table", (w, J))
            object.__setattr__(self, "cutoff", float(w[-1]))
            if self.gamma is not None and not self.gamma > 0:
                raise DomainError("gamma must be > 0")
            return
        if self.gamma is None or not self.gamma >= 0:
            raise DomainError("gamma must be >= 0")
        if not self.limit and not self.cutoff > 0:
            raise DomainError("cutoff must be > 0")
        if not self.limit and not np.isfinite(self.cutoff):
            raise DomainError("use limit=True for an infinite cutoff")

    # constructors --------------------------------------------------------
    @classmethod
    def ohmic_sharp(cls, gamma, cutoff=np.inf, limit=False):
        return cls(SpectrumKind.OHMIC_SHARP, float(gamma), float(cutoff), limit=limit)

    @classmethod
    def drude(cls, gamma, cutoff=np.inf, limit=False):
        return cls(SpectrumKind.DRUDE, float(gamma), float(cutoff), limit=limit)

    @classmethod
    def tabulated(cls, omega, J, gamma=None):
        return cls(SpectrumKind.TABULATED, gamma, table=(omega, J))

    @classmethod
    def from_csv(cls, path, gamma=None):
        """Read a two-column ``omega,J`` CSV file. A header row is optional."""
        rows = []
        with open(path, newline="") as fh:
            for rec in csv.reader(fh):
                if not rec or rec[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(rec[0]), float(rec[1])))
                except ValueError:
                    if rows:
                        raise DomainError(f"non-numeric row in {path}: {rec}")
                    # header
        if not rows:
            raise DomainError(f"no data rows in {path}")
        arr = np.array(rows)
        return cls.tabulated(arr[:, 0], arr[:, 1], gamma=gamma)

    # helpers -------------------------------------------------------------
    @property
    def support_edge(self):
        """Upper end of the support of J (inf for Drude and the limit forms)."""
        if self.limit or self.kind is SpectrumKind.DRUDE:
            return np.inf
        return float(self.cutoff)

    @property
    def is_parametric(self):
        return self.kind is not SpectrumKind.TABULATED


@dataclass(frozen=True)
class ModelParams:
    """Oscillator and bath parameters.

    ``kT`` may be zero (vacuum or cold bath); the other fields must be positive.
    """

    mass: float = 1.0
    omega0: float = 1.0
    gamma: float = 0.1
    cutoff: float = 50.0
    kT: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "omega0", "gamma", "cutoff", "hbar"):
            val = getattr(self, name)
            if not (val > 0):
                raise DomainError(f"{name} must be > 0, got {val}")
        if not (self.kT >= 0):
            raise DomainError(f"kT must be >= 0, got {self.kT}")
        if np.isfinite(self.cutoff) and self.cutoff < 10 * self.omega0:
            warnings.warn(
                f"cutoff {self.cutoff} is not much larger than omega0 {self.omega0}",
                stacklevel=3,
            )

    def spectrum(self, kind="drude", limit=False):
        """Parametric spectrum sharing ``gamma`` and ``cutoff`` with these parameters."""
        kind = SpectrumKind(kind)
        if kind is SpectrumKind.TABULATED:
            raise DomainError("build tabulated spectra with BathSpectrum.tabulated")
        cutoff = self.cutoff if np.isfinite(self.cutoff) else 1.0
        return BathSpectrum(kind, self.gamma, cutoff, limit=limit or not np.isfinite(self.cutoff))


def _as_freq(omega):
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("frequency must be >= 0")
    return w


def spectral_density(s: BathSpectrum, M: float, omega):
    """J(w) in mass * frequency^2 units.

    Tabulated spectra already carry absolute units, so ``M`` is unused for them.
    """
    w = _as_freq(omega)
    if s.kind is SpectrumKind.TABULATED:
        tw, tJ = s.table
        out = np.interp(w, tw, tJ, left=0.0, right=0.0)
        # the segment from 0 to the first node is not part of the table
        out = np.where(w < tw[0], 0.0, out)
    elif s.limit:
        out = 2.0 * M * s.gamma * w
    elif s.kind is SpectrumKind.OHMIC_SHARP:
        out = np.where(w < s.cutoff, 2.0 * M * s.gamma * w, 0.0)
    else:
        out = 2.0 * M * s.gamma * w / (1.0 + (w / s.cutoff) ** 2)
    return out if out.ndim else float(out)


def coupling_sq(s: BathSpectrum, p: ModelParams, omega):
    """|v(w)|^2 = J(w) / (2 pi M w0)."""
    return spectral_density(s, p.mass, omega) / (2.0 * np.pi * p.mass * p.omega0)
