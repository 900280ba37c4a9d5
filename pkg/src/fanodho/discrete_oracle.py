"""Exact diagonalization of the finite (N+1)-mode quadratic Hamiltonian.

With a = a_0 (system) and a_j = b_j (bath) the Hamiltonian reads

    H = sum_ij A_ij a_i^dag a_j + 1/2 sum_ij (B_ij a_i^dag a_j^dag + h.c.)

where the bilinear coordinate coupling gives A_0j = B_0j = k_j with
k_j = -C_j / (2 sqrt(M w0 m_j w_j)). The rotating-wave form drops B, and the
counter-term adds dw2/(4 w0) (a + a^dag)^2.

The bosonic matrix [[A, B], [B*, A*]] is brought to normal form by the
Cholesky construction of Colpa: factor it as K^dag K, diagonalize the
Hermitian matrix K Sigma K^dag with Sigma = diag(1, -1), and back-transform.
The resulting T is paraunitary, T Sigma T^dag = Sigma.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .classical_bath import DiscreteBath
from .errors import DomainError, InstabilityError
from .full_diag import EvolutionCoefficients
from .spectral import ModelParams

__all__ = [
    "QuadraticForm",
    "NormalModes",
    "build_quadratic_form",
    "symplectic_diagonalize",
    "discrete_evolve_a",
    "propagator_expm",
]


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Coefficient matrices of a quadratic boson Hamiltonian (mode 0 is the system).

    Attributes
    ----------
    A : ndarray
        Number-conserving block, real symmetric.
    B : ndarray
        Anomalous block, real symmetric; identically zero for ``rwa``.
    """

    A: np.ndarray
    B: np.ndarray
    omegas: np.ndarray
    rwa: bool
    counter_term: bool
    delta_sq: float

    @property
    def dim(self):
        return self.A.shape[0]

    def bosonic_matrix(self):
        return np.block([[self.A, self.B], [self.B.conj(), self.A.conj()]])


def build_quadratic_form(bath: DiscreteBath | None, p: ModelParams, rwa: bool = False,
                         counter_term: bool = True) -> QuadraticForm:
    """Assemble A and B for the system plus ``bath`` (``None`` for no bath)."""
    w0, M = p.omega0, p.mass
    if bath is None:
        w = np.zeros(0)
        k = np.zeros(0)
        dsq = 0.0
    else:
        w = bath.omegas
        k = -0.5 * bath.couplings / np.sqrt(M * w0 * bath.masses * w)
        dsq = bath.delta_sq(M)
    n = w.size + 1
    A = np.zeros((n, n))
    A[0, 0] = w0
    A[np.arange(1, n), np.arange(1, n)] = w
    A[0, 1:] = A[1:, 0] = k
    B = np.zeros((n, n))
    if not rwa:
        B[0, 1:] = B[1:, 0] = k
    if counter_term:
        A[0, 0] += dsq / (2.0 * w0)
        if not rwa:
            B[0, 0] += dsq / (2.0 * w0)
    for a in (A, B):
        a.setflags(write=False)
    return QuadraticForm(A, B, np.concatenate([[w0], w]), bool(rwa), bool(counter_term), dsq)


@dataclass(frozen=True, eq=False)
class NormalModes:
    """Eigenfrequencies and the transform to normal-mode operators.

    For the full model ``T`` is 2n x 2n with (a, a^dag) = T (c, c^dag);
    for the rotating-wave form ``T`` is the n x n unitary with a = T c.
    """

    frequencies: np.ndarray
    T: np.ndarray
    form: QuadraticForm

    @property
    def n(self):
        return self.form.dim

    def paraunitarity_residual(self):
        if self.form.rwa:
            return float(np.max(np.abs(self.T @ self.T.conj().T - np.eye(self.n))))
        S = np.diag(np.r_[np.ones(self.n), -np.ones(self.n)])
        return float(np.max(np.abs(self.T @ S @ self.T.conj().T - S)))

    def propagator(self, t: float):
        """Matrix P(t) with (a(t), a^dag(t)) = P (a, a^dag), or a(t) = P a under the RWA."""
        if self.form.rwa:
            ph = np.exp(-1j * self.frequencies * t)
            return (self.T * ph) @ self.T.conj().T
        n = self.n
        ph = np.exp(np.r_[-1j * self.frequencies * t, 1j * self.frequencies * t])
        S = np.r_[np.ones(n), -np.ones(n)]
        Tinv = (S[:, None] * self.T.conj().T) * S[None, :]
        return (self.T * ph) @ Tinv


def symplectic_diagonalize(form: QuadraticForm) -> NormalModes:
    """Normal modes of ``form``.

    Raises
    ------
    InstabilityError
        If the bosonic matrix is not positive definite, i.e. the bare model
        violates w0^2 > dw2 and has an imaginary eigenfrequency.
    """
    n = form.dim
    if form.rwa:
        eps, U = linalg.eigh(form.A)
        return NormalModes(eps, U, form)
    Hb = form.bosonic_matrix()
    try:
        K = linalg.cholesky(Hb, lower=False)
    except linalg.LinAlgError:
        w0 = form.A[0, 0] - (form.delta_sq / (2 * form.omegas[0]) if form.counter_term else 0.0)
        raise InstabilityError(
            "quadratic form is not positive: requires omega0^2 > dw2 "
            f"(omega0^2={w0 ** 2:.6g}, dw2={form.delta_sq:.6g})"
        ) from None
    S = np.r_[np.ones(n), -np.ones(n)]
    W = (K * S[None, :]) @ K.conj().T
    lam, U = linalg.eigh(W)
    # eigh sorts ascending: the last n are +w, the first n are -w
    order = np.r_[np.arange(n, 2 * n), np.arange(n - 1, -1, -1)]
    lam, U = lam[order], U[:, order]
    if np.any(lam[:n] <= 0) or np.any(lam[n:] >= 0):
        raise InstabilityError("eigenvalue signs do not split evenly; form is not stable")
    E = S * lam
    T = linalg.solve_triangular(K, U * np.sqrt(E)[None, :], lower=False)
    return NormalModes(lam[:n], T, form)


def propagator_expm(form: QuadraticForm, t: float):
    """Reference propagator expm(-i Sigma H_b t) from the Heisenberg equations."""
    if form.rwa:
        return linalg.expm(-1j * form.A * t)
    n = form.dim
    S = np.r_[np.ones(n), -np.ones(n)]
    return linalg.expm(-1j * t * (S[:, None] * form.bosonic_matrix()))


def discrete_evolve_a(modes: NormalModes, t: float) -> EvolutionCoefficients:
    """Coefficients of a, a^dag, b_j, b_j^dag in a(t).

    ``sum_rule`` carries |c_a|^2 - |c_adag|^2 + sum_j (|c_b|^2 - |c_bdag|^2).
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    P = modes.propagator(t)
    n = modes.n
    row = P[0]
    if modes.form.rwa:
        c, cd = row, np.zeros(n, dtype=complex)
    else:
        c, cd = row[:n], row[n:]
    rule = float(np.sum(np.abs(c) ** 2) - np.sum(np.abs(cd) ** 2))
    return EvolutionCoefficients(float(t), complex(c[0]), complex(cd[0]), modes.form.omegas[1:],
                                 c[1:].copy(), cd[1:].copy(), sum_rule=rule)
