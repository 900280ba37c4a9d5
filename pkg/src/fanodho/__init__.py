"""Dissipative harmonic oscillator: continuum diagonalization, dynamics and oracles."""
from .classical_bath import (
    DiscreteBath,
    EnsembleConfig,
    discretize_bath,
    fluctuating_force_stats,
    integrate_eom,
    memory_kernel_check,
    run_ensemble,
    sample_initial_conditions,
)
from .discrete_oracle import (
    build_quadratic_form,
    discrete_evolve_a,
    symplectic_diagonalize,
)
from .dynamics import (
    InitialState,
    ReservoirIC,
    shift_identity_check,
    classical_trajectory,
    damping_kernel_L,
    mean_position,
    trajectory,
)
from .errors import (
    ConfigError,
    DomainError,
    FanodhoError,
    InstabilityError,
    QuadratureError,
    SingularityError,
    ValidityError,
)
from .full_diag import (
    DiagConfig,
    EvolutionCoefficients,
    evolve_a_full,
    lineshape,
    lineshape_curves,
    mode_weights,
    rwa_reduction,
    z_of_omega,
)
from .pv_quadrature import (
    QuadratureConfig,
    cauchy_pv,
    frequency_shift_sq,
    level_shift_F,
    level_shift_G,
    level_shift_H,
    renormalized_shift_H_R,
)
from .rwa_diag import alpha_sq_rwa, coherent_decay, evolve_a_rwa, rwa_kernel
from .spectral import BathSpectrum, ModelParams, SpectrumKind, coupling_sq, spectral_density

__version__ = "0.1.0"
