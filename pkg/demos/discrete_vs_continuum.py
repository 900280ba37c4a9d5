"""A finite bath tracks the continuum until its recurrence time.

Diagonalizes a 64-mode sharp-cutoff bath exactly and compares |c_a(t)| with
the continuum evolution, well before and around t = 2 pi / spacing.
"""
import warnings

import numpy as np

from fanodho import BathSpectrum, ModelParams, discretize_bath, evolve_a_full, lineshape
from fanodho.discrete_oracle import build_quadratic_form, discrete_evolve_a, symplectic_diagonalize

warnings.simplefilter("ignore", UserWarning)
g, c = 0.1, 8.0
p = ModelParams(1.0, 1.0, g, c)
spec = BathSpectrum.ohmic_sharp(g, c)
bath = discretize_bath(spec, p, 64, omega_max=c)
modes = symplectic_diagonalize(build_quadratic_form(bath, p))
kern = lineshape(spec, p)

print(f"recurrence time {bath.recurrence_time:.2f}, paraunitarity residual {modes.paraunitarity_residual():.1e}")
print(f"{'t':>7} {'continuum':>10} {'discrete':>10} {'sum rule-1':>11}")
for t in np.r_[np.linspace(0, 40, 9), bath.recurrence_time + np.array([-2.0, 0.0, 2.0])]:
    d = discrete_evolve_a(modes, t)
    print(f"{t:7.2f} {abs(evolve_a_full(kern, t).c_a):10.5f} {abs(d.c_a):10.5f} {d.sum_rule - 1:11.1e}")
