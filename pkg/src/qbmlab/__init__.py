"""Non-Markovian quantum Brownian motion: coefficients, observables, trajectories.

Modules
-------
specfun       hypergeometric series used by the closed-form diffusion coefficient
coefficients  time-dependent master-equation coefficients and their integrals
analytic      secular-approximation observables (heating, variance, Mandel Q, Wigner)
nmwf          doubled-Hilbert-space Monte Carlo unravelling
border        Lindblad / non-Lindblad classification and border data
cli           command-line front end
"""
from .coefficients import (CoefficientGrid, ReservoirSpec, build_grid,
                           delta_at, delta_closed_at, delta_high_t_at,
                           delta_quad_at, gamma_at, markov_limits)
from .analytic import (GaussianWigner, InitialStateMoments, heating_at,
                       heating_markov, mandel_q_at, position_variance_at,
                       thermal_n, wigner_coherent)
from .border import LindbladType, classify, critical_r_high_t, sign_profile
from .errors import NumericalError, QbmError, ValidationError

__version__ = "0.1.0"
