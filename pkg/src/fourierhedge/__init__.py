"""Quadratic hedging of Fourier-represented claims on processes with independent increments."""
from ._kernels import BACKEND
from .errors import (ConfigError, FourierHedgeError, GridMismatch, ModelError, NegativeVariance,
                     QuadratureFailure, SCViolated, TruncationTooTight, UnsupportedModel)
from .model import (NIG, CustomLevy, Horizon, LevyTriplet, OUWrapper, Poisson, TimeChangedBrownian,
                    VarianceGamma, WienerLevy, psi, psi_d1, psi_d2)
from .payoff import ComplexMeasure, fourier_eval, self_quanto_put
from .calculus import check_sc, first_density, mvt, second_density
from .operators import (OperatorContext, delta, derivative_identity_check, epsilon, kernel_d,
                        kernel_e, kernel_h, kernel_k, phase)

__version__ = "0.1.0"
