"""Maximum-likelihood fitting of the ALSM models."""
from .engine import FitConfig, FitResult, fit, fit_al
from .estep import EStepWeights, estep
from .mm import DEFAULT_THETA, default_init, method_of_moments, method_of_moments_init, mm_beta, sample_moments
from .mstep import THETA_BOUNDS, mstep_theta
from .q1 import maximize_q1, q1_objective

__all__ = ["FitConfig", "FitResult", "fit", "fit_al", "EStepWeights", "estep", "DEFAULT_THETA",
           "default_init", "method_of_moments", "method_of_moments_init", "mm_beta", "sample_moments",
           "THETA_BOUNDS", "mstep_theta", "maximize_q1", "q1_objective"]
