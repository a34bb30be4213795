"""Asymmetric Laplace scale mixtures: densities, moments, sampling and fitting.

The asymmetric Laplace (AL) law with location ``mu``, scale ``beta`` and
asymmetry ``kappa`` is mixed over its scale, ``beta / W``, with eight
choices for the law of ``W``.  The package evaluates the resulting
densities and moments, draws samples, fits the models by EM-type
algorithms and ranks them by information criteria.
"""
from . import specfun
from .ald import ALParams, al_fit, al_logpdf, al_moments, al_pdf, al_sample, delta
from .errors import (ALSMError, BracketFailure, DegenerateSupport, DomainError, EStepUnderflow,
                     InputError, MomentDoesNotExist, NestingViolation, QuadratureError)
from .family import (MODEL_TAGS, ALSMParams, GammaApp, InverseGaussian, Pareto, PowerFunction,
                     ShiftedExp, TwoPoint, UniformTail, UnimodalGamma, alsm_loglik, alsm_logpdf,
                     alsm_moments, alsm_pdf, alsm_pdf_numeric, alsm_sample, make_mixing,
                     params_from_dict, params_to_dict)
from .fit import FitConfig, FitResult, fit, fit_al, method_of_moments_init
from .modelsel import ModelScore, baseline_fit, compare, lr_test

__version__ = "0.1.0"

__all__ = [
    "specfun", "ALParams", "al_fit", "al_logpdf", "al_moments", "al_pdf", "al_sample", "delta",
    "ALSMError", "BracketFailure", "DegenerateSupport", "DomainError", "EStepUnderflow",
    "InputError", "MomentDoesNotExist", "NestingViolation", "QuadratureError",
    "MODEL_TAGS", "ALSMParams", "GammaApp", "InverseGaussian", "Pareto", "PowerFunction",
    "ShiftedExp", "TwoPoint", "UniformTail", "UnimodalGamma", "alsm_loglik", "alsm_logpdf",
    "alsm_moments", "alsm_pdf", "alsm_pdf_numeric", "alsm_sample", "make_mixing",
    "params_from_dict", "params_to_dict", "FitConfig", "FitResult", "fit", "fit_al",
    "method_of_moments_init", "ModelScore", "baseline_fit", "compare", "lr_test",
]
