"""Symbol-based invariance checks for Itô processes.

A candidate law ``mu`` of an Itô process with probabilistic symbol
``p(x, xi)`` is tested through the residual
``S(xi) = int e^{i x'xi} p(x, xi) mu(dx)``, which vanishes identically for
invariant laws.
"""
from .criterion import (CriterionReport, Verdict, albeverio_residual, check_invariance,
                        factorizing_check, gou_relation_residual, residual, residual_profile)
from .errors import (EvaluationError, HypothesisViolation, InputError, SimulationError, SymcritError,
                     UnsupportedDimension)
from .expr import Expression
from .fit import FitProblem, FitResult, density_family, fit_invariant, gaussian_family, ou_variance_ode_solve
from .levy import (Atoms, DensityOnAnnulus, LevyTriplet, StableSymmetric, jump_exponent, levy_exponent,
                   stable_constant)
from .measure import DiracAt, Density, GaussianParam, Samples, char_fn, weighted_transform
from .simulate import SDESpec, empirical_law, estimate_symbol, simulate_path
from .stationary import (Diffusion1D, fokker_planck_residual, scale_density, speed_density,
                         stationary_density)
from .symbol import (DifferentialCharacteristics, Symbol, SymbolForm, custom_symbol, levy_symbol,
                     symbol_additive, symbol_diffusion, symbol_eval, symbol_from_characteristics, symbol_gou,
                     symbol_ou_type, symbol_stable_noise, zero_symbol)

__version__ = "0.1.0"
