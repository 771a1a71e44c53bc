"""
Fractional binomial process toolkit
~~~~~~~~~~~~~~~
Simulation, closed-form moments and method-of-moments estimation for the
fractional birth-death process on a finite population.

:license: MIT
"""

__title__ = "fracbinom"
__license__ = "MIT"
__version__ = "0.1.0"

from .objects import *
from .events import *
from .exceptions import (
    FracbinomError, ParameterError, MittagLefflerError, PathError, EventCapExceeded,
    FormulaError, FitError, ConvergenceError, StudyError, ConfigError, SampleFileError
)
from .special import mittag_leffler
from .rng import RngStream
from .simulation import simulate_binomial_path, simulate_fbp_path, sample_fbp_marginals
from .moments import theoretical_mean, theoretical_variance, covariance, correlation, dependence_fit
from .estimator import solve_moment_equations, run_mc_study
from .runner import StudyRunner
