PATH_COLUMNS = ("path_id", "time", "population")
MOMENT_COLUMNS = ("t", "mean", "variance", "second_moment")
COVARIANCE_COLUMNS = ("s", "t", "covariance", "correlation", "asymptotic_covariance", "covariance_limit")
"""Asymptotic covariance describes ``covariance - covariance_limit``"""
REPLICATE_COLUMNS = ("replicate", "lambda_hat", "nu_hat", "residual", "converged")
SAMPLE_COLUMNS = ("population",)
"""Sample files: optional header, then one count per line"""
CONFIG_SUFFIX = ".config.json"  # written beside every output file

FORMATS = ("csv", "json")

FIGURE_PRESETS = {
    "1a": {"lam": 0.015, "mu": 0.05, "nu": 1.0, "N": 500, "M": 300, "paths": 5, "horizon": 200.0},
    "1b": {"lam": 0.015, "mu": 0.05, "nu": 0.8, "N": 500, "M": 300, "paths": 5, "horizon": 200.0},
    "2a": {"lam": 0.05, "mu": 0.015, "nu": 0.8, "N": 500, "M": 300, "paths": 5, "horizon": 200.0},
    "2b": {"lam": 0.015, "mu": 0.015, "nu": 0.8, "N": 500, "M": 300, "paths": 5, "horizon": 200.0},
}
"""Reference five-path parameter sets for ``simulate --figure``"""
