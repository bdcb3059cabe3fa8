"""Exception types raised by optsample."""

from numpy.linalg import LinAlgError


class RankDeficient(LinAlgError):
    """Regression matrix is numerically rank deficient (degenerate schedule)."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NotConverged(RuntimeError):
    """Iterative design solver stopped before meeting its tolerance.

    The best iterate found is kept on ``measure`` together with its
    Kiefer-Wolfowitz statistic.
    """

    def __init__(self, message, measure=None, kw_statistic=None, iterations=None):
        super().__init__(message)
        self.measure = measure
        self.kw_statistic = kw_statistic
        self.iterations = iterations


class VacuousBound(ValueError):
    """Concentration bound is uninformative (t >= lambda_min(R0))."""

    def __init__(self, message, t=None, lambda_min=None):
        super().__init__(message)
        self.t = t
        self.lambda_min = lambda_min


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class CampaignError(RuntimeError):
    """Monte Carlo campaign excluded too many runs."""
