"""Tail-index estimators: Hill, Pareto maximum likelihood and log-log
survival regression.

The module-level functions do the work. ``HillEstimator``,
``ParetoMLEEstimator`` and ``LogLogTailEstimator`` wrap them as scikit-learn
estimators so they can sit in pipelines, grid searches and ``clone``.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import DegenerateTailError, DomainError, InvalidParameterError, check_samples

METHODS = ("hill", "mle", "loglog")


@dataclass(frozen=True)
class EstimateResult:
    alpha_hat: float
    method: str
    k_used: int
    n: int
    threshold: float = None


def _log_excess_sum(top, baseline):
    # fsum is order independent, which makes Hill with baseline=x_min equal the MLE bit-for-bit.
    return math.fsum(np.log(top / baseline).tolist())


def hill_estimator(samples, k, baseline=None):
    """Hill estimate ``k / sum_{i<=k} ln(X_(n-i+1) / X_(n-k))`` from the top ``k`` values.

    ``baseline`` replaces the order statistic ``X_(n-k)`` with a fixed
    threshold (then ``k`` may equal ``n``).
    """
    x = check_samples(samples, min_count=1, positive=True)
    n = x.shape[0]
    k = int(k)
    x = np.sort(x, kind="stable")
    if baseline is None:
        if not 1 <= k <= n - 1:
            raise InvalidParameterError(f"Hill needs 1 <= k <= n - 1, got k={k}, n={n}")
        baseline = float(x[n - k - 1])
    else:
        baseline = float(baseline)
        if not 1 <= k <= n:
            raise InvalidParameterError(f"Hill needs 1 <= k <= n, got k={k}, n={n}")
        if baseline <= 0 or x[n - k] < baseline:
            raise DomainError("the top k samples must lie at or above a positive baseline")
    total = _log_excess_sum(x[n - k:], baseline)
    if total == 0.0:
        raise DegenerateTailError(f"the top {k} samples all equal the baseline {baseline!r}")
    return EstimateResult(alpha_hat=k / total, method="hill", k_used=k, n=n, threshold=baseline)


def pareto_mle(samples, x_min):
    """Maximum-likelihood exponent ``n / sum ln(x_i / x_min)`` for a known lower bound."""
    x = check_samples(samples, min_count=1)
    x_min = float(x_min)
    if not x_min > 0:
        raise InvalidParameterError("x_min must be positive")
    if np.any(x < x_min):
        raise DomainError(f"every sample must be >= x_min={x_min!r}")
    total = _log_excess_sum(x, x_min)
    if total == 0.0:
        raise DegenerateTailError("all samples equal x_min; the estimate would be infinite")
    n = x.shape[0]
    return EstimateResult(alpha_hat=n / total, method="mle", k_used=n, n=n, threshold=x_min)


def pareto_loglik(alpha, samples, x_min):
    x = np.asarray(samples, dtype=float)
    return x.shape[0] * (math.log(alpha) + alpha * math.log(x_min)) - (alpha + 1) * math.fsum(
        np.log(x).tolist()
    )


def loglog_slope(points):
    """OLS slope of ``ln(survival)`` against ``ln(x)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise InvalidParameterError("need at least 2 (x, survival) pairs")
    x, s = pts[:, 0], pts[:, 1]
    if np.all(x == x[0]):
        raise DegenerateTailError("all x values are equal; the slope is undefined")
    if np.any(np.diff(x) <= 0):
        raise InvalidParameterError("x must be strictly increasing")
    if np.any(x <= 0) or np.any(s <= 0):
        raise InvalidParameterError("x and survival must be strictly positive")
    lx, ls = np.log(x), np.log(s)
    lx_c = lx - lx.mean()
    return float(np.dot(lx_c, ls - ls.mean()) / np.dot(lx_c, lx_c))


def empirical_survival(samples):
    """Sorted unique values with the fraction of the sample strictly above each.

    The largest value (survival 0) is dropped so every pair is log-safe.
    """
    x = check_samples(samples, min_count=1)
    n = x.shape[0]
    values, counts = np.unique(x, return_counts=True)
    above = n - np.cumsum(counts)
    keep = above > 0
    return [(float(v), float(a) / n) for v, a in zip(values[keep], above[keep])]


def loglog_estimate(samples, survival_range=None):
    """``-loglog_slope`` over empirical survival points inside ``survival_range``."""
    pts = empirical_survival(samples)
    if survival_range is not None:
        lo, hi = survival_range
        pts = [(x, s) for x, s in pts if lo <= s <= hi]
    slope = loglog_slope(pts)
    if not slope < 0:
        raise DegenerateTailError(f"non-negative log-log slope {slope!r}")
    n = len(check_samples(samples))
    return EstimateResult(alpha_hat=-slope, method="loglog", k_used=len(pts), n=n, threshold=pts[0][0])


def k_from_fraction(n, k_fraction):
    """Number of upper order statistics for a tail fraction, clipped to ``[1, n - 1]``."""
    if not 0 < k_fraction < 1:
        raise InvalidParameterError(f"k_fraction must be in (0, 1), got {k_fraction!r}")
    return min(max(int(round(k_fraction * n)), 1), n - 1)


class HillEstimator(BaseEstimator):
    """Hill tail-index estimator.

    Parameters
    ----------
    k : int, optional
        Number of upper order statistics. Takes precedence over ``k_fraction``.
    k_fraction : float, default=0.1
        Tail fraction used when ``k`` is None.
    """

    def __init__(self, k=None, k_fraction=0.1):
        self.k = k
        self.k_fraction = k_fraction

    def fit(self, X, y=None):
        x = check_samples(X, min_count=2, positive=True)
        k = self.k if self.k is not None else k_from_fraction(x.shape[0], self.k_fraction)
        self.result_ = hill_estimator(x, k)
        self.alpha_ = self.result_.alpha_hat
        self.threshold_ = self.result_.threshold
        self.n_samples_ = x.shape[0]
        return self


class ParetoMLEEstimator(BaseEstimator):
    """Pareto maximum-likelihood exponent; ``x_min=None`` uses the sample minimum."""

    def __init__(self, x_min=None):
        self.x_min = x_min

    def fit(self, X, y=None):
        x = check_samples(X, min_count=1, positive=True)
        x_min = float(x.min()) if self.x_min is None else float(self.x_min)
        self.result_ = pareto_mle(x, x_min)
        self.alpha_ = self.result_.alpha_hat
        self.x_min_ = x_min
        return self

    def score_samples(self, X):
        """Log density of each sample under the fitted law."""
        check_is_fitted(self, "alpha_")
        x = check_samples(X)
        if np.any(x < self.x_min_):
            raise DomainError(f"samples must be >= x_min={self.x_min_!r}")
        a = self.alpha_
        return math.log(a) + a * math.log(self.x_min_) - (a + 1) * np.log(x)

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))


class LogLogTailEstimator(BaseEstimator):
    """Tail exponent from the slope of the empirical survival in log-log axes.

    ``survival_range=(lo, hi)`` restricts the fit to points whose empirical
    survival lies in ``[lo, hi]``.
    """

    def __init__(self, survival_range=None):
        self.survival_range = survival_range

    def fit(self, X, y=None):
        self.result_ = loglog_estimate(X, self.survival_range)
        self.alpha_ = self.result_.alpha_hat
        self.slope_ = -self.alpha_
        return self
