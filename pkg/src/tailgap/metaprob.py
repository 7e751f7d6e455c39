"""Bias from plugging the mean exponent into a Pareto law instead of
averaging the law over the exponent's metadistribution.

Density level: ``mixture_pdf(x) - pdf(x | alpha_bar)``.
Payoff level: ``sum_i phi_i E[f(X) | alpha_i] - E[f(X) | alpha_bar]``.

Far in the tail the mixture behaves like ``K * x**(-alpha_star - 1)``, so
the lowest exponent dominates whatever its weight.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ._validation import DomainError, InvalidParameterError, check_increasing_grid, check_support, log_grid
from .distributions import (
    _weighted_sum,
    alpha_star,
    lowest_exponent_law,
    mean_param_law,
    mixture_pdf,
    pareto_mean,
    pareto_pdf,
    pareto_survival,
)

PAYOFF_FAMILIES = ("identity", "power", "tail_indicator", "clipped")


@dataclass(frozen=True)
class PayoffSpec:
    """The payoff ``f(X)``; ``param`` is the power, threshold or cap."""

    family: str
    param: float = None

    def __post_init__(self):
        if self.family not in PAYOFF_FAMILIES:
            raise InvalidParameterError(f"unknown payoff family {self.family!r}")
        if self.family == "identity":
            object.__setattr__(self, "param", None)
            return
        if self.param is None or not math.isfinite(float(self.param)):
            raise InvalidParameterError(f"{self.family} payoff needs a finite parameter")
        object.__setattr__(self, "param", float(self.param))
        if self.param <= 0:
            raise InvalidParameterError(f"{self.family} parameter must be positive")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def power(cls, p):
        return cls("power", p)

    @classmethod
    def tail_indicator(cls, t):
        return cls("tail_indicator", t)

    @classmethod
    def clipped(cls, cap):
        return cls("clipped", cap)


@dataclass(frozen=True)
class GapReport:
    at_x: float
    mixture_density: float
    mean_param_density: float
    gap: float


@dataclass(frozen=True)
class TailConstant:
    k_value: float
    alpha_star: float
    achieving_states: tuple


def clipped_mean(law, cap):
    """``E[min(X, cap)]`` for a single Pareto law.

    Written as ``x_min * (1 + L * expm1((1 - alpha) L) / ((1 - alpha) L))``
    with ``L = ln(cap / x_min)``, which equals
    ``(alpha x_min - cap (x_min/cap)**alpha) / (alpha - 1)`` and stays
    accurate next to ``alpha = 1``.
    """
    if cap < law.x_min:
        raise DomainError(f"cap must be >= x_min={law.x_min!r}")
    log_ratio = math.log(cap / law.x_min)
    if law.alpha == 1.0:
        return law.x_min * (1.0 + log_ratio)
    t = (1.0 - law.alpha) * log_ratio
    if t == 0.0:
        return law.x_min * (1.0 + log_ratio)
    return law.x_min * (1.0 + log_ratio * math.expm1(t) / t)


def payoff_expectation(law, payoff):
    """``E[f(X)]`` under one Pareto law; ``math.inf`` when the moment diverges."""
    if payoff.family == "identity":
        return pareto_mean(law)
    if payoff.family == "power":
        p = payoff.param
        if p >= law.alpha:
            return math.inf
        return law.alpha * law.x_min**p / (law.alpha - p)
    if payoff.family == "tail_indicator":
        return pareto_survival(law, _payoff_level(law, payoff))
    return clipped_mean(law, _payoff_level(law, payoff))


def _payoff_level(law, payoff):
    if payoff.param < law.x_min:
        raise DomainError(f"{payoff.family} level must be >= x_min={law.x_min!r}")
    return payoff.param


def functional_bias(mix, payoff):
    """Payoff-level bias of the plug-in law.

    Returns ``math.inf`` when a component moment diverges and the mixture has
    more than one state. A single state carries no parameter uncertainty and
    returns 0 even if its moment is infinite.
    """
    averaged = _weighted_sum(mix, lambda law: payoff_expectation(law, payoff))
    plug_in = payoff_expectation(mean_param_law(mix), payoff)
    if math.isinf(averaged) or math.isinf(plug_in):
        return 0.0 if mix.meta.n_states == 1 else math.inf
    return averaged - plug_in


def density_gap(mix, x):
    x = check_support(x, mix.x_min)
    mixed = mixture_pdf(mix, x)
    plug_in = pareto_pdf(mean_param_law(mix), x)
    return GapReport(at_x=x, mixture_density=mixed, mean_param_density=plug_in, gap=mixed - plug_in)


def asymptotic_gap(mix, x):
    """``pdf(x | alpha_star) - pdf(x | alpha_bar)``."""
    x = check_support(x, mix.x_min)
    return pareto_pdf(lowest_exponent_law(mix), x) - pareto_pdf(mean_param_law(mix), x)


def _tail_terms(mix):
    return [a * mix.x_min**a * p for a, p in mix.meta]


def tail_constant(mix):
    lowest = alpha_star(mix)
    terms = _tail_terms(mix)
    achieving = tuple(i for i, a in enumerate(mix.alphas) if a == lowest)
    k = 0.0
    for i in achieving:
        k = k + terms[i]
    return TailConstant(k_value=k, alpha_star=lowest, achieving_states=achieving)


def asymptotic_density(mix, x):
    """The tail equivalent ``K * x**(-alpha_star - 1)`` of the mixture density."""
    x = check_support(x, mix.x_min)
    tc = tail_constant(mix)
    return tc.k_value * x ** (-tc.alpha_star - 1.0)


def limit_convergence(mix, x_grid):
    """Pairs ``(x, x**(alpha_star + 1) * mixture_pdf(x))`` along ``x_grid``.

    The power of ``x`` is folded into each term analytically, so the minimal
    state contributes exactly its share of ``K`` and large ``x`` cannot
    overflow.
    """
    grid = check_increasing_grid(x_grid, mix.x_min, "x_grid")
    lowest = alpha_star(mix)
    scaled = np.zeros_like(grid)
    for a, term in zip(mix.alphas, _tail_terms(mix)):
        scaled = scaled + term * grid ** (lowest - a)
    return [(float(x), float(s)) for x, s in zip(grid, scaled)]


def clipping_curve(mix, caps):
    """Bias of the clipped payoff ``min(X, cap)`` for each cap."""
    caps = check_increasing_grid(caps, mix.x_min, "caps")
    return [(float(c), functional_bias(mix, PayoffSpec.clipped(c))) for c in caps]


def gap_crossover(mix, x_hi=None, points=400):
    """Abscissa beyond which the density gap stays positive on a log grid.

    Locates the last sign change of the gap on ``points`` log-spaced nodes in
    ``[x_min, x_hi]`` and bisects it in log-x. Returns ``x_min`` when the gap
    is positive on the whole grid, and ``None`` for a single-state mixture or
    when the gap is still non-positive at ``x_hi``.
    """
    if mix.meta.n_states == 1:
        return None
    x_hi = 1e8 * mix.x_min if x_hi is None else float(x_hi)
    grid = log_grid(mix.x_min, x_hi, points)
    gaps = density_gap(mix, grid).gap
    non_positive = np.flatnonzero(gaps <= 0)
    if non_positive.size == 0:
        return mix.x_min
    last = non_positive[-1]
    if last == grid.size - 1:
        return None

    def gap_at(log_x):
        return density_gap(mix, max(math.exp(log_x), mix.x_min)).gap

    lo, hi = math.log(grid[last]), math.log(grid[last + 1])
    if gap_at(lo) == 0.0:
        return float(grid[last])
    return math.exp(optimize.bisect(gap_at, lo, hi, xtol=1e-12))
