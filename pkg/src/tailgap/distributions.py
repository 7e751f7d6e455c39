"""Pareto laws, discrete metadistributions over the tail exponent, Pareto
mixtures and the random variate generators used by the experiments.

A mixture shares one lower bound across its components::

    p(x) = sum_i phi_i * alpha_i * x**(-alpha_i - 1) * x_min**alpha_i

Every object here is an immutable dataclass. Evaluation functions accept a
scalar or an array for ``x`` and return the same kind.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    DomainError,
    InvalidParameterError,
    check_positive,
    check_support,
)

WEIGHT_SUM_ATOL = 1e-12
MIN_WEIGHT = 1e-15


@dataclass(frozen=True)
class ParetoLaw:
    alpha: float
    x_min: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_positive(self.alpha, "alpha"))
        object.__setattr__(self, "x_min", check_positive(self.x_min, "x_min"))


@dataclass(frozen=True)
class MetaDistribution:
    """Discrete weights ``phis`` over candidate tail exponents ``alphas``.

    Duplicate exponents are merged (weights summed) and weights below
    ``MIN_WEIGHT`` are dropped before renormalizing. Input weights must be
    strictly positive and sum to one within ``WEIGHT_SUM_ATOL``.
    """

    alphas: tuple
    phis: tuple

    def __post_init__(self):
        alphas = [float(a) for a in np.atleast_1d(self.alphas)]
        phis = [float(p) for p in np.atleast_1d(self.phis)]
        if len(alphas) == 0:
            raise InvalidParameterError("a metadistribution needs at least one state")
        if len(alphas) != len(phis):
            raise InvalidParameterError(
                f"got {len(alphas)} exponents but {len(phis)} weights"
            )
        for a in alphas:
            check_positive(a, "every alpha_i")
        for p in phis:
            if not (math.isfinite(p) and p > 0):
                raise InvalidParameterError(f"every phi_i must be > 0, got {p!r}")
        total = math.fsum(phis)
        if abs(total - 1.0) > WEIGHT_SUM_ATOL:
            raise InvalidParameterError(
                f"weights phi_i must sum to 1 (|sum - 1| <= {WEIGHT_SUM_ATOL}), got sum={total!r}"
            )

        merged = {}
        for a, p in zip(alphas, phis):
            merged[a] = merged.get(a, 0.0) + p
        kept = [(a, p) for a, p in merged.items() if p >= MIN_WEIGHT]
        total = math.fsum(p for _, p in kept)
        object.__setattr__(self, "alphas", tuple(a for a, _ in kept))
        object.__setattr__(self, "phis", tuple(p / total for _, p in kept))

    @property
    def n_states(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(zip(self.alphas, self.phis))


@dataclass(frozen=True)
class ParetoMixture:
    x_min: float
    meta: MetaDistribution

    def __post_init__(self):
        object.__setattr__(self, "x_min", check_positive(self.x_min, "x_min"))
        if not isinstance(self.meta, MetaDistribution):
            raise InvalidParameterError("meta must be a MetaDistribution")

    @classmethod
    def from_arrays(cls, alphas, phis, x_min=1.0):
        return cls(x_min, MetaDistribution(tuple(alphas), tuple(phis)))

    @classmethod
    def from_laws(cls, laws, phis):
        """Build a mixture from component laws, which must share ``x_min``."""
        laws = list(laws)
        if not laws:
            raise InvalidParameterError("a mixture needs at least one component law")
        x_mins = {law.x_min for law in laws}
        if len(x_mins) != 1:
            raise InvalidParameterError(
                f"all components must share one x_min, got {sorted(x_mins)}"
            )
        return cls.from_arrays([law.alpha for law in laws], phis, laws[0].x_min)

    @property
    def alphas(self):
        return self.meta.alphas

    @property
    def phis(self):
        return self.meta.phis

    def components(self):
        return [ParetoLaw(a, self.x_min) for a in self.meta.alphas]


@dataclass(frozen=True)
class StableParams:
    """Stable law in the S1 parameterization (Samorodnitsky & Taqqu)."""

    alpha: float
    beta: float = 0.0
    scale: float = 1.0
    loc: float = 0.0

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not 0 < alpha <= 2:
            raise InvalidParameterError(f"stability index must be in (0, 2], got {alpha!r}")
        if not -1 <= beta <= 1:
            raise InvalidParameterError(f"skewness must be in [-1, 1], got {beta!r}")
        if not math.isfinite(float(self.loc)):
            raise InvalidParameterError("loc must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "scale", check_positive(self.scale, "scale"))
        object.__setattr__(self, "loc", float(self.loc))


@dataclass(frozen=True)
class ContinuousMetaSpec:
    """A continuous prior on the exponent, to be discretized by Gauss-Legendre.

    Use the ``uniform``, ``triangular`` and ``discrete`` constructors rather
    than the raw fields.
    """

    family: str
    params: tuple = ()
    node_count: int = 64
    weights: tuple = field(default=())

    def __post_init__(self):
        if self.family not in ("uniform", "triangular", "discrete"):
            raise InvalidParameterError(f"unknown metadistribution family {self.family!r}")
        if int(self.node_count) < 1:
            raise InvalidParameterError("node_count must be >= 1")
        object.__setattr__(self, "node_count", int(self.node_count))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family == "uniform":
            a, b = self._bounds(2)
            if not 0 < a <= b:
                raise InvalidParameterError(f"uniform(a, b) needs 0 < a <= b, got {(a, b)}")
        elif self.family == "triangular":
            a, c, b = self._bounds(3)
            if not (0 < a <= c <= b):
                raise InvalidParameterError(
                    f"triangular(a, c, b) needs 0 < a <= c <= b, got {(a, c, b)}"
                )
        elif len(self.params) != len(self.weights):
            raise InvalidParameterError("discrete passthrough needs one weight per exponent")

    def _bounds(self, count):
        if len(self.params) != count or not all(math.isfinite(p) for p in self.params):
            raise InvalidParameterError(
                f"{self.family} takes {count} finite parameters, got {self.params}"
            )
        return self.params

    @classmethod
    def uniform(cls, a, b, node_count=64):
        return cls("uniform", (a, b), node_count)

    @classmethod
    def triangular(cls, a, c, b, node_count=64):
        return cls("triangular", (a, c, b), node_count)

    @classmethod
    def discrete(cls, alphas, phis):
        return cls("discrete", tuple(alphas), max(len(alphas), 1), tuple(phis))


# ---------------------------------------------------------------------------
# single Pareto law


def pareto_pdf(law, x):
    x = check_support(x, law.x_min)
    return (law.alpha / x) * (law.x_min / x) ** law.alpha


def pareto_survival(law, x):
    x = check_support(x, law.x_min)
    return (law.x_min / x) ** law.alpha


def pareto_quantile(law, u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr >= 0) & (u_arr < 1))):
        raise DomainError("u must lie in [0, 1)")
    out = law.x_min * (1.0 - u_arr) ** (-1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def pareto_isf(law, s):
    """Inverse survival function; exact where ``pareto_quantile(1 - s)`` loses digits."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(~((s_arr > 0) & (s_arr <= 1))):
        raise DomainError("survival level must lie in (0, 1]")
    out = law.x_min * s_arr ** (-1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def pareto_mean(law):
    """Mean of the law, or ``math.inf`` when ``alpha <= 1``."""
    if law.alpha <= 1:
        return math.inf
    return law.alpha * law.x_min / (law.alpha - 1.0)


# ---------------------------------------------------------------------------
# mixtures


def _weighted_sum(mix, func):
    # One fixed left-to-right order so that closed forms sharing this helper agree bit-for-bit.
    total = 0.0
    for law, phi in zip(mix.components(), mix.phis):
        total = total + phi * func(law)
    return total


def mixture_pdf(mix, x):
    x = check_support(x, mix.x_min)
    return _weighted_sum(mix, lambda law: pareto_pdf(law, x))


def mixture_survival(mix, x):
    x = check_support(x, mix.x_min)
    return _weighted_sum(mix, lambda law: pareto_survival(law, x))


def alpha_bar(mix):
    """Weighted mean exponent, the naive plug-in parameter."""
    return math.fsum(a * p for a, p in mix.meta)


def alpha_star(mix):
    """Smallest exponent in the support of the metadistribution."""
    return min(mix.alphas)


def mean_param_law(mix):
    return ParetoLaw(alpha_bar(mix), mix.x_min)


def lowest_exponent_law(mix):
    return ParetoLaw(alpha_star(mix), mix.x_min)


# ---------------------------------------------------------------------------
# sampling


def sample_pareto(law, rng, count):
    """Inverse-transform draws; consumes exactly ``count`` uniforms from ``rng``."""
    count = int(count)
    if count == 0:
        return np.empty(0)
    return pareto_quantile(law, rng.random(count))


def sample_mixture(mix, rng, count, return_labels=False):
    """Categorical draw of the component, then inverse transform within it.

    ``return_labels=True`` also returns the component index of each draw
    (indices follow ``mix.alphas``).
    """
    count = int(count)
    if count == 0:
        out = np.empty(0)
        return (out, np.empty(0, dtype=np.intp)) if return_labels else out
    cdf = np.cumsum(mix.phis)
    cdf[-1] = 1.0
    labels = np.searchsorted(cdf, rng.random(count), side="right")
    u = rng.random(count)
    alphas = np.asarray(mix.alphas)[labels]
    out = mix.x_min * (1.0 - u) ** (-1.0 / alphas)
    return (out, labels) if return_labels else out


def sample_stable(params, rng, count):
    """Chambers-Mallows-Stuck generator for the S1 parameterization.

    With ``alpha = 2`` the output is Gaussian with variance ``2 * scale**2``.
    """
    count = int(count)
    if count == 0:
        return np.empty(0)
    alpha, beta, scale, loc = params.alpha, params.beta, params.scale, params.loc
    v = rng.uniform(-np.pi / 2, np.pi / 2, count)
    w = rng.standard_exponential(count)

    if alpha == 1.0:
        half_pi_bv = np.pi / 2 + beta * v
        x = (2 / np.pi) * (
            half_pi_bv * np.tan(v) - beta * np.log((np.pi / 2) * w * np.cos(v) / half_pi_bv)
        )
        return scale * x + (2 / np.pi) * beta * scale * math.log(scale) + loc

    zeta = beta * math.tan(np.pi * alpha / 2)
    shift = math.atan(zeta) / alpha
    factor = (1 + zeta**2) ** (1 / (2 * alpha))
    x = (
        factor
        * np.sin(alpha * (v + shift))
        / np.cos(v) ** (1 / alpha)
        * (np.cos(v - alpha * (v + shift)) / w) ** ((1 - alpha) / alpha)
    )
    return scale * x + loc


# ---------------------------------------------------------------------------
# continuous metadistribution -> discrete states


def _gauss_legendre(lo, hi, n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def discretize_meta(spec):
    """Turn a continuous prior on alpha into ``MetaDistribution`` states.

    Uniform priors use one Gauss-Legendre panel; triangular priors use one
    panel per linear piece so that moments up to order ``2n - 2`` are exact.
    """
    if spec.family == "discrete":
        return MetaDistribution(spec.params, spec.weights)

    n = spec.node_count
    if spec.family == "uniform":
        a, b = spec.params
        if a == b or n == 1:
            return MetaDistribution((0.5 * (a + b),), (1.0,))
        nodes, weights = _gauss_legendre(a, b, n)
        density = np.full(n, 1.0 / (b - a))
    else:
        a, c, b = spec.params
        if a == b or n == 1:
            return MetaDistribution(((a + b + c) / 3.0,), (1.0,))
        panels = []
        if c > a and c < b:
            n_left = (n + 1) // 2
            panels = [(a, c, n_left), (c, b, n - n_left)]
        else:
            panels = [(a, b, n)]
        nodes_list, weights_list = [], []
        for lo, hi, m in panels:
            if m == 0:
                continue
            nd, wt = _gauss_legendre(lo, hi, m)
            nodes_list.append(nd)
            weights_list.append(wt)
        nodes = np.concatenate(nodes_list)
        weights = np.concatenate(weights_list)
        density = np.where(
            nodes <= c,
            2 * (nodes - a) / ((b - a) * (c - a)) if c > a else 0.0,
            2 * (b - nodes) / ((b - a) * (b - c)) if b > c else 0.0,
        )

    mass = weights * density
    keep = mass >= MIN_WEIGHT
    mass = mass[keep]
    return MetaDistribution(tuple(nodes[keep]), tuple(mass / math.fsum(mass)))
