"""Seeded Monte Carlo studies of tail-index estimation bias, plus the
three-curve log-log dataset (plug-in law, mixture, lowest-exponent law).

Every trial draws from its own stream keyed by ``(base_seed, trial_index)``
so a study is a pure function of its config, whatever order or thread the
trials run in. Floats are written with 17 significant digits.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import InvalidParameterError, check_increasing_grid
from .distributions import (
    ParetoMixture,
    StableParams,
    alpha_bar,
    alpha_star,
    lowest_exponent_law,
    mean_param_law,
    mixture_pdf,
    pareto_pdf,
    sample_mixture,
    sample_stable,
)
from .estimators import hill_estimator, k_from_fraction, pareto_mle

SEED_MAX = 2**64 - 1
FIGURE1_COLUMNS = ("x", "density_mean_param", "density_mixture", "density_alpha_star")
TRIAL_COLUMNS = ("trial", "method", "k_fraction", "k_used", "n", "alpha_hat")
SUMMARY_QUANTILES = (5, 25, 50, 75, 95)
STREAM_DESCRIPTION = "numpy PCG64 seeded by SeedSequence([base_seed, trial_index])"


# ---------------------------------------------------------------------------
# serialization


def format_float(value):
    return format(float(value), ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        return format_float(obj)
    return json.dumps(obj)


def dumps_json(obj, indent=2):
    """JSON text with every float at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def format_csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if v is None:
                cells.append("")
            elif isinstance(v, (float, np.floating)):
                cells.append(format_float(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# configuration


def _model_to_dict(model):
    if isinstance(model, ParetoMixture):
        return {"kind": "mixture", "alphas": list(model.alphas), "phis": list(model.phis), "x_min": model.x_min}
    return {"kind": "stable", "alpha": model.alpha, "beta": model.beta, "scale": model.scale, "loc": model.loc}


def model_from_dict(doc):
    kind = doc.get("kind", "mixture")
    if kind == "mixture":
        return ParetoMixture.from_arrays(doc["alphas"], doc["phis"], doc.get("x_min", 1.0))
    if kind == "stable":
        return StableParams(doc["alpha"], doc.get("beta", 0.0), doc.get("scale", 1.0), doc.get("loc", 0.0))
    raise InvalidParameterError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class StudyConfig:
    """Parameters of a Monte Carlo study.

    ``model`` is a ``ParetoMixture`` (bias study) or ``StableParams`` (stable
    study). JSON form::

        {"model": {"kind": "mixture", "alphas": [1.5, 3], "phis": [0.5, 0.5], "x_min": 1},
         "n_samples": 100000, "n_trials": 200, "base_seed": 1,
         "k_fractions": [0.1, 0.01], "output_path": null}
    """

    model: object
    n_samples: int
    n_trials: int
    base_seed: int = 0
    k_fractions: tuple = (0.1, 0.01)
    output_path: str = None

    def __post_init__(self):
        if not isinstance(self.model, (ParetoMixture, StableParams)):
            raise InvalidParameterError("model must be a ParetoMixture or StableParams")
        if int(self.n_samples) < 100:
            raise InvalidParameterError(f"n_samples must be >= 100, got {self.n_samples}")
        if int(self.n_trials) < 1:
            raise InvalidParameterError(f"n_trials must be >= 1, got {self.n_trials}")
        if not 0 <= int(self.base_seed) <= SEED_MAX:
            raise InvalidParameterError("base_seed must be an unsigned 64-bit integer")
        fractions = tuple(float(f) for f in self.k_fractions)
        if not fractions or any(not 0 < f < 1 for f in fractions):
            raise InvalidParameterError(f"every k_fraction must be in (0, 1), got {fractions}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "n_trials", int(self.n_trials))
        object.__setattr__(self, "base_seed", int(self.base_seed))
        object.__setattr__(self, "k_fractions", fractions)

    def to_dict(self):
        return {
            "model": _model_to_dict(self.model),
            "n_samples": self.n_samples,
            "n_trials": self.n_trials,
            "base_seed": self.base_seed,
            "k_fractions": list(self.k_fractions),
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(
                model=model_from_dict(doc["model"]),
                n_samples=doc["n_samples"],
                n_trials=doc["n_trials"],
                base_seed=doc.get("base_seed", 0),
                k_fractions=tuple(doc.get("k_fractions", (0.1, 0.01))),
                output_path=doc.get("output_path"),
            )
        except KeyError as exc:
            raise InvalidParameterError(f"study config is missing field {exc.args[0]!r}") from None

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class StudyReport:
    kind: str
    config: dict
    trials: list
    summary: dict
    reference: dict
    seed_provenance: dict = field(default_factory=dict)

    def median(self, label):
        """Median alpha-hat for ``"mle"`` or a Hill tail fraction such as ``0.1``."""
        return self.summary[_label(label)]["median"]

    def to_dict(self):
        return {
            "kind": self.kind,
            "config": self.config,
            "reference": self.reference,
            "seed_provenance": self.seed_provenance,
            "summary": self.summary,
            "trials": self.trials,
        }

    def to_json(self):
        return dumps_json(self.to_dict())

    def trial_rows(self):
        rows = []
        for trial in self.trials:
            for est in trial["estimates"]:
                rows.append(
                    (trial["trial"], est["method"], est["k_fraction"], est["k_used"], est["n"], est["alpha_hat"])
                )
        return rows

    def to_csv(self):
        return format_csv(TRIAL_COLUMNS, self.trial_rows())

    def write(self, path):
        """Write JSON, or the per-trial CSV when ``path`` ends in ``.csv``."""
        write_text(path, self.to_csv() if str(path).endswith(".csv") else self.to_json())


def _label(key):
    if key == "mle":
        return "mle"
    return f"hill@{format(float(key), 'g')}"


# ---------------------------------------------------------------------------
# seeding and trial execution


def seed_stream(base_seed, trial_index):
    """Independent generator for one trial, keyed by ``(base_seed, trial_index)``."""
    if int(trial_index) < 0:
        raise InvalidParameterError("trial_index must be >= 0")
    if not 0 <= int(base_seed) <= SEED_MAX:
        raise InvalidParameterError("base_seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(base_seed), int(trial_index)])))


def _run_trials(trial_fn, n_trials, schedule=None, n_jobs=1):
    order = list(range(n_trials)) if schedule is None else [int(i) for i in schedule]
    if sorted(order) != list(range(n_trials)):
        raise InvalidParameterError("schedule must be a permutation of the trial indices")
    if n_jobs == 1:
        results = {i: trial_fn(i) for i in order}
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = dict(zip(order, pool.map(trial_fn, order)))
    return [results[i] for i in range(n_trials)]


def _hill_sweep(sorted_abs, k_fractions):
    n = sorted_abs.shape[0]
    out = []
    for f in k_fractions:
        res = hill_estimator(sorted_abs, k_from_fraction(n, f))
        out.append({"method": "hill", "k_fraction": f, "k_used": res.k_used, "n": n, "alpha_hat": res.alpha_hat})
    return out


def _summarize(trials):
    by_label = {}
    for trial in trials:
        for est in trial["estimates"]:
            key = "mle" if est["method"] == "mle" else _label(est["k_fraction"])
            by_label.setdefault(key, []).append(est["alpha_hat"])
    summary = {}
    for key, values in by_label.items():
        q = np.percentile(np.asarray(values), SUMMARY_QUANTILES, method="inverted_cdf")
        summary[key] = {
            "q05": float(q[0]),
            "q25": float(q[1]),
            "median": float(q[2]),
            "q75": float(q[3]),
            "q95": float(q[4]),
            "count": len(values),
        }
    return summary


def _provenance(config):
    return {"base_seed": config.base_seed, "stream": STREAM_DESCRIPTION}


# ---------------------------------------------------------------------------
# studies


def study_mixture_bias(config, schedule=None, n_jobs=1):
    """Hill at every tail fraction plus the Pareto MLE, on mixture samples.

    ``schedule`` permutes the order in which trials execute; it never changes
    the report.
    """
    mix = config.model
    if not isinstance(mix, ParetoMixture):
        raise InvalidParameterError("study_mixture_bias needs a ParetoMixture model")

    def trial(i):
        x = np.sort(sample_mixture(mix, seed_stream(config.base_seed, i), config.n_samples), kind="stable")
        estimates = _hill_sweep(x, config.k_fractions)
        mle = pareto_mle(x, mix.x_min)
        estimates.append({"method": "mle", "k_fraction": None, "k_used": mle.k_used, "n": mle.n, "alpha_hat": mle.alpha_hat})
        return {"trial": i, "estimates": estimates}

    trials = _run_trials(trial, config.n_trials, schedule, n_jobs)
    return StudyReport(
        kind="mixture_bias",
        config=config.to_dict(),
        trials=trials,
        summary=_summarize(trials),
        reference={"alpha_star": alpha_star(mix), "alpha_bar": alpha_bar(mix)},
        seed_provenance=_provenance(config),
    )


def study_stable(config, schedule=None, n_jobs=1):
    """Hill estimates on the absolute values of symmetric stable variates."""
    params = config.model
    if not isinstance(params, StableParams):
        raise InvalidParameterError("study_stable needs StableParams")
    if params.alpha >= 2:
        raise InvalidParameterError("stability index 2 is Gaussian and has no power tail")
    if params.beta != 0:
        raise InvalidParameterError("study_stable uses symmetric variates (beta = 0)")

    def trial(i):
        x = np.abs(sample_stable(params, seed_stream(config.base_seed, i), config.n_samples))
        return {"trial": i, "estimates": _hill_sweep(np.sort(x, kind="stable"), config.k_fractions)}

    trials = _run_trials(trial, config.n_trials, schedule, n_jobs)
    return StudyReport(
        kind="stable",
        config=config.to_dict(),
        trials=trials,
        summary=_summarize(trials),
        reference={"alpha_star": params.alpha, "alpha_bar": params.alpha},
        seed_provenance=_provenance(config),
    )


# ---------------------------------------------------------------------------
# figure 1 dataset


def emit_figure1(mix, x_grid):
    """Rows ``(x, pdf(x | alpha_bar), mixture_pdf(x), pdf(x | alpha_star))``."""
    grid = check_increasing_grid(x_grid, mix.x_min, "x_grid")
    return np.column_stack(
        [
            grid,
            pareto_pdf(mean_param_law(mix), grid),
            mixture_pdf(mix, grid),
            pareto_pdf(lowest_exponent_law(mix), grid),
        ]
    )


def figure1_csv(rows):
    return format_csv(FIGURE1_COLUMNS, [tuple(float(v) for v in row) for row in rows])
