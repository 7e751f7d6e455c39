"""``tailgap`` command line.

Exit codes: 0 success, 1 usage error, 2 domain or validation error.
Tables go to standard output (or ``--out``) as CSV with 17 significant digits.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import distributions as dist
from . import estimators as est
from . import experiments as exp
from . import metaprob as mp
from ._validation import TailgapError, log_grid

MAX_INLINE_STATES = 16
NORMALIZE_ATOL = 1e-6
SEED_ENV = "TAILGAP_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


# ---------------------------------------------------------------------------
# argument helpers


def _add_mixture_args(p):
    p.add_argument("--alphas", type=_float_list, help="comma-separated tail exponents")
    p.add_argument("--phis", type=_float_list, help="comma-separated weights, one per exponent")
    p.add_argument("--xmin", type=float, help="common lower bound (default 1)")
    p.add_argument("--config", help="JSON file holding a mixture or a study config")


def _add_output(p):
    p.add_argument("--out", help="write the table here instead of standard output")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise TailgapError(f"cannot read config {path!r}: {exc}") from None


def _normalized_weights(phis):
    total = math.fsum(phis)
    if total != 1.0 and abs(total - 1.0) <= NORMALIZE_ATOL:
        print(f"note: weights summed to {total!r}; normalized to 1", file=sys.stderr)
        return [p / total for p in phis]
    return phis


def _mixture(args):
    inline = args.alphas is not None or args.phis is not None or args.xmin is not None
    if args.config and inline:
        raise UsageError("--config cannot be combined with --alphas/--phis/--xmin")
    if args.config:
        doc = _load_json(args.config)
        doc = doc.get("model", doc)
        if doc.get("kind", "mixture") != "mixture":
            raise TailgapError("config does not describe a Pareto mixture")
        return dist.ParetoMixture.from_arrays(doc["alphas"], _normalized_weights(doc["phis"]), doc.get("x_min", 1.0))
    if args.alphas is None or args.phis is None:
        raise UsageError("a mixture needs --alphas and --phis (or --config)")
    if len(args.alphas) > MAX_INLINE_STATES:
        raise UsageError(f"inline mixtures take at most {MAX_INLINE_STATES} states; use --config")
    if len(args.alphas) != len(args.phis):
        raise UsageError("--alphas and --phis need the same number of entries")
    x_min = 1.0 if args.xmin is None else args.xmin
    return dist.ParetoMixture.from_arrays(args.alphas, _normalized_weights(args.phis), x_min)


def _seed(args, fallback=None):
    if getattr(args, "seed", None) is not None:
        return args.seed
    if fallback is not None:
        return fallback
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _emit(args, text):
    if getattr(args, "out", None):
        exp.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _grid(args, mix, default_points):
    if args.x is not None:
        return np.asarray(args.x, dtype=float)
    x_max = args.xmax if args.xmax is not None else 1e6 * mix.x_min
    return log_grid(mix.x_min, x_max, args.points or default_points)


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args):
    mix = _mixture(args)
    x = np.asarray(args.x, dtype=float)
    rows = zip(x, dist.mixture_pdf(mix, x), dist.mixture_survival(mix, x))
    _emit(args, exp.format_csv(("x", "density", "survival"), rows))


def cmd_gap(args):
    mix = _mixture(args)
    x = np.asarray(args.x, dtype=float)
    rep = mp.density_gap(mix, x)
    rows = zip(x, rep.mixture_density, rep.mean_param_density, rep.gap, mp.asymptotic_gap(mix, x))
    _emit(args, exp.format_csv(("x", "mixture_density", "mean_param_density", "gap", "asymptotic_gap"), rows))


def cmd_bias(args):
    mix = _mixture(args)
    if args.payoff != "identity" and args.param is None:
        raise UsageError(f"--payoff {args.payoff} needs --param")
    family = "tail_indicator" if args.payoff == "tail" else args.payoff
    payoff = mp.PayoffSpec(family, None if family == "identity" else args.param)
    value = mp.functional_bias(mix, payoff)
    _emit(args, exp.format_csv(("payoff", "param", "bias"), [(family, payoff.param, value)]))


def cmd_kconst(args):
    mix = _mixture(args)
    tc = mp.tail_constant(mix)
    rows = [
        (x, s, tc.k_value, tc.alpha_star, s - tc.k_value)
        for x, s in mp.limit_convergence(mix, _grid(args, mix, 13))
    ]
    _emit(args, exp.format_csv(("x", "scaled", "k_value", "alpha_star", "residual"), rows))


def cmd_clip(args):
    mix = _mixture(args)
    _emit(args, exp.format_csv(("cap", "bias"), mp.clipping_curve(mix, args.caps)))


def cmd_sample(args):
    rng = exp.seed_stream(_seed(args), 0)
    if args.model == "stable":
        if args.stable_alpha is None:
            raise UsageError("--model stable needs --stable-alpha")
        params = dist.StableParams(args.stable_alpha, args.beta, args.scale, args.loc)
        rows = [(float(v),) for v in dist.sample_stable(params, rng, args.n)]
        _emit(args, exp.format_csv(("x",), rows))
        return
    mix = _mixture(args)
    x, labels = dist.sample_mixture(mix, rng, args.n, return_labels=True)
    _emit(args, exp.format_csv(("x", "component"), zip(x.tolist(), labels.tolist())))


def _read_samples(path):
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            col = header.index("x") if "x" in header else 0
            data = np.loadtxt(fh, delimiter=",", usecols=col, ndmin=1)
    except (OSError, ValueError) as exc:
        raise TailgapError(f"cannot read samples from {path!r}: {exc}") from None
    return data


def cmd_estimate(args):
    x = _read_samples(args.input)
    if args.method == "hill":
        k = args.k if args.k is not None else est.k_from_fraction(x.shape[0], args.k_fraction)
        res = est.hill_estimator(x, k)
    elif args.method == "mle":
        res = est.pareto_mle(x, args.xmin if args.xmin is not None else float(np.min(x)))
    else:
        window = None
        if args.smin is not None or args.smax is not None:
            window = (args.smin or 0.0, args.smax if args.smax is not None else 1.0)
        res = est.loglog_estimate(x, window)
    _emit(args, exp.format_csv(("method", "alpha_hat", "k_used", "n", "threshold"),
                               [(res.method, res.alpha_hat, res.k_used, res.n, res.threshold)]))


def _study_config(args, model, doc):
    doc = doc or {}
    n = args.n if args.n is not None else doc.get("n_samples")
    trials = args.trials if args.trials is not None else doc.get("n_trials")
    fractions = args.k_fractions if args.k_fractions is not None else doc.get("k_fractions", [0.1, 0.01])
    if n is None or trials is None:
        raise UsageError("a study needs --n and --trials (or a config that sets them)")
    return exp.StudyConfig(
        model=model,
        n_samples=n,
        n_trials=trials,
        base_seed=_seed(args, doc.get("base_seed")),
        k_fractions=tuple(fractions),
        output_path=args.out or doc.get("output_path"),
    )


def _finish_study(args, report):
    path = report.config["output_path"]
    if path:
        report.write(path)
    if args.csv:
        exp.write_text(args.csv, report.to_csv())
    rows = [(label, s["median"], s["q05"], s["q25"], s["q75"], s["q95"]) for label, s in report.summary.items()]
    sys.stdout.write(exp.format_csv(("estimator", "median", "q05", "q25", "q75", "q95"), rows))


def cmd_study_bias(args):
    doc = _load_json(args.config) if args.config else None
    if doc is not None and "n_samples" in doc:
        if args.alphas is not None or args.phis is not None or args.xmin is not None:
            raise UsageError("--config cannot be combined with --alphas/--phis/--xmin")
        mix = exp.model_from_dict(doc["model"])
        if not isinstance(mix, dist.ParetoMixture):
            raise TailgapError("study-bias needs a mixture model")
    else:
        mix, doc = _mixture(args), None
    report = exp.study_mixture_bias(_study_config(args, mix, doc), n_jobs=args.jobs)
    _finish_study(args, report)


def cmd_study_stable(args):
    doc = _load_json(args.config) if args.config else None
    if doc is not None:
        if args.alpha is not None:
            raise UsageError("--config cannot be combined with --alpha")
        params = exp.model_from_dict(doc["model"])
        if not isinstance(params, dist.StableParams):
            raise TailgapError("study-stable needs a stable model")
    else:
        if args.alpha is None:
            raise UsageError("study-stable needs --alpha (or --config)")
        params = dist.StableParams(args.alpha, 0.0, args.scale, 0.0)
    report = exp.study_stable(_study_config(args, params, doc), n_jobs=args.jobs)
    _finish_study(args, report)


def cmd_figure1(args):
    mix = _mixture(args)
    rows = exp.emit_figure1(mix, _grid(args, mix, 60))
    _emit(args, exp.figure1_csv(rows))


# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="tailgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="mixture density and survival at points")
    _add_mixture_args(p)
    p.add_argument("--x", type=_float_list, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gap", help="density gap and asymptotic gap")
    _add_mixture_args(p)
    p.add_argument("--x", type=_float_list, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("bias", help="payoff-level bias")
    _add_mixture_args(p)
    p.add_argument("--payoff", choices=("identity", "power", "tail", "clipped"), default="identity")
    p.add_argument("--param", type=float, help="power p, threshold t or cap")
    _add_output(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("kconst", help="tail constant and limit convergence table")
    _add_mixture_args(p)
    p.add_argument("--x", type=_float_list)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_kconst)

    p = sub.add_parser("clip", help="bias of clipped payoffs")
    _add_mixture_args(p)
    p.add_argument("--caps", type=_float_list, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_clip)

    p = sub.add_parser("sample", help="draw variates to CSV")
    _add_mixture_args(p)
    p.add_argument("--model", choices=("mixture", "stable"), default="mixture")
    p.add_argument("--stable-alpha", type=float)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--loc", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="tail index from a CSV of samples")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=est.METHODS, default="hill")
    p.add_argument("--k", type=int)
    p.add_argument("--k-fraction", type=float, default=0.1)
    p.add_argument("--xmin", type=float)
    p.add_argument("--smin", type=float)
    p.add_argument("--smax", type=float)
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    for name, func in (("study-bias", cmd_study_bias), ("study-stable", cmd_study_stable)):
        p = sub.add_parser(name, help="Monte Carlo estimator study")
        if name == "study-bias":
            _add_mixture_args(p)
        else:
            p.add_argument("--config")
            p.add_argument("--alpha", type=float)
            p.add_argument("--scale", type=float, default=1.0)
        p.add_argument("--n", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--k-fractions", type=_float_list)
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", help="JSON report path")
        p.add_argument("--csv", help="per-trial CSV path")
        p.set_defaults(func=func)

    p = sub.add_parser("figure1", help="three-curve log-log dataset")
    _add_mixture_args(p)
    p.add_argument("--x", type=_float_list)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int)
    _add_output(p)
    p.set_defaults(func=cmd_figure1)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (TailgapError, KeyError) as exc:
        reason = f"missing field {exc.args[0]!r}" if isinstance(exc, KeyError) else str(exc)
        print(f"error: {reason}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
