"""
Batch command-line front end.

    python -m tailbias <command> [flags] [--config cfg.json] [--format json|csv] [--out PATH]

Flags override values from ``--config`` (a JSON object keyed by flag name,
dashes or underscores), which override the built-in defaults.  List-valued
flags are comma-separated.  Exit codes: 0 success, 2 domain or usage error,
3 I/O error, 4 numerical failure.
"""
import argparse
import json
import sys

import numpy as np

from .bounded import BoundedLaw
from .errors import DomainError, InfiniteMomentError, NumericalError
from .numerics import RandomStream
from .powerlaw import ParetoLaw
from .results import INFINITE, ResultTable, emit, make_meta
from .stable_sums import CF_GRID, StableParams, convergence_experiment, stable_cf
from .stochastic_alpha import (DiscreteAlphaMix, GammaAlpha, LognormalAlpha, MixedLaw,
                               mixed_density, mixed_density_series, mixed_mean,
                               mixed_shortfall, reference_mean, sample_mixed)

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

STOCHASTIC = {"sample", "sum-converge"}

_FLOAT, _INT, _FLOATS, _INTS, _STR, _BOOL = "float", "int", "floats", "ints", "str", "bool"

_LAW_FLAGS = {
    "family": (_STR, None),
    "scale": (_FLOAT, 1.0),
    "alpha": (_FLOAT, None),
    "alpha0": (_FLOAT, None),
    "sigma": (_FLOAT, None),
    "b": (_FLOAT, 1.0),
    "s": (_FLOAT, None),
    "weights": (_FLOATS, None),
    "alphas": (_FLOATS, None),
}

COMMANDS = {
    "moments": {"alpha": (_FLOAT, None), "scale": (_FLOAT, 1.0), "p": (_INTS, [1])},
    "mixed-mean": dict(_LAW_FLAGS),
    "shortfall": dict(_LAW_FLAGS, K=(_FLOATS, None)),
    "sample": dict(_LAW_FLAGS, n=(_INT, None), seed=(_INT, None), stream=(_INT, 0)),
    "sum-converge": dict(_LAW_FLAGS, n=(_INTS, [1, 10, 100]),
                         m=(_INT, 100_000), seed=(_INT, None), stream=(_INT, 0),
                         mirrored=(_BOOL, False)),
    "stable-cf": {"alpha": (_FLOAT, None), "beta": (_FLOAT, 1.0), "scale": (_FLOAT, 1.0),
                  "t": (_FLOATS, list(CF_GRID))},
    "bounded": {"L": (_FLOAT, None), "H": (_FLOAT, None), "sigma": (_FLOAT, None),
                "alpha": (_FLOATS, None), "h": (_FLOAT, None),
                "mix_alphas": (_FLOATS, None), "mix_weights": (_FLOATS, None)},
    "density": dict(_LAW_FLAGS, y=(_FLOATS, None), k=(_INT, None)),
}

_HELP = {
    "moments": "Pareto moments E(X^p) and their convexity in alpha",
    "mixed-mean": "mean under a stochastic tail exponent versus the fixed-alpha mean",
    "shortfall": "conditional mean E(X | X > K) on a grid of thresholds",
    "sample": "draws from a Pareto or stochastic-alpha law",
    "sum-converge": "bias of n-averages under stochastic alpha (Monte Carlo)",
    "stable-cf": "asymmetric stable characteristic function on a t-grid",
    "bounded": "mean and alpha-convexity of the capped power law",
    "density": "density of a Pareto or stochastic-alpha law on a y-grid",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _convert(kind, value, name):
    if value is None:
        return None
    try:
        if kind == _FLOAT:
            return float(value)
        if kind == _INT:
            return int(value)
        if kind == _STR:
            return str(value)
        if kind == _BOOL:
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes")
            return bool(value)
        items = value.split(",") if isinstance(value, str) else list(value)
        conv = float if kind == _FLOATS else int
        return [conv(v) for v in items if str(v).strip() != ""]
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for --{name.replace('_', '-')}: {value!r}") from None


def build_parser():
    parser = _Parser(prog="tailbias", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for cmd, flags in COMMANDS.items():
        p = sub.add_parser(cmd, help=_HELP[cmd], description=_HELP[cmd])
        for name, (kind, default) in flags.items():
            opt = "--" + name.replace("_", "-")
            hint = f" (default {default})" if default not in (None, False) else ""
            if kind == _BOOL:
                p.add_argument(opt, dest=name, action="store_true", default=argparse.SUPPRESS,
                               help=f"flag{hint}")
            else:
                p.add_argument(opt, dest=name, default=argparse.SUPPRESS, metavar=kind.upper(),
                               help=f"{kind}{hint}")
        p.add_argument("--config", default=None, help="JSON file of flag values")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    return parser


def resolve(command, cli_values, config):
    """Merge defaults < config file < command-line flags and convert types."""
    flags = COMMANDS[command]
    merged = {k: d for k, (_, d) in flags.items()}
    for key, val in (config or {}).items():
        key = key.replace("-", "_")
        if key in ("command", "format", "out"):
            continue
        if key not in flags:
            raise UsageError(f"unknown key {key!r} in config for {command}")
        merged[key] = val
    merged.update(cli_values)
    return {k: _convert(flags[k][0], v, k) for k, v in merged.items()}


def _need(params, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise UsageError("missing required flag(s): "
                         + ", ".join("--" + m.replace("_", "-") for m in missing))


def _infer_family(params):
    for fam, key in (("pareto", "alpha"), ("discrete", "weights"), ("gamma", "s"),
                     ("lognormal", "sigma")):
        if params.get(key) is not None:
            return fam
    raise UsageError("cannot tell the law: give --family or its parameters")


def _law(params):
    fam = params["family"] or _infer_family(params)
    scale = params["scale"]
    if fam == "pareto":
        _need(params, "alpha")
        return ParetoLaw(scale, params["alpha"])
    if fam == "discrete":
        _need(params, "weights", "alphas")
        return MixedLaw(scale, DiscreteAlphaMix(params["weights"], params["alphas"]))
    if fam == "lognormal":
        _need(params, "alpha0", "sigma")
        return MixedLaw(scale, LognormalAlpha(params["alpha0"], params["sigma"], params["b"]))
    if fam == "gamma":
        _need(params, "alpha0", "s")
        return MixedLaw(scale, GammaAlpha(params["alpha0"], params["s"]))
    raise DomainError(f"unknown family {fam!r}; use pareto, discrete, lognormal or gamma")


def _cmd_moments(params):
    _need(params, "alpha")
    law = ParetoLaw(params["scale"], params["alpha"])
    ps = params["p"]
    if not ps:
        raise UsageError("--p needs at least one order")
    if law.alpha <= min(ps):
        raise InfiniteMomentError(
            f"moments require alpha > p; alpha={law.alpha} <= p={min(ps)}")
    cols = {"p": [], "moment": [], "alpha_convexity": []}
    for p in ps:
        cols["p"].append(p)
        if law.alpha > p:
            cols["moment"].append(law.moment(p))
            cols["alpha_convexity"].append(law.moment_alpha_convexity(p))
        else:
            cols["moment"].append(INFINITE)
            cols["alpha_convexity"].append(INFINITE)
    return cols


def _cmd_mixed_mean(params):
    law = _law(params)
    if isinstance(law, ParetoLaw):
        raise DomainError("mixed-mean needs a stochastic family (discrete, lognormal, gamma)")
    ref = reference_mean(law)
    closed = mixed_mean(law, "closed_form")
    quad = mixed_mean(law, "quadrature")
    return {"closed_form": [closed], "quadrature": [quad], "reference_mean": [ref],
            "bias": [quad - ref], "closed_form_minus_quadrature": [closed - quad]}


def _cmd_shortfall(params):
    _need(params, "K")
    law = _law(params)
    abar = law.alpha if isinstance(law, ParetoLaw) else law.mean_alpha
    cols = {"K": [], "shortfall": [], "reference_shortfall": [], "ratio_to_K": []}
    for K in params["K"]:
        ref = ParetoLaw(law.scale, abar).mean_excess(K) if abar > 1 else INFINITE
        try:
            v = mixed_shortfall(law, K)
        except InfiniteMomentError:
            v = INFINITE
        cols["K"].append(K)
        cols["shortfall"].append(v)
        cols["reference_shortfall"].append(ref)
        cols["ratio_to_K"].append(v / K if v != INFINITE else INFINITE)
    return cols


def _cmd_sample(params):
    _need(params, "n")
    law = _law(params)
    stream = RandomStream(params["seed"], params["stream"])
    x = sample_mixed(law, stream, params["n"])
    return {"x": x.tolist()}


def _cmd_sum_converge(params):
    law = _law(params)
    stream = RandomStream(params["seed"], params["stream"])
    table = convergence_experiment(law, params["n"], params["m"], stream,
                                   mirrored=params["mirrored"])
    return table.columns


def _cmd_stable_cf(params):
    _need(params, "alpha")
    sp = StableParams(params["alpha"], params["beta"])
    t = np.asarray(params["t"], dtype=float)
    v = stable_cf(sp, params["scale"], t)
    v = np.atleast_1d(v)
    return {"t": t.tolist(), "re": v.real.tolist(), "im": v.imag.tolist(),
            "modulus": np.abs(v).tolist()}


def _cmd_bounded(params):
    _need(params, "L", "H", "sigma", "alpha")
    mix_a, mix_w = params["mix_alphas"], params["mix_weights"]
    if (mix_a is None) != (mix_w is None):
        raise UsageError("--mix-alphas and --mix-weights go together")
    cols = {"alpha": [], "mean": [], "convexity": []}
    if mix_a is not None:
        cols["mixture_gap"] = []
        mix = DiscreteAlphaMix(mix_w, mix_a)
    for a in params["alpha"]:
        law = BoundedLaw(params["L"], params["H"], params["sigma"], a)
        cols["alpha"].append(a)
        cols["mean"].append(law.mean())
        cols["convexity"].append(law.mean_convexity(params["h"]))
        if mix_a is not None:
            shifted = DiscreteAlphaMix(mix.weights, [x - mix.mean + a for x in mix.alphas])
            cols["mixture_gap"].append(law.alpha_uncertainty(shifted))
    return cols


def _cmd_density(params):
    _need(params, "y")
    law = _law(params)
    y = np.asarray(params["y"], dtype=float)
    dens = law.density(y) if isinstance(law, ParetoLaw) else mixed_density(law, y)
    cols = {"y": y.tolist(), "density": np.atleast_1d(dens).tolist()}
    if params["k"] is not None:
        mix = getattr(law, "mixture", None)
        if not (isinstance(mix, LognormalAlpha) and mix.b == 1.0):
            raise DomainError("--k (series order) needs --family lognormal with b = 1")
        cols["series"] = [mixed_density_series(mix.alpha0, mix.sigma, law.scale, yi, params["k"])
                          for yi in y]
    return cols


_RUNNERS = {
    "moments": _cmd_moments,
    "mixed-mean": _cmd_mixed_mean,
    "shortfall": _cmd_shortfall,
    "sample": _cmd_sample,
    "sum-converge": _cmd_sum_converge,
    "stable-cf": _cmd_stable_cf,
    "bounded": _cmd_bounded,
    "density": _cmd_density,
}


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def argv_from_meta(meta, fmt="json"):
    """Command line that regenerates the file carrying ``meta``."""
    argv = [meta["command"]]
    for key, val in meta["params"].items():
        if val is None or val is False:
            continue
        flag = "--" + key.replace("_", "-")
        if val is True:
            argv.append(flag)
        elif isinstance(val, list):
            argv.append(f"{flag}=" + ",".join(repr(v) for v in val))
        else:
            # --flag=value so that negative values are not read as options
            argv.append(f"{flag}={val!r}" if isinstance(val, float) else f"{flag}={val}")
    return argv + ["--format", fmt]


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        opts = vars(ns)
        command = opts.pop("command")
        config = _load_config(opts.pop("config"))
        fmt = opts.pop("format")
        out = opts.pop("out")
        params = resolve(command, opts, config)
        if command in STOCHASTIC and params.get("seed") is None:
            raise UsageError(f"{command} needs an explicit --seed")
        cols = _RUNNERS[command](params)
        table = ResultTable(cols, make_meta(command, params, params.get("seed")))
        emit(table, fmt, out)
    except UsageError as exc:
        print(f"tailbias: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, InfiniteMomentError) as exc:
        print(f"tailbias: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"tailbias: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalError, OverflowError, FloatingPointError) as exc:
        print(f"tailbias: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


run = main
