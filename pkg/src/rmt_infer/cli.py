"""Command-line front end: ``rmt-infer <command> ...``.

Results go to standard output as a JSON envelope
``{"command", "params", "seed", "version", "payload"}`` with floats written
to 17 significant digits.  Tables are CSV.  Errors go to standard error as a
single line ``error code=<code> message=<text>`` with a nonzero exit status.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, inference, laws, specfun
from . import simulate as sim
from ._errors import DomainError, RMTError

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    code = "usage_error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def format_float(x):
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj):
    """JSON text with every float at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json_str(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_str(s):
    return json.dumps(s)


def envelope(command, params, payload, seed=None):
    return {"command": command, "params": params, "seed": seed, "version": __version__, "payload": payload}


def write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_float(float(v)) if not isinstance(v, str) else v for v in row) + "\n")


def _open_out(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise RMTError(f"cannot write {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------
# Data files
# --------------------------------------------------------------------------


def read_matrix(path, header=False, transpose=False, delimiter=None):
    """Rows = observations, columns = variables (after optional transpose).

    The delimiter is a comma, tab or whitespace, detected from the first line
    unless given.
    """
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if header:
        lines = lines[1:]
    if not lines:
        raise DomainError(f"{path}: no data rows")
    if delimiter is None:
        first = lines[0]
        delimiter = "," if "," in first else ("\t" if "\t" in first else None)
    if delimiter is None:
        cells = [ln.split() for ln in lines]
    else:
        cells = [[c.strip() for c in row] for row in csv.reader(lines, delimiter=delimiter)]
    width = len(cells[0])
    for i, row in enumerate(cells):
        if len(row) != width:
            raise DomainError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
    try:
        m = np.array([[float(c) for c in row] for row in cells])
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{path}: non-finite value")
    if transpose:
        m = m.T
    if m.shape[0] < 2:
        raise DomainError(f"{path}: need at least two observations")
    return m


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _result_payload(res):
    return {
        "family": res.case.family,
        "field": res.case.field,
        "dims": res.case.dims(),
        "raw_statistic": res.raw_statistic,
        "standardized": res.standardized,
        "p_value": res.p_value,
        "mu": res.center_scale.mu,
        "sigma": res.center_scale.sigma,
    }


def cmd_tw(args, out):
    if args.beta not in (1, 2):
        raise UsageError("--beta must be 1 or 2")
    dist = specfun.tracy_widom(args.beta)
    params = {"beta": args.beta}
    if args.table:
        write_csv(out, ["s", "cdf", "density"], zip(dist.grid, dist.cdf, dist.density))
        return
    if args.cdf is not None:
        params["cdf"] = args.cdf
        payload = {"s": args.cdf, "cdf": specfun.tw_cdf(dist, args.cdf)}
    else:
        params["quantile"] = args.quantile
        payload = {"p": args.quantile, "s": specfun.tw_quantile(dist, args.quantile)}
    out.write(to_json(envelope("tw", params, payload)) + "\n")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing {' '.join(missing)}")


def cmd_test(args, out):
    fld = "complex" if args.complex else "real"
    params = {"family": args.family, "field": fld}
    if args.data is not None:
        if fld != "real":
            raise UsageError("--data requires --real")
        a = read_matrix(args.data, args.header, args.transpose)
        params.update({"data": args.data, "center": not args.no_center})
        if args.family == "single":
            res = inference.largest_root_test_from_data(a.T, center=not args.no_center)
        else:
            if args.data2 is None:
                raise UsageError("double --data needs --data2")
            b = read_matrix(args.data2, args.header, args.transpose)
            if a.shape[0] != b.shape[0]:
                raise DomainError("data files must have the same number of observations")
            params["data2"] = args.data2
            res = inference.cca_root_test(a.T, b.T)
    else:
        if args.stat is None:
            raise UsageError("one of --stat or --data is required")
        params["stat"] = args.stat
        if args.family == "single":
            _need(args, "n", "p")
            case = laws.EnsembleCase.single(args.n, args.p, fld)
        else:
            _need(args, "n1", "n2", "p")
            case = laws.EnsembleCase.double(args.n1, args.n2, args.p, fld)
        params.update(case.dims())
        res = inference.largest_root_test(case, args.stat)
    out.write(to_json(envelope("test", params, _result_payload(res))) + "\n")


def cmd_mp(args, out):
    law = laws.MPLaw(args.gamma)
    if args.table is not None:
        if args.table < 2:
            raise UsageError("--table needs at least 2 points")
        t = np.linspace(law.b_minus, law.b_plus, args.table)
        write_csv(out, ["t", "density"], zip(t, laws.mp_density(law, t)))
        return
    payload = {
        "t": args.density,
        "density": laws.mp_density(law, args.density),
        "cdf": laws.mp_cdf(law, args.density),
        "b_minus": law.b_minus,
        "b_plus": law.b_plus,
        "atom_at_zero": law.atom_at_zero,
    }
    out.write(to_json(envelope("mp", {"gamma": args.gamma, "density": args.density}, payload)) + "\n")


def cmd_spike(args, out):
    if args.overlap:
        _need(args, "gamma", "lam")
        value = inference.overlap_from_strength(args.gamma, args.lam)
        params = {"gamma": args.gamma, "lambda": args.lam}
        out.write(to_json(envelope("spike", params, {"overlap_limit": value})) + "\n")
        return
    _need(args, "gamma", "ell")
    model = inference.SpikedModel(args.gamma, (args.ell,), args.base_var)
    pred = inference.spike_predict(model, 0, n=args.n, field=args.field)
    params = {"gamma": args.gamma, "ell": args.ell, "n": args.n, "base_var": args.base_var, "field": args.field}
    payload = {
        "regime": pred.regime,
        "threshold": pred.threshold,
        "mean": pred.mean,
        "sd": pred.sd,
        "fluctuation_law": pred.fluctuation_law,
        "scale": pred.scale,
    }
    out.write(to_json(envelope("spike", params, payload)) + "\n")


def _parse_case(text, args):
    try:
        family, fld = text.split("-")
    except ValueError:
        raise UsageError("--case must look like single-real or double-real") from None
    if fld != "real":
        raise UsageError("only real-field cases can be simulated")
    if family == "single":
        _need(args, "n", "p")
        return laws.EnsembleCase.single(args.n, args.p)
    if family == "double":
        _need(args, "n1", "n2", "p")
        return laws.EnsembleCase.double(args.n1, args.n2, args.p)
    raise UsageError(f"unknown family {family!r}")


def cmd_simulate(args, out):
    config = sim.SimConfig(args.seed, args.reps, center=not args.no_center)
    kind = args.kind
    params = {"kind": kind, "reps": args.reps, "center": config.center}
    if kind == "largest-root":
        case = _parse_case(args.case, args)
        params.update({"case": args.case, **case.dims()})
        res = sim.simulate_largest_root(config, case)
        header = ["replicate", "statistic", "standardized"]
        rows = [(r, res.extra["raw"][r], res.values[r]) for r in range(res.values.size)]
        payload = {
            "ks": res.ks,
            "reference": res.reference,
            "mean": res.mean,
            "sd": res.sd,
            "mu": res.extra["mu"],
            "sigma": res.extra["sigma"],
            "effective_dims": res.extra["effective_dims"],
            "q95": float(np.quantile(res.values, 0.95)),
        }
    elif kind == "mp":
        _need(args, "n", "p")
        params.update({"n": args.n, "p": args.p})
        res = sim.simulate_mp(config, args.n, args.p)
        spectra = res.extra["spectra"]
        header = ["replicate"] + [f"l{j + 1}" for j in range(spectra.shape[1])]
        rows = [(r, *spectra[r]) for r in range(spectra.shape[0])]
        payload = {"ks": res.ks, "reference": res.reference, "b_minus": res.extra["b_minus"], "b_plus": res.extra["b_plus"]}
    elif kind == "spike":
        _need(args, "gamma", "ell", "n")
        params.update({"gamma": args.gamma, "ell": args.ell, "n": args.n})
        res = sim.simulate_spike(config, args.gamma, args.ell, args.n)
        header = ["replicate", "top_eigenvalue", "abs_cosine"]
        rows = [(r, res.top.values[r], res.cosines[r]) for r in range(res.cosines.size)]
        pred = res.prediction
        payload = {
            "mean": res.top.mean,
            "sd": res.top.sd,
            "predicted_regime": pred.regime if pred else None,
            "predicted_mean": pred.mean if pred else None,
            "predicted_sd": pred.sd if pred else None,
            "mean_cos": res.mean_cos,
            "mean_cos2": res.mean_cos2,
            "overlap_limit": res.limit,
            "overlap_matches": res.matches,
        }
    else:
        fp = sim.FactorModelParams(args.beta_f, args.sigma_b, args.sigma_f, args.sigma_e, T=args.T)
        grid = range(args.p_min, args.p_max + 1, args.p_step)
        params.update(
            {"T": args.T, "beta_f": fp.beta_f, "sigma_b": fp.sigma_b, "sigma_f": fp.sigma_f,
             "sigma_e": fp.sigma_e, "p_grid": list(grid), "mode": args.mode}
        )
        table = sim.simulate_brown_harding(fp, config, grid, mode=args.mode)
        k = table[0].top_eigs.shape[1]
        header = ["p", "replicate"] + [f"l{j + 1}" for j in range(k)]
        rows = [(row.p, r, *row.top_eigs[r]) for row in table for r in range(row.top_eigs.shape[0])]
        payload = {
            "rows": [
                {
                    "p": row.p,
                    "ell1": row.ell1,
                    "ell2": row.ell2,
                    "ell3": row.ell2,
                    "ell4": row.ell2,
                    "base": row.base,
                    "threshold": row.threshold,
                    "mp_edge": row.mp_edge,
                    "ell1_detectable": row.detectable[0],
                    "ell2_detectable": row.detectable[1],
                    "predicted_top": row.predicted_top,
                    "top_mean": row.top_mean,
                    "next_means": row.top_eigs[:, 1:].mean(axis=0),
                }
                for row in table
            ]
        }
    if config.center:
        payload["note"] = "data centered: n S has one fewer degree of freedom than n"
    if args.out:
        with _open_out(args.out) as fh:
            write_csv(fh, header, rows)
        params["out"] = args.out
    out.write(to_json(envelope("simulate", params, payload, seed=config.seed)) + "\n")


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="rmt-infer", description="Largest-eigenvalue inference tools.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    tw = sub.add_parser("tw", help="Tracy-Widom distribution values")
    tw.add_argument("--beta", type=int, required=True)
    g = tw.add_mutually_exclusive_group(required=True)
    g.add_argument("--cdf", type=float, metavar="S")
    g.add_argument("--quantile", type=float, metavar="P")
    g.add_argument("--table", action="store_true")
    tw.set_defaults(func=cmd_tw)

    t = sub.add_parser("test", help="largest-root test")
    t.add_argument("family", choices=("single", "double"))
    f = t.add_mutually_exclusive_group()
    f.add_argument("--real", action="store_true", default=True)
    f.add_argument("--complex", action="store_true")
    for name in ("n", "p", "n1", "n2"):
        t.add_argument(f"--{name}", type=int)
    src = t.add_mutually_exclusive_group()
    src.add_argument("--stat", type=float)
    src.add_argument("--data")
    t.add_argument("--data2")
    t.add_argument("--header", action="store_true", help="skip the first line of data files")
    t.add_argument("--transpose", action="store_true", help="files have rows = variables")
    t.add_argument("--no-center", action="store_true")
    t.set_defaults(func=cmd_test)

    mp = sub.add_parser("mp", help="Marcenko-Pastur law")
    mp.add_argument("--gamma", type=float, required=True)
    g = mp.add_mutually_exclusive_group(required=True)
    g.add_argument("--density", type=float, metavar="T")
    g.add_argument("--table", type=int, metavar="N")
    mp.set_defaults(func=cmd_mp)

    sp = sub.add_parser("spike", help="spiked-model predictions")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--ell", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--base-var", type=float, default=1.0)
    sp.add_argument("--field", choices=("real", "complex"), default="real")
    sp.add_argument("--overlap", action="store_true")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.set_defaults(func=cmd_spike)

    sm = sub.add_parser("simulate", help="Monte Carlo experiments")
    sm.add_argument("kind", choices=("largest-root", "mp", "spike", "harding"))
    sm.add_argument("--case", default="single-real")
    for name in ("n", "p", "n1", "n2"):
        sm.add_argument(f"--{name}", type=int)
    sm.add_argument("--gamma", type=float)
    sm.add_argument("--ell", type=float)
    sm.add_argument("--T", type=int, default=80)
    sm.add_argument("--beta-f", type=float, default=0.6)
    sm.add_argument("--sigma-b", type=float, default=0.4)
    sm.add_argument("--sigma-f", type=float, default=0.01257)
    sm.add_argument("--sigma-e", type=float, default=0.0671)
    sm.add_argument("--p-min", type=int, default=50)
    sm.add_argument("--p-max", type=int, default=200)
    sm.add_argument("--p-step", type=int, default=25)
    sm.add_argument("--mode", choices=("spiked", "factor"), default="spiked")
    sm.add_argument("--reps", type=int, default=None)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out")
    sm.add_argument("--no-center", action="store_true")
    sm.set_defaults(func=cmd_simulate)
    return parser


_DEFAULT_REPS = {"largest-root": 10000, "mp": 20, "spike": 500, "harding": 50}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "simulate" and args.reps is None:
            args.reps = _DEFAULT_REPS[args.kind]
        buf = io.StringIO()
        args.func(args, buf)
        stdout.write(buf.getvalue())
        return 0
    except UsageError as exc:
        stderr.write(f"error code={exc.code} message={_one_line(exc)}\n")
        return EXIT_USAGE
    except RMTError as exc:
        stderr.write(f"error code={exc.code} message={_one_line(exc)}\n")
        return EXIT_USAGE if isinstance(exc, DomainError) else EXIT_FAILURE


def _one_line(exc):
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())
