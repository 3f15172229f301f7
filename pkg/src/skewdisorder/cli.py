"""Command-line front end: ``charfun``, ``distribution``, ``sweep`` and ``mc``.

Every command is deterministic given its flags. Options may also come from
``--config FILE`` with ``key = value`` lines (keys are flag names), and
explicit flags override the file. Outputs default to the directory named by
``SKEWDISORDER_OUTPUT_DIR``, else the working directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analysis import fit_lognormal, gaussian_limit_check, lognormal_grid, similarity
from .charfun import DisorderScale, chi, k_support
from .cumulants import cumulants_series
from .errors import FitFailure
from .inversion import DEFAULT_POINTS, default_grid, edgeworth4, gaussian_grid, invert
from .montecarlo import DEFAULT_CHUNK, PHASE_SOURCES, empirical_cumulants, ks_compare, sample

OUTPUT_ENV = "SKEWDISORDER_OUTPUT_DIR"
SWEEP_ALPHAS = (-2.0, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5)
SWEEP_MS = tuple(range(200, 2001, 10))
_MUTEX = ("alpha", "x")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _even_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"M must be an integer, got {text!r}") from None
    if value < 2 or value % 2:
        raise argparse.ArgumentTypeError(f"M must be an even integer >= 2, got {value}")
    return value


def _m_list(text):
    """``200,300`` or ``start:stop:step`` (stop inclusive)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ":" in part:
            a, b, c = (int(v) for v in part.split(":"))
            out.extend(range(a, b + 1, c))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty M list")
    return tuple(_even_int(v) for v in out)


def _float_list(text):
    try:
        vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _scale_args(p):
    p.add_argument("--M", type=_even_int, required=True, help="even matrix size")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float, help="disorder exponent, x = M^alpha")
    g.add_argument("--x", type=float, help="disorder strength x = 1/(2 sigma^2)")


def build_parser():
    parser = _Parser(prog="skewdisorder", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of 'key = value' lines; flags override it")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("charfun", help="tabulate the characteristic function")
    _scale_args(p)
    p.add_argument("--k-max", type=float, help="largest k (default: decay radius for 1e-12)")
    p.add_argument("--n", type=int, default=512, help="number of k points")
    p.add_argument("--out")

    p = sub.add_parser("distribution", help="density by Fourier inversion plus cumulant sidecar")
    _scale_args(p)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--plot-data", action="store_true", help="also write numeric, Gaussian, Edgeworth and log-normal columns")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="fit and similarity records over an (M, alpha) grid")
    p.add_argument("--M", type=_m_list, default=SWEEP_MS, help="list '200,400' or range '200:2000:10'")
    p.add_argument("--alpha", type=_float_list, default=SWEEP_ALPHAS)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("mc", help="Monte Carlo samples and empirical cumulants")
    _scale_args(p)
    p.add_argument("--n", type=int, default=100_000, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phase-source", choices=PHASE_SOURCES, default="q")
    p.add_argument("--compare-phase-source", choices=PHASE_SOURCES, help="run a KS test against this source")
    p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    return parser


def _read_config(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            pairs.append((key.replace("_", "-"), value))
    return pairs


def _merge_config(argv):
    """Splice config-file options in front of the command's own flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        return rest
    cmd_pos = next((i for i, tok in enumerate(rest) if not tok.startswith("-")), None)
    if cmd_pos is None:
        return rest
    given = {tok[2:].split("=", 1)[0] for tok in rest[cmd_pos + 1 :] if tok.startswith("--")}
    injected = []
    for key, value in _read_config(known.config):
        if key in given or (key in _MUTEX and given & set(_MUTEX)):
            continue
        if value.lower() in ("true", "yes", "on"):
            injected.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            injected.append(f"--{key}={value}")
    return rest[: cmd_pos + 1] + injected + rest[cmd_pos + 1 :]


def _scale(args):
    if args.alpha is not None:
        return DisorderScale.from_alpha(args.M, args.alpha)
    return DisorderScale(args.M, args.x)


def _tag(args):
    return f"alpha{args.alpha!r}" if args.alpha is not None else f"x{args.x!r}"


def _out_path(args, default_name):
    if args.out:
        return args.out
    return os.path.join(os.environ.get(OUTPUT_ENV, "."), default_name)


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv(header, columns):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(f"{v:.16e}" for v in row))
    return "\n".join(lines) + "\n"


def _sidecar(path):
    root, _ = os.path.splitext(path)
    return root + ".json"


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_charfun(args):
    scale = _scale(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    k_max = args.k_max if args.k_max is not None else k_support(scale)
    k = np.linspace(0.0, k_max, args.n)
    c = np.atleast_1d(chi(k, scale))
    path = _out_path(args, f"charfun_M{args.M}_{_tag(args)}.csv")
    _atomic_write(path, _csv(["k", "re", "im", "abs"], [k, c.real, c.imag, np.abs(c)]))
    return [path]


def _distribution_products(scale, points, eps):
    cset = cumulants_series(scale.M, scale.x, 4)
    k1, k2 = cset.values[0], cset.values[1]
    grid = invert(scale, default_grid(k1, k2, points), eps=eps)
    return cset, grid


def cmd_distribution(args):
    scale = _scale(args)
    cset, grid = _distribution_products(scale, args.points, args.eps)
    path = _out_path(args, f"distribution_M{args.M}_{_tag(args)}.csv")
    written = [path]
    meta = {
        **scale.describe(),
        **cset.as_dict(),
        "kappa2_over_M": cset.values[1] / scale.M,
        "mass": grid.integral(),
        "points": len(grid),
        "k_max": grid.meta["k_max"],
    }
    if args.plot_data:
        gauss = gaussian_grid(cset.values[0], cset.values[1], grid)
        edge = edgeworth4(cset, grid)
        cols = [grid.f, grid.p, gauss.p, edge.p]
        header = ["F", "numeric", "gaussian", "edgeworth"]
        try:
            params = fit_lognormal(grid, scale.alpha, cset.values[0])
            cols.append(lognormal_grid(params, grid).p)
            header.append("lognormal")
            meta["lognormal"] = params.as_dict()
        except FitFailure as exc:
            meta["lognormal_error"] = str(exc)
        plot_path = os.path.splitext(path)[0] + "_plot.csv"
        _atomic_write(plot_path, _csv(header, cols))
        written.append(plot_path)
    _atomic_write(path, grid.to_csv())
    side = _sidecar(path)
    _atomic_write(side, _dump(meta))
    written.append(side)
    return written


def sweep_record(M, alpha, points=DEFAULT_POINTS, eps=1e-12):
    """One sweep record: inversion, log-normal fit and similarity scores at ``(M, α)``."""
    scale = DisorderScale.from_alpha(M, alpha)
    cset, grid = _distribution_products(scale, points, eps)
    k1, k2 = cset.values[0], cset.values[1]
    rec = {"alpha": alpha, "M": M}
    try:
        params = fit_lognormal(grid, alpha, k1)
        sim = similarity(grid, lognormal_grid(params, grid))
        rec.update(params.as_dict())
        rec.update(sim.as_dict())
        rec["ratio"] = gaussian_limit_check(params, k2)
    except FitFailure as exc:
        rec.update({"f0": None, "sigmaPrime": None, "s": None, "kl": None, "jsd": None, "hellinger": None, "ratio": None})
        rec["fit_error"] = str(exc)
    rec["kappas"] = list(cset.values)
    rec["gaussian"] = similarity(grid, gaussian_grid(k1, k2, grid)).as_dict()
    rec["edgeworth"] = similarity(grid, edgeworth4(cset, grid)).as_dict()
    rec["mass"] = grid.integral()
    return rec


def _record_line(rec):
    return json.dumps(rec, allow_nan=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _sanitize(rec):
    # JSON has no infinity; an infinite KL is stored as null
    out = {}
    for key, val in rec.items():
        if isinstance(val, dict):
            out[key] = _sanitize(val)
        elif isinstance(val, float) and not math.isfinite(val):
            out[key] = None
        else:
            out[key] = val
    return out


def _sweep_task(job):
    M, alpha, points, eps = job
    return _sanitize(sweep_record(M, alpha, points, eps))


def cmd_sweep(args):
    path = _out_path(args, "sweep.jsonl")
    done = {}
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a line cut short by an interruption is recomputed
                    continue
                done[(float(rec["alpha"]), int(rec["M"]))] = rec
    todo = [(M, a, args.points, args.eps) for a in args.alpha for M in args.M if (float(a), M) not in done]
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        if args.jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = pool.map(_sweep_task, todo)
                for rec in results:
                    fh.write(_record_line(rec))
                    fh.flush()
                    done[(float(rec["alpha"]), int(rec["M"]))] = rec
        else:
            for job in todo:
                rec = _sweep_task(job)
                fh.write(_record_line(rec))
                fh.flush()
                done[(float(rec["alpha"]), int(rec["M"]))] = rec
    ordered = [done[key] for key in sorted(done)]
    _atomic_write(path, "".join(_record_line(r) for r in ordered))
    return [path]


def cmd_mc(args):
    scale = _scale(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    batch = sample(scale, args.n, args.seed, args.phase_source, chunk=args.chunk, jobs=args.jobs)
    path = _out_path(args, f"mc_M{args.M}_{_tag(args)}_seed{args.seed}.csv")
    exact = cumulants_series(scale.M, scale.x, 4)
    info = {**scale.describe(), "seed": args.seed, "count": batch.count, "phase_source": args.phase_source}
    J = min(4, batch.count // 10)
    if J >= 1:
        info["empirical"] = empirical_cumulants(batch, J).as_dict()
    info["exact"] = exact.as_dict()
    if args.compare_phase_source:
        other = sample(scale, args.n, args.seed + 1, args.compare_phase_source, chunk=args.chunk, jobs=args.jobs)
        ks = ks_compare(batch, other)
        ks["against"] = args.compare_phase_source
        ks["passes_1pct"] = ks["statistic"] < ks["critical_1pct"]
        info["ks"] = ks
    _atomic_write(path, batch.to_csv())
    side = _sidecar(path)
    _atomic_write(side, _dump(info))
    return [path, side]


COMMANDS = {"charfun": cmd_charfun, "distribution": cmd_distribution, "sweep": cmd_sweep, "mc": cmd_mc}


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if any(tok in ("-h", "--help") for tok in argv):
        build_parser().parse_args(argv)
    try:
        args = build_parser().parse_args(_merge_config(argv))
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except OSError as exc:
        return _fail("io", f"{exc.filename}: {exc.strerror}", 1)
    try:
        written = COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except OSError as exc:
        return _fail("io", f"{exc.filename}: {exc.strerror}", 1)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
