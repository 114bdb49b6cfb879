"""``rgg-lab`` command line.

Exit codes: 0 success, 2 usage error, 3 resource guardrail.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import experiments as ex
from . import lp_geometry as geo
from . import thresholds as th
from .errors import ResourceError, UsageError

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE = 0, 2, 3

_CONFIG_KEYS = {
    "d": "d", "p": "p", "n": "n", "lambda": "lam", "c": "c", "gamma-mode": "gamma_mode",
    "trials": "trials", "seed": "seed", "threads": "threads", "format": "format",
    "out": "out", "per-trial": "per_trial", "timing": "timing", "pairs": "pairs",
    "c-margin": "c_margin", "sigma": "sigma", "r": "r", "detour-budget": "detour_budget",
    "K": "K", "mem-cap-gb": "mem_cap_gb", "kind": "kind",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    out = []
    for t in str(text).split(","):
        t = t.strip()
        if not t:
            continue
        v = float(t)
        if v != int(v):
            raise UsageError(f"expected an integer, got {t!r}")
        out.append(int(v))
    return out


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment.  Keys mirror long flags."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("_", "-")
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[_CONFIG_KEYS[key]] = value
    return out


def _build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rgg-lab", description="Random geometric graphs in the unit ball under l_p metrics.")
    ap.add_argument("kind", choices=ex.KINDS + ("thresholds",),
                    help="experiment kind, or geometry/thresholds for formula evaluation")
    ap.add_argument("--config", help="key=value file; flags given on the command line win")
    ap.add_argument("--d", type=int)
    ap.add_argument("--p", help="metric exponent >= 1 or inf")
    ap.add_argument("--n", help="comma-separated list of n")
    lam = ap.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float, help="explicit adjacency radius")
    lam.add_argument("--c", help="comma-separated constants c")
    ap.add_argument("--gamma-mode", help="default | const:F")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int, help="master seed (u64)")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--out", help="output path (stdout if omitted)")
    ap.add_argument("--describe", action="store_true", help="print column documentation and exit")
    ap.add_argument("--per-trial", action="store_const", const="true",
                    help="emit one row per trial instead of the summary")
    ap.add_argument("--timing", action="store_const", const="true",
                    help="include wall_time (makes output nondeterministic)")
    ap.add_argument("--pairs", type=int, help="routing: sampled pairs per trial")
    ap.add_argument("--c-margin", type=float, help="big-O constant of the tight diameter bound")
    ap.add_argument("--sigma", type=int, help="routing: pincushion sigma (non-asymptotic)")
    ap.add_argument("--r", type=float, help="routing: pin spacing (non-asymptotic)")
    ap.add_argument("--detour-budget", type=int)
    ap.add_argument("--K", type=float, help="routing tripwire constant")
    ap.add_argument("--mem-cap-gb", type=float)
    return ap


_DEFAULTS = {"d": "2", "p": "2", "n": "1000", "gamma_mode": "default", "trials": "10",
             "seed": "0", "threads": "1", "format": "csv", "per_trial": "false",
             "timing": "false", "pairs": "100", "c_margin": "1.0", "mem_cap_gb": "4.0"}


def _merged(args) -> dict:
    vals = dict(_DEFAULTS)
    if args.config:
        file_vals = read_config(args.config)
        if "kind" in file_vals and file_vals["kind"] != args.kind:
            raise UsageError(f"config kind {file_vals['kind']!r} does not match {args.kind!r}")
        file_vals.pop("kind", None)
        if "lam" in file_vals and "c" in file_vals:
            raise UsageError("config sets both lambda and c")
        vals.update(file_vals)
    for key in _CONFIG_KEYS.values():
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    # a command-line lambda or c displaces the other form from the file
    if args.lam is not None:
        vals.pop("c", None)
    if args.c is not None:
        vals.pop("lam", None)
    return vals


def _config(kind, vals) -> ex.ExperimentConfig:
    def opt(key, conv):
        return conv(vals[key]) if vals.get(key) not in (None, "") else None

    seed = int(vals["seed"])
    if not 0 <= seed < 2 ** 64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return ex.ExperimentConfig(
        kind=kind, d=int(vals["d"]), p=geo.LpExponent.parse(str(vals["p"])),
        n_list=tuple(_ints(vals["n"])), lam=opt("lam", float),
        c_list=tuple(_floats(vals["c"])) if vals.get("c") else None,
        gamma_mode=str(vals["gamma_mode"]), trials=int(vals["trials"]),
        master_seed=seed, threads=int(vals["threads"]), out=vals.get("out"),
        fmt=str(vals["format"]), per_trial=_bool(vals["per_trial"]),
        timing=_bool(vals["timing"]), pairs=int(vals["pairs"]),
        c_margin=float(vals["c_margin"]), sigma=opt("sigma", int), r=opt("r", float),
        detour_budget=opt("detour_budget", int), K=opt("K", float),
        mem_cap_gb=float(vals["mem_cap_gb"]))


def _geometry_rows(vals) -> list[dict]:
    d = int(vals["d"])
    p = geo.LpExponent.parse(str(vals["p"]))
    rows = [{"quantity": "alpha", "value": geo.alpha(d, p)},
            {"quantity": "lp_ball_volume", "value": geo.lp_ball_volume(d, p)},
            {"quantity": "euclidean_ball_volume", "value": geo.lp_ball_volume(d, 2)},
            {"quantity": "diam_p", "value": geo.unit_ball_lp_diameter(d, p)}]
    for n in _ints(vals["n"]):
        rows.append({"quantity": f"cap_height(n={n})", "value": th.cap_height_schedule(n, d)})
        if n >= 16:
            rows.append({"quantity": f"rho(n={n})", "value": th.rho_schedule(n, d, p)})
        if vals.get("lam"):
            lam = float(vals["lam"])
            h = th.cap_height_schedule(n, d)
            rows.append({"quantity": f"lower_bound_hops(n={n})",
                         "value": th.diameter_lower_bound(d, p, lam, h)})
            if n >= 16:
                rows.append({"quantity": f"tight_bound_hops(n={n})",
                             "value": th.tight_upper_bound(d, p, lam, n, float(vals["c_margin"]))})
    if d >= 2:
        rows.append({"quantity": "c_star", "value": th.connectivity_threshold_constant(d, p)})
        rows.append({"quantity": "k0", "value": th.k0_bound(d, p)})
        rows.append({"quantity": "K_default", "value": th.default_K(d, p)})
    return rows


def _thresholds_rows(vals) -> list[dict]:
    d = int(vals["d"])
    p = geo.LpExponent.parse(str(vals["p"]))
    mode = str(vals["gamma_mode"])
    rows = []
    for n in _ints(vals["n"]):
        gamma = None
        if mode.startswith("const:"):
            gamma = float(mode.split(":", 1)[1])
        elif mode != "default":
            raise UsageError(f"gamma mode must be 'default' or 'const:F', got {mode!r}")
        rows.append(th.threshold_report(d, p, n, gamma).as_dict())
    return rows


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    vals = _merged(args)
    fmt = str(vals["format"])
    if args.kind in ("geometry", "thresholds"):
        if args.describe:
            _emit("quantity  formula name\nvalue     evaluated value\n" if args.kind == "geometry"
                  else "".join(f"{k}\n" for k in th.ThresholdReport.__dataclass_fields__), None)
            return EXIT_OK
        rows = _geometry_rows(vals) if args.kind == "geometry" else _thresholds_rows(vals)
        cols = list(rows[0].keys()) if rows else []
        _emit(ex.format_table(cols, rows, fmt), vals.get("out"))
        return EXIT_OK
    if args.describe:
        _emit(ex.describe(args.kind, _bool(vals["per_trial"])), None)
        return EXIT_OK
    cfg = _config(args.kind, vals)
    result = ex.run_experiment(cfg)
    cols, rows = result.table()
    _emit(ex.format_table(cols, rows, cfg.fmt), cfg.out)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        code = run(argv)
    except UsageError as exc:
        print(f"rgg-lab: usage error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except ResourceError as exc:
        print(f"rgg-lab: resource guardrail: {exc}", file=sys.stderr)
        code = EXIT_RESOURCE
    return code


if __name__ == "__main__":
    sys.exit(main())
