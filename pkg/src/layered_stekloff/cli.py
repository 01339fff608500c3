"""Command-line front end: ``layered-stekloff <command> --config run.json``.

Commands write ``<command>.csv`` and/or ``<command>.json`` into ``--out``
plus a ``<command>.timing.json`` sidecar holding the wall time, so the main
outputs stay byte-identical between runs. Exit codes: 0 success, 1 numerical
failure, 2 invalid configuration or assumption violation.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import (
    check_degree,
    check_delta,
    check_medium,
    check_wavenumber,
    parse_complex,
)
from .errors import (
    AssumptionViolated,
    IllPosedParameterWarning,
    InvalidInput,
    NumericalFailure,
    ResonanceWarning,
    StekloffError,
)
from .radial import check_assumption
from .scattering import detect_eigenvalues
from .stekloff import (
    Flavor,
    contrast_family,
    delta_sweep,
    epsilon_perturb,
    psi_operator,
    spectrum,
    tail_norms,
)
from .verification import SUITE, Check, run_check

FORMATS = ("csv", "json", "both")


@dataclass
class RunConfig:
    medium: object
    k: float
    delta: float = 0.0
    l_max: int = 10
    shift: float = None
    sweep: dict = field(default_factory=dict)
    perturb: dict = field(default_factory=dict)
    detect: dict = field(default_factory=dict)
    seed: int = 0
    raw: dict = field(default_factory=dict)


def _cfloat(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInput(f"{name} must be a number, got {value!r}")
    return float(value)


def load_config(raw):
    """Validate a parsed JSON document into a ``RunConfig``."""
    if not isinstance(raw, dict):
        raise InvalidInput("configuration must be a JSON object")
    if "medium" not in raw:
        raise InvalidInput("configuration needs a 'medium' block")
    cfg = RunConfig(
        medium=check_medium(raw["medium"]),
        k=check_wavenumber(raw.get("k", 1.0)),
        delta=check_delta(raw.get("delta", 0.0)),
        l_max=check_degree(raw.get("l_max", 10)),
        raw=raw,
    )
    if raw.get("shift") is not None:
        cfg.shift = _cfloat(raw["shift"], "shift")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise InvalidInput(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    cfg.seed = seed

    sweep = dict(raw.get("sweep", {}))
    sweep["l"] = check_degree(sweep.get("l", 1), "sweep.l")
    deltas = sweep.get("deltas", list(np.logspace(-3, -1, 9)))
    if not isinstance(deltas, list) or not deltas:
        raise InvalidInput("sweep.deltas must be a non-empty list")
    sweep["deltas"] = [check_delta(d) for d in deltas]
    cfg.sweep = sweep

    perturb = dict(raw.get("perturb", {}))
    if "medium1" in perturb:
        perturb["medium1"] = check_medium(perturb["medium1"])
        if not math.isclose(perturb["medium1"].R, cfg.medium.R):
            raise InvalidInput("perturb.medium1 must share the outer radius")
    shell = perturb.get("shell", cfg.medium.n_shells - 1)
    if isinstance(shell, bool) or not isinstance(shell, int) or not 0 <= shell < cfg.medium.n_shells:
        raise InvalidInput(f"perturb.shell must index a shell, got {shell!r}")
    perturb["shell"] = shell
    ts = perturb.get("ts", [1e-1, 1e-2, 1e-3])
    if not isinstance(ts, list) or not ts:
        raise InvalidInput("perturb.ts must be a non-empty list")
    perturb["ts"] = [parse_complex(t) for t in ts]
    cfg.perturb = perturb

    detect = dict(raw.get("detect", {}))
    degrees = detect.get("degrees", list(range(1, cfg.l_max + 1)))
    if not isinstance(degrees, list) or not degrees:
        raise InvalidInput("detect.degrees must be a non-empty list")
    detect["degrees"] = [check_degree(l, "detect degree") for l in degrees]
    detect["method"] = detect.get("method", "moebius")
    if detect["method"] not in ("moebius", "grid"):
        raise InvalidInput(f"unknown detection method {detect['method']!r}")
    noise = detect.get("noise", 0.0)
    if _cfloat(noise, "detect.noise") < 0:
        raise InvalidInput("detect.noise must be >= 0")
    detect["noise"] = float(noise)
    window = detect.get("window")
    if window is not None:
        try:
            (a, b), (c, d) = window
            window = ((float(a), float(b)), (float(c), float(d)))
        except (TypeError, ValueError):
            raise InvalidInput("detect.window must be [[re_lo, re_hi], [im_lo, im_hi]]") from None
        if not (a < b and c < d):
            raise InvalidInput("detect.window bounds must be increasing")
    detect["window"] = window
    cfg.detect = detect
    return cfg


# -- serialization ----------------------------------------------------------

def _num(x):
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _complex_tag(z):
    if z.imag == 0:
        return _num(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{_num(z.real)}{sign}{_num(abs(z.imag))}j"


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def render_json(payload):
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


@dataclass
class Result:
    header: list
    rows: list
    summary: dict
    plots: dict = field(default_factory=dict)
    ok: bool = True


def _write(out, name, result, fmt, plots, raw, elapsed):
    out.mkdir(parents=True, exist_ok=True)
    if fmt in ("csv", "both"):
        (out / f"{name}.csv").write_text(render_csv(result.header, result.rows), encoding="utf-8")
    if fmt in ("json", "both"):
        payload = {"command": name, "version": __version__, "config": raw, **result.summary}
        (out / f"{name}.json").write_text(render_json(payload), encoding="utf-8")
    if plots:
        for stem, (cols, data) in result.plots.items():
            lines = ["# " + " ".join(cols)]
            lines += [" ".join(_num(v) for v in row) for row in data]
            (out / f"{name}_{stem}.dat").write_text("\n".join(lines) + "\n", encoding="utf-8")
    timing = {"command": name, "version": __version__, "wall_time_s": elapsed}
    (out / f"{name}.timing.json").write_text(render_json(timing), encoding="utf-8")


# -- commands ---------------------------------------------------------------

def cmd_eigs(cfg, threads=1):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ResonanceWarning)
        recs = spectrum(cfg.medium, cfg.k, cfg.delta, cfg.l_max)
    rows = [[r.l, r.multiplicity, r.mu, r.lam.real, r.lam.imag, r.delta] for r in recs]
    op = psi_operator(cfg.medium, cfg.k, cfg.delta, cfg.shift, cfg.l_max, Flavor.PSI)
    tails = tail_norms(op)
    starts = np.concatenate([[0], np.cumsum(op.multiplicities)[:-1]])
    mu = op.degrees * (op.degrees + 1.0) / cfg.medium.R**2
    summary = {
        "n_eigenvalues": len(recs),
        "shift": op.z,
        "eigenvalues": [{"l": r.l, "lambda": r.lam, "multiplicity": r.multiplicity} for r in recs],
        "warnings": [str(w.message) for w in caught],
    }
    return Result(
        ["l", "multiplicity", "mu", "re_lambda", "im_lambda", "delta"], rows, summary,
        {"tail_norms": (["mu_M", "tail_norm"], list(zip(mu, tails[starts])))},
    )


def cmd_sweep_delta(cfg, threads=1):
    l = cfg.sweep["l"]
    # surfaces a TM resonance as AssumptionViolated before sweeping
    spectrum_check = check_assumption(cfg.medium, cfg.k, l)
    if spectrum_check.tm_degrees:
        raise AssumptionViolated(spectrum_check.tm_degrees)
    sw = delta_sweep(cfg.medium, cfg.k, l, cfg.sweep["deltas"])
    rows = [[d, lam.real, lam.imag, drift] for d, lam, drift in zip(sw.deltas, sw.lams, sw.drifts)]
    summary = {"l": l, "exponent": None if math.isnan(sw.exponent) else sw.exponent}
    return Result(
        ["delta", "re_lambda", "im_lambda", "drift"], rows, summary,
        {"trajectory": (["delta", "re_lambda", "im_lambda"], [r[:3] for r in rows])},
    )


def cmd_perturb(cfg, threads=1):
    p = cfg.perturb
    others = [p["medium1"]] if "medium1" in p else contrast_family(cfg.medium, p["shell"], p["ts"])
    labels = ["medium1"] if "medium1" in p else [complex(t) for t in p["ts"]]

    def one(med):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResonanceWarning)
            return epsilon_perturb(cfg.medium, med, cfg.k, cfg.delta, cfg.l_max)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        tables = list(pool.map(one, others))
    rows, family = [], []
    for label, tab in zip(labels, tables):
        tag = label if isinstance(label, str) else _complex_tag(label)
        for l, a, b, d in zip(tab.degrees, tab.lam0, tab.lam1, tab.distances):
            rows.append([tag, int(l), a.real, a.imag, b.real, b.imag, d])
        family.append({
            "member": label, "hausdorff": tab.hausdorff, "sup_norm": tab.sup_norm,
            "lp_norm": tab.lp_norm, "max_distance": float(np.max(tab.distances, initial=0.0)),
        })
    return Result(
        ["member", "l", "re_lambda0", "im_lambda0", "re_lambda1", "im_lambda1", "distance"],
        rows, {"family": family},
    )


def cmd_detect(cfg, threads=1):
    d = cfg.detect
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonanceWarning)
        direct = {r.l: r.lam for r in spectrum(cfg.medium, cfg.k, cfg.delta, max(d["degrees"]))}
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(d["degrees"]))

    def one(args):
        l, seq = args
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IllPosedParameterWarning)
            lam = detect_eigenvalues(
                cfg.medium, cfg.k, cfg.delta, l, d["method"], d["noise"],
                np.random.default_rng(seq), d["window"],
            )
        return lam, [str(w.message) for w in caught]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        found = list(pool.map(one, zip(d["degrees"], seeds)))
    rows, warn_rows = [], []
    # the grid search defaults to a window reaching below the real axis
    window_below = d["method"] == "grid" and (d["window"] is None or d["window"][1][0] < 0)
    for l, (lam, msgs) in zip(d["degrees"], found):
        ref = direct.get(l, complex("nan"))
        flag = window_below or bool(msgs)
        rows.append([l, lam.real, lam.imag, ref.real, ref.imag, abs(lam - ref), int(flag)])
        if flag:
            warn_rows.append({"l": l, "message": "search extends below Im(lambda) = 0"})
    summary = {
        "method": d["method"], "noise": d["noise"],
        "max_abs_error": max((r[5] for r in rows), default=0.0),
        "warnings": warn_rows,
    }
    return Result(
        ["l", "re_detected", "im_detected", "re_direct", "im_direct", "abs_error", "warning"],
        rows, summary,
    )


def cmd_check_k(cfg, threads=1):
    rep = check_assumption(cfg.medium, cfg.k, cfg.l_max)
    rows = []
    for pol, degs, res in (("TM", rep.tm_degrees, rep.residuals_tm),
                           ("TE", rep.te_degrees, rep.residuals_te)):
        for l, r in enumerate(res, start=1):
            rows.append([l, pol, r, int(l in degs)])
    summary = {
        "k": cfg.k, "all_clear": rep.all_clear,
        "tm_degrees": list(rep.tm_degrees), "te_degrees": list(rep.te_degrees),
    }
    return Result(["l", "polarization", "residual", "flagged"], rows, summary, ok=rep.all_clear)


def cmd_selftest(seed=0, threads=1, force_fail=False):
    with ThreadPoolExecutor(max_workers=threads) as pool:
        nested = list(pool.map(lambda i: run_check(i, seed), range(len(SUITE))))
    checks = [c for group in nested for c in group]
    if force_fail:
        checks.append(Check("forced_failure", 1.0, 0.0, False, "requested with --force-fail"))
    rows = [[c.name, c.value, c.tol, int(c.passed)] for c in checks]
    summary = {
        "seed": seed, "passed": all(c.passed for c in checks),
        "invariants": [c.as_dict() for c in checks],
    }
    return Result(["name", "value", "tol", "passed"], rows, summary, ok=summary["passed"])


COMMANDS = {
    "eigs": cmd_eigs,
    "sweep-delta": cmd_sweep_delta,
    "perturb": cmd_perturb,
    "detect": cmd_detect,
    "check-k": cmd_check_k,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="layered-stekloff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["selftest"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "selftest")
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=FORMATS, default="both")
        p.add_argument("--plots", action="store_true", help="also write .dat plot data")
        if name == "selftest":
            p.add_argument("--force-fail", action="store_true")
    return parser


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        return _fail(2, "--threads must be >= 1")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        return _fail(2, "--seed must be an unsigned 64-bit integer")
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            return _fail(2, f"cannot read config: {exc}")
        if not isinstance(raw, dict):
            return _fail(2, "configuration must be a JSON object")
    out = args.out or Path(raw.get("out", "."))
    if args.seed is not None:
        raw = {**raw, "seed": args.seed}

    start = time.perf_counter()
    try:
        if args.command == "selftest":
            seed = raw.get("seed", 0)
            if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
                return _fail(2, f"seed must be a non-negative integer, got {seed!r}")
            result = cmd_selftest(seed, args.threads, args.force_fail)
        else:
            cfg = load_config(raw)
            result = COMMANDS[args.command](cfg, args.threads)
    except AssumptionViolated as exc:
        return _fail(2, f"assumption violated at degrees {list(exc.degrees)}")
    except InvalidInput as exc:
        return _fail(2, str(exc))
    except (NumericalFailure, StekloffError, ArithmeticError) as exc:
        return _fail(1, str(exc))
    elapsed = time.perf_counter() - start

    _write(out, args.command, result, args.format, args.plots, raw, elapsed)
    if not result.ok:
        if args.command == "check-k":
            return _fail(2, "wavenumber violates the solvability assumption")
        return _fail(1, "self-test failures: " + ", ".join(
            r[0] for r in result.rows if not r[3]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
