"""Reproducible experiment driver.

Subcommands: tail, ctrw, fit, compare, boltzmann, fracdiff, chain.  Each run
takes a YAML config (``--config``), overridable key by key with repeated
``--set dotted.key=value`` flags; ``--seed``, ``--out`` and ``--threads``
override their config keys last.  Every artifact starts with '#'-prefixed
metadata (config echo, version, master seed) and is byte-identical across
reruns and thread counts.  Exit codes: 0 success, 1 config error, 2
statistical precondition failure, 3 numerical guard.
"""

import argparse
import json
import math
import os
import sys

import numpy as np
import yaml

from . import __version__, boltzmann, chain, fracdiff, kinetic, scaling
from .dispersion import (ModelParams, PhononState, jump_observable_arrays,
                         tail_exponent, tail_plateau)
from .errors import ConfigError, NumericalGuardError, PreconditionError
from .rng import RngStream

_FLOAT_FMT = "%.16e"  # 17 significant digits: exact float64 round trip


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return _FLOAT_FMT % float(x)


def write_csv(path, columns, rows, meta):
    with open(path, "w", newline="\n") as fh:
        for key in sorted(meta):
            fh.write(f"# {key} = {meta[key]}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_json(path, payload, meta):
    doc = {"meta": meta, **payload}
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _deep_update(base, extra):
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], val)
        else:
            base[key] = val
    return base


def _apply_set(cfg, assignment):
    if "=" not in assignment:
        raise ConfigError(f"--set needs KEY=VALUE, got {assignment!r}")
    key, _, raw = assignment.partition("=")
    node = cfg
    parts = key.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot descend into {key!r}")
    node[parts[-1]] = yaml.safe_load(raw)


def load_config(args, defaults):
    cfg = json.loads(json.dumps(defaults))  # deep copy
    if args.config is not None:
        try:
            with open(args.config) as fh:
                loaded = yaml.safe_load(fh)
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        unknown = set(loaded) - set(cfg) - {"seed", "out", "threads"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        _deep_update(cfg, loaded)
    for assignment in args.set or []:
        _apply_set(cfg, assignment)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if args.threads is not None:
        cfg["threads"] = args.threads
    cfg.setdefault("seed", 0)
    cfg.setdefault("out", ".")
    cfg.setdefault("threads", 0)
    return cfg


def _meta(cfg):
    # out/threads are execution environment, not experiment identity; they
    # must not break byte-identity of artifacts across runs
    echo = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    return {"config": json.dumps(echo, sort_keys=True,
                                 separators=(",", ":")),
            "version": __version__, "master_seed": cfg["seed"]}


def _params(cfg):
    try:
        return ModelParams(float(cfg["bfield"]), float(cfg["gamma"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad model parameters: {exc}") from exc


def _prepare(cfg):
    os.makedirs(cfg["out"], exist_ok=True)
    if cfg["threads"]:
        kinetic.set_threads(int(cfg["threads"]))
    return RngStream(int(cfg["seed"]))


TAIL_DEFAULTS = {
    "bfield": 1.0, "gamma": 1.0, "samples": 1000000, "k_fraction": 0.01,
    "plateau_lambdas": [1e3, 1e4, 1e5],
}


def cmd_tail(cfg):
    """Sample the jump observable under the stationary law; Hill report."""
    params = _params(cfg)
    root = _prepare(cfg)
    ks, branches = kinetic.sample_pi(params, root.substream(1),
                                     size=int(cfg["samples"]))
    psi = jump_observable_arrays(ks, branches, params)
    report = scaling.hill_tail_index(psi, float(cfg["k_fraction"]))
    sensitivity = {}
    for frac in (0.005, 0.02):
        try:
            sensitivity[str(frac)] = \
                scaling.hill_tail_index(psi, frac).hill_estimate
        except PreconditionError:
            sensitivity[str(frac)] = None
    plateaus = {str(lam): tail_plateau(float(lam), params)
                for lam in cfg["plateau_lambdas"]}
    meta = _meta(cfg)
    write_csv(os.path.join(cfg["out"], "tail_samples.csv"),
              ["sample_index", "k", "branch", "psi"],
              ((i, ks[i], int(branches[i]), psi[i]) for i in range(len(psi))),
              meta)
    write_json(os.path.join(cfg["out"], "tail_report.json"), {
        "hill_estimate": report.hill_estimate,
        "hill_ci": list(report.hill_ci),
        "k_fraction": report.k_fraction,
        "hill_sensitivity": sensitivity,
        "n_samples": report.n_samples,
        "tail_exponent_expected": tail_exponent(params),
        "plateau": plateaus,
    }, meta)
    return 0


CTRW_DEFAULTS = {
    "bfield": 1.0, "gamma": 1.0, "t": 1.0, "n_list": [1000, 4000],
    "paths": 100000, "start_k": 0.2, "start_branch": 1,
}


def cmd_ctrw(cfg):
    """Ensembles of scaled endpoints, one CSV row per path."""
    params = _params(cfg)
    root = _prepare(cfg)
    start = PhononState(float(cfg["start_k"]), int(cfg["start_branch"]))
    t = float(cfg["t"])
    rows = []
    for j, n_scale in enumerate(cfg["n_list"]):
        n_scale = float(n_scale)
        ens = kinetic.ctrw_endpoint_ensemble(
            start.k, start.branch, n_scale * t, params,
            root.substream(100 + j), int(cfg["paths"]))
        scaled = n_scale ** (-kinetic.scaling_exponent(params)) * ens.w
        for p in range(scaled.size):
            rows.append((p, n_scale, t, scaled[p], int(ens.n_jumps[p])))
    write_csv(os.path.join(cfg["out"], "ctrw_endpoints.csv"),
              ["path_index", "n_scale", "t", "scaled_endpoint", "n_jumps"],
              rows, _meta(cfg))
    return 0


FIT_DEFAULTS = {
    "input": None, "t": 1.0, "exponent0": None, "n_select": None,
    "bfield": 1.0, "gamma": 1.0,
}


def _read_endpoint_csv(path):
    rows = []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise ConfigError(f"no header in {path}")
    idx = {name: i for i, name in enumerate(header)}
    n_scales = np.array([float(r[idx["n_scale"]]) for r in rows])
    endpoints = np.array([float(r[idx["scaled_endpoint"]]) for r in rows])
    return n_scales, endpoints


def cmd_fit(cfg):
    """Stable-law characteristic-function fit of an endpoint ensemble."""
    if not cfg.get("input"):
        raise ConfigError("fit needs input: path to a ctrw endpoint CSV")
    params = _params(cfg)
    _prepare(cfg)
    n_scales, endpoints = _read_endpoint_csv(cfg["input"])
    select = cfg.get("n_select")
    pick = n_scales == (np.max(n_scales) if select is None else float(select))
    exponent0 = cfg.get("exponent0")
    if exponent0 is None:
        exponent0 = 5.0 / 3.0 if params.bfield != 0.0 else 1.5
    fit = scaling.fit_stable_charfn(endpoints[pick], float(cfg["t"]),
                                    exponent0=float(exponent0))
    write_json(os.path.join(cfg["out"], "stable_fit.json"), {
        "exponent": fit.exponent,
        "d_constant": fit.d_constant,
        "r_squared": fit.r_squared,
        "xi_range": list(fit.xi_range),
        "exponent0": float(exponent0),
        "n_paths": int(pick.sum()),
    }, _meta(cfg))
    return 0


BOLTZMANN_DEFAULTS = {
    "bfield": 1.0, "gamma": 1.0, "n_scale": 1000.0, "t": 1.0,
    "paths": 20000, "u0": {"y_center": 0.0, "y_sigma": 1.0},
    "points": [[0.0, 0.2, 1]],
    "kaverage_y": [],
    "kaverage_paths": 50000,
}


def _datum(cfg):
    u0cfg = cfg.get("u0") or {}
    return boltzmann.InitialDatum(
        y_center=float(u0cfg.get("y_center", 0.0)),
        y_sigma=float(u0cfg.get("y_sigma", 1.0)))


def cmd_boltzmann(cfg):
    """Feynman-Kac point values and k-averages of the scaled density."""
    params = _params(cfg)
    root = _prepare(cfg)
    u0 = _datum(cfg)
    n_scale, t = float(cfg["n_scale"]), float(cfg["t"])
    rows = []
    for j, (y, k, branch) in enumerate(cfg["points"]):
        value, err = boltzmann.evaluate_density(
            float(y), PhononState(float(k), int(branch)), n_scale, t, u0,
            int(cfg["paths"]), params, root.substream(200 + j))
        rows.append((float(y), float(k), int(branch), n_scale, t, value, err))
    meta = _meta(cfg)
    write_csv(os.path.join(cfg["out"], "boltzmann_solution.csv"),
              ["y", "k", "branch", "n_scale", "t", "value", "stderr"],
              rows, meta)
    if cfg["kaverage_y"]:
        rows = []
        for j, y in enumerate(cfg["kaverage_y"]):
            value, err = boltzmann.k_averaged_density(
                float(y), n_scale, t, u0, int(cfg["kaverage_paths"]), params,
                root.substream(300 + j))
            rows.append((float(y), n_scale, t, value, err))
        write_csv(os.path.join(cfg["out"], "boltzmann_kaverage.csv"),
                  ["y", "n_scale", "t", "value", "stderr"], rows, meta)
    return 0


FRACDIFF_DEFAULTS = {
    "half_length": 200.0, "n_points": 16384, "d_constant": 1.0,
    "s_half": 5.0 / 6.0, "times": [1.0],
    "u0": {"y_center": 0.0, "y_sigma": 1.0, "mass": 1.0},
}


def cmd_fracdiff(cfg):
    """Evolve a Gaussian datum under the fractional heat semigroup."""
    _prepare(cfg)
    u0cfg = cfg["u0"]
    grid = fracdiff.gaussian_grid(float(cfg["half_length"]),
                                  int(cfg["n_points"]),
                                  center=float(u0cfg.get("y_center", 0.0)),
                                  sigma=float(u0cfg.get("y_sigma", 1.0)),
                                  mass=float(u0cfg.get("mass", 1.0)))
    meta = _meta(cfg)
    rows = []
    for t in cfg["times"]:
        evolved = fracdiff.evolve(grid, float(cfg["d_constant"]),
                                  float(cfg["s_half"]), float(t))
        for y, v in zip(evolved.y, evolved.values):
            rows.append((float(t), y, v))
    write_csv(os.path.join(cfg["out"], "fracdiff_solution.csv"),
              ["t", "y", "value"], rows, meta)
    return 0


COMPARE_DEFAULTS = {
    "bfield": 1.0, "gamma": 1.0, "n_scale": 10000.0, "t": 1.0,
    "d_constant": None, "paths_per_point": 20000,
    "y_grid": {"lo": -4.0, "hi": 4.0, "n": 21},
    "u0": {"y_center": 0.0, "y_sigma": 1.0},
    "half_length": 200.0, "n_points": 16384,
}


def cmd_compare(cfg):
    """Monte Carlo k-averages against the fractional-diffusion reference."""
    if cfg.get("d_constant") is None:
        raise ConfigError("compare needs d_constant (fit one with "
                          "ctrw + fit, or set it explicitly)")
    params = _params(cfg)
    root = _prepare(cfg)
    u0 = _datum(cfg)
    d_constant = float(cfg["d_constant"])
    n_scale, t = float(cfg["n_scale"]), float(cfg["t"])
    g = cfg["y_grid"]
    ys = np.linspace(float(g["lo"]), float(g["hi"]), int(g["n"]))

    ref0 = fracdiff.from_callable(u0.ubar0, float(cfg["half_length"]),
                                  int(cfg["n_points"]))
    s_half = 5.0 / 6.0 if params.bfield != 0.0 else 0.75
    ref_t = fracdiff.evolve(ref0, d_constant, s_half, t)

    rows = []
    worst_rel = 0.0
    sq_sum = 0.0
    for j, y in enumerate(ys):
        value, err = boltzmann.k_averaged_density(
            float(y), n_scale, t, u0, int(cfg["paths_per_point"]), params,
            root.substream(400 + j))
        ref = float(ref_t.eval_trig([y])[0])
        diff = value - ref
        rows.append((float(y), value, err, ref, diff))
        scale = max(abs(ref), 1e-300)
        if abs(diff) > 3.0 * err:
            worst_rel = max(worst_rel, abs(diff) / scale)
        sq_sum += diff * diff
    meta = _meta(cfg)
    write_csv(os.path.join(cfg["out"], "compare_points.csv"),
              ["y", "mc_value", "mc_stderr", "reference", "difference"],
              rows, meta)
    summary = {
        "max_rel_error_beyond_3sigma": worst_rel,
        "l2_distance": math.sqrt(sq_sum * (ys[1] - ys[0]) if len(ys) > 1
                                 else sq_sum),
        "d_constant": d_constant,
        "s_half": s_half,
    }
    if d_constant == 0.0:
        summary["note"] = ("reference frozen at the initial profile (D=0); "
                           "mismatch with the transported Monte Carlo "
                           "solution is expected")
    write_json(os.path.join(cfg["out"], "compare_summary.json"), summary,
               meta)
    return 0


CHAIN_DEFAULTS = {
    "bfield": 1.0, "gamma": 1.0, "n_sites": 256, "epsilon": 0.125,
    "dt": 0.02, "t_macro": 0.5, "ensemble": 8,
    "init": {"kind": "thermal", "temperature": None},
    "mode_shifts": [0],
}


def cmd_chain(cfg):
    """Microscopic ring ensemble: energy series and Wigner estimates."""
    params = _params(cfg)
    root = _prepare(cfg)
    n_sites = int(cfg["n_sites"])
    eps = float(cfg["epsilon"])
    dt = float(cfg["dt"])
    t_macro = float(cfg["t_macro"])
    n_ens = int(cfg["ensemble"])
    init_cfg = cfg.get("init") or {}
    if init_cfg.get("kind", "thermal") != "thermal":
        raise ConfigError("only thermal initial ensembles are configured")
    temperature = init_cfg.get("temperature")

    energy_rows = []
    finals = []
    for traj in range(n_ens):
        state = chain.thermal_state(n_sites, params, eps,
                                    root.substream(500 + traj),
                                    temperature=temperature)
        energy_rows.append((traj, 0.0, state.energy()))

        def record(step_idx, st, traj=traj):
            energy_rows.append((traj, (step_idx + 1) * dt, st.energy()))

        finals.append(chain.run_kinetic_horizon(
            state, t_macro, dt, root.substream(600 + traj), callback=record))
    meta = _meta(cfg)
    write_csv(os.path.join(cfg["out"], "chain_energy.csv"),
              ["trajectory", "t_micro", "energy"], energy_rows, meta)

    wig = chain.estimate_wigner(finals, shifts=cfg["mode_shifts"])
    rows = []
    k_values = chain.ring_wavenumbers(n_sites)
    for s_idx, shift in enumerate(wig.shifts):
        for branch in (0, 1):
            for j in range(n_sites):
                val = wig.values[s_idx, branch, j]
                rows.append((int(shift), wig.p_values[s_idx], k_values[j],
                             branch + 1, val.real, val.imag,
                             wig.stderr[s_idx, branch, j]))
    write_csv(os.path.join(cfg["out"], "chain_wigner.csv"),
              ["mode_shift", "p", "k", "branch", "re", "im", "stderr"],
              rows, meta)
    return 0


_COMMANDS = {
    "tail": (cmd_tail, TAIL_DEFAULTS),
    "ctrw": (cmd_ctrw, CTRW_DEFAULTS),
    "fit": (cmd_fit, FIT_DEFAULTS),
    "compare": (cmd_compare, COMPARE_DEFAULTS),
    "boltzmann": (cmd_boltzmann, BOLTZMANN_DEFAULTS),
    "fracdiff": (cmd_fracdiff, FRACDIFF_DEFAULTS),
    "chain": (cmd_chain, CHAIN_DEFAULTS),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magphon",
        description="Kinetic Monte Carlo and spectral solvers for anomalous "
                    "energy transport in a magnetically coupled chain")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (speed only, never results)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (dotted paths allowed)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    fn, defaults = _COMMANDS[args.command]
    try:
        cfg = load_config(args, defaults)
        return fn(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"statistical precondition failed: {exc}", file=sys.stderr)
        return 2
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
