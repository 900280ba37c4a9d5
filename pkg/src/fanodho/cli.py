"""Command-line front end.

Every subcommand reads a flat configuration (TOML, dotted keys or tables),
applies command-line overrides, runs one experiment and writes CSV or JSON.
Outputs are deterministic for a given configuration and seed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 violated validity or stability condition.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .classical_bath import EnsembleConfig, discretize_bath, fluctuating_force_stats, run_ensemble
from .discrete_oracle import build_quadratic_form, discrete_evolve_a, symplectic_diagonalize
from .dynamics import InitialState, shift_identity_check, classical_trajectory, damping_kernel_L, mean_position
from .errors import ConfigError, DomainError, FanodhoError, InstabilityError, ValidityError
from .full_diag import evolve_a_full, lineshape, lineshape_curves, rwa_reduction
from .rwa_diag import evolve_a_rwa, rwa_kernel
from .spectral import BathSpectrum, ModelParams

__all__ = ["DEFAULTS", "RunConfig", "load_config", "main"]

OUT_DIR_ENV = "FANODHO_OUT_DIR"

DEFAULTS = {
    "model.mass": 1.0,
    "model.omega0": 1.0,
    "model.gamma": 0.1,
    "model.cutoff": 50.0,
    "model.kT": 0.0,
    "model.hbar": 1.0,
    "bath.kind": "drude",
    "bath.table": "",
    "flags.counter_term": True,
    "flags.rwa": False,
    "flags.limit_mode": False,
    "grid.omega_min": 0.01,
    "grid.omega_max": 3.0,
    "grid.omega_points": 300,
    "grid.t_min": 0.0,
    "grid.t_max": 20.0,
    "grid.t_points": 101,
    "grid.gammas": [],
    "initial.q0": 1.0,
    "initial.p0": 0.0,
    "ensemble.N": 400,
    "ensemble.n_samples": 2000,
    "ensemble.dt": 0.0,
    "ensemble.seed": 0,
    "ensemble.omega_max": 0.0,
    "output.format": "csv",
    "output.path": "",
}


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(key, value):
    ref = DEFAULTS[key]
    try:
        if isinstance(ref, bool):
            if isinstance(value, str):
                low = value.strip().lower()
                if low not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return low in ("true", "1", "yes")
            if not isinstance(value, bool):
                raise ValueError(value)
            return value
        if isinstance(ref, int):
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if isinstance(ref, float):
            if isinstance(value, bool):
                raise ValueError(value)
            return float(value)
        if isinstance(ref, list):
            if isinstance(value, str):
                value = [x for x in value.split(",") if x.strip()]
            return [float(x) for x in value]
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @property
    def hash(self):
        blob = json.dumps(self.values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def params(self, gamma=None):
        v = self.values
        return ModelParams(mass=v["model.mass"], omega0=v["model.omega0"],
                           gamma=v["model.gamma"] if gamma is None else gamma,
                           cutoff=v["model.cutoff"], kT=v["model.kT"], hbar=v["model.hbar"])

    def spectrum(self, gamma=None):
        v = self.values
        g = v["model.gamma"] if gamma is None else gamma
        if v["bath.kind"] == "tabulated":
            if v["flags.limit_mode"]:
                raise ConfigError("flags.limit_mode does not apply to tabulated spectra")
            return BathSpectrum.from_csv(v["bath.table"], gamma=g)
        limit = v["flags.limit_mode"] or not math.isfinite(v["model.cutoff"])
        cutoff = v["model.cutoff"] if math.isfinite(v["model.cutoff"]) else 1.0
        return BathSpectrum(v["bath.kind"], g, cutoff, limit=limit)

    def omega_grid(self):
        v = self.values
        return np.linspace(v["grid.omega_min"], v["grid.omega_max"], v["grid.omega_points"])

    def t_grid(self):
        v = self.values
        return np.linspace(v["grid.t_min"], v["grid.t_max"], v["grid.t_points"])


def _validate(v):
    if v["bath.kind"] not in ("ohmic_sharp", "drude", "tabulated"):
        raise ConfigError(f"bath.kind must be ohmic_sharp, drude or tabulated, got {v['bath.kind']!r}")
    if v["bath.kind"] == "tabulated" and not v["bath.table"]:
        raise ConfigError("bath.table is required for a tabulated spectrum")
    if v["output.format"] not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    if not v["grid.omega_min"] > 0 or not v["grid.omega_max"] > v["grid.omega_min"]:
        raise ConfigError("need 0 < grid.omega_min < grid.omega_max")
    if not v["grid.t_min"] >= 0 or not v["grid.t_max"] >= v["grid.t_min"]:
        raise ConfigError("need 0 <= grid.t_min <= grid.t_max")
    for key in ("grid.omega_points", "grid.t_points", "ensemble.N", "ensemble.n_samples"):
        if v[key] < 1:
            raise ConfigError(f"{key} must be >= 1")
    if any(g <= 0 for g in v["grid.gammas"]):
        raise ConfigError("grid.gammas must be positive")
    if not 0 <= v["ensemble.seed"] < 2 ** 64:
        raise ConfigError("ensemble.seed must be a 64-bit unsigned integer")
    for key in ("ensemble.dt", "ensemble.omega_max"):
        if v[key] < 0:
            raise ConfigError(f"{key} must be >= 0 (0 selects the default)")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cfg = RunConfig(v)
            cfg.params()
            if v["bath.kind"] != "tabulated":
                cfg.spectrum()
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, overrides=None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``overrides`` (dotted keys)."""
    values = dict(DEFAULTS)
    layers = []
    if path:
        try:
            with open(path, "rb") as fh:
                layers.append(_flatten(tomllib.load(fh)))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from None
    if overrides:
        layers.append(dict(overrides))
    for layer in layers:
        for key, val in layer.items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown key {key!r}")
            values[key] = _coerce(key, val)
    _validate(values)
    return RunConfig(values)


# --------------------------------------------------------------------------
# output

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(y) for y in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def render(columns: dict, metrics: dict, cfg: RunConfig, fmt: str) -> str:
    if fmt == "json":
        obj = {"config_hash": cfg.hash}
        obj.update({k: _jsonable(v) for k, v in metrics.items()})
        obj.update({k: _jsonable(np.asarray(v)) for k, v in columns.items()})
        return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    lines = [f"# config-hash: {cfg.hash}"]
    lines += [f"# {k}: {_fmt(v) if not isinstance(v, str) else v}" for k, v in metrics.items()]
    lines.append(",".join(names))
    cols = [np.asarray(columns[k]) for k in names]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in cols))
    return "\n".join(lines) + "\n"


def svg_plot(x, series: dict, title: str, width=640, height=400) -> str:
    """A self-contained SVG line plot of ``series`` against ``x``."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite = np.concatenate([y[np.isfinite(y)] for y in ys.values()]) if ys else np.zeros(1)
    y0, y1 = float(finite.min()), float(finite.max())
    if y1 == y0:
        y1 = y0 + 1.0
    x0, x1 = float(x.min()), float(x.max()) if x.size else 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 50
    sx = lambda v: pad + (v - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda v: height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="black"/>',
             f'<text x="{pad}" y="{height - pad + 15}" font-size="10">{x0:.3g}</text>',
             f'<text x="{width - pad}" y="{height - pad + 15}" font-size="10" text-anchor="end">{x1:.3g}</text>',
             f'<text x="{pad - 5}" y="{height - pad}" font-size="10" text-anchor="end">{y0:.3g}</text>',
             f'<text x="{pad - 5}" y="{pad + 10}" font-size="10" text-anchor="end">{y1:.3g}</text>']
    for i, (name, y) in enumerate(ys.items()):
        ok = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        col = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{width - pad - 5}" y="{pad + 15 + 14 * i}" font-size="11" '
                     f'text-anchor="end" fill="{col}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --------------------------------------------------------------------------
# subcommands; each returns (columns, metrics, plot) with plot = (x, series) or None

def cmd_lineshape(cfg: RunConfig):
    gammas = cfg["grid.gammas"] or [cfg["model.gamma"]]
    w = cfg.omega_grid()
    cols = {k: [] for k in ("gamma", "omega", "L_sq", "A_L", "B_L", "C_L")}
    metrics, series = {}, {}
    peaks = []
    for g in gammas:
        k = lineshape(cfg.spectrum(g), cfg.params(g), counter_term=cfg["flags.counter_term"])
        cur = lineshape_curves(k, w)
        cols["gamma"].append(np.full(w.size, g))
        for name in ("omega", "L_sq", "A_L", "B_L", "C_L"):
            cols[name].append(cur[name])
        pk, hw = k.peak()
        peaks.append(pk)
        tag = f"g{g:g}"
        metrics[f"peak_omega_{tag}"] = pk
        metrics[f"hwhm_{tag}"] = hw
        metrics[f"C_at_omega0_{tag}"] = float(lineshape_curves(k, [cfg["model.omega0"]])["C_L"][0])
        series[f"|L|^2 {tag}"] = cur["L_sq"]
    metrics["peaks_decreasing_in_gamma"] = bool(
        all(a > b for (ga, a), (gb, b) in zip(sorted(zip(gammas, peaks))[:-1], sorted(zip(gammas, peaks))[1:]))
    )
    cols = {k: np.concatenate(v) for k, v in cols.items()}
    return cols, metrics, (w, series)


def cmd_evolve(cfg: RunConfig):
    t = cfg.t_grid()
    s, p = cfg.spectrum(), cfg.params()
    rows = {k: np.empty(t.size) for k in ("t", "re_c_a", "im_c_a", "re_c_adag", "im_c_adag",
                                          "abs_c_a", "sum_rule_residual")}
    if cfg["flags.rwa"]:
        kern = rwa_kernel(s, p, "H_R" if cfg["flags.counter_term"] else "F")
        run = lambda x: evolve_a_rwa(kern, x, sum_rule=not (s.is_parametric and s.limit))
    else:
        kern = lineshape(s, p, counter_term=cfg["flags.counter_term"])
        has_rule = kern.response is not None

        def run(x):
            return evolve_a_full(kern, x, sum_rule=has_rule)
    for i, x in enumerate(t):
        co = run(float(x))
        rows["t"][i] = x
        rows["re_c_a"][i], rows["im_c_a"][i] = co.c_a.real, co.c_a.imag
        rows["re_c_adag"][i], rows["im_c_adag"][i] = complex(co.c_adag).real, complex(co.c_adag).imag
        rows["abs_c_a"][i] = abs(co.c_a)
        rows["sum_rule_residual"][i] = abs(co.sum_rule - 1.0) if co.sum_rule is not None else np.nan
    res = rows["sum_rule_residual"]
    metrics = {"max_sum_rule_residual": float(np.nanmax(res)) if np.any(np.isfinite(res)) else float("nan"),
               "rwa": cfg["flags.rwa"]}
    return rows, metrics, (t, {"|c_a|": rows["abs_c_a"]})


def cmd_mean_q(cfg: RunConfig):
    t = cfg.t_grid()
    p = cfg.params()
    q0, p0 = cfg["initial.q0"], cfg["initial.p0"]
    bare = np.asarray(mean_position(p, InitialState(q0, p0, "bare"), t))
    shifted = np.asarray(mean_position(p, InitialState(q0, p0, "shifted"), t))
    classical = np.asarray(classical_trajectory(p, q0, p0, t))
    twogl = 2.0 * p.gamma * q0 * np.asarray(damping_kernel_L(p, t))
    cols = dict(t=t, bare=bare, shifted=shifted, classical=classical,
                classical_minus_bare=classical - bare, two_gamma_q0_L=twogl)
    metrics = {"max_abs_dephasing_residual": float(np.max(np.abs(classical - bare - twogl))),
               "max_abs_shifted_minus_classical": float(np.max(np.abs(shifted - classical)))}
    return cols, metrics, (t, {"bare": bare, "shifted": shifted, "classical": classical})


def cmd_rwa_check(cfg: RunConfig):
    k = lineshape(cfg.spectrum(), cfg.params(), counter_term=cfg["flags.counter_term"])
    rep = rwa_reduction(k)
    metrics = dict(valid=rep.valid, threshold=rep.threshold, max_damping_ratio=rep.max_damping_ratio,
                   max_shift_ratio=rep.max_shift_ratio, max_rel_deviation=rep.max_rel_deviation,
                   shift_ratio_H_over_F=rep.shift_ratio_H_over_F if rep.shift_ratio_H_over_F is not None
                   else float("nan"),
                   condition=rep.reduced_condition)
    cols = dict(omega=rep.omega, alpha_tilde_sq=rep.alpha_tilde_sq, lineshape_weight=rep.lineshape_weight)
    return cols, metrics, (rep.omega, {"reduced": rep.alpha_tilde_sq, "full": rep.lineshape_weight})


def _ensemble_setup(cfg: RunConfig):
    s, p = cfg.spectrum(), cfg.params()
    wmax = cfg["ensemble.omega_max"] or None
    bath = discretize_bath(s, p, cfg["ensemble.N"], omega_max=wmax)
    dt = cfg["ensemble.dt"] or 0.09 / float(bath.omegas.max())
    return s, p, bath, dt


def cmd_langevin(cfg: RunConfig):
    s, p, bath, dt = _ensemble_setup(cfg)
    q0, p0 = cfg["initial.q0"], cfg["initial.p0"]
    tmax = cfg["grid.t_max"] if cfg["grid.t_max"] > 0 else 5.0 / p.gamma
    out = {}
    metrics = {"recurrence_time": bath.recurrence_time, "dt": dt, "N": bath.N}
    for variant in ("shifted", "bare"):
        ec = EnsembleConfig(n_samples=cfg["ensemble.n_samples"], kT=p.kT, seed=cfg["ensemble.seed"],
                            dt=dt, t_max=tmax, ic_variant=variant, n_out=cfg["grid.t_points"])
        res = run_ensemble(bath, p, ec, q0, p0)
        fs = fluctuating_force_stats(bath, p, res, q0)
        ref = np.asarray(mean_position(p, InitialState(q0, p0, variant), res.times))
        out[variant] = (res, ref)
        metrics[f"{variant}_max_z"] = float(np.max(np.abs(res.q_mean - ref)[1:] / res.q_stderr[1:])) \
            if p.kT > 0 else float("nan")
        metrics[f"{variant}_force_mean_max_z"] = fs.max_abs_mean_over_se
        metrics[f"{variant}_impulse"] = res.impulse_mean
        metrics[f"{variant}_impulse_stderr"] = res.impulse_stderr
        metrics[f"{variant}_integrated_autocorr"] = fs.integrated_autocorr
        metrics[f"{variant}_integrated_autocorr_stderr"] = fs.integrated_autocorr_stderr
    metrics["target_autocorr"] = 4.0 * p.mass * p.gamma * p.kT
    metrics["kick_impulse_difference"] = out["bare"][0].impulse_mean - out["shifted"][0].impulse_mean
    metrics["target_kick_impulse"] = -2.0 * p.mass * p.gamma * q0
    rs, ref_s = out["shifted"]
    rb, ref_b = out["bare"]
    cols = dict(t=rs.times, q_shifted=rs.q_mean, se_shifted=rs.q_stderr, ref_shifted=ref_s,
                q_bare=rb.q_mean, se_bare=rb.q_stderr, ref_bare=ref_b)
    return cols, metrics, (rs.times, {"shifted": rs.q_mean, "bare": rb.q_mean, "classical": ref_s})


def cmd_oracle_compare(cfg: RunConfig):
    s, p = cfg.spectrum(), cfg.params()
    wmax = cfg["ensemble.omega_max"] or 8.0 * p.omega0
    bath = discretize_bath(s, p, cfg["ensemble.N"], omega_max=wmax)
    rwa, ct = cfg["flags.rwa"], cfg["flags.counter_term"]
    modes = symplectic_diagonalize(build_quadratic_form(bath, p, rwa=rwa, counter_term=ct and not rwa))
    if rwa:
        kern = rwa_kernel(s, p, "F")
        cont = lambda x: evolve_a_rwa(kern, x).c_a
    else:
        kern = lineshape(s, p, counter_term=ct)
        cont = lambda x: evolve_a_full(kern, x).c_a
    t = cfg.t_grid()
    cc = np.array([abs(cont(float(x))) for x in t])
    dd = [discrete_evolve_a(modes, float(x)) for x in t]
    dc = np.array([abs(d.c_a) for d in dd])
    rule = np.array([abs(d.sum_rule - 1.0) for d in dd])
    rel = np.abs(dc - cc) / np.maximum(cc, 1e-300)
    window = t <= min(5.0 / p.gamma, np.pi / bath.spacing)
    metrics = {"recurrence_time": bath.recurrence_time, "comparison_horizon": min(5.0 / p.gamma, np.pi / bath.spacing),
               "max_rel_dev_in_window": float(np.max(rel[window])) if window.any() else float("nan"),
               "paraunitarity_residual": modes.paraunitarity_residual(),
               "max_discrete_sum_rule_residual": float(np.max(rule)),
               "rwa": rwa}
    cols = dict(t=t, abs_c_a_continuum=cc, abs_c_a_discrete=dc, rel_dev=rel, discrete_sum_rule_residual=rule)
    return cols, metrics, (t, {"continuum": cc, "discrete": dc})


def cmd_shift_identities(cfg: RunConfig):
    p = cfg.params()
    s = BathSpectrum.ohmic_sharp(p.gamma, limit=True)
    k = lineshape(s, p, counter_term=True)
    t = cfg.t_grid()
    t = t[t > 0]
    rep = shift_identity_check(k, t)
    cols = dict(t=rep.t, I1=rep.I1, I2=rep.I2, two_gamma_L=rep.two_gamma_L,
                residual=rep.I1 + rep.I2 - rep.two_gamma_L)
    metrics = dict(I1_max_abs=rep.I1_max_abs, H_vs_2gammaL_max_rel=rep.H_vs_2gammaL_max_rel,
                   H_vs_2gammaL_max_abs=rep.H_vs_2gammaL_max_abs)
    return cols, metrics, (rep.t, {"I1+I2": rep.I1 + rep.I2, "2 gamma L": rep.two_gamma_L})


COMMANDS = {
    "lineshape": (cmd_lineshape, "lineshape |L|^2 with A, B, C weighted curves"),
    "evolve": (cmd_evolve, "c_a(t), c_adag(t) and the commutator sum-rule residual"),
    "mean-q": (cmd_mean_q, "bare, shifted and classical mean trajectories"),
    "rwa-check": (cmd_rwa_check, "validity report for the rotating-wave reduction"),
    "langevin": (cmd_langevin, "classical ensemble statistics"),
    "oracle-compare": (cmd_oracle_compare, "continuum against discrete-bath |c_a(t)|"),
    "shift-identities": (cmd_shift_identities, "residuals of the shifted-preparation identities"),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="fanodho", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="TOML configuration file")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--omega0", type=float)
        sp.add_argument("--cutoff", type=float, help="cutoff frequency ('inf' selects the limit)")
        sp.add_argument("--counter-term", action=argparse.BooleanOptionalAction, default=None)
        sp.add_argument("--rwa", action=argparse.BooleanOptionalAction, default=None)
        sp.add_argument("--limit", action=argparse.BooleanOptionalAction, default=None)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output file (default: stdout or $%s)" % OUT_DIR_ENV)
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--svg", help="also write an SVG line plot to this path")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key")
    return ap


def _overrides(args):
    ov = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        ov[k.strip()] = v.strip()
    direct = {"model.gamma": args.gamma, "model.omega0": args.omega0, "model.cutoff": args.cutoff,
              "flags.counter_term": args.counter_term, "flags.rwa": args.rwa,
              "flags.limit_mode": args.limit, "ensemble.seed": args.seed,
              "output.format": args.format, "output.path": args.out}
    ov.update({k: v for k, v in direct.items() if v is not None})
    return ov


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    fn = COMMANDS[args.command][0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cols, metrics, plot = fn(cfg)
    except (InstabilityError, ValidityError) as exc:
        print(f"validity error: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FanodhoError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    text = render(cols, metrics, cfg, cfg["output.format"])
    path = cfg["output.path"]
    if not path and os.environ.get(OUT_DIR_ENV):
        path = os.path.join(os.environ[OUT_DIR_ENV], f"{args.command}.{cfg['output.format']}")
    if path:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.svg and plot is not None:
        with open(args.svg, "w") as fh:
            fh.write(svg_plot(plot[0], plot[1], args.command))
    return 0


if __name__ == "__main__":
    sys.exit(main())
