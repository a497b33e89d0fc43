"""Command-line front end: ``fourierhedge {model inspect, decompose, hedge-error, backtest}``.

Runs are described by an INI file with the sections ``[model]``, ``[payoff]``,
``[horizon]``, ``[numeric]`` and ``[simulate]``; see ``fourierhedge --help``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import __version__
from .calculus import check_sc
from .decompose import _fmt, default_x_grid, fs, kw, ou_decompose, strategy_csv
from .errors import ConfigError, FourierHedgeError, ModelError
from .model import MODEL_KEYS, OUWrapper, accepted_model_keys, model_from_config
from .operators import OperatorContext
from .payoff import payoff_from_config
from .risk import j0_kernel, variance_error
from .simulate import STRATEGIES, backtest, simulate_paths

SCHEMA = "fourierhedge/1"

NUMERIC_DEFAULTS = {"quad_tol": 1e-8, "j0_quad_tol": 1e-6, "x_points": 201, "x_width": 8.0,
                    "t_points": 11}
SIMULATE_DEFAULTS = {"paths": 100000, "steps": 200, "seed": 0, "strategy": "vo-feedback",
                     "refine": "true"}
SECTIONS = {
    "model": None,  # depends on the family
    "payoff": {"payoff"},
    "horizon": {"t"},
    "numeric": set(NUMERIC_DEFAULTS),
    "simulate": set(SIMULATE_DEFAULTS),
}

KEY_HELP = """configuration keys (INI file):
  [model]     family = poisson | nig | vg | levy | time_changed_brownian | wiener_levy | ou
              poisson: lambda
              nig, vg: theta, beta, delta, mu (default 0)
              levy: b, c, jumps = (x, weight), ...; density = (x, value), ... (grid)
              time_changed_brownian: gamma = (t, value), ...; psi = (t, value), ...
              wiener_levy: base = <levy family> + its keys; knots = 0, t1, ..., tn; weights = w1, ..., wn (one per interval)
              ou: rate, base = <family> + its keys
  [payoff]    payoff = atoms [(u, w), ...]  |  self_quanto_put K=<strike> [truncation=1000] [step=0.05]
  [horizon]   T = <terminal time>
  [numeric]   quad_tol = 1e-8; j0_quad_tol = 1e-6; x_points = 201; x_width = 8 (std devs); t_points = 11
  [simulate]  paths = 100000; steps = 200; seed = 0; strategy = vo-feedback | fs-pure; refine = true
"""


@dataclass
class RunConfig:
    model: dict
    payoff: dict
    T: float
    numeric: dict = field(default_factory=lambda: dict(NUMERIC_DEFAULTS))
    simulate: dict = field(default_factory=lambda: dict(SIMULATE_DEFAULTS))
    lines: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def line(self, section: str, key: str) -> int | None:
        return self.lines.get((section, key))


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    out, section = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"^\[([^\]]+)\]$", s)
        if m:
            section = m.group(1).strip().lower()
            out[(section, "")] = n
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            out[(section, m.group(1).strip().lower())] = n
    return out


def _number(section, key, value, kind, lines):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key} must be {kind.__name__}, got {value!r}",
                          key=key, line=lines.get((section, key))) from None


def parse_config(text: str) -> RunConfig:
    lines = _key_lines(text)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed configuration: {exc.message if hasattr(exc, 'message') else exc}",
                          line=line) from None
    unknown = [s for s in cp.sections() if s.lower() not in SECTIONS]
    if unknown:
        s = unknown[0]
        raise ConfigError(f"unknown section [{s}]; expected {sorted(SECTIONS)}", line=lines.get((s.lower(), "")))
    secs = {s.lower(): {k.lower(): v for k, v in cp[s].items()} for s in cp.sections()}
    for req in ("model", "payoff", "horizon"):
        if req not in secs:
            raise ConfigError(f"missing section [{req}]")
    family = secs["model"].get("family", "").strip().lower()
    if family not in MODEL_KEYS:
        raise ConfigError(f"unknown model family {family!r}; expected one of {sorted(MODEL_KEYS)}",
                          key="family", line=lines.get(("model", "family")))
    allowed = {**SECTIONS, "model": accepted_model_keys(family)}
    for sec, kv in secs.items():
        for key in kv:
            if key not in allowed[sec]:
                raise ConfigError(f"unknown key in [{sec}]; accepted: {sorted(allowed[sec])}",
                                  key=key, line=lines.get((sec, key)))
    if "payoff" not in secs["payoff"]:
        raise ConfigError("[payoff] needs 'payoff = ...'", line=lines.get(("payoff", "")))
    if "t" not in secs["horizon"]:
        raise ConfigError("[horizon] needs 'T = ...'", line=lines.get(("horizon", "")))
    T = _number("horizon", "t", secs["horizon"]["t"], float, lines)
    numeric = dict(NUMERIC_DEFAULTS)
    for k, v in secs.get("numeric", {}).items():
        numeric[k] = _number("numeric", k, v, type(NUMERIC_DEFAULTS[k]), lines)
    sim = dict(SIMULATE_DEFAULTS)
    for k, v in secs.get("simulate", {}).items():
        sim[k] = v.strip() if isinstance(SIMULATE_DEFAULTS[k], str) else \
            _number("simulate", k, v, int, lines)
    if sim["strategy"] not in STRATEGIES:
        raise ConfigError(f"strategy must be one of {STRATEGIES}", key="strategy",
                          line=lines.get(("simulate", "strategy")))
    return RunConfig(secs["model"], secs["payoff"], T, numeric, sim, lines)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None


def _build(cfg: RunConfig):
    try:
        model = model_from_config(cfg.model)
    except KeyError as exc:
        key = exc.args[0]
        raise ConfigError(f"[model] missing required key for family {cfg.model.get('family')!r}",
                          key=key, line=cfg.line("model", "family")) from None
    except (ModelError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), key="family", line=cfg.line("model", "family")) from None
    try:
        mu = payoff_from_config(cfg.payoff)
    except ConfigError as exc:
        raise ConfigError(str(exc).split(" (key")[0], key="payoff", line=cfg.line("payoff", "payoff")) from None
    return model, mu


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _real(val, hermitian):
    return float(np.real(val)) if hermitian else _cplx(val)


# ---------------------------------------------------------------------------
# commands

def cmd_model_inspect(cfg: RunConfig) -> dict:
    model, _ = _build(cfg)
    T = cfg.T
    target = model.base if isinstance(model, OUWrapper) else model
    sc = check_sc(target, T, strict=False)
    out = {
        "schema": SCHEMA,
        "command": "model inspect",
        "family": model.name,
        "T": T,
        "psi_d1_0": _cplx(model.psi_d1(T, 0.0)),
        "psi_d2_0": _cplx(model.psi_d2(T, 0.0)),
        "sc_satisfied": bool(sc.satisfied),
        "sc_reason": sc.reason,
        "segments": [float(t) for t in sc.times],
        "alpha": [float(a.real) for a in sc.alpha_seg] if sc.satisfied else [_cplx(a) for a in sc.alpha_seg],
        "K_T": sc.K_T if sc.satisfied else None,
    }
    if isinstance(model, OUWrapper):
        out["note"] = "structure condition reported for the additive base process"
    return out


def _decompositions(cfg: RunConfig):
    model, mu = _build(cfg)
    tol = cfg.numeric["quad_tol"]
    if isinstance(model, OUWrapper):
        return model, mu, None, ou_decompose(model, mu, cfg.T, "kw", tol), ou_decompose(model, mu, cfg.T, "fs", tol)
    ctx = OperatorContext(model, cfg.T)
    return model, mu, ctx, kw(ctx, mu, tol), fs(ctx, mu, tol)


def cmd_decompose(cfg: RunConfig) -> tuple[dict, str]:
    model, mu, ctx, kwd, fsd = _decompositions(cfg)
    herm = mu.is_hermitian
    n_x, width = cfg.numeric["x_points"], cfg.numeric["x_width"]
    if ctx is None:
        sd = math.sqrt(model.variance(cfg.T))
        xs = model.mean(cfg.T) + width * sd * np.linspace(-1, 1, n_x)
    else:
        xs = default_x_grid(ctx, n_x, width)
    times = np.linspace(0.0, cfg.T, cfg.numeric["t_points"])
    summary = {"schema": SCHEMA, "command": "decompose", "family": model.name, "T": cfg.T,
               "hermitian": herm}
    if ctx is None:
        summary.update(V0=_real(kwd.base.initial_complex, herm), H0=_real(fsd.base.initial_complex, herm),
                       ou_rate=kwd.rate)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t", "x", "xi", "Z", "H", "V"))
        for t in times:
            cols = (fsd.strategy(t, xs), kwd.strategy(t, xs), fsd.value(t, xs), kwd.value(t, xs))
            for j, x in enumerate(xs):
                w.writerow([f"{t:.12g}", f"{x:.12g}", *(_fmt(c[j]) for c in cols)])
        table = buf.getvalue()
    else:
        summary.update(V0=_real(kwd.initial_complex, herm), H0=_real(fsd.initial_complex, herm),
                       imag_H0=fsd.imag_initial, imag_V0=kwd.imag_initial, K_T=ctx.sc.K_T)
        table = strategy_csv(kwd, fsd, times, xs)
    return summary, table


def cmd_hedge_error(cfg: RunConfig, kernel_csv: bool = False) -> tuple[dict, str | None]:
    model, mu = _build(cfg)
    ctx = OperatorContext(model, cfg.T)
    rep = variance_error(ctx, mu, cfg.numeric["j0_quad_tol"])
    out = {"schema": SCHEMA, "command": "hedge-error", "family": model.name, "T": cfg.T,
           "K_T": ctx.sc.K_T, **rep.as_dict()}
    table = None
    if kernel_csv:
        if mu.density is not None:
            raise ConfigError("per-(u, v) kernel output needs an atom payoff", key="payoff",
                              line=cfg.line("payoff", "payoff"))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("u", "v", "j0_re", "j0_im"))
        for u in mu.atoms_u:
            for v in mu.atoms_u:
                z = j0_kernel(ctx, float(u), float(v))
                w.writerow([f"{u:.12g}", f"{v:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}"])
        table = buf.getvalue()
    return out, table


def cmd_backtest(cfg: RunConfig, keep_residuals: bool = False) -> dict:
    model, mu = _build(cfg)
    ctx = OperatorContext(model, cfg.T)
    dec = fs(ctx, mu, cfg.numeric["quad_tol"])
    sim = cfg.simulate
    batch = simulate_paths(model, (cfg.T, sim["steps"]), sim["paths"], sim["seed"])
    refine = str(sim["refine"]).lower() in ("1", "true", "yes", "on")
    j0 = variance_error(ctx, mu, cfg.numeric["j0_quad_tol"]).j0
    rep = backtest(model, mu, dec, sim["strategy"], batch, refine=refine, analytic_j0=j0,
                   keep_residuals=keep_residuals)
    return {"schema": SCHEMA, "command": "backtest", "family": model.name, "T": cfg.T,
            **rep.as_dict()}, rep.residuals


# ---------------------------------------------------------------------------
# entry point

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI run configuration")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    p = argparse.ArgumentParser(prog="fourierhedge", description=__doc__,
                                epilog=KEY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    m = sub.add_parser("model", help="model diagnostics")
    msub = m.add_subparsers(dest="action", required=True)
    msub.add_parser("inspect", parents=[common], help="psi'(0), psi''(0), alpha, K_T, SC verdict",
                    epilog=KEY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub.add_parser("decompose", parents=[common], help="H0, V0 and the (t, x) strategy table",
                   epilog=KEY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    he = sub.add_parser("hedge-error", parents=[common], help="variance-optimal hedging error J0",
                        epilog=KEY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    he.add_argument("--kernel-csv", help="also write J0(u, v) for every atom pair to this file")
    bt = sub.add_parser("backtest", parents=[common], help="Monte Carlo hedging backtest",
                        epilog=KEY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    bt.add_argument("--seed", type=int, help="override [simulate] seed")
    bt.add_argument("--paths", type=int, help="override [simulate] paths")
    bt.add_argument("--steps", type=int, help="override [simulate] steps")
    bt.add_argument("--residuals", help="write per-path residuals as CSV to this file")
    return p


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=float) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "model":
            _emit(_dump_json(cmd_model_inspect(cfg)), args.out)
        elif args.command == "decompose":
            summary, table = cmd_decompose(cfg)
            if args.format == "csv":
                _emit(table, args.out)
                sys.stderr.write(_dump_json(summary))
            else:
                rows = list(csv.DictReader(io.StringIO(table)))
                _emit(_dump_json({**summary, "table": rows}), args.out)
        elif args.command == "hedge-error":
            out, table = cmd_hedge_error(cfg, kernel_csv=bool(args.kernel_csv))
            if table is not None:
                _emit(table, args.kernel_csv)
            _emit(_dump_json(out), args.out)
        elif args.command == "backtest":
            for key in ("seed", "paths", "steps"):
                if getattr(args, key) is not None:
                    cfg.simulate[key] = getattr(args, key)
            out, residuals = cmd_backtest(cfg, keep_residuals=bool(args.residuals))
            if residuals is not None:
                _emit("path,residual\n" + "".join(f"{i},{r:.17g}\n" for i, r in enumerate(residuals)),
                      args.residuals)
            if args.format == "csv":
                keys = sorted(out)
                _emit(",".join(keys) + "\n" + ",".join(str(out[k]) for k in keys) + "\n", args.out)
            else:
                _emit(_dump_json(out), args.out)
    except FourierHedgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
