"""Command-line front end: runs the analysis pipelines and emits CSV tables.

Every output starts with a ``#`` comment line recording the tool version and
the full parameter set, so a table can be reproduced from its own header.
Values are printed with 12 significant digits. Exit codes: 0 success,
1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .capacity import (
    MODE_NORMALIZED,
    MODE_PAPER_LITERAL,
    OptimizerSpec,
    channel_capacity,
    mutual_information,
    snr,
    sweep_capacity_vs_sigma,
    sweep_mi_vs_mux,
)
from .errors import InvalidParams, PgChannelError
from .montecarlo import (
    HistogramSpec,
    SampleSpec,
    empirical_entropy,
    ks_distance,
    sample_hybrid,
)
from .noise import (
    NoiseParams,
    TruncationPolicy,
    hybrid_moments,
    hybrid_pdf,
    moment_by_quadrature,
    noise_entropy,
    tabulate_noise,
)
from .quadrature import QuadratureSpec, integrate, noise_support
from .signal_model import TransmitEstimate, received_entropy

_COMMANDS = (
    "noise-pdf",
    "entropy",
    "mutual-info",
    "capacity",
    "sweep-mi",
    "sweep-capacity",
    "validate",
)

_DEFAULTS = {
    "lam": 5.0,
    "mu": 0.0,
    "sigma": 15.0,
    "mu_x": math.pi,
    "trunc_n": 100,
    "include_zero": True,
    "tol": 1e-10,
    "max_subdivisions": 2**16,
    "seed": 42,
    "out": None,
    "sigmas": "5,10,15,20,25",
    "samples": 1_000_000,
}

_MODE_DEFAULTS = {
    "noise-pdf": MODE_PAPER_LITERAL,
    "entropy": MODE_PAPER_LITERAL,
    "mutual-info": MODE_PAPER_LITERAL,
    "capacity": MODE_NORMALIZED,
    "sweep-mi": MODE_PAPER_LITERAL,
    "sweep-capacity": MODE_NORMALIZED,
    "validate": MODE_PAPER_LITERAL,
}

_POINTS_DEFAULTS = {
    "noise-pdf": 2001,
    "entropy": 0,
    "mutual-info": 0,
    "capacity": 256,
    "sweep-mi": 65,
    "sweep-capacity": 256,
    "validate": 0,
}


class _NumericalFailure(Exception):
    def __init__(self, op: str, cause: PgChannelError):
        super().__init__(f"numerical failure in {op}: {cause}")


def _compute(op: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PgChannelError as exc:
        raise _NumericalFailure(op, exc) from exc


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, help="Poisson rate of the quantum noise")
    p.add_argument("--mu", type=float, help="Gaussian mean of the classical noise")
    p.add_argument("--sigma", type=float, help="Gaussian standard deviation")
    p.add_argument("--mu-x", dest="mu_x", type=float, help="transmit point estimate in [0, 2*pi]")
    p.add_argument("--mode", choices=[MODE_PAPER_LITERAL, MODE_NORMALIZED],
                   help="received-density convention")
    p.add_argument("--trunc-n", dest="trunc_n", type=int, help="mixture terms kept (up to n = N)")
    p.add_argument("--include-zero", dest="include_zero",
                   action=argparse.BooleanOptionalAction,
                   help="include the n=0 mixture term (default: yes)")
    p.add_argument("--points", type=int, help="grid size (pdf table, sweep grid, or optimizer grid)")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--max-subdivisions", dest="max_subdivisions", type=int,
                   help="adaptive quadrature subdivision budget")
    p.add_argument("--seed", type=int, help="base seed for Monte-Carlo substreams")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--config", help="TOML file with any of the above keys; flags win")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgchannel",
        description="Hybrid Poisson-Gaussian noise model, entropies, and channel capacity.",
    )
    parser.add_argument("--version", action="version", version=f"pgchannel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "noise-pdf": "tabulate the noise density and its entropy integrand",
        "entropy": "differential entropies h(Z) and h(Y)",
        "mutual-info": "mutual information at one transmit estimate",
        "capacity": "maximize mutual information over the transmit estimate",
        "sweep-mi": "mutual information across the transmit-estimate range",
        "sweep-capacity": "capacity and SNR across noise standard deviations",
        "validate": "Monte-Carlo cross-checks of the analytic pipeline",
    }
    for cmd in _COMMANDS:
        p = sub.add_parser(cmd, help=helps[cmd])
        _add_common_flags(p)
        if cmd == "sweep-capacity":
            p.add_argument("--sigmas", help="comma-separated sigma values to sweep")
        if cmd == "validate":
            p.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    if "lambda" in data:
        data["lam"] = data.pop("lambda")
    return data


def _merge_settings(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    cfg["mode"] = _MODE_DEFAULTS[args.command]
    cfg["points"] = _POINTS_DEFAULTS[args.command]
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        unknown = set(file_values) - set(cfg)
        if unknown:
            raise InvalidParams(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_values)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _validated(cfg: dict):
    trunc = TruncationPolicy.fixed_terms(int(cfg["trunc_n"]),
                                         include_zero_term=bool(cfg["include_zero"]))
    params = NoiseParams(lam=cfg["lam"], mu=cfg["mu"], sigma=cfg["sigma"], trunc=trunc)
    est = TransmitEstimate(cfg["mu_x"])
    if not cfg["tol"] > 0:
        raise InvalidParams(f"tol must be positive, got {cfg['tol']}")
    qspec = QuadratureSpec(rel_tol=cfg["tol"], abs_tol=cfg["tol"] * 1e-2,
                           max_subdivisions=int(cfg["max_subdivisions"]))
    return params, est, qspec


def _comment_line(cfg: dict, command: str) -> str:
    fields = [
        f"pgchannel v{__version__}",
        f"command={command}",
        f"lambda={_fmt(cfg['lam'])}",
        f"mu={_fmt(cfg['mu'])}",
        f"sigma={_fmt(cfg['sigma'])}",
        f"mu_x={_fmt(cfg['mu_x'])}",
        f"trunc_n={cfg['trunc_n']}",
        f"include_zero={str(bool(cfg['include_zero'])).lower()}",
        f"mode={cfg['mode']}",
        f"points={cfg['points']}",
        f"rel_tol={_fmt(cfg['tol'])}",
        f"seed={cfg['seed']}",
    ]
    if command == "sweep-capacity":
        fields.append(f"sigmas={cfg['sigmas']}")
    if command == "validate":
        fields.append(f"samples={cfg['samples']}")
    return "# " + " | ".join(fields)


def _run_noise_pdf(cfg, params, est, qspec):
    table = _compute("tabulate_noise", tabulate_noise, params, int(cfg["points"]), qspec)
    rows = [
        (_fmt(z), _fmt(d), _fmt(e))
        for z, d, e in zip(table.abscissae, table.densities, table.entropy_integrand)
    ]
    return ["z", "f_Z", "neg_fZ_log2_fZ"], rows


def _run_entropy(cfg, params, est, qspec):
    normalized = cfg["mode"] == MODE_NORMALIZED
    h_z = _compute("noise_entropy", noise_entropy, params, qspec)
    h_y = _compute("received_entropy", received_entropy, est, params, qspec, normalized)
    return ["quantity", "bits"], [("h_Z", _fmt(h_z)), ("h_Y", _fmt(h_y))]


def _run_mutual_info(cfg, params, est, qspec):
    normalized = cfg["mode"] == MODE_NORMALIZED
    h_z = _compute("noise_entropy", noise_entropy, params, qspec)
    h_y = _compute("received_entropy", received_entropy, est, params, qspec, normalized)
    mi = _compute("mutual_information", mutual_information, est, params, qspec, cfg["mode"])
    return ["mu_x", "h_Y_bits", "h_Z_bits", "mi_bits"], [
        (_fmt(est.mu_x), _fmt(h_y), _fmt(h_z), _fmt(mi))
    ]


def _run_capacity(cfg, params, est, qspec):
    ospec = OptimizerSpec(grid_points=int(cfg["points"]))
    result = _compute("channel_capacity", channel_capacity, params, qspec, ospec, cfg["mode"])
    est_star = TransmitEstimate(result.mu_x_star if result.mu_x_star > 0 else math.pi)
    ratio = _compute("snr", snr, est_star, params, qspec)
    return ["mu_x_star", "capacity_bits", "snr", "evaluations"], [
        (_fmt(result.mu_x_star), _fmt(result.capacity_bits), _fmt(ratio),
         str(result.evaluations))
    ]


def _run_sweep_mi(cfg, params, est, qspec):
    table = _compute("sweep_mi_vs_mux", sweep_mi_vs_mux, params, qspec,
                     int(cfg["points"]), cfg["mode"])
    rows = [(_fmt(r.x), _fmt(r.capacity_bits)) for r in table.rows]
    return ["mu_x", "mi_bits"], rows


def _run_sweep_capacity(cfg, params, est, qspec):
    try:
        sigmas = [float(tok) for tok in str(cfg["sigmas"]).split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidParams(f"sigmas must be a comma-separated number list: {exc}")
    ospec = OptimizerSpec(grid_points=int(cfg["points"]))
    table = _compute(
        "sweep_capacity_vs_sigma", sweep_capacity_vs_sigma,
        cfg["lam"], cfg["mu"], sigmas, qspec, ospec, cfg["mode"], params.trunc,
    )
    rows = [
        (_fmt(r.sigma), _fmt(r.snr), _fmt(r.capacity_bits), _fmt(r.lam))
        for r in table.rows
    ]
    return ["sigma", "snr", "capacity_bits", "lambda"], rows


def _run_validate(cfg, params, est, qspec):
    n = int(cfg["samples"])
    seed = int(cfg["seed"])
    checks = []

    samples = _compute("sample_hybrid", sample_hybrid, params, SampleSpec(n, seed))
    support = _compute("noise_support", noise_support, params)

    mass, _ = _compute("integrate", integrate,
                       lambda z: hybrid_pdf(z, params), support, qspec)
    expected_mass = 1.0 if params.trunc.include_zero_term else 1.0 - math.exp(-params.lam)
    checks.append(("normalization", abs(mass - expected_mass), 1e-9))

    if params.trunc.include_zero_term:
        mean_exact, var_exact = hybrid_moments(params)
        m1 = _compute("moment_by_quadrature", moment_by_quadrature, params, 1, qspec)
        checks.append(("moment-quadrature", abs(m1 - mean_exact), 1e-5))
    else:
        m1 = _compute("moment_by_quadrature", moment_by_quadrature, params, 1, qspec) / mass
        m2 = _compute("moment_by_quadrature", moment_by_quadrature, params, 2, qspec) / mass
        mean_exact, var_exact = m1, m2 - m1 * m1

    mc_mean = float(np.mean(samples))
    mc_var = float(np.var(samples))
    mean_tol = max(0.1, 6.0 * math.sqrt(var_exact / n))
    checks.append(("mc-mean", abs(mc_mean - mean_exact), mean_tol))
    var_tol = max(0.02, 10.0 / math.sqrt(n))
    checks.append(("mc-variance", abs(mc_var - var_exact) / var_exact, var_tol))

    ks = _compute("ks_distance", ks_distance, samples, params, qspec)
    checks.append(("ks-distance", ks, max(0.002, 2.0 / math.sqrt(n))))

    h_quad = _compute("noise_entropy", noise_entropy, params, qspec)
    h_emp = _compute("empirical_entropy", empirical_entropy, samples,
                     HistogramSpec(n_bins=512, range=support))
    checks.append(("entropy-oracle", abs(h_emp - h_quad), max(0.03, 30.0 / math.sqrt(n))))

    rows = []
    all_pass = True
    for name, value, threshold in checks:
        ok = value <= threshold
        all_pass = all_pass and ok
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: value={_fmt(value)} threshold={_fmt(threshold)}")
        rows.append((name, _fmt(value), _fmt(threshold), status))
    return ["check", "value", "threshold", "status"], rows, all_pass


_RUNNERS = {
    "noise-pdf": _run_noise_pdf,
    "entropy": _run_entropy,
    "mutual-info": _run_mutual_info,
    "capacity": _run_capacity,
    "sweep-mi": _run_sweep_mi,
    "sweep-capacity": _run_sweep_capacity,
}


def _write_csv(out_path, comment: str, header, rows) -> None:
    lines = [comment, ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_settings(args)
        params, est, qspec = _validated(cfg)
    except (InvalidParams, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "validate":
            header, rows, all_pass = _run_validate(cfg, params, est, qspec)
            if cfg["out"]:
                _write_csv(cfg["out"], _comment_line(cfg, args.command), header, rows)
            return 0 if all_pass else 1
        header, rows = _RUNNERS[args.command](cfg, params, est, qspec)
    except _NumericalFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1

    _write_csv(cfg["out"], _comment_line(cfg, args.command), header, rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
