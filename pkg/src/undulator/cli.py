"""Command line interface: config ingestion, run orchestration, tabular output.

One JSON config document drives a run; the --mode/--output/--boson flags
override the corresponding file values. Data goes to the output path (or
stdout) in CSV or JSON; every diagnostic goes to stderr. Identical configs
produce byte-identical output files regardless of the worker pool size:
the (n, theta) grid may be evaluated concurrently but results are
assembled in fixed order and formatted with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UndulatorError
from .fields import FieldKind, FieldModel
from .helical import HelixParams, boson_spectral_angular
from .kinematics import Direction, solve_trajectory
from .spectra import spectral_angular_power, total_power
from .spin import ALPHA_FS, polarization_characteristics
from .validate import run_validation

MODES = ("spectrum", "power", "spin", "validate")
FORMATS = ("csv", "json")

_CONFIG_KEYS = {
    "mode", "field", "gamma", "chi", "n_range", "theta_grid", "boson",
    "n_samples", "alpha_fs", "output", "format",
}

SPECTRUM_COLUMNS = ("n", "theta", "dw_pi", "dw_sigma",
                    "dw_pi_classical", "dw_sigma_classical")
POWER_COLUMNS = ("w_classical", "quantum_correction", "i_pi", "i_sigma",
                 "delta0", "delta1", "validity_n_cr",
                 "w_classical_field_route", "w_total")
SPIN_COLUMNS = ("w_down_up", "w_up_down", "gamma_factor", "tau_omega0",
                "p_equilibrium", "tau_omega0_ultra", "p_equilibrium_ultra")


@dataclass(frozen=True)
class RunConfig:
    mode: str
    field: FieldModel
    gamma: float
    chi: float
    n_range: tuple
    theta_grid: tuple
    boson: bool
    n_samples: int
    alpha_fs: float
    output: str
    format: str


def _field_from_block(block, gamma: float) -> FieldModel:
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError("field block must be an object with a 'kind'")
    kind = block["kind"]
    try:
        if kind == "helical":
            if "beta_perp" in block:
                return FieldModel.helical_from_transverse_speed(
                    float(block["beta_perp"]), gamma)
            return FieldModel.helical(float(block["amplitude"]))
        if kind == "planar":
            return FieldModel.planar(float(block["amplitude"]),
                                     int(block.get("harmonic", 1)))
        if kind == "fourier":
            return FieldModel.from_harmonic_rows(block.get("harmonics", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad field block: {exc}") from exc
    raise ConfigError(f"unknown field kind {kind!r}")


def build_config(data: dict, overrides: dict) -> RunConfig:
    """Validate the merged config document; raises ConfigError."""
    data = dict(data)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value

    mode = data.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    fmt = data.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")

    gamma = float(data.get("gamma", 0.0))
    chi = float(data.get("chi", 0.0))
    if mode != "validate":
        if gamma <= 1.0:
            raise ConfigError("gamma must exceed 1")
        if chi < 0.0:
            raise ConfigError("chi must be >= 0")

    n_range = data.get("n_range", 5)
    if isinstance(n_range, int):
        n_range = list(range(1, n_range + 1))
    try:
        n_range = tuple(int(n) for n in n_range)
    except (TypeError, ValueError) as exc:
        raise ConfigError("n_range must be an integer or list of integers") from exc
    if any(n < 1 for n in n_range):
        raise ConfigError("harmonics must be >= 1")

    theta_grid = data.get("theta_grid", 17)
    if isinstance(theta_grid, int):
        if theta_grid < 1:
            raise ConfigError("theta_grid count must be >= 1")
        theta_grid = [math.pi * (j + 0.5) / theta_grid for j in range(theta_grid)]
    try:
        theta_grid = tuple(float(t) for t in theta_grid)
    except (TypeError, ValueError) as exc:
        raise ConfigError("theta_grid must be a count or list of angles") from exc
    if mode == "spectrum" and not theta_grid:
        raise ConfigError("spectrum mode needs a nonempty theta grid")
    if any(not 0.0 < t < math.pi for t in theta_grid):
        raise ConfigError("theta values must lie strictly inside (0, pi)")

    n_samples = int(data.get("n_samples", 512))
    boson = bool(data.get("boson", False))
    alpha_fs = float(data.get("alpha_fs", ALPHA_FS))

    if mode == "validate":
        field = FieldModel.zero()
    else:
        field = _field_from_block(data.get("field"), gamma)
        if mode in ("spin",) or boson:
            if field.kind is not FieldKind.HELICAL:
                raise ConfigError(f"{'spin mode' if mode == 'spin' else '--boson'}"
                                  " requires a helical field")
        if mode == "spin" and chi <= 0.0:
            raise ConfigError("spin mode needs chi > 0")

    return RunConfig(mode=mode, field=field, gamma=gamma, chi=chi,
                     n_range=n_range, theta_grid=theta_grid, boson=boson,
                     n_samples=n_samples, alpha_fs=alpha_fs,
                     output=data.get("output") or "", format=fmt)


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    return data


def _thread_count() -> int:
    raw = os.environ.get("UNDULATOR_THREADS", "")
    if not raw:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError as exc:
        raise ConfigError(f"UNDULATOR_THREADS must be an integer: {raw!r}") from exc
    return max(1, count)


def _pool_map(func, items):
    workers = min(_thread_count(), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))  # order-preserving


def _helix_params(config: RunConfig, chi: float) -> HelixParams:
    beta = math.sqrt(1.0 - 1.0 / config.gamma ** 2)
    beta_perp = config.field.amplitude_h0 / config.gamma
    if beta_perp >= beta:
        raise ConfigError("helical field too strong for this gamma")
    return HelixParams.from_speeds(
        beta_perp, math.sqrt(beta ** 2 - beta_perp ** 2), chi)


def _spectrum_rows(config: RunConfig):
    grid = [(n, theta) for n in config.n_range for theta in config.theta_grid]
    if config.boson:
        params = _helix_params(config, config.chi)
        params0 = _helix_params(config, 0.0)

        def cell(item):
            n, theta = item
            psi0 = 1.0 - params.beta_parallel * math.cos(theta)
            wgt = n * n / (2.0 * math.pi * psi0 ** 3)
            now = boson_spectral_angular(params, n, theta)
            cls = boson_spectral_angular(params0, n, theta)
            return (n, theta, wgt * now.pi_intensity, wgt * now.sigma_intensity,
                    wgt * cls.pi_intensity, wgt * cls.sigma_intensity)
    else:
        traj = solve_trajectory(config.field, config.gamma, config.n_samples)

        def cell(item):
            n, theta = item
            d = Direction.toward(traj, theta)
            dw_pi, dw_sg = spectral_angular_power(traj, d, n, config.chi)
            cl_pi, cl_sg = spectral_angular_power(traj, d, n, 0.0)
            return (n, theta, dw_pi, dw_sg, cl_pi, cl_sg)

    return _pool_map(cell, grid)


def _format_value(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _emit(config: RunConfig, columns, rows) -> str:
    if config.format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_format_value(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    payload = {"mode": config.mode,
               "rows": [dict(zip(columns, row)) for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one run; returns (exit status, rendered output)."""
    if config.mode == "validate":
        lines = []
        ok = run_validation(emit=lines.append)
        return (0 if ok else 1), "\n".join(lines) + "\n"
    if config.mode == "spectrum":
        body = _emit(config, SPECTRUM_COLUMNS, _spectrum_rows(config))
        return 0, body
    if config.mode == "power":
        traj = solve_trajectory(config.field, config.gamma, config.n_samples)
        res = total_power(traj, config.field, config.chi)
        row = (res.w_classical, res.quantum_correction, res.i_pi, res.i_sigma,
               res.delta0, res.delta1, res.validity_n_cr,
               res.w_classical_field_route, res.w_total)
        return 0, _emit(config, POWER_COLUMNS, [row])
    # spin
    res = polarization_characteristics(_helix_params(config, config.chi),
                                       config.alpha_fs)
    row = (res.w_down_up, res.w_up_down, res.gamma_factor, res.tau_omega0,
           res.p_equilibrium, res.tau_omega0_ultra, res.p_equilibrium_ultra)
    return 0, _emit(config, SPIN_COLUMNS, [row])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="undulator",
        description="Spontaneous undulator radiation with first-order "
                    "quantum corrections: spectra, total power, spin flip.")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--config", help="JSON config document")
    parser.add_argument("--output", help="output path (default: stdout)")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--boson", action="store_true", default=None,
                        help="helical closed-form route assembled from the "
                             "quantum matrix elements")
    args = parser.parse_args(argv)

    try:
        data = load_config(args.config) if args.config else {}
        config = build_config(data, {
            "mode": args.mode, "output": args.output,
            "format": args.format, "boson": args.boson,
        })
        status, body = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UndulatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
