"""Experiment runner: deterministic figure-style sweeps emitted as CSV or
JSON with a self-describing `#` header (resolved config, version, seed).

Config precedence: command-line ``--set`` overrides > ``--config`` file >
per-command defaults.  Unknown keys are rejected up front; identical
(config, seed) reruns produce byte-identical files.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import math
import sys
from dataclasses import asdict
from typing import Any, Callable

import click
import numpy as np
import yaml

from . import __version__
from .adversary import covertness_report, solve_ns_for_epsilon, sqrt_law_schedule
from .metrology import qfi_phase
from .montecarlo import simulate
from .protocol import ProtocolVariant, SensingScenario

_SCENARIO_DEFAULTS = asdict(SensingScenario())

_COMMON_DEFAULTS: dict[str, Any] = {
    "scenario": dict(_SCENARIO_DEFAULTS),
    "shots": 2000,
    "seed": 0,
    "variants": ["entangled", "classical_thermal"],
    "compute_qcrb": True,
}

_COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig3": {
        "theta_grid": [round(f * math.pi, 12) for f in np.linspace(0.1, 0.9, 13)],
    },
    "fig4": {
        "nb_grid": [40.0, 80.0, 160.0, 320.0, 640.0, 1280.0],
        "epsilon": 2e-4,
        "regimes": ["fixed_covertness", "fixed_power"],
        "fixed_power_ns": 8e-4,
    },
    "fig5": {
        "scenario": dict(
            _SCENARIO_DEFAULTS, kappa_T=1.0, kappa_E=0.5, N_B=1280.0
        ),
        "t_grid": [float(t) for t in np.geomspace(0.0625, 4.0, 6)],
        "sqrt_law_constant": 200.0,
        "violate_ratio": 6.25e-5,
        "compute_qcrb": False,
    },
    "qcrb": {"grid": {}},
    "covertness": {"grid": {}},
    "sweep": {"grid": {}},
}


class ConfigError(click.ClickException):
    exit_code = 2


def _deep_merge(base: dict, override: dict, path: str = "") -> dict:
    """Merge override into base, rejecting keys absent from base (the
    defaults tree doubles as the schema)."""
    out = dict(base)
    for key, val in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict) and key != "grid":
            if not isinstance(val, dict):
                raise ConfigError(f"{where} must be a mapping")
            out[key] = _deep_merge(base[key], val, where)
        else:
            out[key] = val
    return out


def _parse_sets(pairs: tuple[str, ...]) -> dict:
    """Turn repeated --set a.b=val flags into a nested override dict."""
    tree: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set needs KEY=VALUE, got {pair!r}")
        key, raw = pair.split("=", 1)
        node = tree
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = yaml.safe_load(raw)
    return tree


def _resolve_config(
    command: str,
    config_path: str | None,
    sets: tuple[str, ...],
    seed: int | None,
    shots: int | None,
) -> dict:
    defaults = _deep_merge(
        {**_COMMON_DEFAULTS, **_COMMAND_DEFAULTS[command]},
        {},
    )
    merged = defaults
    if config_path is not None:
        with open(config_path) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        merged = _deep_merge(merged, loaded)
    merged = _deep_merge(merged, _parse_sets(sets))
    if seed is not None:
        merged["seed"] = seed
    if shots is not None:
        merged["shots"] = shots
    _scenario_of(merged)  # validate eagerly
    return merged


def _scenario_of(config: dict, **overrides) -> SensingScenario:
    try:
        return SensingScenario(**{**config["scenario"], **overrides})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def _variants_of(config: dict) -> list[ProtocolVariant]:
    try:
        return [ProtocolVariant(v) for v in config["variants"]]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_points(
    points: list[tuple[str, Callable[[], dict]]], jobs: int
) -> tuple[list[dict | None], list[tuple[str, str]]]:
    """Evaluate labelled point thunks, optionally in parallel; output order
    follows input order regardless of scheduling."""
    rows: list[dict | None] = [None] * len(points)
    failures: list[tuple[str, str]] = []

    def run_one(i: int):
        label, thunk = points[i]
        try:
            return i, thunk(), None
        except Exception as exc:  # noqa: BLE001 - enumerate, don't abort the sweep
            return i, None, f"{label}: {exc}"

    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, range(len(points))))
    else:
        results = [run_one(i) for i in range(len(points))]
    for i, row, err in results:
        if err is not None:
            failures.append((points[i][0], err))
        rows[i] = row
    return rows, failures


def _write_output(
    command: str, config: dict, rows: list[dict], out: str, fmt: str
) -> None:
    kept = [r for r in rows if r is not None]
    with click.open_file(out, "w") as fh:
        if fmt == "json":
            json.dump(
                {
                    "tool": "covertsense",
                    "version": __version__,
                    "command": command,
                    "config": config,
                    "rows": kept,
                },
                fh,
                sort_keys=True,
                indent=2,
            )
            fh.write("\n")
            return
        fh.write(f"# covertsense {__version__} {command}\n")
        fh.write(f"# seed: {config['seed']}\n")
        fh.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        if not kept:
            return
        writer = csv.DictWriter(fh, fieldnames=list(kept[0].keys()))
        writer.writeheader()
        writer.writerows(kept)


def _finish(command, config, rows, failures, out, fmt) -> None:
    _write_output(command, config, rows, out, fmt)
    if failures:
        for label, err in failures:
            click.echo(f"FAILED {label}: {err}", err=True)
        sys.exit(1)


def _mc_row(config: dict, scenario: SensingScenario, variant: ProtocolVariant,
            point_index: int, extra: dict | None = None) -> dict:
    res = simulate(
        scenario,
        variant,
        shots=config["shots"],
        seed=config["seed"],
        point_index=point_index,
        compute_qcrb=config["compute_qcrb"],
    )
    row = dict(extra or {})
    row.update(res.csv_row())
    row["rms_cos"] = math.sqrt(res.mse_cos)
    row["rms_theta"] = res.rms_theta
    row["stderr"] = res.stderr
    return row


_common_options = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="YAML config file."),
    click.option("--set", "sets", multiple=True, metavar="KEY=VAL", help="Override a config key (repeatable, dotted paths)."),
    click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="RNG seed."),
    click.option("--shots", type=click.IntRange(2), default=None, help="Monte Carlo shots per point."),
    click.option("--jobs", type=click.IntRange(1), default=1, show_default=True, help="Parallel workers over grid points."),
    click.option("--out", default="-", show_default=True, help="Output path ('-' for stdout)."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
]


def _with_common(fn):
    for opt in reversed(_common_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Covert-sensing experiment runner (deterministic, seeded)."""


@main.command()
@_with_common
def fig3(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """Phase estimation vs theta for both protocol variants."""
    config = _resolve_config("fig3", config_path, sets, seed, shots)
    variants = _variants_of(config)
    points = []
    idx = 0
    for theta in config["theta_grid"]:
        for variant in variants:
            sc = _scenario_of(config, theta=float(theta))
            points.append(
                (
                    f"theta={theta:g} variant={variant.value}",
                    (lambda sc=sc, v=variant, i=idx: _mc_row(config, sc, v, i)),
                )
            )
            idx += 1
    rows, failures = _run_points(points, jobs)
    _finish("fig3", config, rows, failures, out, fmt)


@main.command()
@_with_common
def fig4(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """MSE vs background brightness in fixed-covertness and fixed-power regimes."""
    config = _resolve_config("fig4", config_path, sets, seed, shots)
    variants = _variants_of(config)
    points = []
    idx = 0
    for regime in config["regimes"]:
        if regime not in ("fixed_covertness", "fixed_power"):
            raise ConfigError(f"unknown regime {regime!r}")
        for n_b in config["nb_grid"]:
            base = _scenario_of(config, N_B=float(n_b))
            if regime == "fixed_covertness":
                n_s = solve_ns_for_epsilon(config["epsilon"], base)
            else:
                n_s = config["fixed_power_ns"]
            sc = base.with_(N_S=float(n_s))
            rep = covertness_report(sc)
            extra = {"regime": regime, "epsilon": rep.epsilon, "pe_exact": rep.pe_exact}
            for variant in variants:
                points.append(
                    (
                        f"regime={regime} N_B={n_b:g} variant={variant.value}",
                        (lambda sc=sc, v=variant, i=idx, e=dict(extra): _mc_row(config, sc, v, i, e)),
                    )
                )
                idx += 1
    rows, failures = _run_points(points, jobs)
    _finish("fig4", config, rows, failures, out, fmt)


@main.command()
@_with_common
def fig5(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """Square-root-law test: adversary error probability and MSE vs time."""
    config = _resolve_config("fig5", config_path, sets, seed, shots)
    variants = _variants_of(config)
    base = _scenario_of(config)
    t_grid = [float(t) for t in config["t_grid"]]
    obey = sqrt_law_schedule(config["sqrt_law_constant"], t_grid, base)
    violate_ns = config["violate_ratio"] * base.N_B / base.kappa
    violate = [base.with_(T=t, N_S=violate_ns) for t in t_grid]
    points = []
    idx = 0
    for schedule, scenarios in (("obey", obey), ("violate", violate)):
        for sc in scenarios:
            rep = covertness_report(sc)
            extra = {
                "schedule": schedule,
                "T": sc.T,
                "epsilon": rep.epsilon,
                "pe_lower": rep.pe_lower_fidelity,
                "pe_exact": rep.pe_exact,
                "method": rep.method,
            }
            for variant in variants:
                points.append(
                    (
                        f"schedule={schedule} T={sc.T:g} variant={variant.value}",
                        (lambda sc=sc, v=variant, i=idx, e=dict(extra): _mc_row(config, sc, v, i, e)),
                    )
                )
                idx += 1
    rows, failures = _run_points(points, jobs)
    _finish("fig5", config, rows, failures, out, fmt)


def _grid_scenarios(config: dict) -> list[tuple[str, SensingScenario]]:
    """Cartesian product over scenario-field value lists in config['grid']."""
    grid: dict = config["grid"]
    for key in grid:
        if key not in _SCENARIO_DEFAULTS:
            raise ConfigError(f"grid key {key!r} is not a scenario field")
    def as_number(v):
        try:
            return float(v)  # YAML leaves exponent forms like "8.0e3" as strings
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid values must be numbers, got {v!r}") from exc

    items = [
        (k, [as_number(v) for v in (v if isinstance(v, (list, tuple)) else [v])])
        for k, v in sorted(grid.items())
    ]
    combos: list[dict] = [{}]
    for key, values in items:
        combos = [{**c, key: v} for c in combos for v in values]
    out = []
    for combo in combos:
        label = " ".join(f"{k}={v:g}" for k, v in combo.items()) or "default"
        out.append((label, _scenario_of(config, **combo)))
    return out


@main.command()
@_with_common
def qcrb(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """Quantum Fisher information and Cramer-Rao bound over a scenario grid."""
    config = _resolve_config("qcrb", config_path, sets, seed, shots)
    variants = _variants_of(config)
    points = []
    for label, sc in _grid_scenarios(config):
        for variant in variants:
            def thunk(sc=sc, v=variant):
                res = qfi_phase(sc, v)
                return {
                    "variant": v.value,
                    "theta": sc.theta,
                    "N_S": sc.N_S,
                    "N_B": sc.N_B,
                    "M": sc.M,
                    "J": res.J,
                    "qcrb": res.qcrb_var,
                    "richardson_error": res.richardson_error,
                }
            points.append((f"{label} variant={variant.value}", thunk))
    rows, failures = _run_points(points, jobs)
    _finish("qcrb", config, rows, failures, out, fmt)


@main.command()
@_with_common
def covertness(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """Adversary detection bounds over a scenario grid."""
    config = _resolve_config("covertness", config_path, sets, seed, shots)
    points = [
        (label, (lambda sc=sc: covertness_report(sc).csv_row()))
        for label, sc in _grid_scenarios(config)
    ]
    rows, failures = _run_points(points, jobs)
    _finish("covertness", config, rows, failures, out, fmt)


@main.command()
@_with_common
def sweep(config_path, sets, seed, shots, jobs, out, fmt) -> None:
    """Monte Carlo estimation sweep over an arbitrary scenario grid."""
    config = _resolve_config("sweep", config_path, sets, seed, shots)
    variants = _variants_of(config)
    points = []
    idx = 0
    for label, sc in _grid_scenarios(config):
        rep = covertness_report(sc)
        extra = {"epsilon": rep.epsilon, "pe_exact": rep.pe_exact}
        for variant in variants:
            points.append(
                (
                    f"{label} variant={variant.value}",
                    (lambda sc=sc, v=variant, i=idx, e=dict(extra): _mc_row(config, sc, v, i, e)),
                )
            )
            idx += 1
    rows, failures = _run_points(points, jobs)
    _finish("sweep", config, rows, failures, out, fmt)


if __name__ == "__main__":
    main()
