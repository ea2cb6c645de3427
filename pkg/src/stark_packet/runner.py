"""Scenario orchestration, CSV emission, figure data and parameter sweeps."""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import CSV_COLUMNS, ScenarioConfig, config_to_dict
from .dynamics import AmplitudeSeries, evolve_psi_ode
from .generator import stark_shift_numeric
from .lindblad import DensityMatrix2, crosscheck_population, exact_density, propagate_master
from .model import (
    DomainError,
    InitialCondition,
    PacketSpec,
    PhysicalParams,
    TimeGrid,
    exponential_packet,
    load_packet_csv,
    make_initial,
    make_params,
    packet_norm,
)
from .observables import difference_signal, intensities, integrated_ratios

# Captioned (delta, linewidth) pairs, in units of gamma_1d.
FIG2_TRIPLES = {"blue": (5.0, 0.1), "black": (0.1, 5.0), "red": (3.0, 0.9)}
FIG3_PANELS = {"a": (0.1, 5.0), "b": (5.0, 0.1), "c": (3.0, 0.9)}

SWEEP_COLUMNS = ("delta", "linewidth", "max_abs_shift", "max_shift", "min_shift",
                 "reflection", "transmission", "crosscheck_population", "error")


class ScenarioError(RuntimeError):
    def __init__(self, message: str, config: ScenarioConfig):
        super().__init__(f"delta={config.packet.delta:g}, linewidth={config.packet.linewidth:g}: "
                         f"{message}")
        self.config = config


@dataclass
class SimulationResult:
    config: ScenarioConfig
    params: PhysicalParams
    packet: PacketSpec
    init: InitialCondition
    psi: AmplitudeSeries
    series: dict[str, np.ndarray]
    summary: dict[str, float]
    version: str = __version__
    wall_clock: float = field(default=0.0, compare=False)

    @property
    def t(self) -> np.ndarray:
        return self.series["t"]


def build_scenario(config: ScenarioConfig, base_dir: Path | str | None = None):
    """Physical objects for a config: (params, packet, grid, init)."""
    p = config.params
    params = make_params(p.gamma_1d, p.omega0, p.rho_1d, p.c)
    if config.packet.kind == "exponential":
        packet = exponential_packet(config.packet.delta, config.packet.linewidth, params)
        weight = 1.0
    else:
        path = Path(config.packet.file)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        packet = load_packet_csv(path, config.packet.delta, params)
        weight = packet_norm(packet, packet.xs).value
        if weight > 0 and abs(weight - 1.0) > 1e-6:
            raise DomainError(f"tabulated packet norm is {weight:.9g}, expected 1 (or an empty packet)")
        weight = 1.0 if weight > 0 else 0.0

    psi0, c0 = config.initial.psi0, config.initial.c0
    tls = abs(psi0) ** 2 + abs(c0) ** 2
    if weight > 0:
        # the photon carries whatever probability the TLS amplitudes leave free
        packet = packet.scaled(math.sqrt(max(0.0, 1.0 - tls)))
        weight = 1.0 - tls
    init = make_initial(psi0, c0, weight)
    grid = TimeGrid.from_horizon(config.grid.t_max, config.grid.dt)
    return params, packet, grid, init


def run_scenario(config: ScenarioConfig, base_dir: Path | str | None = None) -> SimulationResult:
    """Exact dynamics, generator extraction, master-equation check and intensities."""
    started = time.perf_counter()
    try:
        params, packet, grid, init = build_scenario(config, base_dir)
        psi = evolve_psi_ode(params, packet, grid, init)
        gen = stark_shift_numeric(psi)
        exact = exact_density(psi, init.c0)
        rho0 = DensityMatrix2(abs(init.psi0) ** 2, init.psi0 * np.conj(init.c0))
        master = propagate_master(gen, rho0, exact)
        check = crosscheck_population(master, psi, init.c0)
    except DomainError as exc:
        raise ScenarioError(str(exc), config) from exc

    rec = intensities(params, packet, psi, config.output.detector_offset)
    formula_ok = packet.kind == "exponential" and packet.channel == "a" and init.psi0 == 0
    if formula_ok:
        diff_dynamic = difference_signal(params, packet, psi, "dynamic", init)
        diff_static = difference_signal(params, packet, psi, "static", init)
    else:
        diff_dynamic = rec.Ia - rec.I0 - rec.Ib
        diff_static = np.full(grid.n_steps, np.nan)

    shift = gen.shift.copy()
    if formula_ok and not gen.valid[0]:
        shift[0] = 0.5 * packet.delta  # continuous extension at psi(0) = 0

    valid_shift = gen.shift[gen.valid]
    reflection, transmission = integrated_ratios(rec)
    summary = {
        "max_abs_shift": float(np.max(np.abs(valid_shift))) if valid_shift.size else math.nan,
        "max_shift": float(np.max(valid_shift)) if valid_shift.size else math.nan,
        "min_shift": float(np.min(valid_shift)) if valid_shift.size else math.nan,
        "max_population": float(np.max(np.abs(psi.values) ** 2)),
        "reflection": reflection,
        "transmission": transmission,
        "crosscheck_population": check.population,
        "crosscheck_coherence": check.coherence,
    }
    series = {
        "t": rec.t,
        "re_psi": psi.values.real,
        "im_psi": psi.values.imag,
        "population": np.abs(psi.values) ** 2,
        "shift": shift,
        "rate": gen.rate,
        "valid": gen.valid,
        "I0": rec.I0,
        "Ia": rec.Ia,
        "Ib": rec.Ib,
        "diff_dynamic": diff_dynamic,
        "diff_static": diff_static,
    }
    return SimulationResult(config, params, packet, init, psi, series, summary,
                            wall_clock=time.perf_counter() - started)


def _fmt(value) -> str:
    return f"{float(value) + 0.0:.11e}"


def _write_table(path: Path, header, columns) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*columns):
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(result: SimulationResult, path, absolute: bool | None = None,
             columns=None) -> Path:
    """Write the result series: 12 significant digits, fixed column order."""
    if absolute is None:
        absolute = result.config.output.absolute
    if columns is None:
        series = result.config.output.series
        columns = CSV_COLUMNS if series == "all" else [c.strip() for c in series.split(",")]
    columns = [c for c in CSV_COLUMNS if c == "t" or c in columns]
    formatted = []
    for name in columns:
        data = result.series[name]
        if name == "valid":
            formatted.append([str(int(v)) for v in data])
            continue
        if name == "shift" and absolute:
            data = data + result.params.omega0
        formatted.append([_fmt(v) for v in data])
    return _write_table(Path(path), columns, formatted)


def write_summary_json(result: SimulationResult, path) -> Path:
    doc = {
        "version": result.version,
        "wall_clock_s": result.wall_clock,
        "config": config_to_dict(result.config),
        "summary": result.summary,
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _tag(delta: float, linewidth: float) -> str:
    return f"delta{delta:g}_linewidth{linewidth:g}"


def _figure_runs(pairs, base: ScenarioConfig | None = None):
    base = base or ScenarioConfig()
    return {key: run_scenario(base.with_values(packet__delta=d, packet__linewidth=D))
            for key, (d, D) in pairs.items()}


def run_fig2(outdir=None, base: ScenarioConfig | None = None) -> dict[str, SimulationResult]:
    """Shift series for the three reference (delta, linewidth) triples; writes fig2_*.csv when ``outdir`` is set."""
    results = _figure_runs(FIG2_TRIPLES, base)
    if outdir is not None:
        for key, res in results.items():
            d, D = FIG2_TRIPLES[key]
            emit_csv(res, Path(outdir) / f"fig2_{key}_{_tag(d, D)}.csv",
                     columns=("t", "shift", "valid"))
    return results


def run_fig3(outdir=None, base: ScenarioConfig | None = None) -> dict[str, SimulationResult]:
    """Difference signals with dynamic and static frequency for panels a, b, c."""
    results = _figure_runs(FIG3_PANELS, base)
    if outdir is not None:
        for key, res in results.items():
            d, D = FIG3_PANELS[key]
            emit_csv(res, Path(outdir) / f"fig3{key}_{_tag(d, D)}.csv",
                     columns=("t", "diff_dynamic", "diff_static"))
    return results


def sweep_threads() -> int:
    cap = os.environ.get("STARK_PACKET_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def _sweep_cell(args) -> dict:
    base, base_dir, delta, linewidth = args
    row = {"delta": delta, "linewidth": linewidth}
    try:
        cfg = base.with_values(packet__delta=delta, packet__linewidth=linewidth)
        res = run_scenario(cfg, base_dir)
        for key in SWEEP_COLUMNS[2:-1]:
            row[key] = res.summary[key]
        row["error"] = ""
    except (ScenarioError, ValueError) as exc:
        for key in SWEEP_COLUMNS[2:-1]:
            row[key] = math.nan
        row["error"] = str(exc).replace(",", ";")
    return row


def run_sweep(base: ScenarioConfig, deltas, linewidths, parallel: bool = True,
              max_workers: int | None = None, base_dir=None) -> list[dict]:
    """One summary row per (delta, linewidth), delta-major, in grid order."""
    cells = [(base, base_dir, float(d), float(D)) for d in deltas for D in linewidths]
    if parallel and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=max_workers or sweep_threads()) as pool:
            return list(pool.map(_sweep_cell, cells))
    return [_sweep_cell(c) for c in cells]


def write_sweep_csv(rows: list[dict], path) -> Path:
    columns = []
    for name in SWEEP_COLUMNS:
        if name == "error":
            columns.append([r["error"] for r in rows])
        else:
            columns.append([_fmt(r[name]) for r in rows])
    return _write_table(Path(path), SWEEP_COLUMNS, columns)
