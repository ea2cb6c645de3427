"""Self-check suite behind ``stark-packet validate``.

Each check measures one quantity and compares it with a fixed tolerance.
"""
from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .dynamics import StepSizeError, evolve_psi_ode, excitation_norm, psi_closed_form
from .generator import interaction_energy, stark_shift_closed_form, stark_shift_numeric
from .lindblad import DensityMatrix2, crosscheck_population, exact_density, propagate_master
from .model import TimeGrid, exponential_packet, make_params
from .observables import (
    default_horizon,
    difference_signal,
    formula_Ia,
    integrated_ratios,
    intensities,
    monochromatic_ratios,
)
from .runner import FIG2_TRIPLES, FIG3_PANELS, emit_csv, run_scenario, run_sweep, write_sweep_csv

TRIPLES = list(FIG2_TRIPLES.values())
SEED = 20240917


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    measured: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: measured {self.measured:.3e} {self.relation} "
                f"{self.tolerance:.3e}  ({self.anchor})")


def _le(name, anchor, measured, tol) -> CheckResult:
    measured = float(measured)
    return CheckResult(name, anchor, measured, tol, bool(measured <= tol))


def _ge(name, anchor, measured, tol) -> CheckResult:
    measured = float(measured)
    return CheckResult(name, anchor, measured, tol, bool(measured >= tol), ">=")


def random_pairs(n: int = 20, seed: int = SEED) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    return [(float(d), float(D)) for d, D in zip(rng.uniform(-10, 10, n), rng.uniform(0.05, 10, n))]


def _psi(delta, linewidth, t_max=10.0, dt=1e-3, params=None, strict=True):
    params = params or make_params()
    packet = exponential_packet(delta, linewidth, params)
    grid = TimeGrid.from_horizon(t_max, dt)
    return params, packet, evolve_psi_ode(params, packet, grid, strict=strict)


def check_closed_form() -> CheckResult:
    worst = 0.0
    for d, D in random_pairs() + TRIPLES:
        params, _, psi = _psi(d, D)
        ref = psi_closed_form(params, d, D, psi.grid.times)
        worst = max(worst, float(np.max(np.abs(psi.values - ref))))
    return _le("closed form vs RK4 (23 pairs)", "psi(t) closed form for the exponential packet",
               worst, 1e-8)


def rk4_order(dt: float, delta: float = 1.0, linewidth: float = 0.5) -> float:
    """Error ratio err(dt)/err(dt/2) against the closed form; 16 for exact 4th order."""
    errs = []
    for h in (dt, dt / 2):
        params, _, psi = _psi(delta, linewidth, dt=h)
        errs.append(np.max(np.abs(psi.values - psi_closed_form(params, delta, linewidth,
                                                              psi.grid.times))))
    return float(errs[0] / errs[1])


def check_rk4_convergence(dt: float = 1e-3) -> CheckResult:
    # The study runs at 10x the working step so truncation error dominates rounding.
    study = 10 * dt
    try:
        ratio = rk4_order(study)
    except StepSizeError:
        ratio = math.nan
    return CheckResult("RK4 convergence order", "dpsi/dt = -(G/2) psi - g phi_in",
                       ratio, 2 ** 3 * 0.9, bool(ratio >= 2 ** 3 * 0.9), ">=")


def check_shift_limits() -> list[CheckResult]:
    t = np.linspace(0, 20, 2001)
    out = []
    mm = max(np.max(np.abs(stark_shift_closed_form(d, 1.0, 1.0, t) - d / 2)) for d in (-4, 0.3, 3, 7))
    out.append(_le("mode matching shift = delta/2", "omega_s = omega0 + delta/2", mm, 1e-12))
    zero = max(np.max(np.abs(stark_shift_closed_form(0.0, D, 1.0, t))) for D in (0.1, 0.9, 5))
    out.append(_le("zero detuning shift = 0", "omega_s = omega0 at delta = 0", zero, 0.0))
    mu = abs(0.5 * (0.1 - 1.0))
    late = np.linspace(5 / mu, 40, 2000)
    long_dev = np.max(np.abs(stark_shift_closed_form(5.0, 0.1, 1.0, late) - 5.0)) / 5.0
    out.append(_le("long packet shift -> delta", "omega_s -> omega0 + delta", long_dev, 0.01))
    # late means t >= 10/mu with mu = (5 - 1)/2; deviation measured relative to |delta|
    late_short = np.linspace(10 / 2.0, 20, 2000)
    short_dev = max(np.max(np.abs(stark_shift_closed_form(d, 5.0, 1.0, late_short))) / abs(d)
                    for d in (0.1, 3, 5))
    out.append(_le("short packet shift -> 0", "omega_s ~ omega0", short_dev, 0.01))
    return out


def check_shift_extraction() -> CheckResult:
    worst = 0.0
    for d, D in TRIPLES:
        _, _, psi = _psi(d, D)
        gen = stark_shift_numeric(psi)
        ref = stark_shift_closed_form(d, D, 1.0, psi.grid.times)
        v = gen.valid
        worst = max(worst, float(np.max(np.abs(gen.shift[v] - ref[v])) / np.max(np.abs(ref))))
    return _le("numeric vs closed-form shift", "omega_s = -Im[psi'/psi]", worst, 1e-4)


def check_interaction_identity() -> CheckResult:
    worst = 0.0
    for d, D in TRIPLES:
        params, packet, psi = _psi(d, D)
        gen = stark_shift_numeric(psi)
        v = gen.valid
        shift = stark_shift_closed_form(d, D, 1.0, psi.grid.times)[v]
        ratio = interaction_energy(params, packet, psi)[v] / (2 * np.abs(psi.values[v]) ** 2)
        worst = max(worst, float(np.max(np.abs(ratio - shift)) / np.max(np.abs(shift))))
    return _le("<H_int> identity", "omega_s - omega0 = <H_int>/(2 hbar |psi|^2)", worst, 1e-6)


def check_master_equation() -> list[CheckResult]:
    pop = coh = 0.0
    for d, D in TRIPLES:
        for c0 in (0.0, 0.6):
            params = make_params()
            packet = exponential_packet(d, D, params).scaled(math.sqrt(1 - c0 ** 2))
            grid = TimeGrid.from_horizon(10, 1e-3)
            psi = evolve_psi_ode(params, packet, grid)
            gen = stark_shift_numeric(psi)
            master = propagate_master(gen, DensityMatrix2(0.0, 0j), exact_density(psi, c0))
            cc = crosscheck_population(master, psi, c0)
            pop, coh = max(pop, cc.population), max(coh, cc.coherence)
    return [_le("master equation population", "rho_ee = |psi|^2", pop, 1e-6),
            _le("master equation coherence (c0 = 0.6)", "rho_eg = psi c0*", coh, 1e-6)]


def check_interference() -> CheckResult:
    worst = 0.0
    for d, D in TRIPLES:
        params, packet, psi = _psi(d, D)
        rec = intensities(params, packet, psi)
        worst = max(worst, float(np.max(np.abs(formula_Ia(params, packet, psi) - rec.Ia))
                                 / np.max(rec.I0)))
    return _le("interference formula vs amplitudes", "Ia = I0 + Ib + 2 sqrt(I0 Ib) cos(pi + phase)",
               worst, 1e-6)


def check_monochromatic() -> list[CheckResult]:
    worst = 0.0
    for d in (0.0, 0.5, 1.0, 5.0):
        params, packet, psi = _psi(d, 0.01, t_max=default_horizon(1.0, 0.01))
        refl, _ = integrated_ratios(intensities(params, packet, psi))
        worst = max(worst, abs(refl / monochromatic_ratios(d)[0] - 1))
    sum_dev = max(abs(sum(monochromatic_ratios(d)) - 1) for d in np.linspace(-20, 20, 81))
    return [_le("monochromatic reflection", "Ib/I0 = G^2/(G^2 + 4 delta^2)", worst, 0.02),
            _le("R + T = 1", "Ia/I0 = 4 delta^2/(G^2 + 4 delta^2)", sum_dev, 0.0)]


def check_flux() -> list[CheckResult]:
    flux = 0.0
    for d, D in TRIPLES:
        params, packet, psi = _psi(d, D, t_max=default_horizon(1.0, D))
        refl, trans = integrated_ratios(intensities(params, packet, psi))
        flux = max(flux, abs(refl + trans - 1))
    spread = 0.0
    for d, D in TRIPLES:
        params, packet, psi = _psi(d, D)
        norms = [excitation_norm(params, packet, psi, t).value for t in (0, 2.5, 5, 7.5, 10)]
        spread = max(spread, max(norms) - min(norms), max(abs(n - 1) for n in norms))
    return [_le("flux conservation", "int(Ia + Ib) = int I0", flux, 0.01),
            _le("excitation norm constant", "|psi|^2 + int |phi|^2 dx = 1", spread, 1e-5)]


def fig3_relative_gap(res) -> float:
    dyn, stat = res.series["diff_dynamic"], res.series["diff_static"]
    return float(np.max(np.abs(dyn - stat)) / np.max(np.abs(dyn)))


def check_figures() -> list[CheckResult]:
    base = ScenarioConfig()
    shifts = {}
    for key, (d, D) in FIG2_TRIPLES.items():
        shifts[key] = run_scenario(base.with_values(packet__delta=d, packet__linewidth=D)).summary[
            "max_abs_shift"]
    margin = min(shifts["red"] - shifts["blue"], shifts["blue"] - shifts["black"])
    out = [_ge("fig2 peak ordering margin", "max|shift|: (3,0.9) > (5,0.1) > (0.1,5)", margin, 0.0)]

    runs = {k: run_scenario(base.with_values(packet__delta=d, packet__linewidth=D))
            for k, (d, D) in FIG3_PANELS.items()}
    out.append(_le("fig3a dynamic/static coincidence", "max|dyn - stat| / max|dyn| at (0.1,5)",
                   fig3_relative_gap(runs["a"]), 0.01))

    half = run_scenario(base.with_values(packet__delta=5.0, packet__linewidth=0.05))
    ratio = np.max(np.abs(half.series["diff_dynamic"])) / np.max(np.abs(runs["b"].series["diff_dynamic"]))
    out.append(_le("fig3b scale halves with linewidth", "(Ia - I0) - Ib ~ -2 D G^2/(G^2 + 4 delta^2)",
                   abs(ratio / 0.5 - 1), 0.10))

    gaps = {k: fig3_relative_gap(r) for k, r in runs.items()}
    margin = gaps["c"] - max(gaps["a"], gaps["b"])
    out.append(_ge("fig3c largest relative gap margin", "gap(3,0.9) - max(gap(0.1,5), gap(5,0.1))",
                   margin, 0.0))
    return out


def check_symmetry() -> list[CheckResult]:
    t = np.linspace(0, 10, 10001)
    odd = 0.0
    for d, D in TRIPLES + [(1.7, 2.3), (8.0, 0.3)]:
        odd = max(odd, np.max(np.abs(stark_shift_closed_form(d, D, 1.0, t)
                                     + stark_shift_closed_form(-d, D, 1.0, t))))

    scale = 0.0
    for d, D in TRIPLES:
        p1 = make_params(1.0, 1e6, 1 / (2 * math.pi), 1.0)
        p2 = make_params(2.0, 2e6, 1 / (4 * math.pi), 2.0)
        s1 = evolve_psi_ode(p1, exponential_packet(d, D, p1), TimeGrid.from_horizon(10, 1e-3))
        s2 = evolve_psi_ode(p2, exponential_packet(2 * d, 2 * D, p2), TimeGrid.from_horizon(5, 5e-4))
        g1, g2 = stark_shift_numeric(s1), stark_shift_numeric(s2)
        v = g1.valid
        scale = max(scale, np.max(np.abs(s1.values - s2.values)),
                    np.max(np.abs(g1.shift[v] - g2.shift[v] / 2)) / np.max(np.abs(g1.shift[v])))

    omega = 0.0
    for d, D in TRIPLES:
        a = run_scenario(ScenarioConfig().with_values(packet__delta=d, packet__linewidth=D,
                                                      params__omega0=0.0))
        b = run_scenario(ScenarioConfig().with_values(packet__delta=d, packet__linewidth=D,
                                                      params__omega0=1e6))
        omega = max(omega, np.nanmax(np.abs(a.series["shift"] - b.series["shift"])))
    return [_le("shift odd in delta", "omega_s - omega0 odd in delta", odd, 1e-10),
            _le("unit rescaling invariance", "(G, delta, D, t) -> (2G, 2delta, 2D, t/2)", scale, 1e-12),
            _le("shift independent of omega0", "shift(omega0 = 0) - shift(omega0 = 1e9)", omega, 0.0)]


def check_determinism() -> list[CheckResult]:
    cfg = ScenarioConfig().with_values(packet__delta=3.0, packet__linewidth=0.9)
    with tempfile.TemporaryDirectory() as tmp:
        a = emit_csv(run_scenario(cfg), Path(tmp) / "a.csv").read_bytes()
        b = emit_csv(run_scenario(cfg), Path(tmp) / "b.csv").read_bytes()
        deltas, widths = [-3.0, 0.5, 3.0], [0.5, 0.9, 2.0]
        serial = write_sweep_csv(run_sweep(cfg, deltas, widths, parallel=False),
                                 Path(tmp) / "s.csv").read_bytes()
        par = write_sweep_csv(run_sweep(cfg, deltas, widths, parallel=True, max_workers=4),
                              Path(tmp) / "p.csv").read_bytes()
    return [_le("simulate CSV byte-identical", "determinism", float(a != b), 0.0),
            _le("sweep serial vs parallel byte-identical", "determinism", float(serial != par), 0.0)]


def run_validation(dt: float = 1e-3) -> list[CheckResult]:
    results = [check_closed_form(), check_rk4_convergence(dt)]
    results += check_shift_limits()
    results.append(check_shift_extraction())
    results.append(check_interaction_identity())
    results += check_master_equation()
    results.append(check_interference())
    results += check_monochromatic()
    results += check_flux()
    results += check_figures()
    results += check_symmetry()
    results += check_determinism()
    return results
