import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import loop_rk4_master
from stark_packet import (
    DomainError,
    DensityMatrix2,
    InitialCondition,
    TimeGrid,
    crosscheck_population,
    evolve_psi_ode,
    exponential_packet,
    lindblad_rhs,
    propagate_master,
    stark_shift_numeric,
)
from stark_packet.generator import GeneratorSeries
from stark_packet.lindblad import exact_density, population_from_rate, resolved_mask


def _const_generator(shift, rate, n=2001, dt=1e-3):
    grid = TimeGrid(dt, n)
    return GeneratorSeries(grid, np.full(n, float(shift)), np.full(n, float(rate)),
                           np.ones(n, dtype=bool))


def _master(psi, c0=0j):
    gen = stark_shift_numeric(psi)
    return gen, propagate_master(gen, DensityMatrix2(0.0, 0j), exact_density(psi, c0))


def test_rhs_signs():
    d_ee, d_eg = lindblad_rhs(DensityMatrix2(0.5, 0.2 + 0.1j), 0.7, 2.0)
    assert d_ee == -1.0
    assert d_eg == pytest.approx((-0.7j - 1.0) * (0.2 + 0.1j))
    grow, _ = lindblad_rhs(DensityMatrix2(0.3), 0.0, -1.5)
    assert grow > 0


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix2(1.2)
    with pytest.raises(DomainError):
        DensityMatrix2(0.5, 0.6)
    m = DensityMatrix2(0.3, 0.2 - 0.1j).matrix()
    assert np.trace(m).real == 1.0
    assert np.allclose(m, m.conj().T)


def test_spontaneous_emission():
    gen = _const_generator(0.0, 1.0)
    series = propagate_master(gen, DensityMatrix2(1.0))
    assert np.max(np.abs(series.ee - np.exp(-gen.grid.times))) < 1e-12


def test_mode_matched_coherence_winds_at_half_detuning():
    delta = 3.0
    gen = _const_generator(delta / 2, 0.0)
    series = propagate_master(gen, DensityMatrix2(0.5, 0.4))
    expected = 0.4 * np.exp(-0.5j * delta * gen.grid.times)
    assert np.max(np.abs(series.eg - expected)) < 1e-11


def test_zero_generator_keeps_state():
    rho0 = DensityMatrix2(0.2, 0.1 + 0.3j)
    series = propagate_master(_const_generator(0.0, 0.0), rho0)
    assert np.all(series.ee == 0.2) and np.all(series.eg == rho0.eg)


def test_all_masked_is_an_error():
    gen = _const_generator(0.0, 1.0)
    gen = GeneratorSeries(gen.grid, gen.shift, gen.rate, np.zeros_like(gen.valid))
    with pytest.raises(DomainError, match="no valid support"):
        propagate_master(gen, DensityMatrix2(0.0))


@given(st.floats(-5, 5), st.floats(-2, 2), st.floats(0.1, 3), st.floats(-1, 1))
def test_propagation_matches_analytic_solution(s0, r0, w, phase):
    n, dt = 800, 2.5e-3
    t = np.arange(n) * dt
    shift = s0 + np.sin(w * t + phase)
    rate = r0 + 0.5 * np.cos(w * t)
    int_shift = s0 * t + (np.cos(phase) - np.cos(w * t + phase)) / w
    int_rate = r0 * t + 0.5 * np.sin(w * t) / w
    gen = GeneratorSeries(TimeGrid(dt, n), shift, rate, np.ones(n, dtype=bool))
    rho0 = DensityMatrix2(0.25, 0.3 - 0.2j)
    ee_exact = 0.25 * np.exp(-int_rate)
    eg_exact = rho0.eg * np.exp(-1j * int_shift - 0.5 * int_rate)
    fast = propagate_master(gen, rho0)
    assert np.max(np.abs(fast.ee / ee_exact - 1)) < 1e-8
    assert np.max(np.abs(fast.eg / eg_exact - 1)) < 1e-8
    # the per-step loop with linear coefficient interpolation is 2nd order in dt
    ee, eg = loop_rk4_master(shift, rate, dt, rho0)
    assert np.max(np.abs(ee / ee_exact - 1)) < 1e-5
    assert np.max(np.abs(eg / eg_exact - 1)) < 1e-5


def test_loop_oracle_reproduces_population_on_resolved_run(triple_runs):
    _, psi = triple_runs["red"]
    gen = stark_shift_numeric(psi)
    start = int(np.flatnonzero(resolved_mask(gen))[0])
    exact = np.abs(psi.values) ** 2
    ee, _ = loop_rk4_master(gen.shift[:3000], gen.rate[:3000], psi.grid.dt,
                            DensityMatrix2(float(exact[start])), start)
    assert np.max(np.abs(ee[start:3000] - exact[start:3000])) < 1e-5


@pytest.mark.parametrize("key", ["blue", "black", "red"])
def test_population_equals_exact(triple_runs, key):
    _, psi = triple_runs[key]
    _, master = _master(psi)
    assert crosscheck_population(master, psi).population <= 1e-6
    assert master.valid.sum() > 0.9 * psi.grid.n_steps


@pytest.mark.parametrize("key", ["blue", "black", "red"])
def test_coherence_with_ground_amplitude(params, triple_runs, key):
    c0 = 0.6
    packet, _ = triple_runs[key]
    pk = packet.scaled(math.sqrt(1 - c0 ** 2))
    psi = evolve_psi_ode(params, pk, TimeGrid.from_horizon(10, 1e-3), InitialCondition(0j, c0))
    _, master = _master(psi, c0)
    check = crosscheck_population(master, psi, c0)
    assert check.population <= 1e-6 and check.coherence <= 1e-6


def test_undriven_population(undriven_run):
    _, psi = undriven_run
    gen = stark_shift_numeric(psi)
    master = propagate_master(gen, DensityMatrix2(1.0))
    assert crosscheck_population(master, psi).population <= 1e-6


def test_corrupted_rate_is_detected(triple_runs):
    _, psi = triple_runs["red"]
    gen = stark_shift_numeric(psi)
    bad = GeneratorSeries(gen.grid, gen.shift, 1.1 * gen.rate, gen.valid)
    master = propagate_master(bad, DensityMatrix2(0.0), exact_density(psi))
    assert crosscheck_population(master, psi).population > 1e-3


def test_rate_shortcut_matches_propagation(triple_runs):
    for _, psi in triple_runs.values():
        gen, master = _master(psi)
        start, = np.flatnonzero(master.valid)[:1]
        short = population_from_rate(gen, float(master.ee[start]))
        ok = np.isfinite(short)
        assert np.max(np.abs(short[ok] - master.ee[ok])) <= 1e-7


def test_grid_mismatch_rejected(triple_runs):
    _, psi = triple_runs["red"]
    _, master = _master(psi)
    other = evolve_psi_ode(*_other_run())
    with pytest.raises(DomainError):
        crosscheck_population(master, other)


def _other_run():
    from stark_packet import make_params
    p = make_params()
    return p, exponential_packet(3, 0.9, p), TimeGrid.from_horizon(5, 1e-3)


def test_trace_is_one_bit_exactly(triple_runs):
    _, psi = triple_runs["red"]
    _, master = _master(psi)
    for k in (10, 500, 5000, 9999):
        assert np.trace(master[k].matrix()).real == master.ee[k] + (1.0 - master.ee[k])
