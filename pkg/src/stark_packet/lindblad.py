"""Reduced TLS density matrix under the time-dependent master equation.

In the rotating frame, with ``shift = omega_s - omega0`` and ``rate = Gamma(t)``,
the master equation only couples each matrix element to itself::

    d(ee)/dt = -rate * ee
    d(eg)/dt = (-i * shift - rate/2) * eg

``gg = 1 - ee`` and ``ge = conj(eg)``, so the trace is fixed by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson

from .dynamics import AmplitudeSeries
from .generator import GeneratorSeries
from .model import DomainError, TimeGrid

RESOLUTION = 0.05


@dataclass(frozen=True)
class DensityMatrix2:
    ee: float
    eg: complex = 0j

    def __post_init__(self):
        if not (-1e-12 <= self.ee <= 1 + 1e-12):
            raise DomainError(f"population ee = {self.ee!r} outside [0, 1]")
        if abs(self.eg) ** 2 > self.ee * (1 - self.ee) + 1e-9:
            raise DomainError("coherence violates |eg|^2 <= ee (1 - ee)")

    def matrix(self) -> np.ndarray:
        """Full 2x2 matrix in the (e, g) basis."""
        return np.array([[self.ee, self.eg], [np.conj(self.eg), 1.0 - self.ee]], dtype=complex)


@dataclass(frozen=True)
class DensitySeries:
    grid: TimeGrid
    ee: np.ndarray
    eg: np.ndarray
    valid: np.ndarray

    def __getitem__(self, k: int) -> DensityMatrix2:
        return DensityMatrix2(float(self.ee[k]), complex(self.eg[k]))


class CrossCheck(NamedTuple):
    population: float
    coherence: float


def lindblad_rhs(rho: DensityMatrix2, shift: float, rate: float) -> tuple[float, complex]:
    """Time derivative (d ee/dt, d eg/dt) of the reduced state."""
    return -rate * rho.ee, (-1j * shift - 0.5 * rate) * rho.eg


def _midpoints(c: np.ndarray) -> np.ndarray:
    """Coefficient at the half steps, cubic through the four nearest samples."""
    if c.size < 4:
        return 0.5 * (c[:-1] + c[1:])
    lo = 3 * c[0] - 3 * c[1] + c[2]
    hi = 3 * c[-1] - 3 * c[-2] + c[-3]
    cp = np.concatenate([[lo], c, [hi]])
    return (-cp[:-3] + 9 * cp[1:-2] + 9 * cp[2:-1] - cp[3:]) / 16.0


def _rk4_factors(c: np.ndarray, h: float) -> np.ndarray:
    """Per-step RK4 growth factor for y' = c(t) y."""
    c0, c1 = c[:-1], c[1:]
    cm = _midpoints(c)
    k1 = c0
    k2 = cm * (1 + 0.5 * h * k1)
    k3 = cm * (1 + 0.5 * h * k2)
    k4 = c1 * (1 + h * k3)
    return 1 + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _runs(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    stops = np.concatenate([idx[breaks], [idx[-1]]])
    return list(zip(starts.tolist(), stops.tolist()))


def exact_density(psi: AmplitudeSeries, c0: complex = 0j) -> DensitySeries:
    """Reduced state traced out of the exact one-excitation state."""
    vals = psi.values
    return DensitySeries(psi.grid, np.abs(vals) ** 2, vals * np.conj(c0),
                         np.ones(vals.shape, dtype=bool))


def resolved_mask(generator: GeneratorSeries, resolution: float = RESOLUTION) -> np.ndarray:
    """Valid samples whose coefficients change slowly on the grid scale."""
    with np.errstate(invalid="ignore"):
        fast = np.maximum(np.abs(generator.rate), np.abs(generator.shift)) * generator.grid.dt
    return generator.valid & (fast <= resolution)


def propagate_master(generator: GeneratorSeries, rho0: DensityMatrix2,
                     exact: DensitySeries | None = None,
                     resolution: float = RESOLUTION) -> DensitySeries:
    """RK4 propagation of the master equation along the generator series.

    The rate diverges where psi vanishes (always at t = 0 for psi(0) = 0), so
    samples whose coefficients are not resolved by the grid are never
    integrated through.  Each run of resolved samples starts from ``rho0``
    if it begins at t = 0 and otherwise from the exact state at its first
    sample, which ``exact`` must then provide.  Unresolved samples carry the
    exact state and are flagged invalid.
    """
    grid = generator.grid
    mask = resolved_mask(generator, resolution)
    runs = _runs(mask)
    if not runs:
        raise DomainError("no valid support: generator is masked everywhere")
    n = grid.n_steps
    ee = np.full(n, np.nan)
    eg = np.full(n, np.nan + 0j)
    if exact is not None:
        if exact.grid != grid:
            raise DomainError("exact state grid does not match generator grid")
        ee[:] = exact.ee
        eg[:] = exact.eg
    ee[0], eg[0] = rho0.ee, rho0.eg

    h = grid.dt
    for start, stop in runs:
        if start == 0:
            seed_ee, seed_eg = rho0.ee, complex(rho0.eg)
        elif exact is None:
            raise DomainError(f"masked samples before index {start}; an exact seed is required")
        else:
            seed_ee, seed_eg = exact.ee[start], exact.eg[start]
        sl = slice(start, stop + 1)
        rate = generator.rate[sl]
        shift = generator.shift[sl]
        f_ee = _rk4_factors(-rate, h)
        f_eg = _rk4_factors(-1j * shift - 0.5 * rate, h)
        ee[start] = seed_ee
        eg[start] = seed_eg
        ee[start + 1:stop + 1] = seed_ee * np.cumprod(f_ee)
        eg[start + 1:stop + 1] = seed_eg * np.cumprod(f_eg)
    return DensitySeries(grid, ee, eg, mask)


def population_from_rate(generator: GeneratorSeries, ee_start: float,
                         resolution: float = RESOLUTION) -> np.ndarray:
    """ee(t) = ee(t0) exp(-int_t0^t rate) on the first resolved run (Simpson)."""
    start, stop = _runs(resolved_mask(generator, resolution))[0]
    out = np.full(generator.grid.n_steps, np.nan)
    integral = cumulative_simpson(generator.rate[start:stop + 1], dx=generator.grid.dt,
                                    initial=0.0)
    out[start:stop + 1] = ee_start * np.exp(-integral)
    return out


def crosscheck_population(master: DensitySeries, psi: AmplitudeSeries,
                          c0: complex = 0j) -> CrossCheck:
    if master.grid != psi.grid:
        raise DomainError("master series and amplitude series use different grids")
    v = master.valid
    pop = float(np.max(np.abs(master.ee[v] - np.abs(psi.values[v]) ** 2)))
    coh = 0.0
    if c0 != 0:
        coh = float(np.max(np.abs(master.eg[v] - psi.values[v] * np.conj(c0))))
    return CrossCheck(pop, coh)
