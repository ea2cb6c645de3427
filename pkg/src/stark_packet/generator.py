"""Time-dependent generator of the reduced TLS dynamics.

The log-derivative of the excited-state amplitude splits into a frequency
and a rate::

    shift(t) = -Im[psi'/psi]      (omega_s - omega0, rotating frame)
    rate(t)  = -2 Re[psi'/psi]

Closed forms are provided for the exponential packet; ``stark_shift_numeric``
extracts both from any amplitude series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AmplitudeSeries
from .model import DomainError, PacketSpec, PhysicalParams, TimeGrid, drive_at_atom

EPS_PSI = 1e-8
_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class GeneratorSeries:
    grid: TimeGrid
    shift: np.ndarray
    rate: np.ndarray
    valid: np.ndarray

    def first_valid(self) -> int:
        idx = np.flatnonzero(self.valid)
        if idx.size == 0:
            raise DomainError("no valid support: |psi| below threshold everywhere")
        return int(idx[0])


@dataclass(frozen=True)
class PhaseSeries:
    grid: TimeGrid
    theta: np.ndarray
    valid: np.ndarray


def _as_output(out):
    return float(out) if np.ndim(out) == 0 else out


def stark_shift_closed_form(delta: float, linewidth: float, gamma_1d: float, t):
    """omega_s(t) - omega0 for the exponential packet.

    Derivative of ``atan(sin(delta t) / (cos(delta t) - E))`` with
    ``E = exp(mu t)``, ``mu = (linewidth - gamma_1d)/2``::

        [delta - E (delta cos - mu sin)] / [1 - 2 E cos + E^2]

    Near t = 0 both numerator and denominator vanish; there a short
    Bernoulli series of the log-derivative is used instead.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("stark_shift_closed_form needs t >= 0")
    mu = 0.5 * (linewidth - gamma_1d)
    if abs(mu) < 1e-12 * gamma_1d:
        return _as_output(np.full(t.shape, 0.5 * delta))

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        c, s = np.cos(delta * t), np.sin(delta * t)
        if mu <= 0:
            e = np.exp(mu * t)
            out = (delta - e * (delta * c - mu * s)) / (1 - 2 * e * c + e * e)
        else:
            # divide through by E^2 so large mu*t cannot overflow
            f = np.exp(-mu * t)
            out = (delta * f * f - f * (delta * c - mu * s)) / (f * f - 2 * f * c + 1)

    k = complex(-mu, -delta)
    small = np.abs(k) * t < _SERIES_CUTOFF
    if np.any(small):
        ts = t[small] if t.ndim else t
        # -Im[B(k t)]/t with B(z) = z/(1 - e^-z) = 1 + z/2 + z^2/12 - z^4/720 + z^6/30240
        series = -((k / 2).imag + ts * (k ** 2).imag / 12 - ts ** 3 * (k ** 4).imag / 720
                   + ts ** 5 * (k ** 6).imag / 30240)
        if t.ndim:
            out[small] = series
        else:
            out = series
    return _as_output(out)


def decay_rate_closed_form(delta: float, linewidth: float, gamma_1d: float, t):
    """Gamma(t) = -2 Re[psi'/psi] for the exponential packet (t > 0)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("decay_rate_closed_form needs t > 0 (psi(0) = 0)")
    k = complex(0.5 * (gamma_1d - linewidth), -delta)
    if abs(k) < 1e-12 * gamma_1d:
        return _as_output(gamma_1d - 2.0 / t)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if k.real >= 0:
            logd = k / (-np.expm1(-k * t))
        else:
            logd = k * np.exp(k * t) / np.expm1(k * t)
    return _as_output(gamma_1d - 2.0 * logd.real)


def time_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """4th-order finite difference: central inside, one-sided 5-point at the ends."""
    v = np.asarray(values)
    n = v.size
    if n < 5:
        if n < 3:
            raise DomainError("need at least 3 samples to differentiate")
        return np.gradient(v, dt, edge_order=2)
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * dt)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * dt)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * dt)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * dt)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * dt)
    return d


def log_derivative(values: np.ndarray, dt: float, eps: float = EPS_PSI):
    """psi'/psi with samples below ``eps`` in magnitude masked (NaN)."""
    values = np.asarray(values, dtype=complex)
    valid = np.abs(values) >= eps
    deriv = time_derivative(values, dt)
    ld = np.full(values.shape, np.nan + 1j * np.nan)
    ld[valid] = deriv[valid] / values[valid]
    return ld, valid


def stark_shift_numeric(psi: AmplitudeSeries, eps_psi: float = EPS_PSI) -> GeneratorSeries:
    if psi.values.size < 3:
        raise DomainError("series needs at least 3 samples")
    ld, valid = log_derivative(psi.values, psi.grid.dt, eps_psi)
    return GeneratorSeries(psi.grid, -ld.imag, -2.0 * ld.real, valid)


def interaction_energy(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
                       t=None):
    """<H_int>/hbar = 2 g Im[phi(0, t) psi*(t)].

    Only the freely propagated input enters: the emitted part of the field at
    the atom is sqrt(beta) psi, whose product with psi* is real.
    """
    if t is None:
        t = psi.grid.times
        amp = psi.values
    else:
        amp = psi.at(t)
    out = 2.0 * params.g * np.imag(drive_at_atom(packet, t) * np.conj(amp))
    return _as_output(out)


def unwrap_phase(values: np.ndarray, valid: np.ndarray | None = None) -> np.ndarray:
    theta = np.angle(np.asarray(values, dtype=complex))
    if valid is None or np.all(valid):
        return np.unwrap(theta)
    out = np.full(theta.shape, np.nan)
    out[valid] = np.unwrap(theta[valid])
    return out


def effective_color(values, dt: float, eps: float = EPS_PSI, grid: TimeGrid | None = None):
    """Unwrapped phase and instantaneous color -d(theta)/dt of a complex series.

    The color is reported relative to omega0 (rotating frame).
    """
    values = np.asarray(values, dtype=complex)
    if values.size < 3:
        raise DomainError("series needs at least 3 samples")
    grid = grid or TimeGrid(dt, values.size)
    ld, valid = log_derivative(values, dt, eps)
    return PhaseSeries(grid, unwrap_phase(values, valid), valid), -ld.imag


def closed_form_generator(delta: float, linewidth: float, gamma_1d: float,
                          grid: TimeGrid) -> GeneratorSeries:
    """Closed-form shift/rate on a grid; t = 0 is masked for the rate."""
    t = grid.times
    shift = np.asarray(stark_shift_closed_form(delta, linewidth, gamma_1d, t), dtype=float)
    rate = np.full(t.shape, np.nan)
    rate[1:] = decay_rate_closed_form(delta, linewidth, gamma_1d, t[1:])
    valid = np.isfinite(rate) & np.isfinite(shift)
    return GeneratorSeries(grid, shift, rate, valid)


def max_abs_shift(gen: GeneratorSeries) -> float:
    vals = gen.shift[gen.valid]
    return float(np.max(np.abs(vals))) if vals.size else math.nan
