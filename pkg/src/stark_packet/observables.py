"""Detector-side intensities and the interference signal.

Times are atom-local retarded times: a detector at distance |x_d| sees the
same series shifted by |x_d|/c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import AmplitudeSeries
from .generator import stark_shift_closed_form
from .model import DomainError, InitialCondition, PacketSpec, PhysicalParams, drive_at_atom


@dataclass(frozen=True)
class IntensityRecord:
    t: np.ndarray
    I0: np.ndarray
    Ia: np.ndarray
    Ib: np.ndarray


def intensities(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
                detector_offset: float = 0.0) -> IntensityRecord:
    """Input, forward and backward intensities from the field amplitudes."""
    t = psi.grid.times
    drive = np.asarray(drive_at_atom(packet, t), dtype=complex)
    emitted = math.sqrt(params.beta) * psi.values
    fwd = emitted + drive if packet.channel == "a" else emitted
    bwd = emitted + drive if packet.channel == "b" else emitted
    return IntensityRecord(t + abs(detector_offset) / params.c,
                           np.abs(drive) ** 2, np.abs(fwd) ** 2, np.abs(bwd) ** 2)


def phase_integral(delta: float, shift: np.ndarray, dt: float) -> np.ndarray:
    """Accumulated phase int_0^t (delta - shift) dt' by the trapezoid rule."""
    return cumulative_trapezoid(delta - np.asarray(shift, dtype=float), dx=dt, initial=0.0)


def interference_formula(I0, Ib, phase):
    """Forward intensity as the sum of two interfering beams."""
    I0, Ib = np.asarray(I0), np.asarray(Ib)
    return I0 + Ib + 2.0 * np.sqrt(I0 * Ib) * np.cos(np.pi + np.asarray(phase))


def _require_formula_domain(packet: PacketSpec, init: InitialCondition) -> None:
    # The constant pi in the cross term holds for psi(0) = 0 and an
    # exponential right-moving input only.
    if packet.kind != "exponential" or packet.channel != "a":
        raise DomainError("interference formula needs a right-moving exponential packet")
    if init.psi0 != 0:
        raise DomainError("interference formula needs psi(0) = 0")


def formula_phase(packet: PacketSpec, gamma_1d: float, t: np.ndarray, mode: str) -> np.ndarray:
    if mode == "dynamic":
        shift = stark_shift_closed_form(packet.delta, packet.linewidth, gamma_1d, t)
        return phase_integral(packet.delta, shift, float(t[1] - t[0]))
    if mode == "static":
        return packet.delta * t
    raise DomainError(f"mode must be 'dynamic' or 'static', got {mode!r}")


def difference_signal(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
                      mode: str = "dynamic",
                      init: InitialCondition = InitialCondition()) -> np.ndarray:
    """(Ia - I0) - Ib from the interference cross term.

    ``static`` replaces omega_s by omega0, so the phase grows as delta*t.
    """
    _require_formula_domain(packet, init)
    rec = intensities(params, packet, psi)
    phase = formula_phase(packet, params.gamma_1d, psi.grid.times, mode)
    return 2.0 * np.sqrt(rec.I0 * rec.Ib) * np.cos(np.pi + phase)


def formula_Ia(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
               init: InitialCondition = InitialCondition()) -> np.ndarray:
    _require_formula_domain(packet, init)
    rec = intensities(params, packet, psi)
    phase = formula_phase(packet, params.gamma_1d, psi.grid.times, "dynamic")
    return interference_formula(rec.I0, rec.Ib, phase)


def monochromatic_ratios(delta: float, gamma_1d: float = 1.0) -> tuple[float, float]:
    """Reflection and transmission of a monochromatic photon (R, T)."""
    r = gamma_1d ** 2 / (gamma_1d ** 2 + 4.0 * delta ** 2)
    return r, 1.0 - r


def default_horizon(gamma_1d: float, linewidth: float) -> float:
    return 20.0 / min(gamma_1d, linewidth)


def integrate_with_tail(y: np.ndarray, dt: float) -> float:
    """Trapezoid over the grid plus an exponential extrapolation of the tail."""
    y = np.asarray(y, dtype=float)
    body = float(np.trapezoid(y, dx=dt))
    a, b = y[-2], y[-1]
    if a > 0 and 0 < b < a:
        rate = math.log(a / b) / dt
        body += b / rate
    return body


def integrated_ratios(rec: IntensityRecord) -> tuple[float, float]:
    """Time-integrated Ib/I0 and Ia/I0."""
    dt = float(rec.t[1] - rec.t[0])
    n0 = integrate_with_tail(rec.I0, dt)
    if n0 <= 0:
        return math.nan, math.nan
    return float(integrate_with_tail(rec.Ib, dt) / n0), float(integrate_with_tail(rec.Ia, dt) / n0)
