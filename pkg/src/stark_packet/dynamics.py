"""Exact excited-state amplitude and the fields it radiates into the guide.

The one-excitation Schroedinger equation reduces to a driven linear ODE for
the excited-state amplitude in the rotating frame,

    dpsi/dt = -(gamma_1d/2) psi - g * phi_in(t),

where ``phi_in(t)`` is the freely propagated input packet evaluated at the
atom.  Everything else (outgoing fields, intensities) follows from ``psi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .model import (
    DomainError,
    InitialCondition,
    NormEstimate,
    PacketSpec,
    PhysicalParams,
    TimeGrid,
    drive_at_atom,
    free_input,
)


class OutOfHorizonError(DomainError):
    """Requested a retarded time beyond the end of the simulated grid."""


class StepSizeError(DomainError):
    def __init__(self, dt: float, suggested: float):
        super().__init__(f"dt = {dt:g} too coarse for the fastest rate; use dt <= {suggested:g}")
        self.dt = dt
        self.suggested = suggested


@dataclass(frozen=True)
class AmplitudeSeries:
    grid: TimeGrid
    values: np.ndarray
    frame: str = "rotating"

    def at(self, s):
        """Linear interpolation of psi at times ``s`` inside the grid."""
        t = self.grid.times
        s = np.asarray(s, dtype=float)
        out = np.interp(s, t, self.values.real) + 1j * np.interp(s, t, self.values.imag)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FieldSnapshot:
    t: float
    positions: np.ndarray
    forward: np.ndarray
    backward: np.ndarray


def psi_closed_form(params: PhysicalParams, delta: float, linewidth: float, t):
    """Excited-state amplitude for the exponential packet, psi(0) = 0.

    Rotating frame.  With ``k = (gamma_1d - linewidth)/2 - i*delta``::

        psi(t) = -sqrt(gamma_1d*linewidth/2) * exp(-gamma_1d t/2) * (exp(k t) - 1)/k
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("psi_closed_form needs t >= 0")
    if not linewidth > 0:
        raise DomainError(f"linewidth must be > 0, got {linewidth!r}")
    gam = params.gamma_1d
    pref = -math.sqrt(0.5 * gam * linewidth)
    k = complex(0.5 * (gam - linewidth), -delta)
    if abs(k) < 1e-12 * gam:
        out = pref * t * np.exp(-0.5 * gam * t)
    else:
        z = k * t
        small = np.abs(z) < 1.0
        # expm1 keeps accuracy near t = 0; the difference form never overflows.
        near = np.exp(-0.5 * gam * t) * np.expm1(np.where(small, z, 0)) / k
        far = (np.exp(-(0.5 * linewidth + 1j * delta) * t) - np.exp(-0.5 * gam * t)) / k
        out = pref * np.where(small, near, far)
    return complex(out) if out.ndim == 0 else out


def max_stable_dt(params: PhysicalParams, packet: PacketSpec) -> float:
    rates = [params.gamma_1d, abs(packet.delta)]
    if packet.kind == "exponential":
        rates.append(packet.linewidth)
    return 0.01 / max(rates)


def evolve_psi_ode(params: PhysicalParams, packet: PacketSpec, grid: TimeGrid,
                   init: InitialCondition = InitialCondition(),
                   strict: bool = True) -> AmplitudeSeries:
    """Classical RK4 trace of the driven amplitude equation on ``grid``.

    The ODE is linear with a constant coefficient, so one RK4 step is
    ``psi[n+1] = A psi[n] + b[n]`` with ``A`` the 4th-order Taylor factor and
    ``b[n]`` built from the drive at t_n, t_n + dt/2 and t_n + dt.  The
    recursion is run with ``scipy.signal.lfilter``.

    ``strict=False`` skips the step-size precondition (convergence studies).
    """
    limit = max_stable_dt(params, packet)
    if strict and grid.dt > limit * (1 + 1e-9):
        raise StepSizeError(grid.dt, limit)
    h = grid.dt
    z = -0.5 * params.gamma_1d * h
    a = 1 + z + z * z / 2 + z ** 3 / 6 + z ** 4 / 24

    n = grid.n_steps
    steps = np.arange(n - 1, dtype=float)
    f0 = -params.g * drive_at_atom(packet, steps * h)
    fm = -params.g * drive_at_atom(packet, (steps + 0.5) * h)
    f1 = -params.g * drive_at_atom(packet, (steps + 1.0) * h)
    b = (h / 6.0) * ((1 + z + z * z / 2 + z ** 3 / 4) * f0
                     + (4 + 2 * z + z * z / 2) * fm + f1)

    psi0 = complex(init.psi0)
    values = np.empty(n, dtype=complex)
    values[0] = psi0
    values[1:], _ = lfilter([1.0], [1.0, -a], b.astype(complex), zi=[a * psi0])
    values.setflags(write=False)
    return AmplitudeSeries(grid, values)


def _emitted(params: PhysicalParams, psi: AmplitudeSeries, s):
    """sqrt(beta) psi(s), exactly zero for s < 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s > psi.grid.t_max * (1 + 1e-12)):
        raise OutOfHorizonError(f"retarded time {float(np.max(s)):g} beyond grid end "
                                f"{psi.grid.t_max:g}")
    live = s >= 0
    out = np.where(live, math.sqrt(params.beta) * psi.at(np.where(live, s, 0.0)), 0.0)
    return out


def field_forward(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries, x, t):
    """Right-moving amplitude phi_a(x, t): free input plus emission for x > 0.

    At x <= 0 only the free input is returned (left limit at the atom).
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    free = free_input(packet, x, t) if packet.channel == "a" else np.zeros(x.shape, complex)
    right = x > 0
    s = np.where(right, t - x / params.c, -1.0)
    out = free + _emitted(params, psi, s)
    return complex(out) if out.ndim == 0 else out


def field_backward(params: PhysicalParams, psi: AmplitudeSeries, x, t,
                   packet: PacketSpec | None = None):
    """Left-moving amplitude phi_b(x, t) on the x <= 0 side."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(x > 0):
        raise DomainError("backward channel is evaluated at x <= 0")
    out = _emitted(params, psi, t - np.abs(x) / params.c)
    if packet is not None and packet.channel == "b":
        out = out + free_input(packet, x, t)
    return complex(out) if out.ndim == 0 else out


def _backward_anywhere(params, packet, psi, x, t):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    left = x <= 0
    if np.any(left):
        out[left] = field_backward(params, psi, x[left], t, packet)
    if packet.channel == "b" and np.any(~left):
        out[~left] = free_input(packet, x[~left], t)
    return out


def field_snapshot(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
                   positions, t: float) -> FieldSnapshot:
    positions = np.asarray(positions, dtype=float)
    fwd = np.asarray(field_forward(params, packet, psi, positions, t), dtype=complex)
    bwd = _backward_anywhere(params, packet, psi, positions, t)
    return FieldSnapshot(float(t), positions, fwd.reshape(positions.shape), bwd)


def default_spatial_grid(params: PhysicalParams, packet: PacketSpec, t: float,
                         dx: float, tail: float = 30.0) -> np.ndarray:
    ct = params.c * t
    lo, hi = -ct, ct
    if packet.kind == "exponential":
        reach = tail * packet.c / packet.linewidth
        if packet.channel == "a":
            lo -= reach
        else:
            hi += reach
    else:
        lo = min(lo, packet.xs[0] + (ct if packet.channel == "a" else -ct))
        hi = max(hi, packet.xs[-1] + (ct if packet.channel == "a" else -ct))
    n = int(math.ceil((hi - lo) / dx)) + 1
    return np.linspace(lo, hi, n)


def excitation_norm(params: PhysicalParams, packet: PacketSpec, psi: AmplitudeSeries,
                    t: float, spatial_grid=None) -> NormEstimate:
    """|psi(t)|^2 plus the photon norm in both channels, in photon units.

    The x integral is split at every point where a field may jump (the atom,
    the emission fronts at +-c t and the propagated edges of the input
    support) so the trapezoid rule never straddles a discontinuity.
    """
    ct = params.c * t
    if spatial_grid is None:
        spatial_grid = default_spatial_grid(params, packet, t, params.c * psi.grid.dt)
    grid = np.asarray(spatial_grid, dtype=float)

    edges = [-ct, 0.0, ct]
    lo, hi = packet.support
    shift = ct if packet.channel == "a" else -ct
    edges += [v + shift for v in (lo, hi) if math.isfinite(v)]
    edges = sorted({e for e in edges if grid[0] < e < grid[-1]})
    cuts = [grid[0], *edges, grid[-1]]

    total = 0.0
    for p, q in zip(cuts[:-1], cuts[1:]):
        if q <= p:
            continue
        eps = 1e-10 * (q - p)
        inner = grid[(grid > p + eps) & (grid < q - eps)]
        pts = np.concatenate([[p + eps], inner, [q - eps]])
        fa = np.asarray(field_forward(params, packet, psi, pts, t))
        fb = _backward_anywhere(params, packet, psi, pts, t)
        total += float(np.trapezoid(np.abs(fa) ** 2 + np.abs(fb) ** 2, pts))

    value = abs(psi.at(t)) ** 2 + total / params.norm_unit
    need_lo, need_hi = -ct, ct
    if packet.kind == "exponential":
        reach = 10.0 * packet.c / packet.linewidth
        if packet.channel == "a":
            need_lo -= reach
        else:
            need_hi += reach
    else:
        need_lo = min(need_lo, lo + shift)
        need_hi = max(need_hi, hi + shift)
    incomplete = grid[0] > need_lo or grid[-1] < need_hi
    return NormEstimate(value, False, bool(incomplete))
