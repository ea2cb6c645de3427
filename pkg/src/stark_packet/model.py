"""Unit system, physical parameters and initial single-photon packets.

All complex amplitudes live in the frame rotating at ``omega0``.  A packet
with carrier ``omega_L`` therefore carries the spatial phase ``exp(i*delta*x/c)``
with ``delta = omega_L - omega0``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class PhysicalParams:
    gamma_1d: float
    omega0: float
    rho_1d: float
    c: float
    g: float
    beta: float

    @property
    def norm_unit(self) -> float:
        """Real-space norm of a normalized single photon, ``2*pi*rho_1d*c``."""
        return 2.0 * math.pi * self.rho_1d * self.c


def make_params(gamma_1d: float = 1.0, omega0: float = 1e6,
                rho_1d: float = 1.0 / (2.0 * math.pi), c: float = 1.0) -> PhysicalParams:
    for name, value in (("gamma_1d", gamma_1d), ("rho_1d", rho_1d), ("c", c)):
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    if not (math.isfinite(omega0) and omega0 >= 0):
        raise DomainError(f"omega0 must be finite and >= 0, got {omega0!r}")
    g = math.sqrt(gamma_1d / (4.0 * math.pi * rho_1d))
    beta = gamma_1d * math.pi * rho_1d
    return PhysicalParams(float(gamma_1d), float(omega0), float(rho_1d), float(c), g, beta)


DEFAULT_PARAMS = make_params()


@dataclass(frozen=True)
class PacketSpec:
    """Initial one-photon envelope.

    ``channel`` is ``"a"`` for a right-moving packet arriving from x < 0 and
    ``"b"`` for a left-moving one arriving from x > 0.  ``scale`` multiplies
    the whole envelope; it is 1 for a normalized photon and is reduced when
    part of the excitation sits in ``psi0`` or ``c0``.
    """

    kind: str
    delta: float
    c: float
    norm_unit: float
    linewidth: float | None = None
    amplitude: float = 0.0
    xs: np.ndarray | None = field(default=None, compare=False, repr=False)
    values: np.ndarray | None = field(default=None, compare=False, repr=False)
    channel: str = "a"
    scale: complex = 1.0

    def scaled(self, factor: complex) -> "PacketSpec":
        return PacketSpec(self.kind, self.delta, self.c, self.norm_unit, self.linewidth, self.amplitude,
                          self.xs, self.values, self.channel, self.scale * factor)

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "exponential":
            return (-math.inf, 0.0) if self.channel == "a" else (0.0, math.inf)
        return float(self.xs[0]), float(self.xs[-1])

    @property
    def is_zero(self) -> bool:
        if self.scale == 0:
            return True
        return self.kind == "tabulated" and not np.any(self.values)


def exponential_packet(delta: float, linewidth: float,
                       params: PhysicalParams = DEFAULT_PARAMS,
                       channel: str = "a") -> PacketSpec:
    """Packet left behind by spontaneous emission of a detuned emitter."""
    if not (math.isfinite(linewidth) and linewidth > 0):
        raise DomainError(f"linewidth must be finite and > 0, got {linewidth!r}")
    if not math.isfinite(delta):
        raise DomainError(f"delta must be finite, got {delta!r}")
    if channel not in ("a", "b"):
        raise DomainError(f"channel must be 'a' or 'b', got {channel!r}")
    amp = math.sqrt(2.0 * math.pi * params.rho_1d * linewidth)
    return PacketSpec("exponential", float(delta), params.c, params.norm_unit,
                      float(linewidth), amp, channel=channel)


def tabulated_packet(xs, values, delta: float = 0.0,
                     params: PhysicalParams = DEFAULT_PARAMS,
                     channel: str = "a") -> PacketSpec:
    xs = np.array(xs, dtype=float)
    values = np.array(values, dtype=complex)
    if xs.ndim != 1 or xs.shape != values.shape or xs.size < 2:
        raise DomainError("tabulated packet needs matching 1D x/value arrays with >= 2 samples")
    if not np.all(np.diff(xs) > 0):
        raise DomainError("tabulated packet x must be strictly increasing")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(values))):
        raise DomainError("tabulated packet contains non-finite samples")
    xs.setflags(write=False)
    values.setflags(write=False)
    return PacketSpec("tabulated", float(delta), params.c, params.norm_unit,
                      None, 0.0, xs, values, channel)


def load_packet_csv(path, delta: float = 0.0,
                    params: PhysicalParams = DEFAULT_PARAMS) -> PacketSpec:
    """Read a ``x,re,im`` CSV file into a tabulated packet."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["x", "re", "im"]:
            raise DomainError(f"{path}: header must be 'x,re,im', got {','.join(header)!r}")
        rows = [r for r in reader if r and any(s.strip() for s in r)]
    try:
        data = np.array([[float(s) for s in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise DomainError(f"{path}: expected three columns per row")
    return tabulated_packet(data[:, 0], data[:, 1] + 1j * data[:, 2], delta, params)


def write_packet_csv(packet: PacketSpec, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write("x,re,im\n")
        for x, v in zip(packet.xs, packet.values):
            fh.write(f"{x:.17g},{v.real:.17g},{v.imag:.17g}\n")


def packet_amplitude_at(packet: PacketSpec, x):
    """Initial amplitude of the packet in its own channel at position ``x``.

    Theta(0) = 1 at the packet front.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if packet.kind == "exponential":
        k = 0.5 * packet.linewidth + 1j * packet.delta
        if packet.channel == "a":
            inside = x <= 0
            arg = np.where(inside, x, 0.0)
            out = np.where(inside, packet.amplitude * np.exp(k * arg / packet.c), 0.0)
        else:
            inside = x >= 0
            arg = np.where(inside, x, 0.0)
            out = np.where(inside, packet.amplitude * np.exp(-k * arg / packet.c), 0.0)
    else:
        re = np.interp(x, packet.xs, packet.values.real, left=0.0, right=0.0)
        im = np.interp(x, packet.xs, packet.values.imag, left=0.0, right=0.0)
        out = re + 1j * im
    out = packet.scale * out
    return complex(out) if out.ndim == 0 else out


def drive_at_atom(packet: PacketSpec, t):
    """Freely propagated input amplitude at x = 0 at time ``t``."""
    t = np.asarray(t, dtype=float)
    if packet.channel == "a":
        return packet_amplitude_at(packet, -packet.c * t)
    return packet_amplitude_at(packet, packet.c * t)


def free_input(packet: PacketSpec, x, t):
    """Input packet propagated without the atom: phi(x -/+ c t, 0)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if packet.channel == "a":
        return packet_amplitude_at(packet, x - packet.c * t)
    return packet_amplitude_at(packet, x + packet.c * t)


class NormEstimate(NamedTuple):
    value: float
    coarse: bool = False
    incomplete: bool = False

    @property
    def ok(self) -> bool:
        return not (self.coarse or self.incomplete)


def _clip_to_support(grid: np.ndarray, lo: float, hi: float) -> np.ndarray:
    inner = grid[(grid > lo) & (grid < hi)]
    ends = [v for v in (lo, hi) if math.isfinite(v) and grid[0] <= v <= grid[-1]]
    return np.unique(np.concatenate([inner, ends]))


def packet_norm(packet: PacketSpec, spatial_grid) -> NormEstimate:
    """Trapezoidal norm of the packet in units of one photon.

    The grid is cut at the edges of the packet support so the Heaviside
    front does not leak into the quadrature.
    """
    grid = np.asarray(spatial_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
        raise DomainError("spatial grid must be strictly increasing with >= 2 points")
    lo, hi = packet.support
    pts = _clip_to_support(grid, lo, hi)
    value = 0.0
    if pts.size >= 2:
        value = float(np.trapezoid(np.abs(packet_amplitude_at(packet, pts)) ** 2, pts)) / packet.norm_unit

    coarse = incomplete = False
    step = float(np.max(np.diff(grid)))
    if packet.kind == "exponential":
        width = packet.c / packet.linewidth
        coarse = step > 0.01 * width
        if packet.channel == "a":
            incomplete = grid[0] > -10.0 * width or grid[-1] < 0.0
        else:
            incomplete = grid[-1] < 10.0 * width or grid[0] > 0.0
    else:
        incomplete = grid[0] > lo or grid[-1] < hi
    return NormEstimate(value, bool(coarse), bool(incomplete))


@dataclass(frozen=True)
class TimeGrid:
    dt: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"grid.dt must be > 0, got {self.dt!r}")
        if self.n_steps < 2:
            raise DomainError(f"grid needs at least 2 samples, got {self.n_steps}")

    @classmethod
    def from_horizon(cls, t_max: float, dt: float) -> "TimeGrid":
        if not (math.isfinite(dt) and dt > 0):
            raise DomainError(f"grid.dt must be > 0, got {dt!r}")
        if not (math.isfinite(t_max) and t_max > 0):
            raise DomainError(f"grid.t_max must be > 0, got {t_max!r}")
        return cls(float(dt), int(round(t_max / dt)) + 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps) * self.dt

    @property
    def t_max(self) -> float:
        return (self.n_steps - 1) * self.dt


@dataclass(frozen=True)
class InitialCondition:
    psi0: complex = 0j
    c0: complex = 0j


def make_initial(psi0: complex = 0j, c0: complex = 0j,
                 packet_weight: float = 1.0, tol: float = 1e-9) -> InitialCondition:
    """Check that TLS amplitudes plus packet weight form a normalized state."""
    total = abs(psi0) ** 2 + abs(c0) ** 2 + packet_weight
    if abs(total - 1.0) > tol:
        raise DomainError(f"|psi0|^2 + |c0|^2 + packet weight = {total:.12g}, expected 1")
    return InitialCondition(complex(psi0), complex(c0))
