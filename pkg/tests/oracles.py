"""Reference computations that share no code with the package.

Each oracle recomputes a quantity along an independent route: direct
quadrature of the convolution integral, high-precision evaluation of the
closed forms with mpmath, finite differences of the arctangent phase, and a
plain per-step RK4 loop for the master equation.
"""
import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad

from stark_packet.lindblad import lindblad_rhs


def psi_by_convolution(delta, linewidth, t, gamma=1.0, rho=1 / (2 * math.pi), c=1.0):
    """psi(t) = -g int_0^t exp(-gamma (t - s)/2) phi_in(s) ds with quad."""
    g = math.sqrt(gamma / (4 * math.pi * rho))
    amp = math.sqrt(2 * math.pi * rho * linewidth)

    def integrand(s, part):
        v = amp * np.exp(-0.5 * gamma * (t - s) - (0.5 * linewidth + 1j * delta) * s)
        return v.real if part == 0 else v.imag

    limit = max(50, int(abs(delta) * t) * 4)
    re = quad(integrand, 0, t, args=(0,), limit=limit, epsabs=1e-14, epsrel=1e-13)[0]
    im = quad(integrand, 0, t, args=(1,), limit=limit, epsabs=1e-14, epsrel=1e-13)[0]
    return -g * complex(re, im)


def psi_mp(delta, linewidth, t, gamma=1.0, dps=40):
    """Closed-form amplitude at high precision (removable point included)."""
    with mp.workdps(dps):
        d, D, G, t = mp.mpf(delta), mp.mpf(linewidth), mp.mpf(gamma), mp.mpf(t)
        k = (G - D) / 2 - 1j * d
        pref = -mp.sqrt(G * D / 2) * mp.exp(-G * t / 2)
        if k == 0:
            return complex(pref * t)
        return complex(pref * mp.expm1(k * t) / k)


def shift_mp(delta, linewidth, t, gamma=1.0, dps=40):
    """-Im[psi'/psi] of the closed form, differentiated by mpmath."""
    with mp.workdps(dps):
        d, D, G = mp.mpf(delta), mp.mpf(linewidth), mp.mpf(gamma)
        k = (G - D) / 2 - 1j * d

        def psi(s):
            return mp.exp(-G * s / 2) * mp.expm1(k * s) / k

        t = mp.mpf(t)
        return float(-mp.im(mp.diff(psi, t) / psi(t)))


def rate_mp(delta, linewidth, t, gamma=1.0, dps=40):
    with mp.workdps(dps):
        d, D, G = mp.mpf(delta), mp.mpf(linewidth), mp.mpf(gamma)
        k = (G - D) / 2 - 1j * d

        def psi(s):
            return mp.exp(-G * s / 2) * mp.expm1(k * s) / k

        t = mp.mpf(t)
        return float(-2 * mp.re(mp.diff(psi, t) / psi(t)))


def arctan_phase(delta, linewidth, t, gamma=1.0):
    """atan(sin(delta t) / (cos(delta t) - exp(mu t))), mu = (linewidth - gamma)/2."""
    e = math.exp(0.5 * (linewidth - gamma) * t)
    return math.atan(math.sin(delta * t) / (math.cos(delta * t) - e))


def arctan_shift_fd(delta, linewidth, t, gamma=1.0, h=1e-5):
    """Central difference of the arctangent phase; None near its branch jumps."""
    e = math.exp(0.5 * (linewidth - gamma) * t)
    for s in (t - h, t, t + h):
        den = math.cos(delta * s) - math.exp(0.5 * (linewidth - gamma) * s)
        if abs(den) < 1e-3 * max(1.0, e):
            return None
    lo, hi = arctan_phase(delta, linewidth, t - h, gamma), arctan_phase(delta, linewidth, t + h, gamma)
    if abs(hi - lo) > 1.0:
        return None
    return (hi - lo) / (2 * h)


def loop_rk4_master(shift, rate, dt, rho0, start=0):
    """Textbook RK4 on (ee, eg) with linear interpolation of the coefficients."""
    n = len(shift)
    ee = np.full(n, np.nan)
    eg = np.full(n, np.nan + 0j)
    ee[start], eg[start] = rho0.ee, rho0.eg
    y = (rho0.ee, complex(rho0.eg))

    def f(state, s, r):
        # the rhs only reads ee and eg, so skip DensityMatrix2's bound checks
        return lindblad_rhs(_Raw(*state), s, r)

    for k in range(start, n - 1):
        s0, s1 = shift[k], shift[k + 1]
        r0, r1 = rate[k], rate[k + 1]
        sm, rm = 0.5 * (s0 + s1), 0.5 * (r0 + r1)
        k1 = f(y, s0, r0)
        k2 = f((y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]), sm, rm)
        k3 = f((y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]), sm, rm)
        k4 = f((y[0] + dt * k3[0], y[1] + dt * k3[1]), s1, r1)
        y = (y[0] + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
             y[1] + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))
        ee[k + 1], eg[k + 1] = y
    return ee, eg


class _Raw:
    def __init__(self, ee, eg):
        self.ee, self.eg = ee, eg

