"""Independent reference solutions for the benchmark problems.

Closed forms where they exist, numerical integration otherwise. Published
reference constants are read from ``data/reference_values.json``.
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .errors import ShootingFailure, ZeroReference


@dataclass(frozen=True)
class OracleResult:
    value: float
    label: str
    source: str = ""


@lru_cache(maxsize=1)
def reference_values():
    text = resources.files("cbshell").joinpath("data/reference_values.json").read_text()
    return json.loads(text)


def reference(experiment, key):
    """Published constant ``key`` of ``experiment`` (e.g. ``4, "theoretical"``)."""
    return reference_values()[f"experiment{experiment}"][key]["value"]


def percent_error(numerical, analytical):
    """Signed error ``100 (num - ref) / |ref|``."""
    if analytical == 0.0:
        raise ZeroReference("percent error against a zero reference")
    return 100.0 * (numerical - analytical) / abs(analytical)


# ---------------------------------------------------------------- plate


def navier_coefficient(nu=0.3, terms=99):
    """Center-deflection factor ``alpha`` of a simply supported square plate.

    ``w = alpha q a^4 / D``; odd m and n up to ``terms`` are summed. The
    factor does not depend on Poisson's ratio; the argument is kept for the
    call signature of the deflection routine.
    """
    k = np.arange(1, terms + 1, 2, dtype=float)
    m, n = np.meshgrid(k, k, indexing="ij")
    sign = np.sin(m * np.pi / 2.0) * np.sin(n * np.pi / 2.0)
    total = np.sum(sign / (m * n * (m**2 + n**2) ** 2))
    return 16.0 / np.pi**6 * total


def flexural_rigidity(E, h, nu):
    return E * h**3 / (12.0 * (1.0 - nu**2))


def plate_center_deflection(a, h, E, nu, q, terms=99):
    """Linear static center deflection of a simply supported square plate."""
    return navier_coefficient(nu, terms) * q * a**4 / flexural_rigidity(E, h, nu)


# ---------------------------------------------------------------- elastica


def _elastica_rhs(s, y, length, load):
    theta, kappa = y[0], y[1]
    return np.array([kappa, -load * (length - s) * np.cos(theta), np.cos(theta), np.sin(theta)])


def _integrate(kappa0, length, load, steps):
    """RK4 along the arc length; load is ``w / EI``."""
    hs = length / steps
    y = np.array([0.0, kappa0, 0.0, 0.0])
    s = 0.0
    for _ in range(steps):
        k1 = _elastica_rhs(s, y, length, load)
        k2 = _elastica_rhs(s + hs / 2, y + hs / 2 * k1, length, load)
        k3 = _elastica_rhs(s + hs / 2, y + hs / 2 * k2, length, load)
        k4 = _elastica_rhs(s + hs, y + hs * k3, length, load)
        y = y + hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += hs
    return y


def _shoot(length, load, steps):
    def miss(kappa0):
        return _integrate(kappa0, length, load, steps)[1]

    hi = load * length**2 / 2.0  # linear root curvature brackets from above
    lo = 0.0
    if miss(lo) * miss(hi) > 0.0:
        raise ShootingFailure("root curvature not bracketed")
    kappa0 = brentq(miss, lo, hi, xtol=1e-15 * max(hi, 1.0), rtol=1e-14, maxiter=200)
    return _integrate(kappa0, length, load, steps)


def cantilever_uniform_load(L, EI, w, rtol=1e-8, steps=200, max_halvings=12):
    """Large-deflection tip displacements of a cantilever under dead load.

    The load ``w`` per unit length acts perpendicular to the undeformed
    axis. Returns ``(vertical, axial shortening, tip rotation)``; the step
    count is doubled until the tip deflection changes by less than
    ``rtol``.
    """
    if w == 0.0:
        return 0.0, 0.0, 0.0
    load = w / EI
    prev = None
    for _ in range(max_halvings):
        y = _shoot(L, load, steps)
        if prev is not None and abs(y[3] - prev[3]) <= rtol * abs(y[3]):
            return float(y[3]), float(L - y[2]), float(y[0])
        prev = y
        steps *= 2
    raise ShootingFailure("step halving did not converge")


# ---------------------------------------------------------------- end moment


def moment_parameter_to_moment(m, L, EI):
    return 2.0 * np.pi * m * EI / L


def cantilever_end_moment(L, EI, M):
    """Tip rotation, axial shortening and transverse deflection (circular arc)."""
    phi = M * L / EI
    if phi == 0.0:
        return 0.0, 0.0, 0.0
    v = 2.0 * L * np.sin(0.5 * phi) ** 2 / phi
    if abs(phi) < 1e-3:
        u = L * phi**2 / 6.0 * (1.0 - phi**2 / 20.0)  # phi - sin(phi) cancels
    else:
        u = L - L * np.sin(phi) / phi
    return float(phi), float(u), float(v)


# ---------------------------------------------------------------- published values


def scordelis_lo_reference():
    return (
        OracleResult(reference(4, "theoretical"), "theoretical", "Scordelis-Lo roof"),
        OracleResult(reference(4, "consensus"), "consensus", "converged shell elements"),
    )


def twisted_beam_reference(load_x=1.0, load_y=1.0):
    """Tip deflections along the load for tip loads in X and in Y (inches)."""
    return (
        OracleResult(reference(5, "tip_x_load") * load_x, "X load"),
        OracleResult(reference(5, "tip_y_load") * load_y, "Y load"),
    )


# ---------------------------------------------------------------- thick cylinder


def lame_cylinder(r_i, r_o, p, E, nu, r):
    """Plane-strain Lame solution: ``(u_r, sigma_theta, sigma_r)`` at radius r."""
    r = np.asarray(r, dtype=float)
    a = p * r_i**2 / (r_o**2 - r_i**2)
    b = a * r_o**2
    sig_r = a - b / r**2
    sig_t = a + b / r**2
    u = (1.0 + nu) / E * ((1.0 - 2.0 * nu) * a * r + b / r)
    return u, sig_t, sig_r
