"""Isotropic linear elasticity in the lamina frame.

Voigt order is (11, 22, 33, 12, 13, 23) with engineering shear strains, so
the shear diagonal of the constitutive matrix is G. The through-thickness
direction is index 3 (zero-based 2). The reduced 5-component arrays drop
that index.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormalStiffness, InvalidParameter

REDUCED = np.array([0, 1, 3, 4, 5])
NORMAL = 2


def build_constitutive(E, nu):
    """6x6 isotropic elasticity matrix."""
    if not (np.isfinite(E) and E > 0.0):
        raise InvalidParameter(f"E must be positive, got {E}")
    if not (-1.0 < nu < 0.5):
        raise InvalidParameter(f"nu must lie in (-1, 0.5), got {nu}")
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    g = E / (2.0 * (1.0 + nu))
    c = np.zeros((6, 6))
    c[:3, :3] = lam
    c[[0, 1, 2], [0, 1, 2]] = lam + 2.0 * g
    c[[3, 4, 5], [3, 4, 5]] = g
    return c


def reduce_constitutive(c, tol=1e-14):
    """Condense out the normal stress: ``C~_ij = C_ij - C_i3 C_3j / C_33``."""
    c = np.asarray(c, dtype=float)
    c33 = c[NORMAL, NORMAL]
    if not c33 > tol * np.max(np.abs(c)):
        raise DegenerateNormalStiffness(f"C33 = {c33:.3e}")
    red = c[np.ix_(REDUCED, REDUCED)] - np.outer(c[REDUCED, NORMAL], c[NORMAL, REDUCED]) / c33
    return 0.5 * (red + red.T)


def stress(c_red, strain_red):
    """Reduced Cauchy stress from the reduced strain vector (batched)."""
    return np.asarray(strain_red, float) @ np.asarray(c_red, float).T


def recover_normal_strain(c, strain_red):
    """Normal strain that makes the normal stress vanish."""
    c = np.asarray(c, dtype=float)
    c33 = c[NORMAL, NORMAL]
    if not c33 > 0.0:
        raise DegenerateNormalStiffness(f"C33 = {c33:.3e}")
    return -(np.asarray(strain_red, float) @ c[NORMAL, REDUCED]) / c33


@dataclass(frozen=True)
class MaterialLaw:
    """Linear elastic material with density.

    ``normal`` selects how the through-thickness direction is treated:
    ``"zero_stress"`` (shell default, normal stress condensed out) or
    ``"zero_strain"`` (normal strain held at zero, a plane-strain state in
    the fiber direction).
    """

    E: float
    nu: float
    rho: float
    normal: str = "zero_stress"
    C: np.ndarray = field(init=False, repr=False, compare=False)
    C_red: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho > 0.0):
            raise InvalidParameter(f"rho must be positive, got {self.rho}")
        if self.normal not in ("zero_stress", "zero_strain"):
            raise InvalidParameter(f"unknown normal condition {self.normal!r}")
        c = build_constitutive(self.E, self.nu)
        object.__setattr__(self, "C", c)
        if self.normal == "zero_stress":
            red = reduce_constitutive(c)
        else:
            red = c[np.ix_(REDUCED, REDUCED)].copy()
        object.__setattr__(self, "C_red", red)

    def stress(self, strain_red):
        return stress(self.C_red, strain_red)

    def normal_strain(self, strain_red):
        if self.normal == "zero_strain":
            return np.zeros(np.shape(strain_red)[:-1])
        return recover_normal_strain(self.C, strain_red)

    def wave_speed(self):
        """Plane-stress dilatational wave speed sqrt(E / (rho (1 - nu^2)))."""
        if self.normal == "zero_strain":
            return float(np.sqrt(self.C[0, 0] / self.rho))
        return float(np.sqrt(self.E / (self.rho * (1.0 - self.nu**2))))

    def to_dict(self):
        out = {"E": self.E, "nu": self.nu, "rho": self.rho}
        if self.normal != "zero_stress":
            out["normal"] = self.normal
        return out
