"""Elastomer material models.

Young's modulus is obtained either directly or from Shore A hardness
via the Gent indentation relation, which is accurate for liquid
silicone rubbers. The structural model is linear, so a material is just
(E, nu) plus bookkeeping about where E came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Gent relation coefficients; E in MPa for S in Shore A points.
_GENT_A = 0.0981
_GENT_B = 7.62336
_GENT_C = 0.137505
# The rational expression has a pole at S = 100; reject well before it.
SHORE_A_MAX = 95.0

DEFAULT_POISSON = 0.48  # near-incompressible silicone without conditioning trouble


def modulus_from_shore_a(shore_a: float) -> float:
    """Young's modulus [Pa] from Shore A hardness via the Gent relation.

    Valid for 0 < shore_a < 95; raises ValueError outside that range.
    """
    if not 0 < shore_a < SHORE_A_MAX:
        raise ValueError(f"Shore A hardness must be in (0, {SHORE_A_MAX:g}), got {shore_a}")
    e_mpa = (_GENT_A * (56 + _GENT_B * shore_a)) / (_GENT_C * (254 - 2.54 * shore_a))
    return e_mpa * 1e6


def shore_a_from_modulus(modulus: float) -> float:
    """Inverse of modulus_from_shore_a (the relation is linear-fractional)."""
    if modulus <= 0:
        raise ValueError(f"modulus must be positive, got {modulus}")
    e_mpa = modulus / 1e6
    return (254 * _GENT_C * e_mpa - 56 * _GENT_A) / (2.54 * _GENT_C * e_mpa + _GENT_A * _GENT_B)


@dataclass(frozen=True)
class Material:
    """Linear elastic material: modulus E [Pa], Poisson ratio nu.

    shore_a records the hardness E was converted from, if any. When E
    is supplied alongside shore_a and does not match the conversion,
    e_overridden must be set.
    """

    E: float
    nu: float = DEFAULT_POISSON
    shore_a: float | None = None
    name: str = ""
    e_overridden: bool = False

    def __post_init__(self):
        if not self.E > 0:
            raise ValueError(f"E must be positive, got {self.E}")
        if not 0 <= self.nu < 0.5:
            raise ValueError(f"nu must be in [0, 0.5), got {self.nu}")
        if self.shore_a is not None:
            if not 0 < self.shore_a < SHORE_A_MAX:
                raise ValueError(f"shore_a out of range: {self.shore_a}")
            if not self.e_overridden:
                expected = modulus_from_shore_a(self.shore_a)
                if not math.isclose(self.E, expected, rel_tol=1e-9):
                    raise ValueError(
                        f"E={self.E} does not match Shore A {self.shore_a} "
                        f"conversion {expected:.6g}; set e_overridden to keep both"
                    )

    @classmethod
    def from_shore_a(cls, shore_a: float, nu: float = DEFAULT_POISSON, name: str = "") -> "Material":
        return cls(E=modulus_from_shore_a(shore_a), nu=nu, shore_a=shore_a, name=name)

    @classmethod
    def from_modulus(cls, modulus: float, nu: float = DEFAULT_POISSON, name: str = "") -> "Material":
        return cls(E=modulus, nu=nu, name=name)


def shear_modulus(mat: Material) -> float:
    """Isotropic shear modulus G = E / (2(1 + nu)) [Pa]."""
    return mat.E / (2 * (1 + mat.nu))


def default_material() -> Material:
    """Material assumed when a design file names none: Shore A 45 silicone."""
    return Material.from_shore_a(45.0, name="shore-a-45")


# Moduli back-computed from the published stiffness of the two catalog
# designs; shipped as presets, not as claims about the actual rubbers.
PRESETS: dict[str, Material] = {
    "shore-a-45": default_material(),
    "small-backfit": Material.from_modulus(2.00e6, name="small-backfit"),
    "large-backfit": Material.from_modulus(2.28e6, name="large-backfit"),
}
