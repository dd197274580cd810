"""Design-analysis toolkit for helicoid soft-rigid robot segments."""

from .geometry import (
    DerivedGeometry,
    HelicoidSpec,
    ManufacturingLimits,
    StrainCheck,
    Violation,
    derive_geometry,
    max_strain,
    validate_spec,
)
from .material import Material, modulus_from_shore_a, shear_modulus, shore_a_from_modulus
from .stiffness import (
    StiffnessReport,
    axial_stiffness,
    bending_stiffness,
    stiffness_report,
    strut_deflection,
    strut_reactions,
    sweep,
)

__version__ = "0.1.0"
SCHEMA_VERSION = "1"

__all__ = [
    "DerivedGeometry",
    "HelicoidSpec",
    "ManufacturingLimits",
    "Material",
    "SCHEMA_VERSION",
    "StiffnessReport",
    "StrainCheck",
    "Violation",
    "axial_stiffness",
    "bending_stiffness",
    "derive_geometry",
    "max_strain",
    "modulus_from_shore_a",
    "shear_modulus",
    "shore_a_from_modulus",
    "stiffness_report",
    "strut_deflection",
    "strut_reactions",
    "sweep",
    "validate_spec",
    "__version__",
]
