"""Catalog of reference designs and previously reported baselines.

Two segment designs were physically characterized; their measured and
simulated stiffness values are kept here as comparison constants only.
The desk-scale models in this package do not attempt to reproduce the
measurements, just to sit next to them in reports.
"""

from __future__ import annotations

import math

from .geometry import HelicoidSpec
from .kinematics import ModuleSpec, PlateSpec, RobotSpec
from .material import Material, PRESETS

SMALL_FLEXIBLE = HelicoidSpec(H=0.12, D=0.06, w=0.008, t=0.004, n_h=3)
LARGE_STIFF = HelicoidSpec(H=0.17, D=0.08, w=0.012, t=0.005, n_h=4)

CATALOG: dict[str, HelicoidSpec] = {
    "small-flexible": SMALL_FLEXIBLE,
    "large-stiff": LARGE_STIFF,
}

# Moduli that reproduce the reported analytical stiffness of each design.
BACKFIT_MATERIAL: dict[str, Material] = {
    "small-flexible": PRESETS["small-backfit"],
    "large-stiff": PRESETS["large-backfit"],
}

# Reported characterization: (value, spread) for measurements, value for
# the analytical and volumetric-FEM columns. Units: N/m and N*m/rad.
CHARACTERIZATION: dict[str, dict] = {
    "small-flexible": {
        "experiment_k_ax": (124.4, 11.1),
        "experiment_k_bend": (0.0321, 0.006),
        "analytical_k_ax": 99.0,
        "analytical_k_bend": 0.0326,
        "fem_k_ax": 112.4,
        "fem_k_bend": 0.0223,
    },
    "large-stiff": {
        "experiment_k_ax": (410.2, None),
        "experiment_k_bend": (0.1452, None),
        "analytical_k_ax": 354.6,
        "analytical_k_bend": 0.185,
        "fem_k_ax": 393.1,
        "fem_k_bend": 0.130,
    },
}

# Baseline geometry of the reported worked strain example, and the value
# reported there. The strain formula gives 6.88% on this geometry; the
# mismatch is flagged wherever strain is reported.
STRAIN_EXAMPLE_SPEC = HelicoidSpec(H=0.10, D=0.06, w=0.006, t=0.003, n_h=6)
STRAIN_EXAMPLE_REPORTED = 0.0458


def match_catalog(spec: HelicoidSpec, rel_tol: float = 1e-9) -> str | None:
    """Name of the catalog design this spec equals, if any."""
    for name, ref in CATALOG.items():
        if (
            math.isclose(spec.H, ref.H, rel_tol=rel_tol)
            and math.isclose(spec.D, ref.D, rel_tol=rel_tol)
            and math.isclose(spec.w, ref.w, rel_tol=rel_tol)
            and math.isclose(spec.t, ref.t, rel_tol=rel_tol)
            and spec.n_h == ref.n_h
        ):
            return name
    return None


# Reference arm: three modules of two segments each on a rotating base.
# The as-built arm is documented only by its cross-section (the
# small-flexible profile) and its 0.45 m base-to-tip scale, not its
# plate stack, so the segment height and plate dimensions below are
# assumptions chosen to land the straight pose at 0.45 m exactly:
#   6 segments * (H + 2*h_p) = 6 * (0.06 + 0.015) = 0.45 m.
REFERENCE_SEGMENT = HelicoidSpec(H=0.06, D=0.06, w=0.008, t=0.004, n_h=3)
REFERENCE_PLATE = PlateSpec(h_p=0.0075, D_p=0.06, n_p=0)
REFERENCE_TENDON_RADIUS = 0.025

REFERENCE_ROBOT_ASSUMPTIONS = (
    "segment H = 0.06 m (two segments per module reproduce the "
    "characterized 0.12 m of compliant height per module)",
    "plate h_p = 7.5 mm, D_p = 60 mm, no intermediate plates",
    "tendon attachment radius 25 mm",
)


def reference_robot() -> RobotSpec:
    """Three-module arm preset with a 0.45 m straight pose."""
    module = ModuleSpec(
        segments=(REFERENCE_SEGMENT, REFERENCE_SEGMENT),
        plate=REFERENCE_PLATE,
        tendon_radius=REFERENCE_TENDON_RADIUS,
    )
    return RobotSpec(modules=(module, module, module), base_rotation=True)
