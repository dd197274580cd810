"""Parametric geometry of a helicoid segment.

A segment is fully defined by five parameters: height H, outer diameter
D, strut radial width w, strut thickness t, and the number of helices
per segment N_h. Everything else used by the structural and kinematic
models is derived here. All quantities are SI (meters, radians).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DegenerateGeometryError, InvalidSpecError

# Small-strain heuristic: the linear beam model is trusted below this.
SMALL_STRAIN_LIMIT = 0.05


@dataclass(frozen=True)
class HelicoidSpec:
    """The five design parameters of one segment (SI units).

    H: segment height [m]
    D: outer diameter [m]
    w: strut radial width [m]
    t: strut thickness [m]
    n_h: helices per segment
    """

    H: float
    D: float
    w: float
    t: float
    n_h: int

    def check(self) -> None:
        """Raise InvalidSpecError naming the first violated invariant."""
        if not self.H > 0:
            raise InvalidSpecError(f"H > 0 violated (H={self.H})")
        if not self.D > 0:
            raise InvalidSpecError(f"D > 0 violated (D={self.D})")
        if not self.w > 0:
            raise InvalidSpecError(f"w > 0 violated (w={self.w})")
        if not self.t > 0:
            raise InvalidSpecError(f"t > 0 violated (t={self.t})")
        if not (isinstance(self.n_h, int) and self.n_h >= 1):
            raise InvalidSpecError(f"N_h >= 1 violated (N_h={self.n_h})")
        if not self.w < self.D / 2:
            raise InvalidSpecError(
                f"w < D/2 violated (w={self.w}, D/2={self.D / 2}): "
                "the radial cut down the strut center must exist"
            )
        if not self.t * self.n_h < self.H:
            raise InvalidSpecError(
                f"t*N_h < H violated (t*N_h={self.t * self.n_h}, H={self.H}): "
                "struts must fit in the height with nonzero gaps"
            )

    def scaled(self, s: float) -> "HelicoidSpec":
        """Uniformly scale all lengths by s (N_h unchanged)."""
        return replace(self, H=self.H * s, D=self.D * s, w=self.w * s, t=self.t * s)


@dataclass(frozen=True)
class DerivedGeometry:
    """Geometric quantities derived from a HelicoidSpec (SI units).

    alpha      helical angle at the outer diameter [rad]
    R          outer radius D/2 [m]
    h          height per helix H/N_h [m]
    L          strut length at the outer diameter [m]
    L_avg      strut length at the strut centroid radius [m]
    alpha_avg  helical angle at the strut centroid radius [rad]
    r_c        strut centroid radius (D - w)/2 [m]
    R_m        mean radius of the equivalent solid bar (2R - w)/2 [m]
    A_bar      equivalent bar area pi*R_m^2 [m^2]
    I_bar      equivalent bar second moment pi/4*R_m^4 [m^4]
    """

    alpha: float
    R: float
    h: float
    L: float
    L_avg: float
    alpha_avg: float
    r_c: float
    R_m: float
    A_bar: float
    I_bar: float


def derive_geometry(spec: HelicoidSpec) -> DerivedGeometry:
    """Compute all derived geometric quantities for a valid spec.

    Raises InvalidSpecError if the spec violates a type invariant and
    DegenerateGeometryError if the averaged circumferential run
    pi*(D - w) - 2t is not positive.
    """
    spec.check()
    H, D, w, t, n_h = spec.H, spec.D, spec.w, spec.t, spec.n_h

    run_avg = math.pi * (D - w) - 2 * t
    if run_avg <= 0:
        raise DegenerateGeometryError(
            f"pi*(D - w) - 2t = {run_avg} <= 0: averaged strut geometry undefined"
        )

    alpha = math.atan2(2 * H, math.pi * D)
    L = math.sqrt((H / n_h) ** 2 + (math.pi * D / n_h) ** 2) / 2
    L_avg = math.sqrt(H**2 + run_avg**2) / (2 * n_h)
    alpha_avg = math.atan2(2 * H, run_avg)
    R = D / 2
    R_m = (2 * R - w) / 2
    return DerivedGeometry(
        alpha=alpha,
        R=R,
        h=H / n_h,
        L=L,
        L_avg=L_avg,
        alpha_avg=alpha_avg,
        r_c=(D - w) / 2,
        R_m=R_m,
        A_bar=math.pi * R_m**2,
        I_bar=math.pi / 4 * R_m**4,
    )


@dataclass(frozen=True)
class StrainCheck:
    """Peak bending strain at full compression and the small-strain flag."""

    eps_max: float
    small_strain_ok: bool


def max_strain(spec: HelicoidSpec) -> StrainCheck:
    """Peak material strain of a fully compressed strut, t*alpha/(2L).

    The strain occurs at the strut surfaces (+-t/2 from the neutral
    axis). small_strain_ok is True when eps_max < 0.05, the heuristic
    validity bound of the linear beam model.
    """
    geo = derive_geometry(spec)
    eps = spec.t * geo.alpha / (2 * geo.L)
    return StrainCheck(eps_max=eps, small_strain_ok=eps < SMALL_STRAIN_LIMIT)


@dataclass(frozen=True)
class ManufacturingLimits:
    """User-overridable manufacturability bounds.

    min_thickness: smallest moldable strut thickness [m]
    min_gap: smallest clearance h - t between stacked struts [m]
    max_eps: allowed peak strain at full compression
    """

    min_thickness: float = 0.002
    min_gap: float = 0.001
    max_eps: float = SMALL_STRAIN_LIMIT


@dataclass(frozen=True)
class Violation:
    """One violated constraint: which parameter, the bound, the actual value."""

    parameter: str
    constraint: str
    actual: float

    def __str__(self) -> str:
        return f"{self.parameter}: {self.constraint} (actual {self.actual:g})"


def validate_spec(
    spec: HelicoidSpec, limits: ManufacturingLimits | None = None
) -> list[Violation]:
    """Collect all violated invariants and manufacturing limits.

    Returns an empty list iff the spec satisfies the HelicoidSpec
    invariants and the given limits. Violations are data, not errors;
    invalid specs never raise here.
    """
    limits = limits or ManufacturingLimits()
    out: list[Violation] = []
    if not spec.H > 0:
        out.append(Violation("H", "H > 0", spec.H))
    if not spec.D > 0:
        out.append(Violation("D", "D > 0", spec.D))
    if not spec.w > 0:
        out.append(Violation("w", "w > 0", spec.w))
    if not spec.t > 0:
        out.append(Violation("t", "t > 0", spec.t))
    if not spec.n_h >= 1:
        out.append(Violation("N_h", "N_h >= 1", spec.n_h))
    if spec.D > 0 and not spec.w < spec.D / 2:
        out.append(Violation("w", f"w < D/2 = {spec.D / 2:g}", spec.w))
    if not spec.t * spec.n_h < spec.H:
        out.append(Violation("t", f"t*N_h < H = {spec.H:g}", spec.t * spec.n_h))
    if out:
        return out

    if spec.t < limits.min_thickness:
        out.append(Violation("t", f"t >= {limits.min_thickness:g}", spec.t))
    gap = spec.H / spec.n_h - spec.t
    if gap < limits.min_gap:
        out.append(Violation("h - t", f"h - t >= {limits.min_gap:g}", gap))
    try:
        eps = max_strain(spec).eps_max
    except DegenerateGeometryError:
        out.append(
            Violation("D, w, t", "pi*(D - w) - 2t > 0", math.pi * (spec.D - spec.w) - 2 * spec.t)
        )
        return out
    if eps > limits.max_eps:
        out.append(Violation("eps_max", f"eps_max <= {limits.max_eps:g}", eps))
    return out
