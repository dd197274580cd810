"""Closed-form structural model of a helicoid segment.

Each strut is treated as a fixed-guided beam: clamped at one end, free
to translate but not rotate at the other. Under an axial segment load F
the strut carries F/2 and an end moment F*L*cos(alpha)/2, giving the
classic deflection F*L^3*cos^2(alpha)/(12*E*I). The whole segment is
N_h parallel chains of N_h struts in series, so segment stiffness
equals single-strut stiffness. Bending stiffness comes from the
equivalent-bar argument with a wave-spring-style 9*R_m/H correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import HelicoidError
from .geometry import (
    HelicoidSpec,
    ManufacturingLimits,
    Violation,
    derive_geometry,
    max_strain,
    validate_spec,
)
from .material import Material

SWEEPABLE = ("H", "D", "w", "t", "N_h")
_ATTR = {"H": "H", "D": "D", "w": "w", "t": "t", "N_h": "n_h"}


def section_second_moment(spec: HelicoidSpec) -> float:
    """Second moment of the w x t strut section about its weak axis, w*t^3/12 [m^4]."""
    return spec.w * spec.t**3 / 12


@dataclass(frozen=True)
class Reactions:
    """Support reactions of one fixed-guided strut under axial segment load F."""

    r1: float  # transverse support force, F/2 [N]
    m: float  # clamping moment at both ends, F*L*cos(alpha)/2 [N*m]


def strut_reactions(force: float, spec: HelicoidSpec) -> Reactions:
    """Reactions of a single strut carrying segment load `force` [N].

    Uses the nominal (outer-diameter) strut length and helical angle.
    """
    geo = derive_geometry(spec)
    return Reactions(r1=force / 2, m=0.5 * force * geo.L * math.cos(geo.alpha))


def strut_deflection(
    force: float, spec: HelicoidSpec, modulus: float, averaged: bool = True
) -> float:
    """Axial deflection [m] of one strut under segment load `force` [N].

    y = F * L^3 * cos^2(alpha) / (12 * E * I) with I = w*t^3/12.

    With averaged=True (the default, and what the segment stiffness
    uses) L and alpha are taken at the strut centroid radius; with
    averaged=False the nominal outer-diameter values are used.
    """
    geo = derive_geometry(spec)
    length, angle = (geo.L_avg, geo.alpha_avg) if averaged else (geo.L, geo.alpha)
    inertia = section_second_moment(spec)
    return force * length**3 * math.cos(angle) ** 2 / (12 * modulus * inertia)


def axial_stiffness(spec: HelicoidSpec, modulus: float) -> float:
    """Segment axial stiffness k_ax = 12*E*I / (L_avg^3 * cos^2(alpha_avg)) [N/m]."""
    geo = derive_geometry(spec)
    inertia = section_second_moment(spec)
    return 12 * modulus * inertia / (geo.L_avg**3 * math.cos(geo.alpha_avg) ** 2)


def bending_stiffness(spec: HelicoidSpec, modulus: float) -> float:
    """Segment bending stiffness [N*m/rad].

    Equivalent solid bar of mean radius R_m (I_bar/A_bar = R_m^2/4)
    with the empirical 9*R_m/H adjustment:

        k_bend = 9 * k_ax * (I_bar/A_bar) * (R_m/H) = (9/4) * k_ax * R_m^3 / H
    """
    geo = derive_geometry(spec)
    return 2.25 * axial_stiffness(spec, modulus) * geo.R_m**3 / spec.H


def series_stiffness(k: float, n_segments: int) -> float:
    """Stiffness of n identical segments stacked in series, k/n."""
    if n_segments < 1:
        raise ValueError(f"n_segments must be >= 1, got {n_segments}")
    return k / n_segments


# Known inconsistency carried in every report: on the reference base
# geometry (H=0.10, D=0.06, w=0.006, t=0.003, N_h=6) the strain formula
# t*alpha/(2L) evaluates to 6.88%, while the originally reported worked
# value is 4.58% (which corresponds to t*alpha/(3L)). The formula value
# is what this toolkit computes.
STRAIN_FORMULA_NOTE = (
    "eps_max uses t*alpha/(2L) as stated; the originally reported worked "
    "example (4.58% on the H=0.10/D=0.06/w=0.006/t=0.003/N_h=6 baseline) "
    "is not reproduced by that formula, which gives 6.88% there."
)


@dataclass(frozen=True)
class StiffnessReport:
    """Analytical stiffness summary for one segment and material."""

    spec: HelicoidSpec
    material: Material
    k_ax: float  # [N/m]
    k_bend: float  # [N*m/rad]
    eps_max: float
    small_strain_ok: bool
    i_section: float  # strut section second moment [m^4]
    reactions_unit_load: Reactions  # for F = 1 N
    violations: tuple[Violation, ...]
    strain_note: str = STRAIN_FORMULA_NOTE

    @property
    def feasible(self) -> bool:
        return not self.violations


def stiffness_report(
    spec: HelicoidSpec,
    material: Material,
    limits: ManufacturingLimits | None = None,
) -> StiffnessReport:
    """Full analytical report: stiffnesses, strain, reactions, feasibility.

    Pure function of its inputs; raises on invalid specs rather than
    returning a partial report.
    """
    spec.check()
    strain = max_strain(spec)
    return StiffnessReport(
        spec=spec,
        material=material,
        k_ax=axial_stiffness(spec, material.E),
        k_bend=bending_stiffness(spec, material.E),
        eps_max=strain.eps_max,
        small_strain_ok=strain.small_strain_ok,
        i_section=section_second_moment(spec),
        reactions_unit_load=strut_reactions(1.0, spec),
        violations=tuple(validate_spec(spec, limits)),
    )


@dataclass(frozen=True)
class SweepRow:
    """One evaluated point of a parameter sweep."""

    parameter: str
    value: float
    k_ax: float | None = None
    k_bend: float | None = None
    eps_max: float | None = None
    k_ax_oracle: float | None = None
    k_bend_oracle: float | None = None
    error: str | None = None


def _with_value(base: HelicoidSpec, parameter: str, value) -> HelicoidSpec:
    if parameter not in SWEEPABLE:
        raise ValueError(f"unknown sweep parameter {parameter!r}; one of {SWEEPABLE}")
    if parameter == "N_h":
        value = int(value)
    return replace(base, **{_ATTR[parameter]: value})


def sweep(
    base_spec: HelicoidSpec,
    parameter: str,
    values,
    material: Material,
    oracle: bool = False,
    elems_per_strut: int = 32,
) -> list[SweepRow]:
    """Evaluate k_ax, k_bend, eps_max over one swept parameter.

    Rows keep the input order. Invalid swept values produce rows whose
    `error` field holds the message instead of aborting the sweep. With
    oracle=True the frame-element lattice stiffnesses are added (much
    slower).
    """
    rows: list[SweepRow] = []
    for value in values:
        spec = _with_value(base_spec, parameter, value)
        try:
            rep_kax = axial_stiffness(spec, material.E)
            rep_kbend = bending_stiffness(spec, material.E)
            eps = max_strain(spec).eps_max
        except (HelicoidError, ValueError) as exc:
            rows.append(SweepRow(parameter, value, error=str(exc)))
            continue
        row = SweepRow(parameter, value, k_ax=rep_kax, k_bend=rep_kbend, eps_max=eps)
        if oracle:
            from .beam import build_segment_lattice, oracle_stiffness

            model = build_segment_lattice(spec, material, elems_per_strut)
            row = replace(
                row,
                k_ax_oracle=oracle_stiffness(model, "axial"),
                k_bend_oracle=oracle_stiffness(model, "bending"),
            )
        rows.append(row)
    return rows


def _cell(value) -> str:
    """Shortest round-trip decimal; plain ints stay plain.

    Normalizes through float() so numpy scalars do not leak their type
    name into the file.
    """
    if isinstance(value, int):
        return repr(value)
    return repr(float(value))


def sweep_csv(rows: list[SweepRow], oracle: bool = False) -> str:
    """Render sweep rows as CSV with shortest round-trip float formatting."""
    header = "param,value,k_ax_N_per_m,k_bend_Nm_per_rad,eps_max"
    if oracle:
        header += ",k_ax_oracle_N_per_m,k_bend_oracle_Nm_per_rad"
    out = [header]
    for row in rows:
        if row.error is not None:
            cells = [row.parameter, _cell(row.value), "", "", ""]
            if oracle:
                cells += ["", ""]
        else:
            cells = [
                row.parameter,
                _cell(row.value),
                _cell(row.k_ax),
                _cell(row.k_bend),
                _cell(row.eps_max),
            ]
            if oracle:
                cells += [_cell(row.k_ax_oracle), _cell(row.k_bend_oracle)]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
