"""Design-file loading: JSON schemas, validation and unit conversion.

Two file kinds are read (documented in docs/schema.md): a segment
design file carrying the five geometric parameters with optional
material, plate and limits blocks, and a robot file carrying modules.
Lengths may be given in m, cm or mm via a "units" key; everything is
converted to meters on load. Moduli are always pascals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import SchemaError
from .geometry import HelicoidSpec, ManufacturingLimits
from .kinematics import (
    DEFAULT_TENDON_PHASES,
    ModuleSpec,
    PccConfig,
    PlateSpec,
    RobotSpec,
    SegmentState,
)
from .material import Material, default_material

UNIT_SCALE = {"m": 1.0, "cm": 0.01, "mm": 0.001}


def _key(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _require(doc: dict, key: str, path: str = ""):
    if not isinstance(doc, dict):
        raise SchemaError(path or "<root>", f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise SchemaError(_key(path, key), "required key missing")
    return doc[key]


def _number(doc: dict, key: str, path: str = "") -> float:
    value = _require(doc, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(_key(path, key), f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(_key(path, key), f"expected a finite number, got {value!r}")
    return float(value)


def _integer(doc: dict, key: str, path: str = "") -> int:
    value = _require(doc, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(_key(path, key), f"expected an integer, got {value!r}")
    return value


def _unit_scale(doc: dict, path: str = "") -> float:
    units = doc.get("units", "m")
    if units not in UNIT_SCALE:
        raise SchemaError(_key(path, "units"), f"unknown units {units!r}; one of {sorted(UNIT_SCALE)}")
    return UNIT_SCALE[units]


def parse_material(doc: dict, path: str = "material") -> Material:
    """Material block: {"shore_a": n} or {"E_pa": n, "nu": n}."""
    if "shore_a" in doc:
        shore = _number(doc, "shore_a", path)
        try:
            return Material.from_shore_a(shore, nu=doc.get("nu", Material.from_shore_a(45).nu))
        except ValueError as exc:
            raise SchemaError(_key(path, "shore_a"), str(exc)) from exc
    if "E_pa" in doc:
        e_pa = _number(doc, "E_pa", path)
        nu = _number(doc, "nu", path) if "nu" in doc else default_material().nu
        try:
            return Material.from_modulus(e_pa, nu=nu)
        except ValueError as exc:
            raise SchemaError(_key(path, "E_pa"), str(exc)) from exc
    raise SchemaError(path, 'material needs either "shore_a" or "E_pa"')


def parse_spec(doc: dict, scale: float, path: str = "") -> HelicoidSpec:
    return HelicoidSpec(
        H=_number(doc, "H", path) * scale,
        D=_number(doc, "D", path) * scale,
        w=_number(doc, "w", path) * scale,
        t=_number(doc, "t", path) * scale,
        n_h=_integer(doc, "N_h", path),
    )


def parse_plate(doc: dict, scale: float, path: str = "plate") -> PlateSpec:
    try:
        return PlateSpec(
            h_p=_number(doc, "h_p", path) * scale,
            D_p=_number(doc, "D_p", path) * scale,
            n_p=_integer(doc, "N_p", path) if "N_p" in doc else 0,
        )
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


@dataclass(frozen=True)
class DesignInput:
    """A parsed segment design file."""

    spec: HelicoidSpec
    material: Material
    material_from_file: bool
    plate: PlateSpec | None
    limits: ManufacturingLimits


def parse_design(doc: dict) -> DesignInput:
    scale = _unit_scale(doc)
    spec = parse_spec(doc, scale)
    material_block = doc.get("material")
    material = parse_material(material_block) if material_block else default_material()
    plate = parse_plate(doc["plate"], scale) if "plate" in doc else None
    limits = ManufacturingLimits()
    if "limits" in doc:
        lim = doc["limits"]
        limits = ManufacturingLimits(
            min_thickness=_number(lim, "min_thickness", "limits") * scale
            if "min_thickness" in lim
            else limits.min_thickness,
            min_gap=_number(lim, "min_gap", "limits") * scale
            if "min_gap" in lim
            else limits.min_gap,
            max_eps=_number(lim, "max_eps", "limits") if "max_eps" in lim else limits.max_eps,
        )
    return DesignInput(
        spec=spec,
        material=material,
        material_from_file=material_block is not None,
        plate=plate,
        limits=limits,
    )


def load_design(path) -> DesignInput:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("<file>", f"not valid JSON: {exc}") from exc
    return parse_design(doc)


@dataclass(frozen=True)
class RobotInput:
    robot: RobotSpec
    material: Material
    material_from_file: bool


def parse_robot(doc: dict) -> RobotInput:
    scale = _unit_scale(doc)
    modules_doc = _require(doc, "modules")
    if not isinstance(modules_doc, list) or not modules_doc:
        raise SchemaError("modules", "expected a non-empty array of modules")
    modules = []
    for i, mdoc in enumerate(modules_doc):
        path = f"modules[{i}]"
        if "segments" in mdoc:
            seg_docs = mdoc["segments"]
            if not isinstance(seg_docs, list) or len(seg_docs) != 2:
                raise SchemaError(_key(path, "segments"), "expected exactly two segments")
            segments = tuple(
                parse_spec(sd, scale, f"{path}.segments[{j}]") for j, sd in enumerate(seg_docs)
            )
        elif "segment" in mdoc:
            seg = parse_spec(mdoc["segment"], scale, _key(path, "segment"))
            segments = (seg, seg)
        else:
            raise SchemaError(path, 'module needs "segments" (pair) or "segment" (replicated)')
        plate = parse_plate(_require(mdoc, "plate", path), scale, _key(path, "plate"))
        phases = mdoc.get("tendon_phases")
        if phases is not None:
            if not isinstance(phases, list) or len(phases) != 3:
                raise SchemaError(_key(path, "tendon_phases"), "expected three angles [rad]")
            phases = tuple(float(p) for p in phases)
        try:
            modules.append(
                ModuleSpec(
                    segments=segments,
                    plate=plate,
                    tendon_radius=_number(mdoc, "tendon_radius", path) * scale,
                    tendon_phases=phases or DEFAULT_TENDON_PHASES,
                )
            )
        except ValueError as exc:
            raise SchemaError(path, str(exc)) from exc
    material_block = doc.get("material")
    material = parse_material(material_block) if material_block else default_material()
    base = doc.get("base_rotation", False)
    if not isinstance(base, bool):
        raise SchemaError("base_rotation", f"expected true/false, got {base!r}")
    return RobotInput(
        robot=RobotSpec(modules=tuple(modules), base_rotation=base),
        material=material,
        material_from_file=material_block is not None,
    )


def load_robot(path) -> RobotInput:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("<file>", f"not valid JSON: {exc}") from exc
    return parse_robot(doc)


def parse_config(doc: dict, robot: RobotSpec) -> PccConfig:
    """Configuration block: {"base_angle": rad, "segments": [{delta_l, theta, phi}...]}."""
    seg_docs = _require(doc, "segments")
    if not isinstance(seg_docs, list) or len(seg_docs) != robot.n_segments:
        raise SchemaError(
            "segments", f"expected {robot.n_segments} segment states for this robot"
        )
    states = []
    for i, sd in enumerate(seg_docs):
        path = f"segments[{i}]"
        states.append(
            SegmentState(
                delta_l=_number(sd, "delta_l", path) if "delta_l" in sd else 0.0,
                theta=_number(sd, "theta", path) if "theta" in sd else 0.0,
                phi=_number(sd, "phi", path) if "phi" in sd else 0.0,
            )
        )
    base = doc.get("base_angle", 0.0)
    if isinstance(base, bool) or not isinstance(base, (int, float)):
        raise SchemaError("base_angle", f"expected a number, got {base!r}")
    return PccConfig(segments=tuple(states), base_angle=float(base))


def config_to_dict(config: PccConfig) -> dict:
    return {
        "base_angle": config.base_angle,
        "segments": [
            {"delta_l": s.delta_l, "theta": s.theta, "phi": s.phi} for s in config.segments
        ],
    }
