"""Command-line front end: analyze, sweep, oracle, mesh, robot, optimize.

One binary with subcommands; all file I/O is explicit via arguments and
flags. Every JSON output embeds the run manifest (tool version, input
hashes, resolved defaults); file outputs in other formats get a
`<name>.manifest.json` sidecar. Exit codes: 0 success, 2 validation or
usage, 3 geometry, 4 kinematic infeasibility, 1 unexpected.
"""

from __future__ import annotations

import hashlib
import json
import sys
from datetime import datetime, timezone

import click
import numpy as np

from . import __version__, SCHEMA_VERSION
from .design import DesignTargets, optimize as run_optimize
from .errors import (
    DegenerateGeometryError,
    HelicoidError,
    InfeasibleConfigError,
    InfeasiblePlateError,
    InvalidSpecError,
    MeshError,
    NoFeasibleDesignError,
    SchemaError,
    SolverError,
)
from .geometry import HelicoidSpec, derive_geometry
from .io import (
    config_to_dict,
    load_design,
    load_robot,
    parse_config,
    parse_material,
    parse_plate,
)
from .kinematics import (
    cable_lengths,
    check_config,
    estimate_config_from_cables,
    forward_kinematics,
    max_bending,
    max_compression,
    payload_deflection,
    total_arc_length,
    workspace_sample,
)
from .mesh import helicoid_mesh, mesh_metadata, swept_volume_estimate, write_stl
from .reference import CHARACTERIZATION, match_catalog
from .stiffness import (
    axial_stiffness,
    stiffness_report,
    sweep as run_sweep,
    sweep_csv,
)

_EXIT_VALIDATION = 2
_EXIT_GEOMETRY = 3
_EXIT_KINEMATIC = 4


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


def build_manifest(inputs: dict, defaults: list[str], sampler: str | None = None) -> dict:
    return {
        "tool": "helicoid",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "inputs": {name: _sha256(path) for name, path in inputs.items()},
        "resolved_defaults": defaults,
        "sampler": sampler,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }


def _dump_json(obj, out_path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _render_text(obj, indent: int = 0) -> list[str]:
    """Human-readable view generated from the JSON structure itself."""
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            value = obj[key]
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(obj, list):
        for value in obj:
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}- {value}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _write_sidecar(out_path, manifest: dict) -> None:
    with open(str(out_path) + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map toolkit exceptions onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SchemaError as exc:
            _fail(_EXIT_VALIDATION, f"design file invalid at {exc.key}: {exc}")
        except (InvalidSpecError, DegenerateGeometryError) as exc:
            _fail(_EXIT_VALIDATION, str(exc))
        except MeshError as exc:
            _fail(_EXIT_GEOMETRY, str(exc))
        except (InfeasibleConfigError, InfeasiblePlateError) as exc:
            _fail(_EXIT_KINEMATIC, str(exc))
        except (SolverError, NoFeasibleDesignError, HelicoidError) as exc:
            _fail(1, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.version_option(__version__, message=f"helicoid %(version)s (schema {SCHEMA_VERSION})")
def main():
    """Analysis toolkit for helicoid soft-rigid robot segments."""


def _spec_dict(spec: HelicoidSpec) -> dict:
    return {"H": spec.H, "D": spec.D, "w": spec.w, "t": spec.t, "N_h": spec.n_h}


def _analyze_payload(design, manifest) -> dict:
    spec = design.spec
    geo = derive_geometry(spec)
    report = stiffness_report(spec, design.material, design.limits)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "spec": _spec_dict(spec),
        "material": {
            "name": design.material.name or None,
            "E_pa": design.material.E,
            "nu": design.material.nu,
            "shore_a": design.material.shore_a,
            "source": "file" if design.material_from_file else "default (Shore A 45)",
        },
        "geometry": {
            "alpha_rad": geo.alpha,
            "alpha_avg_rad": geo.alpha_avg,
            "L_m": geo.L,
            "L_avg_m": geo.L_avg,
            "h_m": geo.h,
            "r_c_m": geo.r_c,
            "R_m_m": geo.R_m,
            "A_bar_m2": geo.A_bar,
            "I_bar_m4": geo.I_bar,
        },
        "stiffness": {
            "k_ax_N_per_m": report.k_ax,
            "k_bend_Nm_per_rad": report.k_bend,
            "I_section_m4": report.i_section,
            "reactions_unit_load": {
                "R1_N": report.reactions_unit_load.r1,
                "M_Nm": report.reactions_unit_load.m,
            },
        },
        "strain": {
            "eps_max": report.eps_max,
            "small_strain_ok": report.small_strain_ok,
            "note": report.strain_note,
        },
        "validation": {
            "ok": report.feasible,
            "violations": [str(v) for v in report.violations],
        },
    }
    if design.plate is not None:
        dl_max = max_compression(spec, design.plate)
        payload["workspace"] = {
            "delta_l_max_m": dl_max,
            "theta_max_full_margin_rad": max_bending(design.plate, dl_max),
        }
    catalog = match_catalog(spec)
    if catalog is not None:
        payload["reference_comparison"] = {
            "design": catalog,
            "published": CHARACTERIZATION[catalog],
        }
    return payload


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json-out", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.option("--text", is_flag=True, help="Print the human-readable rendering instead of JSON.")
@_guarded
def analyze(spec_file, json_out, text):
    """Stiffness/strain/workspace report for a segment design file."""
    design = load_design(spec_file)
    defaults = []
    if not design.material_from_file:
        defaults.append("material: Shore A 45 preset")
    manifest = build_manifest({"spec_file": spec_file}, defaults)
    payload = _analyze_payload(design, manifest)
    if text:
        click.echo("\n".join(_render_text(payload)))
        if json_out:
            _dump_json(payload, json_out)
    else:
        _dump_json(payload, json_out)
        if json_out:
            click.echo(f"report written to {json_out}")
    if not payload["validation"]["ok"]:
        for v in payload["validation"]["violations"]:
            click.echo(f"violation: {v}", err=True)
        sys.exit(_EXIT_VALIDATION)


def _parse_values(values, range_, param):
    if (values is None) == (range_ is None):
        raise click.UsageError("exactly one of --values or --range is required")
    if values is not None:
        try:
            out = [float(v) for v in values.split(",") if v != ""]
        except ValueError as exc:
            raise click.UsageError(f"bad --values list: {exc}") from exc
        if not out:
            raise click.UsageError("--values is empty")
    else:
        parts = range_.split(":")
        if len(parts) != 3:
            raise click.UsageError("--range must be lo:hi:step")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError as exc:
            raise click.UsageError(f"bad --range: {exc}") from exc
        if step == 0:
            raise click.UsageError("--range step must be nonzero")
        if (hi - lo) * step < 0:
            raise click.UsageError("--range step has the wrong sign")
        out = [float(v) for v in np.arange(lo, hi + step * 1e-9, step)]
    if param == "N_h":
        out = [int(round(v)) for v in out]
    return out


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--param", required=True, type=click.Choice(["H", "D", "w", "t", "N_h"]))
@click.option("--values", help="Comma-separated values to sweep.")
@click.option("--range", "range_", help="lo:hi:step sweep range.")
@click.option("--oracle", is_flag=True, help="Add frame-element lattice columns (slow).")
@click.option("--elems", default=16, show_default=True, help="Oracle elements per strut.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="CSV output path (default stdout).")
@_guarded
def sweep(spec_file, param, values, range_, oracle, elems, out):
    """Sweep one parameter and tabulate the analytical (and oracle) stiffness."""
    design = load_design(spec_file)
    swept = _parse_values(values, range_, param)
    rows = run_sweep(design.spec, param, swept, design.material, oracle=oracle,
                     elems_per_strut=elems)
    csv_text = sweep_csv(rows, oracle=oracle)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        _write_sidecar(out, build_manifest({"spec_file": spec_file}, []))
        click.echo(f"sweep written to {out}")
    else:
        click.echo(csv_text, nl=False)
    failures = [r for r in rows if r.error is not None]
    for r in failures:
        click.echo(f"row {r.parameter}={r.value}: {r.error}", err=True)


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", default="both", type=click.Choice(["axial", "bending", "both"]))
@click.option("--elems", default=32, show_default=True, help="Elements per strut.")
@click.option("--dump", type=click.Path(dir_okay=False), help="Write the beam model as JSON.")
@click.option("--json-out", type=click.Path(dir_okay=False))
@_guarded
def oracle(spec_file, mode, elems, dump, json_out):
    """Frame-element stiffness vs the closed form for one segment."""
    from .beam import (
        Section,
        build_guided_cantilever,
        build_segment_lattice,
        model_dump,
        oracle_stiffness,
    )
    from .stiffness import bending_stiffness, strut_deflection

    design = load_design(spec_file)
    spec, mat = design.spec, design.material
    geo = derive_geometry(spec)
    lattice = build_segment_lattice(spec, mat, elems)

    modes = ["axial", "bending"] if mode == "both" else [mode]
    analytical = {"axial": axial_stiffness(spec, mat.E), "bending": bending_stiffness(spec, mat.E)}
    results = {}
    for m in modes:
        k = oracle_stiffness(lattice, m)
        results[m] = {
            "k_oracle": k,
            "k_analytical": analytical[m],
            "ratio_oracle_over_analytical": k / analytical[m],
        }

    guided = build_guided_cantilever(
        geo.L_avg, geo.alpha_avg, Section(spec.w, spec.t), mat, max(elems, 32)
    )
    k_guided = oracle_stiffness(guided, "axial")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "manifest": build_manifest({"spec_file": spec_file}, []),
        "spec": _spec_dict(spec),
        "elems_per_strut": elems,
        "lattice": results,
        "guided_strut_check": {
            "k_oracle": k_guided,
            "k_analytical": 1.0 / strut_deflection(1.0, spec, mat.E),
            "rel_error": abs(k_guided * strut_deflection(1.0, spec, mat.E) - 1.0),
        },
        "note": (
            "lattice helices are independent (interfaces unmodeled), so the "
            "lattice reads softer than interlocked-structure references"
        ),
    }
    _dump_json(payload, json_out)
    if dump:
        _dump_json(
            {"schema_version": SCHEMA_VERSION, "manifest": payload["manifest"],
             **model_dump(lattice)},
            dump,
        )
        click.echo(f"model dump written to {dump}")


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False), help="STL path.")
@click.option("--segments-per-turn", default=128, show_default=True)
@click.option("--rings", default=1, show_default=True, help="Radial wall subdivisions.")
@click.option("--ascii", "ascii_format", is_flag=True, help="Write ASCII STL instead of binary.")
@_guarded
def mesh(spec_file, out, segments_per_turn, rings, ascii_format):
    """Generate the printable segment solid as STL plus a metadata sidecar."""
    if segments_per_turn < 8:
        raise click.UsageError("--segments-per-turn must be >= 8")
    if rings < 1:
        raise click.UsageError("--rings must be >= 1")
    design = load_design(spec_file)
    tri = helicoid_mesh(design.spec, rings=rings, segments_per_turn=segments_per_turn)
    write_stl(tri, out, ascii_format=ascii_format)
    manifest = build_manifest({"spec_file": spec_file}, [])
    meta = {"schema_version": SCHEMA_VERSION, "manifest": manifest,
            **mesh_metadata(design.spec, tri)}
    with open(str(out) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(
        f"mesh written to {out}: {len(tri.triangles)} triangles, "
        f"volume {tri.signed_volume():.6e} m^3 "
        f"(estimate {swept_volume_estimate(design.spec):.6e})"
    )


def _read_stdin_json() -> dict:
    text = sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("<stdin>", f"not valid JSON: {exc}") from exc


@main.group()
def robot():
    """Kinematics of an assembled arm (robot file + config on stdin)."""


def _frame_list(frame: np.ndarray) -> list:
    return [[float(x) for x in row] for row in frame]


@robot.command()
@click.argument("robot_file", type=click.Path(exists=True, dir_okay=False))
@_guarded
def fk(robot_file):
    """Forward kinematics: config JSON on stdin, frames JSON on stdout."""
    rin = load_robot(robot_file)
    config = parse_config(_read_stdin_json(), rin.robot)
    check_config(rin.robot, config)
    result = forward_kinematics(rin.robot, config)
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "manifest": build_manifest({"robot_file": robot_file}, []),
            "base": _frame_list(result.base),
            "joints": [_frame_list(f) for f in result.joints],
            "tip": _frame_list(result.tip),
            "tip_position_m": [float(x) for x in result.tip_position],
        }
    )


@robot.command()
@click.argument("robot_file", type=click.Path(exists=True, dir_okay=False))
@_guarded
def cables(robot_file):
    """Tendon lengths of a configuration (config JSON on stdin)."""
    rin = load_robot(robot_file)
    config = parse_config(_read_stdin_json(), rin.robot)
    check_config(rin.robot, config)
    lengths = cable_lengths(config, rin.robot)
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "manifest": build_manifest({"robot_file": robot_file}, []),
            "lengths_m": [[float(x) for x in row] for row in lengths],
        }
    )


@robot.command()
@click.argument("robot_file", type=click.Path(exists=True, dir_okay=False))
@_guarded
def estimate(robot_file):
    """Config estimate from cable lengths ({"lengths_m": [[...]*3]} on stdin)."""
    rin = load_robot(robot_file)
    doc = _read_stdin_json()
    lengths = doc.get("lengths_m", doc.get("lengths"))
    if lengths is None:
        raise SchemaError("lengths_m", "required key missing")
    est = estimate_config_from_cables(lengths, rin.robot)
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "manifest": build_manifest({"robot_file": robot_file}, []),
            "config": config_to_dict(est.config),
            "residuals_m": list(est.residuals),
            "warnings": list(est.warnings),
        }
    )


@robot.command()
@click.argument("robot_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", "n_samples", default=1000, show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="CSV output (default stdout).")
@_guarded
def workspace(robot_file, n_samples, out):
    """Sample reachable tip positions as x,y,z CSV."""
    if n_samples < 1:
        raise click.UsageError("--n must be >= 1")
    rin = load_robot(robot_file)
    points = workspace_sample(rin.robot, n_samples)
    lines = ["x,y,z"] + [f"{p[0]!r},{p[1]!r},{p[2]!r}" for p in points]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(
            out,
            build_manifest({"robot_file": robot_file}, [], sampler="halton-unscrambled"),
        )
        click.echo(f"workspace written to {out} (reach bound {total_arc_length(rin.robot):.3f} m)")
    else:
        click.echo(text, nl=False)


@robot.command()
@click.argument("robot_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--force", required=True, help="Tip force fx,fy,fz [N].")
@_guarded
def payload(robot_file, force):
    """First-order tip deflection under a tip force (config JSON on stdin)."""
    try:
        f_vec = np.array([float(p) for p in force.split(",")])
        if f_vec.shape != (3,):
            raise ValueError
    except ValueError:
        raise click.UsageError("--force must be fx,fy,fz") from None
    rin = load_robot(robot_file)
    config = parse_config(_read_stdin_json(), rin.robot)
    check_config(rin.robot, config)
    result = payload_deflection(rin.robot, config, f_vec, rin.material)
    _dump_json(
        {
            "schema_version": SCHEMA_VERSION,
            "manifest": build_manifest({"robot_file": robot_file}, []),
            "config": config_to_dict(result.config),
            "tip_displacement_m": [float(x) for x in result.tip_displacement],
        }
    )


@main.command("optimize")
@click.option("--targets", "targets_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", default=4000, show_default=True, help="Max objective evaluations.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="JSON result path.")
@click.option("--trace", "trace_out", type=click.Path(dir_okay=False), help="CSV trace path.")
@_guarded
def optimize_cmd(targets_file, budget, out, trace_out):
    """Inverse design: find a spec meeting the targets file."""
    if budget < 1:
        raise click.UsageError("--budget must be >= 1")
    with open(targets_file, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("<file>", f"not valid JSON: {exc}") from exc

    from .io import UNIT_SCALE, _number

    units = doc.get("units", "m")
    if units not in UNIT_SCALE:
        raise SchemaError("units", f"unknown units {units!r}")
    scale = UNIT_SCALE[units]
    bounds_doc = doc.get("bounds")
    if not isinstance(bounds_doc, dict):
        raise SchemaError("bounds", "required object missing")
    try:
        bounds = {
            name: (float(pair[0]) * scale, float(pair[1]) * scale)
            for name, pair in bounds_doc.items()
        }
        targets = DesignTargets(
            k_ax_target=_number(doc, "k_ax_target"),
            k_bend_target=_number(doc, "k_bend_target"),
            bounds=bounds,
            n_h_values=tuple(int(n) for n in doc.get("N_h_values", [2, 3, 4, 5, 6])),
            k_ax_band=float(doc.get("k_ax_band", 0.02)),
            k_bend_band=float(doc.get("k_bend_band", 0.02)),
            delta_l_min=float(doc.get("delta_l_min", 0.0)) * scale,
            theta_min=float(doc.get("theta_min", 0.0)),
            eps_max_limit=float(doc.get("eps_max_limit", 0.05)),
            weights=tuple(doc.get("weights", (1.0, 1.0))),
            plate=parse_plate(doc["plate"], scale) if "plate" in doc else None,
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError("targets", str(exc)) from exc

    material = parse_material(doc["material"]) if "material" in doc else None
    if material is None:
        from .material import default_material

        material = default_material()

    result = run_optimize(targets, material, budget=budget)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "manifest": build_manifest({"targets_file": targets_file}, []),
        "best_spec": _spec_dict(result.best_spec),
        "achieved": {
            "k_ax_N_per_m": result.report.k_ax,
            "k_bend_Nm_per_rad": result.report.k_bend,
            "eps_max": result.report.eps_max,
            "workspace": result.workspace,
        },
        "objective_value": result.objective_value,
        "n_evaluations": result.n_evaluations,
        "trace_length": len(result.trace),
    }
    _dump_json(payload, out)
    if out:
        click.echo(f"result written to {out}")
    if trace_out:
        lines = ["evaluation,N_h,H,D,w,t,objective"]
        for e in result.trace:
            lines.append(f"{e.evaluation},{e.n_h},{e.H!r},{e.D!r},{e.w!r},{e.t!r},{e.objective!r}")
        with open(trace_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        _write_sidecar(trace_out, payload["manifest"])
        click.echo(f"trace written to {trace_out}")


if __name__ == "__main__":
    main()
