"""3D Euler-Bernoulli frame elements and a direct-stiffness solver.

Independent numerical check of the closed-form segment model. Three
model builders are provided:

* a straight fixed-guided strut (the idealization behind the closed
  form), built in the strut frame with the beam along +x and the
  segment axis at the climb angle to it;
* the same strut as a true helical arc, removing the straight-beam
  approximation;
* a whole-segment lattice of N_h helices clamped between rigid end
  plates.

Elements are 2-node, 12-DOF: linear axial and torsion, cubic Hermite
bending in both principal planes, no shear deformation. Models stay
small (a few thousand DOF), so assembly and factorization are dense;
the Cholesky factorization doubles as the positive-definiteness check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SolverError
from .geometry import HelicoidSpec, derive_geometry
from .material import Material, shear_modulus

RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class Section:
    """Rectangular strut section: radial width w, thickness t [m].

    The local z axis of an element is the thickness direction, so
    bending in the element x-z plane engages the weak moment w*t^3/12.
    The torsion constant is the standard rectangular-section
    approximation (Roark).
    """

    w: float
    t: float

    def __post_init__(self):
        if self.w <= 0 or self.t <= 0:
            raise ValueError(f"section dimensions must be positive (w={self.w}, t={self.t})")

    @property
    def area(self) -> float:
        return self.w * self.t

    @property
    def i_weak(self) -> float:
        """Bending about local y (deflection along the thickness direction)."""
        return self.w * self.t**3 / 12

    @property
    def i_strong(self) -> float:
        """Bending about local z (deflection along the width direction)."""
        return self.t * self.w**3 / 12

    @property
    def torsion_constant(self) -> float:
        a, b = max(self.w, self.t), min(self.w, self.t)
        return a * b**3 * (1 / 3 - 0.21 * (b / a) * (1 - b**4 / (12 * a**4)))


@dataclass(frozen=True)
class Element:
    """One frame element: node indices plus its local axis triad.

    triad rows are the local x (axis), y (width) and z (thickness)
    directions expressed in global coordinates.
    """

    node_i: int
    node_j: int
    triad: np.ndarray
    section: Section
    material: Material


@dataclass(frozen=True)
class Probe:
    """A unit load and the matching response direction for a stiffness read-out."""

    node: int
    load: np.ndarray  # 6-vector applied as the unit load
    response: np.ndarray  # 6-vector dotted with the node result


@dataclass
class BeamModel:
    """Node/element graph with constraints, loads and rigid links."""

    nodes: np.ndarray  # (n, 3) positions [m]
    elements: list[Element]
    fixed: dict[int, set[int]] = field(default_factory=dict)  # node -> dof indices 0..5
    loads: dict[int, np.ndarray] = field(default_factory=dict)  # node -> 6-vector
    rigid_links: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    probes: dict[str, Probe] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def check(self) -> None:
        for el in self.elements:
            length = np.linalg.norm(self.nodes[el.node_j] - self.nodes[el.node_i])
            if length <= 0:
                raise ValueError(f"element ({el.node_i}, {el.node_j}) has zero length")


def element_triad(p0: np.ndarray, p1: np.ndarray, ref_z: np.ndarray) -> np.ndarray:
    """Local axes for an element from p0 to p1.

    Local x runs along the element; local z is ref_z projected
    perpendicular to it (the thickness direction); local y completes
    the right-handed triad.
    """
    ax = np.asarray(p1, float) - np.asarray(p0, float)
    norm = np.linalg.norm(ax)
    if norm == 0:
        raise ValueError("zero-length element")
    ax = ax / norm
    z = np.asarray(ref_z, float) - np.dot(ref_z, ax) * ax
    n = np.linalg.norm(z)
    if n < 1e-12:
        # ref parallel to the axis; fall back to any perpendicular
        seed = np.array([1.0, 0.0, 0.0]) if abs(ax[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        z = seed - np.dot(seed, ax) * ax
        n = np.linalg.norm(z)
    z = z / n
    y = np.cross(z, ax)
    return np.vstack([ax, y, z])


def element_stiffness_local(
    E: float, G: float, A: float, i_y: float, i_z: float, J: float, L: float
) -> np.ndarray:
    """12x12 element stiffness in local coordinates.

    DOF order per node: (ux, uy, uz, rx, ry, rz); node i then node j.
    """
    K = np.zeros((12, 12))
    L2, L3 = L * L, L * L * L

    ea = E * A / L
    K[0, 0] = K[6, 6] = ea
    K[0, 6] = K[6, 0] = -ea

    gj = G * J / L
    K[3, 3] = K[9, 9] = gj
    K[3, 9] = K[9, 3] = -gj

    # bending in the x-y plane: displacement v, rotation about z, inertia i_z
    b = E * i_z
    K[1, 1] = K[7, 7] = 12 * b / L3
    K[1, 7] = K[7, 1] = -12 * b / L3
    K[5, 5] = K[11, 11] = 4 * b / L
    K[5, 11] = K[11, 5] = 2 * b / L
    K[1, 5] = K[5, 1] = K[1, 11] = K[11, 1] = 6 * b / L2
    K[7, 5] = K[5, 7] = K[7, 11] = K[11, 7] = -6 * b / L2

    # bending in the x-z plane: displacement w, rotation about y, inertia i_y
    b = E * i_y
    K[2, 2] = K[8, 8] = 12 * b / L3
    K[2, 8] = K[8, 2] = -12 * b / L3
    K[4, 4] = K[10, 10] = 4 * b / L
    K[4, 10] = K[10, 4] = 2 * b / L
    K[2, 4] = K[4, 2] = K[2, 10] = K[10, 2] = -6 * b / L2
    K[8, 4] = K[4, 8] = K[8, 10] = K[10, 8] = 6 * b / L2

    return K


def element_stiffness_global(model: BeamModel, el: Element) -> np.ndarray:
    """Element stiffness rotated into global coordinates."""
    p0, p1 = model.nodes[el.node_i], model.nodes[el.node_j]
    L = float(np.linalg.norm(p1 - p0))
    sec, mat = el.section, el.material
    Kl = element_stiffness_local(
        mat.E, shear_modulus(mat), sec.area, sec.i_weak, sec.i_strong,
        sec.torsion_constant, L,
    )
    T = np.zeros((12, 12))
    for b in range(4):
        T[3 * b : 3 * b + 3, 3 * b : 3 * b + 3] = el.triad
    return T.T @ Kl @ T


def assemble(model: BeamModel) -> np.ndarray:
    """Dense global stiffness matrix (6 DOF per node, no constraints applied)."""
    model.check()
    n = 6 * model.n_nodes
    K = np.zeros((n, n))
    for el in model.elements:
        Kg = element_stiffness_global(model, el)
        dofs = np.r_[6 * el.node_i : 6 * el.node_i + 6, 6 * el.node_j : 6 * el.node_j + 6]
        K[np.ix_(dofs, dofs)] += Kg
    return K


def _skew(r: np.ndarray) -> np.ndarray:
    return np.array([[0, -r[2], r[1]], [r[2], 0, -r[0]], [-r[1], r[0], 0]])


def _reduction(model: BeamModel) -> tuple[np.ndarray, dict[int, int], np.ndarray]:
    """Rigid-link (master-slave) elimination.

    Returns the transformation T with u_full = T @ u_reduced, the map
    from kept node index to its reduced DOF offset, and the boolean
    mask of free reduced DOFs after single-point constraints.
    """
    slaves: dict[int, int] = {}
    for master, linked in model.rigid_links:
        for s in linked:
            if s in slaves:
                raise ValueError(f"node {s} appears in more than one rigid link")
            slaves[s] = master
    if any(m in slaves for m in (ml for ml, _ in model.rigid_links)):
        raise ValueError("a rigid-link master cannot itself be a slave")

    kept = [i for i in range(model.n_nodes) if i not in slaves]
    offset = {node: 6 * k for k, node in enumerate(kept)}
    n_full, n_red = 6 * model.n_nodes, 6 * len(kept)

    T = np.zeros((n_full, n_red))
    for node in kept:
        T[6 * node : 6 * node + 6, offset[node] : offset[node] + 6] = np.eye(6)
    for s, master in slaves.items():
        r = model.nodes[s] - model.nodes[master]
        # u_s = u_m + theta_m x r ; theta_s = theta_m
        T[6 * s : 6 * s + 3, offset[master] : offset[master] + 3] = np.eye(3)
        T[6 * s : 6 * s + 3, offset[master] + 3 : offset[master] + 6] = -_skew(r)
        T[6 * s + 3 : 6 * s + 6, offset[master] + 3 : offset[master] + 6] = np.eye(3)

    free = np.ones(n_red, dtype=bool)
    for node, dofs in model.fixed.items():
        if node in slaves:
            raise ValueError(f"constrained node {node} is a rigid-link slave")
        for d in dofs:
            free[offset[node] + d] = False
    return T, offset, free


@dataclass
class StaticResult:
    """Solved nodal displacements/rotations of a static load case."""

    model: BeamModel
    u: np.ndarray  # (n_nodes, 6)
    residual: float

    def displacement(self, node: int) -> np.ndarray:
        return self.u[node, :3]

    def rotation(self, node: int) -> np.ndarray:
        return self.u[node, 3:]


def _load_vector(model: BeamModel, loads: dict[int, np.ndarray]) -> np.ndarray:
    f = np.zeros(6 * model.n_nodes)
    for node, vec in loads.items():
        f[6 * node : 6 * node + 6] += np.asarray(vec, float)
    return f


def solve_static(model: BeamModel, loads: dict[int, np.ndarray] | None = None) -> StaticResult:
    """Assemble, constrain and solve; returns per-node displacement vectors.

    Raises SolverError when the constrained system is singular or
    indefinite, reporting how many zero-energy modes were detected.
    The solution must satisfy ||K u - f|| <= 1e-9 ||f||.
    """
    K = assemble(model)
    T, _, free = _reduction(model)
    Kr = T.T @ K @ T
    f = T.T @ _load_vector(model, model.loads if loads is None else loads)

    Kff = Kr[np.ix_(free, free)]
    ff = f[free]
    try:
        c, low = scipy.linalg.cho_factor(Kff)
        uf = scipy.linalg.cho_solve((c, low), ff)
    except np.linalg.LinAlgError as exc:
        eigs = np.linalg.eigvalsh(Kff)
        scale = max(abs(eigs[0]), abs(eigs[-1]), 1.0)
        n_zero = int(np.sum(eigs < 1e-12 * scale))
        raise SolverError(
            f"constrained stiffness matrix is not positive definite "
            f"({n_zero} zero-energy mode(s) detected)",
            n_zero_modes=n_zero,
        ) from exc

    # iterative refinement with extended-precision residuals; the
    # acceptance tolerance is 1e-9*||f|| floored at the float64
    # representability limit eps*|| |K| |u| ||, which dominates only on
    # very fine meshes (the stiff 12EI/L^3 rows floor the achievable
    # residual of any representable u)
    K_ext = Kff.astype(np.longdouble)
    f_ext = ff.astype(np.longdouble)
    fnorm = float(np.linalg.norm(ff))

    def _residual(u):
        return float(np.linalg.norm((K_ext @ u.astype(np.longdouble)) - f_ext))

    residual = _residual(uf)
    floor = float(np.finfo(float).eps * np.linalg.norm(np.abs(Kff) @ np.abs(uf)))
    tolerance = max(RESIDUAL_RTOL * fnorm, 8 * floor)
    for _ in range(5):
        if fnorm == 0 or residual <= tolerance:
            break
        r = (K_ext @ uf.astype(np.longdouble)) - f_ext
        uf = uf - scipy.linalg.cho_solve((c, low), r.astype(np.float64))
        residual = _residual(uf)
    if fnorm > 0 and residual > tolerance:
        raise SolverError(
            f"solver residual {residual:.3e} exceeds max(1e-9*||f||, float64 floor) "
            f"= {tolerance:.3e}"
        )

    ur = np.zeros(len(free))
    ur[free] = uf
    u_full = T @ ur
    return StaticResult(model=model, u=u_full.reshape(-1, 6), residual=residual)


def oracle_stiffness(model: BeamModel, mode: str) -> float:
    """Stiffness read-out: unit load of the given mode, 1/response.

    Modes are defined by the model's probes: lattice models expose
    "axial" (force along the segment axis, N/m) and "bending" (moment
    about a transverse axis, N*m/rad); strut models expose "axial"
    (force along the load line).
    """
    if mode not in model.probes:
        raise ValueError(f"model has no {mode!r} probe; available: {sorted(model.probes)}")
    probe = model.probes[mode]
    result = solve_static(model, loads={probe.node: probe.load})
    response = float(result.u[probe.node] @ probe.response)
    if response == 0:
        raise SolverError("zero response to probe load; stiffness undefined")
    return 1.0 / response


# --------------------------------------------------------------------------
# model builders


def build_guided_cantilever(
    length: float,
    alpha: float,
    section: Section,
    material: Material,
    n_elems: int,
) -> BeamModel:
    """Straight fixed-guided strut, built in the strut frame.

    The beam runs along +x; the load line (the segment axis) lies in
    the x-z plane at angle (pi/2 - alpha) to the beam, i.e. the axial
    force splits into sin(alpha) along the beam and cos(alpha)
    transverse to it. One end is clamped; the guided end cannot rotate
    or move along the beam axis or out of plane, matching the
    idealization where the strut is axially rigid and deflects by
    bending only. The attached unit load acts along the load line and
    the "axial" probe reads the deflection along that same line.
    """
    if n_elems < 1:
        raise ValueError(f"n_elems must be >= 1, got {n_elems}")
    if length <= 0:
        raise ValueError(f"length must be positive, got {length}")
    nodes = np.zeros((n_elems + 1, 3))
    nodes[:, 0] = np.linspace(0.0, length, n_elems + 1)
    ref_z = np.array([0.0, 0.0, 1.0])
    elements = [
        Element(i, i + 1, element_triad(nodes[i], nodes[i + 1], ref_z), section, material)
        for i in range(n_elems)
    ]
    tip = n_elems
    load_line = np.array([math.sin(alpha), 0.0, math.cos(alpha)])
    unit = np.concatenate([load_line, np.zeros(3)])
    model = BeamModel(
        nodes=nodes,
        elements=elements,
        fixed={0: set(range(6)), tip: {0, 1, 3, 4, 5}},
        loads={tip: unit.copy()},
        probes={"axial": Probe(node=tip, load=unit.copy(), response=unit.copy())},
        meta={"kind": "guided_cantilever", "alpha": alpha, "length": length},
    )
    return model


def build_helix_arc(
    radius: float,
    sweep: float,
    rise: float,
    section: Section,
    material: Material,
    n_elems: int,
) -> BeamModel:
    """Helical arc with guided-cantilever boundary conditions.

    The arc is discretized as a polyline, then the whole model is
    rotated so the tip tangent frame is axis-aligned: tip tangent to
    +x, the in-plane transverse direction (tangent/segment-axis plane)
    to +z. The tip constraints are then the same as the straight
    guided cantilever, and the straight-beam limit (radius -> inf at
    fixed arc) reproduces it exactly. Element thickness directions
    follow the segment axis projected on each cross-section.
    """
    if n_elems < 1:
        raise ValueError(f"n_elems must be >= 1, got {n_elems}")
    if radius <= 0 or sweep <= 0:
        raise ValueError("radius and sweep must be positive")
    s = np.linspace(0.0, 1.0, n_elems + 1)
    phi = sweep * s
    nodes = np.column_stack([radius * np.cos(phi), radius * np.sin(phi), rise * s])

    axis = np.array([0.0, 0.0, 1.0])
    # analytic tip tangent (not the last chord: its O(h) direction error
    # would cut the model's convergence to first order)
    tangent = np.array(
        [-radius * sweep * math.sin(sweep), radius * sweep * math.cos(sweep), rise]
    )
    tangent = tangent / np.linalg.norm(tangent)
    v = axis - np.dot(axis, tangent) * tangent
    v = v / np.linalg.norm(v)
    lateral = np.cross(v, tangent)
    rot = np.vstack([tangent, lateral, v])  # maps tangent->x, lateral->y, v->z

    nodes = nodes @ rot.T
    ref_z = rot @ axis  # segment axis in the rotated frame
    elements = [
        Element(i, i + 1, element_triad(nodes[i], nodes[i + 1], ref_z), section, material)
        for i in range(n_elems)
    ]
    tip = n_elems
    unit = np.concatenate([ref_z, np.zeros(3)])
    return BeamModel(
        nodes=nodes,
        elements=elements,
        fixed={0: set(range(6)), tip: {0, 1, 3, 4, 5}},
        loads={tip: unit.copy()},
        probes={"axial": Probe(node=tip, load=unit.copy(), response=unit.copy())},
        meta={"kind": "helix_arc", "radius": radius, "sweep": sweep, "rise": rise},
    )


def build_helical_strut(spec: HelicoidSpec, material: Material, n_elems: int) -> BeamModel:
    """One strut as a true helical arc at the centroid radius.

    Sweep and rise follow the averaged strut length and angle, so this
    is the curved counterpart of the straight idealization; comparing
    the two quantifies the straight-beam approximation error.
    """
    geo = derive_geometry(spec)
    sweep = geo.L_avg * math.cos(geo.alpha_avg) / geo.r_c
    rise = geo.L_avg * math.sin(geo.alpha_avg)
    model = build_helix_arc(geo.r_c, sweep, rise, Section(spec.w, spec.t), material, n_elems)
    model.meta["kind"] = "helical_strut"
    model.meta["spec"] = spec
    return model


def build_segment_lattice(
    spec: HelicoidSpec, material: Material, elems_per_strut: int = 32
) -> BeamModel:
    """Whole-segment model: N_h helices between rigid end plates.

    Each helix runs at the strut centroid radius, rising H over a half
    turn (pitch 2H per turn), phased 2*pi/N_h apart. The helix end
    nodes are rigidly linked to master nodes on the segment axis; the
    base master is clamped and the top master takes the probe loads.
    Inter-helix contact is not modeled, so the lattice is expected to
    read softer than the real interlocked structure; treat its output
    as a diagnostic, not a calibration.
    """
    if elems_per_strut < 1:
        raise ValueError(f"elems_per_strut must be >= 1, got {elems_per_strut}")
    spec.check()
    geo = derive_geometry(spec)
    section = Section(spec.w, spec.t)
    n_el = elems_per_strut * spec.n_h  # struts per helix == N_h
    axis = np.array([0.0, 0.0, 1.0])

    all_nodes: list[np.ndarray] = []
    elements: list[Element] = []
    bottom_ends: list[int] = []
    top_ends: list[int] = []
    for k in range(spec.n_h):
        phi0 = 2 * math.pi * k / spec.n_h
        s = np.linspace(0.0, 1.0, n_el + 1)
        phi = phi0 + math.pi * s
        pts = np.column_stack([geo.r_c * np.cos(phi), geo.r_c * np.sin(phi), spec.H * s])
        base_index = len(all_nodes)
        all_nodes.extend(pts)
        bottom_ends.append(base_index)
        top_ends.append(base_index + n_el)
        for a in range(n_el):
            p0, p1 = pts[a], pts[a + 1]
            elements.append(
                Element(base_index + a, base_index + a + 1, element_triad(p0, p1, axis),
                        section, material)
            )

    base_master = len(all_nodes)
    top_master = base_master + 1
    all_nodes.append(np.array([0.0, 0.0, 0.0]))
    all_nodes.append(np.array([0.0, 0.0, spec.H]))

    axial = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    bending = np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
    return BeamModel(
        nodes=np.array(all_nodes),
        elements=elements,
        fixed={base_master: set(range(6))},
        loads={},
        rigid_links=[(base_master, tuple(bottom_ends)), (top_master, tuple(top_ends))],
        probes={
            "axial": Probe(node=top_master, load=axial, response=axial),
            "bending": Probe(node=top_master, load=bending, response=bending),
        },
        meta={
            "kind": "segment_lattice",
            "spec": spec,
            "base_master": base_master,
            "top_master": top_master,
        },
    )


def model_dump(model: BeamModel) -> dict:
    """JSON-ready dump of nodes, elements, constraints, loads and links."""
    return {
        "nodes": [list(map(float, p)) for p in model.nodes],
        "elements": [
            {
                "nodes": [el.node_i, el.node_j],
                "section": {"w": el.section.w, "t": el.section.t},
                "material": {"E_pa": el.material.E, "nu": el.material.nu},
                "triad": [list(map(float, row)) for row in el.triad],
            }
            for el in model.elements
        ],
        "fixed": {str(n): sorted(d) for n, d in model.fixed.items()},
        "loads": {str(n): list(map(float, v)) for n, v in model.loads.items()},
        "rigid_links": [
            {"master": master, "slaves": list(slaves)} for master, slaves in model.rigid_links
        ],
        "kind": model.meta.get("kind", ""),
    }
