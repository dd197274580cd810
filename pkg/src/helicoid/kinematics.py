"""Workspace limits and constant-curvature kinematics of the serial arm.

The arm is a chain of modules; each module is two helicoid segments
joined by rigid plates and actuated by three tendons. Every segment
deforms as a circular arc (constant curvature) described by its axial
length change delta_l, bend angle theta and bend-plane azimuth phi.
Plates contribute rigid axial offsets that do not bend. Tendons of a
module are routed through bowden tubes proximally, so each triple of
cable lengths measures only its own module's arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import InfeasibleConfigError, InfeasiblePlateError
from .geometry import HelicoidSpec
from .material import Material
from .stiffness import axial_stiffness, bending_stiffness

DEFAULT_TENDON_PHASES = (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
_SMALL_THETA = 1e-6  # below this the arc transform uses its series form


@dataclass(frozen=True)
class PlateSpec:
    """Rigid plate geometry: height h_p, diameter D_p, intermediate count n_p."""

    h_p: float
    D_p: float
    n_p: int = 0

    def __post_init__(self):
        if self.h_p <= 0:
            raise ValueError(f"h_p must be positive, got {self.h_p}")
        if self.D_p <= 0:
            raise ValueError(f"D_p must be positive, got {self.D_p}")
        if self.n_p < 0:
            raise ValueError(f"N_p must be >= 0, got {self.n_p}")

    def rigid_offset(self) -> float:
        """Total non-bending plate length per segment, 2*h_p*(N_p + 1) [m]."""
        return 2 * self.h_p * (self.n_p + 1)


@dataclass(frozen=True)
class ModuleSpec:
    """Two stacked segments sharing a plate set and three tendons."""

    segments: tuple[HelicoidSpec, HelicoidSpec]
    plate: PlateSpec
    tendon_radius: float
    tendon_phases: tuple[float, float, float] = DEFAULT_TENDON_PHASES

    def __post_init__(self):
        if len(self.segments) != 2:
            raise ValueError("a module is exactly two segments")
        if not 0 < self.tendon_radius <= self.plate.D_p / 2:
            raise ValueError(
                f"tendon_radius must be in (0, D_p/2 = {self.plate.D_p / 2:g}], "
                f"got {self.tendon_radius}"
            )
        if len(set(self.tendon_phases)) != 3:
            raise ValueError("tendon_phases must be three distinct angles")
        for seg in self.segments:
            if self.plate.rigid_offset() >= seg.H:
                raise InfeasiblePlateError(
                    f"2*h_p*(N_p+1) = {self.plate.rigid_offset():g} leaves no "
                    f"compliant height in a segment of H = {seg.H:g}"
                )

    @property
    def arc_height(self) -> float:
        """Free (compliant) height of the module, sum of segment heights [m]."""
        return sum(seg.H for seg in self.segments)


@dataclass(frozen=True)
class RobotSpec:
    """Serial chain of modules, optionally on a rotating base."""

    modules: tuple[ModuleSpec, ...]
    base_rotation: bool = False

    def __post_init__(self):
        if not self.modules:
            raise ValueError("a robot needs at least one module")

    @property
    def n_segments(self) -> int:
        return 2 * len(self.modules)

    def segment_specs(self) -> list[HelicoidSpec]:
        return [seg for mod in self.modules for seg in mod.segments]

    def segment_plates(self) -> list[PlateSpec]:
        return [mod.plate for mod in self.modules for _ in mod.segments]


@dataclass(frozen=True)
class SegmentState:
    """Constant-curvature state of one segment.

    delta_l: axial length change [m], compression negative
    theta: bend angle [rad]
    phi: bend-plane azimuth [rad]
    """

    delta_l: float = 0.0
    theta: float = 0.0
    phi: float = 0.0


@dataclass(frozen=True)
class PccConfig:
    """Per-segment states plus the base joint angle."""

    segments: tuple[SegmentState, ...]
    base_angle: float = 0.0

    @classmethod
    def straight(cls, robot: RobotSpec) -> "PccConfig":
        return cls(segments=tuple(SegmentState() for _ in range(robot.n_segments)))


def max_compression(segment: HelicoidSpec, plate: PlateSpec) -> float:
    """Largest axial compression before plates touch, H - 2*h_p*(N_p+1) [m].

    Zero is allowed (plates already touching); a negative result means
    the plates do not fit and raises InfeasiblePlateError.
    """
    margin = segment.H - plate.rigid_offset()
    if margin < 0:
        raise InfeasiblePlateError(
            f"plates occupy {plate.rigid_offset():g} m of a {segment.H:g} m segment"
        )
    return margin


def max_bending(plate: PlateSpec, delta_l: float) -> float:
    """Bend-angle limit from the available compression margin, 2*delta_l/D_p [rad]."""
    if delta_l < 0:
        raise ValueError(f"available compression margin must be >= 0, got {delta_l}")
    return 2 * delta_l / plate.D_p


def _rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    T = np.eye(4)
    T[0, 0] = T[1, 1] = c
    T[0, 1] = -s
    T[1, 0] = s
    return T


def _translate_z(dz: float) -> np.ndarray:
    T = np.eye(4)
    T[2, 3] = dz
    return T


def segment_transform(state: SegmentState, height: float) -> np.ndarray:
    """Homogeneous transform of one constant-curvature segment arc.

    The arc has length s = height + delta_l, bends by theta in the
    plane at azimuth phi. theta -> 0 degenerates to a translation by s
    along the axis; the (1 - cos)/theta and sin/theta factors switch to
    series forms near zero so the transform is continuous there.
    """
    s = height + state.delta_l
    if s <= 0:
        raise InfeasibleConfigError(
            f"arc length H + delta_l = {s:g} must be positive", limit="arc_length"
        )
    th = state.theta
    if abs(th) < _SMALL_THETA:
        f1 = th / 2 - th**3 / 24  # (1 - cos th)/th
        f2 = 1 - th**2 / 6 + th**4 / 120  # sin(th)/th
    else:
        f1 = (1 - math.cos(th)) / th
        f2 = math.sin(th) / th

    arc = np.eye(4)
    c, sn = math.cos(th), math.sin(th)
    arc[0, 0] = c
    arc[0, 2] = sn
    arc[2, 0] = -sn
    arc[2, 2] = c
    arc[0, 3] = s * f1
    arc[2, 3] = s * f2
    rz = _rot_z(state.phi)
    return rz @ arc @ rz.T


@dataclass(frozen=True)
class FkResult:
    """Frames produced by forward kinematics (all 4x4 homogeneous)."""

    base: np.ndarray
    segment_bases: tuple[np.ndarray, ...]  # arc start of each segment
    joints: tuple[np.ndarray, ...]  # after each segment's top plate face
    tip: np.ndarray

    @property
    def tip_position(self) -> np.ndarray:
        return self.tip[:3, 3]


def forward_kinematics(robot: RobotSpec, config: PccConfig) -> FkResult:
    """Compose base rotation, plate offsets and segment arcs into frames."""
    if len(config.segments) != robot.n_segments:
        raise ValueError(
            f"config has {len(config.segments)} segment states, robot has "
            f"{robot.n_segments} segments"
        )
    T = _rot_z(config.base_angle) if robot.base_rotation else np.eye(4)
    base = T.copy()
    seg_bases: list[np.ndarray] = []
    joints: list[np.ndarray] = []
    idx = 0
    for module in robot.modules:
        offset = module.plate.h_p * (module.plate.n_p + 1)
        for seg in module.segments:
            T = T @ _translate_z(offset)
            seg_bases.append(T.copy())
            T = T @ segment_transform(config.segments[idx], seg.H)
            T = T @ _translate_z(offset)
            joints.append(T.copy())
            idx += 1
    return FkResult(base=base, segment_bases=tuple(seg_bases), joints=tuple(joints), tip=T)


def config_violations(robot: RobotSpec, config: PccConfig) -> list[str]:
    """Named kinematic-limit violations of a configuration (empty if none)."""
    out: list[str] = []
    specs = robot.segment_specs()
    plates = robot.segment_plates()
    for i, state in enumerate(config.segments):
        limit = max_compression(specs[i], plates[i])
        if not -limit <= state.delta_l <= 0:
            out.append(
                f"segment {i}: delta_l = {state.delta_l:g} outside "
                f"[-delta_l_max, 0] = [{-limit:g}, 0]"
            )
            continue
        margin = limit - abs(state.delta_l)
        theta_lim = max_bending(plates[i], margin)
        if abs(state.theta) > theta_lim + 1e-12:
            out.append(
                f"segment {i}: |theta| = {abs(state.theta):g} exceeds "
                f"theta_max = {theta_lim:g} at delta_l = {state.delta_l:g}"
            )
    return out


def check_config(robot: RobotSpec, config: PccConfig) -> None:
    violations = config_violations(robot, config)
    if violations:
        raise InfeasibleConfigError("; ".join(violations), limit=violations[0])


def _module_arc(config: PccConfig, robot: RobotSpec, module_index: int):
    """Combined arc (s, theta, phi) of one module's two segments."""
    module = robot.modules[module_index]
    s = 0.0
    vx = vy = 0.0
    for j, seg in enumerate(module.segments):
        state = config.segments[2 * module_index + j]
        s += seg.H + state.delta_l
        vx += state.theta * math.cos(state.phi)
        vy += state.theta * math.sin(state.phi)
    theta = math.hypot(vx, vy)
    phi = math.atan2(vy, vx) if theta > 0 else 0.0
    return s, theta, phi


def cable_lengths(config: PccConfig, robot: RobotSpec) -> np.ndarray:
    """Tendon lengths, one row of three per module [m].

    Tendon i of a module with arc (s, theta, phi) measures
    l_i = s - theta * r_d * cos(phi - phase_i); the rigid plate offsets
    are not part of the measured length. The two segments of a module
    share one arc for this map (three cables cannot resolve them).
    """
    if len(config.segments) != robot.n_segments:
        raise ValueError("config/robot segment count mismatch")
    rows = []
    for m, module in enumerate(robot.modules):
        s, theta, phi = _module_arc(config, robot, m)
        r_d = module.tendon_radius
        lengths = [s - theta * r_d * math.cos(phi - p) for p in module.tendon_phases]
        for i, li in enumerate(lengths):
            if li <= 0:
                raise InfeasibleConfigError(
                    f"module {m} tendon {i} length {li:g} <= 0", limit="cable_length"
                )
        rows.append(lengths)
    return np.array(rows)


@dataclass(frozen=True)
class CableEstimate:
    """State estimate from cable lengths plus inversion diagnostics."""

    config: PccConfig
    residuals: tuple[float, ...]  # per-module least-squares residual [m]
    warnings: tuple[str, ...]


def estimate_config_from_cables(lengths, robot: RobotSpec) -> CableEstimate:
    """Closed-form inverse of cable_lengths, one module at a time.

    Solves the linear system l_i = s - a*cos(phase_i) - b*sin(phase_i)
    for (s, a, b), then theta = |(a, b)|/r_d and phi = atan2(b, a).
    The module arc is split over its two segments in proportion to
    their heights. Length triples no PCC state can realize fall back
    to the least-squares state with a warning.
    """
    lengths = np.asarray(lengths, float)
    if lengths.shape != (len(robot.modules), 3):
        raise ValueError(
            f"expected cable lengths of shape {(len(robot.modules), 3)}, got {lengths.shape}"
        )
    if np.any(lengths <= 0):
        raise ValueError("cable lengths must all be positive")

    states: list[SegmentState] = []
    residuals: list[float] = []
    warnings: list[str] = []
    for m, module in enumerate(robot.modules):
        A = np.array([[1.0, -math.cos(p), -math.sin(p)] for p in module.tendon_phases])
        try:
            x = np.linalg.solve(A, lengths[m])
        except np.linalg.LinAlgError:
            x, *_ = np.linalg.lstsq(A, lengths[m], rcond=None)
        s, a, b = x
        resid = float(np.linalg.norm(A @ x - lengths[m]))
        residuals.append(resid)
        if resid > 1e-9 * max(s, 1e-12):
            warnings.append(f"module {m}: inconsistent lengths, residual {resid:g}")
        theta = math.hypot(a, b) / module.tendon_radius
        phi = math.atan2(b, a) if theta > 0 else 0.0
        h_mod = module.arc_height
        if s <= 0:
            warnings.append(f"module {m}: estimated arc length {s:g} <= 0")
        for seg in module.segments:
            frac = seg.H / h_mod
            states.append(
                SegmentState(delta_l=(s - h_mod) * frac, theta=theta * frac, phi=phi)
            )
    return CableEstimate(
        config=PccConfig(segments=tuple(states)),
        residuals=tuple(residuals),
        warnings=tuple(warnings),
    )


def segment_limit_boxes(robot: RobotSpec) -> list[tuple[float, PlateSpec]]:
    """Per-segment (delta_l_max, plate) pairs defining the sampling box."""
    return [
        (max_compression(spec, plate), plate)
        for spec, plate in zip(robot.segment_specs(), robot.segment_plates())
    ]


def workspace_sample(robot: RobotSpec, n_samples: int) -> np.ndarray:
    """Reachable tip positions from low-discrepancy sampling of the limits.

    Deterministic: an unscrambled Halton sequence fills the per-segment
    (delta_l, theta, phi) box (plus the base angle when enabled); its
    first point is the straight pose. theta is drawn inside the limit
    set by the compression margin remaining after delta_l.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    boxes = segment_limit_boxes(robot)
    dims = 3 * robot.n_segments + (1 if robot.base_rotation else 0)
    sampler = qmc.Halton(d=dims, scramble=False)
    unit = sampler.random(n_samples)

    points = np.empty((n_samples, 3))
    for row, u in enumerate(unit):
        states = []
        for i, (dl_max, plate) in enumerate(boxes):
            u_dl, u_th, u_phi = u[3 * i : 3 * i + 3]
            delta_l = -u_dl * dl_max
            margin = dl_max - abs(delta_l)
            theta = u_th * max_bending(plate, margin)
            phi = -math.pi + 2 * math.pi * u_phi
            states.append(SegmentState(delta_l=delta_l, theta=theta, phi=phi))
        base = 2 * math.pi * u[-1] if robot.base_rotation else 0.0
        config = PccConfig(segments=tuple(states), base_angle=base)
        points[row] = forward_kinematics(robot, config).tip_position
    return points


def total_arc_length(robot: RobotSpec) -> float:
    """Upper bound on reach: straight-pose length, arcs plus plate offsets."""
    return sum(
        seg.H + plate.rigid_offset()
        for seg, plate in zip(robot.segment_specs(), robot.segment_plates())
    )


@dataclass(frozen=True)
class PayloadResult:
    """First-order compliance response to a tip force."""

    config: PccConfig  # displaced configuration
    tip_displacement: np.ndarray  # linearized tip motion [m]


def _config_from_vectors(config: PccConfig, q: np.ndarray) -> PccConfig:
    """Rebuild a config from the flat (delta_l, vx, vy) per-segment vector."""
    states = []
    for i in range(len(config.segments)):
        dl, vx, vy = q[3 * i : 3 * i + 3]
        theta = math.hypot(vx, vy)
        phi = math.atan2(vy, vx) if theta > 0 else 0.0
        states.append(SegmentState(delta_l=dl, theta=theta, phi=phi))
    return PccConfig(segments=tuple(states), base_angle=config.base_angle)


def _config_vector(config: PccConfig) -> np.ndarray:
    q = np.empty(3 * len(config.segments))
    for i, st in enumerate(config.segments):
        q[3 * i : 3 * i + 3] = (
            st.delta_l,
            st.theta * math.cos(st.phi),
            st.theta * math.sin(st.phi),
        )
    return q


def payload_deflection(
    robot: RobotSpec,
    config: PccConfig,
    tip_force: np.ndarray,
    material: Material,
) -> PayloadResult:
    """Quasi-static tip-load response via per-segment compliance.

    Each segment bends by (transverse moment about its base)/k_bend in
    the plane of that moment and stretches by (axial force)/k_ax; the
    tip displacement is the configuration Jacobian applied to those
    increments, so it is exactly linear in the applied force.
    """
    tip_force = np.asarray(tip_force, float)
    fk0 = forward_kinematics(robot, config)
    p_tip = fk0.tip_position

    q0 = _config_vector(config)
    dq = np.zeros_like(q0)
    for i, (spec, base) in enumerate(zip(robot.segment_specs(), fk0.segment_bases)):
        rot = base[:3, :3]
        z_axis = rot[:, 2]
        p_base = base[:3, 3]
        k_ax = axial_stiffness(spec, material.E)
        k_bend = bending_stiffness(spec, material.E)

        moment = np.cross(p_tip - p_base, tip_force)
        m_perp = moment - np.dot(moment, z_axis) * z_axis
        mx, my = np.dot(m_perp, rot[:, 0]), np.dot(m_perp, rot[:, 1])
        m_mag = math.hypot(mx, my)
        if m_mag > 0:
            d_theta = m_mag / k_bend
            phi_m = math.atan2(-mx, my)  # bend-plane azimuth of the moment axis
            dq[3 * i + 1] += d_theta * math.cos(phi_m)
            dq[3 * i + 2] += d_theta * math.sin(phi_m)
        dq[3 * i] += np.dot(tip_force, z_axis) / k_ax

    # tip Jacobian at the unloaded configuration, central differences
    step = 1e-7
    jac = np.zeros((3, len(q0)))
    for j in range(len(q0)):
        qp, qm = q0.copy(), q0.copy()
        qp[j] += step
        qm[j] -= step
        tp = forward_kinematics(robot, _config_from_vectors(config, qp)).tip_position
        tm = forward_kinematics(robot, _config_from_vectors(config, qm)).tip_position
        jac[:, j] = (tp - tm) / (2 * step)

    return PayloadResult(
        config=_config_from_vectors(config, q0 + dq),
        tip_displacement=jac @ dq,
    )
