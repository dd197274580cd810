"""Watertight printable solids for helicoid segments.

Every feature of the simplified segment solid (the N_h helical struts
and the two annular end rings) occupies the same radial band
r in [r_c - w/2, r_c + w/2], so the whole part is a 2D region in the
unrolled (azimuth, height) plane extruded radially. The region is the
shapely union of N_h slanted strut bands (vertical extent t/cos of the
climb angle, so the perpendicular thickness is t) and two horizontal
ring bands of height t, clipped to one azimuthal period and the
segment height.

The region is triangulated into azimuthal strips whose cut lines
include every region vertex plus a uniform grid, stitched without
T-junctions, then mapped to the inner and outer cylinder faces; the
region boundary becomes radial side walls. The seam at azimuth 0 is
welded. This yields a closed, consistently wound 2-manifold by
construction, with no boolean mesh operations.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon, box
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from .errors import GeometryInfeasibleError, MeshError
from .geometry import HelicoidSpec, derive_geometry

MIN_SEGMENTS_PER_TURN = 8
_TWO_PI = 2 * math.pi
_EPS = 1e-12


@dataclass(frozen=True)
class TriMesh:
    """Triangle soup with shared vertices and outward winding."""

    vertices: np.ndarray  # (n, 3) float64 [m]
    triangles: np.ndarray  # (m, 3) int vertex indices

    def directed_edges(self):
        tri = self.triangles
        return np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])

    def is_watertight(self) -> bool:
        """Closed 2-manifold with consistent winding: every undirected
        edge appears exactly once in each direction."""
        seen: dict[tuple[int, int], int] = {}
        for a, b in self.directed_edges():
            key = (int(a), int(b))
            if key in seen:
                return False
            seen[key] = 1
        return all((b, a) in seen for a, b in seen)

    def euler_characteristic(self) -> int:
        n_edges = len(self.directed_edges()) // 2
        used = np.unique(self.triangles)
        return len(used) - n_edges + len(self.triangles)

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2

    def n_components(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for t0, t1, t2 in self.triangles:
            for a, b in ((t0, t1), (t1, t2)):
                ra, rb = find(int(a)), find(int(b))
                if ra != rb:
                    parent[ra] = rb
        return len({find(int(v)) for v in np.unique(self.triangles)})

    def signed_volume(self) -> float:
        v = self.vertices
        t = self.triangles
        return float(np.einsum("ij,ij->i", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]])).sum() / 6)

    def check(self) -> None:
        if len(self.triangles) == 0:
            raise MeshError("mesh has no triangles")
        if not self.is_watertight():
            raise MeshError("mesh is not a closed, consistently wound 2-manifold")
        if self.signed_volume() <= 0:
            raise MeshError("mesh winding is inverted (signed volume <= 0)")


def swept_volume_estimate(spec: HelicoidSpec) -> float:
    """Analytic volume estimate: strut sweeps plus end rings [m^3].

    N_h helical sweeps of the w x t section along the centroid-radius
    arc, plus two annular rings of radial width w and height t. Overlap
    where struts enter the rings is not subtracted, so the true solid
    is a few percent smaller.
    """
    geo = derive_geometry(spec)
    arc = math.sqrt(spec.H**2 + (math.pi * geo.r_c) ** 2)
    ring_area = math.pi * ((geo.r_c + spec.w / 2) ** 2 - (geo.r_c - spec.w / 2) ** 2)
    return spec.n_h * arc * spec.w * spec.t + 2 * ring_area * spec.t


# --------------------------------------------------------------------------
# 2D region construction and strip triangulation


def _strut_region(spec: HelicoidSpec) -> tuple[Polygon, float]:
    """Union region in the (phi, z) plane, clipped to one period."""
    geo = derive_geometry(spec)
    slope = spec.H / (math.pi * geo.r_c)  # dz per unit arc at the centroid radius
    tau = spec.t * math.sqrt(1 + slope**2)  # vertical band extent for thickness t

    gap = geo.h - spec.t
    if spec.t >= gap:
        raise GeometryInfeasibleError(
            f"struts self-intersect: t = {spec.t:g} >= gap h - t = {gap:g}"
        )
    if tau >= 2 * geo.h:
        raise GeometryInfeasibleError(
            f"strut bands fuse: vertical extent {tau:g} >= helix spacing {2 * geo.h:g}"
        )
    if spec.H <= 2 * spec.t:
        raise GeometryInfeasibleError(f"end rings overlap: H = {spec.H:g} <= 2t")

    window = box(0.0, 0.0, _TWO_PI, spec.H)
    pieces = [
        box(0.0, 0.0, _TWO_PI, spec.t),
        box(0.0, spec.H - spec.t, _TWO_PI, spec.H),
    ]
    m = spec.H / math.pi  # dz per radian along a strut centerline
    for k in range(spec.n_h):
        phi0 = _TWO_PI * k / spec.n_h
        for shift in (-_TWO_PI, 0.0, _TWO_PI):
            a = phi0 + shift
            band = Polygon(
                [
                    (a, -tau / 2),
                    (a + math.pi, spec.H - tau / 2),
                    (a + math.pi, spec.H + tau / 2),
                    (a, tau / 2),
                ]
            )
            clipped = band.intersection(window)
            if not clipped.is_empty and clipped.area > 0:
                pieces.append(clipped)
    region = unary_union(pieces)
    if region.geom_type != "Polygon":
        raise MeshError(f"segment region is not connected ({region.geom_type})")
    return orient(region, sign=1.0), tau


class _Edge:
    """One boundary segment of the region, with its traversal direction."""

    __slots__ = ("x0", "z0", "x1", "z1", "index")

    def __init__(self, p, q, index):
        self.x0, self.z0 = p
        self.x1, self.z1 = q
        self.index = index

    @property
    def xmin(self):
        return min(self.x0, self.x1)

    @property
    def xmax(self):
        return max(self.x0, self.x1)

    def z_at(self, x: float) -> float:
        if x == self.x0:
            return self.z0
        if x == self.x1:
            return self.z1
        return self.z0 + (self.z1 - self.z0) * (x - self.x0) / (self.x1 - self.x0)


def _boundary_edges(region: Polygon) -> tuple[list[_Edge], list[_Edge]]:
    """Split the oriented boundary into slanted/horizontal and seam edges."""
    edges: list[_Edge] = []
    seam: list[_Edge] = []
    rings = [region.exterior, *region.interiors]
    idx = 0
    for ring in rings:
        coords = list(ring.coords)
        for p, q in zip(coords[:-1], coords[1:]):
            if p == q:
                continue
            e = _Edge(p, q, idx)
            idx += 1
            if abs(e.x1 - e.x0) <= 1e-14:
                seam.append(e)
            else:
                edges.append(e)
    return edges, seam


def _events(edges: list[_Edge], segments_per_turn: int) -> np.ndarray:
    xs = {0.0, _TWO_PI}
    for j in range(1, segments_per_turn):
        xs.add(_TWO_PI * j / segments_per_turn)
    for e in edges:
        xs.add(e.x0)
        xs.add(e.x1)
    events = sorted(xs)
    merged = [events[0]]
    for x in events[1:]:
        if x - merged[-1] > _EPS:
            merged.append(x)
    return np.array(merged)


def _triangulate_region(region: Polygon, segments_per_turn: int):
    """Strip triangulation of the region plus subdivided boundary edges.

    Returns (points2d, face_triangles, wall_subedges) where triangles
    index into points2d and wall subedges are (i, j) point-index pairs
    traversed with the region interior on their left.
    """
    edges, _ = _boundary_edges(region)
    events = _events(edges, segments_per_turn)
    ev_index = {x: i for i, x in enumerate(events)}

    # z of every edge at every event it spans, evaluated exactly once
    zcache: dict[tuple[int, int], float] = {}
    spans: dict[int, list[int]] = {}
    for e in edges:
        i0 = ev_index[e.xmin]
        i1 = ev_index[e.xmax]
        spans[e.index] = [i0, i1]
        for i in range(i0, i1 + 1):
            zcache[(e.index, i)] = e.z_at(events[i])

    # canonical sorted z set per event line (all edge crossings and vertices)
    side_z: dict[int, list[float]] = {i: [] for i in range(len(events))}
    for (eidx, i), z in zcache.items():
        side_z[i].append(z)
    for i in side_z:
        side_z[i] = sorted(set(side_z[i]))

    points: dict[tuple[float, float], int] = {}
    coords: list[tuple[float, float]] = []

    def pid(x: float, z: float) -> int:
        key = (x, z)
        if key not in points:
            points[key] = len(coords)
            coords.append(key)
        return points[key]

    triangles: list[tuple[int, int, int]] = []

    def emit(p, q, r):
        area2 = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if area2 > 0:
            triangles.append((pid(*p), pid(*q), pid(*r)))

    for si in range(len(events) - 1):
        xa, xb = events[si], events[si + 1]
        active = [e for e in edges if spans[e.index][0] <= si and spans[e.index][1] >= si + 1]
        if not active:
            continue
        za = [zcache[(e.index, si)] for e in active]
        zb = [zcache[(e.index, si + 1)] for e in active]
        order = sorted(range(len(active)), key=lambda k: (za[k] + zb[k], za[k]))
        if len(order) % 2:
            raise MeshError("odd number of boundary crossings in a strip")
        for lo_k, hi_k in zip(order[0::2], order[1::2]):
            zal, zah = za[lo_k], za[hi_k]
            zbl, zbh = zb[lo_k], zb[hi_k]
            left = [(xa, z) for z in side_z[si] if zal <= z <= zah]
            right = [(xb, z) for z in side_z[si + 1] if zbl <= z <= zbh]
            # stitch the two vertical point chains bottom-up
            i = j = 0
            while i < len(left) - 1 or j < len(right) - 1:
                if j == len(right) - 1 or (
                    i < len(left) - 1 and left[i + 1][1] - zal <= right[j + 1][1] - zbl
                ):
                    emit(left[i], right[j], left[i + 1])
                    i += 1
                else:
                    emit(left[i], right[j], right[j + 1])
                    j += 1

    walls: list[tuple[int, int]] = []
    for e in edges:
        i0, i1 = spans[e.index]
        xs = [events[i] for i in range(i0, i1 + 1)]
        pts = [(x, zcache[(e.index, ev_index[x])]) for x in xs]
        if e.x0 > e.x1:
            pts.reverse()
        for p, q in zip(pts[:-1], pts[1:]):
            walls.append((pid(*p), pid(*q)))

    return coords, triangles, walls


# --------------------------------------------------------------------------
# extrusion to 3D


def helicoid_mesh(
    spec: HelicoidSpec, rings: int = 1, segments_per_turn: int = 128
) -> TriMesh:
    """Triangulated solid of the segment: struts plus end rings.

    `segments_per_turn` sets the azimuthal resolution; `rings` the
    radial subdivision of the side walls. The output is watertight and
    consistently wound at every supported resolution, generated in
    canonical pose (base ring centered at the origin, axis +z).
    """
    if segments_per_turn < MIN_SEGMENTS_PER_TURN:
        raise ValueError(
            f"segments_per_turn must be >= {MIN_SEGMENTS_PER_TURN}, got {segments_per_turn}"
        )
    if rings < 1:
        raise ValueError(f"rings must be >= 1, got {rings}")
    spec.check()
    geo = derive_geometry(spec)
    region, _ = _strut_region(spec)
    coords2d, faces2d, walls2d = _triangulate_region(region, segments_per_turn)

    r_in = geo.r_c - spec.w / 2
    r_out = geo.r_c + spec.w / 2
    radii = np.linspace(r_in, r_out, rings + 1)

    # 2D point -> canonical (phi, z); the seam phi = 2*pi wraps to 0
    def canonical(p2d):
        x, z = p2d
        if x <= _EPS or abs(x - _TWO_PI) <= _EPS:
            return (0.0, round(z, 10))
        return (x, z)

    vertex_ids: dict[tuple, int] = {}
    verts: list[tuple[float, float, float]] = []

    def vid(p2d, layer: int) -> int:
        key = (canonical(p2d), layer)
        if key not in vertex_ids:
            phi, z = key[0]
            r = radii[layer]
            vertex_ids[key] = len(verts)
            verts.append((r * math.cos(phi), r * math.sin(phi), z))
        return vertex_ids[key]

    tris: list[tuple[int, int, int]] = []

    inner, outer = 0, rings
    for a, b, c in faces2d:
        pa, pb, pc = coords2d[a], coords2d[b], coords2d[c]
        tris.append((vid(pa, outer), vid(pb, outer), vid(pc, outer)))
        tris.append((vid(pa, inner), vid(pc, inner), vid(pb, inner)))

    for a, b in walls2d:
        pa, pb = coords2d[a], coords2d[b]
        (xa, za), (xb, zb) = pa, pb
        mid_phi = (xa + xb) / 2
        # interior is left of a->b, so the outward wall normal is to the right
        n2d = (zb - za, -(xb - xa))
        expected = np.array(
            [-n2d[0] * math.sin(mid_phi), n2d[0] * math.cos(mid_phi), n2d[1]]
        )
        for layer in range(rings):
            quad = [
                vid(pa, layer),
                vid(pb, layer),
                vid(pb, layer + 1),
                vid(pa, layer + 1),
            ]
            v = np.array([verts[i] for i in quad])
            normal = np.cross(v[1] - v[0], v[2] - v[0])
            if np.dot(normal, expected) >= 0:
                tris.append((quad[0], quad[1], quad[2]))
                tris.append((quad[0], quad[2], quad[3]))
            else:
                tris.append((quad[0], quad[2], quad[1]))
                tris.append((quad[0], quad[3], quad[2]))

    mesh = TriMesh(vertices=np.array(verts), triangles=np.array(tris, dtype=np.int64))
    mesh.check()
    return mesh


def mesh_metadata(spec: HelicoidSpec, mesh: TriMesh) -> dict:
    """Sidecar description of a generated mesh (JSON-ready)."""
    return {
        "spec": {"H": spec.H, "D": spec.D, "w": spec.w, "t": spec.t, "N_h": spec.n_h},
        "topology_note": (
            "simplified solid: independent half-turn helical struts joined "
            "only through the end rings; inter-strut interfaces of the "
            "as-molded part are not represented"
        ),
        "n_vertices": int(len(mesh.vertices)),
        "n_triangles": int(len(mesh.triangles)),
        "volume_m3": mesh.signed_volume(),
        "volume_estimate_m3": swept_volume_estimate(spec),
        "genus": mesh.genus(),
    }


# --------------------------------------------------------------------------
# STL I/O

_STL_HEADER = b"helicoid segment solid (binary STL)"


def write_stl(mesh: TriMesh, path, ascii_format: bool = False) -> None:
    """Write the mesh as STL; refuses meshes violating the invariants.

    Binary format: 80-byte header, little-endian uint32 triangle count,
    then 50 bytes per facet with the normal recomputed from winding.
    Output bytes depend only on the mesh, never on time or environment.
    """
    mesh.check()
    v = mesh.vertices
    if ascii_format:
        lines = ["solid helicoid"]
        for a, b, c in mesh.triangles:
            n = np.cross(v[b] - v[a], v[c] - v[a])
            norm = np.linalg.norm(n)
            n = n / norm if norm > 0 else n
            lines.append(f"  facet normal {n[0]:.9e} {n[1]:.9e} {n[2]:.9e}")
            lines.append("    outer loop")
            for p in (v[a], v[b], v[c]):
                lines.append(f"      vertex {p[0]:.9e} {p[1]:.9e} {p[2]:.9e}")
            lines.append("    endloop")
            lines.append("  endfacet")
        lines.append("endsolid helicoid")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
        return

    with open(path, "wb") as fh:
        fh.write(_STL_HEADER.ljust(80, b"\0"))
        fh.write(struct.pack("<I", len(mesh.triangles)))
        for a, b, c in mesh.triangles:
            n = np.cross(v[b] - v[a], v[c] - v[a])
            norm = np.linalg.norm(n)
            if norm > 0:
                n = n / norm
            fh.write(
                struct.pack(
                    "<12fH",
                    *np.asarray(n, np.float32),
                    *np.asarray(v[a], np.float32),
                    *np.asarray(v[b], np.float32),
                    *np.asarray(v[c], np.float32),
                    0,
                )
            )


def read_stl(path) -> TriMesh:
    """Read a binary STL written by write_stl (vertices re-welded exactly)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 84:
        raise MeshError("file too short for binary STL")
    (count,) = struct.unpack_from("<I", data, 80)
    if len(data) != 84 + 50 * count:
        raise MeshError("binary STL size does not match its triangle count")
    verts: dict[tuple, int] = {}
    coords: list[tuple] = []
    tris = []
    for i in range(count):
        vals = struct.unpack_from("<12fH", data, 84 + 50 * i)
        tri = []
        for k in range(3):
            p = tuple(vals[3 + 3 * k : 6 + 3 * k])
            if p not in verts:
                verts[p] = len(coords)
                coords.append(p)
            tri.append(verts[p])
        tris.append(tuple(tri))
    return TriMesh(vertices=np.array(coords, dtype=np.float64), triangles=np.array(tris))
