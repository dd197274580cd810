import numpy as np
import pytest

from helicoid.errors import GeometryInfeasibleError, MeshError
from helicoid.geometry import HelicoidSpec
from helicoid.mesh import (
    TriMesh,
    helicoid_mesh,
    mesh_metadata,
    read_stl,
    swept_volume_estimate,
    write_stl,
)


def unit_tetrahedron() -> TriMesh:
    vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    triangles = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
    return TriMesh(vertices=vertices, triangles=triangles)


class TestTriMesh:
    def test_tetrahedron_invariants(self):
        tet = unit_tetrahedron()
        assert tet.is_watertight()
        assert tet.signed_volume() == pytest.approx(1 / 6)
        assert tet.euler_characteristic() == 2
        assert tet.genus() == 0
        assert tet.n_components() == 1

    def test_open_mesh_rejected(self):
        tet = unit_tetrahedron()
        open_mesh = TriMesh(vertices=tet.vertices, triangles=tet.triangles[:3])
        assert not open_mesh.is_watertight()
        with pytest.raises(MeshError):
            open_mesh.check()

    def test_inverted_mesh_rejected(self):
        tet = unit_tetrahedron()
        flipped = TriMesh(vertices=tet.vertices, triangles=tet.triangles[:, ::-1])
        with pytest.raises(MeshError, match="signed volume"):
            flipped.check()


class TestHelicoidMesh:
    @pytest.mark.parametrize("name", ["small", "large"])
    def test_catalog_specs_sound(self, name, small_spec, large_spec):
        spec = {"small": small_spec, "large": large_spec}[name]
        mesh = helicoid_mesh(spec, segments_per_turn=128)
        assert mesh.is_watertight()
        assert mesh.n_components() == 1
        assert mesh.signed_volume() > 0
        vol = mesh.signed_volume()
        est = swept_volume_estimate(spec)
        assert abs(vol - est) / est < 0.10

    def test_genus_matches_topology(self, small_spec):
        # two rings joined by N_h tubes: handlebody of genus N_h + 1
        for res in (32, 64, 128):
            mesh = helicoid_mesh(small_spec, segments_per_turn=res)
            assert mesh.genus() == small_spec.n_h + 1
            assert mesh.euler_characteristic() == 2 - 2 * (small_spec.n_h + 1)

    def test_single_helix(self):
        spec = HelicoidSpec(H=0.08, D=0.05, w=0.006, t=0.003, n_h=1)
        mesh = helicoid_mesh(spec, segments_per_turn=64)
        assert mesh.is_watertight()
        assert mesh.genus() == 2

    def test_resolution_convergence(self, small_spec):
        v1 = helicoid_mesh(small_spec, segments_per_turn=64).signed_volume()
        v2 = helicoid_mesh(small_spec, segments_per_turn=128).signed_volume()
        assert abs(v2 - v1) / v1 < 0.01

    def test_rings_parameter(self, small_spec):
        # radial subdivision re-triangulates the ruled side walls, so the
        # discrete volume shifts slightly; soundness must be unaffected
        m1 = helicoid_mesh(small_spec, rings=1, segments_per_turn=32)
        m3 = helicoid_mesh(small_spec, rings=3, segments_per_turn=32)
        assert m3.is_watertight()
        assert len(m3.vertices) > len(m1.vertices)
        assert m3.signed_volume() == pytest.approx(m1.signed_volume(), rel=0.02)

    def test_deterministic(self, small_spec):
        m1 = helicoid_mesh(small_spec, segments_per_turn=64)
        m2 = helicoid_mesh(small_spec, segments_per_turn=64)
        assert np.array_equal(m1.vertices, m2.vertices)
        assert np.array_equal(m1.triangles, m2.triangles)

    def test_resolution_floor(self, small_spec):
        with pytest.raises(ValueError, match="segments_per_turn"):
            helicoid_mesh(small_spec, segments_per_turn=4)

    def test_self_intersecting_spec_refused(self):
        # t >= gap (h - t): struts would touch their neighbors
        spec = HelicoidSpec(H=0.09, D=0.06, w=0.008, t=0.016, n_h=3)
        with pytest.raises(GeometryInfeasibleError):
            helicoid_mesh(spec, segments_per_turn=32)

    def test_metadata(self, small_spec):
        import json

        mesh = helicoid_mesh(small_spec, segments_per_turn=32)
        meta = mesh_metadata(small_spec, mesh)
        json.dumps(meta)
        assert meta["n_triangles"] == len(mesh.triangles)
        assert meta["genus"] == small_spec.n_h + 1
        assert meta["spec"]["N_h"] == small_spec.n_h


class TestStlIo:
    def test_tetrahedron_file_size(self, tmp_path):
        path = tmp_path / "tet.stl"
        write_stl(unit_tetrahedron(), path)
        assert path.stat().st_size == 80 + 4 + 4 * 50

    def test_round_trip(self, tmp_path, small_spec):
        mesh = helicoid_mesh(small_spec, segments_per_turn=32)
        path = tmp_path / "seg.stl"
        write_stl(mesh, path)
        back = read_stl(path)
        assert len(back.triangles) == len(mesh.triangles)
        assert back.is_watertight()
        # vertices survive to float32 precision
        orig = {tuple(np.float32(v)) for v in mesh.vertices}
        reread = {tuple(np.float32(v)) for v in back.vertices}
        assert orig == reread

    def test_byte_identical(self, tmp_path, small_spec):
        mesh = helicoid_mesh(small_spec, segments_per_turn=32)
        p1, p2 = tmp_path / "a.stl", tmp_path / "b.stl"
        write_stl(mesh, p1)
        write_stl(mesh, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_mesh_refused(self, tmp_path):
        empty = TriMesh(vertices=np.zeros((0, 3)), triangles=np.zeros((0, 3), dtype=int))
        with pytest.raises(MeshError, match="no triangles"):
            write_stl(empty, tmp_path / "empty.stl")

    def test_ascii_variant(self, tmp_path):
        path = tmp_path / "tet_ascii.stl"
        write_stl(unit_tetrahedron(), path, ascii_format=True)
        text = path.read_text()
        assert text.startswith("solid") and text.rstrip().endswith("endsolid helicoid")
        assert text.count("facet normal") == 4
