"""Grid layout, ghost fill, and solution-file tests."""

import numpy as np
import pytest

import hitdns as hd
from hitdns.grid import element_offset, fill_ghosts_array

from conftest import smooth_state


def test_spec_geometry():
    spec = hd.GridSpec(n=(8, 8, 8))
    assert spec.spacing == (2.0 * np.pi / 8,) * 3
    assert spec.shape == (14, 14, 14)
    assert spec.interior_shape == (8, 8, 8)
    assert spec.total_points == 14**3
    assert spec.interior_points == 512
    assert spec.cell_volume() == pytest.approx((2.0 * np.pi / 8) ** 3, rel=1e-15)


def test_spec_validation():
    with pytest.raises(ValueError):
        hd.GridSpec(n=(8, 8, 8), ghost_width=2)
    with pytest.raises(ValueError):
        hd.GridSpec(n=(0, 8, 8))
    with pytest.raises(ValueError):
        hd.GridSpec(n=(8, 8, 8), length=(0.0, 1.0, 1.0))


def test_linear_index_corners():
    spec = hd.GridSpec(n=(8, 8, 8))
    # hand-evaluated: (i+g) + (j+g)*gx + (k+g)*gx*gy with gx = gy = 14
    assert hd.linear_index(spec, 0, 0, 0) == 633
    assert hd.linear_index(spec, 7, 7, 7) == 2110
    assert hd.linear_index(spec, -3, -3, -3) == 0
    assert hd.linear_index(spec, 10, 10, 10) == 14**3 - 1


def test_linear_index_bounds():
    spec = hd.GridSpec(n=(8, 8, 8))
    with pytest.raises(IndexError):
        hd.linear_index(spec, 11, 0, 0)
    with pytest.raises(IndexError):
        hd.linear_index(spec, 0, -4, 0)


def test_linear_index_matches_views():
    spec = hd.GridSpec(n=(4, 4, 4))
    fs = hd.FieldSet.zeros(spec)
    rng = np.random.default_rng(0)
    fs.data[:] = rng.random(fs.data.shape)
    comp = fs.component_view()
    for (i, j, k) in [(0, 0, 0), (3, 2, 1), (-3, -1, 2), (6, 0, -2)]:
        p = hd.linear_index(spec, i, j, k)
        g = spec.ghost_width
        assert comp[2, k + g, j + g, i + g] == fs.data[2 * spec.total_points + p]


def test_element_offsets_interleave_permutation():
    # two points, values (p, v) -> 10p + v
    values = {(p, v): 10 * p + v for p in range(2) for v in range(5)}
    aos = [0.0] * 10
    soa = [0.0] * 10
    for (p, v), val in values.items():
        aos[element_offset(hd.Layout.INTERLEAVED, p, v, 2)] = val
        soa[element_offset(hd.Layout.COMPONENT_CONTIGUOUS, p, v, 2)] = val
    assert aos == [0, 1, 2, 3, 4, 10, 11, 12, 13, 14]
    assert soa == [0, 10, 1, 11, 2, 12, 3, 13, 4, 14]


def test_layout_roundtrip_bitwise():
    fs = smooth_state(6)
    inter = hd.convert_layout(fs, hd.Layout.INTERLEAVED)
    back = hd.convert_layout(inter, hd.Layout.COMPONENT_CONTIGUOUS)
    assert np.array_equal(back.data, fs.data)
    # same logical content through both native views
    assert np.array_equal(
        inter.point_view(), np.moveaxis(fs.component_view(), 0, -1)
    )


def test_ghost_fill_periodic_images():
    n = (6, 5, 4)  # anisotropic extents catch axis mixups
    spec = hd.GridSpec(n=n, length=(1.0, 2.0, 3.0))
    fs = hd.FieldSet.zeros(spec)
    rng = np.random.default_rng(3)
    it = fs.interior()
    it[:] = rng.random(it.shape)
    hd.fill_ghosts_periodic(fs)
    comp = fs.component_view()
    g = spec.ghost_width
    nz, ny, nx = spec.interior_shape
    # valid ghosted ranges: i in [-3, nx+3), j in [-3, ny+3), k in [-3, nz+3)
    for v in range(5):
        full = comp[v]
        for (k, j, i) in [(-3, 2, 1), (5, -1, 3), (2, 6, -2), (-1, -2, -3), (6, 7, 8)]:
            expect = it[v, k % nz, j % ny, i % nx]
            assert full[k + g, j + g, i + g] == expect


def test_ghost_fill_idempotent():
    fs = smooth_state(6)
    once = fs.copy()
    hd.fill_ghosts_periodic(fs)
    assert np.array_equal(fs.data, once.data)


def test_ghost_fill_interleaved_layout():
    fs = smooth_state(5)
    inter = hd.convert_layout(fs, hd.Layout.INTERLEAVED)
    inter.point_view()[: fs.spec.ghost_width] = 0.0  # damage some ghosts
    hd.fill_ghosts_periodic(inter)
    assert np.array_equal(
        inter.point_view(), np.moveaxis(fs.component_view(), 0, -1)
    )


def test_fill_ghosts_array_matches_fieldset():
    fs = smooth_state(5)
    arr = np.array(fs.component_view()[3])
    arr[:3] = -1.0
    arr[:, :3] = -1.0
    fill_ghosts_array(arr, fs.spec.n, fs.spec.ghost_width)
    assert np.array_equal(arr, fs.component_view()[3])


@pytest.mark.parametrize("layout", [hd.Layout.COMPONENT_CONTIGUOUS, hd.Layout.INTERLEAVED])
def test_solution_roundtrip(tmp_path, layout):
    src = smooth_state(6)
    fs = hd.convert_layout(src, layout)
    path = tmp_path / "state.bin"
    hd.write_solution(path, fs, 1.25)
    back, t = hd.read_solution(path)
    assert t == 1.25
    assert back.layout == layout
    assert back.spec.n == fs.spec.n
    cc = hd.convert_layout(back, hd.Layout.COMPONENT_CONTIGUOUS)
    assert np.array_equal(cc.interior(), src.interior())
    # ghosts are not stored; they read back as zeros
    ghost_mask = np.ones(back.spec.shape, dtype=bool)
    ghost_mask[back.spec.interior()] = False
    assert np.all(cc.component_view()[:, ghost_mask] == 0.0)


def test_solution_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    fs = smooth_state(4)
    hd.write_solution(path, fs, 0.0)
    raw = bytearray(path.read_bytes())
    raw[:8] = b"NOTMAGIC"
    path.write_bytes(bytes(raw))
    with pytest.raises(hd.SolutionFormatError):
        hd.read_solution(path)


def test_solution_truncated(tmp_path):
    path = tmp_path / "short.bin"
    fs = smooth_state(4)
    hd.write_solution(path, fs, 0.0)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 16])
    with pytest.raises(hd.SolutionFormatError):
        hd.read_solution(path)


def test_solution_unknown_layout_tag(tmp_path):
    path = tmp_path / "tag.bin"
    fs = smooth_state(4)
    hd.write_solution(path, fs, 0.0)
    raw = bytearray(path.read_bytes())
    # header fields: magic(8), n(24), length(24), time(8), layout tag(8)
    import struct

    struct.pack_into("<Q", raw, 8 + 24 + 24 + 8, 7)
    path.write_bytes(bytes(raw))
    with pytest.raises(hd.SolutionFormatError):
        hd.read_solution(path)
