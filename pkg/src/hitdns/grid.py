"""Structured grid container: ghosted fields, memory layouts, periodic fill, file I/O.

Conventions used everywhere in this package:

* The domain is a periodic box split into n = (nx, ny, nz) cells per
  dimension; every field carries ghost_width extra layers on each side of
  each dimension.
* Points are ordered lexicographically with x fastest, so a ghosted field
  viewed as a numpy array has shape (nz + 2g, ny + 2g, nx + 2g): axis 0 is
  z and axis 2 is x.  ``AXIS_OF_DIM`` maps a physical dimension (0 = x) to
  the numpy axis of a 3D scalar field.
* A FieldSet stores the 5 conserved variables [rho, rho*u, rho*v, rho*w, e]
  over the ghosted grid in ONE flat float64 buffer of length
  5 * total_points, in one of two layouts:

  - Layout.INTERLEAVED        (tag 0): offset = 5 * point + var
  - Layout.COMPONENT_CONTIGUOUS (tag 1): offset = var * total_points + point

  The solver's hot loops require COMPONENT_CONTIGUOUS and never convert
  layouts inside the time-step loop; ``convert_layout`` exists for I/O and
  benchmarking.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import SolutionFormatError

TWO_PI = 2.0 * math.pi

# numpy axis holding physical dimension d for a (z, y, x) shaped array
AXIS_OF_DIM = (2, 1, 0)

SOLUTION_MAGIC = b"HITDNS01"
NVARS = 5


class Layout(enum.IntEnum):
    """Storage order of the 5-variable field buffer; values are the file tags."""

    INTERLEAVED = 0
    COMPONENT_CONTIGUOUS = 1


@dataclass(frozen=True)
class GridSpec:
    """Geometry of one (sub)domain: cell counts, box lengths, ghost width."""

    n: tuple[int, int, int]
    length: tuple[float, float, float] = (TWO_PI, TWO_PI, TWO_PI)
    ghost_width: int = 3

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "length", tuple(float(v) for v in self.length))
        if len(self.n) != 3 or len(self.length) != 3:
            raise ValueError("n and length must have 3 entries")
        if any(v < 1 for v in self.n):
            raise ValueError(f"cell counts must be positive, got {self.n}")
        if any(v <= 0.0 for v in self.length):
            raise ValueError(f"box lengths must be positive, got {self.length}")
        # stencils reach 3 points past an interface, so thinner halos are invalid
        if self.ghost_width < 3:
            raise ValueError(f"ghost_width must be >= 3, got {self.ghost_width}")

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple(L / n for L, n in zip(self.length, self.n))

    @property
    def ghosted_n(self) -> tuple[int, int, int]:
        g = self.ghost_width
        return tuple(v + 2 * g for v in self.n)

    @property
    def shape(self) -> tuple[int, int, int]:
        """Ghosted numpy array shape, (z, y, x) order."""
        gx, gy, gz = self.ghosted_n
        return (gz, gy, gx)

    @property
    def interior_shape(self) -> tuple[int, int, int]:
        return (self.n[2], self.n[1], self.n[0])

    @property
    def total_points(self) -> int:
        gz, gy, gx = self.shape
        return gx * gy * gz

    @property
    def interior_points(self) -> int:
        return self.n[0] * self.n[1] * self.n[2]

    def interior(self) -> tuple[slice, slice, slice]:
        """Slices selecting the interior of a (z, y, x) ghosted array."""
        g = self.ghost_width
        return (
            slice(g, g + self.n[2]),
            slice(g, g + self.n[1]),
            slice(g, g + self.n[0]),
        )

    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz


def linear_index(spec: GridSpec, i: int, j: int, k: int) -> int:
    """Flat point index of cell (i, j, k); ghost cells use negative coordinates.

    Valid coordinates run from -g to n[d] + g - 1 in each dimension.
    """
    g = spec.ghost_width
    nx, ny, nz = spec.n
    if not (-g <= i < nx + g and -g <= j < ny + g and -g <= k < nz + g):
        raise IndexError(f"point ({i}, {j}, {k}) outside ghosted grid {spec.n} (g={g})")
    sx = nx + 2 * g
    sy = ny + 2 * g
    return (k + g) * sx * sy + (j + g) * sx + (i + g)


def element_offset(layout: Layout, point: int, var: int, total_points: int) -> int:
    """Offset of (point, var) in the flat 5-variable buffer under a layout."""
    if not 0 <= var < NVARS:
        raise IndexError(f"var must be in [0, {NVARS}), got {var}")
    if not 0 <= point < total_points:
        raise IndexError(f"point {point} outside buffer of {total_points} points")
    if layout == Layout.INTERLEAVED:
        return NVARS * point + var
    return var * total_points + point


@dataclass
class FieldSet:
    """The 5 conserved variables over one ghosted grid, in one flat buffer.

    Treat a FieldSet as immutable while it is shared between kernels: every
    kernel reads one FieldSet and writes a different one.  The only in-place
    mutation in the package is the ghost refill, which rewrites derived halo
    copies and never touches interior values.
    """

    spec: GridSpec
    layout: Layout = Layout.COMPONENT_CONTIGUOUS
    data: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        want = NVARS * self.spec.total_points
        if self.data is None:
            self.data = np.zeros(want, dtype=np.float64)
        else:
            self.data = np.ascontiguousarray(self.data, dtype=np.float64)
            if self.data.shape != (want,):
                raise ValueError(f"buffer must be flat with {want} entries, got {self.data.shape}")

    @classmethod
    def zeros(cls, spec: GridSpec, layout: Layout = Layout.COMPONENT_CONTIGUOUS) -> "FieldSet":
        return cls(spec, layout)

    def copy(self) -> "FieldSet":
        return FieldSet(self.spec, self.layout, self.data.copy())

    def like(self) -> "FieldSet":
        """Zero-filled FieldSet with the same geometry and layout."""
        return FieldSet.zeros(self.spec, self.layout)

    # ---- views -----------------------------------------------------------

    def component_view(self) -> np.ndarray:
        """(5, nz+2g, ny+2g, nx+2g) view; requires COMPONENT_CONTIGUOUS."""
        if self.layout != Layout.COMPONENT_CONTIGUOUS:
            raise ValueError("component_view needs COMPONENT_CONTIGUOUS layout; convert_layout first")
        return self.data.reshape((NVARS,) + self.spec.shape)

    def point_view(self) -> np.ndarray:
        """(nz+2g, ny+2g, nx+2g, 5) view; requires INTERLEAVED."""
        if self.layout != Layout.INTERLEAVED:
            raise ValueError("point_view needs INTERLEAVED layout; convert_layout first")
        return self.data.reshape(self.spec.shape + (NVARS,))

    def var(self, v: int) -> np.ndarray:
        """Ghosted 3D view of one conserved variable (COMPONENT_CONTIGUOUS only)."""
        return self.component_view()[v]

    def interior(self) -> np.ndarray:
        """(5, nz, ny, nx) interior view (COMPONENT_CONTIGUOUS only)."""
        sz, sy, sx = self.spec.interior()
        return self.component_view()[:, sz, sy, sx]


def convert_layout(fields: FieldSet, target: Layout) -> FieldSet:
    """Repack the buffer into ``target`` layout; pure value-preserving permutation."""
    if target == fields.layout:
        return fields.copy()
    if fields.layout == Layout.COMPONENT_CONTIGUOUS:
        packed = np.moveaxis(fields.component_view(), 0, -1)
    else:
        packed = np.moveaxis(fields.point_view(), -1, 0)
    return FieldSet(fields.spec, target, np.ascontiguousarray(packed).reshape(-1))


# ---- periodic ghost fill ---------------------------------------------------


def _wrap_axis(arr: np.ndarray, axis: int, n: int, g: int) -> None:
    """Copy periodic images into the ghost slabs along one axis, in place."""
    lo_ghost = [slice(None)] * arr.ndim
    lo_src = [slice(None)] * arr.ndim
    hi_ghost = [slice(None)] * arr.ndim
    hi_src = [slice(None)] * arr.ndim
    lo_ghost[axis] = slice(0, g)
    lo_src[axis] = slice(n, n + g)
    hi_ghost[axis] = slice(n + g, n + 2 * g)
    hi_src[axis] = slice(g, 2 * g)
    arr[tuple(lo_ghost)] = arr[tuple(lo_src)]
    arr[tuple(hi_ghost)] = arr[tuple(hi_src)]


def fill_ghosts_array(arr: np.ndarray, n: tuple[int, int, int], g: int) -> np.ndarray:
    """Periodic ghost fill of one ghosted (z, y, x) scalar array, in place.

    Dimensions are filled x, then y, then z; each pass copies the full extent
    of the other axes, so edge and corner ghosts end up correct.
    """
    for d in range(3):
        _wrap_axis(arr, arr.ndim - 1 - d, n[d], g)
    return arr


def fill_ghosts_periodic(fields: FieldSet) -> FieldSet:
    """Fill all ghost layers of a FieldSet with periodic images, in place.

    Idempotent: filling twice is bitwise identical to filling once.
    Returns the same FieldSet for chaining.
    """
    g = fields.spec.ghost_width
    if fields.layout == Layout.COMPONENT_CONTIGUOUS:
        view = fields.component_view()
        for d in range(3):
            _wrap_axis(view, 1 + AXIS_OF_DIM[d], fields.spec.n[d], g)
    else:
        view = fields.point_view()
        for d in range(3):
            _wrap_axis(view, AXIS_OF_DIM[d], fields.spec.n[d], g)
    return fields


class PeriodicHalo:
    """Ghost synchronization for a monolithic periodic domain.

    Decomposed runs swap in an exchanging implementation with the same two
    methods, which is the only seam between single-domain and multi-rank
    execution.
    """

    def sync_fields(self, fields: FieldSet) -> FieldSet:
        return fill_ghosts_periodic(fields)

    def sync_scalars(self, arrays, n: tuple[int, int, int], g: int) -> None:
        for arr in arrays:
            fill_ghosts_array(arr, n, g)


# ---- solution file I/O ------------------------------------------------------

_HEADER = struct.Struct("<8s3Q3ddQ")


def write_solution(path, fields: FieldSet, time: float) -> None:
    """Write interior data to a little-endian binary solution file.

    Header: magic "HITDNS01", dims (3 x u64), box lengths (3 x f64),
    time (f64), layout tag (u64).  Body: interior points only, 5 conserved
    variables, in the declared layout's order.
    """
    spec = fields.spec
    header = _HEADER.pack(
        SOLUTION_MAGIC,
        spec.n[0], spec.n[1], spec.n[2],
        spec.length[0], spec.length[1], spec.length[2],
        float(time),
        int(fields.layout),
    )
    if fields.layout == Layout.COMPONENT_CONTIGUOUS:
        body = fields.interior()
    else:
        sz, sy, sx = spec.interior()
        body = fields.point_view()[sz, sy, sx, :]
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(body, dtype="<f8").tobytes())


def read_solution(path) -> tuple[FieldSet, float]:
    """Read a solution file back into a FieldSet (ghosts left at zero)."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise SolutionFormatError(f"{path}: truncated header")
        magic, nx, ny, nz, lx, ly, lz, time, tag = _HEADER.unpack(raw)
        if magic != SOLUTION_MAGIC:
            raise SolutionFormatError(f"{path}: bad magic {magic!r}")
        try:
            layout = Layout(tag)
        except ValueError:
            raise SolutionFormatError(f"{path}: unknown layout tag {tag}") from None
        spec = GridSpec((nx, ny, nz), (lx, ly, lz))
        count = NVARS * spec.interior_points
        body = np.frombuffer(fh.read(count * 8), dtype="<f8")
        if body.size != count:
            raise SolutionFormatError(f"{path}: expected {count} values, got {body.size}")
    fields = FieldSet.zeros(spec, layout)
    nzi, nyi, nxi = spec.interior_shape
    if layout == Layout.COMPONENT_CONTIGUOUS:
        fields.interior()[...] = body.reshape(NVARS, nzi, nyi, nxi)
    else:
        sz, sy, sx = spec.interior()
        fields.point_view()[sz, sy, sx, :] = body.reshape(nzi, nyi, nxi, NVARS)
    return fields, time
