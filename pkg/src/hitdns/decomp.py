"""Cartesian domain decomposition with message-passing ghost exchange.

Ranks are worker threads in one process; each owns a ghosted local block and
talks to its six periodic neighbors through typed point-to-point channels
(one queue per receiver/dimension/side). The exchange protocol mirrors the
monolithic periodic fill exactly: dimensions are swept x, then y, then z, and
every message carries the full ghosted extent of the other axes, so edge and
corner ghosts come out identical to the single-domain fill. With one rank per
dimension the exchange degenerates to the local wrap, which makes a
(1,1,1)-decomposed run bitwise equal to the monolithic solver, and any other
layout equal to within roundoff of the flux sums.

Global reductions (CFL step sizing) use a barrier with a deterministic
rank-ordered combine. Per-rank timers split busy time into compute and
communication; `comm_fraction` is comm / (comm + comp).
"""

from __future__ import annotations

import queue
import threading
import time as _time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, HaloProtocolError
from .grid import AXIS_OF_DIM, FieldSet, GridSpec, Layout, _wrap_axis
from .physics import GasModel
from .timeint import TimeParams, advance, make_rhs, max_signal
from .weno import DEFAULT_PARAMS, WenoParams

RECV_TIMEOUT_SECONDS = 60.0


@dataclass(frozen=True)
class RankLayout:
    """One rank's block: grid coordinates, local extents, and global offset."""

    rank: int
    coords: tuple[int, int, int]  # block coordinate per dimension (x, y, z)
    dims: tuple[int, int, int]  # ranks per dimension
    local_n: tuple[int, int, int]
    offset: tuple[int, int, int]  # global interior index of the local origin
    spec: GridSpec  # local ghosted grid

    def neighbor(self, dim: int, side: int) -> int:
        """Rank id of the periodic neighbor one block over (side is -1 or +1)."""
        coords = list(self.coords)
        coords[dim] = (coords[dim] + side) % self.dims[dim]
        return rank_of(tuple(coords), self.dims)


def rank_of(coords: tuple[int, int, int], dims: tuple[int, int, int]) -> int:
    """Rank numbering is x-fastest: rank = cx + dims_x (cy + dims_y cz)."""
    return coords[0] + dims[0] * (coords[1] + dims[1] * coords[2])


def coords_of(rank: int, dims: tuple[int, int, int]) -> tuple[int, int, int]:
    cx = rank % dims[0]
    cy = (rank // dims[0]) % dims[1]
    cz = rank // (dims[0] * dims[1])
    return (cx, cy, cz)


def decompose(spec: GridSpec, dims: tuple[int, int, int]) -> list[RankLayout]:
    """Split a global grid into dims[0] x dims[1] x dims[2] equal blocks."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or any(d < 1 for d in dims):
        raise ConfigError(f"dims must be three positive integers, got {dims}")
    local_n = []
    for d in range(3):
        if spec.n[d] % dims[d] != 0:
            raise ConfigError(
                f"dims[{d}]={dims[d]} does not divide the grid extent {spec.n[d]}"
            )
        ln = spec.n[d] // dims[d]
        if ln < spec.ghost_width:
            raise ConfigError(
                f"local extent {ln} in dimension {d} is thinner than the "
                f"ghost width {spec.ghost_width}"
            )
        local_n.append(ln)
    local_n = tuple(local_n)
    local_length = tuple(spec.length[d] * local_n[d] / spec.n[d] for d in range(3))
    local_spec = GridSpec(n=local_n, length=local_length, ghost_width=spec.ghost_width)

    layouts = []
    nranks = dims[0] * dims[1] * dims[2]
    for rank in range(nranks):
        coords = coords_of(rank, dims)
        offset = tuple(coords[d] * local_n[d] for d in range(3))
        layouts.append(
            RankLayout(
                rank=rank,
                coords=coords,
                dims=dims,
                local_n=local_n,
                offset=offset,
                spec=local_spec,
            )
        )
    return layouts


def default_dims(
    nranks: int, n: tuple[int, int, int], ghost_width: int = 3
) -> tuple[int, int, int]:
    """Pick a legal rank grid for nranks that minimizes exchanged face area.

    Ties prefer splitting x before y before z.
    """
    best = None
    best_key = None
    for dx in range(1, nranks + 1):
        if nranks % dx:
            continue
        rem = nranks // dx
        for dy in range(1, rem + 1):
            if rem % dy:
                continue
            dz = rem // dy
            dims = (dx, dy, dz)
            ok = all(
                n[d] % dims[d] == 0 and n[d] // dims[d] >= ghost_width for d in range(3)
            )
            if not ok:
                continue
            local = [n[d] // dims[d] for d in range(3)]
            surface = sum(
                2 * local[(d + 1) % 3] * local[(d + 2) % 3]
                for d in range(3)
                if dims[d] > 1
            )
            key = (surface, -dx, -dy)
            if best_key is None or key < best_key:
                best, best_key = dims, key
    if best is None:
        raise ConfigError(f"no legal decomposition of {n} into {nranks} ranks")
    return best


# ---- channels ----------------------------------------------------------------


class ChannelMesh:
    """Point-to-point typed channels: one FIFO per (receiver, dimension, side)."""

    def __init__(self, nranks: int):
        self.nranks = nranks
        self._queues = {
            (r, dim, side): queue.SimpleQueue()
            for r in range(nranks)
            for dim in range(3)
            for side in (0, 1)
        }

    def send(self, dst: int, dim: int, side: int, src: int, tag, payload: np.ndarray):
        self._queues[(dst, dim, side)].put((src, tag, payload))

    def recv(self, dst: int, dim: int, side: int, expect_src: int, expect_tag, expect_shape):
        try:
            src, tag, payload = self._queues[(dst, dim, side)].get(
                timeout=RECV_TIMEOUT_SECONDS
            )
        except queue.Empty:
            raise HaloProtocolError(
                f"rank {dst} timed out waiting for dim {dim} side {side} "
                f"from rank {expect_src}"
            ) from None
        if src != expect_src or tag != expect_tag:
            raise HaloProtocolError(
                f"rank {dst} expected (src={expect_src}, tag={expect_tag}) on "
                f"dim {dim} side {side}, got (src={src}, tag={tag})"
            )
        if payload.shape != expect_shape:
            raise HaloProtocolError(
                f"rank {dst} expected slab shape {expect_shape}, got {payload.shape}"
            )
        return payload


class RankHalo:
    """Ghost synchronization for one rank of a decomposed periodic domain.

    Drop-in replacement for PeriodicHalo: same two methods. Time spent
    packing, waiting on, and unpacking messages accumulates in comm_seconds;
    dimensions with a single rank fall back to the local periodic wrap and
    are not billed as communication.
    """

    def __init__(self, mesh: ChannelMesh, layout: RankLayout):
        self.mesh = mesh
        self.layout = layout
        self.comm_seconds = 0.0
        self._sync_count = 0

    def _exchange_axis(self, arr: np.ndarray, axis: int, dim: int, n_d: int, g: int, item: int):
        if self.layout.dims[dim] == 1:
            _wrap_axis(arr, axis, n_d, g)
            return
        t0 = _time.perf_counter()
        me = self.layout.rank
        lo_nb = self.layout.neighbor(dim, -1)
        hi_nb = self.layout.neighbor(dim, +1)
        tag = (self._sync_count, dim, item)

        def along(lo: int, hi: int):
            return tuple(
                slice(lo, hi) if a == axis else slice(None) for a in range(arr.ndim)
            )

        # My first interior planes become the low neighbor's high ghosts, and
        # my last interior planes the high neighbor's low ghosts.
        send_lo = np.ascontiguousarray(arr[along(g, 2 * g)])
        send_hi = np.ascontiguousarray(arr[along(n_d, n_d + g)])
        self.mesh.send(lo_nb, dim, 1, me, tag, send_lo)
        self.mesh.send(hi_nb, dim, 0, me, tag, send_hi)
        arr[along(0, g)] = self.mesh.recv(me, dim, 0, lo_nb, tag, send_hi.shape)
        arr[along(n_d + g, n_d + 2 * g)] = self.mesh.recv(me, dim, 1, hi_nb, tag, send_lo.shape)
        self.comm_seconds += _time.perf_counter() - t0

    def sync_fields(self, fields: FieldSet) -> FieldSet:
        spec = fields.spec
        g = spec.ghost_width
        self._sync_count += 1
        if fields.layout == Layout.COMPONENT_CONTIGUOUS:
            view = fields.component_view()
            for dim in range(3):
                self._exchange_axis(view, 1 + AXIS_OF_DIM[dim], dim, spec.n[dim], g, 0)
        else:
            view = fields.point_view()
            for dim in range(3):
                self._exchange_axis(view, AXIS_OF_DIM[dim], dim, spec.n[dim], g, 0)
        return fields

    def sync_scalars(self, arrays, n: tuple[int, int, int], g: int) -> None:
        self._sync_count += 1
        for dim in range(3):
            for item, arr in enumerate(arrays):
                self._exchange_axis(arr, AXIS_OF_DIM[dim], dim, n[dim], g, item)


# ---- reductions ----------------------------------------------------------------


class ThreadReduce:
    """Barrier-backed all-reduce over rank threads, combined in rank order."""

    def __init__(self, nranks: int, op=max):
        self._slots = [None] * nranks
        self._op = op
        self._result = None
        self._barrier = threading.Barrier(nranks, action=self._combine)

    def _combine(self):
        self._result = self._op(self._slots)

    def all_reduce(self, rank: int, value):
        self._slots[rank] = value
        try:
            self._barrier.wait(timeout=RECV_TIMEOUT_SECONDS)
        except threading.BrokenBarrierError:
            raise HaloProtocolError(f"rank {rank}: reduction barrier broken") from None
        return self._result

    def abort(self):
        self._barrier.abort()


# ---- timing ----------------------------------------------------------------


def comm_fraction(comm_seconds: float, busy_seconds: float) -> float:
    """Share of busy time spent communicating; 0 when nothing ran."""
    if busy_seconds <= 0.0:
        return 0.0
    return comm_seconds / busy_seconds


@dataclass
class TimingReport:
    """Per-rank wall/compute/communication split for one run."""

    rank: int
    dims: tuple[int, int, int]
    steps: int
    wall_seconds: float
    comp_seconds: float
    comm_seconds: float

    @property
    def ratio(self) -> float:
        return comm_fraction(self.comm_seconds, self.comm_seconds + self.comp_seconds)


@dataclass
class ParallelResult:
    fields: FieldSet
    t: float
    reports: list[TimingReport]


def scatter(fields: FieldSet, layouts: list[RankLayout]) -> list[FieldSet]:
    """Copy each rank's interior block out of a global FieldSet."""
    interior = fields.interior()
    locals_ = []
    for lay in layouts:
        ox, oy, oz = lay.offset
        lx, ly, lz = lay.local_n
        local = FieldSet.zeros(lay.spec, fields.layout)
        local.interior()[:] = interior[:, oz : oz + lz, oy : oy + ly, ox : ox + lx]
        locals_.append(local)
    return locals_


def gather(locals_: list[FieldSet], layouts: list[RankLayout], spec: GridSpec) -> FieldSet:
    """Assemble a global FieldSet from per-rank interior blocks."""
    out = FieldSet.zeros(spec, locals_[0].layout)
    interior = out.interior()
    for local, lay in zip(locals_, layouts):
        ox, oy, oz = lay.offset
        lx, ly, lz = lay.local_n
        interior[:, oz : oz + lz, oy : oy + ly, ox : ox + lx] = local.interior()
    return out


def parallel_advance(
    fields: FieldSet,
    gas: GasModel,
    tparams: TimeParams,
    weno_params: WenoParams = DEFAULT_PARAMS,
    delta: float = 0.0,
    dims: tuple[int, int, int] = (1, 1, 1),
    workers_per_rank: int = 1,
) -> ParallelResult:
    """Run the march of `advance` on a decomposed domain and gather the result.

    Step sizing under CFL control uses a global max reduction, so every rank
    takes the identical dt sequence the monolithic run would.
    """
    spec = fields.spec
    layouts = decompose(spec, dims)
    nranks = len(layouts)
    locals_ = scatter(fields, layouts)
    mesh = ChannelMesh(nranks)
    reducer = ThreadReduce(nranks, op=max)

    results: list[ParallelResult | None] = [None] * nranks
    failures: list[BaseException | None] = [None] * nranks

    def run_rank(rank: int):
        lay = layouts[rank]
        halo = RankHalo(mesh, lay)
        local = locals_[rank]

        def dt_provider(fs: FieldSet) -> float:
            local_sig = max_signal(fs, gas, tparams.cfl_mode)
            t0 = _time.perf_counter()
            sig = reducer.all_reduce(rank, local_sig)
            halo.comm_seconds += _time.perf_counter() - t0
            return tparams.cfl / sig

        wall0 = _time.perf_counter()
        try:
            res = advance(
                local,
                gas,
                tparams,
                weno_params,
                delta,
                halo=halo,
                workers=workers_per_rank,
                dt_provider=dt_provider if tparams.cfl is not None else None,
            )
        except BaseException as err:  # noqa: BLE001 - forwarded to the caller
            failures[rank] = err
            reducer.abort()
            return
        wall = _time.perf_counter() - wall0
        busy = sum(rec.wall_seconds for rec in res.records)
        report = TimingReport(
            rank=rank,
            dims=dims,
            steps=res.steps,
            wall_seconds=wall,
            comp_seconds=max(busy - halo.comm_seconds, 0.0),
            comm_seconds=halo.comm_seconds,
        )
        locals_[rank] = res.fields
        results[rank] = ParallelResult(fields=res.fields, t=res.t, reports=[report])

    threads = [
        threading.Thread(target=run_rank, args=(rank,), name=f"rank-{rank}")
        for rank in range(nranks)
    ]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for err in failures:
        if err is not None:
            raise err
    gathered = gather(locals_, layouts, spec)
    t = results[0].t if results[0] is not None else 0.0
    reports = [res.reports[0] for res in results if res is not None]
    return ParallelResult(fields=gathered, t=t, reports=reports)


# ---- strong scaling ----------------------------------------------------------------


@dataclass
class ScaleRow:
    ranks: int
    dims: tuple[int, int, int]
    wall_seconds: float
    comp_seconds: float
    comm_seconds: float

    @property
    def ratio(self) -> float:
        return comm_fraction(self.comm_seconds, self.comm_seconds + self.comp_seconds)


def strong_scaling(
    fields: FieldSet,
    gas: GasModel,
    tparams: TimeParams,
    ranks_list,
    weno_params: WenoParams = DEFAULT_PARAMS,
    delta: float = 0.0,
    dims_for=None,
) -> list[ScaleRow]:
    """Repeat the same run over rank counts, from identical initial fields.

    wall is the slowest rank's wall clock; comp and comm sum over ranks so
    the ratio reflects aggregate time spent exchanging ghosts. A one-step
    warmup run precedes the timed sweep so compilation cost lands outside it.
    """
    warm = TimeParams(
        scheme=tparams.scheme, dt=tparams.dt, cfl=tparams.cfl,
        cfl_mode=tparams.cfl_mode, max_steps=1,
    )
    parallel_advance(fields.copy(), gas, warm, weno_params, delta, (1, 1, 1))
    rows = []
    for nranks in ranks_list:
        dims = dims_for(nranks) if dims_for else default_dims(
            int(nranks), fields.spec.n, fields.spec.ghost_width
        )
        res = parallel_advance(fields.copy(), gas, tparams, weno_params, delta, dims)
        rows.append(
            ScaleRow(
                ranks=int(nranks),
                dims=dims,
                wall_seconds=max(r.wall_seconds for r in res.reports),
                comp_seconds=sum(r.comp_seconds for r in res.reports),
                comm_seconds=sum(r.comm_seconds for r in res.reports),
            )
        )
    return rows


def scaling_report(rows: list[ScaleRow]) -> str:
    """Text table: `ranks dims wall comp comm ratio speedup efficiency`."""
    lines = ["ranks dims wall comp comm ratio speedup efficiency"]
    base = rows[0].wall_seconds if rows else 0.0
    for row in rows:
        speedup = base / row.wall_seconds if row.wall_seconds > 0.0 else 0.0
        efficiency = speedup / row.ranks
        dims = "x".join(str(d) for d in row.dims)
        lines.append(
            f"{row.ranks} {dims} {row.wall_seconds:.6f} {row.comp_seconds:.6f} "
            f"{row.comm_seconds:.6f} {row.ratio:.4f} {speedup:.3f} {efficiency:.3f}"
        )
    return "\n".join(lines) + "\n"
