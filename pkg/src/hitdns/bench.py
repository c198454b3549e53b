"""Memory-layout and traversal-order microbenchmark of the nonlinear-weight
kernel.

One canonical dataset (seeded, values in [0.5, 1.5) so weights stay well
conditioned) is packed per layout: interleaved keeps the five variables of a
point adjacent, contiguous keeps each variable's points adjacent. Both
traversals write results point-major, so outputs across every layout and
traversal combination are comparable bitwise.

The bandwidth model charges 320 bytes per active point: five variables times
five stencil reads plus three weight writes, eight bytes each. Stated
expectations about which ordering should win are soft: violations are
reported as warnings, never as failures, since they depend on cache sizes
and the compiler's scheduling.
"""

from __future__ import annotations

import statistics
import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .grid import NVARS, Layout
from .weno import DEFAULT_PARAMS, WenoParams

X_PAD = 2  # stencil reach of the weight kernel along x
BYTES_PER_POINT = NVARS * (5 + 3) * 8
DEFAULT_SIZES = (16, 32, 48, 64)
DEFAULT_TILE = (32, 8)
TRAVERSALS = ("lex", "tiled")
BENCH_SEED = 20170907


def _shape3(n) -> tuple[int, int, int]:
    if np.isscalar(n):
        return (int(n),) * 3
    nx, ny, nz = (int(v) for v in n)
    return (nx, ny, nz)


def make_bench_values(shape, seed: int = BENCH_SEED) -> np.ndarray:
    """Canonical per-point values, shape (padded points, NVARS)."""
    nx, ny, nz = _shape3(shape)
    npts = (nx + 2 * X_PAD) * ny * nz
    rng = np.random.default_rng(seed)
    return 0.5 + rng.random((npts, NVARS))


def pack_values(values: np.ndarray, layout: Layout) -> np.ndarray:
    """Pack canonical (point, var) values into one flat buffer per layout."""
    if layout == Layout.INTERLEAVED:
        return np.ascontiguousarray(values).reshape(-1)
    return np.ascontiguousarray(values.T).reshape(-1)


@dataclass
class BenchRecord:
    """One benchmarked configuration with its timing statistics."""

    shape: tuple[int, int, int]
    layout: Layout
    traversal: str
    times: list[float] = field(default_factory=list)
    wasted_lanes: int = 0

    @property
    def active_points(self) -> int:
        return self.shape[0] * self.shape[1] * self.shape[2]

    @property
    def median_seconds(self) -> float:
        return statistics.median(self.times)

    @property
    def min_seconds(self) -> float:
        return min(self.times)

    @property
    def cv(self) -> float:
        mean = statistics.fmean(self.times)
        return statistics.pstdev(self.times) / mean if mean > 0.0 else 0.0

    @property
    def bandwidth_gbs(self) -> float:
        return self.active_points * BYTES_PER_POINT / self.median_seconds / 1e9

    @property
    def wasted_fraction(self) -> float:
        visited = self.active_points + self.wasted_lanes
        return self.wasted_lanes / visited if visited else 0.0

    @property
    def size_label(self) -> str:
        nx, ny, nz = self.shape
        return str(nx) if nx == ny == nz else f"{nx}x{ny}x{nz}"


def run_case(
    shape,
    layout: Layout,
    traversal: str = "lex",
    repeats: int = 5,
    tile: tuple[int, int] = DEFAULT_TILE,
    params: WenoParams = DEFAULT_PARAMS,
    seed: int = BENCH_SEED,
) -> tuple[BenchRecord, np.ndarray]:
    """Time one (shape, layout, traversal) case; returns the record and the
    point-major weight output for cross-configuration equality checks."""
    if traversal not in TRAVERSALS:
        raise ValueError(f"traversal must be one of {TRAVERSALS}, got {traversal!r}")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    nx, ny, nz = _shape3(shape)
    data = pack_values(make_bench_values((nx, ny, nz), seed), layout)
    npts = (nx + 2 * X_PAD) * ny * nz
    out = np.zeros(3 * NVARS * npts)
    flag = int(layout)
    record = BenchRecord(shape=(nx, ny, nz), layout=layout, traversal=traversal)

    def run_once() -> int:
        if traversal == "lex":
            return kernels.bench_weights_lex(
                data, flag, nx, ny, nz, X_PAD, params.epsilon, params.power, out
            )
        return kernels.bench_weights_tiled(
            data, flag, nx, ny, nz, X_PAD, tile[0], tile[1],
            params.epsilon, params.power, out,
        )

    wasted = run_once()  # warmup; also compiles on first use
    for _ in range(repeats):
        t0 = _time.perf_counter()
        wasted = run_once()
        record.times.append(_time.perf_counter() - t0)
    record.wasted_lanes = int(wasted)
    return record, out


def layout_sweep(
    sizes=DEFAULT_SIZES,
    repeats: int = 5,
    traversals=("lex",),
    tile: tuple[int, int] = DEFAULT_TILE,
) -> list[BenchRecord]:
    """Benchmark every size x layout x traversal combination."""
    records = []
    for n in sizes:
        for layout in (Layout.INTERLEAVED, Layout.COMPONENT_CONTIGUOUS):
            for traversal in traversals:
                rec, _ = run_case(n, layout, traversal, repeats=repeats, tile=tile)
                records.append(rec)
    return records


def _layout_name(layout: Layout) -> str:
    return "interleaved" if layout == Layout.INTERLEAVED else "contiguous"


def bench_report(records: list[BenchRecord]) -> str:
    """Text table `n layout traversal median_s bandwidth_GBs ratio_vs_baseline`.

    The baseline for each size is the interleaved/lex row (first fallback:
    the first row of that size). Values carry three significant digits; a
    trailing comment line reports the worst coefficient of variation.
    """
    baselines = {}
    for rec in records:
        key = rec.size_label
        if key not in baselines or (
            rec.layout == Layout.INTERLEAVED and rec.traversal == "lex"
        ):
            if key not in baselines:
                baselines[key] = rec
            elif rec.layout == Layout.INTERLEAVED and rec.traversal == "lex":
                baselines[key] = rec
    lines = ["n layout traversal median_s bandwidth_GBs ratio_vs_baseline"]
    for rec in records:
        ratio = rec.median_seconds / baselines[rec.size_label].median_seconds
        lines.append(
            f"{rec.size_label} {_layout_name(rec.layout)} {rec.traversal} "
            f"{rec.median_seconds:.3g} {rec.bandwidth_gbs:.3g} {ratio:.3g}"
        )
    if records:
        lines.append(f"# max_cv {max(rec.cv for rec in records):.3g}")
    return "\n".join(lines) + "\n"


def soft_ordering_checks(records: list[BenchRecord]) -> list[str]:
    """Check the expected-but-not-guaranteed performance orderings.

    Returns the warning messages (also emitted via warnings.warn); an empty
    list means every expectation held on this machine.
    """
    notes = []
    by_key = {(r.size_label, r.layout, r.traversal): r for r in records}
    sizes = sorted({r.size_label for r in records})
    for size in sizes:
        aos = by_key.get((size, Layout.INTERLEAVED, "lex"))
        soa = by_key.get((size, Layout.COMPONENT_CONTIGUOUS, "lex"))
        if aos and soa and soa.median_seconds > aos.median_seconds:
            notes.append(
                f"n={size}: contiguous layout was slower than interleaved "
                f"({soa.median_seconds:.3g}s vs {aos.median_seconds:.3g}s)"
            )
        for layout in (Layout.INTERLEAVED, Layout.COMPONENT_CONTIGUOUS):
            lex = by_key.get((size, layout, "lex"))
            tiled = by_key.get((size, layout, "tiled"))
            if lex and tiled and tiled.wasted_lanes > 0:
                if tiled.median_seconds < lex.median_seconds:
                    notes.append(
                        f"n={size} {_layout_name(layout)}: tiled traversal beat "
                        f"lexicographic despite wasting "
                        f"{tiled.wasted_fraction:.1%} of its lanes"
                    )
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return notes
