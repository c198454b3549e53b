"""Memory-layout and traversal benchmark harness."""

import numpy as np
import pytest

import hitdns as hd
from hitdns import bench


def test_bytes_per_point_model():
    # five variables, five reads plus three writes each, eight bytes
    assert bench.BYTES_PER_POINT == 320


def test_pack_values_permutations():
    vals = np.arange(12.0).reshape(4, 3)  # 4 points, 3 vars (toy shapes)
    aos = np.ascontiguousarray(vals).reshape(-1)
    soa = np.ascontiguousarray(vals.T).reshape(-1)
    np.testing.assert_array_equal(
        bench.pack_values(vals, hd.Layout.INTERLEAVED), aos
    )
    np.testing.assert_array_equal(
        bench.pack_values(vals, hd.Layout.COMPONENT_CONTIGUOUS), soa
    )
    # same multiset of values, different order
    assert soa[1] == vals[1, 0]
    assert aos[1] == vals[0, 1]


def test_make_bench_values_deterministic_and_positive():
    a = bench.make_bench_values(8)
    b = bench.make_bench_values(8)
    assert np.array_equal(a, b)
    assert a.shape == ((8 + 2 * bench.X_PAD) * 8 * 8, 5)
    assert np.all(a >= 0.5) and np.all(a < 1.5)


def test_all_layout_traversal_combinations_agree_bitwise():
    outs = []
    for layout in (hd.Layout.INTERLEAVED, hd.Layout.COMPONENT_CONTIGUOUS):
        for traversal in ("lex", "tiled"):
            rec, out = bench.run_case(8, layout, traversal, repeats=1)
            outs.append((layout, traversal, rec, out))
    base = outs[0][3]
    assert np.count_nonzero(base) > 0
    for layout, traversal, rec, out in outs[1:]:
        assert np.array_equal(out, base), (layout, traversal)


def test_wasted_lane_accounting():
    # 8^3 active points inside (32, 8) tiles: 24 of every 32 x-lanes idle
    rec, _ = bench.run_case(8, hd.Layout.INTERLEAVED, "tiled", repeats=1)
    assert rec.wasted_lanes == (32 - 8) * 8 * 8
    assert rec.wasted_fraction == 0.75
    rec64, _ = bench.run_case(
        (64, 8, 8), hd.Layout.INTERLEAVED, "tiled", repeats=1
    )
    assert rec64.wasted_lanes == 0
    assert rec64.wasted_fraction == 0.0
    lex, _ = bench.run_case(8, hd.Layout.INTERLEAVED, "lex", repeats=1)
    assert lex.wasted_lanes == 0


def test_record_statistics_and_bandwidth():
    rec = bench.BenchRecord(shape=(16, 16, 16), layout=hd.Layout.INTERLEAVED, traversal="lex")
    rec.times = [0.004, 0.002, 0.003]
    assert rec.median_seconds == 0.003
    assert rec.min_seconds == 0.002
    assert rec.active_points == 4096
    assert rec.bandwidth_gbs == pytest.approx(4096 * 320 / 0.003 / 1e9, rel=1e-12)
    assert rec.size_label == "16"
    assert bench.BenchRecord(
        shape=(64, 8, 8), layout=hd.Layout.INTERLEAVED, traversal="lex"
    ).size_label == "64x8x8"


def test_bench_report_baseline_and_header():
    recs = bench.layout_sweep(sizes=(8,), repeats=2, traversals=("lex", "tiled"))
    text = bench.bench_report(recs)
    lines = text.splitlines()
    assert lines[0] == "n layout traversal median_s bandwidth_GBs ratio_vs_baseline"
    assert len(lines) == 1 + 4 + 1  # header, 4 rows, max_cv comment
    assert lines[-1].startswith("# max_cv ")
    first = lines[1].split()
    assert first[:3] == ["8", "interleaved", "lex"]
    assert float(first[5]) == 1.0  # baseline compares to itself
    for line in lines[2:5]:
        cols = line.split()
        assert len(cols) == 6
        assert float(cols[5]) > 0.0


def test_soft_ordering_checks_warn_but_never_fail():
    fast = bench.BenchRecord(shape=(8, 8, 8), layout=hd.Layout.INTERLEAVED, traversal="lex")
    fast.times = [0.001]
    slow = bench.BenchRecord(
        shape=(8, 8, 8), layout=hd.Layout.COMPONENT_CONTIGUOUS, traversal="lex"
    )
    slow.times = [0.002]
    with pytest.warns(RuntimeWarning, match="slower than interleaved"):
        notes = bench.soft_ordering_checks([fast, slow])
    assert len(notes) == 1
    # reversed ordering raises nothing
    fast.times, slow.times = [0.002], [0.001]
    assert bench.soft_ordering_checks([fast, slow]) == []


def test_run_case_validation():
    with pytest.raises(ValueError):
        bench.run_case(8, hd.Layout.INTERLEAVED, "spiral")
    with pytest.raises(ValueError):
        bench.run_case(8, hd.Layout.INTERLEAVED, "lex", repeats=0)
