"""Runge-Kutta steppers, step sizing, and the advance loop."""

import numpy as np
import pytest

import hitdns as hd

from conftest import GAMMA, fields_from_primitives, smooth_state

REST = dict(rho=1.0, p=1.0 / GAMMA)  # sound speed exactly 1, velocity zero


def rest_fields(n=8):
    spec = hd.GridSpec(n=(n, n, n))
    ones = np.ones((n, n, n))
    return fields_from_primitives(spec, REST["rho"] * ones, 0 * ones, 0 * ones, 0 * ones, REST["p"] * ones)


def scalar_fields(value: float):
    """1-point FieldSet whose five slots all hold `value`, for ODE checks."""
    spec = hd.GridSpec(n=(1, 1, 1))
    fs = hd.FieldSet.zeros(spec)
    fs.interior()[:] = value
    return fs


def scalar_value(fs):
    return fs.interior()[0, 0, 0, 0]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(scheme="rk5", dt=0.1, max_steps=1),
        dict(cfl_mode="min", dt=0.1, max_steps=1),
        dict(max_steps=1),  # neither dt nor cfl
        dict(dt=0.1, cfl=0.4, max_steps=1),  # both
        dict(dt=-0.1, max_steps=1),
        dict(cfl=0.0, max_steps=1),
        dict(dt=0.1),  # no stop condition
        dict(dt=0.1, t_final=-1.0),
        dict(dt=0.1, max_steps=-2),
    ],
)
def test_time_params_rejects_bad_combinations(kwargs):
    with pytest.raises(ValueError):
        hd.TimeParams(**kwargs)


def test_time_params_accepts_either_stop_condition():
    hd.TimeParams(dt=0.1, t_final=1.0)
    hd.TimeParams(cfl=0.4, max_steps=10)
    hd.TimeParams(cfl=0.4, t_final=1.0, max_steps=10)


def test_compute_dt_at_rest():
    fs = rest_fields(8)
    dx = fs.spec.spacing[0]
    # |u| + a = 1 everywhere, so dt = cfl * dx under the per-axis max rule
    assert hd.compute_dt(fs, hd.GasModel(), 0.4) == pytest.approx(0.4 * dx, rel=1e-14)
    # summing the three axis signals divides the step by three
    assert hd.compute_dt(fs, hd.GasModel(), 0.4, cfl_mode="sum") == pytest.approx(
        0.4 * dx / 3.0, rel=1e-14
    )


def test_max_signal_rest():
    fs = rest_fields(8)
    dx = fs.spec.spacing[0]
    assert hd.max_signal(fs, hd.GasModel()) == pytest.approx(1.0 / dx, rel=1e-14)
    assert hd.max_signal(fs, hd.GasModel(), cfl_mode="sum") == pytest.approx(3.0 / dx, rel=1e-14)


def test_rk3_linear_amplification_factor():
    fs = scalar_fields(1.0)
    decay = lambda f: hd.FieldSet(f.spec, f.layout, -f.data)
    new = hd.rk3_tvd_step(fs, 0.1, decay)
    # 1 + z + z^2/2 + z^3/6 at z = -0.1
    assert abs(scalar_value(new) - 0.9048333333333334) < 1e-14


def test_rk4_linear_amplification_factor():
    fs = scalar_fields(1.0)
    decay = lambda f: hd.FieldSet(f.spec, f.layout, -f.data)
    new = hd.rk4_step(fs, 0.1, decay)
    # adds z^4/24 on top of the rk3 polynomial
    assert abs(scalar_value(new) - 0.9048375) < 1e-14


@pytest.mark.parametrize("scheme,min_order", [("rk3", 2.7), ("rk4", 3.7)])
def test_temporal_order_on_nonlinear_decay(scheme, min_order):
    """y' = -y^2, y(0) = 1 has exact solution 1 / (1 + t)."""
    stepper = hd.rk3_tvd_step if scheme == "rk3" else hd.rk4_step
    rhs = lambda f: hd.FieldSet(f.spec, f.layout, -(f.data * f.data))
    errs = []
    for steps in (20, 40):
        fs = scalar_fields(1.0)
        dt = 1.0 / steps
        for _ in range(steps):
            fs = stepper(fs, dt, rhs)
        errs.append(abs(scalar_value(fs) - 0.5))
    order = np.log2(errs[0] / errs[1])
    assert order > min_order


def test_advance_fixed_dt_counts_and_time(compiled_kernels):
    fs = smooth_state(8)
    res = hd.advance(fs, hd.GasModel(), hd.TimeParams(dt=1e-4, max_steps=3))
    assert res.steps == 3
    assert res.t == pytest.approx(3e-4, rel=1e-12)
    assert [r.step for r in res.records] == [1, 2, 3]
    assert res.fields is not fs  # input state is left untouched


def test_advance_lands_exactly_on_t_final(compiled_kernels):
    fs = smooth_state(8)
    res = hd.advance(fs, hd.GasModel(), hd.TimeParams(dt=3e-4, t_final=1e-3))
    assert res.t == 1e-3
    assert res.steps == 4
    assert res.records[-1].dt == pytest.approx(1e-4, rel=1e-12)
    # a rerun must not append a zero-size step
    again = hd.advance(res.fields, hd.GasModel(), hd.TimeParams(dt=3e-4, t_final=1e-3), t0=res.t)
    assert again.steps == 0


def test_advance_observer_and_log_roundtrip(tmp_path, compiled_kernels):
    fs = smooth_state(8)
    seen = []
    res = hd.advance(
        fs, hd.GasModel(), hd.TimeParams(dt=1e-4, max_steps=2), observer=seen.append
    )
    assert seen == res.records
    path = tmp_path / "steps.log"
    hd.write_step_log(path, res.records)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    for line, rec in zip(lines, res.records):
        cols = line.split()
        assert len(cols) == 9
        assert int(cols[0]) == rec.step
        assert float(cols[1]) == pytest.approx(rec.t, rel=1e-11)
        assert float(cols[3]) == pytest.approx(rec.mass, rel=1e-14)
        assert float(cols[7]) == pytest.approx(rec.energy, rel=1e-14)


def test_advance_dt_provider_overrides_cfl(compiled_kernels):
    fs = smooth_state(8)
    calls = []

    def provider(state):
        calls.append(state)
        return 5e-5

    res = hd.advance(
        fs, hd.GasModel(), hd.TimeParams(cfl=0.4, max_steps=2), dt_provider=provider
    )
    assert len(calls) == 2
    assert all(r.dt == 5e-5 for r in res.records)


def test_step_error_reports_stage(compiled_kernels):
    """A state driven negative mid-step surfaces as StepError with the stage."""
    n = 8
    spec = hd.GridSpec(n=(n, n, n))
    ones = np.ones((n, n, n))
    fs = fields_from_primitives(spec, ones, 0 * ones, 0 * ones, 0 * ones, 1e-9 * ones)
    fs.interior()[4] *= -1.0  # negative total energy => negative pressure
    with pytest.raises(hd.StepError) as info:
        hd.advance(fs, hd.GasModel(), hd.TimeParams(dt=1e-3, max_steps=1))
    assert info.value.stage == 0
    assert "step 1" in str(info.value)
