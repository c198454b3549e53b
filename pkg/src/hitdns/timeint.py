"""Explicit time integration: TVD-RK3 and classical RK4, CFL control, run loop.

The right-hand side composition is the single place where ghost refill,
convective, and viscous terms meet:

    rhs(u) = sync_ghosts(u); hyperbolic_rhs(u) + parabolic_rhs(u)

Stage arithmetic is written exactly as documented so results are
reproducible across refactorings:

    RK3:  u1 = u + dt R(u)
          u2 = 3/4 u + 1/4 (u1 + dt R(u1))
          u+ = 1/3 u + 2/3 (u2 + dt R(u2))
    RK4:  the classical four-stage tableau

On a linear problem R(u) = z/dt * u these give amplification factors
1 + z + z^2/2 + z^3/6 and sum_{m=0..4} z^m/m! per step.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError, StepError
from .grid import FieldSet, PeriodicHalo
from .physics import GasModel, cons_to_prim, sound_speed
from .upwind import hyperbolic_rhs
from .viscous import parabolic_rhs
from .weno import DEFAULT_PARAMS, WenoParams

SCHEMES = ("rk3", "rk4")
CFL_MODES = ("max", "sum")


@dataclass(frozen=True)
class TimeParams:
    """Scheme choice, step-size rule (fixed dt XOR CFL), and stop condition."""

    scheme: str = "rk3"
    dt: float | None = None
    cfl: float | None = None
    cfl_mode: str = "max"
    t_final: float | None = None
    max_steps: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.cfl_mode not in CFL_MODES:
            raise ValueError(f"cfl_mode must be one of {CFL_MODES}, got {self.cfl_mode!r}")
        if (self.dt is None) == (self.cfl is None):
            raise ValueError("exactly one of dt and cfl must be set")
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.cfl is not None and self.cfl <= 0.0:
            raise ValueError(f"cfl must be positive, got {self.cfl}")
        if self.t_final is None and self.max_steps is None:
            raise ValueError("need a stop condition: t_final and/or max_steps")
        if self.t_final is not None and self.t_final < 0.0:
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError(f"max_steps must be nonnegative, got {self.max_steps}")


@dataclass
class StepRecord:
    """Diagnostics of one completed step (volume-weighted interior totals)."""

    step: int
    t: float
    dt: float
    mass: float
    momentum: tuple[float, float, float]
    energy: float
    max_wavespeed: float
    wall_seconds: float

    def log_line(self) -> str:
        mx, my, mz = self.momentum
        return (
            f"{self.step} {self.t:.12e} {self.dt:.12e} {self.mass:.15e} "
            f"{mx:.15e} {my:.15e} {mz:.15e} {self.energy:.15e} {self.wall_seconds:.6e}"
        )


@dataclass
class AdvanceResult:
    fields: FieldSet
    t: float
    records: list[StepRecord] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.records)


def conserved_totals(fields: FieldSet) -> tuple[float, tuple[float, float, float], float]:
    """Volume-weighted interior sums of mass, momentum, and energy."""
    interior = fields.interior()
    vol = fields.spec.cell_volume()
    mass = float(np.sum(interior[0])) * vol
    mom = tuple(float(np.sum(interior[1 + d])) * vol for d in range(3))
    energy = float(np.sum(interior[4])) * vol
    return mass, mom, energy


def _interior_prim(fields: FieldSet, gamma: float) -> np.ndarray:
    cons = np.moveaxis(fields.interior(), 0, -1)
    return cons_to_prim(cons, gamma)


def max_wavespeed_interior(fields: FieldSet, gas: GasModel) -> float:
    """max over interior points and dimensions of |v_d| + a."""
    prim = _interior_prim(fields, gas.gamma)
    a = sound_speed(prim, gas.gamma)
    return float(np.max(np.max(np.abs(prim[..., 1:4]), axis=-1) + a))


def max_signal(fields: FieldSet, gas: GasModel, cfl_mode: str = "max") -> float:
    """Largest per-point CFL signal: max_d (|v_d|+a)/dx_d, or the sum over d."""
    prim = _interior_prim(fields, gas.gamma)
    a = sound_speed(prim, gas.gamma)
    spacing = fields.spec.spacing
    per_dim = [(np.abs(prim[..., 1 + d]) + a) / spacing[d] for d in range(3)]
    if cfl_mode == "sum":
        return float(np.max(per_dim[0] + per_dim[1] + per_dim[2]))
    return float(np.max(np.maximum(np.maximum(per_dim[0], per_dim[1]), per_dim[2])))


def compute_dt(fields: FieldSet, gas: GasModel, cfl: float, cfl_mode: str = "max") -> float:
    """Stable step from the CFL number; raises on a silent (zero-signal) field."""
    signal = max_signal(fields, gas, cfl_mode)
    if not np.isfinite(signal) or signal <= 0.0:
        raise InvalidStateError(f"cannot size dt: max signal is {signal}")
    return cfl / signal


def make_rhs(
    gas: GasModel,
    params: WenoParams = DEFAULT_PARAMS,
    delta: float = 0.0,
    halo=None,
    workers: int = 1,
):
    """Build the composed rhs(u) closure used by the steppers."""
    if halo is None:
        halo = PeriodicHalo()

    def rhs(fields: FieldSet) -> FieldSet:
        halo.sync_fields(fields)
        inc = hyperbolic_rhs(fields, gas, params, delta, workers)
        parabolic_rhs(fields, gas, halo, workers, out=inc)
        return inc

    return rhs


def _stage(rhs, fields: FieldSet, stage: int):
    try:
        return rhs(fields)
    except InvalidStateError as err:
        raise StepError(f"invalid state entering RK stage {stage}: {err}", stage=stage) from err


def rk3_tvd_step(fields: FieldSet, dt: float, rhs) -> FieldSet:
    """One three-stage TVD Runge-Kutta step."""
    spec, layout = fields.spec, fields.layout
    r0 = _stage(rhs, fields, 0)
    u1 = FieldSet(spec, layout, fields.data + dt * r0.data)
    r1 = _stage(rhs, u1, 1)
    u2 = FieldSet(spec, layout, 0.75 * fields.data + 0.25 * (u1.data + dt * r1.data))
    r2 = _stage(rhs, u2, 2)
    return FieldSet(
        spec, layout, (1.0 / 3.0) * fields.data + (2.0 / 3.0) * (u2.data + dt * r2.data)
    )


def rk4_step(fields: FieldSet, dt: float, rhs) -> FieldSet:
    """One classical four-stage Runge-Kutta step."""
    spec, layout = fields.spec, fields.layout
    half = 0.5 * dt
    k1 = _stage(rhs, fields, 0)
    k2 = _stage(rhs, FieldSet(spec, layout, fields.data + half * k1.data), 1)
    k3 = _stage(rhs, FieldSet(spec, layout, fields.data + half * k2.data), 2)
    k4 = _stage(rhs, FieldSet(spec, layout, fields.data + dt * k3.data), 3)
    return FieldSet(
        spec,
        layout,
        fields.data + (dt / 6.0) * (k1.data + 2.0 * k2.data + 2.0 * k3.data + k4.data),
    )


STEPPERS = {"rk3": rk3_tvd_step, "rk4": rk4_step}


def advance(
    fields: FieldSet,
    gas: GasModel,
    tparams: TimeParams,
    weno_params: WenoParams = DEFAULT_PARAMS,
    delta: float = 0.0,
    halo=None,
    workers: int = 1,
    t0: float = 0.0,
    observer=None,
    dt_provider=None,
) -> AdvanceResult:
    """March the solution until t_final and/or max_steps, collecting step records.

    ``observer`` (if given) is called with each StepRecord as it is produced.
    ``dt_provider`` overrides CFL-based step sizing (decomposed runs pass a
    globally reduced version); it receives the current FieldSet.
    """
    rhs = make_rhs(gas, weno_params, delta, halo, workers)
    stepper = STEPPERS[tparams.scheme]
    records: list[StepRecord] = []
    t = t0
    step = 0
    time_tol = 1e-12 * max(1.0, abs(tparams.t_final)) if tparams.t_final is not None else 0.0

    while True:
        if tparams.max_steps is not None and step >= tparams.max_steps:
            break
        if tparams.t_final is not None and t >= tparams.t_final - time_tol:
            break
        wall0 = _time.perf_counter()
        if tparams.dt is not None:
            dt = tparams.dt
        elif dt_provider is not None:
            dt = dt_provider(fields)
        else:
            dt = compute_dt(fields, gas, tparams.cfl, tparams.cfl_mode)
        if tparams.t_final is not None:
            dt = min(dt, tparams.t_final - t)
        try:
            fields = stepper(fields, dt, rhs)
        except StepError as err:
            raise StepError(f"step {step + 1} failed: {err}", step=step + 1, stage=err.stage) from err
        t += dt
        step += 1
        mass, mom, energy = conserved_totals(fields)
        record = StepRecord(
            step=step,
            t=t,
            dt=dt,
            mass=mass,
            momentum=mom,
            energy=energy,
            max_wavespeed=max_wavespeed_interior(fields, gas),
            wall_seconds=_time.perf_counter() - wall0,
        )
        records.append(record)
        if observer is not None:
            observer(record)
    return AdvanceResult(fields=fields, t=t, records=records)


def write_step_log(path, records) -> None:
    """Step log: one text line per step,
    `step t dt mass mom_x mom_y mom_z energy wall_seconds`."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(rec.log_line() + "\n")
