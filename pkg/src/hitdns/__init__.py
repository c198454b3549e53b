"""Compressible isotropic-turbulence mini-solver.

Fifth-order upwind-biased reconstruction with characteristic Roe fluxes,
fourth-order central viscous terms, explicit Runge-Kutta marching, spectral
turbulence initialization, an in-process domain decomposition, and memory
layout/traversal microbenchmarks.
"""

from .bench import (
    BYTES_PER_POINT,
    BenchRecord,
    bench_report,
    layout_sweep,
    run_case,
    soft_ordering_checks,
)
from .decomp import (
    ChannelMesh,
    ParallelResult,
    RankHalo,
    RankLayout,
    ScaleRow,
    ThreadReduce,
    TimingReport,
    comm_fraction,
    decompose,
    default_dims,
    parallel_advance,
    scaling_report,
    strong_scaling,
)
from .errors import (
    ConfigError,
    HaloProtocolError,
    InvalidStateError,
    SolutionFormatError,
    StepError,
)
from .grid import (
    AXIS_OF_DIM,
    NVARS,
    SOLUTION_MAGIC,
    TWO_PI,
    FieldSet,
    GridSpec,
    Layout,
    PeriodicHalo,
    convert_layout,
    element_offset,
    fill_ghosts_array,
    fill_ghosts_periodic,
    linear_index,
    read_solution,
    write_solution,
)
from .hit import (
    HitParams,
    SpectrumTable,
    compute_spectrum,
    eddy_turnover_time,
    gradient_variance,
    make_initial_condition,
    read_spectrum,
    spectral_divergence,
    synthesize_velocity,
    target_spectrum,
    taylor_microscale,
    viscosity_from_re_lambda,
    write_spectrum,
)
from .physics import (
    GasModel,
    cons_to_prim,
    convective_flux,
    decode_primitives,
    heat_flux,
    max_wavespeed,
    prim_to_cons,
    roe_eigensystem,
    sound_speed,
    temperature,
    viscous_stress,
)
from .timeint import (
    AdvanceResult,
    StepRecord,
    TimeParams,
    advance,
    compute_dt,
    conserved_totals,
    make_rhs,
    max_signal,
    rk3_tvd_step,
    rk4_step,
    write_step_log,
)
from .upwind import (
    entropy_fix,
    hyperbolic_rhs,
    hyperbolic_rhs_reference,
    interface_flux_field,
    roe_average,
    roe_interface_flux,
)
from .viscous import central_derivative_4, parabolic_rhs
from .weno import (
    DEFAULT_PARAMS,
    FIFTH_ORDER_COEFFS,
    OPTIMAL_WEIGHTS,
    WenoParams,
    nonlinear_weights,
    reconstruct_field,
    reconstruct_left,
    reconstruct_right,
    smoothness_indicators,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
