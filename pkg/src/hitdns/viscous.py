"""Viscous/diffusive right-hand side on fourth-order central differences.

The parabolic terms are evaluated in divergence form: velocity and
temperature gradients produce the stress tensor and heat flux at every
interior point; the per-dimension viscous flux components are then stored in
ghosted scratch fields, their ghost layers are refilled (periodically or via
rank halo exchange), and one more central derivative of each flux component
builds the divergence.  Mass receives no viscous contribution.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .grid import FieldSet, Layout, PeriodicHalo
from .physics import GasModel, decode_primitives
from .upwind import run_slabs

_OFFSETS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))  # (di, dj, dk) per dimension


def central_derivative_4(
    field: np.ndarray,
    dim: int,
    spacing: float,
    ghost_width: int = 3,
    workers: int = 1,
    out: np.ndarray | None = None,
    out_ghost: int = 0,
) -> np.ndarray:
    """Fourth-order central derivative of a ghosted (z, y, x) scalar field.

    Returns the interior-shaped derivative by default; pass a ghosted ``out``
    with ``out_ghost`` set to write into its interior instead.  Ghosts of
    ``field`` must be filled two layers deep along ``dim``.
    """
    g = ghost_width
    nz, ny, nx = (s - 2 * g for s in field.shape)
    if out is None:
        out = np.empty((nz, ny, nx))
    di, dj, dk = _OFFSETS[dim]
    coef = 1.0 / (12.0 * spacing)
    run_slabs(
        nz,
        workers,
        lambda lo, hi: kernels.central_diff4(
            field, out, di, dj, dk, g, out_ghost, nx, ny, nz, lo, hi, coef
        ),
    )
    return out


def parabolic_rhs(
    fields: FieldSet,
    gas: GasModel,
    halo=None,
    workers: int = 1,
    out: FieldSet | None = None,
) -> FieldSet:
    """Viscous + heat-conduction right-hand side; adds into ``out`` when given.

    Zero viscosity short-circuits to an untouched (zero) increment, so an
    inviscid run is bitwise identical to running the convective terms alone.
    Ghosts of ``fields`` must be filled.
    """
    if fields.layout != Layout.COMPONENT_CONTIGUOUS:
        raise ValueError("parabolic_rhs needs COMPONENT_CONTIGUOUS fields")
    if out is None:
        out = fields.like()
    mu = gas.effective_mu
    if mu == 0.0:
        return out
    if halo is None:
        halo = PeriodicHalo()

    spec = fields.spec
    g = spec.ghost_width
    gamma = gas.gamma
    rho, u, v, w, p = decode_primitives(fields, gamma)
    T = gamma * p / rho
    vel = (u, v, w)
    interior = spec.interior()

    # velocity-gradient tensor grad[i][j] = du_i/dx_j and temperature gradient
    grad = [
        [central_derivative_4(vel[i], j, spec.spacing[j], g, workers) for j in range(3)]
        for i in range(3)
    ]
    grad_T = [central_derivative_4(T, j, spec.spacing[j], g, workers) for j in range(3)]

    div = grad[0][0] + grad[1][1] + grad[2][2]
    two_thirds_div = (2.0 / 3.0) * div

    def tau(i, j):
        if i == j:
            return mu * (2.0 * grad[i][i] - two_thirds_div)
        return mu * (grad[i][j] + grad[j][i])

    t00, t11, t22 = tau(0, 0), tau(1, 1), tau(2, 2)
    t01, t02, t12 = tau(0, 1), tau(0, 2), tau(1, 2)
    stress = (
        (t00, t01, t02),
        (t01, t11, t12),
        (t02, t12, t22),
    )
    q_coef = -mu / ((gamma - 1.0) * gas.prandtl)

    ui, vi, wi = u[interior], v[interior], w[interior]
    inc = out.interior()
    scratch = [np.zeros(spec.shape) for _ in range(4)]
    for d in range(3):
        q_d = q_coef * grad_T[d]
        work = ui * stress[0][d] + vi * stress[1][d] + wi * stress[2][d] - q_d
        for buf, values in zip(scratch, (stress[0][d], stress[1][d], stress[2][d], work)):
            buf[interior] = values
        # flux fields need valid halos before the outer derivative
        halo.sync_scalars(scratch, spec.n, g)
        for row, buf in zip((1, 2, 3, 4), scratch):
            inc[row] += central_derivative_4(buf, d, spec.spacing[d], g, workers)
    return out
