"""Compressible ideal-gas relations, fluxes, and the Euler eigensystem.

State vectors are plain float64 ndarrays whose LAST axis has length 5 and
broadcasts over any leading batch shape:

* conserved: [rho, rho*u, rho*v, rho*w, e]  with e = p/(gamma-1) + rho*|v|^2/2
* primitive: [rho, u, v, w, p]

The gas is nondimensional ideal: T = gamma * p / rho, sound speed
a = sqrt(gamma * p / rho).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidStateError

NVARS = 5


@dataclass(frozen=True)
class GasModel:
    """Gas constants and viscosity knobs for one run."""

    gamma: float = 1.4
    prandtl: float = 0.72
    mu: float = 0.0
    visc_scale: float = 1.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.prandtl <= 0.0:
            raise ValueError(f"prandtl must be positive, got {self.prandtl}")
        if self.mu < 0.0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")

    @property
    def effective_mu(self) -> float:
        return self.mu * self.visc_scale


def _check_positive(name: str, values: np.ndarray) -> None:
    if np.all(values > 0.0):
        return
    bad = np.argwhere(~(np.asarray(values) > 0.0))
    first = tuple(bad[0]) if bad.size else None
    raise InvalidStateError(
        f"nonpositive {name} (min {np.min(values):.6e}) at array index {first}",
        where=first,
    )


def cons_to_prim(cons: np.ndarray, gamma: float) -> np.ndarray:
    """Decode conserved -> primitive; raises InvalidStateError on rho<=0 or p<=0."""
    cons = np.asarray(cons, dtype=np.float64)
    rho = cons[..., 0]
    _check_positive("density", rho)
    out = np.empty_like(cons)
    out[..., 0] = rho
    vel = cons[..., 1:4] / rho[..., None]
    out[..., 1:4] = vel
    kinetic = 0.5 * rho * np.sum(vel * vel, axis=-1)
    p = (gamma - 1.0) * (cons[..., 4] - kinetic)
    _check_positive("pressure", p)
    out[..., 4] = p
    return out


def prim_to_cons(prim: np.ndarray, gamma: float) -> np.ndarray:
    """Encode primitive -> conserved."""
    prim = np.asarray(prim, dtype=np.float64)
    rho = prim[..., 0]
    vel = prim[..., 1:4]
    p = prim[..., 4]
    out = np.empty_like(prim)
    out[..., 0] = rho
    out[..., 1:4] = rho[..., None] * vel
    out[..., 4] = p / (gamma - 1.0) + 0.5 * rho * np.sum(vel * vel, axis=-1)
    return out


def sound_speed(prim: np.ndarray, gamma: float) -> np.ndarray:
    prim = np.asarray(prim, dtype=np.float64)
    return np.sqrt(gamma * prim[..., 4] / prim[..., 0])


def temperature(prim: np.ndarray, gamma: float) -> np.ndarray:
    """Nondimensional temperature T = gamma * p / rho."""
    prim = np.asarray(prim, dtype=np.float64)
    return gamma * prim[..., 4] / prim[..., 0]


def convective_flux(cons: np.ndarray, dim: int, gamma: float) -> np.ndarray:
    """Inviscid flux vector along dimension ``dim`` (0 = x) for conserved input."""
    cons = np.asarray(cons, dtype=np.float64)
    prim = cons_to_prim(cons, gamma)
    rho = prim[..., 0]
    vel = prim[..., 1:4]
    p = prim[..., 4]
    vd = vel[..., dim]
    out = np.empty_like(cons)
    out[..., 0] = rho * vd
    # momentum rows: rho*v_m*v_d + p on the diagonal entry
    out[..., 1:4] = cons[..., 1:4] * vd[..., None]
    out[..., 1 + dim] += p
    out[..., 4] = (cons[..., 4] + p) * vd
    return out


def max_wavespeed(cons: np.ndarray, dim: int, gamma: float) -> np.ndarray:
    """|v_d| + a for conserved input; scalar for a single state."""
    prim = cons_to_prim(np.asarray(cons, dtype=np.float64), gamma)
    return np.abs(prim[..., 1 + dim]) + sound_speed(prim, gamma)


# ---- Roe eigensystem --------------------------------------------------------


class RoeEigenSystem(NamedTuple):
    """Right eigenvectors (columns of X), ascending eigenvalues, and X^{-1}."""

    X: np.ndarray
    eigenvalues: np.ndarray
    Xinv: np.ndarray


def roe_eigensystem(prim: np.ndarray, dim: int, gamma: float) -> RoeEigenSystem:
    """Closed-form eigensystem of the conservative flux Jacobian along ``dim``.

    Input is a primitive state (typically a Roe average); broadcasting over
    leading axes gives batched (..., 5, 5) matrices.  Eigenvalues come back
    sorted ascending: (vn - a, vn, vn, vn, vn + a) where vn is the normal
    velocity, and X's columns follow the same order.
    """
    prim = np.asarray(prim, dtype=np.float64)
    batch = prim.shape[:-1]
    rho = prim[..., 0]
    vel = prim[..., 1:4]
    p = prim[..., 4]
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise InvalidStateError("eigensystem needs positive density and pressure")

    d1, d2 = (dim + 1) % 3, (dim + 2) % 3
    vn = vel[..., dim]
    vt1 = vel[..., d1]
    vt2 = vel[..., d2]
    a = np.sqrt(gamma * p / rho)
    q2 = np.sum(vel * vel, axis=-1)
    H = a * a / (gamma - 1.0) + 0.5 * q2

    lam = np.empty(batch + (NVARS,))
    lam[..., 0] = vn - a
    lam[..., 1] = vn
    lam[..., 2] = vn
    lam[..., 3] = vn
    lam[..., 4] = vn + a

    # rows of X / columns of Xinv in physical conserved ordering
    rn, rt1, rt2 = 1 + dim, 1 + d1, 1 + d2

    X = np.zeros(batch + (NVARS, NVARS))
    X[..., 0, 0] = 1.0
    X[..., rn, 0] = vn - a
    X[..., rt1, 0] = vt1
    X[..., rt2, 0] = vt2
    X[..., 4, 0] = H - vn * a
    X[..., 0, 1] = 1.0
    X[..., rn, 1] = vn
    X[..., rt1, 1] = vt1
    X[..., rt2, 1] = vt2
    X[..., 4, 1] = 0.5 * q2
    X[..., rt1, 2] = 1.0
    X[..., 4, 2] = vt1
    X[..., rt2, 3] = 1.0
    X[..., 4, 3] = vt2
    X[..., 0, 4] = 1.0
    X[..., rn, 4] = vn + a
    X[..., rt1, 4] = vt1
    X[..., rt2, 4] = vt2
    X[..., 4, 4] = H + vn * a

    b1 = (gamma - 1.0) / (a * a)
    b2 = 0.5 * b1 * q2
    inv_a = 1.0 / a

    Xinv = np.zeros(batch + (NVARS, NVARS))
    Xinv[..., 0, 0] = 0.5 * (b2 + vn * inv_a)
    Xinv[..., 0, rn] = -0.5 * (b1 * vn + inv_a)
    Xinv[..., 0, rt1] = -0.5 * b1 * vt1
    Xinv[..., 0, rt2] = -0.5 * b1 * vt2
    Xinv[..., 0, 4] = 0.5 * b1
    Xinv[..., 1, 0] = 1.0 - b2
    Xinv[..., 1, rn] = b1 * vn
    Xinv[..., 1, rt1] = b1 * vt1
    Xinv[..., 1, rt2] = b1 * vt2
    Xinv[..., 1, 4] = -b1
    Xinv[..., 2, 0] = -vt1
    Xinv[..., 2, rt1] = 1.0
    Xinv[..., 3, 0] = -vt2
    Xinv[..., 3, rt2] = 1.0
    Xinv[..., 4, 0] = 0.5 * (b2 - vn * inv_a)
    Xinv[..., 4, rn] = -0.5 * (b1 * vn - inv_a)
    Xinv[..., 4, rt1] = -0.5 * b1 * vt1
    Xinv[..., 4, rt2] = -0.5 * b1 * vt2
    Xinv[..., 4, 4] = 0.5 * b1

    return RoeEigenSystem(X, lam, Xinv)


# ---- viscous closures --------------------------------------------------------


def viscous_stress(grad_v: np.ndarray, mu: float, visc_scale: float = 1.0) -> np.ndarray:
    """Newtonian stress tensor from the velocity gradient g[i, j] = du_i/dx_j.

    tau_ij = mu * visc_scale * [(du_i/dx_j + du_j/dx_i) - (2/3) div(v) delta_ij]
    """
    g = np.asarray(grad_v, dtype=np.float64)
    div = np.trace(g, axis1=-2, axis2=-1)
    tau = g + np.swapaxes(g, -2, -1)
    idx = np.arange(3)
    tau[..., idx, idx] -= (2.0 / 3.0) * div[..., None]
    return mu * visc_scale * tau


def heat_flux(grad_T: np.ndarray, mu: float, visc_scale: float, gamma: float, prandtl: float) -> np.ndarray:
    """Fourier heat flux q = -mu*visc_scale / ((gamma-1) Pr) * grad T."""
    coeff = -mu * visc_scale / ((gamma - 1.0) * prandtl)
    return coeff * np.asarray(grad_T, dtype=np.float64)


# ---- FieldSet-level decode ---------------------------------------------------


def decode_primitives(fields, gamma: float):
    """Primitive 3D ghosted arrays (rho, u, v, w, p) from a COMPONENT_CONTIGUOUS FieldSet.

    Validates positivity over the full ghosted extent, so ghosts must hold
    real (filled) data when this is called.
    """
    view = fields.component_view()
    rho = view[0]
    _check_positive("density", rho)
    inv_rho = 1.0 / rho
    u = view[1] * inv_rho
    v = view[2] * inv_rho
    w = view[3] * inv_rho
    p = (gamma - 1.0) * (view[4] - 0.5 * rho * (u * u + v * v + w * w))
    _check_positive("pressure", p)
    return rho, u, v, w, p
