"""Shared helpers for the test suite."""

import numpy as np
import pytest

import hitdns as hd

GAMMA = 1.4


def coords(n: int):
    """Interior cell-center coordinates of the periodic cube, (z, y, x) grids."""
    c = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.meshgrid(c, c, c, indexing="ij")


def fields_from_primitives(spec, rho, u, v, w, p, gamma=GAMMA, layout=None):
    """Pack interior primitive arrays into a ghost-filled FieldSet."""
    layout = layout if layout is not None else hd.Layout.COMPONENT_CONTIGUOUS
    fs = hd.FieldSet.zeros(spec, layout)
    it = fs.interior()
    it[0] = rho
    it[1] = rho * u
    it[2] = rho * v
    it[3] = rho * w
    it[4] = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v + w * w)
    hd.fill_ghosts_periodic(fs)
    return fs


def smooth_state(n: int, seed_phase: float = 0.0):
    """Low-wavenumber positive state exercising all variables and dims."""
    spec = hd.GridSpec(n=(n, n, n))
    z, y, x = coords(n)
    s = seed_phase
    rho = 1.0 + 0.2 * np.sin(x + s) * np.cos(y) * np.cos(z)
    u = 0.1 * np.cos(x) * np.sin(z + s)
    v = -0.15 * np.sin(y + s) * np.cos(x)
    w = 0.12 * np.cos(z) * np.sin(y)
    p = 1.0 + 0.1 * np.cos(x + s) * np.sin(y) * np.sin(z)
    return fields_from_primitives(spec, rho, u, v, w, p)


def random_primitives(rng, count: int):
    """Positive random primitive states, shape (count, 5)."""
    prim = np.empty((count, 5))
    prim[:, 0] = 0.3 + 2.0 * rng.random(count)
    prim[:, 1:4] = rng.standard_normal((count, 3))
    prim[:, 4] = 0.2 + 2.0 * rng.random(count)
    return prim


@pytest.fixture(scope="session")
def compiled_kernels():
    """Force one tiny compiled-path evaluation so JIT cost lands here."""
    fs = smooth_state(8)
    hd.hyperbolic_rhs(fs, hd.GasModel())
    return True
