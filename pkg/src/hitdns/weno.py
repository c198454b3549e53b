"""Fifth-order WENO reconstruction (component-wise, upwind-biased).

A reconstruction combines three 3-point candidate polynomials evaluated at
the interface half a cell RIGHT of the stencil center, weighting each
candidate by a smoothness-dependent factor.  Stencils are 5-tuples
(f_{j-2} ... f_{j+2}) on the trailing axis; every function broadcasts over
leading axes.

The right-biased value at an interface is the mirror image: reconstruct a
left-biased value on the reversed stencil of the cell just right of the
interface.

All arithmetic here is written in a fixed operation order (explicit
products instead of powers, left-to-right sums) so the compiled sweep
kernels can reproduce it bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ideal (smooth-data) candidate weights
OPTIMAL_WEIGHTS = (0.1, 0.6, 0.3)

# shared coefficient literals, reused by the compiled kernels
C_13_12 = 13.0 / 12.0
C_1_3 = 1.0 / 3.0
C_7_6 = 7.0 / 6.0
C_11_6 = 11.0 / 6.0
C_1_6 = 1.0 / 6.0
C_5_6 = 5.0 / 6.0

# combined fifth-order stencil that the weighted sum reduces to when the
# nonlinear weights equal the optimal ones
FIFTH_ORDER_COEFFS = (1.0 / 30.0, -13.0 / 60.0, 47.0 / 60.0, 27.0 / 60.0, -1.0 / 20.0)


@dataclass(frozen=True)
class WenoParams:
    """Regularization epsilon and the power applied to (eps + beta)."""

    epsilon: float = 1e-6
    power: int = 2

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.power) != self.power or self.power < 1:
            raise ValueError(f"power must be a positive integer, got {self.power}")
        object.__setattr__(self, "power", int(self.power))


DEFAULT_PARAMS = WenoParams()


def _betas(f0, f1, f2, f3, f4):
    t1 = f0 - 2.0 * f1 + f2
    s1 = f0 - 4.0 * f1 + 3.0 * f2
    b1 = C_13_12 * (t1 * t1) + 0.25 * (s1 * s1)
    t2 = f1 - 2.0 * f2 + f3
    s2 = f1 - f3
    b2 = C_13_12 * (t2 * t2) + 0.25 * (s2 * s2)
    t3 = f2 - 2.0 * f3 + f4
    s3 = 3.0 * f2 - 4.0 * f3 + f4
    b3 = C_13_12 * (t3 * t3) + 0.25 * (s3 * s3)
    return b1, b2, b3


def _weights(b1, b2, b3, eps, power):
    d1 = eps + b1
    d2 = eps + b2
    d3 = eps + b3
    e1, e2, e3 = d1, d2, d3
    for _ in range(power - 1):
        e1 = e1 * d1
        e2 = e2 * d2
        e3 = e3 * d3
    a1 = 0.1 / e1
    a2 = 0.6 / e2
    a3 = 0.3 / e3
    asum = a1 + a2 + a3
    return a1 / asum, a2 / asum, a3 / asum


def _candidates(f0, f1, f2, f3, f4):
    c1 = C_1_3 * f0 - C_7_6 * f1 + C_11_6 * f2
    c2 = -C_1_6 * f1 + C_5_6 * f2 + C_1_3 * f3
    c3 = C_1_3 * f2 + C_5_6 * f3 - C_1_6 * f4
    return c1, c2, c3


def _reconstruct5(f0, f1, f2, f3, f4, eps, power):
    b1, b2, b3 = _betas(f0, f1, f2, f3, f4)
    w1, w2, w3 = _weights(b1, b2, b3, eps, power)
    c1, c2, c3 = _candidates(f0, f1, f2, f3, f4)
    return w1 * c1 + w2 * c2 + w3 * c3


def smoothness_indicators(stencil: np.ndarray) -> np.ndarray:
    """The three quadratic roughness measures of a 5-point stencil, (..., 3)."""
    s = np.asarray(stencil, dtype=np.float64)
    b = _betas(s[..., 0], s[..., 1], s[..., 2], s[..., 3], s[..., 4])
    return np.stack(b, axis=-1)


def nonlinear_weights(betas: np.ndarray, params: WenoParams = DEFAULT_PARAMS) -> np.ndarray:
    """Normalized candidate weights from smoothness indicators, (..., 3).

    Weights are positive and sum to 1; beta = 0 for all candidates recovers
    the optimal weights (0.1, 0.6, 0.3) exactly.
    """
    b = np.asarray(betas, dtype=np.float64)
    w = _weights(b[..., 0], b[..., 1], b[..., 2], params.epsilon, params.power)
    return np.stack(w, axis=-1)


def reconstruct_left(stencil: np.ndarray, params: WenoParams = DEFAULT_PARAMS) -> np.ndarray:
    """Left-biased interface value from the stencil centered one cell left."""
    s = np.asarray(stencil, dtype=np.float64)
    return _reconstruct5(
        s[..., 0], s[..., 1], s[..., 2], s[..., 3], s[..., 4],
        params.epsilon, params.power,
    )


def reconstruct_right(stencil: np.ndarray, params: WenoParams = DEFAULT_PARAMS) -> np.ndarray:
    """Right-biased interface value; equals reconstruct_left on the reversed stencil."""
    s = np.asarray(stencil, dtype=np.float64)
    return reconstruct_left(s[..., ::-1], params)


def reconstruct_field(
    field: np.ndarray,
    dim: int,
    side: str,
    params: WenoParams = DEFAULT_PARAMS,
    ghost_width: int = 3,
) -> np.ndarray:
    """Interface values of one ghosted component field along ``dim``.

    Returns an array shaped like the interior except the ``dim`` axis has
    n + 1 entries: interfaces i + 1/2 for i in [-1, n-1].  The ghost layers
    must already be filled.  side "left" biases the stencil toward lower
    indices across the interface, "right" mirrors it.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    field = np.asarray(field, dtype=np.float64)
    g = ghost_width
    axis = 2 - dim  # (z, y, x) array ordering
    n = field.shape[axis] - 2 * g

    def shifted(q):
        # stencil point at offset q from the cell left of each interface
        idx = [slice(g, s - g) for s in field.shape]
        idx[axis] = slice(g + q - 1, g + q + n)
        return field[tuple(idx)]

    if side == "left":
        views = [shifted(q) for q in (-2, -1, 0, 1, 2)]
    else:
        views = [shifted(q) for q in (3, 2, 1, 0, -1)]
    return _reconstruct5(*views, params.epsilon, params.power)
