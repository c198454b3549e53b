"""Synthetic isotropic turbulence: target spectrum, divergence-free velocity
synthesis, shell-binned spectra, and initial-condition assembly.

Target energy spectrum (peak wavenumber k0, velocity scale u0):

    E(k) = 16 sqrt(2/pi) (u0^2 / k0) (k/k0)^4 exp(-2 (k/k0)^2)

integrating to (3/2) u0^2 of kinetic energy per unit mass. The Taylor
microscale convention used throughout is

    lambda = 2 u0 / sqrt(<(du/dx)^2>),   <(du/dx)^2> = (2/15) Int k^2 E dk,

which evaluates to 4/k0 for this spectrum, and the viscosity that realizes a
requested Taylor-microscale Reynolds number is mu = rho0 u0 lambda / Re_lambda.

Synthesis is spectral: seeded complex Gaussian modes, Hermitian
symmetrization, projection onto divergence-free fields, then an exact
per-shell amplitude rescale so the discrete shell spectrum matches E(k)
identically on every populated shell. Shells 0 and >= n/2 are zeroed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import TWO_PI, FieldSet, GridSpec, Layout, convert_layout


@dataclass(frozen=True)
class HitParams:
    """Initial-turbulence parameters."""

    u0: float = 0.3
    k0: float = 4.0
    re_lambda: float = 50.0
    rho0: float = 1.0
    seed: int = 2024

    def __post_init__(self):
        if self.u0 <= 0.0 or self.k0 <= 0.0 or self.re_lambda <= 0.0 or self.rho0 <= 0.0:
            raise ConfigError("u0, k0, re_lambda, rho0 must all be positive")


def target_spectrum(k, u0: float = 0.3, k0: float = 4.0):
    """Model spectrum E(k); accepts scalars or arrays."""
    k = np.asarray(k, dtype=np.float64)
    ratio = k / k0
    return 16.0 * math.sqrt(2.0 / math.pi) * (u0 * u0 / k0) * ratio**4 * np.exp(-2.0 * ratio * ratio)


def gradient_variance(u0: float = 0.3, k0: float = 4.0) -> float:
    """<(du/dx)^2> = (2/15) Int k^2 E(k) dk, closed form for the model spectrum."""
    return (2.0 / 15.0) * (15.0 / 8.0) * u0 * u0 * k0 * k0


def taylor_microscale(u0: float = 0.3, k0: float = 4.0) -> float:
    """lambda = 2 u0 / sqrt(<(du/dx)^2>) = 4 / k0 for the model spectrum."""
    return 2.0 * u0 / math.sqrt(gradient_variance(u0, k0))


def viscosity_from_re_lambda(params: HitParams) -> float:
    """mu = rho0 u0 lambda / Re_lambda."""
    return params.rho0 * params.u0 * taylor_microscale(params.u0, params.k0) / params.re_lambda


def eddy_turnover_time(params: HitParams) -> float:
    """tau = lambda / u0."""
    return taylor_microscale(params.u0, params.k0) / params.u0


def _wavenumbers(n: int):
    """Integer wavenumber grids (z, y, x axis order) and shell indices."""
    kk = np.fft.fftfreq(n, 1.0 / n)
    kz = kk[:, None, None]
    ky = kk[None, :, None]
    kx = kk[None, None, :]
    kmag = np.sqrt(kx * kx + ky * ky + kz * kz)
    shell = np.floor(kmag + 0.5).astype(np.int64)
    return kx, ky, kz, shell


def _require_cubic(shape) -> int:
    nz, ny, nx = shape[-3:]
    if not (nz == ny == nx):
        raise ConfigError(f"spectral routines need a cubic grid, got {shape[-3:]}")
    return nx


def synthesize_velocity(n: int, params: HitParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Divergence-free velocity on an n^3 grid matching the target spectrum.

    Deterministic for a given (n, seed). Returns (u, v, w) in (z, y, x)
    index order.
    """
    if n < 4:
        raise ConfigError(f"need n >= 4 to hold at least one spectral shell, got {n}")
    kx, ky, kz, shell = _wavenumbers(n)
    nmodes = n // 2  # shells 1 .. n/2-1 are populated

    rng = np.random.default_rng(params.seed)
    coeffs = rng.standard_normal((3, n, n, n)) + 1j * rng.standard_normal((3, n, n, n))

    # Hermitian symmetrization: average with the conjugate at the negated
    # wavevector, whose index is (n - m) % n along each axis.
    flipped = np.roll(np.flip(coeffs, axis=(1, 2, 3)), 1, axis=(1, 2, 3))
    coeffs = 0.5 * (coeffs + np.conj(flipped))

    active = (shell >= 1) & (shell < nmodes)
    coeffs *= active

    # Project each mode onto the plane normal to its wavevector.
    k2 = kx * kx + ky * ky + kz * kz
    k2safe = np.where(k2 == 0.0, 1.0, k2)
    kdot = (kx * coeffs[0] + ky * coeffs[1] + kz * coeffs[2]) / k2safe
    coeffs[0] -= kx * kdot
    coeffs[1] -= ky * kdot
    coeffs[2] -= kz * kdot

    # Exact per-shell rescale: sum of 1/2 |c|^2 over shell s must equal
    # E(s) * n^6 (unnormalized transform convention).
    energy = 0.5 * (
        np.abs(coeffs[0]) ** 2 + np.abs(coeffs[1]) ** 2 + np.abs(coeffs[2]) ** 2
    )
    raw = np.bincount(shell.ravel(), weights=energy.ravel(), minlength=nmodes)
    scale = np.zeros(raw.shape[0], dtype=np.float64)
    norm = float(n) ** 6
    for s in range(1, nmodes):
        if raw[s] > 0.0:
            scale[s] = math.sqrt(target_spectrum(float(s), params.u0, params.k0) * norm / raw[s])
    coeffs *= scale[shell]

    u = np.fft.ifftn(coeffs[0]).real
    v = np.fft.ifftn(coeffs[1]).real
    w = np.fft.ifftn(coeffs[2]).real
    return u, v, w


@dataclass
class SpectrumTable:
    """Shell-binned kinetic energy spectrum of a velocity field."""

    k: np.ndarray  # integer shell index, 0 .. max shell
    energy: np.ndarray
    grid_n: int

    @property
    def resolved_max(self) -> int:
        """Largest reliably resolved shell, n/2 - 1."""
        return self.grid_n // 2 - 1

    def total(self) -> float:
        return float(np.sum(self.energy))

    def rows(self):
        """(k, E) pairs over the resolved band 1 <= k <= n/2 - 1."""
        for s in range(1, self.resolved_max + 1):
            yield int(self.k[s]), float(self.energy[s])


def compute_spectrum(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> SpectrumTable:
    """Shell-binned spectrum; summing all bins reproduces mean KE (Parseval)."""
    n = _require_cubic(u.shape)
    norm = float(n) ** 6
    energy = (
        np.abs(np.fft.fftn(u)) ** 2
        + np.abs(np.fft.fftn(v)) ** 2
        + np.abs(np.fft.fftn(w)) ** 2
    ) / (2.0 * norm)
    _, _, _, shell = _wavenumbers(n)
    nbins = int(shell.max()) + 1
    binned = np.bincount(shell.ravel(), weights=energy.ravel(), minlength=nbins)
    return SpectrumTable(k=np.arange(nbins, dtype=np.int64), energy=binned, grid_n=n)


def spectral_divergence(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
    """max_k |k . c_hat(k)| on unit-normalized coefficients c_hat = fft/n^3."""
    n = _require_cubic(u.shape)
    kx, ky, kz, _ = _wavenumbers(n)
    norm = float(n) ** 3
    div = (
        kx * np.fft.fftn(u) + ky * np.fft.fftn(v) + kz * np.fft.fftn(w)
    ) / norm
    return float(np.max(np.abs(div)))


def write_spectrum(path, table: SpectrumTable) -> None:
    """Spectrum file: two columns `k E(k)`, one row per shell 1 <= k <= n/2-1."""
    with open(path, "w") as fh:
        for k, e in table.rows():
            fh.write(f"{k} {e:.17e}\n")


def read_spectrum(path) -> tuple[np.ndarray, np.ndarray]:
    ks, es = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            ks.append(int(a))
            es.append(float(b))
    return np.asarray(ks, dtype=np.int64), np.asarray(es, dtype=np.float64)


def make_initial_condition(
    spec: GridSpec,
    params: HitParams,
    gamma: float = 1.4,
    layout: Layout = Layout.COMPONENT_CONTIGUOUS,
) -> FieldSet:
    """Conserved-variable initial state: synthesized velocity at uniform
    density rho0 and pressure rho0/gamma (unit temperature). Ghosts are left
    zero; callers sync before use."""
    if spec.n[0] != spec.n[1] or spec.n[1] != spec.n[2]:
        raise ConfigError(f"initial condition needs a cubic grid, got n={spec.n}")
    for d in range(3):
        if abs(spec.length[d] - TWO_PI) > 1e-12 * TWO_PI:
            raise ConfigError("initial condition assumes a 2*pi-periodic box")
    u, v, w = synthesize_velocity(spec.n[0], params)
    rho0 = params.rho0
    p0 = rho0 / gamma
    fields = FieldSet.zeros(spec, Layout.COMPONENT_CONTIGUOUS)
    interior = fields.interior()
    interior[0] = rho0
    interior[1] = rho0 * u
    interior[2] = rho0 * v
    interior[3] = rho0 * w
    interior[4] = p0 / (gamma - 1.0) + 0.5 * rho0 * (u * u + v * v + w * w)
    if layout != Layout.COMPONENT_CONTIGUOUS:
        fields = convert_layout(fields, layout)
    return fields
