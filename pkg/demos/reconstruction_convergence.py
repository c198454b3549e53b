"""Measure the convergence order of the convective right-hand side.

A density wave rho = 1 + 0.3 sin(x) rides a uniform wind, so every flux
divergence has a closed form. Sweeping the grid shows the combined
reconstruction + upwinding + conservative-difference chain converging at
fifth order, while the raw interface values only track the de-averaged flux
function to second order: the scheme is built to difference exactly, not to
interpolate point values.
"""

import numpy as np

import hitdns as hd

GAMMA = 1.4
WIND = 0.7
AMP = 0.3


def advected_density_error(n: int) -> float:
    spec = hd.GridSpec(n=(n, n, n))
    c = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    z, y, x = np.meshgrid(c, c, c, indexing="ij")
    rho = 1.0 + AMP * np.sin(x)

    fs = hd.FieldSet.zeros(spec)
    it = fs.interior()
    it[0] = rho
    it[1] = rho * WIND
    it[4] = 1.0 / (GAMMA - 1.0) + 0.5 * rho * WIND * WIND
    hd.fill_ghosts_periodic(fs)

    inc = hd.hyperbolic_rhs(fs, hd.GasModel()).interior()
    drho = AMP * np.cos(x)
    want = np.zeros_like(inc)
    want[0] = -WIND * drho
    want[1] = -WIND * WIND * drho
    want[4] = -0.5 * WIND**3 * drho
    return float(np.max(np.abs(inc - want)))


def main():
    sizes = [16, 32, 64, 128]
    errs = [advected_density_error(n) for n in sizes]
    print("n      Linf error      observed order")
    prev = None
    for n, err in zip(sizes, errs):
        order = "" if prev is None else f"{np.log2(prev / err):14.2f}"
        print(f"{n:<6d} {err:.6e} {order}")
        prev = err

    # the interface values themselves converge only at second order to the
    # point values of the flux, by design
    n = 64
    spec = hd.GridSpec(n=(n, n, n))
    c = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    z, y, x = np.meshgrid(c, c, c, indexing="ij")
    fs = hd.FieldSet.zeros(spec)
    fs.interior()[0] = 1.5 + 0.3 * np.sin(x)
    hd.fill_ghosts_periodic(fs)
    recon = hd.reconstruct_field(fs.var(0), dim=0, side="left")
    xi = (np.arange(-1, n) + 0.5) * spec.spacing[0]
    point_err = np.max(np.abs(recon[0, 0, :] - (1.5 + 0.3 * np.sin(xi))))
    print(f"\ninterface vs point values at n={n}: {point_err:.3e} "
          f"(h^2 scale {spec.spacing[0]**2:.3e})")


if __name__ == "__main__":
    main()
