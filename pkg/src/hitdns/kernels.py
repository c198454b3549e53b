"""Compiled (numba) inner loops: flux sweeps, central derivatives, benchmark kernels.

These kernels operate on the flat COMPONENT_CONTIGUOUS buffers described in
``grid``: variable v of point p lives at v * total_points + p, and a point's
(i, j, k) coordinates map to p = k*sz + j*sy + i*sx with sx = 1.  Direction
generic code receives the strides, so one sweep body serves x, y, and z.

Everything is compiled without fastmath: operation order matches the numpy
reference implementations in ``weno``/``upwind`` exactly, which keeps kernel
output reproducible and lets the layout benchmark assert bitwise equality
across traversals.  All kernels release the GIL so in-process ranks and slab
workers can overlap.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .weno import C_1_3, C_1_6, C_5_6, C_7_6, C_11_6, C_13_12

NVARS = 5


@njit(cache=True, inline="always")
def _recon5(f0, f1, f2, f3, f4, eps, power):
    # smoothness indicators
    t1 = f0 - 2.0 * f1 + f2
    s1 = f0 - 4.0 * f1 + 3.0 * f2
    b1 = C_13_12 * (t1 * t1) + 0.25 * (s1 * s1)
    t2 = f1 - 2.0 * f2 + f3
    s2 = f1 - f3
    b2 = C_13_12 * (t2 * t2) + 0.25 * (s2 * s2)
    t3 = f2 - 2.0 * f3 + f4
    s3 = 3.0 * f2 - 4.0 * f3 + f4
    b3 = C_13_12 * (t3 * t3) + 0.25 * (s3 * s3)
    # nonlinear weights
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
    w1 = a1 / asum
    w2 = a2 / asum
    w3 = a3 / asum
    # candidate values
    c1 = C_1_3 * f0 - C_7_6 * f1 + C_11_6 * f2
    c2 = -C_1_6 * f1 + C_5_6 * f2 + C_1_3 * f3
    c3 = C_1_3 * f2 + C_5_6 * f3 - C_1_6 * f4
    return w1 * c1 + w2 * c2 + w3 * c3


@njit(cache=True, inline="always")
def _entropy_fixed(lam, delta):
    mag = abs(lam)
    if delta > 0.0 and mag < delta:
        return (lam * lam + delta * delta) / (2.0 * delta)
    return mag


@njit(cache=True, nogil=True)
def hyper_sweep(
    u, f, inc, npts,
    base0, sd, sa, sb, nd, nb, a_lo, a_hi,
    dim, inv_dx, gamma, eps, power, delta,
):
    """Accumulate -d(flux)/dx of one dimension into ``inc`` for a slab of lines.

    u, f, inc: flat component-contiguous buffers (5 * npts).  Lines run along
    the stride-sd dimension; the transverse loops cover [a_lo, a_hi) x [0, nb)
    with strides sa, sb from the interior origin offset base0.  Each line is
    swept once, carrying the previous interface flux so every interface is
    evaluated exactly once.
    """
    gm1 = gamma - 1.0
    mn = 1 + dim
    mt1 = 1 + (dim + 1) % 3
    mt2 = 1 + (dim + 2) % 3
    o0 = 0
    o1 = npts
    o2 = 2 * npts
    o3 = 3 * npts
    o4 = 4 * npts

    uL = np.empty(NVARS)
    uR = np.empty(NVARS)
    flux = np.empty(NVARS)
    fprev = np.empty(NVARS)

    for ia in range(a_lo, a_hi):
        for ib in range(nb):
            base = base0 + ia * sa + ib * sb
            for m in range(-1, nd):
                c = base + m * sd
                # left-biased stencil: points m-2 .. m+2
                # right-biased: reversed stencil of points m-1 .. m+3
                i0 = c - 2 * sd
                i1 = c - sd
                i2 = c
                i3 = c + sd
                i4 = c + 2 * sd
                i5 = c + 3 * sd
                for v in range(NVARS):
                    o = v * npts
                    uL[v] = _recon5(u[o + i0], u[o + i1], u[o + i2], u[o + i3], u[o + i4], eps, power)
                    uR[v] = _recon5(u[o + i5], u[o + i4], u[o + i3], u[o + i2], u[o + i1], eps, power)
                fl0 = _recon5(f[o0 + i0], f[o0 + i1], f[o0 + i2], f[o0 + i3], f[o0 + i4], eps, power)
                fl1 = _recon5(f[o1 + i0], f[o1 + i1], f[o1 + i2], f[o1 + i3], f[o1 + i4], eps, power)
                fl2 = _recon5(f[o2 + i0], f[o2 + i1], f[o2 + i2], f[o2 + i3], f[o2 + i4], eps, power)
                fl3 = _recon5(f[o3 + i0], f[o3 + i1], f[o3 + i2], f[o3 + i3], f[o3 + i4], eps, power)
                fl4 = _recon5(f[o4 + i0], f[o4 + i1], f[o4 + i2], f[o4 + i3], f[o4 + i4], eps, power)
                fr0 = _recon5(f[o0 + i5], f[o0 + i4], f[o0 + i3], f[o0 + i2], f[o0 + i1], eps, power)
                fr1 = _recon5(f[o1 + i5], f[o1 + i4], f[o1 + i3], f[o1 + i2], f[o1 + i1], eps, power)
                fr2 = _recon5(f[o2 + i5], f[o2 + i4], f[o2 + i3], f[o2 + i2], f[o2 + i1], eps, power)
                fr3 = _recon5(f[o3 + i5], f[o3 + i4], f[o3 + i3], f[o3 + i2], f[o3 + i1], eps, power)
                fr4 = _recon5(f[o4 + i5], f[o4 + i4], f[o4 + i3], f[o4 + i2], f[o4 + i1], eps, power)

                # decode the reconstructed interface states
                rl = uL[0]
                il = 1.0 / rl
                vxl = uL[1] * il
                vyl = uL[2] * il
                vzl = uL[3] * il
                pl = gm1 * (uL[4] - 0.5 * rl * (vxl * vxl + vyl * vyl + vzl * vzl))
                rr = uR[0]
                ir = 1.0 / rr
                vxr = uR[1] * ir
                vyr = uR[2] * ir
                vzr = uR[3] * ir
                pr = gm1 * (uR[4] - 0.5 * rr * (vxr * vxr + vyr * vyr + vzr * vzr))

                # density-weighted average state
                sl = np.sqrt(rl)
                sr = np.sqrt(rr)
                isw = 1.0 / (sl + sr)
                ua = (sl * vxl + sr * vxr) * isw
                va = (sl * vyl + sr * vyr) * isw
                wa = (sl * vzl + sr * vzr) * isw
                Hl = (uL[4] + pl) * il
                Hr = (uR[4] + pr) * ir
                Ha = (sl * Hl + sr * Hr) * isw
                q2 = ua * ua + va * va + wa * wa
                a2 = gm1 * (Ha - 0.5 * q2)
                aa = np.sqrt(a2)

                if dim == 0:
                    vn, vt1, vt2 = ua, va, wa
                elif dim == 1:
                    vn, vt1, vt2 = va, wa, ua
                else:
                    vn, vt1, vt2 = wa, ua, va

                # characteristic strengths of the jump (rows of Xinv times du)
                dr = uR[0] - uL[0]
                dmn = uR[mn] - uL[mn]
                dt1 = uR[mt1] - uL[mt1]
                dt2 = uR[mt2] - uL[mt2]
                dE = uR[4] - uL[4]
                b1 = gm1 / a2
                b2 = 0.5 * b1 * q2
                ia_ = 1.0 / aa
                s1 = 0.5 * ((b2 + vn * ia_) * dr - (b1 * vn + ia_) * dmn - b1 * vt1 * dt1 - b1 * vt2 * dt2 + b1 * dE)
                s2 = (1.0 - b2) * dr + b1 * vn * dmn + b1 * vt1 * dt1 + b1 * vt2 * dt2 - b1 * dE
                s3 = -vt1 * dr + dt1
                s4 = -vt2 * dr + dt2
                s5 = 0.5 * ((b2 - vn * ia_) * dr - (b1 * vn - ia_) * dmn - b1 * vt1 * dt1 - b1 * vt2 * dt2 + b1 * dE)

                k1 = _entropy_fixed(vn - aa, delta) * s1
                k2 = _entropy_fixed(vn, delta) * s2
                k3 = _entropy_fixed(vn, delta) * s3
                k4 = _entropy_fixed(vn, delta) * s4
                k5 = _entropy_fixed(vn + aa, delta) * s5

                # dissipation = X |Lambda| Xinv du, assembled column by column
                diss_r = k1 + k2 + k5
                diss_n = k1 * (vn - aa) + k2 * vn + k5 * (vn + aa)
                diss_1 = k1 * vt1 + k2 * vt1 + k3 + k5 * vt1
                diss_2 = k1 * vt2 + k2 * vt2 + k4 + k5 * vt2
                diss_E = k1 * (Ha - vn * aa) + k2 * (0.5 * q2) + k3 * vt1 + k4 * vt2 + k5 * (Ha + vn * aa)

                flux[0] = 0.5 * (fl0 + fr0) - 0.5 * diss_r
                flux[1] = 0.5 * (fl1 + fr1)
                flux[2] = 0.5 * (fl2 + fr2)
                flux[3] = 0.5 * (fl3 + fr3)
                flux[4] = 0.5 * (fl4 + fr4) - 0.5 * diss_E
                flux[mn] -= 0.5 * diss_n
                flux[mt1] -= 0.5 * diss_1
                flux[mt2] -= 0.5 * diss_2

                if m >= 0:
                    inc[o0 + c] -= (flux[0] - fprev[0]) * inv_dx
                    inc[o1 + c] -= (flux[1] - fprev[1]) * inv_dx
                    inc[o2 + c] -= (flux[2] - fprev[2]) * inv_dx
                    inc[o3 + c] -= (flux[3] - fprev[3]) * inv_dx
                    inc[o4 + c] -= (flux[4] - fprev[4]) * inv_dx
                for v in range(NVARS):
                    fprev[v] = flux[v]


@njit(cache=True, nogil=True)
def central_diff4(src, dst, di, dj, dk, g, og, nx, ny, nz, k_lo, k_hi, coef):
    """Fourth-order central derivative of a ghosted (z, y, x) array.

    Writes dst[og+k, og+j, og+i] for interior (i, j, k) with k in [k_lo, k_hi);
    (di, dj, dk) is the unit offset of the differentiated dimension and
    coef = 1 / (12 * spacing).
    """
    for k in range(k_lo, k_hi):
        zc = g + k
        for j in range(ny):
            yc = g + j
            for i in range(nx):
                xc = g + i
                val = (
                    -src[zc + 2 * dk, yc + 2 * dj, xc + 2 * di]
                    + 8.0 * src[zc + dk, yc + dj, xc + di]
                    - 8.0 * src[zc - dk, yc - dj, xc - di]
                    + src[zc - 2 * dk, yc - 2 * dj, xc - 2 * di]
                ) * coef
                dst[og + k, og + j, og + i] = val


# ---- layout/traversal benchmark kernels --------------------------------------
#
# The benchmark field has an x pad of 2 on each side so the 5-point stencil
# never branches; points are indexed over the padded extent.  layout_flag 0
# stores the 5 variables of a point adjacently (offset 5p + v), flag 1 stores
# each variable contiguously (offset v * npts + p).  Both kernels write the
# three weights of every variable to the same point-major slots, so outputs
# are directly comparable across every layout/traversal combination.


@njit(cache=True, inline="always")
def _weights3(f0, f1, f2, f3, f4, eps, power):
    t1 = f0 - 2.0 * f1 + f2
    s1 = f0 - 4.0 * f1 + 3.0 * f2
    b1 = C_13_12 * (t1 * t1) + 0.25 * (s1 * s1)
    t2 = f1 - 2.0 * f2 + f3
    s2 = f1 - f3
    b2 = C_13_12 * (t2 * t2) + 0.25 * (s2 * s2)
    t3 = f2 - 2.0 * f3 + f4
    s3 = 3.0 * f2 - 4.0 * f3 + f4
    b3 = C_13_12 * (t3 * t3) + 0.25 * (s3 * s3)
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


@njit(cache=True, inline="always")
def _bench_point(data, layout_flag, npts, p, sx, eps, power, out):
    for v in range(NVARS):
        if layout_flag == 0:
            b = NVARS * p + v
            f0 = data[b - 2 * NVARS * sx]
            f1 = data[b - NVARS * sx]
            f2 = data[b]
            f3 = data[b + NVARS * sx]
            f4 = data[b + 2 * NVARS * sx]
        else:
            b = v * npts + p
            f0 = data[b - 2 * sx]
            f1 = data[b - sx]
            f2 = data[b]
            f3 = data[b + sx]
            f4 = data[b + 2 * sx]
        w1, w2, w3 = _weights3(f0, f1, f2, f3, f4, eps, power)
        o = 3 * (NVARS * p + v)
        out[o] = w1
        out[o + 1] = w2
        out[o + 2] = w3


@njit(cache=True, nogil=True)
def bench_weights_lex(data, layout_flag, nx, ny, nz, pad, eps, power, out):
    """Weight kernel over all active points in plain lexicographic order."""
    px = nx + 2 * pad
    npts = px * ny * nz
    for k in range(nz):
        for j in range(ny):
            row = (k * ny + j) * px + pad
            for i in range(nx):
                _bench_point(data, layout_flag, npts, row + i, 1, eps, power, out)
    return 0


@njit(cache=True, nogil=True)
def bench_weights_tiled(data, layout_flag, nx, ny, nz, pad, tx, ty, eps, power, out):
    """Weight kernel traversing (x, y) tiles of shape (tx, ty) per z plane.

    Tiles cover the active extent; lanes falling outside it are wasted
    iterations (they do no work but are still visited), mirroring how a
    fixed-shape thread block overhangs a grid that is not a multiple of the
    tile.  Returns the wasted-lane count.
    """
    px = nx + 2 * pad
    npts = px * ny * nz
    tiles_x = (nx + tx - 1) // tx
    tiles_y = (ny + ty - 1) // ty
    wasted = 0
    for k in range(nz):
        for tj in range(tiles_y):
            for ti in range(tiles_x):
                for jj in range(ty):
                    j = tj * ty + jj
                    for ii in range(tx):
                        i = ti * tx + ii
                        if i >= nx or j >= ny:
                            wasted += 1
                            continue
                        p = (k * ny + j) * px + pad + i
                        _bench_point(data, layout_flag, npts, p, 1, eps, power, out)
    return wasted
