# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled ray-cast kernel.

Mirrors raycast_py.py expression for expression; the two backends must stay
interchangeable. Keep any change in lockstep with the numpy fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, ceil, fabs, sqrt

cnp.import_array()

cdef double T_EPS = 1e-4
cdef double SHADOW_EPS = 1e-3
cdef double PARALLEL_EPS = 1e-12
cdef int BISECT_ITERS = 16


cdef inline double _clip(double v, double lo, double hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef inline double _bilinear(const double[:, ::1] grid, double ox, double oy,
                             double cell, double x, double y) nogil:
    cdef Py_ssize_t rows = grid.shape[0]
    cdef Py_ssize_t cols = grid.shape[1]
    cdef double fx = _clip((x - ox) / cell, 0.0, cols - 1.0)
    cdef double fy = _clip((y - oy) / cell, 0.0, rows - 1.0)
    cdef Py_ssize_t ix = <Py_ssize_t>fx
    cdef Py_ssize_t iy = <Py_ssize_t>fy
    if ix > cols - 2:
        ix = cols - 2
    if iy > rows - 2:
        iy = rows - 2
    cdef double tx = fx - ix
    cdef double ty = fy - iy
    cdef double h00 = grid[iy, ix]
    cdef double h01 = grid[iy, ix + 1]
    cdef double h10 = grid[iy + 1, ix]
    cdef double h11 = grid[iy + 1, ix + 1]
    return (h00 * (1 - tx) + h01 * tx) * (1 - ty) \
        + (h10 * (1 - tx) + h11 * tx) * ty


cdef inline void _bilinear_gradient(const double[:, ::1] grid, double ox,
                                    double oy, double cell, double x,
                                    double y, double *dhdx,
                                    double *dhdy) nogil:
    cdef Py_ssize_t rows = grid.shape[0]
    cdef Py_ssize_t cols = grid.shape[1]
    cdef double fx_raw = (x - ox) / cell
    cdef double fy_raw = (y - oy) / cell
    cdef double fx = _clip(fx_raw, 0.0, cols - 1.0)
    cdef double fy = _clip(fy_raw, 0.0, rows - 1.0)
    cdef Py_ssize_t ix = <Py_ssize_t>fx
    cdef Py_ssize_t iy = <Py_ssize_t>fy
    if ix > cols - 2:
        ix = cols - 2
    if iy > rows - 2:
        iy = rows - 2
    cdef double tx = fx - ix
    cdef double ty = fy - iy
    cdef double h00 = grid[iy, ix]
    cdef double h01 = grid[iy, ix + 1]
    cdef double h10 = grid[iy + 1, ix]
    cdef double h11 = grid[iy + 1, ix + 1]
    dhdx[0] = ((h01 - h00) * (1 - ty) + (h11 - h10) * ty) / cell
    dhdy[0] = ((h10 - h00) * (1 - tx) + (h11 - h01) * tx) / cell
    if fx_raw != fx:
        dhdx[0] = 0.0
    if fy_raw != fy:
        dhdy[0] = 0.0


cdef inline bint _box_interval(const double[:, ::1] boxes, Py_ssize_t b,
                               double ox, double oy, double oz,
                               double dx, double dy, double dz,
                               double *tn_out, double *tf_out,
                               int *axis_out) nogil:
    cdef double tn = -INFINITY
    cdef double tf = INFINITY
    cdef int axis = 0
    cdef int a
    cdef double o, d, b0, b1, t1, t2, tna, tfa, tmp
    for a in range(3):
        b0 = boxes[b, a]
        b1 = boxes[b, a + 3]
        if a == 0:
            o = ox
            d = dx
        elif a == 1:
            o = oy
            d = dy
        else:
            o = oz
            d = dz
        if fabs(d) < PARALLEL_EPS:
            if o >= b0 and o <= b1:
                tna = -INFINITY
                tfa = INFINITY
            else:
                tna = INFINITY
                tfa = -INFINITY
        else:
            t1 = (b0 - o) / d
            t2 = (b1 - o) / d
            if t1 < t2:
                tna = t1
                tfa = t2
            else:
                tna = t2
                tfa = t1
        if tna > tn:
            tn = tna
            axis = a
        if tfa < tf:
            tf = tfa
    tn_out[0] = tn
    tf_out[0] = tf
    axis_out[0] = axis
    return tn > T_EPS and tn <= tf


def render_linear(origin, right, up, fwd, tan_half_h, tan_half_v,
                  width, height, ground_albedo, hf_grid, hf_ox, hf_oy,
                  hf_cell, hf_tmax, boxes, sun_dir, light_rgb,
                  sky_zen, sky_glow, haze, shadows):
    """Linear-light RGB image, same contract as the numpy backend."""
    cdef int W = int(width)
    cdef int H = int(height)
    cdef double ox = float(origin[0])
    cdef double oy = float(origin[1])
    cdef double oz = float(origin[2])
    cdef double r0 = float(right[0]), r1 = float(right[1]), r2 = float(right[2])
    cdef double u0 = float(up[0]), u1 = float(up[1]), u2 = float(up[2])
    cdef double f0 = float(fwd[0]), f1 = float(fwd[1]), f2 = float(fwd[2])
    cdef double thh = float(tan_half_h)
    cdef double thv = float(tan_half_v)
    cdef double g_alb = float(ground_albedo)
    cdef double sun_x = float(sun_dir[0])
    cdef double sun_y = float(sun_dir[1])
    cdef double sun_z = float(sun_dir[2])
    cdef double lr = float(light_rgb[0])
    cdef double lg = float(light_rgb[1])
    cdef double lb = float(light_rgb[2])
    cdef double zr = float(sky_zen[0]), zg = float(sky_zen[1]), zb = float(sky_zen[2])
    cdef double wr = float(sky_glow[0]), wg = float(sky_glow[1]), wb = float(sky_glow[2])
    cdef double hz = float(haze)
    cdef bint shad = bool(shadows)

    cdef bint has_hf = hf_grid is not None
    cdef double[:, ::1] grid
    cdef double hox = 0.0, hoy = 0.0, cell = 1.0, tmax = 0.0, hmax = 0.0, ds = 0.0
    cdef int nsteps = 0
    if has_hf:
        grid_arr = np.ascontiguousarray(hf_grid, dtype=np.float64)
        grid = grid_arr
        hox = float(hf_ox)
        hoy = float(hf_oy)
        cell = float(hf_cell)
        tmax = float(hf_tmax)
        hmax = float(grid_arr.max())
        ds = 0.5 * cell
        nsteps = int(ceil((tmax - T_EPS) / ds))
    else:
        grid = np.zeros((2, 2))

    boxes_arr = np.ascontiguousarray(
        np.asarray(boxes, dtype=np.float64).reshape(-1, 9))
    cdef double[:, ::1] bx = boxes_arr
    cdef Py_ssize_t nbox = bx.shape[0]

    out_arr = np.zeros((H, W, 3))
    cdef double[:, :, ::1] out = out_arr

    cdef int i, j, k, a, it, axis, baxis
    cdef Py_ssize_t b
    cdef double sx, sy, dx, dy, dz, norm
    cdef double best_t, ar, ag, ab, nx, ny, nz
    cdef double tg, tn, tf, lamb, vis, shade
    cdef double x, y, z, h, lo, hi, mid, t, px, py, pz
    cdef double dhdx, dhdy, gn
    cdef double m, s
    cdef bint found, below, hit, occluded

    with nogil:
        for i in range(H):
            sy = 2.0 * (0.5 - (i + 0.5) / H) * thv
            for j in range(W):
                sx = 2.0 * ((j + 0.5) / W - 0.5) * thh
                dx = f0 + r0 * sx + u0 * sy
                dy = f1 + r1 * sx + u1 * sy
                dz = f2 + r2 * sx + u2 * sy
                norm = sqrt(dx * dx + dy * dy + dz * dz)
                dx = dx / norm
                dy = dy / norm
                dz = dz / norm

                best_t = INFINITY
                ar = 0.0
                ag = 0.0
                ab = 0.0
                nx = 0.0
                ny = 0.0
                nz = 0.0

                if not has_hf:
                    if dz != 0.0:
                        tg = -oz / dz
                        if tg > T_EPS and tg < best_t:
                            best_t = tg
                            ar = g_alb
                            ag = g_alb
                            ab = g_alb
                            nx = 0.0
                            ny = 0.0
                            nz = 1.0
                else:
                    found = False
                    lo = T_EPS
                    hi = T_EPS
                    x = ox + T_EPS * dx
                    y = oy + T_EPS * dy
                    z = oz + T_EPS * dz
                    if z < _bilinear(grid, hox, hoy, cell, x, y):
                        found = True
                    else:
                        for k in range(1, nsteps + 1):
                            t = T_EPS + k * ds
                            x = ox + t * dx
                            y = oy + t * dy
                            z = oz + t * dz
                            h = _bilinear(grid, hox, hoy, cell, x, y)
                            if z < h:
                                lo = T_EPS + (k - 1) * ds
                                hi = t
                                found = True
                                break
                            if dz >= 0.0 and z > hmax:
                                break
                    if found:
                        for it in range(BISECT_ITERS):
                            mid = 0.5 * (lo + hi)
                            x = ox + mid * dx
                            y = oy + mid * dy
                            z = oz + mid * dz
                            h = _bilinear(grid, hox, hoy, cell, x, y)
                            if z < h:
                                hi = mid
                            else:
                                lo = mid
                        tg = 0.5 * (lo + hi)
                        if tg < best_t:
                            px = ox + tg * dx
                            py = oy + tg * dy
                            _bilinear_gradient(grid, hox, hoy, cell, px, py,
                                               &dhdx, &dhdy)
                            gn = sqrt(dhdx * dhdx + dhdy * dhdy + 1.0)
                            best_t = tg
                            ar = g_alb
                            ag = g_alb
                            ab = g_alb
                            nx = -dhdx / gn
                            ny = -dhdy / gn
                            nz = 1.0 / gn

                for b in range(nbox):
                    hit = _box_interval(bx, b, ox, oy, oz, dx, dy, dz,
                                        &tn, &tf, &baxis)
                    if hit and tn < best_t:
                        best_t = tn
                        ar = bx[b, 6]
                        ag = bx[b, 7]
                        ab = bx[b, 8]
                        if baxis == 0:
                            nx = -1.0 if dx > 0.0 else 1.0
                            ny = 0.0
                            nz = 0.0
                        elif baxis == 1:
                            nx = 0.0
                            ny = -1.0 if dy > 0.0 else 1.0
                            nz = 0.0
                        else:
                            nx = 0.0
                            ny = 0.0
                            nz = -1.0 if dz > 0.0 else 1.0

                if best_t < INFINITY:
                    lamb = nx * sun_x + ny * sun_y + nz * sun_z
                    if lamb < 0.0:
                        lamb = 0.0
                    vis = 1.0
                    if shad and nbox > 0 and lamb > 0.0:
                        px = ox + best_t * dx + nx * SHADOW_EPS
                        py = oy + best_t * dy + ny * SHADOW_EPS
                        pz = oz + best_t * dz + nz * SHADOW_EPS
                        occluded = False
                        for b in range(nbox):
                            if _box_interval(bx, b, px, py, pz,
                                             sun_x, sun_y, sun_z,
                                             &tn, &tf, &baxis):
                                occluded = True
                                break
                        if occluded:
                            vis = 0.0
                    shade = lamb * vis
                    out[i, j, 0] = ar * (lr * shade)
                    out[i, j, 1] = ag * (lg * shade)
                    out[i, j, 2] = ab * (lb * shade)
                else:
                    m = _clip(dz, 0.0, 1.0)
                    s = hz * (1.0 - m)
                    out[i, j, 0] = (1.0 - s) * zr + s * wr
                    out[i, j, 1] = (1.0 - s) * zg + s * wg
                    out[i, j, 2] = (1.0 - s) * zb + s * wb

    return out_arr
