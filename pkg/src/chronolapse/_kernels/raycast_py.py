"""Pure-numpy ray-cast kernel.

Reference implementation of the render kernel. The Cython backend mirrors
this file's per-pixel arithmetic expression by expression; any change here
must be replicated there so the two stay interchangeable.
"""

import numpy as np

T_EPS = 1e-4          # minimum ray parameter for a valid hit
SHADOW_EPS = 1e-3     # offset along the normal before the occlusion test
PARALLEL_EPS = 1e-12  # |direction| below this counts as slab-parallel
BISECT_ITERS = 16     # heightfield crossing refinement


def _bilinear(grid, ox, oy, cell, x, y):
    """Clamped bilinear heightfield sample for arrays of x, y."""
    rows, cols = grid.shape
    fx = (x - ox) / cell
    fy = (y - oy) / cell
    fx = np.clip(fx, 0.0, cols - 1.0)
    fy = np.clip(fy, 0.0, rows - 1.0)
    ix = np.minimum(fx.astype(np.int64), cols - 2)
    iy = np.minimum(fy.astype(np.int64), rows - 2)
    tx = fx - ix
    ty = fy - iy
    h00 = grid[iy, ix]
    h01 = grid[iy, ix + 1]
    h10 = grid[iy + 1, ix]
    h11 = grid[iy + 1, ix + 1]
    return (h00 * (1 - tx) + h01 * tx) * (1 - ty) \
        + (h10 * (1 - tx) + h11 * tx) * ty


def _bilinear_gradient(grid, ox, oy, cell, x, y):
    """(dh/dx, dh/dy) of the bilinear patch; zero outside the grid extent."""
    rows, cols = grid.shape
    fx_raw = (x - ox) / cell
    fy_raw = (y - oy) / cell
    fx = np.clip(fx_raw, 0.0, cols - 1.0)
    fy = np.clip(fy_raw, 0.0, rows - 1.0)
    ix = np.minimum(fx.astype(np.int64), cols - 2)
    iy = np.minimum(fy.astype(np.int64), rows - 2)
    tx = fx - ix
    ty = fy - iy
    h00 = grid[iy, ix]
    h01 = grid[iy, ix + 1]
    h10 = grid[iy + 1, ix]
    h11 = grid[iy + 1, ix + 1]
    dhdx = ((h01 - h00) * (1 - ty) + (h11 - h10) * ty) / cell
    dhdy = ((h10 - h00) * (1 - tx) + (h11 - h01) * tx) / cell
    dhdx = np.where(fx_raw != fx, 0.0, dhdx)
    dhdy = np.where(fy_raw != fy, 0.0, dhdy)
    return dhdx, dhdy


def _box_interval(box, ox, oy, oz, dx, dy, dz):
    """Slab-test entry/exit parameters, axis priority x, y, z.

    Returns (tnear, tfar, axis) where axis is the slab producing tnear.
    """
    tn = np.full(dx.shape, -np.inf)
    tf = np.full(dx.shape, np.inf)
    axis = np.zeros(dx.shape, dtype=np.int8)
    origin = (ox, oy, oz)
    direc = (dx, dy, dz)
    for a in range(3):
        b0, b1 = box[a], box[a + 3]
        o, d = origin[a], direc[a]
        parallel = np.abs(d) < PARALLEL_EPS
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (b0 - o) / d
            t2 = (b1 - o) / d
        tna = np.minimum(t1, t2)
        tfa = np.maximum(t1, t2)
        inside = (o >= b0) & (o <= b1)
        tna = np.where(parallel, np.where(inside, -np.inf, np.inf), tna)
        tfa = np.where(parallel, np.where(inside, np.inf, -np.inf), tfa)
        newer = tna > tn
        axis = np.where(newer, np.int8(a), axis)
        tn = np.where(newer, tna, tn)
        tf = np.minimum(tf, tfa)
    return tn, tf, axis


def _march_heightfield(grid, hf_ox, hf_oy, cell, tmax,
                       ox, oy, oz, dx, dy, dz):
    """First terrain crossing along each ray, or inf when none.

    Fixed-step march (half a cell) with a fixed-count bisection refine, so
    the scalar backend can reproduce the identical float sequence.
    """
    shape = dx.shape
    ds = 0.5 * cell
    nsteps = int(np.ceil((tmax - T_EPS) / ds))
    hmax = float(grid.max())

    x = ox + T_EPS * dx
    y = oy + T_EPS * dy
    z = oz + T_EPS * dz
    below = z < _bilinear(grid, hf_ox, hf_oy, cell, x, y)
    lo = np.full(shape, T_EPS)
    hi = np.where(below, T_EPS, np.inf)
    found = below.copy()
    alive = ~found
    for k in range(1, nsteps + 1):
        if not alive.any():
            break
        t = T_EPS + k * ds
        x = ox + t * dx
        y = oy + t * dy
        z = oz + t * dz
        h = _bilinear(grid, hf_ox, hf_oy, cell, x, y)
        cross = alive & (z < h)
        lo = np.where(cross, T_EPS + (k - 1) * ds, lo)
        hi = np.where(cross, t, hi)
        found |= cross
        alive &= ~cross
        # rays already above the highest terrain and not descending
        # can never cross later
        alive &= ~((dz >= 0.0) & (z > hmax))

    hi_fin = np.where(found, hi, lo)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi_fin)
        x = ox + mid * dx
        y = oy + mid * dy
        z = oz + mid * dz
        h = _bilinear(grid, hf_ox, hf_oy, cell, x, y)
        below_m = found & (z < h)
        hi_fin = np.where(below_m, mid, hi_fin)
        lo = np.where(found & ~below_m, mid, lo)
    t_hit = 0.5 * (lo + hi_fin)
    return np.where(found, t_hit, np.inf)


def render_linear(origin, right, up, fwd, tan_half_h, tan_half_v,
                  width, height, ground_albedo, hf_grid, hf_ox, hf_oy,
                  hf_cell, hf_tmax, boxes, sun_dir, light_rgb,
                  sky_zen, sky_glow, haze, shadows):
    """Linear-light RGB image of the scene, shape (height, width, 3).

    hf_grid None selects the flat ground plane z=0; otherwise the
    heightfield. boxes is (N, 9): min xyz, max xyz, albedo rgb.
    """
    W, H = int(width), int(height)
    ox, oy, oz = (float(origin[0]), float(origin[1]), float(origin[2]))
    sxj = 2.0 * ((np.arange(W) + 0.5) / W - 0.5) * tan_half_h
    syi = 2.0 * (0.5 - (np.arange(H) + 0.5) / H) * tan_half_v
    SX, SY = np.meshgrid(sxj, syi)
    dx = fwd[0] + right[0] * SX + up[0] * SY
    dy = fwd[1] + right[1] * SX + up[1] * SY
    dz = fwd[2] + right[2] * SX + up[2] * SY
    norm = np.sqrt(dx * dx + dy * dy + dz * dz)
    dx = dx / norm
    dy = dy / norm
    dz = dz / norm

    best_t = np.full((H, W), np.inf)
    alb_r = np.zeros((H, W))
    alb_g = np.zeros((H, W))
    alb_b = np.zeros((H, W))
    nx = np.zeros((H, W))
    ny = np.zeros((H, W))
    nz = np.zeros((H, W))

    if hf_grid is None:
        with np.errstate(divide="ignore", invalid="ignore"):
            tg = np.where(dz != 0.0, -oz / dz, np.inf)
        hit_g = (tg > T_EPS) & (tg < best_t)
        best_t = np.where(hit_g, tg, best_t)
        alb_r = np.where(hit_g, ground_albedo, alb_r)
        alb_g = np.where(hit_g, ground_albedo, alb_g)
        alb_b = np.where(hit_g, ground_albedo, alb_b)
        nz = np.where(hit_g, 1.0, nz)
    else:
        grid = np.ascontiguousarray(hf_grid, dtype=np.float64)
        tg = _march_heightfield(grid, hf_ox, hf_oy, hf_cell, hf_tmax,
                                ox, oy, oz, dx, dy, dz)
        hit_g = np.isfinite(tg) & (tg < best_t)
        tgf = np.where(hit_g, tg, 0.0)
        px = ox + tgf * dx
        py = oy + tgf * dy
        dhdx, dhdy = _bilinear_gradient(grid, hf_ox, hf_oy, hf_cell, px, py)
        gn = np.sqrt(dhdx * dhdx + dhdy * dhdy + 1.0)
        best_t = np.where(hit_g, tg, best_t)
        alb_r = np.where(hit_g, ground_albedo, alb_r)
        alb_g = np.where(hit_g, ground_albedo, alb_g)
        alb_b = np.where(hit_g, ground_albedo, alb_b)
        nx = np.where(hit_g, -dhdx / gn, nx)
        ny = np.where(hit_g, -dhdy / gn, ny)
        nz = np.where(hit_g, 1.0 / gn, nz)

    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 9)
    for box in boxes:
        tn, tf, axis = _box_interval(box, ox, oy, oz, dx, dy, dz)
        hit = (tn > T_EPS) & (tn <= tf) & (tn < best_t)
        if not hit.any():
            continue
        best_t = np.where(hit, tn, best_t)
        alb_r = np.where(hit, box[6], alb_r)
        alb_g = np.where(hit, box[7], alb_g)
        alb_b = np.where(hit, box[8], alb_b)
        sign_x = np.where(dx > 0.0, -1.0, 1.0)
        sign_y = np.where(dy > 0.0, -1.0, 1.0)
        sign_z = np.where(dz > 0.0, -1.0, 1.0)
        nx = np.where(hit, np.where(axis == 0, sign_x, 0.0), nx)
        ny = np.where(hit, np.where(axis == 1, sign_y, 0.0), ny)
        nz = np.where(hit, np.where(axis == 2, sign_z, 0.0), nz)

    hit_any = np.isfinite(best_t)
    sx_, sy_, sz_ = float(sun_dir[0]), float(sun_dir[1]), float(sun_dir[2])
    lamb = nx * sx_ + ny * sy_ + nz * sz_
    lamb = np.where(lamb < 0.0, 0.0, lamb)

    vis = np.ones((H, W))
    if shadows and boxes.shape[0] > 0:
        need = hit_any & (lamb > 0.0)
        if need.any():
            t_fin = np.where(hit_any, best_t, 0.0)
            px = ox + t_fin * dx + nx * SHADOW_EPS
            py = oy + t_fin * dy + ny * SHADOW_EPS
            pz = oz + t_fin * dz + nz * SHADOW_EPS
            sdx = np.full((H, W), sx_)
            sdy = np.full((H, W), sy_)
            sdz = np.full((H, W), sz_)
            occluded = np.zeros((H, W), dtype=bool)
            for box in boxes:
                tn, tf, _ = _box_interval(box, px, py, pz, sdx, sdy, sdz)
                occluded |= (tn > T_EPS) & (tn <= tf)
            vis = np.where(need & occluded, 0.0, vis)

    out = np.zeros((H, W, 3))
    shade = lamb * vis
    out[..., 0] = alb_r * (light_rgb[0] * shade)
    out[..., 1] = alb_g * (light_rgb[1] * shade)
    out[..., 2] = alb_b * (light_rgb[2] * shade)

    m = np.clip(dz, 0.0, 1.0)
    s = haze * (1.0 - m)
    sky_r = (1.0 - s) * sky_zen[0] + s * sky_glow[0]
    sky_g = (1.0 - s) * sky_zen[1] + s * sky_glow[1]
    sky_b = (1.0 - s) * sky_zen[2] + s * sky_glow[2]
    out[..., 0] = np.where(hit_any, out[..., 0], sky_r)
    out[..., 1] = np.where(hit_any, out[..., 1], sky_g)
    out[..., 2] = np.where(hit_any, out[..., 2], sky_b)
    return out
