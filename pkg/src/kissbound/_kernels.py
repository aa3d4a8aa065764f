"""Vectorized numpy kernels behind the certifier and the property tests.

These mirror the scalar formulas in `caps` exactly (same expressions, same
evaluation order) so that scalar and vector paths produce identical IEEE
results.  Invalid spherical-triangle configurations are handled in the
direction that keeps box bounds sound: angle upper bounds degrade to pi,
area lower bounds degrade to NaN, which the box bound turns into +inf.
"""

from __future__ import annotations

import math

import numpy as np

from .caps import RhoGeometry

ANGLE_GUARD = 1e-9

PI = math.pi
TWO_PI = 2.0 * math.pi


def _angle_arg(cos_opp, cos_s2, cos_s3, sin_s2, sin_s3):
    return (cos_opp - cos_s2 * cos_s3) / (sin_s2 * sin_s3)


def triangle_angles_vec(x, y, z):
    """Vertex angles of the tangent-cap triangle with radii (x, y, z).

    Arguments are clipped into [-1, 1]; entries whose raw argument lies
    beyond the guard are reported through the validity mask (second return
    value) instead of being silently repaired.
    """
    cos_yz, sin_yz = np.cos(y + z), np.sin(y + z)
    cos_xz, sin_xz = np.cos(x + z), np.sin(x + z)
    cos_xy, sin_xy = np.cos(x + y), np.sin(x + y)
    arg_x = _angle_arg(cos_yz, cos_xz, cos_xy, sin_xz, sin_xy)
    arg_y = _angle_arg(cos_xz, cos_xy, cos_yz, sin_xy, sin_yz)
    arg_z = _angle_arg(cos_xy, cos_xz, cos_yz, sin_xz, sin_yz)
    valid = (
        (np.abs(arg_x) <= 1.0 + ANGLE_GUARD)
        & (np.abs(arg_y) <= 1.0 + ANGLE_GUARD)
        & (np.abs(arg_z) <= 1.0 + ANGLE_GUARD)
    )
    ax = np.arccos(np.clip(arg_x, -1.0, 1.0))
    ay = np.arccos(np.clip(arg_y, -1.0, 1.0))
    az = np.arccos(np.clip(arg_z, -1.0, 1.0))
    return (ax, ay, az), valid


def triangle_excess_vec(x, y, z):
    """Angular excess (triangle area); NaN where the geometry is invalid."""
    (ax, ay, az), valid = triangle_angles_vec(x, y, z)
    excess = ax + ay + az - PI
    return np.where(valid, excess, np.nan)


def K_vec(geom: RhoGeometry, alpha):
    """Piecewise coverage-cap area K(alpha), vectorized over alpha."""
    alpha = np.asarray(alpha, dtype=np.float64)
    rho = geom.rho
    cone_cos = np.cos(alpha) / rho - math.sqrt(1.0 - 1.0 / (rho * rho)) * np.sin(alpha)
    cone_area = TWO_PI * (1.0 - ((rho * rho - 1.0) * (cone_cos + 1.0) + 4.0) / (4.0 * rho))
    plain_area = TWO_PI * (1.0 - np.cos(alpha))
    return np.where(alpha >= geom.alpha_zero, plain_area, cone_area)


def density_vec(geom: RhoGeometry, x, y, z):
    """Cap-triangle density D(x, y, z); NaN where degenerate or invalid."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    area = triangle_excess_vec(x, y, z)
    (ax, ay, az), _ = triangle_angles_vec(x, y, z)
    num = K_vec(geom, x) * ax + K_vec(geom, y) * ay + K_vec(geom, z) * az
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(area > 0.0, num / (TWO_PI * area), np.nan)


def angle_upper_at(x, y, z):
    """Vertex angle at the cap of radius x, conservative for broken input.

    Used only for angle upper bounds: any argument beyond the guard maps
    to the worst case pi, arguments below -1 clip to pi as well.
    """
    cos_yz = np.cos(y + z)
    cos_xz, sin_xz = np.cos(x + z), np.sin(x + z)
    cos_xy, sin_xy = np.cos(x + y), np.sin(x + y)
    arg = _angle_arg(cos_yz, cos_xz, cos_xy, sin_xz, sin_xy)
    angle = np.arccos(np.clip(arg, -1.0, 1.0))
    return np.where(arg > 1.0 + ANGLE_GUARD, PI, angle)


def axis_angle_upper_vec(lo_own, lo_o1, lo_o2, up_own, up_o1, up_o2):
    """Upper bound on the vertex angle at the `own` axis over the box.

    With 2x + y + z <= pi throughout the box the angle at x is decreasing
    in x and increasing in y, z, so the maximum sits at (own low, others
    high); with 2x + y + z >= pi throughout it sits at the all-high
    corner; otherwise both corners are evaluated and the larger is taken.
    """
    s_lo = 2.0 * lo_own + lo_o1 + lo_o2
    s_hi = 2.0 * up_own + up_o1 + up_o2
    low_corner = angle_upper_at(lo_own, up_o1, up_o2)
    high_corner = angle_upper_at(up_own, up_o1, up_o2)
    return np.where(
        s_hi <= PI,
        low_corner,
        np.where(s_lo >= PI, high_corner, np.maximum(low_corner, high_corner)),
    )


def box_density_upper_vec(geom: RhoGeometry, a, b, c, ua, ub, uc):
    """Upper bound on D over boxes [a,ua] x [b,ub] x [c,uc], vectorized.

    Corner rules: minimum area at the lower corner, maximum K at the upper
    edges, per-axis maximum vertex angle at one of two corners selected by
    the position of 2x + y + z relative to pi.  Boxes whose lower-corner
    area is not positive (or whose geometry is invalid) get +inf.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    ua = np.asarray(ua, dtype=np.float64)
    ub = np.asarray(ub, dtype=np.float64)
    uc = np.asarray(uc, dtype=np.float64)

    min_area = triangle_excess_vec(a, b, c)

    ang_x = axis_angle_upper_vec(a, b, c, ua, ub, uc)
    ang_y = axis_angle_upper_vec(b, a, c, ub, ua, uc)
    ang_z = axis_angle_upper_vec(c, a, b, uc, ua, ub)

    num = K_vec(geom, ua) * ang_x + K_vec(geom, ub) * ang_y + K_vec(geom, uc) * ang_z
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(min_area > 0.0, num / (TWO_PI * min_area), np.inf)
