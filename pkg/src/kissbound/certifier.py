"""Rigorous grid certification of the dimension-3 average-degree bound.

The cap-radius cube I_rho^3 is subdivided into axis-aligned boxes of side
delta.  On each box the cap-triangle density D is bounded from above by
the corner estimate

    D <= (max K(x) max angle_x + max K(y) max angle_y + max K(z) max angle_z)
         / (2 pi min area),

with the minimum area taken at the lower corner, the K maxima at the
upper edges (K is non-decreasing), and each angle maximum at one of two
box corners depending on where 2x + y + z sits relative to pi.  Scanning
every box of the symmetry-reduced tiling {a <= b <= c} and multiplying
the overall maximum by 8 rho / (-rho^2 + 4 rho - 3) yields a certified
upper bound on the average degree of three-dimensional ball packings.

The scan is deterministic: boxes are enumerated in lexicographic index
order, the reduction is an associative max, and the resulting certificate
is byte-identical for any worker count.  The arithmetic is plain IEEE
double; the certificate is rigorous modulo rounding of the elementary
functions, which the configurable multiplicative fp_slack makes explicit.
An interval-arithmetic mode would slot in behind the same interface but
is not built.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .caps import RhoGeometry, rho_geometry
from .errors import CertificateError, DomainError

__all__ = [
    "Box",
    "Certificate",
    "box_angle_upper",
    "box_density_upper",
    "certify",
    "emit_certificate",
    "parse_certificate",
    "objective_factor",
]

DEFAULT_FP_SLACK = 1e-9
CHECKPOINT_EVERY = 10_000_000
# cap on elements handled in one vectorized batch, bounds worker memory
MAX_BATCH = 2_000_000

_AXES = ("x", "y", "z")


def objective_factor(rho: float) -> float:
    """Conversion from max density to the average-degree objective."""
    if not (1.0 < rho < 3.0):
        raise DomainError(f"inflation ratio must lie in (1, 3), got {rho!r}")
    return 8.0 * rho / (-rho * rho + 4.0 * rho - 3.0)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [a, a+delta] x [b, b+delta] x [c, c+delta].

    Boxes at the domain boundary are shrunk implicitly: evaluation clamps
    the upper edges to alpha_max, so the effective boxes exactly tile the
    cube I_rho^3.
    """

    a: float
    b: float
    c: float
    delta: float


def _box_edges(geom: RhoGeometry, box: Box):
    lows = (box.a, box.b, box.c)
    if box.delta <= 0.0:
        raise DomainError(f"box side must be positive, got {box.delta!r}")
    for low in lows:
        if not (geom.alpha_min - 1e-12 <= low < geom.alpha_max):
            raise DomainError(f"box corner {low!r} outside the cap-radius interval")
    ups = tuple(min(low + box.delta, geom.alpha_max) for low in lows)
    return lows, ups


def box_angle_upper(geom: RhoGeometry, box: Box, axis: str) -> float:
    """Upper bound for one vertex angle of the cap triangle over the box.

    Degenerate corner configurations yield the conservative worst case pi.
    """
    if axis not in _AXES:
        raise DomainError(f"axis must be one of {_AXES}, got {axis!r}")
    (a, b, c), (ua, ub, uc) = _box_edges(geom, box)
    order = {
        "x": (a, b, c, ua, ub, uc),
        "y": (b, a, c, ub, ua, uc),
        "z": (c, a, b, uc, ua, ub),
    }[axis]
    return float(_kernels.axis_angle_upper_vec(*map(np.float64, order)))


def box_density_upper(geom: RhoGeometry, box: Box) -> float:
    """Upper bound for the density D over the box; +inf if unusable."""
    (a, b, c), (ua, ub, uc) = _box_edges(geom, box)
    return float(_kernels.box_density_upper_vec(geom, a, b, c, ua, ub, uc))


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable record of one grid verification run.

    certified_bound = max_box_bound * 8 rho / (-rho^2 + 4 rho - 3)
                      * (1 + fp_slack)
    and passed means certified_bound < target with every box of the
    symmetry-reduced subdivision accounted for.
    """

    rho: float
    delta: float
    target: float
    boxes_checked: int
    max_box_bound: float
    certified_bound: float
    fp_slack: float
    passed: bool


_CERT_FIELDS = (
    ("rho", float),
    ("delta", float),
    ("target", float),
    ("boxes_checked", int),
    ("max_box_bound", float),
    ("certified_bound", float),
    ("fp_slack", float),
    ("passed", bool),
)


def emit_certificate(cert: Certificate) -> str:
    """Serialize a certificate as a key:value document, 17 significant digits."""
    lines = []
    for name, kind in _CERT_FIELDS:
        value = getattr(cert, name)
        if kind is float:
            text = format(value, ".17g")
        elif kind is bool:
            text = "true" if value else "false"
        else:
            text = str(value)
        lines.append(f"{name}: {text}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    """Inverse of emit_certificate; round-trips bit-exactly."""
    values = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise CertificateError(f"malformed certificate line {line!r}")
        key, _, payload = line.partition(":")
        values[key.strip()] = payload.strip()
    kwargs = {}
    for name, kind in _CERT_FIELDS:
        if name not in values:
            raise CertificateError(f"certificate missing field {name!r}")
        raw = values[name]
        try:
            if kind is bool:
                if raw not in ("true", "false"):
                    raise ValueError(raw)
                kwargs[name] = raw == "true"
            else:
                kwargs[name] = kind(raw)
        except ValueError as exc:
            raise CertificateError(f"bad value for {name!r}: {raw!r}") from exc
    return Certificate(**kwargs)


# ---------------------------------------------------------------------------
# grid scan


class _GridScan:
    """Precomputed tables for scanning one (rho, delta) grid.

    Grid edges g[0..n] tile [alpha_min, alpha_max] with g[n] clamped to
    alpha_max; box (i, j, k) spans [g[i], g[i+1]] x ... Tables of
    cos/sin over all pairwise edge sums turn each corner evaluation into
    gathers plus one arccos.
    """

    def __init__(self, geom: RhoGeometry, delta: float):
        if delta <= 0.0:
            raise DomainError(f"delta must be positive, got {delta!r}")
        width = geom.interval_width
        n = int(math.ceil(width / delta - 1e-12))
        if n < 1:
            raise DomainError(f"delta {delta!r} leaves no boxes in the interval")
        self.geom = geom
        self.delta = delta
        self.n = n
        g = geom.alpha_min + delta * np.arange(n + 1, dtype=np.float64)
        g[n] = geom.alpha_max
        self.g = g
        self.k_up = np.asarray(_kernels.K_vec(geom, g[1:]), dtype=np.float64)
        sums = g[:, None] + g[None, :]
        self.cos_sum = np.cos(sums).ravel()
        self.sin_sum = np.sin(sums).ravel()
        self.stride = n + 1

    def total_boxes(self) -> int:
        n = self.n
        return n * (n + 1) * (n + 2) // 6

    def _pair(self, fi, fj):
        flat = fi * self.stride + fj
        return self.cos_sum[flat], self.sin_sum[flat]

    def _angle_arg(self, own, o1, o2):
        cos_opp, _ = self._pair(o1, o2)
        cos_s2, sin_s2 = self._pair(own, o2)
        cos_s3, sin_s3 = self._pair(own, o1)
        return (cos_opp - cos_s2 * cos_s3) / (sin_s2 * sin_s3)

    def _angle_upper(self, own, o1, o2):
        arg = self._angle_arg(own, o1, o2)
        angle = np.arccos(np.clip(arg, -1.0, 1.0))
        return np.where(arg > 1.0 + _kernels.ANGLE_GUARD, _kernels.PI, angle)

    def _axis_angle_upper(self, lo_own, lo_o1, lo_o2):
        g = self.g
        s_lo = 2.0 * g[lo_own] + g[lo_o1] + g[lo_o2]
        s_hi = 2.0 * g[lo_own + 1] + g[lo_o1 + 1] + g[lo_o2 + 1]
        low_corner = self._angle_upper(lo_own, lo_o1 + 1, lo_o2 + 1)
        high_corner = self._angle_upper(lo_own + 1, lo_o1 + 1, lo_o2 + 1)
        return np.where(
            s_hi <= _kernels.PI,
            low_corner,
            np.where(s_lo >= _kernels.PI, high_corner, np.maximum(low_corner, high_corner)),
        )

    def _batch_bounds(self, i, j, k):
        ii = np.full_like(j, i)
        arg_x = self._angle_arg(ii, j, k)
        arg_y = self._angle_arg(j, ii, k)
        arg_z = self._angle_arg(k, ii, j)
        valid = (
            (np.abs(arg_x) <= 1.0 + _kernels.ANGLE_GUARD)
            & (np.abs(arg_y) <= 1.0 + _kernels.ANGLE_GUARD)
            & (np.abs(arg_z) <= 1.0 + _kernels.ANGLE_GUARD)
        )
        min_area = (
            np.arccos(np.clip(arg_x, -1.0, 1.0))
            + np.arccos(np.clip(arg_y, -1.0, 1.0))
            + np.arccos(np.clip(arg_z, -1.0, 1.0))
            - _kernels.PI
        )
        min_area = np.where(valid, min_area, np.nan)
        ang_x = self._axis_angle_upper(ii, j, k)
        ang_y = self._axis_angle_upper(j, ii, k)
        ang_z = self._axis_angle_upper(k, ii, j)
        num = self.k_up[ii] * ang_x + self.k_up[j] * ang_y + self.k_up[k] * ang_z
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(min_area > 0.0, num / (_kernels.TWO_PI * min_area), np.inf)

    def slab_max(self, i: int):
        """Max bound over all boxes (i, j, k) with i <= j <= k.

        Returns (max_bound, box_count, argmax_indices); processes the
        triangular (j, k) block in batches of at most MAX_BATCH boxes.
        """
        n = self.n
        best = -np.inf
        best_idx = (i, i, i)
        count = 0
        row = i
        while row < n:
            rows = [row]
            size = n - row
            while row + 1 < n and size + (n - row - 1) <= MAX_BATCH:
                row += 1
                rows.append(row)
                size += n - row
            row += 1
            j = np.concatenate([np.full(n - r, r, dtype=np.int64) for r in rows])
            k = np.concatenate([np.arange(r, n, dtype=np.int64) for r in rows])
            bounds = self._batch_bounds(i, j, k)
            pos = int(np.argmax(bounds))
            value = float(bounds[pos])
            if value > best:
                best = value
                best_idx = (i, int(j[pos]), int(k[pos]))
            count += bounds.size
        return best, count, best_idx


_SCAN_STATE: _GridScan | None = None


def _scan_slab(i: int):
    assert _SCAN_STATE is not None
    return _SCAN_STATE.slab_max(i)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("KISSBOUND_THREADS")
        if env:
            workers = int(env)
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise DomainError(f"worker count must be positive, got {workers!r}")
    return workers


# checkpoint floats are stored as hex to survive JSON round-trips exactly
def _checkpoint_params(rho, delta, target, fp_slack, n):
    return {
        "rho": float(rho).hex(),
        "delta": float(delta).hex(),
        "target": float(target).hex(),
        "fp_slack": float(fp_slack).hex(),
        "n": n,
    }


def _write_checkpoint(path, params, next_slab, boxes_done, max_so_far, argmax):
    state = dict(params)
    state.update(
        next_slab=next_slab,
        boxes_done=boxes_done,
        max_so_far=float(max_so_far).hex(),
        argmax=list(argmax),
    )
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(state, fh)
    os.replace(tmp, path)


def _read_checkpoint(path, params):
    with open(path, encoding="utf-8") as fh:
        state = json.load(fh)
    for key, value in params.items():
        if state.get(key) != value:
            raise CertificateError(
                f"checkpoint {path!r} was written for different parameters "
                f"({key} mismatch)"
            )
    return (
        int(state["next_slab"]),
        int(state["boxes_done"]),
        float.fromhex(state["max_so_far"]),
        tuple(state["argmax"]),
    )


def certify(
    rho: float,
    delta: float,
    target: float,
    fp_slack: float = DEFAULT_FP_SLACK,
    workers: int | None = 1,
    checkpoint_path: str | None = None,
    checkpoint_every: int = CHECKPOINT_EVERY,
    on_progress=None,
) -> Certificate:
    """Scan every box of the symmetry-reduced subdivision and certify.

    Deterministic for any worker count: slabs with fixed first index are
    reduced in order, and the max reduction is exact.  When
    checkpoint_path exists and matches the parameters, the scan resumes
    after the last completed slab; the file is removed on completion.

    Returns the Certificate; passed is True iff
    max_box_bound * objective_factor(rho) * (1 + fp_slack) < target.
    """
    if target <= 0.0:
        raise DomainError(f"target must be positive, got {target!r}")
    if fp_slack < 0.0:
        raise DomainError(f"fp_slack must be non-negative, got {fp_slack!r}")
    geom = rho_geometry(rho)
    scan = _GridScan(geom, delta)
    n = scan.n
    total = scan.total_boxes()
    workers = _resolve_workers(workers)

    params = _checkpoint_params(rho, delta, target, fp_slack, n)
    start_slab, boxes_done, max_so_far, argmax = 0, 0, -math.inf, (0, 0, 0)
    if checkpoint_path and os.path.exists(checkpoint_path):
        start_slab, boxes_done, max_so_far, argmax = _read_checkpoint(
            checkpoint_path, params
        )

    global _SCAN_STATE
    _SCAN_STATE = scan
    since_checkpoint = 0
    try:
        if workers == 1 or start_slab >= n:
            results = map(_scan_slab, range(start_slab, n))
            iterator = zip(range(start_slab, n), results)
            for i, (value, count, idx) in iterator:
                if value > max_so_far:
                    max_so_far = value
                    argmax = idx
                boxes_done += count
                since_checkpoint += count
                if checkpoint_path and since_checkpoint >= checkpoint_every:
                    _write_checkpoint(
                        checkpoint_path, params, i + 1, boxes_done, max_so_far, argmax
                    )
                    since_checkpoint = 0
                if on_progress is not None:
                    on_progress(boxes_done, total)
        else:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=workers) as pool:
                results = pool.imap(_scan_slab, range(start_slab, n), chunksize=4)
                for i, (value, count, idx) in zip(range(start_slab, n), results):
                    if value > max_so_far:
                        max_so_far = value
                        argmax = idx
                    boxes_done += count
                    since_checkpoint += count
                    if checkpoint_path and since_checkpoint >= checkpoint_every:
                        _write_checkpoint(
                            checkpoint_path, params, i + 1, boxes_done, max_so_far, argmax
                        )
                        since_checkpoint = 0
                    if on_progress is not None:
                        on_progress(boxes_done, total)
    finally:
        _SCAN_STATE = None

    if boxes_done != total:
        raise CertificateError(
            f"scan covered {boxes_done} boxes, expected {total}; "
            "stale checkpoint?"
        )
    factor = objective_factor(rho)
    certified = max_so_far * factor * (1.0 + fp_slack)
    cert = Certificate(
        rho=rho,
        delta=delta,
        target=target,
        boxes_checked=total,
        max_box_bound=max_so_far,
        certified_bound=certified,
        fp_slack=fp_slack,
        passed=bool(certified < target),
    )
    if checkpoint_path and os.path.exists(checkpoint_path):
        os.remove(checkpoint_path)
    return cert


def argmax_box(rho: float, delta: float) -> Box:
    """Box attaining the maximum bound; convenience for diagnostics."""
    geom = rho_geometry(rho)
    scan = _GridScan(geom, delta)
    best = (-math.inf, (0, 0, 0))
    for i in range(scan.n):
        value, _, idx = scan.slab_max(i)
        if value > best[0]:
            best = (value, idx)
    i, j, k = best[1]
    g = scan.g
    return Box(a=float(g[i]), b=float(g[j]), c=float(g[k]), delta=delta)
