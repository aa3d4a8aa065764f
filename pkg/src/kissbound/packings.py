"""Ball packing ingestion, contact graphs, and coverage audits.

A packing document is a single JSON object

    {"balls": [{"center": [x, y, z], "radius": r}, ...]}

with finite decimal numbers.  Tangency and overlap are decided with a
relative tolerance (default 1e-9) because exact tangency is not
representable for irrational configurations; the tolerance used is
recorded in every report.

The coverage audit makes the counting argument behind the average-degree
bounds executable on a concrete packing: summed over the two ends of
every contact edge, the measuring-sphere coverage fractions are at least
f_3(rho) per edge, while each ball's own sum is a packing of caps on its
measuring sphere and therefore cannot exceed the maximum cap-triangle
density.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .caps import coverage_fraction, pair_sum_value
from .errors import DomainError, OverlapError, PackingParseError

__all__ = [
    "Ball",
    "Packing",
    "ContactGraph",
    "CoverageAudit",
    "load_packing",
    "packing_from_balls",
    "contact_graph",
    "fcc_fragment",
    "coverage_audit",
    "audit_to_csv",
    "AUDIT_CSV_HEADER",
]

DEFAULT_TOLERANCE = 1e-9
ALL_PAIRS_LIMIT = 10_000


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class Packing:
    """Validated list of balls with pairwise non-intersecting interiors."""

    balls: tuple[Ball, ...]
    tolerance: float = DEFAULT_TOLERANCE

    def __len__(self) -> int:
        return len(self.balls)


@dataclass(frozen=True)
class ContactGraph:
    """Tangency graph of a packing; edges are index pairs with i < j."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    @property
    def average_degree(self) -> float:
        if self.vertex_count == 0:
            return 0.0
        return 2.0 * len(self.edges) / self.vertex_count

    def degrees(self) -> list[int]:
        out = [0] * self.vertex_count
        for i, j in self.edges:
            out[i] += 1
            out[j] += 1
        return out


def _centers_radii(packing: Packing) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([b.center for b in packing.balls], dtype=np.float64)
    radii = np.array([b.radius for b in packing.balls], dtype=np.float64)
    return centers, radii


def packing_from_balls(
    balls: list[Ball] | tuple[Ball, ...], tolerance: float = DEFAULT_TOLERANCE
) -> Packing:
    """Validate non-overlap and build a Packing.

    Raises OverlapError naming the first offending pair (lexicographic)
    and its penetration depth.
    """
    if tolerance < 0.0:
        raise DomainError(f"tolerance must be non-negative, got {tolerance!r}")
    packing = Packing(balls=tuple(balls), tolerance=tolerance)
    if len(packing) < 2:
        return packing
    centers, radii = _centers_radii(packing)
    for i in range(len(packing) - 1):
        dist = np.sqrt(np.sum((centers[i + 1 :] - centers[i]) ** 2, axis=1))
        limit = (radii[i] + radii[i + 1 :]) * (1.0 - tolerance)
        bad = np.nonzero(dist < limit)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            penetration = float(radii[i] + radii[j] - dist[bad[0]])
            raise OverlapError(i, j, penetration)
    return packing


def load_packing(document: str, tolerance: float = DEFAULT_TOLERANCE) -> Packing:
    """Parse and validate a packing document (JSON text)."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PackingParseError(
            f"invalid packing document at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    if not isinstance(data, dict) or "balls" not in data:
        raise PackingParseError("packing document must be an object with a 'balls' list")
    raw_balls = data["balls"]
    if not isinstance(raw_balls, list):
        raise PackingParseError("'balls' must be a list")
    balls = []
    for index, item in enumerate(raw_balls):
        if not isinstance(item, dict):
            raise PackingParseError(f"ball {index} must be an object")
        center = item.get("center")
        radius = item.get("radius")
        if (
            not isinstance(center, list)
            or len(center) != 3
            or not all(isinstance(v, (int, float)) for v in center)
        ):
            raise PackingParseError(f"ball {index}: center must be [x, y, z]")
        if not isinstance(radius, (int, float)):
            raise PackingParseError(f"ball {index}: radius must be a number")
        center_t = tuple(float(v) for v in center)
        radius_f = float(radius)
        if not all(math.isfinite(v) for v in center_t) or not math.isfinite(radius_f):
            raise PackingParseError(f"ball {index}: coordinates must be finite")
        if radius_f <= 0.0:
            raise PackingParseError(f"ball {index}: radius must be positive")
        balls.append(Ball(center=center_t, radius=radius_f))
    return packing_from_balls(balls, tolerance)


def _tangent_mask(dist: np.ndarray, radius_sum: np.ndarray, tol: float) -> np.ndarray:
    return np.abs(dist - radius_sum) <= tol * radius_sum


def _edges_all_pairs(centers, radii, tol):
    edges = []
    count = centers.shape[0]
    for i in range(count - 1):
        dist = np.sqrt(np.sum((centers[i + 1 :] - centers[i]) ** 2, axis=1))
        hits = np.nonzero(_tangent_mask(dist, radii[i] + radii[i + 1 :], tol))[0]
        edges.extend((i, i + 1 + int(j)) for j in hits)
    return edges


def _edges_spatial_grid(centers, radii, tol):
    # cell size keyed to the largest ball keeps every tangent pair within
    # one cell of each other
    cell = 2.0 * float(radii.max()) * (1.0 + tol)
    keys = np.floor(centers / cell).astype(np.int64)
    buckets: dict[tuple[int, int, int], list[int]] = {}
    for index, key in enumerate(map(tuple, keys)):
        buckets.setdefault(key, []).append(index)
    edges = []
    for (kx, ky, kz), members in buckets.items():
        candidates = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    candidates.extend(buckets.get((kx + dx, ky + dy, kz + dz), ()))
        cand = np.array(sorted(set(candidates)), dtype=np.int64)
        for i in members:
            others = cand[cand > i]
            if others.size == 0:
                continue
            dist = np.sqrt(np.sum((centers[others] - centers[i]) ** 2, axis=1))
            hits = np.nonzero(_tangent_mask(dist, radii[i] + radii[others], tol))[0]
            edges.extend((i, int(others[j])) for j in hits)
    edges.sort()
    return edges


def contact_graph(packing: Packing) -> ContactGraph:
    """Tangency graph: edge (i, j) iff |dist - (ri + rj)| <= tol (ri + rj)."""
    count = len(packing)
    if count < 2:
        return ContactGraph(vertex_count=count, edges=())
    centers, radii = _centers_radii(packing)
    if count <= ALL_PAIRS_LIMIT:
        edges = _edges_all_pairs(centers, radii, packing.tolerance)
    else:
        edges = _edges_spatial_grid(centers, radii, packing.tolerance)
    return ContactGraph(vertex_count=count, edges=tuple(edges))


def fcc_fragment(n: int) -> Packing:
    """Unit balls on face-centered-cubic sites within n coordination shells.

    Sites are the integer vectors with even coordinate sum and squared
    norm at most 2n, scaled by sqrt(2) so that the nearest-neighbor
    distance is exactly 2.  n = 1 gives the 13-ball kissing configuration.
    """
    if n < 1:
        raise DomainError(f"shell count must be at least 1, got {n!r}")
    limit = 2 * n
    reach = int(math.isqrt(limit))
    scale = math.sqrt(2.0)
    balls = []
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            for k in range(-reach, reach + 1):
                if (i + j + k) % 2 != 0:
                    continue
                if i * i + j * j + k * k > limit:
                    continue
                balls.append(Ball(center=(i * scale, j * scale, k * scale), radius=1.0))
    balls.sort(key=lambda b: (sum(v * v for v in b.center), b.center))
    return packing_from_balls(balls)


@dataclass(frozen=True)
class CoverageAudit:
    """Per-ball coverage sums and the global edge-sum checks at one rho.

    rows are (ball_index, degree, coverage_sum); edge_sum is the two-sided
    coverage total over all contact edges, which is at least
    pair_sum_value(rho) * edge_count.  per_ball_ok reports whether every
    per-ball sum stays within max_density_ref + tolerance.
    """

    rho: float
    tolerance: float
    rows: tuple[tuple[int, int, float], ...]
    edge_count: int
    edge_sum: float
    edge_sum_floor: float
    edge_sum_ok: bool
    max_density_ref: float | None
    per_ball_ok: bool | None
    violations: tuple[str, ...]


def coverage_audit(
    packing: Packing,
    rho: float,
    max_density_ref: float | None = None,
    density_margin: float = 1e-6,
) -> CoverageAudit:
    """Check the coverage identities on a concrete packing.

    Violations are reported, not raised: a true violation would falsify
    the implementation, not the packing.
    """
    if not (1.0 < rho < 3.0):
        raise DomainError(f"inflation ratio must lie in (1, 3), got {rho!r}")
    graph = contact_graph(packing)
    sums = [0.0] * len(packing)
    edge_sum = 0.0
    for i, j in graph.edges:
        ri = packing.balls[i].radius
        rj = packing.balls[j].radius
        a_ij = coverage_fraction(rho, ri, rj)
        a_ji = coverage_fraction(rho, rj, ri)
        sums[i] += a_ij
        sums[j] += a_ji
        edge_sum += a_ij + a_ji
    degrees = graph.degrees()
    rows = tuple(
        (index, degrees[index], sums[index]) for index in range(len(packing))
    )
    floor = pair_sum_value(rho) * len(graph.edges)
    edge_ok = edge_sum >= floor - 1e-12 * max(1.0, abs(floor))
    violations = []
    if not edge_ok:
        violations.append(
            f"edge sum {edge_sum!r} below floor {floor!r} at rho={rho!r}"
        )
    per_ball_ok: bool | None = None
    if max_density_ref is not None:
        per_ball_ok = True
        limit = max_density_ref + density_margin
        for index, _, value in rows:
            if value > limit:
                per_ball_ok = False
                violations.append(
                    f"ball {index} coverage sum {value!r} exceeds "
                    f"max density {max_density_ref!r} + {density_margin!r}"
                )
    return CoverageAudit(
        rho=rho,
        tolerance=packing.tolerance,
        rows=rows,
        edge_count=len(graph.edges),
        edge_sum=edge_sum,
        edge_sum_floor=floor,
        edge_sum_ok=edge_ok,
        max_density_ref=max_density_ref,
        per_ball_ok=per_ball_ok,
        violations=tuple(violations),
    )


AUDIT_CSV_HEADER = "ball_index,degree,coverage_sum"


def audit_to_csv(audit: CoverageAudit) -> str:
    lines = [AUDIT_CSV_HEADER]
    lines.extend(
        f"{index},{degree},{value:.12g}" for index, degree, value in audit.rows
    )
    return "\n".join(lines) + "\n"
