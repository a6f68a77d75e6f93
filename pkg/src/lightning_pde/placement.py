"""Corner-clustered singularity locations and boundary sample points.

Both the poles and the boundary samples follow the same root-exponential law:
the j-th of ``n`` singularities at a corner with scale ``L`` sits at distance

    L * exp(-sigma * (sqrt(n) - sqrt(j))),     j = 1, ..., n

so the closest one is ``exp(-sigma*(sqrt(n) - 1))`` times the corner scale.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BOUNDARY, INSIDE, OUTSIDE, Polygon, classify

log = logging.getLogger(__name__)

EXTERIOR = "exterior"
INTERIOR = "interior"

MIN_EDGE_LENGTH = 1e-14


UNIFORM = "uniform"
SQRT_DISTANCE = "sqrt_distance"


@dataclass(frozen=True)
class ClusteringParams:
    """Clustering rate, singularities per corner, sample rows per column.

    ``weighting`` selects the least-squares row weights: ``"uniform"`` (all
    ones) or ``"sqrt_distance"`` (see :func:`corner_weights`).
    """

    sigma: float = 4.0
    per_corner_count: int = 0
    oversample_factor: int = 3
    weighting: str = UNIFORM

    def __post_init__(self):
        if self.weighting not in (UNIFORM, SQRT_DISTANCE):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.per_corner_count < 0:
            raise ValueError("per_corner_count must be nonnegative")
        if self.oversample_factor < 2:
            raise ValueError("oversample_factor must be at least 2")


@dataclass(frozen=True, eq=False)
class PoleSet:
    poles: np.ndarray
    owning_corner: np.ndarray
    side: str = EXTERIOR
    discarded: int = 0

    def __len__(self) -> int:
        return len(self.poles)

    def translated(self, t: complex) -> "PoleSet":
        return PoleSet(self.poles + t, self.owning_corner, self.side, self.discarded)


@dataclass(frozen=True, eq=False)
class SampleSet:
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    edge_index: np.ndarray = field(default=None)

    def __len__(self) -> int:
        return len(self.points)

    def translated(self, t: complex) -> "SampleSet":
        return SampleSet(self.points + t, self.normals, self.weights, self.edge_index)


def cluster_distances(scale: float, n: int, sigma: float, density: float = 1.0,
                      offset: float = 0.0) -> np.ndarray:
    """Distances ``scale*exp(-sigma*(sqrt(n) - sqrt((j - offset)/density)))``.

    ``j`` runs over ``1 .. density*n``; ``density`` points are placed per unit
    step of the pole law, and ``offset`` shifts them to interleave grids.
    """
    count = int(round(density * n))
    j = np.arange(1, count + 1, dtype=float) - offset
    return scale * np.exp(-sigma * (math.sqrt(n) - np.sqrt(j / density)))


def place_poles(poly: Polygon, params: ClusteringParams, side: str = EXTERIOR) -> PoleSet:
    """Cluster ``params.per_corner_count`` singularities at every corner.

    ``side="exterior"`` puts them outside the polygon along the exterior
    bisector (Laplace poles); ``side="interior"`` puts them inside along the
    interior bisector (Helmholtz charges inside a scatterer).  Any location
    that does not classify on the requested side is dropped and counted in
    ``PoleSet.discarded``.
    """
    if side not in (EXTERIOR, INTERIOR):
        raise ValueError(f"side must be {EXTERIOR!r} or {INTERIOR!r}")
    n = params.per_corner_count
    wanted = OUTSIDE if side == EXTERIOR else INSIDE
    poles, owners = [], []
    for k, c in enumerate(poly.corners):
        if n == 0:
            break
        d = cluster_distances(c.scale, n, params.sigma)
        direction = c.exterior_bisector if side == EXTERIOR else c.interior_bisector
        poles.append(c.location + d * direction)
        owners.append(np.full(n, k))
    if not poles:
        return PoleSet(np.zeros(0, complex), np.zeros(0, int), side)
    z = np.concatenate(poles)
    owner = np.concatenate(owners)
    keep = classify(poly, z) == wanted
    discarded = int((~keep).sum())
    if discarded:
        log.warning("discarded %d of %d singularities on the wrong side of the boundary",
                    discarded, len(z))
    return PoleSet(z[keep], owner[keep], side, discarded)


def corner_weights(poly: Polygon, pts: np.ndarray) -> np.ndarray:
    """Row weights ``sqrt(min(1, distance to nearest corner))``, scaled to max 1."""
    dist = np.abs(pts[:, None] - poly.vertices[None, :]).min(axis=1)
    w = np.sqrt(np.minimum(1.0, dist))
    return w / w.max()


def _edge_points(poly: Polygon, params: ClusteringParams, density: float, offset: float,
                 fill: np.ndarray, include_vertices: bool):
    """Clustered-plus-uniform parameters along every edge."""
    pts, normals, edges = [], [], []
    n = params.per_corner_count
    for k, (a, b) in enumerate(poly.edges):
        length = abs(b - a)
        if length < MIN_EDGE_LENGTH:
            raise ValueError(f"edge {k} is degenerate (length {length:.3g})")
        ts = []
        if n > 0:
            for end, corner in ((0, poly.corners[k]), (1, poly.corners[(k + 1) % poly.n])):
                d = cluster_distances(corner.scale, n, params.sigma, density, offset)
                t = d / length
                ts.append(t if end == 0 else 1.0 - t)
        if fill[k] > 0:
            ts.append((np.arange(fill[k]) + 0.5) / fill[k])
        if include_vertices:
            ts.append(np.array([0.0]))
        t = np.unique(np.concatenate(ts)) if ts else np.zeros(0)
        t = t[(t >= 0.0) & (t < 1.0)] if include_vertices else t[(t > 0.0) & (t < 1.0)]
        z = (1 - t) * a + t * b
        # the clustering law eventually drops below coordinate resolution
        keep = (z != b) & ((z != a) | (t == 0.0))
        z, keep_idx = np.unique(z[keep], return_index=True)
        z = z[np.argsort(keep_idx)]
        pts.append(z)
        normals.append(np.full(len(z), 1j * (b - a) / length))
        edges.append(np.full(len(z), k))
    return np.concatenate(pts), np.concatenate(normals), np.concatenate(edges)


def _distribute(total: int, lengths: np.ndarray, minimum: np.ndarray) -> np.ndarray:
    """Split ``total`` fill points across edges in proportion to length."""
    share = total * lengths / lengths.sum()
    counts = np.floor(share).astype(int)
    remainder = total - counts.sum()
    order = np.argsort(-(share - counts), kind="stable")
    counts[order[:remainder]] += 1
    return np.maximum(counts, minimum)


def _fit_grid(poly: Polygon, params: ClusteringParams, basis_size: int):
    q = params.oversample_factor
    target = q * basis_size
    none = np.zeros(poly.n, dtype=int)
    clustered, _, edge_of = _edge_points(poly, params, q, 0.0, none, False)
    per_edge = np.bincount(edge_of, minlength=poly.n)
    minimum = np.maximum(0, 2 * q - per_edge)
    fill = _distribute(max(0, target - len(clustered)), poly.edge_lengths, minimum)
    z, normals, edge_of = _edge_points(poly, params, q, 0.0, fill, False)
    # uniform fill can land on a clustered point; top up until the target is met
    deficit = target - len(z)
    while deficit > 0:
        fill = fill + _distribute(deficit, poly.edge_lengths, none)
        z, normals, edge_of = _edge_points(poly, params, q, 0.0, fill, False)
        deficit = target - len(z)
    return z, normals, edge_of, fill


def place_samples(poly: Polygon, poleset: PoleSet, basis_size: int,
                  params: ClusteringParams) -> SampleSet:
    """Boundary sample points for a least-squares fit with ``basis_size`` columns.

    Each edge gets ``oversample_factor`` samples per pole-distance step,
    clustered toward both of its endpoints, plus uniformly spaced points so
    that the total is about ``oversample_factor * basis_size`` and every
    edge carries at least ``2 * oversample_factor`` samples.
    """
    if basis_size < 1:
        raise ValueError("basis size must be at least 1")
    z, normals, edge_of, _ = _fit_grid(poly, params, basis_size)
    if len(poleset) and np.any(z[:, None] == poleset.poles[None, :]):
        raise ValueError("a sample point coincides with a pole")
    if params.weighting == SQRT_DISTANCE:
        weights = corner_weights(poly, z)
    else:
        weights = np.ones(len(z))
    return SampleSet(z, normals, weights, edge_of)


def validation_samples(poly: Polygon, params: ClusteringParams, basis_size: int,
                       refinement: int = 4) -> SampleSet:
    """An independent boundary grid ``refinement`` times denser than the fit grid.

    Clustered points interleave with the fit points (half-step offset) and
    reach closer to the corners; the vertices themselves are included.  All
    weights are 1 since the grid only measures the unweighted residual.
    """
    if refinement < 1:
        raise ValueError("refinement must be positive")
    _, _, _, fill = _fit_grid(poly, params, basis_size)
    q = params.oversample_factor * refinement
    z, normals, edge_of = _edge_points(poly, params, q, 0.5, refinement * fill + 1, True)
    return SampleSet(z, normals, np.ones(len(z)), edge_of)


def random_boundary_points(poly: Polygon, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points distributed uniformly in arc length along the boundary."""
    lengths = poly.edge_lengths
    s = rng.uniform(0.0, lengths.sum(), count)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, poly.n - 1)
    t = (s - cum[k]) / lengths[k]
    a = poly.vertices[k]
    b = poly.vertices[(k + 1) % poly.n]
    return (1 - t) * a + t * b


__all__ = [
    "ClusteringParams", "PoleSet", "UNIFORM", "SQRT_DISTANCE", "SampleSet", "EXTERIOR", "INTERIOR", "BOUNDARY",
    "cluster_distances", "place_poles", "place_samples", "validation_samples",
    "corner_weights", "random_boundary_points",
]
