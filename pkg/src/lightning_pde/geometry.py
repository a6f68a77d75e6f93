"""Polygonal domains.

Points are handled as Python/numpy complex numbers ``z = x + iy`` throughout
the package; :class:`Point` exists for callers that prefer named coordinates.
A :class:`Polygon` is always stored counterclockwise, so the domain lies to
the left of every edge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

BOUNDARY_TOL = 1e-12


class Point(NamedTuple):
    x: float
    y: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


class Location(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


# integer codes returned by the vectorized classifier
INSIDE, OUTSIDE, BOUNDARY = 1, 0, 2
_CODES = {INSIDE: Location.INSIDE, OUTSIDE: Location.OUTSIDE, BOUNDARY: Location.BOUNDARY}


class PolygonError(ValueError):
    """Raised for vertex lists that do not describe a simple polygon."""


@dataclass(frozen=True)
class Corner:
    """Data attached to one vertex of a counterclockwise polygon.

    ``angle`` is the interior angle in radians.  The bisector fields are unit
    complex numbers; ``scale`` is half the length of the shorter of the two
    edges meeting at the vertex.
    """

    location: complex
    angle: float
    exterior_bisector: complex
    interior_bisector: complex
    scale: float


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: np.ndarray
    corners: tuple[Corner, ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple[complex, complex]]:
        v = self.vertices
        return [(complex(v[k]), complex(v[(k + 1) % self.n])) for k in range(self.n)]

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.abs(np.roll(self.vertices, -1) - self.vertices)

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def centroid(self) -> complex:
        """Area centroid (not the vertex average)."""
        v = self.vertices
        w = np.roll(v, -1)
        cross = (v.real * w.imag - w.real * v.imag)
        a = cross.sum() / 2
        return complex(((v + w) * cross).sum() / (6 * a))

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v.real.min()), float(v.real.max()),
                float(v.imag.min()), float(v.imag.max()))

    def circumradius(self, center: complex) -> float:
        return float(np.abs(self.vertices - center).max())

    def translated(self, t: complex) -> "Polygon":
        return make_polygon(self.vertices + t)

    def __repr__(self) -> str:
        pts = ", ".join(f"({z.real:g},{z.imag:g})" for z in self.vertices)
        return f"Polygon([{pts}])"


def _as_complex_array(vertices: Iterable) -> np.ndarray:
    out = []
    for v in vertices:
        if isinstance(v, (complex, float, int, np.number)):
            out.append(complex(v))
        else:
            x, y = v
            out.append(complex(float(x), float(y)))
    return np.asarray(out, dtype=complex)


def _signed_area(v: np.ndarray) -> float:
    w = np.roll(v, -1)
    return float((v.real * w.imag - w.real * v.imag).sum() / 2)


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _segments_intersect(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_segment(a, b, c):
        return (min(a.real, b.real) <= c.real <= max(a.real, b.real)
                and min(a.imag, b.imag) <= c.imag <= max(a.imag, b.imag))

    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False


def make_polygon(vertices: Sequence) -> Polygon:
    """Build a validated counterclockwise polygon.

    Parameters
    ----------
    vertices : sequence
        Complex numbers, ``(x, y)`` pairs or :class:`Point` objects, in either
        orientation.  The first vertex must not be repeated at the end.

    Raises
    ------
    PolygonError
        Fewer than three vertices, a repeated consecutive vertex, a
        non-finite coordinate or a self-intersecting boundary.
    """
    v = _as_complex_array(vertices)
    if len(v) < 3:
        raise PolygonError(f"a polygon needs at least 3 vertices, got {len(v)}")
    if not np.all(np.isfinite(v)):
        raise PolygonError("vertex coordinates must be finite")
    if np.any(np.roll(v, -1) == v):
        k = int(np.flatnonzero(np.roll(v, -1) == v)[0])
        raise PolygonError(f"vertices {k} and {(k + 1) % len(v)} coincide")

    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                raise PolygonError(f"edges {i} and {j} intersect")
    # adjacent edges folding back onto each other
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        if _cross(b - a, c - b) == 0 and ((b - a) * np.conj(c - b)).real < 0:
            raise PolygonError(f"edges meeting at vertex {i} overlap")

    area = _signed_area(v)
    if area == 0:
        raise PolygonError("polygon has zero area")
    if area < 0:
        v = v[::-1].copy()

    lengths = np.abs(np.roll(v, -1) - v)
    corners = []
    for k in range(n):
        e_in = v[k] - v[k - 1]
        e_out = v[(k + 1) % n] - v[k]
        turn = float(np.angle(e_out / e_in))
        angle = np.pi - turn
        u_out = e_out / abs(e_out)
        interior = u_out * np.exp(0.5j * angle)
        scale = 0.5 * min(lengths[k - 1], lengths[k])
        corners.append(Corner(complex(v[k]), float(angle), complex(-interior),
                              complex(interior), float(scale)))
    v.setflags(write=False)
    return Polygon(v, tuple(corners))


def _segment_distance(z: np.ndarray, a: complex, b: complex) -> np.ndarray:
    d = b - a
    t = ((z - a) * np.conj(d)).real / abs(d) ** 2
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def boundary_distance(poly: Polygon, pts) -> np.ndarray:
    """Distance from each point to the nearest edge."""
    z = np.asarray(pts, dtype=complex)
    dist = np.full(z.shape, np.inf)
    for a, b in poly.edges:
        dist = np.minimum(dist, _segment_distance(z, a, b))
    return dist


def winding_number(poly: Polygon, pts) -> np.ndarray:
    """Crossing-based winding number of the boundary about each point."""
    z = np.asarray(pts, dtype=complex)
    wn = np.zeros(z.shape, dtype=int)
    x, y = z.real, z.imag
    for a, b in poly.edges:
        is_left = (b.real - a.real) * (y - a.imag) - (x - a.real) * (b.imag - a.imag)
        up = (a.imag <= y) & (b.imag > y) & (is_left > 0)
        down = (a.imag > y) & (b.imag <= y) & (is_left < 0)
        wn += up.astype(int) - down.astype(int)
    return wn


def classify(poly: Polygon, pts, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Vectorized point location; returns ``INSIDE``, ``OUTSIDE`` or ``BOUNDARY`` codes."""
    z = np.asarray(pts, dtype=complex)
    codes = np.where(winding_number(poly, z) != 0, INSIDE, OUTSIDE)
    codes[boundary_distance(poly, z) <= tol] = BOUNDARY
    return codes


def point_in_polygon(poly: Polygon, q) -> Location:
    if not isinstance(q, (complex, float, int, np.number)):
        q = complex(*q)
    return _CODES[int(classify(poly, np.array([complex(q)]))[0])]


def boundary_point(poly: Polygon, edge_index: int, t: float) -> tuple[complex, complex]:
    """Point at parameter ``t`` along an edge, with the inward unit normal."""
    if not 0 <= edge_index < poly.n:
        raise IndexError(f"edge index {edge_index} out of range for {poly.n} edges")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"edge parameter must lie in [0, 1], got {t}")
    a, b = poly.edges[edge_index]
    d = b - a
    return (1 - t) * a + t * b, 1j * d / abs(d)
