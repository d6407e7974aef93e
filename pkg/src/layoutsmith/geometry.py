"""Geometric kernel: vectors, Euler orientations, axis-aligned boxes, layouts.

World frame is right-handed with Z up. All angles are radians; degrees only
appear at export boundaries. The small statistics helpers live here too so
every scoring path (native or DSL) shares one arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class EmptyVertexSet(ValueError):
    """Raised when a vertex-set operation receives no vertices."""


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} component must be finite, got {v!r}")


@dataclass(frozen=True)
class Vec3:
    """Point or displacement in world space."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        _require_finite("Vec3", self.x, self.y, self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Euler:
    """Orientation as pitch/yaw/roll radians (yaw spins about +Z)."""

    pitch: float = 0.0
    yaw: float = 0.0
    roll: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("Euler", self.pitch, self.yaw, self.roll)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pitch, self.yaw, self.roll)


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box; min must not exceed max on any axis."""

    min: Vec3
    max: Vec3

    def __post_init__(self) -> None:
        if (self.min.x > self.max.x or self.min.y > self.max.y
                or self.min.z > self.max.z):
            raise ValueError(f"Aabb min exceeds max: {self.min} > {self.max}")

    def extents(self) -> Vec3:
        return Vec3(self.max.x - self.min.x,
                    self.max.y - self.min.y,
                    self.max.z - self.min.z)

    def center(self) -> Vec3:
        return Vec3((self.min.x + self.max.x) / 2.0,
                    (self.min.y + self.max.y) / 2.0,
                    (self.min.z + self.max.z) / 2.0)


@dataclass(frozen=True)
class Layout:
    """Placement of one asset: reference location, world box, orientation."""

    location: Vec3
    bbox: Aabb
    orientation: Euler = field(default_factory=Euler)


ZERO = Vec3(0.0, 0.0, 0.0)


# ---- vector algebra ----

def add(a: Vec3, b: Vec3) -> Vec3:
    return Vec3(a.x + b.x, a.y + b.y, a.z + b.z)


def sub(a: Vec3, b: Vec3) -> Vec3:
    return Vec3(a.x - b.x, a.y - b.y, a.z - b.z)


def scale(v: Vec3, k: float) -> Vec3:
    return Vec3(v.x * k, v.y * k, v.z * k)


def dot(a: Vec3, b: Vec3) -> float:
    return a.x * b.x + a.y * b.y + a.z * b.z


def norm(v: Vec3) -> float:
    return math.sqrt(v.x * v.x + v.y * v.y + v.z * v.z)


def dist(a: Vec3, b: Vec3) -> float:
    return norm(sub(a, b))


def normalize(v: Vec3) -> Vec3:
    """Unit vector along v; the zero vector normalizes to itself."""
    n = norm(v)
    if n == 0.0:
        return ZERO
    return Vec3(v.x / n, v.y / n, v.z / n)


def clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def forward_vector(orientation: Euler) -> Vec3:
    """Facing direction for an orientation; identity faces +X."""
    cp = math.cos(orientation.pitch)
    return Vec3(math.cos(orientation.yaw) * cp,
                math.sin(orientation.yaw) * cp,
                math.sin(orientation.pitch))


def rotate_z(v: Vec3, angle: float, center: Vec3 = ZERO) -> Vec3:
    """Rotate v about the vertical axis through center."""
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = v.x - center.x, v.y - center.y
    return Vec3(center.x + c * dx - s * dy,
                center.y + s * dx + c * dy,
                v.z)


# ---- boxes and layouts ----

def aabb_vertices(box: Aabb) -> tuple[Vec3, ...]:
    """The 8 corner points, low-to-high lexicographic in (x, y, z).

    Degenerate boxes repeat coordinates but still yield 8 entries.
    """
    lo, hi = box.min, box.max
    return tuple(Vec3(x, y, z)
                 for x in (lo.x, hi.x)
                 for y in (lo.y, hi.y)
                 for z in (lo.z, hi.z))


def shortest_vertex_distance(a: Sequence[Vec3], b: Sequence[Vec3]) -> float:
    """Minimum distance over all cross pairs of two vertex sets."""
    if not a or not b:
        raise EmptyVertexSet("both vertex sets must be non-empty")
    return min(dist(p, q) for p in a for q in b)


def volume(box: Aabb) -> float:
    ext = box.extents()
    return abs(ext.x) * abs(ext.y) * abs(ext.z)


def angle_from_center(center: Vec3, p: Vec3) -> float:
    """Planar angle of p around center, in (-pi, pi]; p == center maps to 0."""
    dx, dy = p.x - center.x, p.y - center.y
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return math.atan2(dy, dx)


def translate(layout: Layout, delta: Vec3) -> Layout:
    """Shift location and box together; orientation unchanged."""
    return Layout(location=add(layout.location, delta),
                  bbox=Aabb(add(layout.bbox.min, delta),
                            add(layout.bbox.max, delta)),
                  orientation=layout.orientation)


# ---- shared scalar statistics (population conventions) ----

def mean(xs: Iterable[float]) -> float:
    """Arithmetic mean; empty input yields 0.0."""
    xs = list(xs)
    if not xs:
        return 0.0
    return sum(xs) / len(xs)


def pvariance(xs: Iterable[float]) -> float:
    """Population variance (divide by n); empty input yields 0.0."""
    xs = list(xs)
    if not xs:
        return 0.0
    m = sum(xs) / len(xs)
    return sum((x - m) ** 2 for x in xs) / len(xs)


def median(xs: Iterable[float]) -> float:
    """Middle value (average of the two middles for even n); empty is 0.0."""
    xs = sorted(xs)
    n = len(xs)
    if n == 0:
        return 0.0
    mid = n // 2
    if n % 2 == 1:
        return xs[mid]
    return (xs[mid - 1] + xs[mid]) / 2.0
