"""Bounded open sets in R^m and the geometric quantities the bounds consume.

Supported shapes: intervals, axis-aligned boxes, balls, disjoint unions of
axis-aligned boxes, and rasterized sets (occupancy grids).  Every domain
exposes dimension, volume, diameter, open-set membership, uniform sampling
and cell-center rasterization.

Conventions
-----------
* Membership is open-set membership: boundary points are outside.  All
  integral quantities are insensitive to this measure-zero choice.
* Rasterization uses the cell-center rule: a cell is occupied iff its
  center lies in the set.  The raster origin is the lower corner of the
  domain's bounding box.
* Randomness comes from an explicit ``numpy.random.Generator`` (PCG64).
  Generators are seedable and splittable (``SeedSequence.spawn``), so all
  stochastic output is reproducible from a single seed and parallel workers
  can use per-worker children.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .errors import ResolutionError

__all__ = [
    "Domain",
    "Interval",
    "Box",
    "Ball",
    "BoxUnion",
    "Raster",
    "volume",
    "diameter",
    "contains",
    "sample_uniform",
    "rasterize",
    "domain_from_dict",
    "domain_to_dict",
    "load_domain",
]


class Domain:
    """Base class for bounded open sets.  Instances are immutable."""

    dim: int

    def volume(self) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def contains(self, points):
        """Open-set membership.

        Accepts a single point (length-m sequence) or an (n, m) array;
        returns a bool or a bool array accordingly.
        """
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(
                f"dimension mismatch: domain is {self.dim}-dimensional, "
                f"points have {pts.shape[1]} coordinates"
            )
        mask = self._contains(pts)
        return bool(mask[0]) if single else mask

    def _contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` points uniformly from the set; returns an (n, m) array."""
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of the axis-aligned bounding box."""
        raise NotImplementedError

    def min_feature(self) -> float:
        """Smallest geometric feature; rasterization must resolve it."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return self.describe()


@dataclass(frozen=True, eq=False)
class Interval(Domain):
    """The open interval (0, L)."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("interval length must be positive")
        object.__setattr__(self, "dim", 1)

    def volume(self) -> float:
        return float(self.length)

    def diameter(self) -> float:
        return float(self.length)

    def _contains(self, pts):
        x = pts[:, 0]
        return (x > 0) & (x < self.length)

    def sample(self, rng, n):
        return (rng.random((n, 1)) * self.length).astype(float)

    def bounding_box(self):
        return np.zeros(1), np.array([self.length], dtype=float)

    def min_feature(self) -> float:
        return float(self.length)

    def describe(self) -> str:
        return f"interval(L={self.length:g})"


@dataclass(frozen=True, eq=False)
class Box(Domain):
    """The open box (0, L_1) x ... x (0, L_m)."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if len(lengths) < 1:
            raise ValueError("box needs at least one side length")
        if any(v <= 0 for v in lengths):
            raise ValueError("box side lengths must be positive")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "dim", len(lengths))

    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def diameter(self) -> float:
        return float(math.sqrt(sum(v * v for v in self.lengths)))

    def _contains(self, pts):
        arr = np.asarray(self.lengths)
        return np.all((pts > 0) & (pts < arr), axis=1)

    def sample(self, rng, n):
        return rng.random((n, self.dim)) * np.asarray(self.lengths)

    def bounding_box(self):
        return np.zeros(self.dim), np.asarray(self.lengths, dtype=float)

    def min_feature(self) -> float:
        return float(min(self.lengths))

    def describe(self) -> str:
        sides = "x".join(f"{v:g}" for v in self.lengths)
        return f"box({sides})"


@dataclass(frozen=True, eq=False)
class Ball(Domain):
    """The open ball of given center and radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(v) for v in np.atleast_1d(self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if len(center) < 1:
            raise ValueError("ball center needs at least one coordinate")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "dim", len(center))

    def volume(self) -> float:
        m = self.dim
        unit = math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)
        return unit * self.radius**m

    def diameter(self) -> float:
        return 2.0 * self.radius

    def _contains(self, pts):
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return d2 < self.radius**2

    def sample(self, rng, n):
        # Rejection from the bounding box; acceptance >= 0.32 for m <= 3.
        out = np.empty((n, self.dim))
        filled = 0
        c = np.asarray(self.center)
        while filled < n:
            batch = max(n - filled, 128)
            cand = c + (rng.random((2 * batch, self.dim)) * 2.0 - 1.0) * self.radius
            keep = cand[np.sum((cand - c) ** 2, axis=1) < self.radius**2]
            take = min(len(keep), n - filled)
            out[filled : filled + take] = keep[:take]
            filled += take
        return out

    def bounding_box(self):
        c = np.asarray(self.center, dtype=float)
        r = self.radius
        return c - r, c + r

    def min_feature(self) -> float:
        return float(self.radius)

    def describe(self) -> str:
        return f"ball(m={self.dim}, r={self.radius:g})"


@dataclass(frozen=True, eq=False)
class BoxUnion(Domain):
    """A finite union of pairwise-disjoint open axis-aligned boxes.

    Each member is given as ``(corner, lengths)``.  Overlapping interiors are
    rejected at construction rather than merged.
    """

    boxes: tuple

    def __post_init__(self):
        norm = []
        for corner, lengths in self.boxes:
            c = tuple(float(v) for v in corner)
            l = tuple(float(v) for v in lengths)
            if len(c) != len(l):
                raise ValueError("corner and lengths must have equal dimension")
            if any(v <= 0 for v in l):
                raise ValueError("box side lengths must be positive")
            norm.append((c, l))
        if not norm:
            raise ValueError("box union needs at least one box")
        dims = {len(c) for c, _ in norm}
        if len(dims) != 1:
            raise ValueError("all boxes must share one dimension")
        for i in range(len(norm)):
            for j in range(i + 1, len(norm)):
                if _boxes_overlap(norm[i], norm[j]):
                    raise ValueError(
                        f"boxes {i} and {j} have overlapping interiors"
                    )
        object.__setattr__(self, "boxes", tuple(norm))
        object.__setattr__(self, "dim", dims.pop())

    def volume(self) -> float:
        return float(sum(np.prod(l) for _, l in self.boxes))

    def diameter(self) -> float:
        corners = _box_union_corners(self.boxes)
        d2 = np.sum(
            (corners[:, None, :] - corners[None, :, :]) ** 2, axis=-1
        )
        return float(math.sqrt(d2.max()))

    def _contains(self, pts):
        mask = np.zeros(len(pts), dtype=bool)
        for corner, lengths in self.boxes:
            c = np.asarray(corner)
            l = np.asarray(lengths)
            mask |= np.all((pts > c) & (pts < c + l), axis=1)
        return mask

    def sample(self, rng, n):
        vols = np.array([np.prod(l) for _, l in self.boxes])
        cum = np.cumsum(vols) / vols.sum()
        # One draw selects the box (volume-weighted), m draws place the point.
        idx = np.searchsorted(cum, rng.random(n), side="right")
        idx = np.minimum(idx, len(self.boxes) - 1)
        u = rng.random((n, self.dim))
        corners = np.array([c for c, _ in self.boxes])
        lengths = np.array([l for _, l in self.boxes])
        return corners[idx] + u * lengths[idx]

    def bounding_box(self):
        corners = np.array([c for c, _ in self.boxes])
        uppers = corners + np.array([l for _, l in self.boxes])
        return corners.min(axis=0), uppers.max(axis=0)

    def min_feature(self) -> float:
        return float(min(min(l) for _, l in self.boxes))

    def describe(self) -> str:
        return f"box_union({len(self.boxes)} boxes, m={self.dim})"


@dataclass(frozen=True, eq=False)
class Raster(Domain):
    """An occupancy grid: the union of occupied cells of side ``spacing``.

    Cell ``(i_1, ..., i_m)`` covers ``origin + [i, i+1) * spacing`` per axis.
    """

    origin: tuple
    spacing: float
    cells: np.ndarray

    def __post_init__(self):
        cells = np.ascontiguousarray(np.asarray(self.cells, dtype=bool))
        origin = tuple(float(v) for v in np.atleast_1d(self.origin))
        if not self.spacing > 0:
            raise ValueError("raster spacing must be positive")
        if cells.ndim != len(origin):
            raise ValueError("origin dimension must match the cell grid rank")
        if not cells.any():
            raise ValueError("raster occupancy grid is empty")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "dim", cells.ndim)

    @property
    def occupied_count(self) -> int:
        return int(self.cells.sum())

    def occupied_centers(self) -> np.ndarray:
        """Centers of occupied cells as an (N, m) array."""
        idx = np.argwhere(self.cells)
        return np.asarray(self.origin) + (idx + 0.5) * self.spacing

    def volume(self) -> float:
        return self.occupied_count * self.spacing**self.dim

    def diameter(self) -> float:
        pts = self._hull_candidate_corners()
        if self.dim == 1:
            return float(pts.max() - pts.min())
        if len(pts) > 4096:
            try:
                hull = ConvexHull(pts)
                pts = pts[hull.vertices]
            except QhullError:
                pass  # degenerate cloud; fall through to direct pairwise
        best = 0.0
        for i in range(0, len(pts), 512):
            chunk = pts[i : i + 512]
            d2 = np.sum((chunk[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
            best = max(best, float(d2.max()))
        return math.sqrt(best)

    def _hull_candidate_corners(self) -> np.ndarray:
        # Cells fully surrounded by occupied cells cannot host an extreme
        # corner, so prune them before collecting corner points.
        interior = ndimage.binary_erosion(
            self.cells, structure=np.ones((3,) * self.dim, dtype=bool)
        )
        shell = self.cells & ~interior
        idx = np.argwhere(shell if shell.any() else self.cells)
        offsets = np.stack(
            np.meshgrid(*([[0.0, 1.0]] * self.dim), indexing="ij"), axis=-1
        ).reshape(-1, self.dim)
        corners = (idx[:, None, :] + offsets[None, :, :]).reshape(-1, self.dim)
        corners = np.unique(corners, axis=0)
        return np.asarray(self.origin) + corners * self.spacing

    def _contains(self, pts):
        rel = (pts - np.asarray(self.origin)) / self.spacing
        idx = np.floor(rel).astype(int)
        inside = np.all((idx >= 0) & (idx < self.cells.shape), axis=1)
        mask = np.zeros(len(pts), dtype=bool)
        if inside.any():
            flat = np.ravel_multi_index(idx[inside].T, self.cells.shape)
            mask[inside] = self.cells.ravel()[flat]
        return mask

    def sample(self, rng, n):
        idx = np.argwhere(self.cells)
        pick = rng.integers(0, len(idx), size=n)
        u = rng.random((n, self.dim))
        return np.asarray(self.origin) + (idx[pick] + u) * self.spacing

    def bounding_box(self):
        lo = np.asarray(self.origin, dtype=float)
        return lo, lo + np.asarray(self.cells.shape) * self.spacing

    def min_feature(self) -> float:
        return float(self.spacing)

    def describe(self) -> str:
        return (
            f"raster(m={self.dim}, h={self.spacing:g}, "
            f"cells={self.occupied_count})"
        )


def _boxes_overlap(a, b) -> bool:
    (ca, la), (cb, lb) = a, b
    return all(
        ca[k] < cb[k] + lb[k] and cb[k] < ca[k] + la[k] for k in range(len(ca))
    )


def _box_union_corners(boxes) -> np.ndarray:
    pts = []
    for corner, lengths in boxes:
        m = len(corner)
        for mask in range(2**m):
            pts.append(
                [
                    corner[k] + (lengths[k] if (mask >> k) & 1 else 0.0)
                    for k in range(m)
                ]
            )
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# Functional API


def volume(d: Domain) -> float:
    """Lebesgue volume |Omega|; exact except for rasters (cell count * h^m)."""
    return d.volume()


def diameter(d: Domain) -> float:
    """Diameter sup{|x-y| : x, y in Omega}; exact for every supported shape."""
    return d.diameter()


def contains(d: Domain, points):
    """Open-set membership test (single point or batch)."""
    return d.contains(points)


def sample_uniform(d: Domain, rng: np.random.Generator, n: int | None = None):
    """Uniform sample(s) from the set using an explicit generator.

    With ``n=None`` returns one point (shape ``(m,)``); otherwise an
    ``(n, m)`` array.
    """
    pts = d.sample(rng, 1 if n is None else int(n))
    return pts[0] if n is None else pts


def rasterize(d: Domain, h: float) -> Raster:
    """Cell-center rasterization of ``d`` at spacing ``h``.

    The grid covers the bounding box of ``d`` starting at its lower corner.
    Raises :class:`ResolutionError` when ``h`` does not resolve the smallest
    feature of the domain.
    """
    if not h > 0:
        raise ValueError("spacing must be positive")
    if h >= d.min_feature():
        raise ResolutionError(
            f"resolution too coarse: h={h:g} does not resolve the smallest "
            f"feature ({d.min_feature():g}) of {d.describe()}"
        )
    lo, hi = d.bounding_box()
    shape = tuple(
        max(1, int(math.ceil((hi[k] - lo[k]) / h - 1e-12)))
        for k in range(d.dim)
    )
    axes = [lo[k] + (np.arange(shape[k]) + 0.5) * h for k in range(d.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    occ = d.contains(grid.reshape(-1, d.dim)).reshape(shape)
    return Raster(origin=tuple(lo), spacing=h, cells=occ)


# ---------------------------------------------------------------------------
# JSON configuration

_KIND_FIELDS = {
    "interval": {"length"},
    "box": {"lengths"},
    "ball": {"center", "radius"},
    "box_union": {"boxes"},
    "raster": {"origin", "spacing", "cells"},
}


def domain_from_dict(cfg: dict) -> Domain:
    """Build a domain from its JSON configuration dictionary.

    The schema is strict: ``dimension`` and ``kind`` are required, the
    remaining fields are exactly the kind-specific ones, and anything else
    is an error.
    """
    if not isinstance(cfg, dict):
        raise ValueError("domain configuration must be a JSON object")
    missing = {"dimension", "kind"} - cfg.keys()
    if missing:
        raise ValueError(f"domain configuration lacks fields: {sorted(missing)}")
    kind = cfg["kind"]
    if kind not in _KIND_FIELDS:
        raise ValueError(f"unknown domain kind {kind!r}")
    allowed = _KIND_FIELDS[kind] | {"dimension", "kind"}
    unknown = cfg.keys() - allowed
    if unknown:
        raise ValueError(f"unknown fields for kind {kind!r}: {sorted(unknown)}")
    lacking = _KIND_FIELDS[kind] - cfg.keys()
    if lacking:
        raise ValueError(f"kind {kind!r} requires fields: {sorted(lacking)}")
    m = cfg["dimension"]
    if not (isinstance(m, int) and m >= 1):
        raise ValueError("dimension must be a positive integer")

    if kind == "interval":
        if m != 1:
            raise ValueError("interval domains are one-dimensional")
        return Interval(cfg["length"])
    if kind == "box":
        if len(cfg["lengths"]) != m:
            raise ValueError("lengths must have `dimension` entries")
        return Box(tuple(cfg["lengths"]))
    if kind == "ball":
        if len(cfg["center"]) != m:
            raise ValueError("center must have `dimension` coordinates")
        return Ball(tuple(cfg["center"]), cfg["radius"])
    if kind == "box_union":
        boxes = []
        for b in cfg["boxes"]:
            if not isinstance(b, dict) or b.keys() != {"corner", "lengths"}:
                raise ValueError(
                    "each box must be an object with exactly "
                    "'corner' and 'lengths'"
                )
            if len(b["corner"]) != m or len(b["lengths"]) != m:
                raise ValueError("box corner/lengths must match `dimension`")
            boxes.append((tuple(b["corner"]), tuple(b["lengths"])))
        return BoxUnion(tuple(boxes))
    # raster
    cells = np.asarray(cfg["cells"])
    if cells.ndim != m:
        raise ValueError("cells array rank must equal `dimension`")
    if len(cfg["origin"]) != m:
        raise ValueError("origin must have `dimension` coordinates")
    return Raster(tuple(cfg["origin"]), cfg["spacing"], cells.astype(bool))


def domain_to_dict(d: Domain) -> dict:
    """Inverse of :func:`domain_from_dict`."""
    if isinstance(d, Interval):
        return {"dimension": 1, "kind": "interval", "length": d.length}
    if isinstance(d, Box):
        return {"dimension": d.dim, "kind": "box", "lengths": list(d.lengths)}
    if isinstance(d, Ball):
        return {
            "dimension": d.dim,
            "kind": "ball",
            "center": list(d.center),
            "radius": d.radius,
        }
    if isinstance(d, BoxUnion):
        return {
            "dimension": d.dim,
            "kind": "box_union",
            "boxes": [
                {"corner": list(c), "lengths": list(l)} for c, l in d.boxes
            ],
        }
    if isinstance(d, Raster):
        return {
            "dimension": d.dim,
            "kind": "raster",
            "origin": list(d.origin),
            "spacing": d.spacing,
            "cells": d.cells.astype(int).tolist(),
        }
    raise TypeError(f"unsupported domain type {type(d).__name__}")


def load_domain(path) -> Domain:
    """Load a domain from a JSON configuration file."""
    with open(Path(path), "r", encoding="utf-8") as fh:
        return domain_from_dict(json.load(fh))
