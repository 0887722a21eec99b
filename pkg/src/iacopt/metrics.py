"""Hypervolume and normalization for 2- and 3-objective minimization fronts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class NormalizationBounds:
    ideal: tuple[float, ...]
    nadir: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.ideal) != len(self.nadir):
            raise ValueError("ideal and nadir dimensions differ")
        if any(lo > hi for lo, hi in zip(self.ideal, self.nadir)):
            raise ValueError("ideal must not exceed nadir")

    @property
    def zero_range(self) -> tuple[bool, ...]:
        return tuple(lo == hi for lo, hi in zip(self.ideal, self.nadir))


def _as_points(front) -> np.ndarray:
    points = np.asarray(front, dtype=float)
    if points.size == 0:
        return points.reshape(0, points.shape[-1] if points.ndim == 2 else 0)
    if points.ndim != 2:
        raise ValueError("front must be a 2-D array of objective vectors")
    return points


def build_bounds(fronts: Iterable) -> NormalizationBounds:
    """Componentwise min/max over the union of all given fronts."""
    stacked = [_as_points(f) for f in fronts]
    stacked = [f for f in stacked if len(f)]
    if not stacked:
        raise ValueError("cannot build bounds from an empty pool of points")
    pool = np.vstack(stacked)
    return NormalizationBounds(tuple(pool.min(axis=0).tolist()), tuple(pool.max(axis=0).tolist()))


def normalize(front, bounds: NormalizationBounds) -> np.ndarray:
    points = _as_points(front)
    ideal = np.asarray(bounds.ideal)
    span = np.asarray(bounds.nadir) - ideal
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (points - ideal) / safe, 0.0) if len(points) else points


def _inside(points: np.ndarray, reference: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    return points[np.all(points < reference, axis=1)]


def _check_dimension(d: int) -> None:
    if d not in (2, 3):
        raise ValueError(f"hypervolume supports 2 or 3 objectives, got {d}")


def _hv2d(points: np.ndarray, ref_x: float, ref_y: float) -> float:
    order = np.lexsort((points[:, 1], points[:, 0]))
    volume = 0.0
    best_y = ref_y
    for x, y in points[order]:
        if y < best_y:
            volume += (ref_x - x) * (best_y - y)
            best_y = y
    return volume


def hypervolume(front, reference: Sequence[float]) -> float:
    """Volume dominated by ``front`` and bounded by ``reference`` (minimization).

    Points not strictly better than the reference in every objective are ignored.
    2-D uses a sort-and-sweep; 3-D sweeps slabs along the last objective and
    sums 2-D areas.
    """
    ref = np.asarray(reference, dtype=float)
    _check_dimension(len(ref))
    points = _as_points(front)
    if len(points) and points.shape[1] != len(ref):
        raise ValueError("front and reference dimensions differ")
    points = _inside(points, ref)
    if len(points) == 0:
        return 0.0
    if len(ref) == 2:
        return _hv2d(points, ref[0], ref[1])
    points = points[np.argsort(points[:, 2], kind="stable")]
    z_levels = np.unique(points[:, 2])
    volume = 0.0
    for k, z in enumerate(z_levels):
        z_next = z_levels[k + 1] if k + 1 < len(z_levels) else ref[2]
        active = points[points[:, 2] <= z]
        volume += _hv2d(active[:, :2], ref[0], ref[1]) * (z_next - z)
    return volume


def hv_contributions(front, reference: Sequence[float]) -> np.ndarray:
    """Exclusive hypervolume contribution of every point of ``front``.

    Works on the grid spanned by the points' coordinates: a cell covered by exactly
    one point belongs to that point's exclusive region. Duplicated and dominated
    points therefore get 0, as do points outside the reference box.
    """
    ref = np.asarray(reference, dtype=float)
    _check_dimension(len(ref))
    points = _as_points(front)
    contributions = np.zeros(len(points))
    if len(points) == 0:
        return contributions
    if points.shape[1] != len(ref):
        raise ValueError("front and reference dimensions differ")
    valid = np.flatnonzero(np.all(points < ref, axis=1))
    if len(valid) == 0:
        return contributions
    P = points[valid]
    d = len(ref)
    index = np.empty((len(P), d), dtype=np.intp)
    widths = []
    for axis in range(d):
        levels = np.unique(P[:, axis])
        index[:, axis] = np.searchsorted(levels, P[:, axis])
        widths.append(np.diff(np.append(levels, ref[axis])))
    shape = tuple(len(w) for w in widths)
    cover = np.zeros(shape, dtype=np.int64)
    owner = np.zeros(shape, dtype=np.int64)
    cell = tuple(index.T)
    np.add.at(cover, cell, 1)
    np.add.at(owner, cell, np.arange(len(P)))
    for axis in range(d):
        np.cumsum(cover, axis=axis, out=cover)
        np.cumsum(owner, axis=axis, out=owner)
    volume = widths[0]
    for w in widths[1:]:
        volume = np.multiply.outer(volume, w)
    exclusive = cover == 1
    contributions[valid] = np.bincount(
        owner[exclusive], weights=volume[exclusive], minlength=len(P)
    )
    return contributions


def hv_grid_oracle(front, reference: Sequence[float], resolution: int) -> float:
    """Approximate hypervolume by counting dominated grid-cell centers.

    The box spans from the origin (or lower, if the front reaches below it) to the
    reference point, split into ``resolution`` cells per axis.
    """
    if resolution < 10:
        raise ValueError("resolution must be >= 10")
    ref = np.asarray(reference, dtype=float)
    points = _as_points(front)
    if len(points) == 0:
        return 0.0
    lower = np.minimum(points.min(axis=0), 0.0)
    step = (ref - lower) / resolution
    centers = [lower[a] + step[a] * (np.arange(resolution) + 0.5) for a in range(len(ref))]
    covered = np.zeros((resolution,) * len(ref), dtype=bool)
    for p in points:
        mask = centers[0] >= p[0]
        for a in range(1, len(ref)):
            mask = np.multiply.outer(mask, centers[a] >= p[a])
        covered |= mask
    return float(covered.sum() * np.prod(step))
