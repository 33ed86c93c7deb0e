"""Probe nets with certified mesh bounds, greedy separated nets, and exact
nearest-neighbor search.

A probe net is a finite point set whose certified mesh delta guarantees that
every domain point is within delta of some net point; suprema over the domain
can then be sandwiched to within delta. Mesh proofs per kind:

* Interval / Polyline / ArcsineInterval: arclength grid of step 2*delta
  (chord <= arc on segments, equality on straight pieces).
* Cube d: axis grid of step 2*delta/sqrt(d); half cell diagonal is delta.
* Sphere d: grids on all faces of the circumscribed cube surface, centrally
  projected x -> x/|x|. The projection is 1-Lipschitz on {|x| >= 1}, and every
  sphere point is the projection of a cube-surface point, so the face mesh
  carries over unchanged.
* Ball d: interior axis grid certifying 3*delta/4 plus a boundary sphere net
  at delta/4. A point farther than 3*delta/4 from the boundary has its whole
  grid cell inside the ball; a point closer than that reaches a boundary net
  point through its radial projection (3*delta/4 + delta/4 = delta).
* Polyhedron3: interior grid certifying delta/2 away from the boundary, plus
  triangle lattices on (fan-triangulated) faces at mesh delta/2; points near
  the boundary reach a face net through their boundary projection.
* Cantor depth D: both endpoints of all depth-k cylinders with 3^-k <= delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import UnsupportedDomainError
from .sampler import SeedSpec, sample
from .spaces import (
    ArcsineInterval,
    Ball,
    Cantor,
    Cube,
    Domain,
    IntervalUniform,
    Polyhedron3,
    Polyline,
    Sphere,
)


@dataclass(frozen=True)
class ProbeNet:
    domain: Domain
    points: np.ndarray
    certified_mesh: float

    def __post_init__(self):
        if self.certified_mesh <= 0:
            raise ValueError("certified mesh must be positive")


# ---------------------------------------------------------------------------
# Spatial index (exact nearest neighbor)
# ---------------------------------------------------------------------------


class SpatialIndex:
    """Exact Euclidean nearest-neighbor index over a fixed point set.

    Backed by a k-d tree; queries return exact minimum distances, with ties
    broken toward the lowest stored point index.
    """

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError("need a non-empty (n, dim) point array")
        self.points = points
        self._tree = cKDTree(points)

    def nearest(self, q) -> tuple[int, float]:
        q = np.asarray(q, dtype=float)
        dist, idx = self._tree.query(q)
        # deterministic tie-break: lowest index among exact-tie points
        ties = self._tree.query_ball_point(q, dist * (1.0 + 1e-12) + 1e-300)
        if ties:
            exact = [i for i in ties if np.linalg.norm(self.points[i] - q) == dist]
            if exact:
                idx = min(exact)
        return int(idx), float(dist)

    def nearest_distances(self, queries: np.ndarray, workers: int = -1) -> np.ndarray:
        """Vectorized exact nearest distances for a batch of query points."""
        dist, _ = self._tree.query(np.asarray(queries, dtype=float), workers=workers)
        return dist


def build_index(points: np.ndarray) -> SpatialIndex:
    return SpatialIndex(points)


def nearest(index: SpatialIndex, q) -> tuple[int, float]:
    return index.nearest(q)


# ---------------------------------------------------------------------------
# Greedy separated nets
# ---------------------------------------------------------------------------


def greedy_separated_net(pool: np.ndarray, separation: float) -> np.ndarray:
    """Maximal subset of `pool` with pairwise distances >= separation.

    The pool is processed in its given order, so the result is deterministic.
    Maximality means every pool point lies within `separation` of the output.
    """
    pool = np.asarray(pool, dtype=float)
    if pool.ndim == 1:
        pool = pool.reshape(-1, 1)
    if pool.shape[0] == 0:
        raise ValueError("pool must be non-empty")
    chosen: list[int] = []
    chosen_pts = np.empty((0, pool.shape[1]))
    # grid hash over cells of side `separation`: candidates for a conflict
    # lie in the 3^dim neighborhood of the query cell
    cell_of: dict[tuple, list[int]] = {}
    inv = 1.0 / separation
    dim = pool.shape[1]
    offsets = np.array(np.meshgrid(*([[-1, 0, 1]] * dim))).T.reshape(-1, dim)
    for i, p in enumerate(pool):
        cell = tuple(np.floor(p * inv).astype(np.int64))
        ok = True
        for off in offsets:
            for j in cell_of.get(tuple(np.asarray(cell) + off), ()):
                if np.linalg.norm(pool[j] - p) < separation:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            cell_of.setdefault(cell, []).append(i)
            chosen.append(i)
    return pool[chosen]


# ---------------------------------------------------------------------------
# Probe net construction
# ---------------------------------------------------------------------------


def _segment_grid(a: np.ndarray, b: np.ndarray, mesh: float) -> np.ndarray:
    length = float(np.linalg.norm(b - a))
    n_steps = max(1, math.ceil(length / (2.0 * mesh)))
    t = np.linspace(0.0, 1.0, n_steps + 1)
    return a + t[:, None] * (b - a)


def _axis_grid(low: float, high: float, step: float) -> np.ndarray:
    n_steps = max(1, math.ceil((high - low) / step))
    return np.linspace(low, high, n_steps + 1)


def _cube_grid(d: int, mesh: float, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    step = 2.0 * mesh / math.sqrt(d)
    axes = [_axis_grid(low, high, step)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _sphere_net(d: int, mesh: float) -> np.ndarray:
    # grids on the faces of the cube [-1,1]^(d+1) surface, projected radially
    amb = d + 1
    step = 2.0 * mesh / math.sqrt(d)
    axis = _axis_grid(-1.0, 1.0, step)
    face_grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    pieces = []
    for ax in range(amb):
        for sign in (-1.0, 1.0):
            pts = np.empty((face_grid.shape[0], amb))
            cols = [c for c in range(amb) if c != ax]
            pts[:, cols] = face_grid
            pts[:, ax] = sign
            pieces.append(pts)
    pts = np.concatenate(pieces)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _ball_net(d: int, mesh: float) -> np.ndarray:
    interior_mesh = 0.75 * mesh
    grid = _cube_grid(d, interior_mesh, -1.0, 1.0)
    norms = np.linalg.norm(grid, axis=1)
    inside = grid[norms <= 1.0]
    near = grid[(norms > 1.0) & (norms <= 1.0 + interior_mesh)]
    if near.size:
        near = near / np.linalg.norm(near, axis=1, keepdims=True)
    boundary = _sphere_net(d - 1, mesh / 4.0) if d >= 2 else np.array([[-1.0], [1.0]])
    return np.concatenate([inside, near, boundary])


def _triangle_lattice(a, b, c, mesh: float) -> np.ndarray:
    # subdivide so every subtriangle has diameter <= mesh
    diam = max(np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c))
    k = max(1, math.ceil(diam / mesh))
    pts = []
    for i in range(k + 1):
        for j in range(k + 1 - i):
            pts.append(a + (i / k) * (b - a) + (j / k) * (c - a))
    return np.array(pts)


def _polyhedron_net(domain: Polyhedron3, mesh: float) -> np.ndarray:
    half = mesh / 2.0
    lo = domain.vertices.min(axis=0)
    hi = domain.vertices.max(axis=0)
    step = 2.0 * half / math.sqrt(3.0)
    axes = [_axis_grid(lo[i], hi[i], step) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = grid[domain.contains_many(grid)]
    pieces = [inside] if inside.size else []
    for face in domain.faces:
        verts = domain.vertices[list(face)]
        # fan triangulation; assumes convex (or star-shaped) face polygons
        for i in range(1, len(verts) - 1):
            pieces.append(_triangle_lattice(verts[0], verts[i], verts[i + 1], half))
    pieces.append(domain.vertices)
    return np.concatenate(pieces)


def _cantor_net(domain: Cantor, mesh: float) -> tuple[np.ndarray, float]:
    k = min(domain.depth, max(1, math.ceil(-math.log(mesh) / math.log(3.0))))
    lefts = np.array([0.0])
    for depth in range(1, k + 1):
        lefts = np.concatenate([lefts, lefts + 2.0 * 3.0**-depth])
    cyl = 3.0**-k
    pts = np.concatenate([lefts, lefts + cyl])
    return np.unique(pts).reshape(-1, 1), cyl


def build_probe_net(domain: Domain, target_mesh: float) -> ProbeNet:
    """Probe net with certified mesh <= target_mesh for the given domain."""
    if target_mesh <= 0:
        raise ValueError("target mesh must be positive")
    if target_mesh >= domain.diameter:
        raise ValueError("target mesh must be below the domain diameter")

    mesh = target_mesh
    if isinstance(domain, IntervalUniform):
        pts = _segment_grid(np.array([0.0]), np.array([1.0]), mesh)
    elif isinstance(domain, ArcsineInterval):
        pts = _segment_grid(np.array([-1.0]), np.array([1.0]), mesh)
    elif isinstance(domain, Polyline):
        pts = np.concatenate(
            [
                _segment_grid(domain.vertices[i], domain.vertices[i + 1], mesh)
                for i in range(len(domain.vertices) - 1)
            ]
        )
    elif isinstance(domain, Cube):
        pts = _cube_grid(domain.d, mesh)
    elif isinstance(domain, Sphere):
        pts = _sphere_net(domain.d, mesh)
    elif isinstance(domain, Ball):
        pts = _ball_net(domain.d, mesh)
    elif isinstance(domain, Polyhedron3):
        pts = _polyhedron_net(domain, mesh)
    elif isinstance(domain, Cantor):
        pts, mesh = _cantor_net(domain, mesh)
    else:
        raise UnsupportedDomainError(f"no probe net construction for {domain!r}")

    pts = np.ascontiguousarray(pts, dtype=float)
    pts.setflags(write=False)
    return ProbeNet(domain=domain, points=pts, certified_mesh=mesh)


def spot_check_mesh(net: ProbeNet, n_samples: int = 10_000, master_seed: int = 987) -> float:
    """Max distance from fresh measure samples to the net; must be <= certified mesh."""
    sset = sample(net.domain, n_samples, SeedSpec(master_seed, 0))
    index = build_index(net.points)
    return float(index.nearest_distances(sset.points).max())
