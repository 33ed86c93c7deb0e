"""Reproducible i.i.d. sampling from the catalog domains.

Streams are counter-based: SeedSpec(master_seed, stream_id) keys a Philox
generator, so trial t of a study can be regenerated in isolation and results
do not depend on scheduling. Gaussian variates are produced by inverse-CDF
from the uniform stream to keep the stream contract exact across platforms.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from . import spaces
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

GENERATOR_NAME = f"numpy.random.Philox-{np.__version__}"


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.master_seed < 2**64) or not (0 <= self.stream_id < 2**64):
            raise ValueError("seeds must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SampleSet:
    domain: Domain
    seed: SeedSpec
    points: np.ndarray  # (N, ambient_dim), read-only

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def _uniform_open(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniforms clamped into (0, 1) so that inverse CDFs stay finite."""
    u = rng.random(shape)
    tiny = 2.0**-53
    return np.clip(u, tiny, 1.0 - tiny)


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return ndtri(_uniform_open(rng, shape))


def _sphere_points(rng, n, d):
    g = _gaussian(rng, (n, d + 1))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero vector has probability 0; regenerate-free clamp is fine
    norms[norms == 0.0] = 1.0
    return g / norms


def _ball_points(rng, n, d):
    dirs = _sphere_points(rng, n, d - 1)
    radii = _uniform_open(rng, (n, 1)) ** (1.0 / d)
    return dirs * radii


def _polyline_points(rng, n, domain: Polyline):
    probs = domain.edge_lengths / domain.total_length
    idx = rng.choice(len(probs), size=n, p=probs)
    t = rng.random((n, 1))
    a = domain.vertices[idx]
    b = domain.vertices[idx + 1]
    return a + t * (b - a)


def _polyhedron_points(rng, n, domain: Polyhedron3):
    probs = domain.tet_volumes / domain.volume
    idx = rng.choice(len(probs), size=n, p=probs)
    # folded-coordinate method: three uniforms folded into the unit simplex
    s, t, u = rng.random((3, n))
    flip = s + t > 1.0
    s[flip], t[flip] = 1.0 - s[flip], 1.0 - t[flip]
    over = t + u > 1.0
    t_old, u_old = t.copy(), u.copy()
    t[over] = 1.0 - u_old[over]
    u[over] = 1.0 - s[over] - t_old[over]
    mid = (~over) & (s + t + u > 1.0)
    s_old, u_old = s.copy(), u.copy()
    u[mid] = s_old[mid] + t[mid] + u_old[mid] - 1.0
    s[mid] = 1.0 - t[mid] - u_old[mid]
    w0 = 1.0 - s - t - u
    pts = np.empty((n, 3))
    for j, tet in enumerate(domain.tetrahedra):
        sel = idx == j
        if not np.any(sel):
            continue
        v0, v1, v2, v3 = (domain.vertices[i] for i in tet)
        pts[sel] = (
            np.outer(w0[sel], v0)
            + np.outer(s[sel], v1)
            + np.outer(t[sel], v2)
            + np.outer(u[sel], v3)
        )
    return pts


def _cantor_points(rng, n, domain: Cantor):
    bits = rng.random((n, domain.depth)) < 0.5
    weights = 2.0 * (3.0 ** -np.arange(1, domain.depth + 1))
    return (bits @ weights).reshape(n, 1)


def sample(domain: Domain, n: int, seed: SeedSpec) -> SampleSet:
    """Draw N i.i.d. points from the domain's normalized measure."""
    if n < 1:
        raise ValueError("need at least one point")
    rng = seed.generator()
    if isinstance(domain, Sphere):
        pts = _sphere_points(rng, n, domain.d)
    elif isinstance(domain, Ball):
        pts = _ball_points(rng, n, domain.d)
    elif isinstance(domain, Cube):
        pts = rng.random((n, domain.d))
    elif isinstance(domain, IntervalUniform):
        pts = rng.random((n, 1))
    elif isinstance(domain, ArcsineInterval):
        pts = np.cos(math.pi * _uniform_open(rng, (n, 1)))
    elif isinstance(domain, Polyline):
        pts = _polyline_points(rng, n, domain)
    elif isinstance(domain, Polyhedron3):
        pts = _polyhedron_points(rng, n, domain)
    elif isinstance(domain, Cantor):
        pts = _cantor_points(rng, n, domain)
    else:
        raise spaces.UnsupportedDomainError(f"cannot sample {domain!r}")
    pts.setflags(write=False)
    return SampleSet(domain=domain, seed=seed, points=pts)


def sample_stream(domain: Domain, n: int, master_seed: int, trial_count: int):
    """Yield independent, individually reproducible SampleSets, one per stream id."""
    if trial_count < 1:
        raise ValueError("trial_count must be >= 1")
    for t in range(trial_count):
        yield sample(domain, n, SeedSpec(master_seed, t))


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def save_sample_set(sset: SampleSet, path: str | Path) -> None:
    """Write little-endian float64 coordinates plus a JSON sidecar."""
    path = Path(path)
    sset.points.astype("<f8").tofile(path)
    sidecar = {
        "domain": spaces.domain_to_dict(sset.domain),
        "N": sset.n_points,
        "seed": {"master_seed": sset.seed.master_seed, "stream_id": sset.seed.stream_id},
        "generator": GENERATOR_NAME,
        "ambient_dim": sset.domain.ambient_dim,
    }
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))


def load_sample_set(path: str | Path) -> SampleSet:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    domain = spaces.domain_from_dict(sidecar["domain"])
    pts = np.fromfile(path, dtype="<f8").reshape(sidecar["N"], sidecar["ambient_dim"])
    pts.setflags(write=False)
    seed = SeedSpec(sidecar["seed"]["master_seed"], sidecar["seed"]["stream_id"])
    return SampleSet(domain=domain, seed=seed, points=pts)


def save_sample_csv(sset: SampleSet, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(sset.domain.ambient_dim)])
        writer.writerows(sset.points.tolist())
