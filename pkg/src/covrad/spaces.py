"""Catalog of metric-measure domains and their geometric constants.

Every domain is a compact subset of Euclidean space carrying a normalized
measure. The catalog is closed: samplers, probe nets and limit constants are
implemented per kind, and users cannot register new kinds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGeometryError, UnsupportedDomainError

LOG2_OVER_LOG3 = math.log(2.0) / math.log(3.0)


def unit_ball_volume(s: int) -> float:
    """Volume of the unit ball in s dimensions, pi^(s/2) / Gamma(1 + s/2)."""
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise ValueError(f"dimension must be a positive integer, got {s!r}")
    return math.pi ** (s / 2.0) / math.gamma(1.0 + s / 2.0)


# ---------------------------------------------------------------------------
# Domain models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    """Unit sphere of intrinsic dimension d embedded in R^(d+1)."""

    d: int
    kind: str = field(default="Sphere", init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("sphere dimension must be >= 1")

    @property
    def intrinsic_dim(self) -> float:
        return self.d

    @property
    def ambient_dim(self) -> int:
        return self.d + 1

    @property
    def diameter(self) -> float:
        return 2.0


@dataclass(frozen=True)
class Ball:
    """Closed unit ball in R^d."""

    d: int
    kind: str = field(default="Ball", init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("ball dimension must be >= 1")

    @property
    def intrinsic_dim(self) -> float:
        return self.d

    @property
    def ambient_dim(self) -> int:
        return self.d

    @property
    def diameter(self) -> float:
        return 2.0


@dataclass(frozen=True)
class Cube:
    """Unit cube [0,1]^d."""

    d: int
    kind: str = field(default="Cube", init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("cube dimension must be >= 1")

    @property
    def intrinsic_dim(self) -> float:
        return self.d

    @property
    def ambient_dim(self) -> int:
        return self.d

    @property
    def diameter(self) -> float:
        return math.sqrt(self.d)


@dataclass(frozen=True)
class IntervalUniform:
    """The interval [0,1] with Lebesgue measure."""

    kind: str = field(default="IntervalUniform", init=False)

    @property
    def intrinsic_dim(self) -> float:
        return 1

    @property
    def ambient_dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ArcsineInterval:
    """The interval [-1,1] with measure dx / (pi sqrt(1-x^2))."""

    kind: str = field(default="ArcsineInterval", init=False)

    @property
    def intrinsic_dim(self) -> float:
        return 1

    @property
    def ambient_dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 2.0


class Polyline:
    """Chain of straight segments in R^D with normalized arclength measure."""

    kind = "Polyline"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError("polyline needs at least two vertices in R^D")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline vertices must be finite")
        seg = np.diff(v, axis=0)
        lengths = np.linalg.norm(seg, axis=1)
        if np.any(lengths == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        self.vertices = v
        self.vertices.setflags(write=False)
        self.edge_lengths = lengths
        self.edge_lengths.setflags(write=False)
        self.total_length = float(lengths.sum())

    @property
    def intrinsic_dim(self) -> float:
        return 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def diameter(self) -> float:
        # Cheap upper bound; enough for precondition screening.
        return self.total_length

    def __eq__(self, other):
        return isinstance(other, Polyline) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash((self.kind, self.vertices.tobytes()))

    def __repr__(self):
        return f"Polyline({self.vertices.tolist()!r})"


class Polyhedron3:
    """Polyhedron in R^3 given by vertices, a tetrahedral decomposition,
    face polygons, and edges annotated with their two adjacent faces.

    The decomposition is supplied, not computed; construction validates that
    the tetra volumes sum to the face-based (divergence theorem) volume.
    """

    kind = "Polyhedron3"

    def __init__(self, vertices, tetrahedra, faces, edges):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must be an (n, 3) array")
        tets = [tuple(int(i) for i in t) for t in tetrahedra]
        if not tets or any(len(t) != 4 for t in tets):
            raise ValueError("tetrahedra must be 4-tuples of vertex indices")
        self.vertices = v
        self.vertices.setflags(write=False)
        self.tetrahedra = tets
        self.faces = [tuple(int(i) for i in f) for f in faces]
        # each edge: (vertex_a, vertex_b, face_i, face_j)
        self.edges = [tuple(int(i) for i in e) for e in edges]
        if any(len(e) != 4 for e in self.edges):
            raise ValueError("edges must be (a, b, face_i, face_j) tuples")

        self.tet_volumes = np.array([self._tet_volume(t) for t in tets])
        if np.any(self.tet_volumes <= 0.0):
            raise InvalidGeometryError("tetrahedra must have positive volume")
        self.tet_volumes.setflags(write=False)
        self.volume = float(self.tet_volumes.sum())

        vol_faces = self._volume_from_faces()
        if not math.isclose(self.volume, vol_faces, rel_tol=1e-9):
            raise InvalidGeometryError(
                f"tetra volume sum {self.volume} disagrees with face volume {vol_faces}"
            )

    def _tet_volume(self, tet) -> float:
        a, b, c, d = (self.vertices[i] for i in tet)
        return abs(np.dot(b - a, np.cross(c - a, d - a))) / 6.0

    def face_normal(self, face) -> np.ndarray:
        """Newell-method area vector of a face polygon (not normalized)."""
        pts = self.vertices[list(face)]
        n = np.zeros(3)
        for i in range(len(pts)):
            p, q = pts[i], pts[(i + 1) % len(pts)]
            n += np.cross(p, q)
        return n / 2.0

    def _volume_from_faces(self) -> float:
        # Divergence theorem: V = (1/3) |sum_faces centroid . area_vector|,
        # with area vectors consistently oriented by the face winding.
        total = 0.0
        for face in self.faces:
            pts = self.vertices[list(face)]
            centroid = pts.mean(axis=0)
            total += float(np.dot(centroid, self.face_normal(face)))
        return abs(total) / 3.0

    def contains_many(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        inside = np.zeros(pts.shape[0], dtype=bool)
        for tet in self.tetrahedra:
            a, b, c, d = (self.vertices[i] for i in tet)
            m = np.column_stack([b - a, c - a, d - a])
            lam = (pts - a) @ np.linalg.inv(m).T
            inside |= np.all(lam >= -tol, axis=1) & (lam.sum(axis=1) <= 1.0 + tol)
        return inside

    def contains(self, point, tol: float = 1e-12) -> bool:
        p = np.asarray(point, dtype=float)
        for tet in self.tetrahedra:
            a, b, c, d = (self.vertices[i] for i in tet)
            m = np.column_stack([b - a, c - a, d - a])
            try:
                lam = np.linalg.solve(m, p - a)
            except np.linalg.LinAlgError:
                continue
            if np.all(lam >= -tol) and lam.sum() <= 1.0 + tol:
                return True
        return False

    @property
    def intrinsic_dim(self) -> float:
        return 3

    @property
    def ambient_dim(self) -> int:
        return 3

    @property
    def diameter(self) -> float:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def __eq__(self, other):
        return (
            isinstance(other, Polyhedron3)
            and np.array_equal(self.vertices, other.vertices)
            and self.tetrahedra == other.tetrahedra
            and self.faces == other.faces
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.kind, self.vertices.tobytes(), tuple(self.tetrahedra)))

    def __repr__(self):
        return f"Polyhedron3(<{len(self.vertices)} vertices, {len(self.tetrahedra)} tets>)"


@dataclass(frozen=True)
class Cantor:
    """Middle-thirds Cantor set truncated at digit depth `depth`.

    The truncated set consists of the 2^depth left endpoints of the
    depth-`depth` cylinders; all guarantees hold up to resolution 3^-depth.
    """

    depth: int = 40
    kind: str = field(default="Cantor", init=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("Cantor depth must be >= 1")

    @property
    def intrinsic_dim(self) -> float:
        return LOG2_OVER_LOG3

    @property
    def ambient_dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 1.0


Domain = Sphere | Ball | Cube | IntervalUniform | ArcsineInterval | Polyline | Polyhedron3 | Cantor


# ---------------------------------------------------------------------------
# Masses and limit constants
# ---------------------------------------------------------------------------


def hausdorff_mass(domain: Domain) -> float:
    """Total s-dimensional Hausdorff mass of the domain (unit-cube normalization)."""
    if isinstance(domain, Sphere):
        return (domain.d + 1) * unit_ball_volume(domain.d + 1)
    if isinstance(domain, Ball):
        return unit_ball_volume(domain.d)
    if isinstance(domain, (Cube, IntervalUniform)):
        return 1.0
    if isinstance(domain, Polyline):
        return domain.total_length
    if isinstance(domain, Polyhedron3):
        return domain.volume
    raise UnsupportedDomainError(
        f"no single mass constant for {domain.kind}; use regularity_witness instead"
    )


def min_dihedral_angle(domain: Polyhedron3) -> float:
    """Smallest interior dihedral angle over the edges of a polyhedron, in radians.

    Each edge carries its two adjacent faces. The wedge angle between the two
    face half-planes is resolved to the interior side by probing whether the
    wedge bisector points into the solid, so reflex edges yield angles in
    (pi, 2pi).
    """
    if not isinstance(domain, Polyhedron3):
        raise UnsupportedDomainError("dihedral angles are defined for Polyhedron3 only")
    if not domain.edges:
        raise ValueError("polyhedron has no edge adjacency data")

    best = math.inf
    for a, b, fi, fj in domain.edges:
        pa, pb = domain.vertices[a], domain.vertices[b]
        e = pb - pa
        elen = np.linalg.norm(e)
        if elen == 0.0:
            raise InvalidGeometryError("degenerate edge")
        e = e / elen
        mid = (pa + pb) / 2.0

        dirs = []
        for f in (fi, fj):
            face = domain.faces[f]
            if np.linalg.norm(domain.face_normal(face)) < 1e-14:
                raise InvalidGeometryError(f"face {f} has zero area")
            centroid = domain.vertices[list(face)].mean(axis=0)
            u = centroid - mid
            u = u - np.dot(u, e) * e
            norm = np.linalg.norm(u)
            if norm < 1e-14:
                raise InvalidGeometryError(f"face {f} is degenerate along edge ({a},{b})")
            dirs.append(u / norm)
        u1, u2 = dirs

        phi = math.acos(float(np.clip(np.dot(u1, u2), -1.0, 1.0)))
        bis = u1 + u2
        if np.linalg.norm(bis) < 1e-12:
            angle = math.pi
        else:
            bis = bis / np.linalg.norm(bis)
            eps = 1e-6 * elen
            angle = phi if domain.contains(mid + eps * bis) else 2.0 * math.pi - phi
        best = min(best, angle)
    return best


def limit_constant(domain: Domain, p: float = 1.0) -> float:
    """Limit of E[rho(X_N)^p] * (N / log N)^(p/s) for the given domain.

    Defined for the sharp-constant catalog only; Cantor and the arcsine
    interval admit two-sided bounds but no sharp constant.
    """
    if p < 1:
        raise ValueError("moment order p must be >= 1")
    if isinstance(domain, Sphere):
        d = domain.d
        base = (d + 1) * unit_ball_volume(d + 1) / unit_ball_volume(d)
        return base ** (p / d)
    if isinstance(domain, IntervalUniform):
        return 0.5**p
    if isinstance(domain, Polyline):
        return (domain.total_length / 2.0) ** p
    if isinstance(domain, Ball):
        if domain.d < 2:
            raise UnsupportedDomainError(
                "ball limit constant needs d >= 2; model [-1,1] as a Polyline"
            )
        d = domain.d
        return (2.0 * (d - 1) / d) ** (p / d)
    if isinstance(domain, Cube):
        if domain.d < 2:
            raise UnsupportedDomainError("cube limit constant needs d >= 2")
        d = domain.d
        return (2.0 ** (d - 1) / (d * unit_ball_volume(d))) ** (p / d)
    if isinstance(domain, Polyhedron3):
        theta = min_dihedral_angle(domain)
        v = domain.volume
        if theta <= math.pi / 2.0:
            return (2.0 * math.pi * v / (3.0 * theta * unit_ball_volume(3))) ** (p / 3.0)
        return (v / math.pi) ** (p / 3.0)
    raise UnsupportedDomainError(f"no sharp limit constant for {domain.kind}")


# ---------------------------------------------------------------------------
# Regularity witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityWitness:
    """Two-sided bound c_lower * Phi(r) <= mu(B(x,r)) <= c_upper * Phi(r) for r < r0.

    Phi(r) = r^s (power law) or r^alpha * log^beta(1/r).
    """

    s: float
    c_lower: float
    c_upper: float
    r0: float
    log_beta: float = 0.0

    def __post_init__(self):
        if not (0 < self.c_lower <= self.c_upper):
            raise ValueError("need 0 < c_lower <= c_upper")
        if self.r0 <= 0 or self.s <= 0 or self.log_beta < 0:
            raise ValueError("need r0 > 0, s > 0, log_beta >= 0")

    def phi(self, r: float) -> float:
        out = r**self.s
        if self.log_beta:
            out *= math.log(1.0 / r) ** self.log_beta
        return out


def regularity_witness(domain: Domain) -> RegularityWitness:
    """Built-in regularity witness (w.r.t. the normalized measure) per kind.

    Constants are conservative hand proofs; the sampler/covering test suite
    spot-checks them by Monte Carlo ball-measure estimation. The arcsine
    witness is only valid on the interior window [-3/4, 3/4]; polyhedron
    constants assume convexity.
    """
    if isinstance(domain, IntervalUniform):
        return RegularityWitness(s=1, c_lower=1.0, c_upper=2.0, r0=0.5)
    if isinstance(domain, ArcsineInterval):
        # density on [-3/4, 3/4] lies in [1/pi, 1/(pi sqrt(7/16))]
        return RegularityWitness(
            s=1, c_lower=1.0 / math.pi, c_upper=2.0 / (math.pi * math.sqrt(7.0 / 16.0)), r0=0.125
        )
    if isinstance(domain, Cube):
        d = domain.d
        ud = unit_ball_volume(d)
        return RegularityWitness(s=d, c_lower=ud / 2**d, c_upper=ud, r0=0.5)
    if isinstance(domain, Sphere):
        d = domain.d
        area = (d + 1) * unit_ball_volume(d + 1)
        ud = unit_ball_volume(d)
        # geodesic cap radius phi(r) in [r, pi r / 2]; sin t in [2t/pi, t]
        return RegularityWitness(
            s=d,
            c_lower=ud * (2.0 / math.pi) ** (d - 1) / area,
            c_upper=ud * (math.pi / 2.0) ** d / area,
            r0=2.0,
        )
    if isinstance(domain, Ball):
        d = domain.d
        # ball of radius r/2 tangent inward at the worst (boundary) point
        return RegularityWitness(s=d, c_lower=0.5**d, c_upper=1.0, r0=1.0)
    if isinstance(domain, Polyline):
        n_edges = len(domain.edge_lengths)
        length = domain.total_length
        return RegularityWitness(
            s=1, c_lower=1.0 / length, c_upper=2.0 * n_edges / length, r0=length / 2.0
        )
    if isinstance(domain, Polyhedron3):
        omega = _min_vertex_solid_angle(domain)
        r0 = float(min(np.linalg.norm(domain.vertices[e[1]] - domain.vertices[e[0]])
                       for e in domain.edges)) / 2.0 if domain.edges else domain.diameter / 4.0
        return RegularityWitness(
            s=3,
            c_lower=omega / (3.0 * domain.volume),
            c_upper=unit_ball_volume(3) / domain.volume,
            r0=r0,
        )
    if isinstance(domain, Cantor):
        # cylinder counting: mu(B(x,r)) in [r^s / 2, 4 r^s] for r < 1/3
        return RegularityWitness(s=LOG2_OVER_LOG3, c_lower=0.5, c_upper=4.0, r0=1.0 / 3.0)
    raise UnsupportedDomainError(f"no witness for {domain!r}")


def _min_vertex_solid_angle(domain: Polyhedron3, n_mc: int = 20000) -> float:
    """Monte Carlo estimate of the smallest vertex solid angle (steradians)."""
    rng = np.random.default_rng(0)
    dirs = rng.standard_normal((n_mc, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    best = 4.0 * math.pi
    r = 1e-6 * domain.diameter
    for v in domain.vertices:
        inside = sum(domain.contains(v + r * u) for u in dirs)
        if inside:
            best = min(best, 4.0 * math.pi * inside / n_mc)
    # never report zero; a vertex with no interior directions is degenerate
    return max(best, 4.0 * math.pi / n_mc)


# ---------------------------------------------------------------------------
# JSON catalog serialization
# ---------------------------------------------------------------------------


def domain_to_dict(domain: Domain) -> dict:
    if isinstance(domain, (Sphere, Ball, Cube)):
        return {"kind": domain.kind, "params": {"d": domain.d}}
    if isinstance(domain, (IntervalUniform, ArcsineInterval)):
        return {"kind": domain.kind, "params": {}}
    if isinstance(domain, Polyline):
        return {"kind": "Polyline", "params": {"vertices": domain.vertices.tolist()}}
    if isinstance(domain, Polyhedron3):
        return {
            "kind": "Polyhedron3",
            "params": {
                "vertices": domain.vertices.tolist(),
                "tetrahedra": [list(t) for t in domain.tetrahedra],
                "faces": [list(f) for f in domain.faces],
                "edges": [list(e) for e in domain.edges],
            },
        }
    if isinstance(domain, Cantor):
        return {"kind": "Cantor", "params": {"depth": domain.depth}}
    raise UnsupportedDomainError(f"cannot serialize {domain!r}")


def domain_from_dict(doc: dict) -> Domain:
    kind = doc["kind"]
    params = doc.get("params", {})
    if kind == "Sphere":
        return Sphere(int(params["d"]))
    if kind == "Ball":
        return Ball(int(params["d"]))
    if kind == "Cube":
        return Cube(int(params["d"]))
    if kind == "IntervalUniform":
        return IntervalUniform()
    if kind == "ArcsineInterval":
        return ArcsineInterval()
    if kind == "Polyline":
        return Polyline(params["vertices"])
    if kind == "Polyhedron3":
        return Polyhedron3(
            params["vertices"], params["tetrahedra"], params["faces"], params["edges"]
        )
    if kind == "Cantor":
        return Cantor(int(params.get("depth", 40)))
    raise UnsupportedDomainError(f"unknown domain kind {kind!r}")


def domain_to_json(domain: Domain) -> str:
    return json.dumps(domain_to_dict(domain))


def domain_from_json(text: str) -> Domain:
    return domain_from_dict(json.loads(text))


def unit_box_polyhedron() -> Polyhedron3:
    """Axis-aligned unit box as a pre-tetrahedralized Polyhedron3."""
    verts = [
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
    ]
    tets = [
        (0, 1, 2, 6), (0, 2, 3, 6), (0, 3, 7, 6),
        (0, 7, 4, 6), (0, 4, 5, 6), (0, 5, 1, 6),
    ]
    # faces wound counterclockwise seen from outside
    faces = [
        (0, 3, 2, 1),  # bottom z=0
        (4, 5, 6, 7),  # top z=1
        (0, 1, 5, 4),  # y=0
        (2, 3, 7, 6),  # y=1
        (1, 2, 6, 5),  # x=1
        (3, 0, 4, 7),  # x=0
    ]
    edges = [
        (0, 1, 0, 2), (1, 2, 0, 4), (2, 3, 0, 3), (3, 0, 0, 5),
        (4, 5, 1, 2), (5, 6, 1, 4), (6, 7, 1, 3), (7, 4, 1, 5),
        (0, 4, 2, 5), (1, 5, 2, 4), (2, 6, 3, 4), (3, 7, 3, 5),
    ]
    return Polyhedron3(verts, tets, faces, edges)
