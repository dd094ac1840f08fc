"""Reuleaux polygons of width 1: exact construction, measurement, validation.

A shape is stored through its M vertices (M odd).  Vertices with consecutive
indices are unit-chord neighbours: P[k+1] = P[k] + e^{i alpha[k]}.  The
boundary arc centered at P[k] has radius 1, spans directions [alpha[k],
alpha[k] + j[k]], and joins P[k+1] to P[k-1].  Consecutive indices are *not*
boundary-adjacent: walking the boundary counterclockwise visits the vertices
in index steps of -2 (mod M), which is well defined because M is odd.
"""

import math
import random
from dataclasses import dataclass

import numpy as np

from .formulas import (
    DomainError,
    _check_inradius,
    cluster_arc_a,
    cluster_arc_b,
    extremal_arc_length,
    h_of_r,
    is_regular_value,
    N_of_r,
)

TWO_PI = 2.0 * math.pi

# Type-invariant tolerances for constructed polygons.
CHORD_TOL = 1e-9
ANGLE_TOL = 1e-9
PERIMETER_TOL = 1e-9
MIN_ARC = 1e-9
CLOSURE_TOL = 1e-9
# Membership of a vertex on the outercircle (tangency of the opposite arc).
OUTER_TOL = 1e-7


def _wrap(angle):
    """Angle folded into [0, 2*pi)."""
    return angle % TWO_PI


def _angdiff(x, y):
    """Signed difference x - y folded into (-pi, pi]."""
    d = (x - y) % TWO_PI
    return d - TWO_PI if d > math.pi else d


@dataclass(frozen=True)
class ReuleauxPolygon:
    """Immutable width-1 Reuleaux polygon.

    vertices    -- (M, 2) array, index order
    alphas      -- direction of the unit chord P[k] -> P[k+1], in [0, 2*pi)
    betas       -- direction of the unit chord P[k] -> P[k-1]; equals
                   alphas[k-1] + pi mod 2*pi
    arc_lengths -- length j[k] of the boundary arc centered at P[k]
    """

    vertices: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    arc_lengths: np.ndarray

    def __post_init__(self):
        for arr in (self.vertices, self.alphas, self.betas, self.arc_lengths):
            arr.setflags(write=False)

    @property
    def n_arcs(self) -> int:
        return len(self.vertices)

    def boundary_vertex_order(self):
        """Vertex indices in counterclockwise boundary order, starting at 0."""
        m = self.n_arcs
        return [(-2 * t) % m for t in range(m)]

    def boundary_arc_order(self):
        """Arc indices in counterclockwise boundary order; the first arc
        starts at vertex 0."""
        m = self.n_arcs
        return [(m - 1 - 2 * t) % m for t in range(m)]


def polygon_from_vertices(vertices) -> ReuleauxPolygon:
    """Build the polygon record from vertex positions alone.

    Angles and arc lengths are recomputed from the unit chords, so the result
    is self-consistent provided consecutive vertices are at distance ~1.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValueError("vertices must be an (M, 2) array")
    m = len(v)
    if m < 3 or m % 2 == 0:
        raise ValueError(f"need an odd number >= 3 of vertices, got {m}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vertices must be finite")
    nxt = np.roll(v, -1, axis=0) - v
    prv = np.roll(v, 1, axis=0) - v
    alphas = np.arctan2(nxt[:, 1], nxt[:, 0]) % TWO_PI
    betas = np.arctan2(prv[:, 1], prv[:, 0]) % TWO_PI
    arcs = (betas - alphas) % TWO_PI
    return ReuleauxPolygon(v.copy(), alphas, betas, arcs)


def build_from_arc_lengths(arc_lengths, orientation: float = 0.0,
                           anchor=(0.0, 0.0)) -> ReuleauxPolygon:
    """Construct a polygon from its index-ordered arc lengths.

    The chord directions follow the recurrence alpha[k+1] = alpha[k] + pi -
    j[k+1]; the vertices follow P[k+1] = P[k] + e^{i alpha[k]} from the
    anchor.  A length vector that does not close the vertex walk (defect
    above CLOSURE_TOL) is rejected as inconsistent.
    """
    j = np.asarray(arc_lengths, dtype=float)
    m = len(j)
    if m < 3 or m % 2 == 0:
        raise ValueError(f"need an odd number >= 3 of arcs, got {m}")
    if np.any(j <= MIN_ARC):
        raise ValueError(f"arc lengths must exceed {MIN_ARC}")
    if abs(j.sum() - math.pi) > PERIMETER_TOL:
        raise ValueError(f"arc lengths must sum to pi (got {j.sum()!r})")

    alphas = np.empty(m)
    alphas[0] = _wrap(orientation)
    for k in range(m - 1):
        alphas[k + 1] = _wrap(alphas[k] + math.pi - j[k + 1])
    verts = np.empty((m, 2))
    verts[0] = anchor
    for k in range(m - 1):
        verts[k + 1] = verts[k] + (math.cos(alphas[k]), math.sin(alphas[k]))
    closing = verts[m - 1] + (math.cos(alphas[m - 1]), math.sin(alphas[m - 1]))
    defect = math.hypot(*(closing - verts[0]))
    if defect > CLOSURE_TOL:
        raise ValueError(
            f"arc-length vector does not close (defect {defect:.3e}); "
            "the lengths are inconsistent with a width-1 shape"
        )
    return polygon_from_vertices(verts)


# ---------------------------------------------------------------------------
# Smallest enclosing circle (randomized incremental; exact 1/2/3-point cases).

def _circle_two(p, q):
    cx = 0.5 * (p[0] + q[0])
    cy = 0.5 * (p[1] + q[1])
    return cx, cy, math.hypot(p[0] - cx, p[1] - cy)

def _circle_three(a, b, c):
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(math.hypot(x - p[0], y - p[1]) for p in (a, b, c))
    return x, y, r

def _contains(circle, p, slack=1e-12):
    return math.hypot(p[0] - circle[0], p[1] - circle[1]) <= circle[2] + slack

def smallest_enclosing_circle(points):
    """Center and radius of the smallest circle containing all points."""
    pts = [tuple(map(float, p)) for p in points]
    random.Random(0x5EC).shuffle(pts)
    c = (pts[0][0], pts[0][1], 0.0)
    for i, p in enumerate(pts):
        if _contains(c, p):
            continue
        c = (p[0], p[1], 0.0)
        for k, q in enumerate(pts[:i]):
            if _contains(c, q):
                continue
            c = _circle_two(p, q)
            for s in pts[:k]:
                if _contains(c, s):
                    continue
                c3 = _circle_three(p, q, s)
                if c3 is not None:
                    c = c3
    return np.array([c[0], c[1]]), c[2]


@dataclass(frozen=True)
class AnnulusReport:
    """Minimal annulus of a width-1 shape: rho + R = 1."""

    center: np.ndarray
    circumradius: float
    inradius: float
    vertex_radii: np.ndarray
    on_outer: np.ndarray

    def __post_init__(self):
        for arr in (self.center, self.vertex_radii, self.on_outer):
            arr.setflags(write=False)


def minimal_annulus(poly: ReuleauxPolygon) -> AnnulusReport:
    """Minimal annulus of the shape.

    The circumcircle of the body is the smallest circle enclosing the
    vertices: over each boundary arc the distance to an interior point O is
    largest at the arc's endpoints (which are vertices) and smallest, namely
    1 - |P[k] - O|, at the point diametrically through O.  The inradius is
    therefore 1 - max_k |P[k] - O|.
    """
    center, big_r = smallest_enclosing_circle(poly.vertices)
    radii = np.hypot(*(poly.vertices - center).T)
    return AnnulusReport(
        center=center,
        circumradius=big_r,
        inradius=1.0 - big_r,
        vertex_radii=radii,
        on_outer=radii >= big_r - OUTER_TOL,
    )


# ---------------------------------------------------------------------------
# Construction of the rigid shapes.

def build_regular(N: int) -> ReuleauxPolygon:
    """Regular shape with 2N+1 equal arcs, annulus centered at the origin and
    one vertex on the positive y-axis."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    m = 2 * N + 1
    poly = build_from_arc_lengths([math.pi / m] * m)
    return _canonicalize(poly, interior=None)


def build_rigid(r: float, parameters) -> ReuleauxPolygon:
    """Rigid shape with the given cluster parameters, one per slot.

    Each entry h in ``parameters`` is a slot in [0, ell(r)]: a value strictly
    inside contributes three arcs (b, a, b) and one vertex strictly inside
    the annulus; h = 0 degenerates to a single extremal arc and h = ell(r) to
    three of them.  The slot values must satisfy sum(2 h + ell) = pi.  The
    result is recentered on its minimal annulus; the first cluster vertex (if
    any) is rotated onto the negative y-axis, otherwise vertex 0 goes to the
    positive y-axis.
    """
    r = _check_inradius(r)
    if r >= 0.5:
        raise DomainError("r = 1/2 is the disk, not a Reuleaux polygon")
    ell = extremal_arc_length(r)
    hs = [float(h) for h in parameters]
    if not hs:
        raise ValueError("need at least one slot parameter")
    budget = sum(2.0 * h + ell for h in hs)
    if abs(budget - math.pi) > PERIMETER_TOL:
        raise ValueError(
            f"slot parameters violate the perimeter constraint: "
            f"sum(2h + ell) = {budget!r}, expected pi"
        )
    arcs = []
    interior = []  # index of the inner vertex of each true cluster
    for h in hs:
        if h < -1e-12 or h > ell + 1e-12:
            raise DomainError(f"slot parameter {h!r} outside [0, {ell!r}]")
        if h <= 1e-12:
            arcs.append(ell)
        elif h >= ell - 1e-12:
            arcs.extend([ell, ell, ell])
        else:
            a = cluster_arc_a(r, h)
            b = cluster_arc_b(r, h)
            interior.append(len(arcs) + 1)
            arcs.extend([b, a, b])
    poly = build_from_arc_lengths(arcs)
    return _canonicalize(poly, interior=interior[0] if interior else None)


def build_optimal(r: float) -> ReuleauxPolygon:
    """The minimal-area shape for inradius r: the regular (2N+1)-gon at
    regular inradii, otherwise the unique single-cluster rigid shape."""
    r = _check_inradius(r)
    if r >= 0.5:
        raise DomainError("r = 1/2 is the disk, not a Reuleaux polygon")
    n = N_of_r(r)
    if is_regular_value(r):
        return build_regular(n)
    return build_rigid(r, [h_of_r(r)] + [0.0] * (2 * n - 2))


def _canonicalize(poly: ReuleauxPolygon, interior=None) -> ReuleauxPolygon:
    """Recenter on the minimal annulus and rotate to canonical orientation:
    the given interior vertex to the negative y-axis, or vertex 0 to the
    positive y-axis when there is none."""
    center, _ = smallest_enclosing_circle(poly.vertices)
    v = poly.vertices - center
    if interior is None:
        theta = math.atan2(v[0, 1], v[0, 0])
        rot = 0.5 * math.pi - theta
    else:
        theta = math.atan2(v[interior, 1], v[interior, 0])
        rot = -0.5 * math.pi - theta
    c, s = math.cos(rot), math.sin(rot)
    v = v @ np.array([[c, s], [-s, c]])
    return polygon_from_vertices(v)


def transformed(poly: ReuleauxPolygon, angle: float = 0.0, offset=(0.0, 0.0),
                reflect: bool = False) -> ReuleauxPolygon:
    """Rigid motion of the polygon: optional reflection about the x-axis,
    then rotation by ``angle`` about the origin, then translation.

    Reflection reverses the boundary orientation, so the vertex order is
    reversed along with it to keep the stored walk counterclockwise.
    """
    v = poly.vertices.copy()
    if reflect:
        v = v[::-1] * np.array([1.0, -1.0])
    c, s = math.cos(angle), math.sin(angle)
    v = v @ np.array([[c, s], [-s, c]]) + np.asarray(offset, dtype=float)
    return polygon_from_vertices(v)


# ---------------------------------------------------------------------------
# Measurement.

def exact_area(poly: ReuleauxPolygon) -> float:
    """Area: shoelace over the boundary-ordered vertices plus one circular
    segment (j - sin j)/2 per arc."""
    v = poly.vertices[poly.boundary_vertex_order()]
    shoelace = 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1)
                                  - v[:, 1] * np.roll(v[:, 0], -1)))
    j = poly.arc_lengths
    return shoelace + float(np.sum(0.5 * (j - np.sin(j))))


def support_width(poly: ReuleauxPolygon, theta: float) -> float:
    """Width in direction theta, computed arc-exactly from the support
    function; equals 1 for every theta on a true Reuleaux polygon."""
    return _support(poly, theta) + _support(poly, theta + math.pi)


def _support(poly, phi):
    u = np.array([math.cos(phi), math.sin(phi)])
    vdots = poly.vertices @ u
    best = float(vdots.max())
    span = (phi - poly.alphas) % TWO_PI
    hit = span <= poly.arc_lengths
    if np.any(hit):
        best = max(best, float((vdots[hit] + 1.0).max()))
    return best


@dataclass(frozen=True)
class BoundarySample:
    """Counterclockwise boundary trace; the final point closes the loop."""

    points: np.ndarray
    arc_index: np.ndarray

    def __post_init__(self):
        self.points.setflags(write=False)
        self.arc_index.setflags(write=False)


def sample_boundary(poly: ReuleauxPolygon, step: float = 1e-4) -> BoundarySample:
    """Trace the boundary in order with spacing at most ``step``.

    Each arc contributes its start vertex and interior samples; the end
    vertex opens the next arc.  The very first point is appended again at the
    end so that the trace closes.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    chunks = []
    idx = []
    for k in poly.boundary_arc_order():
        j = float(poly.arc_lengths[k])
        n = max(1, math.ceil(j / step))
        t = poly.alphas[k] + j * np.arange(n) / n
        pts = poly.vertices[k] + np.stack([np.cos(t), np.sin(t)], axis=1)
        chunks.append(pts)
        idx.append(np.full(n, k, dtype=int))
    chunks.append(chunks[0][:1])
    idx.append(idx[0][:1])
    return BoundarySample(np.concatenate(chunks), np.concatenate(idx))


# ---------------------------------------------------------------------------
# Validation.

@dataclass(frozen=True)
class ValidationCheck:
    name: str
    defect: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.defect <= self.tolerance


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(poly: ReuleauxPolygon, r: float | None = None) -> ValidationReport:
    """Measure every type invariant; with r, also the annulus membership."""
    v = poly.vertices
    m = len(v)
    checks = [ValidationCheck("odd_arc_count", 0.0 if (m % 2 == 1 and m >= 3) else 1.0, 0.5)]

    chords = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    checks.append(ValidationCheck("unit_chords", float(np.abs(chords - 1.0).max()), CHORD_TOL))

    angle_defect = max(
        abs(_angdiff(poly.betas[(k + 1) % m], poly.alphas[k] + math.pi))
        for k in range(m)
    )
    checks.append(ValidationCheck("angle_relation", angle_defect, ANGLE_TOL))

    checks.append(ValidationCheck(
        "perimeter", abs(float(poly.arc_lengths.sum()) - math.pi), PERIMETER_TOL))

    checks.append(ValidationCheck(
        "positive_arcs", max(0.0, MIN_ARC - float(poly.arc_lengths.min())), 0.0))

    if r is not None:
        r = _check_inradius(r)
        annulus = minimal_annulus(poly)
        excess = float(annulus.vertex_radii.max()) - (1.0 - r)
        checks.append(ValidationCheck("annulus_membership", max(0.0, excess), CHORD_TOL))
        checks.append(ValidationCheck("inradius", abs(annulus.inradius - r), CHORD_TOL))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# JSON schema (width is always 1; arrays are in vertex index order).

def _num(x: float) -> str:
    return f"{float(x):.17g}"


def polygon_to_json(poly: ReuleauxPolygon,
                    annulus: AnnulusReport | None = None) -> str:
    """Serialize with 17 significant digits so the round trip is exact."""
    parts = [
        '{\n  "width": 1,',
        f'\n  "n_arcs": {poly.n_arcs},',
        '\n  "vertices": [' + ", ".join(
            f"[{_num(x)}, {_num(y)}]" for x, y in poly.vertices) + "],",
        '\n  "alphas": [' + ", ".join(_num(a) for a in poly.alphas) + "],",
        '\n  "betas": [' + ", ".join(_num(b) for b in poly.betas) + "],",
        '\n  "arc_lengths": [' + ", ".join(_num(j) for j in poly.arc_lengths) + "]",
    ]
    if annulus is not None:
        parts.append(
            ',\n  "annulus": {"center": [' + _num(annulus.center[0]) + ", "
            + _num(annulus.center[1]) + '], "R": ' + _num(annulus.circumradius)
            + ', "rho": ' + _num(annulus.inradius) + "}")
    parts.append("\n}\n")
    return "".join(parts)


def polygon_from_json(text: str) -> ReuleauxPolygon:
    """Rebuild a polygon from its JSON form (arrays taken as stored)."""
    import json

    d = json.loads(text)
    if d.get("width") != 1:
        raise ValueError("only width-1 polygons are supported")
    v = np.asarray(d["vertices"], dtype=float)
    if len(v) != d["n_arcs"]:
        raise ValueError("n_arcs does not match the vertex count")
    poly = ReuleauxPolygon(
        vertices=v,
        alphas=np.asarray(d["alphas"], dtype=float),
        betas=np.asarray(d["betas"], dtype=float),
        arc_lengths=np.asarray(d["arc_lengths"], dtype=float),
    )
    if len(poly.alphas) != len(v) or len(poly.betas) != len(v) \
            or len(poly.arc_lengths) != len(v):
        raise ValueError("array lengths disagree")
    return poly


# ---------------------------------------------------------------------------
# Hausdorff distance.

def hausdorff_distance(p: ReuleauxPolygon, q: ReuleauxPolygon,
                       align: bool = False, step: float = 1e-4) -> float:
    """Symmetric discrete Hausdorff distance between the two boundaries.

    With ``align`` the polygons are first recentered on their minimal
    annuli, and the distance is minimized over rotations (1024 coarse angles
    followed by golden-section refinement) and over reflection.
    """
    from scipy.spatial import cKDTree

    if align:
        p = transformed(p, offset=-minimal_annulus(p).center)
        q = transformed(q, offset=-minimal_annulus(q).center)
    sp = sample_boundary(p, step).points[:-1]
    sq = sample_boundary(q, step).points[:-1]
    tree_p = cKDTree(sp)
    tree_q = cKDTree(sq)

    def dist(points_p, points_q):
        d1 = tree_q.query(points_p)[0].max()
        d2 = tree_p.query(points_q)[0].max()
        return max(float(d1), float(d2))

    if not align:
        return dist(sp, sq)

    # Rotation search: 1024 coarse angles on heavily subsampled boundaries,
    # then golden-section refinement that finishes at full resolution.  A
    # reflected alignment R_a . Refl is an involution, so the reverse
    # direction uses the same angles on the reflected target samples.
    stc = max(1, len(sp) // 1500)
    tc_p = cKDTree(sp[::stc])
    tc_q = cKDTree(sq[::stc])
    stq = max(1, len(sp) // 256)
    flip = np.array([1.0, -1.0])
    phi = (math.sqrt(5.0) - 1.0) / 2.0

    def rot(pts, angle):
        c, s = math.cos(angle), math.sin(angle)
        return pts @ np.array([[c, s], [-s, c]])

    def batch_max_dist(pts, tree, angles):
        """Per-angle directed max distance of the rotated samples."""
        c, s = np.cos(angles), np.sin(angles)
        x = pts[:, 0][None, :] * c[:, None] - pts[:, 1][None, :] * s[:, None]
        y = pts[:, 0][None, :] * s[:, None] + pts[:, 1][None, :] * c[:, None]
        d = tree.query(np.stack([x.ravel(), y.ravel()], axis=1))[0]
        return d.reshape(len(angles), -1).max(axis=1)

    def golden(objective, lo, hi, iters):
        x1 = hi - phi * (hi - lo)
        x2 = lo + phi * (hi - lo)
        f1, f2 = objective(x1), objective(x2)
        for _ in range(iters):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - phi * (hi - lo)
                f1 = objective(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + phi * (hi - lo)
                f2 = objective(x2)
        return (x1, f1) if f1 <= f2 else (x2, f2)

    best = math.inf
    coarse_angles = TWO_PI * np.arange(1024) / 1024
    for refl in (False, True):
        fp = sp * flip if refl else sp
        fq = sq * flip if refl else sq
        back = 1.0 if refl else -1.0   # direction-2 angle factor

        def coarse_dist(angle):
            d1 = tc_q.query(rot(fp[::stq], angle))[0].max()
            d2 = tc_p.query(rot(fq[::stq], back * angle))[0].max()
            return max(float(d1), float(d2))

        def full_dist(angle):
            d1 = tree_q.query(rot(fp, angle))[0].max()
            d2 = tree_p.query(rot(fq, back * angle))[0].max()
            return max(float(d1), float(d2))

        coarse = np.maximum(batch_max_dist(fp[::stq], tc_q, coarse_angles),
                            batch_max_dist(fq[::stq], tc_p, back * coarse_angles))
        a0 = coarse_angles[int(np.argmin(coarse))]
        span = TWO_PI / 1024
        a1, _ = golden(coarse_dist, a0 - span, a0 + span, 20)
        _, fbest = golden(full_dist, a1 - 6e-3, a1 + 6e-3, 18)
        best = min(best, fbest)
    return best
