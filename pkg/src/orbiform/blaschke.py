"""Blaschke deformations: exact vertex moves, the first-order area
derivative, feasibility under the annulus constraint, greedy descent to
rigid shapes, and recovery of their cluster structure."""

import io
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .formulas import (
    DomainError,
    _check_inradius,
    extremal_arc_length,
    sector_area_F,
)
from .geometry import (
    MIN_ARC,
    TWO_PI,
    ReuleauxPolygon,
    exact_area,
    polygon_from_vertices,
)

# Arc lengths may not drop below this during a deformation (the arc count
# must stay constant).
MOVE_MIN_ARC = 1e-7

# Descent policy: step floor for the backtracking search, the smallest area
# decrease worth taking, the first-order rigidity threshold, and the annulus
# slack.  The slack must stay well below sensitivity * STEP_FLOOR (vertex
# displacement per unit step is O(1)), otherwise a rigid shape would admit
# spurious micro-moves along the constraint.  The accept threshold is one
# float ulp of the area rather than the nominal 1e-12: near a rigid shape
# the feasible steps shrink into the annulus slack and the last few moves
# decrease the area by less than 1e-12, and taking them is what makes the
# terminal certificate (no feasible step for any descending move) hold.
STEP_FLOOR = 1e-10
DECREASE_TOL = 1e-16
DERIVATIVE_TOL = 1e-12
FEAS_TOL = 1e-11


@dataclass(frozen=True)
class BlaschkeMove:
    """One deformation: vertex ``k`` slides by ``epsilon`` (radians) along
    the arc centered at vertex k-1."""

    k: int
    epsilon: float


def apply_move(poly: ReuleauxPolygon, move: BlaschkeMove) -> ReuleauxPolygon:
    """Exact (not first-order) deformed polygon.

    P[k] moves to P[k-1] + e^{i (alpha[k-1] + eps)}; P[k+1] is rebuilt as the
    intersection of the unit circles about the new P[k] and about P[k+2],
    taking the branch continuous with the original P[k+1].  All angles are
    then recomputed from the vertices.
    """
    m = poly.n_arcs
    k = move.k % m
    eps = float(move.epsilon)
    km1, kp1, kp2 = (k - 1) % m, (k + 1) % m, (k + 2) % m
    v = poly.vertices.copy()
    t = poly.alphas[km1] + eps
    v[k] = v[km1] + (math.cos(t), math.sin(t))
    d = v[kp2] - v[k]
    dist = math.hypot(d[0], d[1])
    if dist >= 2.0:
        raise ValueError(f"epsilon {eps!r} too large: the unit circles about "
                         "P[k] and P[k+2] no longer intersect")
    if dist <= 0.0:
        raise ValueError("degenerate move: P[k] landed on P[k+2]")
    half = math.sqrt(max(1.0 - 0.25 * dist * dist, 0.0))
    mid = 0.5 * (v[k] + v[kp2])
    perp = np.array([-d[1], d[0]]) / dist
    c1 = mid + half * perp
    c2 = mid - half * perp
    old = poly.vertices[kp1]
    v[kp1] = c1 if np.hypot(*(c1 - old)) <= np.hypot(*(c2 - old)) else c2
    out = polygon_from_vertices(v)
    if float(out.arc_lengths.min()) <= MOVE_MIN_ARC:
        raise ValueError("move shrinks an arc below the minimum length")
    # An arc driven through zero length wraps its angle span to ~2*pi, which
    # shows up as an inflated perimeter rather than a short arc.
    if abs(float(out.arc_lengths.sum()) - math.pi) > 1e-6:
        raise ValueError("move collapses an arc through zero length")
    return out


def first_order_coefficients(poly: ReuleauxPolygon, k: int):
    """Linear response (sigma, tau) of the angles to a move at P[k]:
    alpha[k] shifts by eps*tau and alpha[k+1] by eps*sigma, to first order."""
    m = poly.n_arcs
    k = k % m
    jk = float(poly.arc_lengths[k])
    jk1 = float(poly.arc_lengths[(k + 1) % m])
    s = math.sin(jk1)
    if abs(s) < 1e-9 or min(jk1, math.pi - jk1) < 1e-9:
        raise ValueError(f"arc {(k + 1) % m} is numerically singular (length {jk1!r})")
    sigma = math.sin(jk) / s
    # alpha[k-1] - alpha[k+1] = j[k] + j[k+1] mod 2*pi, by the angle recurrence
    tau = math.sin(jk + jk1) / s
    return sigma, tau


def area_derivative(poly: ReuleauxPolygon, k: int) -> float:
    """d(area)/d(eps) for the move at P[k]: negative iff moving in the
    direct sense (eps > 0) shrinks the area, which happens when the arc at
    P[k] is shorter than the arc at P[k+1]."""
    m = poly.n_arcs
    jk = float(poly.arc_lengths[k % m])
    jk1 = float(poly.arc_lengths[(k + 1) % m])
    return 2.0 * math.sin(0.5 * jk) / math.cos(0.5 * jk1) * math.sin(0.5 * (jk - jk1))


def is_feasible(poly: ReuleauxPolygon, r: float, tol: float = 1e-9) -> bool:
    """Boundary contained in the annulus centered at the origin.

    Reduces to the vertex radii: over each arc the distance to the origin
    ranges from 1 - |P[k]| (point diametrically through O) up to the radii of
    its endpoint vertices, so both annulus inclusions hold exactly when every
    vertex satisfies |P[k]| <= 1 - r.
    """
    r = _check_inradius(r)
    radii = np.hypot(*poly.vertices.T)
    return bool(radii.max() <= 1.0 - r + tol)


# ---------------------------------------------------------------------------
# Greedy descent.

@dataclass(frozen=True)
class DescentStep:
    step: int
    k: int
    sense: int
    epsilon: float
    area: float
    max_vertex_radius: float
    derivative: float


@dataclass(frozen=True)
class MoveAudit:
    """Terminal line-search record for one (vertex, sense) pair."""

    k: int
    sense: int
    derivative: float
    feasible_step: float | None   # largest feasible trial step, if any
    best_decrease: float          # largest area decrease seen at feasible steps

    @property
    def admissible(self) -> bool:
        """True when the pair does not contradict rigidity: nonnegative
        first-order derivative, blocked by the annulus (or by the arc-length
        floor) down to the step floor, or no feasible step shrinks the area
        by more than one float ulp (the same threshold the descent uses to
        accept a move, so a terminal shape always audits clean)."""
        return (self.sense * self.derivative >= -DERIVATIVE_TOL
                or self.feasible_step is None
                or self.best_decrease <= DECREASE_TOL)


@dataclass
class DescentTrace:
    r: float
    seed: object
    step0: float
    steps: list = field(default_factory=list)
    certificate: list = field(default_factory=list)

    @property
    def rigid(self) -> bool:
        return bool(self.certificate) and all(a.admissible for a in self.certificate)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "k", "sense", "epsilon", "area",
                    "max_vertex_radius", "derivative"])
        for s in self.steps:
            w.writerow([s.step, s.k, s.sense, f"{s.epsilon:.17g}", f"{s.area:.17g}",
                        f"{s.max_vertex_radius:.17g}", f"{s.derivative:.17g}"])
        return buf.getvalue()


def _try_move(poly, k, eps, r, tol):
    """Deformed polygon if the move is feasible at this step, else None."""
    try:
        cand = apply_move(poly, BlaschkeMove(k, eps))
    except ValueError:
        return None
    return cand if is_feasible(cand, r, tol) else None


def descend(r: float, start: ReuleauxPolygon, step0: float = 0.05,
            seed=None, feas_tol: float = FEAS_TOL, max_steps: int = 10**6):
    """Greedy Blaschke descent inside the annulus of inradius r.

    At every iteration the moves are ranked by first-order derivative
    (steepest first, ties by smallest k then positive sense); each candidate
    backtracks by halving from step0 down to STEP_FLOOR until it is feasible
    and actually decreases the area by more than DECREASE_TOL.  The first
    candidate that succeeds is applied.  Descent stops when no move
    succeeds, and the terminal shape is audited move by move.

    Returns (final polygon, DescentTrace).  ``seed`` is only recorded in the
    trace; the descent itself is deterministic.
    """
    r = _check_inradius(r)
    if not is_feasible(start, r, feas_tol):
        raise ValueError("start polygon is infeasible for this inradius")
    trace = DescentTrace(r=r, seed=seed, step0=step0)
    poly = start
    area = exact_area(poly)
    for it in range(max_steps):
        m = poly.n_arcs
        derivs = [area_derivative(poly, k) for k in range(m)]
        candidates = sorted(
            ((s * derivs[k], k, s) for k in range(m) for s in (+1, -1)
             if s * derivs[k] < DERIVATIVE_TOL),
            key=lambda c: (c[0], c[1], -c[2]),
        )
        applied = False
        for sder, k, s in candidates:
            step = step0
            while step >= STEP_FLOOR:
                cand = _try_move(poly, k, s * step, r, feas_tol)
                if cand is not None:
                    new_area = exact_area(cand)
                    # compare the same way the terminal audit does
                    if area - new_area > DECREASE_TOL:
                        poly, area = cand, new_area
                        trace.steps.append(DescentStep(
                            step=len(trace.steps), k=k, sense=s, epsilon=s * step,
                            area=area,
                            max_vertex_radius=float(np.hypot(*poly.vertices.T).max()),
                            derivative=derivs[k]))
                        applied = True
                        break
                step *= 0.5
            if applied:
                break
        if not applied:
            break
    else:
        raise RuntimeError("descent did not terminate within the step cap")

    # Terminal audit over every (vertex, sense) pair.
    m = poly.n_arcs
    for k in range(m):
        der = area_derivative(poly, k)
        for s in (+1, -1):
            feasible_step = None
            best_decrease = 0.0
            step = step0
            while step >= STEP_FLOOR:
                cand = _try_move(poly, k, s * step, r, feas_tol)
                if cand is not None:
                    if feasible_step is None:
                        feasible_step = step
                    best_decrease = max(best_decrease, area - exact_area(cand))
                step *= 0.5
            trace.certificate.append(MoveAudit(
                k=k, sense=s, derivative=der,
                feasible_step=feasible_step, best_decrease=best_decrease))
    return poly, trace


# ---------------------------------------------------------------------------
# Structure detection.

@dataclass(frozen=True)
class Cluster:
    vertex: int      # index of the vertex strictly inside the annulus
    parameter: float


@dataclass(frozen=True)
class StructureReport:
    clusters: tuple
    extremal_arcs: tuple
    area_defect: float

    @property
    def parameters(self):
        return [c.parameter for c in self.clusters]


def detect_structure(poly: ReuleauxPolygon, r: float, tol: float = 1e-7,
                     area_tol: float = 1e-8) -> StructureReport:
    """Classify the arcs of a rigid shape into clusters and extremal arcs.

    An arc is tangent to the incircle exactly when its center vertex lies on
    the outercircle.  Each vertex strictly inside the annulus therefore
    carries a cluster (its own arc plus the two flanking ones); its four
    index neighbours must be on the outercircle, otherwise the shape cannot
    be rigid.  The recovered decomposition is checked against the exact area
    to within ``area_tol``.

    Exactly constructed rigid shapes pass the default 1e-8 check.  Greedy
    descent terminals that are pinned against the minimum arc length (a slot
    trying to degenerate to h = 0, which would change the arc count and is
    out of scope for moves) are only rigid to about the pinned-arc scale;
    callers pass a looser ``area_tol`` for those.
    """
    r = _check_inradius(r)
    v = poly.vertices
    m = len(v)
    radii = np.hypot(*v.T)
    big_r = 1.0 - r
    if radii.max() > big_r + tol:
        raise ValueError("polygon is not contained in the annulus")
    outer = radii >= big_r - tol
    interior = [k for k in range(m) if not outer[k]]
    clusters = []
    in_cluster = set()
    for k in interior:
        for off in (-2, -1, 1, 2):
            if not outer[(k + off) % m]:
                raise ValueError(
                    f"vertices {k} and {(k + off) % m} are both inside the "
                    "annulus: the shape is not rigid")
        th1 = math.atan2(v[(k + 1) % m][1], v[(k + 1) % m][0])
        th2 = math.atan2(v[(k - 1) % m][1], v[(k - 1) % m][0])
        gap = (th2 - th1) % TWO_PI
        if gap > math.pi:
            gap = TWO_PI - gap
        clusters.append(Cluster(vertex=k, parameter=0.5 * gap))
        in_cluster.update({(k - 1) % m, k, (k + 1) % m})
    extremal = tuple(k for k in range(m) if k not in in_cluster)
    total = sum(sector_area_F(r, c.parameter) for c in clusters)
    total += len(extremal) * sector_area_F(r, 0.0)
    defect = abs(total - exact_area(poly))
    if defect > area_tol:
        raise ValueError(
            f"sector areas disagree with the exact area by {defect:.3e}; "
            "the shape is not a rigid decomposition for this inradius")
    return StructureReport(tuple(clusters), extremal, defect)


def lemma_gap(r: float, x, y):
    """Slack of the arc-length comparison behind the cluster structure:
    arcsin(sin(x/2)/(1-r)) + arcsin(sin(y/2)/(1-r)) - (x+y)/2 - max(x, y).
    Nonpositive for all 0 <= x, y <= ell(r); accepts scalars or arrays."""
    r = _check_inradius(r)
    ell = extremal_arc_length(r)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for val in (x, y):
        if np.any(val < -1e-12) or np.any(val > ell + 1e-12):
            raise DomainError(f"argument outside [0, {ell!r}]")
    s = 1.0 - r
    gap = (np.arcsin(np.minimum(np.sin(0.5 * x) / s, 1.0))
           + np.arcsin(np.minimum(np.sin(0.5 * y) / s, 1.0))
           - 0.5 * (x + y) - np.maximum(x, y))
    return float(gap) if gap.ndim == 0 else gap
