"""Closed-form scalar functions for width-1 bodies of constant width with a
prescribed inradius.

Everything here is a pure function of the inradius ``r`` and, where relevant,
of a cluster half-angle ``h``.  The admissible inradii run from the 3-arc
shape's value ``1 - 1/sqrt(3)`` up to ``1/2`` (the disk).
"""

import math

INRADIUS_MIN = 1.0 - 1.0 / math.sqrt(3.0)
INRADIUS_MAX = 0.5

# Tolerances: arguments within _EDGE_TOL of a domain endpoint are clamped onto
# it; inradii within REGULAR_TOL of a regular value are treated as regular.
_EDGE_TOL = 1e-12
REGULAR_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the admissible range."""


def _check_inradius(r: float) -> float:
    r = float(r)
    if r < INRADIUS_MIN - _EDGE_TOL or r > INRADIUS_MAX + _EDGE_TOL:
        raise DomainError(
            f"inradius {r!r} outside [1 - 1/sqrt(3), 1/2] "
            f"= [{INRADIUS_MIN!r}, {INRADIUS_MAX!r}]"
        )
    return min(max(r, INRADIUS_MIN), INRADIUS_MAX)


def _check_h(r: float, h: float) -> float:
    ell = extremal_arc_length(r)
    h = float(h)
    if h < -_EDGE_TOL or h > ell + _EDGE_TOL:
        raise DomainError(f"cluster parameter {h!r} outside [0, {ell!r}] for r = {r!r}")
    return min(max(h, 0.0), ell)


def extremal_arc_length(r: float) -> float:
    """Length of an arc tangent to the incircle with both endpoints on the
    outercircle.  Satisfies cos(ell/2) = 1/(2(1-r))."""
    r = _check_inradius(r)
    return 2.0 * math.atan(math.sqrt(max(4.0 * (1.0 - r) ** 2 - 1.0, 0.0)))


def cluster_arc_a(r: float, h: float) -> float:
    """Length of the short arc of a cluster (the one whose endpoints subtend
    the central angle 2h); increasing in h, equal to ell at h = ell."""
    r = _check_inradius(r)
    h = _check_h(r, h)
    return 2.0 * math.asin((1.0 - r) * math.sin(h))


def cluster_arc_b(r: float, h: float) -> float:
    """Length of each of the two flanking arcs of a cluster; b >= a always,
    with equality only at h = ell."""
    r = _check_inradius(r)
    h = _check_h(r, h)
    return h + 0.5 * (extremal_arc_length(r) - cluster_arc_a(r, h))


def sector_area_F(r: float, h: float) -> float:
    """Area of the three sectors cut out of a cluster by the segments joining
    the annulus center to the cluster's outer vertices.

    Valid on the closed interval 0 <= h <= ell: at h = 0 it reduces to the
    area of a single extremal-arc sector, at h = ell to three of them.
    """
    r = _check_inradius(r)
    h = _check_h(r, h)
    x = 1.0 - r
    ell = extremal_arc_length(r)
    a = cluster_arc_a(r, h)
    b = cluster_arc_b(r, h)
    return (
        x * x * math.sin(h) * math.cos(h)
        + 0.5 * (a - math.sin(a))
        + x * (math.cos(0.5 * a) - x * math.cos(h)) * math.sin(h + ell)
        + b
        - math.sin(b)
    )


def dF_dh(r: float, h: float) -> float:
    """First derivative of sector_area_F with respect to h."""
    r = _check_inradius(r)
    h = _check_h(r, h)
    x = 1.0 - r
    a = cluster_arc_a(r, h)
    return (
        1.0
        + 2.0 * x * x * math.cos(2.0 * h)
        + 2.0 * x * math.cos(h) / math.cos(0.5 * a) * (2.0 * x * x * math.sin(h) ** 2 - 1.0)
    )


def d2F_dh2(r: float, h: float) -> float:
    """Second derivative of sector_area_F with respect to h.

    Vanishes at h = 0 (every term carries a factor sin h) and is strictly
    negative on (0, ell], which makes h -> F(r, h) concave on [0, ell].
    """
    r = _check_inradius(r)
    h = _check_h(r, h)
    x = 1.0 - r
    a = cluster_arc_a(r, h)
    c = math.cos(0.5 * a)
    sh, ch = math.sin(h), math.cos(h)
    return (
        -4.0 * x * x * math.sin(2.0 * h)
        + 2.0 * x**5 * sh**3 * ch**2 / c**3
        + 2.0 * x * sh / c * (1.0 - 2.0 * x * x * sh * sh + 3.0 * x * x * ch * ch)
    )


def regular_inradius(N: int) -> float:
    """Inradius of the regular (2N+1)-arc shape; increasing in N, limit 1/2."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    return 1.0 - 1.0 / (2.0 * math.cos(math.pi / (2.0 * (2 * N + 1))))


def N_of_r(r: float) -> int:
    """The unique N with regular_inradius(N-1) < r <= regular_inradius(N)
    (lowest bracket closed on the left); the optimal shape has 2N+1 arcs."""
    r = _check_inradius(r)
    if r >= INRADIUS_MAX:
        raise DomainError("r = 1/2 is the disk; it has no finite arc count")
    n = max(1, math.ceil(math.pi / (2.0 * extremal_arc_length(r)) - 0.5))
    # Snap against the exactly-evaluated regular inradii: the ceiling above is
    # computed through ell(r) and loses accuracy for r close to 1/2.
    while r > regular_inradius(n) + REGULAR_TOL:
        n += 1
    while n > 1 and r <= regular_inradius(n - 1) + REGULAR_TOL:
        n -= 1
    return n


def is_regular_value(r: float) -> bool:
    """True when r is (within REGULAR_TOL) the inradius of a regular shape."""
    r = _check_inradius(r)
    if r >= INRADIUS_MAX:
        return False
    return abs(r - regular_inradius(N_of_r(r))) <= REGULAR_TOL


def h_of_r(r: float) -> float:
    """Cluster parameter of the minimal-area shape: (pi - (2N-1) ell)/2.

    Equals ell(r) exactly at regular inradii and tends to 0 as r decreases to
    the previous regular value.
    """
    r = _check_inradius(r)
    if r >= INRADIUS_MAX:
        raise DomainError("r = 1/2 is the disk; no cluster parameter")
    ell = extremal_arc_length(r)
    if is_regular_value(r):
        return ell
    h = 0.5 * (math.pi - (2 * N_of_r(r) - 1) * ell)
    return min(max(h, 0.0), ell)


def area_A(r: float) -> float:
    """Minimal area among width-1 constant-width bodies with inradius r."""
    r = _check_inradius(r)
    if r >= INRADIUS_MAX:
        return 0.25 * math.pi
    n = N_of_r(r)
    if is_regular_value(r):
        return (2 * n + 1) * sector_area_F(r, 0.0)
    return (2 * n - 2) * sector_area_F(r, 0.0) + sector_area_F(r, h_of_r(r))
