"""The analytic optimizer: minimal-area shape and value for a given inradius,
extreme-point enumeration of the cluster-parameter polytope, and the numeric
scans that back the closed-form results."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import formulas, geometry
from .formulas import (
    DomainError,
    INRADIUS_MIN,
    _check_inradius,
    area_A,
    cluster_arc_a,
    cluster_arc_b,
    d2F_dh2,
    extremal_arc_length,
    h_of_r,
    is_regular_value,
    N_of_r,
    regular_inradius,
    sector_area_F,
)

AREA_TABLE_COLUMNS = ("r", "N", "ell", "h", "a", "b", "A")


def worker_count() -> int:
    """Scan parallelism cap from ORBIFORM_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("ORBIFORM_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    """Map preserving order; threaded only when the environment asks for it."""
    n = worker_count()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class OptimalShapeReport:
    r: float
    N: int
    ell: float
    h: float
    a: float
    b: float
    area: float
    regular: bool
    polygon: geometry.ReuleauxPolygon | None

    @property
    def disk(self) -> bool:
        return self.polygon is None


def solve(r: float) -> OptimalShapeReport:
    """Minimal-area report for inradius r.

    At r = 1/2 the minimizer is the disk (area pi/4, no polygon, N set to 0
    as a sentinel).  Everywhere else the report carries the constructed
    polygon together with the arc lengths and area in closed form.
    """
    r = _check_inradius(r)
    if r >= 0.5:
        return OptimalShapeReport(r=r, N=0, ell=0.0, h=0.0, a=0.0, b=0.0,
                                  area=0.25 * math.pi, regular=False, polygon=None)
    n = N_of_r(r)
    ell = extremal_arc_length(r)
    h = h_of_r(r)
    return OptimalShapeReport(
        r=r, N=n, ell=ell, h=h,
        a=cluster_arc_a(r, h), b=cluster_arc_b(r, h),
        area=area_A(r), regular=is_regular_value(r),
        polygon=geometry.build_optimal(r),
    )


def m_range(r: float):
    """Smallest and largest odd slot counts compatible with the perimeter:
    pi/(3 ell) <= m <= pi/ell."""
    r = _check_inradius(r)
    if r >= 0.5:
        raise DomainError("r = 1/2 is the disk; no slot decomposition")
    ell = extremal_arc_length(r)
    lo = math.ceil(math.pi / (3.0 * ell) - 1e-12)
    hi = math.floor(math.pi / ell + 1e-12)
    if lo % 2 == 0:
        lo += 1
    if hi % 2 == 0:
        hi -= 1
    if lo > hi:
        raise RuntimeError(f"empty slot range at r = {r!r}")
    return lo, hi


@dataclass(frozen=True)
class ExtremeConfig:
    """The unique extreme point of the cluster-parameter polytope for a
    fixed odd slot count: one free parameter h1 = ell*(1 - delta), q-1 slots
    pinned at 0, and the rest pinned at ell."""

    m_tilde: int
    q: int
    h1: float
    delta: float

    def parameters(self, ell: float):
        return [self.h1] + [0.0] * (self.q - 1) + [ell] * (self.m_tilde - self.q)


def extreme_config(r: float, m_tilde: int) -> ExtremeConfig:
    """Extreme point of the constraint polytope for the given slot count."""
    r = _check_inradius(r)
    if r >= 0.5:
        raise DomainError("r = 1/2 is the disk")
    if is_regular_value(r):
        raise DomainError(
            "regular inradius: the free slot degenerates to 0 or ell and the "
            "extreme point is the regular shape itself")
    lo, hi = m_range(r)
    if m_tilde % 2 == 0 or not lo <= m_tilde <= hi:
        raise ValueError(f"slot count {m_tilde} not an odd value in [{lo}, {hi}]")
    ell = extremal_arc_length(r)
    t = 1.5 * m_tilde - math.pi / (2.0 * ell)
    q = 1 + math.floor(t)
    delta = t - math.floor(t)
    cfg = ExtremeConfig(m_tilde=m_tilde, q=q, h1=ell * (1.0 - delta), delta=delta)
    budget = sum(2.0 * h + ell for h in cfg.parameters(ell))
    if abs(budget - math.pi) > 1e-12:
        raise RuntimeError(f"extreme point violates the perimeter identity by "
                           f"{budget - math.pi:.3e}")
    return cfg


def multi_cluster_area(r: float, parameters) -> float:
    """Total area of a rigid shape given its full slot vector (degenerate
    slots included); the vector must satisfy sum(2 h + ell) = pi."""
    r = _check_inradius(r)
    ell = extremal_arc_length(r)
    hs = [float(h) for h in parameters]
    budget = sum(2.0 * h + ell for h in hs)
    if abs(budget - math.pi) > 1e-9:
        raise ValueError(f"slot vector violates the perimeter constraint "
                         f"(sum 2h + ell = {budget!r}, expected pi)")
    return sum(sector_area_F(r, h) for h in hs)


def sample_cluster_vectors(r: float, m_tilde: int, count: int, rng) -> np.ndarray:
    """Random feasible slot vectors, uniform on the perimeter slice.

    Dirichlet spacings give the uniform law on {sum h = total, h >= 0};
    rows violating the box constraint h <= ell are rejected.  (Rejecting
    uniform draws coordinate by coordinate would stall: for thin slices the
    acceptance rate collapses to ~(total/ell)^m / m!.)
    """
    r = _check_inradius(r)
    ell = extremal_arc_length(r)
    total = 0.5 * (math.pi - m_tilde * ell)   # required sum of the h_i
    if total < -1e-12 or total > m_tilde * ell + 1e-12:
        raise ValueError(f"slot count {m_tilde} infeasible at r = {r!r}")
    total = min(max(total, 0.0), m_tilde * ell)
    if total <= 1e-12:
        return np.zeros((count, m_tilde))
    if total >= m_tilde * ell - 1e-12:
        return np.full((count, m_tilde), ell)
    out = np.empty((count, m_tilde))
    got = 0
    for _ in range(1000):
        if got >= count:
            break
        block = total * rng.dirichlet(np.ones(m_tilde),
                                      size=2 * (count - got) + 8)
        good = block.max(axis=1) <= ell
        take = min(int(good.sum()), count - got)
        out[got:got + take] = block[np.nonzero(good)[0][:take]]
        got += take
    else:
        raise RuntimeError(
            f"rejection sampling stalled for m = {m_tilde} at r = {r!r}")
    return out


# ---------------------------------------------------------------------------
# Numeric scans.

@dataclass(frozen=True)
class ConcavityReport:
    max_value: float          # over h >= h_floor
    argmax: tuple
    endpoint_max_abs: float   # |d2F/dh2| along h = 0
    fd_max_error: float       # vs second central differences
    h_floor: float

    @property
    def passed(self) -> bool:
        return self.max_value < 0.0


def scan_concavity(r_grid=200, h_grid=200, h_floor: float = 1e-3,
                   fd_step: float = 1e-4) -> ConcavityReport:
    """Scan the second h-derivative over a product grid.

    Grids may be given as point counts (ranges [r_min, 0.4999] and
    [h_floor, ell(r)] per row) or as explicit arrays; explicit h values are
    clipped to [0, ell(r)] row by row.  The sign check covers h >= h_floor;
    the h = 0 column is reported separately (the derivative vanishes there).
    """
    rs = (np.linspace(INRADIUS_MIN, 0.4999, int(r_grid))
          if np.isscalar(r_grid) else np.asarray(r_grid, dtype=float))

    def row(r):
        ell = extremal_arc_length(r)
        hs = (np.linspace(h_floor, ell, int(h_grid)) if np.isscalar(h_grid)
              else np.clip(np.asarray(h_grid, dtype=float), 0.0, ell))
        worst = -math.inf
        arg = None
        fd_err = 0.0
        for h in hs:
            if h < h_floor:
                continue
            val = d2F_dh2(r, h)
            if val > worst:
                worst, arg = val, (r, h)
            if fd_step <= h <= ell - fd_step:
                fd = (sector_area_F(r, h + fd_step) - 2.0 * sector_area_F(r, h)
                      + sector_area_F(r, h - fd_step)) / fd_step**2
                fd_err = max(fd_err, abs(fd - val))
        return worst, arg, fd_err, abs(d2F_dh2(r, 0.0))

    results = _pmap(row, rs)
    worst, arg, _, _ = max(results, key=lambda t: t[0])
    return ConcavityReport(
        max_value=worst, argmax=arg,
        endpoint_max_abs=max(t[3] for t in results),
        fd_max_error=max(t[2] for t in results),
        h_floor=h_floor,
    )


@dataclass(frozen=True)
class ContinuityRow:
    N: int
    r_star: float
    gap_minus_1e6: float
    gap_plus_1e6: float
    gap_minus_1e8: float
    gap_plus_1e8: float
    branch_match: float   # |3 F(r*, 0) - F(r*, ell)|


@dataclass(frozen=True)
class ContinuityReport:
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(
            row.gap_minus_1e6 <= 1e-4 and row.gap_plus_1e6 <= 1e-4
            and row.gap_minus_1e8 <= 1e-5 and row.gap_plus_1e8 <= 1e-5
            and row.branch_match <= 1e-10
            for row in self.rows
        )


def continuity_scan(n_max: int = 10) -> ContinuityReport:
    """Compare the area value across each regular inradius from both sides.

    At N = 1 the regular value is the left endpoint of the domain, so only
    the right-side gaps are meaningful there (the left ones are reported as
    zero): continuity on a closed interval is one-sided at its endpoints.
    """
    rows = []
    for n in range(1, n_max + 1):
        r_star = regular_inradius(n)
        a_star = area_A(r_star)
        ell = extremal_arc_length(r_star)

        def gap(delta):
            rr = r_star + delta
            if rr < INRADIUS_MIN:
                return 0.0
            return abs(area_A(rr) - a_star)

        rows.append(ContinuityRow(
            N=n, r_star=r_star,
            gap_minus_1e6=gap(-1e-6), gap_plus_1e6=gap(1e-6),
            gap_minus_1e8=gap(-1e-8), gap_plus_1e8=gap(1e-8),
            branch_match=abs(3.0 * sector_area_F(r_star, 0.0)
                             - sector_area_F(r_star, ell)),
        ))
    return ContinuityReport(tuple(rows))


@dataclass(frozen=True)
class AreaRow:
    r: float
    N: int
    ell: float
    h: float
    a: float
    b: float
    A: float


def area_table(r_min: float, r_max: float, steps: int):
    """Closed-form table rows over an inradius grid (N = 0 flags the disk).

    Rows come from the scalar formulas alone; no polygon is constructed, so
    dense tables stay cheap.
    """
    r_min = _check_inradius(r_min)
    r_max = _check_inradius(r_max)
    if r_max < r_min:
        raise DomainError(f"inverted range [{r_min!r}, {r_max!r}]")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    grid = [r_min] if steps == 1 else list(np.linspace(r_min, r_max, steps))

    def row(r):
        if r >= 0.5:
            return AreaRow(r=r, N=0, ell=0.0, h=0.0, a=0.0, b=0.0,
                           A=0.25 * math.pi)
        h = h_of_r(r)
        return AreaRow(r=r, N=N_of_r(r), ell=extremal_arc_length(r), h=h,
                       a=cluster_arc_a(r, h), b=cluster_arc_b(r, h),
                       A=area_A(r))

    return _pmap(row, grid)
