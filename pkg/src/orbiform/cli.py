"""Command line surface: solve / table / verify / descend.

Exit codes: 0 success, 2 domain error, 64 usage error, 70 internal error.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import blaschke, formulas, geometry, render, solver
from .formulas import DomainError

EX_OK = 0
EX_DOMAIN = 2
EX_USAGE = 64
EX_INTERNAL = 70


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract here is 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EX_USAGE)


def _g(x: float) -> str:
    return f"{x:.17g}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="orbiform",
                     description="Minimal-area constant-width shapes with a "
                                 "prescribed inradius.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="report the optimal shape for one inradius")
    p_solve.add_argument("--r", type=float, required=True, help="inradius in [1-1/sqrt(3), 1/2]")
    p_solve.add_argument("--svg", type=Path, help="write an SVG figure here")
    p_solve.add_argument("--json", type=Path, help="write the polygon JSON here")

    p_table = sub.add_parser("table", help="tabulate the area curve to CSV")
    p_table.add_argument("--r-min", type=float, required=True)
    p_table.add_argument("--r-max", type=float, required=True)
    p_table.add_argument("--steps", type=int, required=True)
    p_table.add_argument("--csv", type=Path, required=True)

    p_verify = sub.add_parser("verify", help="run the numeric verification suites")
    p_verify.add_argument("--grid", type=int, default=200, help="grid density per axis")
    p_verify.add_argument("--seed", type=int, default=20260810)
    p_verify.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)

    p_desc = sub.add_parser("descend", help="seeded Blaschke descents from random starts")
    p_desc.add_argument("--r", type=float, required=True)
    p_desc.add_argument("--starts", type=int, default=10)
    p_desc.add_argument("--seed", type=int, default=0)
    p_desc.add_argument("--step0", type=float, default=0.05)
    p_desc.add_argument("--trace-dir", type=Path, help="write one trace CSV per start")
    return parser


def cmd_solve(args) -> int:
    rep = solver.solve(args.r)
    print(f"r       = {_g(rep.r)}")
    if rep.disk:
        print("shape   = disk (the only width-1 body with inradius 1/2)")
        print(f"area    = {_g(rep.area)}")
    else:
        print(f"N       = {rep.N}")
        print(f"arcs    = {2 * rep.N + 1}")
        print(f"regular = {'yes' if rep.regular else 'no'}")
        print(f"ell     = {_g(rep.ell)}")
        print(f"h       = {_g(rep.h)}")
        print(f"a       = {_g(rep.a)}")
        print(f"b       = {_g(rep.b)}")
        print(f"area    = {_g(rep.area)}")
    if args.svg is not None:
        if rep.disk:
            args.svg.write_text(_disk_svg(), encoding="utf-8")
        else:
            annulus = geometry.minimal_annulus(rep.polygon)
            args.svg.write_text(render.render_svg(rep.polygon, annulus),
                                encoding="utf-8")
    if args.json is not None:
        if rep.disk:
            args.json.write_text(
                '{\n  "width": 1,\n  "disk": true,\n  "area": '
                + _g(rep.area) + "\n}\n", encoding="utf-8")
        else:
            annulus = geometry.minimal_annulus(rep.polygon)
            args.json.write_text(geometry.polygon_to_json(rep.polygon, annulus),
                                 encoding="utf-8")
    return EX_OK


def _disk_svg() -> str:
    spec = render.RenderSpec()
    f = spec.fmt
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.size}" height="{spec.size}" viewBox="-1.1 -1.1 2.2 2.2">\n'
        f'<circle cx="0" cy="0" r="{f(0.5)}" fill="#dce8f5" stroke="#1f4e79" '
        f'stroke-width="{f(spec.stroke_width)}"/>\n</svg>\n'
    )


def cmd_table(args) -> int:
    rows = solver.area_table(args.r_min, args.r_max, args.steps)
    lines = [",".join(solver.AREA_TABLE_COLUMNS)]
    for row in rows:
        lines.append(",".join([
            _g(row.r), str(row.N), _g(row.ell), _g(row.h), _g(row.a),
            _g(row.b), _g(row.A)]))
    args.csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} rows to {args.csv}")
    return EX_OK


# ---------------------------------------------------------------------------
# Verification suites.

def _suite_formula_identities(grid, rng, corrupt=False):
    rs = np.linspace(formulas.INRADIUS_MIN, 0.4999, grid)
    worst = 0.0
    for r in rs:
        ell = formulas.extremal_arc_length(r)
        worst = max(worst, abs(math.cos(0.5 * ell) * 2.0 * (1.0 - r) - 1.0))
        for h in np.linspace(0.0, ell, max(grid, 64)):
            a = formulas.cluster_arc_a(r, h)
            b = formulas.cluster_arc_b(r, h)
            worst = max(worst, abs(a + 2.0 * b - 2.0 * h - ell))
            if h < ell - 1e-12 and b <= a:
                worst = max(worst, a - b + 1.0)
    if corrupt:
        worst += 1.0
    return worst, 1e-12


def _suite_derivatives(grid, rng, corrupt=False):
    rs = np.linspace(formulas.INRADIUS_MIN, 0.4999, min(grid, 100))
    d = 1e-5
    worst = 0.0
    for r in rs:
        ell = formulas.extremal_arc_length(r)
        for h in np.linspace(d, ell - d, min(grid, 100)):
            fd = (formulas.sector_area_F(r, h + d)
                  - formulas.sector_area_F(r, h - d)) / (2.0 * d)
            worst = max(worst, abs(fd - formulas.dF_dh(r, h)))
    return worst, 1e-6


def _suite_concavity(grid, rng, corrupt=False):
    rep = solver.scan_concavity(grid, grid)
    # pass = strictly negative; report the signed max as the defect
    return rep.max_value, 0.0 if not corrupt else -1.0


def _suite_lemma_gap(grid, rng, corrupt=False):
    worst = -math.inf
    for r in np.linspace(formulas.INRADIUS_MIN, 0.4999, 20):
        ell = formulas.extremal_arc_length(r)
        xs = np.linspace(0.0, ell, grid)
        s = 1.0 - r
        arc = np.arcsin(np.minimum(np.sin(0.5 * xs) / s, 1.0))
        g = arc[:, None] + arc[None, :] - 0.5 * (xs[:, None] + xs[None, :]) \
            - np.maximum(xs[:, None], xs[None, :])
        worst = max(worst, float(g.max()))
    return worst, 1e-12


def _suite_blaschke_derivative(grid, rng, corrupt=False):
    worst = 0.0
    for _ in range(20):
        r = rng.uniform(formulas.INRADIUS_MIN + 5e-3, 0.4995)
        poly = geometry.build_optimal(r)
        for _ in range(3):
            k = int(rng.integers(poly.n_arcs))
            eps = float(rng.uniform(-0.01, 0.01))
            try:
                poly = blaschke.apply_move(poly, blaschke.BlaschkeMove(k, eps))
            except ValueError:
                continue
        k = int(rng.integers(poly.n_arcs))
        e = 1e-4
        try:
            ap = geometry.exact_area(blaschke.apply_move(poly, blaschke.BlaschkeMove(k, e)))
            am = geometry.exact_area(blaschke.apply_move(poly, blaschke.BlaschkeMove(k, -e)))
        except ValueError:
            continue
        worst = max(worst, abs((ap - am) / (2.0 * e) - blaschke.area_derivative(poly, k)))
    return worst, 1e-6


def _suite_continuity(grid, rng, corrupt=False):
    rep = solver.continuity_scan(10)
    worst = max(max(row.gap_minus_1e8, row.gap_plus_1e8) for row in rep.rows)
    return worst, 1e-5


def _suite_construction(grid, rng, corrupt=False):
    worst = 0.0
    for _ in range(25):
        r = rng.uniform(formulas.INRADIUS_MIN, 0.4995)
        poly = geometry.build_optimal(r)
        report = geometry.validate(poly, r)
        worst = max(worst, max(c.defect / max(c.tolerance, 1e-15) for c in report.checks))
    return worst, 1.0 + 1e-9   # defects are normalized by their tolerances


def _suite_monotonicity(grid, rng, corrupt=False):
    rows = solver.area_table(formulas.INRADIUS_MIN, 0.5, 1000)
    areas = np.array([row.A for row in rows])
    return float(np.max(np.diff(areas) * -1.0)), 1e-12


def cmd_verify(args) -> int:
    rng = np.random.default_rng(np.random.PCG64(args.seed))
    suites = [
        ("formula_identities", _suite_formula_identities),
        ("derivative_fd", _suite_derivatives),
        ("concavity_scan", _suite_concavity),
        ("lemma_gap_scan", _suite_lemma_gap),
        ("blaschke_derivative_fd", _suite_blaschke_derivative),
        ("continuity_scan", _suite_continuity),
        ("construction_validation", _suite_construction),
        ("area_monotonicity", _suite_monotonicity),
    ]
    all_ok = True
    for i, (name, fn) in enumerate(suites):
        corrupt = args.corrupt and i == 0
        worst, tol = fn(args.grid, rng, corrupt=corrupt)
        ok = worst <= tol
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: worst defect {worst:.3e} "
              f"(tolerance {tol:.3e})")
    return EX_OK if all_ok else 1


# ---------------------------------------------------------------------------
# Descent driver.

def _random_start(r, rng, step0):
    """Random rigid shape plus a few feasible jiggle moves."""
    lo, hi = solver.m_range(r)
    for _ in range(100):
        m_tilde = int(rng.choice(np.arange(lo, hi + 1, 2)))
        try:
            hs = solver.sample_cluster_vectors(r, m_tilde, 1, rng)[0]
            poly = geometry.build_rigid(r, hs)
        except (ValueError, DomainError):
            continue
        if not blaschke.is_feasible(poly, r, blaschke.FEAS_TOL):
            continue
        for _ in range(8):
            k = int(rng.integers(poly.n_arcs))
            eps = float(rng.uniform(-0.02, 0.02))
            cand = blaschke._try_move(poly, k, eps, r, blaschke.FEAS_TOL)
            if cand is not None:
                poly = cand
        return poly
    raise RuntimeError("could not generate a feasible start after 100 attempts")


def cmd_descend(args) -> int:
    r = formulas._check_inradius(args.r)
    target = formulas.area_A(r)
    rng = np.random.default_rng(np.random.PCG64(args.seed))
    if args.trace_dir is not None:
        args.trace_dir.mkdir(parents=True, exist_ok=True)
    print(f"r = {_g(r)}  A(r) = {_g(target)}  starts = {args.starts}  "
          f"seed = {args.seed}")
    for i in range(args.starts):
        start = _random_start(r, rng, args.step0)
        final, trace = blaschke.descend(r, start, step0=args.step0,
                                        seed=(args.seed, i))
        area = geometry.exact_area(final)
        # Terminals pinned against the minimum arc length (a slot trying to
        # degenerate) are only rigid to about that scale, and a jammed
        # half-merged slot has no clean cluster decomposition at all.
        pinned = float(final.arc_lengths.min()) <= 2.0 * blaschke.MOVE_MIN_ARC
        try:
            structure = blaschke.detect_structure(
                final, r, area_tol=1e-6 if pinned else 1e-8)
            labels = ", ".join(f"h={_g(c.parameter)}" for c in structure.clusters)
            shape = f"clusters=[{labels}] extremal={len(structure.extremal_arcs)}"
        except ValueError:
            shape = "structure unresolved (jammed against the arc-length floor)"
        print(f"start {i:2d}: steps={len(trace.steps):4d} area={_g(area)} "
              f"gap={area - target:.3e} rigid={'yes' if trace.rigid else 'NO'} "
              f"{shape}")
        if args.trace_dir is not None:
            path = args.trace_dir / f"descent_r{r:.6f}_start{i:03d}.csv"
            path.write_text(trace.to_csv(), encoding="utf-8")
    return EX_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "table":
            return cmd_table(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "descend":
            return cmd_descend(args)
        parser.error(f"unknown command {args.command!r}")
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EX_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DOMAIN
    except RuntimeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EX_INTERNAL
    return EX_OK


if __name__ == "__main__":
    sys.exit(main())
