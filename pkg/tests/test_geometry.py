import math

import numpy as np
import pytest

from orbiform import formulas as fm
from orbiform import geometry as geo

import oracles

R3 = 1.0 - 1.0 / math.sqrt(3.0)


def test_build_triangle_from_arc_lengths():
    poly = geo.build_from_arc_lengths([math.pi / 3] * 3)
    assert poly.n_arcs == 3
    chords = np.hypot(*(np.roll(poly.vertices, -1, axis=0) - poly.vertices).T)
    assert np.abs(chords - 1.0).max() <= 1e-12
    assert geo.validate(poly).passed


def test_build_regular_pentagon_from_arc_lengths():
    poly = geo.build_from_arc_lengths([math.pi / 5] * 5)
    center, _ = geo.smallest_enclosing_circle(poly.vertices)
    radii = np.hypot(*(poly.vertices - center).T)
    assert radii.max() - radii.min() <= 1e-12


def test_build_optimal_lengths_close():
    a = fm.cluster_arc_a(0.45, fm.h_of_r(0.45))
    b = fm.cluster_arc_b(0.45, fm.h_of_r(0.45))
    ell = fm.extremal_arc_length(0.45)
    poly = geo.build_from_arc_lengths([a, b, ell, ell, b])
    report = geo.validate(poly, 0.45)
    assert report.passed, [c for c in report.checks if not c.ok]


def test_build_from_arc_lengths_errors():
    with pytest.raises(ValueError):
        geo.build_from_arc_lengths([math.pi / 4] * 4)        # even count
    with pytest.raises(ValueError):
        geo.build_from_arc_lengths([math.pi / 2, math.pi / 2, 0.0])
    with pytest.raises(ValueError):
        geo.build_from_arc_lengths([0.5, 0.5, 0.5])          # wrong perimeter
    # sums to pi but cannot close
    j = [math.pi / 5 - 0.1, math.pi / 5 + 0.1] + [math.pi / 5] * 3
    with pytest.raises(ValueError, match="close"):
        geo.build_from_arc_lengths(j)


def test_build_regular():
    tri = geo.build_regular(1)
    center, big_r = geo.smallest_enclosing_circle(tri.vertices)
    assert big_r == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    penta = geo.build_regular(2)
    ann = geo.minimal_annulus(penta)
    assert ann.circumradius == pytest.approx(1 - fm.regular_inradius(2), abs=1e-9)
    for n in (1, 2, 3, 7):
        poly = geo.build_regular(n)
        r = fm.regular_inradius(n)
        assert geo.exact_area(poly) == pytest.approx(
            (2 * n + 1) * fm.sector_area_F(r, 0.0), abs=1e-10)
    # canonical orientation: one vertex on the positive y-axis
    assert abs(tri.vertices[0][0]) <= 1e-12
    assert tri.vertices[0][1] > 0


def test_build_rigid_single_cluster():
    # degenerate slot h = ell expands to three extremal arcs, so the
    # pentagon's full slot vector is [ell, 0, 0]
    r5 = fm.regular_inradius(2)
    same = geo.hausdorff_distance(
        geo.build_rigid(r5, [fm.extremal_arc_length(r5), 0.0, 0.0]),
        geo.build_regular(2), align=True)
    assert same <= 2e-4
    poly = geo.build_rigid(0.45, [fm.h_of_r(0.45), 0.0, 0.0])
    assert geo.exact_area(poly) == pytest.approx(fm.area_A(0.45), abs=1e-10)


def test_build_rigid_two_clusters():
    r = 0.493
    h = fm.h_of_r(r)
    ell = fm.extremal_arc_length(r)
    h1, h2 = 0.35 * (h + ell), 0.65 * (h + ell)
    poly = geo.build_rigid(r, [h1, h2, 0.0, 0.0, 0.0, 0.0, 0.0])
    assert poly.n_arcs == 11
    assert geo.validate(poly, r).passed
    assert geo.exact_area(poly) >= fm.area_A(r) - 1e-10


def test_build_rigid_matches_annulus_walk_oracle():
    r = 0.48
    slots = [fm.h_of_r(r), 0.0, 0.0, 0.0, 0.0]
    poly = geo.build_rigid(r, slots)
    ref = oracles.annulus_walk_vertices(r, slots)
    ref_poly = geo.polygon_from_vertices(ref)
    assert geo.hausdorff_distance(poly, ref_poly, align=True) <= 2e-4
    assert np.allclose(np.sort(poly.arc_lengths), np.sort(ref_poly.arc_lengths),
                       atol=1e-9)
    radii = np.sort(np.hypot(*poly.vertices.T))
    ref_radii = np.sort(np.hypot(*ref.T))
    assert np.abs(radii - ref_radii).max() <= 1e-9


def test_build_rigid_errors():
    ell = fm.extremal_arc_length(0.47)
    with pytest.raises(ValueError):
        geo.build_rigid(0.47, [0.1, 0.1])     # violates the perimeter constraint
    with pytest.raises(ValueError):
        geo.build_rigid(0.47, [ell + 0.2] + [0.0] * 4)


def test_build_optimal_structure():
    tri = geo.build_optimal(R3)
    assert tri.n_arcs == 3
    assert geo.hausdorff_distance(tri, geo.build_regular(1), align=True) <= 2e-4

    p45 = geo.build_optimal(0.45)
    ann = geo.minimal_annulus(p45)
    assert p45.n_arcs == 5
    assert int((ann.vertex_radii < ann.circumradius - 1e-6).sum()) == 1

    p48 = geo.build_optimal(0.48)
    assert p48.n_arcs == 7
    h = fm.h_of_r(0.48)
    expected = sorted([fm.cluster_arc_a(0.48, h)] + [fm.cluster_arc_b(0.48, h)] * 2
                      + [fm.extremal_arc_length(0.48)] * 4)
    assert np.abs(np.sort(p48.arc_lengths) - np.array(expected)).max() <= 1e-9
    # cluster vertex below the origin on the y-axis
    inner = int(np.argmin(np.hypot(*p48.vertices.T)))
    assert abs(p48.vertices[inner][0]) <= 1e-9
    assert p48.vertices[inner][1] < 0

    with pytest.raises(fm.DomainError):
        geo.build_optimal(0.5)


def test_exact_area_triangle():
    tri = geo.build_regular(1)
    assert geo.exact_area(tri) == pytest.approx((math.pi - math.sqrt(3)) / 2,
                                                abs=1e-12)


def test_exact_area_rigid_motion_invariance():
    rng = np.random.default_rng(5)
    poly = geo.build_optimal(0.47)
    base = geo.exact_area(poly)
    for _ in range(10):
        moved = geo.transformed(poly, angle=rng.uniform(0, 2 * math.pi),
                                offset=rng.uniform(-2, 2, 2),
                                reflect=bool(rng.integers(2)))
        assert geo.exact_area(moved) == pytest.approx(base, abs=1e-12)


def test_exact_area_against_sampling_oracle():
    for r in (R3, 0.45):
        poly = geo.build_optimal(r)
        est = oracles.sampling_area(poly.vertices, n=1 << 21, seed=11)
        assert geo.exact_area(poly) == pytest.approx(est, abs=2e-4)


def test_minimal_annulus_triangle():
    tri = geo.build_regular(1)
    ann = geo.minimal_annulus(tri)
    assert np.hypot(*ann.center) <= 1e-12
    assert ann.circumradius == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert ann.inradius == pytest.approx(R3, abs=1e-12)
    assert ann.inradius + ann.circumradius == pytest.approx(1.0, abs=1e-9)


def test_minimal_annulus_equivariance():
    poly = geo.build_optimal(0.46)
    moved = geo.transformed(poly, offset=(0.3, -0.2))
    a0 = geo.minimal_annulus(poly)
    a1 = geo.minimal_annulus(moved)
    assert np.abs(a1.center - (a0.center + (0.3, -0.2))).max() <= 1e-12
    assert a1.circumradius == pytest.approx(a0.circumradius, abs=1e-12)
    assert a1.inradius == pytest.approx(a0.inradius, abs=1e-12)


def test_minimal_annulus_inradius_grid():
    rng = np.random.default_rng(17)
    for r in rng.uniform(R3, 0.4995, 100):
        ann = geo.minimal_annulus(geo.build_optimal(r))
        assert ann.inradius == pytest.approx(r, abs=1e-9)


def test_one_interior_vertex_and_tangency():
    # nonregular value: exactly one vertex strictly inside, and an arc is
    # tangent to the incircle exactly when its center vertex is on the circle
    r = 0.493
    poly = geo.build_optimal(r)
    ann = geo.minimal_annulus(poly)
    inside = ann.vertex_radii < ann.circumradius - 1e-6
    assert int(inside.sum()) == 1
    for k in range(poly.n_arcs):
        t = np.linspace(poly.alphas[k], poly.alphas[k] + poly.arc_lengths[k], 2000)
        pts = poly.vertices[k] + np.stack([np.cos(t), np.sin(t)], axis=1)
        min_dist = np.hypot(*(pts - ann.center).T).min()
        assert min_dist >= 1.0 - ann.vertex_radii[k] - 1e-9
        if not inside[k]:
            assert min_dist == pytest.approx(r, abs=1e-6)
        else:
            assert min_dist > r + 1e-6


def test_support_width():
    tri = geo.build_regular(1)
    assert geo.support_width(tri, 0.0) == pytest.approx(1.0, abs=1e-12)
    poly = geo.build_optimal(0.48)
    for t in np.linspace(0, 2 * math.pi, 360, endpoint=False):
        assert geo.support_width(poly, t) == pytest.approx(1.0, abs=1e-9)


def test_support_width_negative_control():
    poly = geo.build_optimal(0.45)
    v = poly.vertices.copy()
    v[2] += (1e-3, 0.0)
    bad = geo.polygon_from_vertices(v)
    widths = [abs(geo.support_width(bad, t) - 1.0)
              for t in np.linspace(0, 2 * math.pi, 720, endpoint=False)]
    assert max(widths) > 1e-4


def test_validate_passes_and_fails():
    assert geo.validate(geo.build_regular(3)).passed

    r = 0.493
    poly = geo.build_optimal(r)
    report = geo.validate(poly, r)
    assert report.passed
    ann = geo.minimal_annulus(poly)
    assert int(ann.on_outer.sum()) == 10 and poly.n_arcs == 11

    # stored arc lengths shortened: the perimeter check must fail
    broken = geo.ReuleauxPolygon(
        vertices=poly.vertices.copy(), alphas=poly.alphas.copy(),
        betas=poly.betas.copy(),
        arc_lengths=poly.arc_lengths - 0.01 / poly.n_arcs)
    rep = geo.validate(broken)
    assert not rep.passed
    assert not rep["perimeter"].ok


def test_boundary_orders():
    poly = geo.build_regular(2)
    assert poly.boundary_vertex_order() == [0, 3, 1, 4, 2]
    assert poly.boundary_arc_order() == [4, 2, 0, 3, 1]


def test_sample_boundary():
    poly = geo.build_optimal(0.47)
    step = 1e-3
    sample = geo.sample_boundary(poly, step)
    pts = sample.points
    assert np.allclose(pts[0], pts[-1], atol=1e-12)
    assert len(pts) >= math.pi / step
    seglen = np.hypot(*(np.diff(pts, axis=0)).T)
    assert float(seglen.sum()) == pytest.approx(math.pi, abs=step * poly.n_arcs)
    ann = geo.minimal_annulus(poly)
    radii = np.hypot(*(pts - ann.center).T)
    assert radii.max() <= ann.circumradius + 1e-9
    assert radii.min() >= ann.inradius - 1e-9


def test_hausdorff_basics():
    p = geo.build_optimal(0.45)
    assert geo.hausdorff_distance(p, p) <= 2e-4
    q = geo.transformed(p, offset=(0.1, 0.0))
    assert geo.hausdorff_distance(p, q) == pytest.approx(0.1, abs=2e-4)


def test_hausdorff_aligned_same_shape():
    r5 = fm.regular_inradius(2)
    d = geo.hausdorff_distance(geo.build_optimal(r5), geo.build_regular(2),
                               align=True)
    assert d <= 2e-4


def test_hausdorff_aligned_reflection():
    p = geo.build_optimal(0.48)
    q = geo.transformed(p, angle=0.7, offset=(0.05, -0.02), reflect=True)
    assert geo.hausdorff_distance(p, q, align=True) <= 2e-4


def test_json_round_trip():
    poly = geo.build_optimal(0.46)
    ann = geo.minimal_annulus(poly)
    text = geo.polygon_to_json(poly, ann)
    back = geo.polygon_from_json(text)
    assert np.abs(back.vertices - poly.vertices).max() <= 1e-15
    assert np.abs(back.alphas - poly.alphas).max() <= 1e-15
    assert np.abs(back.arc_lengths - poly.arc_lengths).max() <= 1e-15
    import json
    d = json.loads(text)
    assert d["width"] == 1
    assert d["n_arcs"] == poly.n_arcs
    assert d["annulus"]["rho"] == pytest.approx(0.46, abs=1e-9)
