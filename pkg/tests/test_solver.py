import math

import numpy as np
import pytest

from orbiform import formulas as fm
from orbiform import geometry as geo
from orbiform import solver as sv

R3 = 1.0 - 1.0 / math.sqrt(3.0)


def test_solve_triangle_endpoint():
    rep = sv.solve(R3)
    assert rep.regular and rep.N == 1
    assert rep.area == pytest.approx((math.pi - math.sqrt(3)) / 2, abs=1e-12)
    assert rep.polygon.n_arcs == 3


def test_solve_generic():
    rep = sv.solve(0.45)
    assert rep.N == 2 and not rep.regular
    assert rep.a == pytest.approx(0.3069891789915661, abs=1e-12)
    assert rep.b == pytest.approx(0.5579024049962642, abs=1e-12)
    assert rep.polygon.n_arcs == 5

    rep493 = sv.solve(0.493)
    assert rep493.N == 5
    assert rep493.polygon.n_arcs == 11


def test_solve_disk():
    rep = sv.solve(0.5)
    assert rep.disk and rep.polygon is None
    assert rep.area == pytest.approx(math.pi / 4, abs=1e-15)


def test_solve_area_matches_geometry():
    rng = np.random.default_rng(21)
    for r in rng.uniform(R3, 0.4995, 200):
        rep = sv.solve(r)
        assert rep.area == pytest.approx(geo.exact_area(rep.polygon), abs=1e-10)


def test_m_range():
    # at the triangle inradius pi/ell = 3 exactly: odd counts 1 (one slot at
    # h = ell, the triangle itself) through 3 (three extremal arcs)
    assert sv.m_range(R3) == (1, 3)
    assert sv.m_range(0.45) == (3, 3)
    assert sv.m_range(0.48) == (3, 5)
    assert sv.m_range(0.493) == (5, 9)


def test_extreme_config_values():
    cfg = sv.extreme_config(0.45, 3)
    ell = fm.extremal_arc_length(0.45)
    assert cfg.h1 == pytest.approx(fm.h_of_r(0.45), abs=1e-12)
    # count of full-length arcs in the assembled shape: q-1 single slots
    # plus 3 per slot pinned at ell
    n_ell = (cfg.q - 1) + 3 * (cfg.m_tilde - cfg.q)
    assert n_ell == 2 * fm.N_of_r(0.45) - 2
    vec = cfg.parameters(ell)
    assert sum(2 * h + ell for h in vec) == pytest.approx(math.pi, abs=1e-12)


def test_extreme_config_side_count_invariance():
    for r in (0.46, 0.48, 0.493, 0.4999):
        n = fm.N_of_r(r)
        lo, hi = sv.m_range(r)
        for m in range(lo, hi + 1, 2):
            cfg = sv.extreme_config(r, m)
            sides = 3 + (cfg.q - 1) + 3 * (cfg.m_tilde - cfg.q)
            assert sides == 2 * n + 1


def test_extreme_config_m_invariance():
    for r in (0.48, 0.493):
        ell = fm.extremal_arc_length(r)
        lo, hi = sv.m_range(r)
        configs = [sv.extreme_config(r, m) for m in range(lo, hi + 1, 2)]
        for c1, c2 in zip(configs, configs[1:]):
            assert abs(c1.delta - c2.delta) <= 1e-10
            assert abs(c1.h1 - c2.h1) <= 1e-10
            v1 = sv.multi_cluster_area(r, c1.parameters(ell))
            v2 = sv.multi_cluster_area(r, c2.parameters(ell))
            assert abs(v1 - v2) <= 1e-10


def test_extreme_config_regular_rejected():
    with pytest.raises(fm.DomainError):
        sv.extreme_config(fm.regular_inradius(2), 3)


def test_multi_cluster_area():
    r = 0.45
    vec = [fm.h_of_r(r), 0.0, 0.0]
    assert sv.multi_cluster_area(r, vec) == pytest.approx(fm.area_A(r), abs=1e-12)
    # all slots degenerate at a regular value: the pentagon itself
    r5 = fm.regular_inradius(2)
    assert sv.multi_cluster_area(r5, [0.0] * 5) == pytest.approx(
        5 * fm.sector_area_F(r5, 0.0), abs=1e-12)
    assert sv.multi_cluster_area(r5, [0.0] * 5) == pytest.approx(fm.area_A(r5),
                                                                 abs=1e-12)
    with pytest.raises(ValueError):
        sv.multi_cluster_area(r, [0.1, 0.1])


def test_multi_cluster_area_lower_bound():
    rng = np.random.default_rng(23)
    r = 0.493
    target = fm.area_A(r)
    lo, hi = sv.m_range(r)
    for m in range(lo, hi + 1, 2):
        for vec in sv.sample_cluster_vectors(r, m, 300, rng):
            assert sv.multi_cluster_area(r, vec) >= target - 1e-10


def test_sample_cluster_vectors_constraint():
    rng = np.random.default_rng(24)
    for r, m in ((0.45, 3), (0.48, 5), (0.493, 9)):
        ell = fm.extremal_arc_length(r)
        vecs = sv.sample_cluster_vectors(r, m, 500, rng)
        assert vecs.shape == (500, m)
        assert vecs.min() >= 0.0 and vecs.max() <= ell + 1e-12
        budget = 2 * vecs.sum(axis=1) + m * ell
        assert np.abs(budget - math.pi).max() <= 1e-9


def test_scan_concavity():
    rep = sv.scan_concavity(50, 50)
    assert rep.passed
    assert rep.max_value < 0
    assert rep.endpoint_max_abs <= 1e-12
    assert rep.fd_max_error <= 1e-5
    assert fm.d2F_dh2(0.47, 0.3) < 0


def test_continuity_scan():
    rep = sv.continuity_scan(5)
    assert rep.passed
    for row in rep.rows:
        assert row.branch_match <= 1e-10
        assert row.gap_plus_1e8 <= 1e-5
    # exact equality at delta = 0 is trivial but pin it anyway
    r5 = fm.regular_inradius(2)
    assert fm.area_A(r5) == fm.area_A(r5)


def test_area_table():
    rows = sv.area_table(R3, 0.4999, 200)
    assert rows[0].A == pytest.approx((math.pi - math.sqrt(3)) / 2, abs=1e-12)
    assert abs(rows[-1].A - math.pi / 4) <= 2e-3
    areas = [row.A for row in rows]
    assert all(b - a >= -1e-12 for a, b in zip(areas, areas[1:]))

    single = sv.area_table(0.45, 0.48, 1)
    assert len(single) == 1 and single[0].r == 0.45

    with pytest.raises(fm.DomainError):
        sv.area_table(0.48, 0.45, 10)


def test_area_table_disk_row():
    rows = sv.area_table(0.4999, 0.5, 2)
    assert rows[-1].N == 0
    assert rows[-1].A == pytest.approx(math.pi / 4, abs=1e-15)


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("ORBIFORM_THREADS", raising=False)
    assert sv.worker_count() == 1
    monkeypatch.setenv("ORBIFORM_THREADS", "3")
    assert sv.worker_count() == 3
    monkeypatch.setenv("ORBIFORM_THREADS", "junk")
    assert sv.worker_count() == 1


def test_parallel_scan_matches_serial(monkeypatch):
    monkeypatch.setenv("ORBIFORM_THREADS", "4")
    par = sv.scan_concavity(20, 20)
    monkeypatch.setenv("ORBIFORM_THREADS", "1")
    ser = sv.scan_concavity(20, 20)
    assert par == ser
