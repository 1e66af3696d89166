import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from billiard_bounds.catalog import Circle, Ellipse, FourierOval, Sphere
from billiard_bounds.errors import DegenerateInput, DiagonalCollapse
from billiard_bounds.geometry import PolygonConfig, min_segment, reflection_residual
from billiard_bounds.solver import (
    SolveSettings,
    canonicalize,
    classify,
    find_periodic_trajectories,
    morse_index,
    newton_refine,
    orbit_distance,
    start_points,
    verify_index_shift,
    with_settings,
)


def test_canonicalize_example():
    c = PolygonConfig.on(Circle(), [0.5, 0.1, 0.9])
    assert canonicalize(c).chart_points.ravel().tolist() == [0.1, 0.5, 0.9]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 6.28), min_size=2, max_size=6), st.integers(0, 5), st.booleans())
def test_canonicalize_orbit_invariant_and_idempotent(ts, shift, rev):
    c = PolygonConfig.on(Circle(), ts)
    can = canonicalize(c)
    assert np.array_equal(canonicalize(can).chart_points, can.chart_points)
    assert np.array_equal(canonicalize(c.act(shift % c.k, rev)).chart_points, can.chart_points)


def test_canonicalize_wraps_periodic_coordinates():
    C = Circle()
    a = canonicalize(PolygonConfig.on(C, [0.2 + 2 * np.pi, 3.0]), C)
    b = canonicalize(PolygonConfig.on(C, [3.0, 0.2]), C)
    assert np.allclose(a.chart_points, b.chart_points)


def test_orbit_distance_of_images_is_zero(rng):
    x = rng.normal(size=(5, 3))
    assert orbit_distance(x, np.roll(x, 2, axis=0)[::-1]) == 0.0
    assert orbit_distance(x, x + 0.1) > 0


def test_settings_validation():
    with pytest.raises(ValueError):
        SolveSettings(multistart_count=0)
    with pytest.raises(ValueError):
        SolveSettings(newton_tol=0)
    assert with_settings(SolveSettings(), rng_seed=3).rng_seed == 3


def test_newton_converges_to_major_axis(ellipse):
    c = newton_refine(ellipse, PolygonConfig.on(ellipse, [0.05, np.pi - 0.08]), SolveSettings())
    t = np.mod(c.chart_points.ravel(), 2 * np.pi)
    assert abs(t[0]) < 1e-10 or abs(t[0] - 2 * np.pi) < 1e-10
    assert abs(t[1] - np.pi) < 1e-10


@pytest.mark.parametrize("M", [Circle(), Ellipse(2, 1), Sphere(2)], ids=repr)
def test_newton_rejects_near_diagonal_start(M):
    t = np.full((2, M.intrinsic_dim), 0.7)
    t[1] += 1e-9
    with pytest.raises(DiagonalCollapse):
        newton_refine(M, PolygonConfig.on(M, t), SolveSettings())


def test_circle_pairs_are_antipodal_and_degenerate():
    C = Circle()
    s = SolveSettings()
    for t0 in ([0.1, 2.0], [1.0, 5.5], [3.0, 4.0]):
        c = newton_refine(C, PolygonConfig.on(C, t0), s)
        x = c.ambient(C)
        assert np.allclose(x[0], -x[1], atol=1e-9)
        sol = classify(C, c, s)
        assert sol.degenerate and sol.min_abs_eigenvalue < 1e-6


def test_ellipse_k2_solutions(ellipse_k2):
    sols = ellipse_k2.solutions
    assert len(sols) == 2 == len(ellipse_k2.nondegenerate)
    assert [s.length for s in sols] == pytest.approx([4.0, 8.0], abs=1e-8)
    assert [s.morse_index for s in sols] == [1, 2]


def test_ellipse_morse_index_examples(ellipse):
    assert morse_index(ellipse, PolygonConfig.on(ellipse, [0, np.pi]))[0] == 2
    assert morse_index(ellipse, PolygonConfig.on(ellipse, [np.pi / 2, 3 * np.pi / 2]))[0] == 1
    C = Circle()
    assert morse_index(C, PolygonConfig.on(C, [0, np.pi]))[1] < 1e-6


def test_ellipsoid_k2_axes(ellipsoid_k2):
    sols = ellipsoid_k2.solutions
    assert len(sols) == 3
    assert [s.length for s in sols] == pytest.approx([4.0, 8.0, 12.0], abs=1e-8)
    assert [s.morse_index for s in sols] == [2, 3, 4]


def test_solution_invariants(ellipse_k2, ellipsoid_k2, oval_k3):
    for sset in (ellipse_k2, ellipsoid_k2, oval_k3):
        M, s = sset.manifold, sset.settings
        lengths = [sol.length for sol in sset.solutions]
        assert lengths == sorted(lengths)
        for sol in sset.solutions:
            assert sol.residual <= s.newton_tol
            assert reflection_residual(M, sol.config) <= s.newton_tol
            assert min_segment(M, sol.config) > s.guard(M)
            assert np.array_equal(canonicalize(sol.config, M).chart_points, sol.config.chart_points)
            assert 0 <= sol.morse_index <= sol.config.k * M.intrinsic_dim
        xs = [sol.ambient(M) for sol in sset.solutions]
        for i in range(len(xs)):
            for j in range(i):
                assert orbit_distance(xs[i], xs[j]) > s.dedup_tol


def test_oval_k3_floor(oval_k3):
    assert len(oval_k3.nondegenerate) >= 2


def test_index_shift_on_ellipse(ellipse_k2):
    M = ellipse_k2.manifold
    reports = [verify_index_shift(M, sol) for sol in ellipse_k2.solutions]
    assert [(r.mu, r.extended_index, r.extended_dim) for r in reports] == [(1, 2, 3), (2, 3, 3)]
    assert all(r.passed and r.to_dict()["pass"] for r in reports)


def test_index_shift_on_oval_k3(oval_k3):
    M = oval_k3.manifold
    for sol in oval_k3.nondegenerate:
        r = verify_index_shift(M, sol)
        assert r.extended_dim == 6 and r.expected == sol.morse_index + 3 and r.passed


def test_index_shift_on_ellipsoid(ellipsoid_k2):
    M = ellipsoid_k2.manifold
    for sol in ellipsoid_k2.solutions:
        r = verify_index_shift(M, sol)
        assert r.extended_dim == 2 + 4 and r.passed


def test_index_shift_refuses_degenerate():
    C = Circle()
    sol = classify(C, PolygonConfig.on(C, [0, np.pi]), SolveSettings())
    with pytest.raises(DegenerateInput):
        verify_index_shift(C, sol)


def test_determinism(oval):
    s = SolveSettings(multistart_count=60, rng_seed=11)
    a = find_periodic_trajectories(oval, 3, s)
    b = find_periodic_trajectories(oval, 3, s)
    assert [x.config.chart_points.tolist() for x in a.solutions] == [x.config.chart_points.tolist() for x in b.solutions]
    assert a.diagnostics == b.diagnostics


def test_start_points_prefix_property(oval):
    s = SolveSettings(multistart_count=64, rng_seed=5)
    small = start_points(oval, 3, s)
    big = start_points(oval, 3, with_settings(s, multistart_count=256))
    assert np.array_equal(small, big[:64])


def test_count_monotone_in_multistart(oval):
    s = SolveSettings(multistart_count=40, rng_seed=2)
    small = find_periodic_trajectories(oval, 3, s)
    big = find_periodic_trajectories(oval, 3, with_settings(s, multistart_count=160))
    M = big.manifold
    big_x = [sol.ambient(M) for sol in big.solutions]
    for sol in small.solutions:
        assert min(orbit_distance(sol.ambient(small.manifold), y) for y in big_x) <= s.dedup_tol


def test_dihedral_closure(oval_k3):
    M, s = oval_k3.manifold, oval_k3.settings
    for sol in oval_k3.nondegenerate:
        for img in sol.config.dihedral_images():
            c = newton_refine(M, PolygonConfig.on(M, img.chart_points + 1e-4), s)
            assert orbit_distance(c.ambient(M), sol.ambient(M)) <= s.dedup_tol


def test_parallel_matches_serial(oval, monkeypatch):
    s = SolveSettings(multistart_count=40, rng_seed=4)
    serial = find_periodic_trajectories(oval, 3, s)
    monkeypatch.setenv("BBL_THREADS", "2")
    par = find_periodic_trajectories(oval, 3, s)
    assert [x.config.chart_points.tolist() for x in serial.solutions] == [x.config.chart_points.tolist() for x in par.solutions]


def test_sphere_k2_all_degenerate():
    sset = find_periodic_trajectories(Sphere(2), 2, SolveSettings(multistart_count=30))
    assert sset.solutions and all(sol.degenerate for sol in sset.solutions)


def test_k_must_be_at_least_two(oval):
    with pytest.raises(ValueError):
        find_periodic_trajectories(oval, 1)
