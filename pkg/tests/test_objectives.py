import math

import numpy as np
import pytest

from hees._validation import as_generator
from hees.objectives import (
    ObjectiveProblem,
    cigar,
    discus,
    ellipsoid,
    log_sphere,
    make_problem,
    make_quadratic,
    make_rastrigin,
    make_rosenbrock,
    problem_names,
    rugged_sphere,
    rugged_transform,
    sphere,
)
from hees.sampling import random_rotation


def central_difference(problem, x, eps=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = eps
        g[i] = (problem(x + e) - problem(x - e)) / (2.0 * eps)
    return g


# -- quadratics --------------------------------------------------------------


def test_sphere_values():
    f = sphere(5)
    assert f(np.ones(5)) == 2.5
    assert f(np.zeros(5)) == 0.0
    assert f.f_star == 0.0
    np.testing.assert_array_equal(f.x_star, np.zeros(5))


def test_ellipsoid_values():
    f = ellipsoid(3)
    assert f(np.ones(3)) == pytest.approx(500500.5, rel=1e-15)
    assert ellipsoid(1)(np.array([2.0])) == 2.0  # degenerates to the sphere


def test_discus_and_cigar_values():
    assert discus(3)(np.ones(3)) == pytest.approx(500001.0, rel=1e-15)
    assert cigar(3)(np.ones(3)) == pytest.approx(1000000.5, rel=1e-15)


def test_quadratic_gradients_match_finite_differences():
    for problem in (sphere(4), ellipsoid(4), discus(4), cigar(4)):
        x = np.array([0.3, -1.2, 0.7, 2.0])
        fd = central_difference(problem, x)
        np.testing.assert_allclose(problem.gradient(x), fd, rtol=1e-6, atol=1e-3)


def test_make_quadratic_shifted():
    shift = np.array([1.0, -2.0])
    f = make_quadratic(np.eye(2), x_star=shift)
    assert f(shift) == 0.0
    assert f(shift + [3.0, 4.0]) == 12.5
    np.testing.assert_array_equal(f.gradient(shift), np.zeros(2))


def test_make_quadratic_validation():
    with pytest.raises(ValueError):
        make_quadratic(np.array([[1.0, 2.0], [0.0, 1.0]]))  # not symmetric
    with pytest.raises(ValueError):
        make_quadratic(np.diag([1.0, -1.0]))  # not positive definite
    with pytest.raises(ValueError):
        make_quadratic(np.eye(2), rotation=2.0 * np.eye(2))  # not orthogonal
    with pytest.raises(ValueError):
        make_quadratic(np.eye(2), x_star=[1.0, 2.0, 3.0])


def test_rotated_quadratic_matches_axis_form():
    # f_rot(x) = f_axis(R x) for the instance's rotation R
    d, seed = 4, 7
    f_rot = ellipsoid(d, instance_seed=seed)
    f_axis = ellipsoid(d)
    R = random_rotation(d, as_generator(seed))
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.standard_normal(d)
        assert f_rot(x) == pytest.approx(f_axis(R @ x), rel=1e-12)


def test_rotated_instances_reproducible():
    d = 5
    x = np.arange(1.0, 6.0)
    a = ellipsoid(d, instance_seed=9)(x)
    b = ellipsoid(d, instance_seed=9)(x)
    c = ellipsoid(d, instance_seed=10)(x)
    assert a == b
    assert a != c


# -- non-convex classics -----------------------------------------------------


def test_rosenbrock_values():
    f = make_rosenbrock(2)
    assert f(np.zeros(2)) == 1.0
    assert f(np.array([-1.0, 1.0])) == 4.0
    assert f(np.ones(2)) == 0.0
    assert make_rosenbrock(3)(np.array([1.0, 2.0, 3.0])) == 201.0
    with pytest.raises(ValueError):
        make_rosenbrock(1)


def test_rosenbrock_gradient():
    f = make_rosenbrock(4)
    np.testing.assert_array_equal(f.gradient(np.ones(4)), np.zeros(4))
    x = np.array([0.5, -0.3, 1.2, 0.1])
    np.testing.assert_allclose(
        f.gradient(x), central_difference(f, x), rtol=1e-6, atol=1e-6
    )


def test_rastrigin_values():
    assert make_rastrigin(2)(np.ones(2)) == pytest.approx(2.0, abs=1e-12)
    assert make_rastrigin(1)(np.array([0.5])) == pytest.approx(20.25, abs=1e-12)
    assert make_rastrigin(3)(np.zeros(3)) == 0.0


def test_rastrigin_gradient():
    f = make_rastrigin(3)
    np.testing.assert_allclose(f.gradient(np.zeros(3)), np.zeros(3), atol=1e-15)
    x = np.array([0.2, -0.7, 1.4])
    np.testing.assert_allclose(
        f.gradient(x), central_difference(f, x), rtol=1e-5, atol=1e-5
    )


# -- monotone sphere transforms ---------------------------------------------


def test_log_sphere_values():
    f = log_sphere(3)
    assert f(np.array([1.0, 1.0, 0.0])) == 0.0  # log(1)
    assert f(np.zeros(3)) == -np.finfo(float).max
    assert f.f_star is None
    np.testing.assert_array_equal(f.x_star, np.zeros(3))


def test_rugged_transform_values():
    assert rugged_transform(0.0) == 0.0
    assert rugged_transform(1.0) == pytest.approx(0.951229424500714, rel=1e-14)
    assert rugged_transform(math.exp(0.2)) == pytest.approx(
        1.161834242728283, rel=1e-14
    )
    assert rugged_transform(2.0) == pytest.approx(1.895071166147159, rel=1e-14)
    with pytest.raises(ValueError):
        rugged_transform(-1e-12)


def test_rugged_transform_strictly_increasing():
    grid = np.logspace(-9.0, 9.0, 2001)
    values = np.array([rugged_transform(t) for t in grid])
    assert np.all(np.diff(values) > 0.0)


def test_rugged_transform_continuous_at_block_boundaries():
    # the floor in the exponent jumps exactly where the cosine phase wraps,
    # so the two one-sided limits coincide
    for r in range(-5, 6):
        t0 = math.exp(r / 5.0)
        below = rugged_transform(t0 * (1.0 - 1e-12))
        above = rugged_transform(t0 * (1.0 + 1e-12))
        assert below == pytest.approx(above, rel=1e-9)


def test_rugged_sphere_preserves_sphere_ranking():
    d = 4
    warped, plain = rugged_sphere(d), sphere(d)
    rng = np.random.default_rng(3)
    points = rng.standard_normal((64, d)) * 3.0
    f_w = np.array([warped(x) for x in points])
    f_p = np.array([plain(x) for x in points])
    np.testing.assert_array_equal(np.argsort(f_w), np.argsort(f_p))


def test_rugged_sphere_optimum():
    f = rugged_sphere(3)
    assert f(np.zeros(3)) == 0.0
    assert f.f_star == 0.0


# -- problem container and registry ------------------------------------------


def test_objective_problem_consistency_check():
    with pytest.raises(ValueError):
        ObjectiveProblem(
            name="bad",
            dim=2,
            evaluate=lambda x: 1.0,
            x_star=np.zeros(2),
            f_star=0.0,
        )


def test_problem_names_registry():
    names = problem_names()
    assert names == tuple(sorted(names))
    assert set(names) == {
        "sphere", "ellipsoid", "discus", "cigar",
        "rosenbrock", "rastrigin", "log_sphere", "rugged_sphere",
    }


def test_make_problem():
    f = make_problem("sphere", 3)
    assert f.name == "sphere" and f.dim == 3
    g = make_problem("ellipsoid", 4, instance_seed=5)
    h = make_problem("ellipsoid", 4, instance_seed=5)
    x = np.ones(4)
    assert g(x) == h(x)
    with pytest.raises(ValueError):
        make_problem("banana", 3)
