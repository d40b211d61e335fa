import math

import numpy as np
import pytest

from finsler import catalog
from finsler.errors import ConvexityError, EvaluationDomainError, SpecError
from finsler.jets import ChartPoint
from finsler.metrics import MetricSpec, build_metric, verify_homogeneity
from tests.conftest import draw_points


def test_euclidean_norm(euclidean2):
    assert euclidean2.value((0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)


def test_randers_value(randers_flat):
    assert randers_flat.value((0.0, 0.0), (1.0, 0.0)) == pytest.approx(1.5)


def test_sphere_value(sphere):
    got = sphere.value((math.pi / 4, 0.0), (0.0, 1.0))
    assert got == pytest.approx(math.sin(math.pi / 4))


def test_homogeneity_pass_and_residual(euclidean2, randers_flat):
    p = ChartPoint((0.0, 0.0), (1.0, 0.0))
    ok, residual = verify_homogeneity(euclidean2, p, 2.0)
    assert ok and residual == pytest.approx(0.0, abs=1e-12)
    ok, residual = verify_homogeneity(randers_flat, p, 3.0)
    assert ok  # L(3y) = 4.5 = 3 * 1.5
    assert randers_flat.value((0.0, 0.0), (3.0, 0.0)) == pytest.approx(4.5)


def test_homogeneity_of_homogeneous_expression():
    spec = MetricSpec(2, "expression",
                      expression="y1^2/sqrt(y1^2+y2^2) + y2")
    metric = build_metric(spec)
    ok, _ = verify_homogeneity(metric, ChartPoint((0, 0), (1.0, 1.0)), 2.0)
    assert ok


def test_homogeneity_failure_of_quadratic():
    metric = build_metric(catalog.nonhomogeneous_example())
    ok, residual = verify_homogeneity(metric, ChartPoint((0, 0), (1.0, 1.0)), 2.0)
    assert not ok
    assert residual == pytest.approx(2 * 2.0)  # 4|y|^2 - 2|y|^2 at |y|^2 = 2


@pytest.mark.parametrize("factory,box", [
    (lambda: catalog.euclidean(2), None),
    (lambda: catalog.diagonal(4, 1), None),
    (lambda: catalog.round_sphere(), catalog.SPHERE_X_BOX),
    (lambda: catalog.randers_flat(0.5), None),
    (lambda: catalog.randers_wave(0.3), None),
])
def test_family_invariants(factory, box):
    metric = build_metric(factory())
    xs, ys = draw_points(metric, 50, seed=21, x_box=box)
    # positive homogeneity at three scales
    for lam in (0.5, 2.0, math.e):
        base = np.asarray(metric.value(xs, ys))
        scaled = np.asarray(metric.value(xs, lam * ys))
        assert np.abs(scaled - lam * base).max() < 1e-9 * max(1.0, lam) * max(
            1.0, base.max()
        )
    # Euler: y^i dy_i L = L
    jet = metric.jet(xs, ys, 1)
    dyL = jet.stack_derivatives(range(2, 4)).coeffs[..., 0]
    assert np.abs(np.einsum("pi,pi->p", dyL, ys) - jet.value).max() < 1e-9


def test_riemannian_energy_is_quadratic(sphere):
    # all pure-y third derivatives of L^2 vanish for a Riemannian metric
    xs, ys = draw_points(sphere, 20, seed=3, x_box=catalog.SPHERE_X_BOX)
    jet = sphere.jet(xs, ys, 3)
    sq = jet * jet
    third = (
        sq.stack_derivatives(range(2, 4))
        .stack_derivatives(range(2, 4))
        .stack_derivatives(range(2, 4))
        .coeffs[..., 0]
    )
    assert np.abs(third).max() < 1e-9


def test_spec_validation_errors():
    with pytest.raises(SpecError, match="upper triangle"):
        MetricSpec(2, "riemannian", a={(2, 1): "1"})
    with pytest.raises(SpecError, match="dimension"):
        MetricSpec(1, "riemannian", a={(1, 1): "1"})
    with pytest.raises(SpecError, match="unknown metric family"):
        MetricSpec(2, "weird")
    with pytest.raises(SpecError, match="covector"):
        MetricSpec(2, "randers", a={(1, 1): "1", (2, 2): "1"}, b=["1"])
    with pytest.raises(SpecError, match="requires the matrix"):
        MetricSpec(2, "riemannian")
    # matrix entries must be x-only
    spec = MetricSpec(2, "riemannian", a={(1, 1): "y1", (2, 2): "1"})
    with pytest.raises(SpecError, match="depend on x only"):
        build_metric(spec)


def test_randers_convexity_violation():
    metric = build_metric(catalog.randers_flat(1.1))
    with pytest.raises(ConvexityError):
        metric.value((0.0, 0.0), (1.0, 0.0))
    with pytest.raises(ConvexityError):
        metric.jet(np.zeros(2), np.array([1.0, 0.0]), 2)


def test_non_positive_fundamental_function():
    metric = build_metric(MetricSpec(2, "expression", expression="y1"))
    with pytest.raises(EvaluationDomainError, match="non-positive"):
        metric.value((0.0, 0.0), (-1.0, 0.5))


def test_quadratic_form_domain(sphere):
    # sin^2(x1) vanishes at the pole: quadratic form degenerates
    with pytest.raises(EvaluationDomainError):
        metric = sphere
        metric.value((0.0, 0.0), (0.0, 1.0))


def test_float_matrix_paths(randers_wave):
    x = np.array([0.4, -0.2])
    a = randers_wave.a_values(x)
    assert np.allclose(a, np.eye(2))
    b = randers_wave.b_values(x)
    assert b[0] == pytest.approx(0.3 * math.sin(0.4))
    assert b[1] == 0.0
