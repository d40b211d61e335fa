import math

import numpy as np
import pytest

from finsler import catalog
from finsler.conformance import (FD_OBJECTS, Region, Tolerances, fd_oracle,
                                 run_suite, sample_points)
from finsler.errors import EvaluationDomainError
from finsler.jets import ChartPoint
from finsler.metrics import MetricSpec, build_metric
from tests.conftest import randers_metric_oracle, sphere_christoffel_oracle


def test_fd_oracle_euclidean_g(euclidean2):
    p = ChartPoint((0.0, 0.0), (0.8, 1.3))
    # the default step sits at its rounding floor ~eps/h^2; a coarser step
    # reaches the quadratic's exact Hessian
    assert np.abs(fd_oracle(euclidean2, p, "g") - np.eye(2)).max() < 1e-6
    assert np.abs(fd_oracle(euclidean2, p, "g", h=0.01) - np.eye(2)).max() < 1e-10


def test_fd_oracle_sphere_christoffel(sphere):
    p = ChartPoint((math.pi / 4, 0.0), (0.6, 1.0))
    fd = fd_oracle(sphere, p, "gamma")
    assert abs(fd[0, 1, 1] - (-0.5)) < 1e-6
    assert np.abs(fd - sphere_christoffel_oracle(math.pi / 4)).max() < 1e-6


def test_fd_oracle_randers_g(randers_flat):
    p = ChartPoint((0.0, 0.0), (1.0, 0.0))
    fd = fd_oracle(randers_flat, p, "g")
    assert np.abs(fd - np.diag([2.25, 1.5])).max() < 1e-6
    oracle = randers_metric_oracle(np.eye(2), [0.5, 0.0], p.y)
    assert np.abs(fd - oracle).max() < 1e-6


def test_fd_oracle_rejects_unknown_object(euclidean2):
    with pytest.raises(ValueError):
        fd_oracle(euclidean2, ChartPoint((0, 0), (1, 0)), "ricci")


def test_suite_euclidean_is_clean():
    report = run_suite(catalog.euclidean(2), samples=50, seed=7)
    assert report.overall
    for check in report.checks:
        if not check.name.startswith("fd_"):
            assert check.residual < 1e-10, check.name
        else:
            assert check.residual < 1e-5, check.name


def test_suite_sphere_collapses_connections(sphere):
    report = run_suite(
        catalog.round_sphere(), samples=50, seed=11,
        region=Region(x_box=catalog.SPHERE_X_BOX),
    )
    assert report.overall


def test_suite_randers_wave_detects_structure(randers_wave):
    report = run_suite(catalog.randers_wave(0.3), samples=50, seed=11)
    assert report.overall
    by_name = {c.name: c for c in report.checks}
    assert by_name["berwald_identity"].residual < 1e-7
    # the sample is genuinely non-Riemannian and non-Landsberg: the Cartan
    # tensor and its horizontal trace both show up at finite size, and the
    # difference oracle confirms the Cartan tensor through dy of its g table
    rng = np.random.default_rng(11)
    xs, ys = sample_points(randers_wave, Region.default(2), 10, rng)
    from finsler.geometry import PointGeometry
    pg = PointGeometry(randers_wave, xs, ys)
    assert np.abs(pg.C_low(0).coeffs[..., 0]).max() > 1e-3
    assert np.abs(pg.P_hat(0).coeffs[..., 0]).max() > 1e-3
    h = 1e-4
    from finsler.conformance import fd_object_arrays
    g_up = fd_object_arrays(randers_wave, xs, ys + np.array([h, 0.0]), "g")
    g_dn = fd_object_arrays(randers_wave, xs, ys - np.array([h, 0.0]), "g")
    fd_C1 = (g_up - g_dn) / (4.0 * h)  # C_ij1 = 1/2 dy_1 g_ij
    assert np.abs(fd_C1).max() > 1e-3


def test_suite_rejects_nonhomogeneous():
    report = run_suite(catalog.nonhomogeneous_example(), samples=10, seed=1)
    assert not report.overall
    assert report.checks[0].name == "homogeneity"
    assert not report.checks[0].passed
    assert len(report.checks) == 1  # gate refuses to run anything downstream


def test_suite_fails_degenerate_metric_loudly():
    # 1-homogeneous, positive, smooth off zero -- but the three-lobed wiggle
    # makes the indicatrix non-convex, so g is indefinite on open sectors
    spec = MetricSpec(
        2, "expression",
        expression="sqrt(y1^2+y2^2) + 0.4*(y1^3 - 3*y1*y2^2)/(y1^2+y2^2)",
    )
    report = run_suite(spec, samples=10, seed=5)
    assert not report.overall
    by_name = {c.name: c for c in report.checks}
    assert by_name["homogeneity"].passed
    assert not by_name["strong_convexity"].passed


def test_suite_determinism():
    a = run_suite(catalog.randers_wave(0.3), samples=15, seed=42)
    b = run_suite(catalog.randers_wave(0.3), samples=15, seed=42)
    assert a.render() == b.render()
    assert a.to_dict() == b.to_dict()
    c = run_suite(catalog.randers_wave(0.3), samples=15, seed=43)
    assert c.render() != a.render()  # seed participates in sampling


def test_tolerance_monotonicity():
    tight = run_suite(catalog.randers_wave(0.3), samples=15, seed=2)
    loose = run_suite(
        catalog.randers_wave(0.3), samples=15, seed=2,
        tolerances=Tolerances(exact=1e-8, derived=1e-6, fd=1e-4),
    )
    tight_pass = {c.name for c in tight.checks if c.passed}
    loose_pass = {c.name for c in loose.checks if c.passed}
    assert tight_pass <= loose_pass


def test_resampling_on_partial_domain():
    # admissible only where x1 > -1.5; box reaches into the bad zone, so
    # sampling must discard and redraw
    spec = MetricSpec(2, "riemannian",
                      a={(1, 1): "x1+1.5", (2, 2): "x1+1.5"})
    report = run_suite(
        spec, samples=25, seed=3,
        region=Region(x_box=((-2.0, 1.0), (-1.0, 1.0))),
    )
    assert report.overall


def test_resample_cap_aborts():
    spec = MetricSpec(2, "riemannian",
                      a={(1, 1): "x1+1.5", (2, 2): "x1+1.5"})
    metric = build_metric(spec)
    rng = np.random.default_rng(0)
    with pytest.raises(EvaluationDomainError, match="admissible"):
        sample_points(
            metric, Region(x_box=((-9.0, -8.0), (-1.0, 1.0))), 10, rng
        )


def test_report_shapes():
    report = run_suite(catalog.euclidean(2), samples=5, seed=0)
    doc = report.to_dict()
    assert doc["overall"] is True
    assert doc["samples"] == 5 and doc["seed"] == 0
    assert {"name", "identity", "residual", "tol", "passed"} <= set(
        doc["checks"][0]
    )
    names = [c["name"] for c in doc["checks"]]
    assert names.count("homogeneity") == 1
    for obj in FD_OBJECTS:
        assert f"fd_{obj}" in names
    text = report.render()
    assert text.endswith(f"overall: PASS ({len(report.checks)} checks)\n")
