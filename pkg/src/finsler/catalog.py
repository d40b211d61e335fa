"""Stock metric specifications used by the demos, tests, and docs."""

import math

from .metrics import MetricSpec


def euclidean(dim=2):
    """Flat metric L = |y|."""
    a = {(i, i): "1" for i in range(1, dim + 1)}
    return MetricSpec(dim, "riemannian", a=a)


def diagonal(*weights):
    """x-independent diagonal Riemannian metric, e.g. diagonal(4, 1)."""
    a = {(i, i): repr(float(w)) for i, w in enumerate(weights, start=1)}
    return MetricSpec(len(weights), "riemannian", a=a)


def round_sphere():
    """Round 2-sphere in polar coordinates: a = diag(1, sin^2 x1).

    Admissible away from the poles; sample x1 inside (0, pi).
    """
    return MetricSpec(2, "riemannian", a={(1, 1): "1", (2, 2): "sin(x1)^2"})


SPHERE_X_BOX = ((0.3, math.pi - 0.3), (-1.0, 1.0))


def randers_flat(beta=0.5, dim=2):
    """Locally Minkowski Randers metric: a = identity, constant b = (beta, 0, ...)."""
    a = {(i, i): "1" for i in range(1, dim + 1)}
    b = [repr(float(beta))] + ["0"] * (dim - 1)
    return MetricSpec(dim, "randers", a=a, b=b)


def randers_wave(amplitude=0.3, dim=2):
    """x-dependent Randers metric with b_1 = amplitude * sin(x1).

    Genuinely non-Riemannian and non-Landsberg: the Cartan tensor and its
    horizontal derivative along y are both nonzero on generic samples.
    """
    a = {(i, i): "1" for i in range(1, dim + 1)}
    b = [f"{float(amplitude)!r}*sin(x1)"] + ["0"] * (dim - 1)
    return MetricSpec(dim, "randers", a=a, b=b)


def nonhomogeneous_example():
    """Deliberately invalid input: L = y1^2 + y2^2 is 2-homogeneous, so the
    verification suite must reject it at the homogeneity gate."""
    return MetricSpec(2, "expression", expression="y1^2+y2^2")
