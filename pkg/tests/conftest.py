"""Shared fixtures and independent closed-form oracles.

The oracles here are hand-derived formulas (Randers metric tensor, round
sphere Levi-Civita symbols and Riemann tensor) implemented without any jet
machinery, so agreement with the engine is a genuine cross-check.
"""

import math

import numpy as np
import pytest

from finsler import catalog
from finsler.conformance import Region, sample_points
from finsler.metrics import build_metric


def randers_metric_oracle(a, b, y):
    """Closed-form fundamental tensor of L = sqrt(y a y) + b y."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    y = np.asarray(y, dtype=float)
    alpha = math.sqrt(y @ a @ y)
    ell = a @ y / alpha
    L = alpha + b @ y
    return (L / alpha) * (a - np.outer(ell, ell)) + np.outer(ell + b, ell + b)


def sphere_christoffel_oracle(theta):
    """Levi-Civita symbols of diag(1, sin^2 x1); [h, i, j] layout."""
    out = np.zeros((2, 2, 2))
    out[0, 1, 1] = -math.sin(theta) * math.cos(theta)
    out[1, 0, 1] = out[1, 1, 0] = math.cos(theta) / math.sin(theta)
    return out


def sphere_riemann_oracle(theta):
    """Riemann tensor of the round sphere in the textbook convention
    R^i_hjk = d_j G^i_hk - d_k G^i_hj + G^i_mj G^m_hk - G^i_mk G^m_hj.

    The engine's h-curvature carries the opposite overall sign (its
    antisymmetrizer is delta_k-first); callers compare against -R.
    """
    G = sphere_christoffel_oracle(theta)
    dG = np.zeros((2, 2, 2, 2))  # [i, h, j, c] = d_c G^i_hj; only d_theta != 0
    s, c = math.sin(theta), math.cos(theta)
    dG[0, 1, 1, 0] = -(c * c - s * s)
    dG[1, 0, 1, 0] = dG[1, 1, 0, 0] = -1.0 / (s * s)
    R = np.zeros((2, 2, 2, 2))
    for i in range(2):
        for h in range(2):
            for j in range(2):
                for k in range(2):
                    R[i, h, j, k] = dG[i, h, k, j] - dG[i, h, j, k] + sum(
                        G[i, m, j] * G[m, h, k] - G[i, m, k] * G[m, h, j]
                        for m in range(2)
                    )
    return R


def draw_points(metric, count, seed, x_box=None):
    region = Region(x_box=x_box) if x_box else Region.default(metric.dim)
    rng = np.random.default_rng(seed)
    return sample_points(metric, region, count, rng)


@pytest.fixture(scope="session")
def euclidean2():
    return build_metric(catalog.euclidean(2))


@pytest.fixture(scope="session")
def sphere():
    return build_metric(catalog.round_sphere())


@pytest.fixture(scope="session")
def randers_flat():
    return build_metric(catalog.randers_flat(0.5))


@pytest.fixture(scope="session")
def randers_wave():
    return build_metric(catalog.randers_wave(0.3))
