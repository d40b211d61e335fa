"""Derived geometry of a fundamental function at chart points.

Everything here is computed inside truncated jet algebra from a single jet of
L, so every derivative of a derived object (metric tensor, spray, connection
coefficients) is exact at truncation order; nothing is ever re-differenced
numerically. `PointGeometry` is the shared pipeline: it evaluates L once per
(point batch, order) and derives

    E = L^2/2                       energy
    g_ij = dydy E                   fundamental tensor, with inverse
    C_ijk = 1/2 dy g_ij             Cartan tensor (lowered / mixed)
    gamma^h_ij                      formal Christoffel symbols (x-derivatives)
    G^h = 1/2 gamma^h_ij y^i y^j    canonical spray
    G^h_i = dy_i G^h                nonlinear (Barthel) coefficients
    G^h_ij = dy_j dy_i G^h          their fiber derivatives
    delta_i = d_i - G^h_i dy_h      adapted horizontal derivative
    Gamma^h_ij                      horizontal coefficients built from delta
    P^h_ij = C^h_ij|0               horizontal derivative of C along y

Jet truncation orders are threaded through explicitly: requesting an object
as a jet of order q evaluates L at exactly the order that object consumes
(e.g. q+2 for g, q+4 for Gamma, q+5 for G^h_ij), nothing more.

Public functions wrap the pipeline for a single `ChartPoint` and return plain
arrays (or small value types that carry their own consistency checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError
from .jets import Jet, jet_space

DEFAULT_ORDER = 4


# -- small jet-tensor utilities ----------------------------------------------


def stack_jets(jets_list):
    """Stack same-space jets along a new trailing tensor axis."""
    space = jets_list[0].space
    coeffs = np.stack([j.coeffs for j in jets_list], axis=-2)
    return Jet(space, coeffs)


def transpose_jet(jet, perm):
    """Permute the trailing tensor axes of a jet: out axis i = in axis perm[i]."""
    t = len(perm)
    base = jet.coeffs.ndim - 1 - t
    src = [base + p for p in perm]
    dst = [base + i for i in range(t)]
    return Jet(jet.space, np.moveaxis(jet.coeffs, src, dst))


def jet_einsum(spec, a, b):
    """Contract two jets over trailing tensor axes, einsum-style.

    `spec` is like 'hl,lij->hij' with single-letter labels; labels appearing
    in both inputs but not the output are summed. Leading (point-batch) axes
    broadcast untouched. One jet multiplication, then axis sums.
    """
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    contracted = [c for c in dict.fromkeys(sa + sb) if c not in out]
    union = list(out) + contracted

    def arrange(jet, s):
        c = jet.coeffs
        t = len(s)
        base = c.ndim - 1 - t
        order = [base + s.index(lbl) for lbl in union if lbl in s]
        c = np.moveaxis(c, order, range(base, base + len(order)))
        index = [slice(None)] * base
        for lbl in union:
            index.append(slice(None) if lbl in s else None)
        index.append(slice(None))
        return Jet(jet.space, c[tuple(index)])

    prod = arrange(a, sa) * arrange(b, sb)
    for _ in contracted:
        prod = prod.sum(-1)
    return prod


def delta_apply(N, T, order, tensor_rank):
    """delta_k T = d_k T - N^h_k dy_h T from explicit nonlinear coefficients.

    N is a jet with trailing tensor axes (h, k); T a jet of order >= order+1
    whose trailing `tensor_rank` axes are tensor indices. The result gains a
    trailing k axis.
    """
    n = N.shape[-1]
    dx = T.stack_derivatives(range(n)).truncate(order)
    dy = T.stack_derivatives(range(n, 2 * n)).truncate(order)
    N = N.truncate(order)
    nbatch = len(T.shape) - tensor_rank
    n_coeffs = N.coeffs
    for _ in range(tensor_rank):
        n_coeffs = np.expand_dims(n_coeffs, axis=nbatch)
    n_jet = Jet(N.space, n_coeffs)
    dy_expanded = Jet(dy.space, np.expand_dims(dy.coeffs, axis=-2))
    correction = (dy_expanded * n_jet).sum(-2)
    return dx - correction


class PointGeometry:
    """Lazy jet pipeline for one metric at one chart point (or point batch).

    x and y are arrays of shape (..., n); all produced jets share the leading
    batch shape. Instances memoize by (object, order) and are not intended to
    be shared across threads; create one per evaluation site.
    """

    def __init__(self, metric, x, y, order_hint=0):
        self.metric = metric
        self.n = metric.dim
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if self.x.shape[-1] != self.n:
            raise ValueError(
                f"point has {self.x.shape[-1]} coordinates, metric has {self.n}"
            )
        self.batch = self.x.shape[:-1]
        self._nbatch = len(self.batch)
        self._order_hint = order_hint
        self._L = None
        self._cache = {}

    # -- scalar base objects -------------------------------------------------

    def L(self, order):
        if self._L is None or self._L.order < order:
            target = max(order, self._order_hint, 1)
            self._L = self.metric.jet(self.x, self.y, target)
        return self._L.truncate(order)

    def _memo(self, key, order, build):
        found = self._cache.get(key)
        if found is None or found.order < order:
            found = build(order)
            self._cache[key] = found
        return found.truncate(order)

    def E(self, order):
        return self._memo("E", order, lambda q: self.L(q) * self.L(q) * 0.5)

    def y_jet(self, order):
        """The fiber coordinates y^i as an exact jet vector."""
        def build(q):
            space = jet_space(2 * self.n, q)
            return stack_jets(
                [Jet.variable(space, self.n + i, self.y[..., i]) for i in range(self.n)]
            )
        return self._memo("y", order, build)

    def _x_vars(self):
        return range(self.n)

    def _y_vars(self):
        return range(self.n, 2 * self.n)

    # -- fundamental tensor ----------------------------------------------------

    def g(self, order):
        def build(q):
            return (
                self.E(q + 2)
                .stack_derivatives(self._y_vars())
                .stack_derivatives(self._y_vars())
            )
        return self._memo("g", order, build)

    def g_inv(self, order):
        def build(q):
            gq = self.g(q)
            values = gq.coeffs[..., 0]
            try:
                np.linalg.cholesky(values)
            except np.linalg.LinAlgError as exc:
                raise NotPositiveDefiniteError(
                    "metric tensor not positive-definite at an evaluated point"
                ) from exc
            seed = np.linalg.inv(values)
            coeffs = np.zeros(seed.shape + (gq.space.size,))
            coeffs[..., 0] = seed
            inv = Jet(gq.space, coeffs)
            eye = np.eye(self.n)
            two_eye = Jet.constant(gq.space, 2.0 * eye, self.batch + (self.n, self.n))
            # Newton-Schulz: error degree doubles per sweep
            for _ in range(max(0, math.ceil(math.log2(q + 1)))):
                inv = jet_einsum(
                    "ij,jk->ik", inv, two_eye - jet_einsum("ij,jk->ik", gq, inv)
                )
            return inv
        return self._memo("g_inv", order, build)

    # -- Cartan tensor ----------------------------------------------------------

    def C_low(self, order):
        def build(q):
            return (
                self.E(q + 3)
                .stack_derivatives(self._y_vars())
                .stack_derivatives(self._y_vars())
                .stack_derivatives(self._y_vars())
                * 0.5
            )
        return self._memo("C_low", order, build)

    def C_up(self, order):
        def build(q):
            return jet_einsum("hl,lij->hij", self.g_inv(q), self.C_low(q))
        return self._memo("C_up", order, build)

    # -- Christoffel symbols and spray -------------------------------------------

    @staticmethod
    def _christoffel_combination(dg):
        # dg[a, b, c] = D_c g_ab for a first-order derivative D; returns the
        # symmetrized combination 1/2 (D_i g_lj + D_j g_il - D_l g_ij)
        # indexed [l, i, j].
        term1 = transpose_jet(dg, (0, 2, 1))  # [l, i, j] = D_i g_lj
        term2 = transpose_jet(dg, (1, 0, 2))  # [l, i, j] = D_j g_il
        term3 = transpose_jet(dg, (2, 0, 1))  # [l, i, j] = D_l g_ij
        return (term1 + term2 - term3) * 0.5

    def gamma_low(self, order):
        def build(q):
            dg = self.g(q + 1).stack_derivatives(self._x_vars())
            return self._christoffel_combination(dg)
        return self._memo("gamma_low", order, build)

    def gamma(self, order):
        def build(q):
            return jet_einsum("hl,lij->hij", self.g_inv(q), self.gamma_low(q))
        return self._memo("gamma", order, build)

    def spray(self, order):
        def build(q):
            y = self.y_jet(q)
            half_gyy = jet_einsum(
                "hj,j->h", jet_einsum("hij,i->hj", self.gamma(q), y), y
            )
            return half_gyy * 0.5
        return self._memo("spray", order, build)

    def N(self, order):
        def build(q):
            return self.spray(q + 1).stack_derivatives(self._y_vars())
        return self._memo("N", order, build)

    def G2(self, order):
        def build(q):
            return (
                self.spray(q + 2)
                .stack_derivatives(self._y_vars())
                .stack_derivatives(self._y_vars())
            )
        return self._memo("G2", order, build)

    # -- adapted derivative -------------------------------------------------------

    def delta(self, T, order=None):
        """Horizontal derivative delta_k T = d_k T - N^h_k dy_h T.

        T must be a jet of order >= 1 at this pipeline's point; the result has
        one more trailing tensor axis (k) and one order less.
        """
        if order is None:
            order = T.order - 1
        rank = len(T.shape) - self._nbatch
        return delta_apply(self.N(order), T, order, rank)

    # -- horizontal coefficients and C|0 -------------------------------------------

    def Gamma(self, order):
        def build(q):
            dg = self.delta(self.g(q + 1), q)  # [a, b, k] = delta_k g_ab
            low = self._christoffel_combination(dg)
            return jet_einsum("hl,lij->hij", self.g_inv(q), low)
        return self._memo("Gamma", order, build)

    def P_hat(self, order):
        """C^h_ij|0: the h-covariant derivative of the Cartan tensor along y,
        taken with the (Gamma, N) coefficients."""
        def build(q):
            y = self.y_jet(q)
            dC = self.delta(self.C_up(q + 1), q)  # [h, i, j, k] = delta_k C^h_ij
            term0 = jet_einsum("hijk,k->hij", dC, y)
            gam_y = jet_einsum("abk,k->ab", self.Gamma(q), y)  # Gamma^a_bk y^k
            term_up = jet_einsum("mij,hm->hij", self.C_up(q), gam_y)
            term_d1 = jet_einsum("hmj,mi->hij", self.C_up(q), gam_y)
            term_d2 = jet_einsum("him,mj->hij", self.C_up(q), gam_y)
            return term0 + term_up - term_d1 - term_d2
        return self._memo("P_hat", order, build)

    def R_torsion(self, order):
        """R^h_jk = delta_k N^h_j - delta_j N^h_k."""
        def build(q):
            dN = self.delta(self.N(q + 1), q)  # [h, j, k] = delta_k N^h_j
            return dN - transpose_jet(dN, (0, 2, 1))
        return self._memo("R_torsion", order, build)


# -- public value types -------------------------------------------------------


@dataclass(frozen=True)
class MetricTensorValue:
    """Fundamental tensor and its inverse at one point."""

    g: np.ndarray
    g_inv: np.ndarray
    point: object

    def __post_init__(self):
        n = self.g.shape[0]
        if not np.allclose(self.g, self.g.T, atol=1e-12, rtol=0.0):
            raise NotPositiveDefiniteError("metric tensor asymmetric beyond 1e-12")
        if np.abs(self.g @ self.g_inv - np.eye(n)).max() > 1e-10:
            raise NotPositiveDefiniteError(
                "metric inverse fails g @ g_inv = id beyond 1e-10"
            )


@dataclass(frozen=True)
class CartanTensorValue:
    """Cartan tensor, lowered (C_ijk) and mixed (C^h_ij), at one point."""

    C_low: np.ndarray
    C_up: np.ndarray
    point: object

    def __post_init__(self):
        c = self.C_low
        sym = max(
            np.abs(c - np.transpose(c, p)).max()
            for p in ((0, 2, 1), (1, 0, 2), (2, 1, 0))
        )
        if sym > 1e-10:
            raise AssertionError(f"Cartan tensor asymmetric by {sym:.3e}")
        y = np.asarray(self.point.y)
        if np.abs(np.einsum("ijk,k->ij", c, y)).max() > 1e-8 * max(
            1.0, np.abs(c).max()
        ):
            raise AssertionError("Cartan tensor fails C_ijk y^k = 0")


@dataclass(frozen=True)
class SprayValue:
    """Canonical spray G^h with its first and second fiber derivatives."""

    G: np.ndarray
    N: np.ndarray
    G2: np.ndarray
    point: object

    def __post_init__(self):
        y = np.asarray(self.point.y)
        scale = max(1.0, np.abs(self.N).max())
        if np.abs(self.N @ y - 2.0 * self.G).max() > 1e-8 * scale:
            raise AssertionError("spray fails G^h_i y^i = 2 G^h")
        if np.abs(np.einsum("hij,j->hi", self.G2, y) - self.N).max() > 1e-8 * scale:
            raise AssertionError("spray fails G^h_ij y^j = G^h_i")
        if np.abs(self.G2 - np.transpose(self.G2, (0, 2, 1))).max() > 1e-10 * scale:
            raise AssertionError("G^h_ij asymmetric in i, j")


class AdaptedFrame:
    """The horizontal derivative operator delta_i at a fixed point.

    Apply to any jet seeded at the same point (scalar or tensor valued); the
    result carries a trailing axis enumerating i.
    """

    def __init__(self, geometry):
        self._geometry = geometry

    def __call__(self, jet):
        return self._geometry.delta(jet)


# -- public single-point operations --------------------------------------------


def _pg(metric, point, order_hint=0):
    x, y = point.arrays()
    return PointGeometry(metric, x, y, order_hint=order_hint)


def energy(metric, point, order=DEFAULT_ORDER):
    """Jet of the energy E = L^2/2 at a chart point."""
    return _pg(metric, point, order_hint=order).E(order)


def metric_tensor(metric, point):
    """Fundamental tensor g_ij = dy_i dy_j E with its inverse (Cholesky-checked)."""
    pg = _pg(metric, point)
    g = pg.g(0).coeffs[..., 0]
    g_inv = pg.g_inv(0).coeffs[..., 0]
    return MetricTensorValue(g=g, g_inv=g_inv, point=point)


def cartan_tensor(metric, point):
    """Cartan tensor C_ijk = 1/2 dy_k g_ij and its mixed form C^h_ij."""
    pg = _pg(metric, point)
    return CartanTensorValue(
        C_low=pg.C_low(0).coeffs[..., 0],
        C_up=pg.C_up(0).coeffs[..., 0],
        point=point,
    )


def formal_christoffel(metric, point):
    """Formal Christoffel symbols gamma^h_ij from base-coordinate derivatives."""
    return _pg(metric, point).gamma(0).coeffs[..., 0]


def canonical_spray(metric, point):
    """Canonical spray G^h = 1/2 gamma^h_ij y^i y^j with G^h_i and G^h_ij."""
    pg = _pg(metric, point, order_hint=5)
    return SprayValue(
        G=pg.spray(0).coeffs[..., 0],
        N=pg.N(0).coeffs[..., 0],
        G2=pg.G2(0).coeffs[..., 0],
        point=point,
    )


def adapted_frame(metric, point):
    """Horizontal derivative operator delta_i at the given point."""
    return AdaptedFrame(_pg(metric, point))
