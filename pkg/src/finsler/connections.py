"""The four canonical connection triples and the two transforms between them.

A connection triple (F^h_ij, N^h_i, C^h_ij) is stored as evaluable coefficient
fields, not point snapshots: curvature formulas differentiate the
coefficients, so each slot must be computable as a jet at any admissible
point. The canonical triples are

    cartan      (Gamma^h_ij, G^h_i, C^h_ij)
    chern       (Gamma^h_ij, G^h_i, 0)
    hashiguchi  (G^h_ij,     G^h_i, C^h_ij)
    berwald     (G^h_ij,     G^h_i, 0)

all sharing the Barthel nonlinear coefficients N = G^h_i. Two transforms move
between them: dropping the vertical slot (`c_process`) and adding C^h_ij|0 to
the horizontal slot (`p1_process`). Applying both in either order lands on
the Berwald triple; that commutation is part of the verification suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .expressions import parse_expression, eval_jet
from .errors import SpecError
from .geometry import PointGeometry, stack_jets
from .jets import Jet, jet_space, seed_chart

CANONICAL_NAMES = ("cartan", "chern", "hashiguchi", "berwald")


class TripleValues(NamedTuple):
    F: np.ndarray
    N: np.ndarray
    C: np.ndarray


class CoefficientField:
    """One slot of a connection triple, evaluable as jets at any point."""

    def __init__(self, triple, slot, rank):
        self._triple = triple
        self._slot = slot
        self.rank = rank

    def __call__(self, point, order=0):
        x, y = point.arrays()
        return self._triple.jets_at(x, y, order)[self._slot]

    def values(self, point):
        return self(point, 0).coeffs[..., 0]


@dataclass(frozen=True)
class ConnectionTriple:
    """A Finsler connection (F, N, C) bound to a metric (or custom fields)."""

    name: str
    dim: int
    metric: object
    depth: int  # L-order consumed by the deepest slot at jet order 0
    _evaluator: Callable

    @property
    def F(self):
        return CoefficientField(self, 0, 3)

    @property
    def N(self):
        return CoefficientField(self, 1, 2)

    @property
    def C(self):
        return CoefficientField(self, 2, 3)

    def geometry(self, x, y, order=0):
        if self.metric is None:
            return None
        return PointGeometry(self.metric, x, y, order_hint=order + self.depth)

    def jets_at(self, x, y, order, geom=None):
        """Evaluate all three coefficient slots as jets of the given order."""
        if geom is None:
            geom = self.geometry(x, y, order)
        F, N, C = self._evaluator(x, y, order, geom)
        if C is None:
            C = Jet.constant(
                F.space, 0.0, F.shape
            )
        return F, N, C

    def values_at(self, point):
        """Point snapshot of the three coefficient arrays."""
        x, y = point.arrays()
        F, N, C = self.jets_at(x, y, 0)
        return TripleValues(F.coeffs[..., 0], N.coeffs[..., 0], C.coeffs[..., 0])

    @property
    def vertical_is_zero(self):
        return self.name in ("chern", "berwald")


def _eval_gamma(x, y, order, geom):
    geom.N(order)  # warms L at the deepest order this triple needs
    return geom.Gamma(order), geom.N(order), geom.C_up(order)


def _eval_gamma_no_c(x, y, order, geom):
    geom.N(order)
    return geom.Gamma(order), geom.N(order), None


def _eval_spray(x, y, order, geom):
    geom.G2(order)
    return geom.G2(order), geom.N(order), geom.C_up(order)


def _eval_spray_no_c(x, y, order, geom):
    geom.G2(order)
    return geom.G2(order), geom.N(order), None


_CANONICAL = {
    "cartan": (_eval_gamma, 4),
    "chern": (_eval_gamma_no_c, 4),
    "hashiguchi": (_eval_spray, 5),
    "berwald": (_eval_spray_no_c, 5),
}


def _canonical(metric, name, point=None):
    evaluator, depth = _CANONICAL[name]
    triple = ConnectionTriple(
        name=name, dim=metric.dim, metric=metric, depth=depth, _evaluator=evaluator
    )
    if point is not None:
        triple.values_at(point)  # eager admissibility check at the given point
    return triple


def cartan_connection(metric, point=None):
    """(Gamma^h_ij, G^h_i, C^h_ij): metric in both slots, symmetric horizontal
    part, vertical part the Cartan tensor."""
    return _canonical(metric, "cartan", point)


def chern_connection(metric, point=None):
    """(Gamma^h_ij, G^h_i, 0): the Cartan triple with the vertical slot dropped."""
    return _canonical(metric, "chern", point)


def hashiguchi_connection(metric, point=None):
    """(G^h_ij, G^h_i, C^h_ij): spray second derivatives horizontally, Cartan
    tensor vertically."""
    return _canonical(metric, "hashiguchi", point)


def berwald_connection(metric, point=None):
    """(G^h_ij, G^h_i, 0): both metric corrections dropped."""
    return _canonical(metric, "berwald", point)


def connection(metric, name, point=None):
    """Canonical triple by name."""
    if name not in CANONICAL_NAMES:
        raise SpecError(f"unknown connection {name!r}; expected one of "
                        f"{CANONICAL_NAMES}")
    return _canonical(metric, name, point)


# -- the two transforms -------------------------------------------------------

_C_PROCESS_NAME = {
    "cartan": "chern",
    "hashiguchi": "berwald",
    "chern": "chern",
    "berwald": "berwald",
    "custom": "custom",
}


def c_process(triple):
    """Drop the vertical slot: (F, N, C) -> (F, N, 0). Idempotent."""
    base = triple._evaluator

    def evaluator(x, y, order, geom):
        F, N, _ = base(x, y, order, geom)
        return F, N, None

    return ConnectionTriple(
        name=_C_PROCESS_NAME[triple.name],
        dim=triple.dim,
        metric=triple.metric,
        depth=triple.depth,
        _evaluator=evaluator,
    )


_P1_PROCESS_NAME = {"cartan": "hashiguchi", "chern": "berwald"}


def p1_process(triple):
    """Add C^h_ij|0 to the horizontal slot: (F, N, C) -> (F + P, N, C).

    Only defined on the Cartan and Chern triples, whose horizontal slot is
    Gamma; on those it lands (numerically, through the coefficient identity
    G^h_ij = Gamma^h_ij + C^h_ij|0) on the Hashiguchi and Berwald triples.
    """
    if triple.name not in _P1_PROCESS_NAME:
        raise SpecError(
            f"the horizontal-shift transform is defined on the cartan and "
            f"chern triples only, not {triple.name!r}"
        )
    base = triple._evaluator

    def evaluator(x, y, order, geom):
        F, N, C = base(x, y, order, geom)
        return F + geom.P_hat(order), N, C

    return ConnectionTriple(
        name=_P1_PROCESS_NAME[triple.name],
        dim=triple.dim,
        metric=triple.metric,
        depth=triple.depth,
        _evaluator=evaluator,
    )


# -- custom triples ------------------------------------------------------------


def expression_field(entries, dim):
    """Build a jet-evaluable tensor field from nested expression strings.

    `entries` is a nested list (depth = tensor rank) of expression strings in
    x1..xn, y1..yn; returns a callable (x, y, order) -> Jet whose trailing
    tensor axes follow the nesting.
    """
    shape = []
    probe = entries
    while isinstance(probe, (list, tuple)):
        shape.append(len(probe))
        probe = probe[0]
    flat = np.reshape(np.array(entries, dtype=object), -1)
    nodes = [parse_expression(str(t), dim) for t in flat]

    def jets(x, y, order):
        seeds = seed_chart(x, y, max(order, 1))
        xj, yj = seeds[:dim], seeds[dim:]
        stacked = stack_jets([eval_jet(node, xj, yj) for node in nodes])
        coeffs = stacked.coeffs
        batch = coeffs.shape[:-2]
        coeffs = coeffs.reshape(batch + tuple(shape) + coeffs.shape[-1:])
        return Jet(stacked.space, coeffs).truncate(order)

    return jets


def custom_connection(dim, F, N, C=None):
    """Triple from raw field callables (each (x, y, order) -> Jet).

    Exists so the generic curvature evaluator can be exercised on arbitrary
    coefficients; the two transforms treat such triples as opaque.
    """

    def evaluator(x, y, order, geom):
        return F(x, y, order), N(x, y, order), (C(x, y, order) if C else None)

    return ConnectionTriple(
        name="custom", dim=dim, metric=None, depth=0, _evaluator=evaluator
    )
