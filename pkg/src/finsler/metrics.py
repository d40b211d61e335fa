"""Declarative metric specifications and their evaluable form.

Three families are built in:

* ``riemannian``: L = sqrt(a_ij(x) y^i y^j) from a symmetric expression
  matrix given by its upper triangle,
* ``randers``: L = sqrt(a_ij(x) y^i y^j) + b_i(x) y^i, with the strong
  convexity condition a^{ij} b_i b_j < 1 enforced at every evaluated point,
* ``expression``: an arbitrary scalar expression in x1..xn, y1..yn.

Evaluation produces either a `Jet` of L (the differentiation path used by the
whole engine) or a plain float (used by the finite-difference oracle). The
two paths share only the parsed syntax tree, never differentiation code.

Indices in the expression language are 1-based (x1, y1, a[1,1]); everything
stored in arrays is 0-based. That mapping happens here and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import ConvexityError, EvaluationDomainError, SpecError
from .expressions import (Const, eval_floats, eval_jet, parse_expression,
                          variables_used)

FAMILIES = ("riemannian", "randers", "expression")


@dataclass(frozen=True)
class MetricSpec:
    """Declarative description of a fundamental function.

    Parameters
    ----------
    dim : int
        Chart dimension n >= 2.
    family : str
        One of ``riemannian``, ``randers``, ``expression``.
    a : dict, optional
        Upper-triangle entries of the symmetric matrix a_ij as expression
        strings in x only, keyed by 1-based (i, j) with i <= j. Missing
        entries are zero. Required for riemannian and randers.
    b : sequence of str, optional
        The n covector components b_i(x) as expression strings in x only.
        Required for randers.
    expression : str, optional
        Scalar expression for L(x, y). Required for the expression family.
    """

    dim: int
    family: str
    a: tuple = None
    b: tuple = None
    expression: str = None

    def __init__(self, dim, family, a=None, b=None, expression=None):
        if dim < 2:
            raise SpecError(f"chart dimension must be at least 2, got {dim}")
        if family not in FAMILIES:
            raise SpecError(f"unknown metric family {family!r}; "
                            f"expected one of {FAMILIES}")
        if family in ("riemannian", "randers"):
            if not a:
                raise SpecError(f"family {family!r} requires the matrix payload 'a'")
            items = []
            for key, text in dict(a).items():
                i, j = (int(v) for v in key)
                if not (1 <= i <= dim and 1 <= j <= dim):
                    raise SpecError(f"matrix entry a[{i},{j}] outside dimension {dim}")
                if i > j:
                    raise SpecError(
                        f"matrix entry a[{i},{j}] is below the diagonal; "
                        "only the upper triangle is accepted"
                    )
                items.append(((i, j), str(text)))
            a = tuple(sorted(items))
        elif a:
            raise SpecError("payload 'a' is only valid for riemannian/randers")
        if family == "randers":
            b = tuple(str(t) for t in b) if b is not None else None
            if b is None or len(b) != dim:
                raise SpecError(f"family 'randers' requires {dim} covector entries")
        elif b:
            raise SpecError("payload 'b' is only valid for the randers family")
        if family == "expression":
            if not expression or not str(expression).strip():
                raise SpecError("family 'expression' requires a scalar expression")
            expression = str(expression)
        elif expression:
            raise SpecError("payload 'expression' is only valid for that family")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "expression", expression)

    def label(self):
        if self.family == "expression":
            return f"expression[{self.expression}]"
        parts = ",".join(f"a{i}{j}={t}" for (i, j), t in self.a)
        if self.family == "randers":
            parts += ";b=" + ",".join(self.b)
        return f"{self.family}[{parts}]"


def _parse_x_only(text, dim, what):
    node = parse_expression(text, dim)
    for kind, idx in variables_used(node):
        if kind == "y":
            raise SpecError(
                f"{what} must depend on x only, found y{idx + 1} in {text!r}"
            )
    return node


class FinslerMetric:
    """Evaluable fundamental function built from a MetricSpec."""

    def __init__(self, spec):
        self.spec = spec
        self.dim = spec.dim
        n = spec.dim
        if spec.family in ("riemannian", "randers"):
            entries = dict(spec.a)
            self._a_nodes = [[None] * n for _ in range(n)]
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    text = entries.get((i, j), "0")
                    node = _parse_x_only(text, n, f"a[{i},{j}]")
                    self._a_nodes[i - 1][j - 1] = node
                    self._a_nodes[j - 1][i - 1] = node
        if spec.family == "randers":
            self._b_nodes = [
                _parse_x_only(t, n, f"b[{i + 1}]") for i, t in enumerate(spec.b)
            ]
        if spec.family == "expression":
            self._expr_node = parse_expression(spec.expression, n)

    # -- float path (shared with the finite-difference oracle) -------------

    def a_values(self, x):
        """Matrix a_ij(x) on plain floats; shape (..., n, n)."""
        if self.spec.family not in ("riemannian", "randers"):
            raise SpecError(f"family {self.spec.family!r} has no matrix payload")
        x = np.asarray(x, dtype=float)
        n = self.dim
        out = np.zeros(x.shape[:-1] + (n, n))
        for i in range(n):
            for j in range(n):
                out[..., i, j] = eval_floats(self._a_nodes[i][j], x, x)
        return out

    def b_values(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.dim,))
        for i, node in enumerate(self._b_nodes):
            out[..., i] = eval_floats(node, x, x)
        return out

    def _check_convexity(self, x):
        a = self.a_values(x)
        b = self.b_values(x)
        try:
            z = np.linalg.solve(a, b[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise EvaluationDomainError(
                f"randers base matrix singular at x={np.asarray(x)}"
            ) from exc
        norm2 = np.einsum("...i,...i->...", b, z)
        if np.any(norm2 >= 1.0):
            raise ConvexityError(
                "randers covector reaches a-norm "
                f"{float(np.sqrt(np.max(norm2))):.6g} >= 1 at an evaluated point"
            )

    def value(self, x, y):
        """L(x, y) on plain floats; broadcasts over leading axes."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        family = self.spec.family
        if family == "expression":
            L = eval_floats(self._expr_node, x, y)
        else:
            a = self.a_values(x)
            quad = np.einsum("...ij,...i,...j->...", a, y, y)
            if np.any(quad <= 0.0):
                raise EvaluationDomainError(
                    "quadratic form non-positive at an evaluated point"
                )
            L = np.sqrt(quad)
            if family == "randers":
                self._check_convexity(x)
                L = L + np.einsum("...i,...i->...", self.b_values(x), y)
        if np.any(np.asarray(L) <= 0.0):
            raise EvaluationDomainError(
                "fundamental function non-positive at an evaluated point"
            )
        return L

    # -- jet path -----------------------------------------------------------

    def jet(self, x, y, order):
        """Jet of L at chart coordinates x, y (arrays of shape (..., n))."""
        seeds = jets.seed_chart(x, y, order)
        n = self.dim
        xj, yj = seeds[:n], seeds[n:]
        family = self.spec.family
        if family == "expression":
            L = eval_jet(self._expr_node, xj, yj)
        else:
            quad = None
            for i in range(n):
                for j in range(i, n):
                    node = self._a_nodes[i][j]
                    if isinstance(node, Const) and node.value == 0.0:
                        continue
                    term = eval_jet(node, xj, yj) * yj[i] * yj[j]
                    if i != j:
                        term = term * 2.0
                    quad = term if quad is None else quad + term
            if quad is None or np.any(np.asarray(quad.coeffs[..., 0]) <= 0.0):
                raise EvaluationDomainError(
                    "quadratic form non-positive at an evaluated point"
                )
            L = jets.sqrt(quad)
            if family == "randers":
                self._check_convexity(np.asarray(x, dtype=float))
                for i, node in enumerate(self._b_nodes):
                    L = L + eval_jet(node, xj, yj) * yj[i]
        if np.any(np.asarray(L.coeffs[..., 0]) <= 0.0):
            raise EvaluationDomainError(
                "fundamental function non-positive at an evaluated point"
            )
        return L

    def eval(self, point, order=4):
        """Jet of L at a single ChartPoint."""
        x, y = point.arrays()
        return self.jet(x, y, order)


def build_metric(spec):
    """Turn a MetricSpec into an evaluable FinslerMetric."""
    return FinslerMetric(spec)


def verify_homogeneity(metric, point, lam, tol=None):
    """Check positive 1-homogeneity L(x, lam*y) = lam*L(x, y) at one point.

    Returns (passed, residual). The default tolerance is 1e-9 scaled by
    max(1, lam*L). Report-only: never raises on failure.
    """
    if lam <= 0.0 or lam == 1.0:
        raise ValueError("homogeneity factor must be positive and != 1")
    x, y = point.arrays()
    base = float(metric.value(x, y))
    scaled = float(metric.value(x, lam * y))
    residual = abs(scaled - lam * base)
    if tol is None:
        tol = 1e-9 * max(1.0, lam * base)
    return residual <= tol, residual


def homogeneity_residuals(metric, x, y, lam):
    """Vectorized |L(x, lam*y) - lam*L(x, y)| over batches of points."""
    base = np.asarray(metric.value(x, y))
    scaled = np.asarray(metric.value(x, lam * np.asarray(y)))
    return np.abs(scaled - lam * base), base
