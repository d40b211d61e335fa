"""Dense truncated Taylor jets over the 2n chart variables (x^1..x^n, y^1..y^n).

A `Jet` stores every mixed partial derivative of a scalar up to a truncation
order, in *derivative normalization*: the coefficient attached to the
multi-index ``alpha`` is the mixed partial ``d^alpha f`` itself, not the Taylor
coefficient ``d^alpha f / alpha!``. Reading off a derivative is then a plain
table lookup, and taking one more derivative is an index shift; the binomial
weights of the Leibniz rule live inside the multiplication plan instead.

Jets may carry an arbitrary leading batch shape, so a whole grid of evaluation
points (or a whole tensor of components) is pushed through the algebra with
vectorized numpy/scipy kernels. All operations are pure; jets are never
mutated after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np
from scipy import sparse

from .errors import EvaluationDomainError, TruncationError

# Slit-bundle guard: tangent vectors shorter than this are rejected.
Y_MIN = 1e-8


@dataclass(frozen=True)
class ChartPoint:
    """A point (x, y) of the slit tangent bundle over a single chart."""

    x: tuple
    y: tuple

    def __init__(self, x, y, y_min=Y_MIN):
        x = tuple(float(v) for v in np.asarray(x, dtype=float).ravel())
        y = tuple(float(v) for v in np.asarray(y, dtype=float).ravel())
        if len(x) != len(y):
            raise ValueError(f"x has {len(x)} coordinates but y has {len(y)}")
        if len(x) < 2:
            raise ValueError(f"chart dimension must be at least 2, got {len(x)}")
        if math.sqrt(sum(v * v for v in y)) < y_min:
            raise EvaluationDomainError(
                f"tangent vector {y} lies below the slit-bundle cutoff {y_min}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def dim(self):
        return len(self.x)

    def arrays(self):
        return np.asarray(self.x), np.asarray(self.y)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


class JetSpace:
    """Shared tables for one (number-of-variables, truncation-order) pair.

    Holds the graded multi-index enumeration, the Leibniz multiplication plan
    as a sparse scatter matrix, and the index-shift maps realizing single
    derivatives. Spaces are cached; build cost is paid once per shape.
    """

    def __init__(self, nvars, order):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        self.nvars = nvars
        self.order = order
        exps = []
        self.size_through = []  # size_through[k] = #indices with degree <= k
        for deg in range(order + 1):
            exps.extend(_compositions(deg, nvars))
            self.size_through.append(len(exps))
        self.exponents = np.array(exps, dtype=np.int64)
        self.size = len(exps)
        self.index = {tuple(e): i for i, e in enumerate(exps)}
        self.degrees = self.exponents.sum(axis=1)
        self._plan = None
        self._shift = {}

    def index_of(self, alpha):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise ValueError(
                f"multi-index has {len(alpha)} entries, expected {self.nvars}"
            )
        if any(a < 0 for a in alpha):
            raise ValueError(f"negative entry in multi-index {alpha}")
        if sum(alpha) > self.order:
            raise TruncationError(
                f"derivative {alpha} of total order {sum(alpha)} exceeds "
                f"jet truncation order {self.order}"
            )
        return self.index[alpha]

    def _mul_plan(self):
        # Pairs (i, j) with deg_i + deg_j <= order; scatter into k = index(a_i + a_j)
        # weighted by the Leibniz binomial prod_c C(a_i[c] + a_j[c], a_i[c]).
        if self._plan is None:
            comb = np.array(
                [[math.comb(a, b) for b in range(self.order + 1)]
                 for a in range(self.order + 1)],
                dtype=float,
            )
            ia, ib, kk, ww = [], [], [], []
            for i in range(self.size):
                room = self.order - self.degrees[i]
                jmax = self.size_through[room]
                ei = self.exponents[i]
                for j in range(jmax):
                    ej = self.exponents[j]
                    s = ei + ej
                    k = self.index[tuple(s)]
                    w = 1.0
                    for c in range(self.nvars):
                        w *= comb[s[c], ei[c]]
                    ia.append(i)
                    ib.append(j)
                    kk.append(k)
                    ww.append(w)
            t = np.arange(len(ia))
            scatter = sparse.csr_matrix(
                (np.array(ww), (t, np.array(kk))), shape=(len(ia), self.size)
            )
            self._plan = (np.array(ia, dtype=np.int64),
                          np.array(ib, dtype=np.int64), scatter)
        return self._plan

    def _shift_map(self, var):
        # Target index t in the (order-1)-space reads source index t' here,
        # where exponent(t') = exponent(t) + e_var.
        if var not in self._shift:
            lower = self.size_through[self.order - 1] if self.order > 0 else 0
            out = np.empty(lower, dtype=np.int64)
            for t in range(lower):
                e = self.exponents[t].copy()
                e[var] += 1
                out[t] = self.index[tuple(e)]
            self._shift[var] = out
        return self._shift[var]


_SPACES: dict = {}


def jet_space(nvars, order):
    key = (nvars, order)
    if key not in _SPACES:
        _SPACES[key] = JetSpace(nvars, order)
    return _SPACES[key]


class Jet:
    """Truncated jet of a scalar, possibly batched over a leading shape."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != space.size:
            raise ValueError(
                f"coefficient array has {coeffs.shape[-1]} entries, space has {space.size}"
            )
        self.space = space
        self.coeffs = coeffs

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, space, value, shape=()):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(np.broadcast_shapes(shape, value.shape) + (space.size,))
        coeffs[..., 0] = value
        return cls(space, coeffs)

    @classmethod
    def variable(cls, space, var, value):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (space.size,))
        coeffs[..., 0] = value
        if space.order >= 1:
            coeffs[..., space.index_of(tuple(int(c == var) for c in range(space.nvars)))] = 1.0
        return cls(space, coeffs)

    # -- basic views ------------------------------------------------------

    @property
    def nvars(self):
        return self.space.nvars

    @property
    def order(self):
        return self.space.order

    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    def extract(self, alpha):
        """Mixed partial derivative d^alpha f at the seed point."""
        v = self.coeffs[..., self.space.index_of(alpha)]
        return float(v) if v.ndim == 0 else v

    def truncate(self, order):
        if order == self.order:
            return self
        if order > self.order:
            raise TruncationError(
                f"cannot extend a jet of order {self.order} to order {order}"
            )
        space = jet_space(self.nvars, order)
        return Jet(space, self.coeffs[..., : space.size])

    def derivative(self, var):
        """Jet of the single partial derivative along variable `var`
        (0-based over the combined x,y block); one order lower."""
        if self.order == 0:
            raise TruncationError("cannot differentiate an order-0 jet")
        shift = self.space._shift_map(var)
        return Jet(jet_space(self.nvars, self.order - 1), self.coeffs[..., shift])

    def stack_derivatives(self, variables):
        """Jet with a new trailing batch axis enumerating d/d(var) for each
        requested variable. Used to build gradients/tensor slots in bulk."""
        if self.order == 0:
            raise TruncationError("cannot differentiate an order-0 jet")
        lower = jet_space(self.nvars, self.order - 1)
        out = np.empty(self.shape + (len(variables), lower.size))
        for a, var in enumerate(variables):
            out[..., a, :] = self.coeffs[..., self.space._shift_map(var)]
        return Jet(lower, out)

    # -- ring arithmetic ---------------------------------------------------

    def _match(self, other):
        if self.nvars != other.nvars:
            raise ValueError(
                f"jets over {self.nvars} and {other.nvars} variables cannot mix"
            )
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order)

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._match(other)
            return Jet(a.space, a.coeffs + b.coeffs)
        return self._add_scalar(other)

    __radd__ = __add__

    def _add_scalar(self, other):
        coeffs = self.coeffs.copy()
        coeffs[..., 0] = coeffs[..., 0] + np.asarray(other, dtype=float)
        return Jet(self.space, coeffs)

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b = self._match(other)
            return Jet(a.space, a.coeffs - b.coeffs)
        return self._add_scalar(-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self)._add_scalar(other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.space, self.coeffs * np.asarray(other, dtype=float)[..., None])
        a, b = self._match(other)
        ia, ib, scatter = a.space._mul_plan()
        prod = a.coeffs[..., ia] * b.coeffs[..., ib]
        flat = prod.reshape(-1, prod.shape[-1]) @ scatter
        return Jet(a.space, np.asarray(flat).reshape(prod.shape[:-1] + (a.space.size,)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * _compose(other, _series_reciprocal, "div")
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return _compose(self, _series_reciprocal, "div") * other

    def __pow__(self, exponent):
        return power(self, exponent)

    def sum(self, axis):
        """Sum over a batch axis (negative axes count from before the
        coefficient axis)."""
        if axis >= 0:
            raise ValueError("pass a negative batch axis")
        return Jet(self.space, self.coeffs.sum(axis=axis - 1))


# -- elementary functions via truncated Taylor composition -----------------


def _compose(jet, series, name=None):
    """Compose an analytic function with a jet: Horner evaluation of the
    function's Taylor series in the nilpotent part of the jet."""
    order = jet.order
    c = series(np.asarray(jet.coeffs[..., 0]), order)  # (order+1, *batch)
    uhat_coeffs = jet.coeffs.copy()
    uhat_coeffs[..., 0] = 0.0
    uhat = Jet(jet.space, uhat_coeffs)
    res = Jet.constant(jet.space, c[order], jet.shape)
    for m in range(order - 1, -1, -1):
        res = res * uhat
        res = res._add_scalar(c[m])
    return res


def _require(cond_array, op, values):
    bad = ~np.asarray(cond_array)
    if np.any(bad):
        offender = np.asarray(values)[bad].ravel()[0] if np.ndim(values) else values
        raise EvaluationDomainError(f"{op} applied to inadmissible value {offender}")


def _series_reciprocal(u0, order):
    _require(u0 != 0.0, "div", u0)
    c = np.empty((order + 1,) + np.shape(u0))
    c[0] = 1.0 / u0
    for m in range(1, order + 1):
        c[m] = -c[m - 1] / u0
    return c


def _series_sqrt(u0, order):
    _require(u0 > 0.0, "sqrt", u0)
    c = np.empty((order + 1,) + np.shape(u0))
    c[0] = np.sqrt(u0)
    for m in range(1, order + 1):
        c[m] = c[m - 1] * (0.5 - (m - 1)) / (m * u0)
    return c


def _series_pow(r):
    def series(u0, order):
        c = np.empty((order + 1,) + np.shape(u0))
        c[0] = u0 ** r
        for m in range(1, order + 1):
            c[m] = c[m - 1] * (r - (m - 1)) / (m * u0)
        return c

    return series


def _series_exp(u0, order):
    c = np.empty((order + 1,) + np.shape(u0))
    c[0] = np.exp(u0)
    for m in range(1, order + 1):
        c[m] = c[m - 1] / m
    return c


def _series_log(u0, order):
    _require(u0 > 0.0, "log", u0)
    c = np.empty((order + 1,) + np.shape(u0))
    c[0] = np.log(u0)
    if order >= 1:
        c[1] = 1.0 / u0
    for m in range(2, order + 1):
        c[m] = -c[m - 1] * (m - 1) / (m * u0)
    return c


def _series_sin(u0, order):
    c = np.empty((order + 1,) + np.shape(u0))
    cycle = (np.sin(u0), np.cos(u0), -np.sin(u0), -np.cos(u0))
    fact = 1.0
    for m in range(order + 1):
        fact = fact * m if m else 1.0
        c[m] = cycle[m % 4] / fact
    return c


def _series_cos(u0, order):
    c = np.empty((order + 1,) + np.shape(u0))
    cycle = (np.cos(u0), -np.sin(u0), -np.cos(u0), np.sin(u0))
    fact = 1.0
    for m in range(order + 1):
        fact = fact * m if m else 1.0
        c[m] = cycle[m % 4] / fact
    return c


def sqrt(jet):
    return _compose(jet, _series_sqrt)


def exp(jet):
    return _compose(jet, _series_exp)


def log(jet):
    return _compose(jet, _series_log)


def sin(jet):
    return _compose(jet, _series_sin)


def cos(jet):
    return _compose(jet, _series_cos)


def power(jet, r):
    """jet ** r for a real exponent.

    Integer exponents >= 0 go through binary exponentiation and are valid on
    any value; other exponents use the binomial series, which restricts the
    base (negative exponents need a nonzero value, fractional ones a positive
    value).
    """
    r = float(r)
    if r.is_integer() and r >= 0:
        k = int(r)
        result = Jet.constant(jet.space, 1.0, jet.shape)
        base = jet
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result
    if r.is_integer():
        _require(np.asarray(jet.coeffs[..., 0]) != 0.0, f"pow({r})", jet.coeffs[..., 0])
    else:
        _require(np.asarray(jet.coeffs[..., 0]) > 0.0, f"pow({r})", jet.coeffs[..., 0])
    return _compose(jet, _series_pow(r))


def extract(jet, alpha):
    """Module-level alias for Jet.extract."""
    return jet.extract(alpha)


# -- seeding ----------------------------------------------------------------


def seed_chart(x, y, order):
    """Seed jets for a batch of chart points.

    Parameters
    ----------
    x, y : arrays of shape (..., n)
        Base coordinates and fiber coordinates.
    order : int
        Truncation order, at least 1.

    Returns
    -------
    list of 2n jets (x^1..x^n then y^1..y^n), each with batch shape (...).
    """
    if order < 1:
        raise ValueError("seeding requires order >= 1 (an order-0 jet carries "
                         "no derivative information)")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"mismatched x shape {x.shape} and y shape {y.shape}")
    n = x.shape[-1]
    space = jet_space(2 * n, order)
    seeds = [Jet.variable(space, i, x[..., i]) for i in range(n)]
    seeds += [Jet.variable(space, n + i, y[..., i]) for i in range(n)]
    return seeds


def seed_variables(point, order):
    """Seed jets for the 2n chart variables at a single ChartPoint."""
    x, y = point.arrays()
    return seed_chart(x, y, order)
