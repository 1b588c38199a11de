"""Truncated multivariate Taylor-jet arithmetic in three chart variables.

A jet stores the Taylor coefficients of a scalar field about a base point,
truncated at total degree <= 4.  Products, quotients and compositions with
analytic univariate functions are exact truncated-polynomial algebra, so
curvature pipelines built on jets have no finite-difference step-size error:
polynomial metrics come out bit-exact and analytic metrics to roundoff.

Coefficient layout: the last axis of ``Jet.coeffs`` runs over monomials
x^i y^j z^k ordered by total degree, then by the generator loop below; any
leading axes are a numpy-style batch.  The degree-<=n layout is a prefix of
the degree-<=(n+1) layout, so truncation is a slice.
"""

from __future__ import annotations

import math

import numpy as np

NVARS = 3
MAX_ORDER = 4


def _generate_monomials(order):
    monos = []
    for deg in range(order + 1):
        for i in range(deg, -1, -1):
            for j in range(deg - i, -1, -1):
                monos.append((i, j, deg - i - j))
    return tuple(monos)


MONOMIALS = _generate_monomials(MAX_ORDER)
#: number of coefficients of a jet of each order, NTERMS[n] = C(n+3, 3)
NTERMS = tuple(sum(1 for m in MONOMIALS if sum(m) <= n) for n in range(MAX_ORDER + 1))
_INDEX = {m: i for i, m in enumerate(MONOMIALS)}


def _build_mult_table(order):
    """Dense tensor M with (a*b)[v] = sum_{t,u} a[t] b[u] M[t,u,v]."""
    n = NTERMS[order]
    table = np.zeros((n, n, n))
    for t in range(n):
        mt = MONOMIALS[t]
        for u in range(n):
            mu = MONOMIALS[u]
            mo = (mt[0] + mu[0], mt[1] + mu[1], mt[2] + mu[2])
            if sum(mo) <= order:
                table[t, u, _INDEX[mo]] = 1.0
    return table


_MULT = {n: _build_mult_table(n) for n in range(MAX_ORDER + 1)}

# derivative index maps: _DIFF[var][target] = (source, multiplicity)
def _build_diff_maps():
    maps = []
    for v in range(NVARS):
        src = np.zeros(len(MONOMIALS), dtype=np.intp)
        fac = np.zeros(len(MONOMIALS))
        for i, m in enumerate(MONOMIALS):
            if m[v] == 0:
                continue
            lower = list(m)
            lower[v] -= 1
            src[_INDEX[tuple(lower)]] = i
            fac[_INDEX[tuple(lower)]] = m[v]
        maps.append((src, fac))
    return maps


_DIFF = _build_diff_maps()

_FACTORIALS = np.array([math.factorial(m[0]) * math.factorial(m[1]) * math.factorial(m[2])
                        for m in MONOMIALS])


class Jet:
    """Degree-truncated Taylor polynomial in 3 variables, numpy-batched.

    ``coeffs`` has shape ``batch + (NTERMS[order],)``.  Arithmetic between
    jets of different orders truncates to the lower order.  Scalars and
    broadcastable ndarrays mix freely as constants.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != NTERMS[order]:
            raise ValueError(f"coefficient axis has length {coeffs.shape[-1]}, "
                             f"expected {NTERMS[order]} for order {order}")
        self.coeffs = coeffs
        self.order = order

    # ------------------------------------------------------------------ #
    # constructors

    @classmethod
    def constant(cls, value, order, batch_shape=()):
        value = np.asarray(value, dtype=float)
        shape = np.broadcast_shapes(value.shape, batch_shape)
        coeffs = np.zeros(shape + (NTERMS[order],))
        coeffs[..., 0] = value
        return cls(coeffs, order)

    @classmethod
    def from_derivatives(cls, derivs, order):
        """Build a jet from derivative tensors.

        ``derivs[k]`` holds the symmetric k-th derivative with shape
        ``batch + (3,)*k``; coefficients are derivatives over multi-index
        factorials.
        """
        if len(derivs) < order + 1:
            raise ValueError("need derivative tensors up to the jet order")
        value = np.asarray(derivs[0], dtype=float)
        coeffs = np.zeros(value.shape + (NTERMS[order],))
        for pos, mono in enumerate(MONOMIALS[: NTERMS[order]]):
            deg = sum(mono)
            idx = (0,) * mono[0] + (1,) * mono[1] + (2,) * mono[2]
            d = np.asarray(derivs[deg], dtype=float)
            coeffs[..., pos] = d[(Ellipsis,) + idx] / _FACTORIALS[pos]
        return cls(coeffs, order)

    @classmethod
    def variable(cls, value, var, order):
        """Jet of the chart coordinate ``var`` (0, 1 or 2) based at ``value``."""
        if order < 1:
            raise ValueError("a coordinate jet needs order >= 1")
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (NTERMS[order],))
        coeffs[..., 0] = value
        coeffs[..., 1 + var] = 1.0
        return cls(coeffs, order)

    # ------------------------------------------------------------------ #
    # inspection

    @property
    def value(self):
        return self.coeffs[..., 0]

    @property
    def gradient(self):
        """First partials (d/dx, d/dy, d/dz), shape batch + (3,)."""
        return self.coeffs[..., 1:4].copy()

    @property
    def hessian(self):
        """Second-partial matrix, shape batch + (3, 3)."""
        if self.order < 2:
            raise ValueError("hessian needs order >= 2")
        c = self.coeffs
        h = np.empty(c.shape[:-1] + (3, 3))
        h[..., 0, 0] = 2.0 * c[..., 4]
        h[..., 0, 1] = h[..., 1, 0] = c[..., 5]
        h[..., 0, 2] = h[..., 2, 0] = c[..., 6]
        h[..., 1, 1] = 2.0 * c[..., 7]
        h[..., 1, 2] = h[..., 2, 1] = c[..., 8]
        h[..., 2, 2] = 2.0 * c[..., 9]
        return h

    def derivative_values(self):
        """All partial derivatives d^(i+j+k)f / dx^i dy^j dz^k as an array
        over the monomial axis (coefficients times multi-index factorials)."""
        return self.coeffs * _FACTORIALS[: self.coeffs.shape[-1]]

    def truncated(self, order):
        if order > self.order:
            raise ValueError("cannot raise jet order by truncation")
        if order == self.order:
            return self
        return Jet(self.coeffs[..., : NTERMS[order]], order)

    def __getitem__(self, key):
        """Batch-axis indexing; the coefficient axis is preserved."""
        return Jet(self.coeffs[key], self.order)

    def __repr__(self):
        return f"Jet(order={self.order}, batch={self.coeffs.shape[:-1]})"

    # ------------------------------------------------------------------ #
    # ring operations

    def _coerce(self, other, order):
        if isinstance(other, Jet):
            return other.truncated(order)
        return Jet.constant(np.asarray(other, dtype=float), order)

    def __add__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return Jet(self.truncated(order).coeffs + other.truncated(order).coeffs, order)
        out = self.coeffs.copy()
        out = np.broadcast_to(out, np.broadcast_shapes(out.shape, np.shape(other) + (1,))).copy() \
            if np.ndim(other) else out
        out[..., 0] = out[..., 0] + other
        return Jet(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, dtype=float)[..., None]
                       if np.ndim(other) else self.coeffs * other, self.order)
        order = min(self.order, other.order)
        a = self.truncated(order).coeffs
        b = other.truncated(order).coeffs
        return Jet(_mul_coeffs(a, b, order), order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            if p < 0:
                return self._reciprocal() ** (-p)
            result = Jet.constant(1.0, self.order, self.coeffs.shape[:-1])
            base = self
            k = int(p)
            while k:
                if k & 1:
                    result = result * base
                base = base * base
                k >>= 1
            return result
        return powf(self, float(p))

    def _reciprocal(self):
        return self.compose(lambda c, k: _pow_derivs(c, -1.0, k))

    # ------------------------------------------------------------------ #
    # analytic composition

    def compose(self, derivs):
        """f(self) for analytic univariate f.

        ``derivs(c, k)`` must return the k-th derivative of f at the array of
        constant terms ``c``.  Exact truncated-series composition: the
        nilpotent part n = self - c satisfies n^(order+1) = 0.
        """
        c = self.value
        nil = self.coeffs.copy()
        nil[..., 0] = 0.0
        out = np.zeros_like(self.coeffs)
        out[..., 0] = derivs(c, 0)
        power = None
        for k in range(1, self.order + 1):
            power = nil if power is None else _mul_coeffs(power, nil, self.order)
            out += (derivs(c, k) / math.factorial(k))[..., None] * power
        return Jet(out, self.order)


def _mul_coeffs(a, b, order):
    if order == 0:
        return a * b
    if order <= 2:
        return _mul_low_order(a, b, order)
    return np.einsum("...t,...u,tuv->...v", a, b, _MULT[order], optimize=True)


def _mul_low_order(a, b, order):
    """Slice-based product for the hot orders 1 and 2 (ODE right-hand sides)."""
    a0, b0 = a[..., 0], b[..., 0]
    al, bl = a[..., 1:4], b[..., 1:4]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a0 * b0
    out[..., 1:4] = a0[..., None] * bl + b0[..., None] * al
    if order == 2:
        aq, bq = a[..., 4:10], b[..., 4:10]
        q = a0[..., None] * bq + b0[..., None] * aq
        q[..., 0] += al[..., 0] * bl[..., 0]
        q[..., 1] += al[..., 0] * bl[..., 1] + al[..., 1] * bl[..., 0]
        q[..., 2] += al[..., 0] * bl[..., 2] + al[..., 2] * bl[..., 0]
        q[..., 3] += al[..., 1] * bl[..., 1]
        q[..., 4] += al[..., 1] * bl[..., 2] + al[..., 2] * bl[..., 1]
        q[..., 5] += al[..., 2] * bl[..., 2]
        out[..., 4:10] = q
    return out


def jet_diff(jet, var):
    """Partial derivative of a jet, one order lower."""
    if jet.order < 1:
        raise ValueError("cannot differentiate an order-0 jet")
    src, fac = _DIFF[var]
    n = NTERMS[jet.order - 1]
    return Jet(jet.coeffs[..., src[:n]] * fac[:n], jet.order - 1)


def coordinate_jets(points, order):
    """Coordinate jets (X, Y, Z) based at ``points`` of shape (..., 3)."""
    points = np.asarray(points, dtype=float)
    return tuple(Jet.variable(points[..., v], v, order) for v in range(NVARS))


def jet_where(mask, a, b):
    """Elementwise (over the batch) selection between two jets."""
    order = min(a.order, b.order)
    ca = a.truncated(order).coeffs
    cb = b.truncated(order).coeffs
    return Jet(np.where(np.asarray(mask)[..., None], ca, cb), order)


# ---------------------------------------------------------------------- #
# analytic functions usable on jets and plain arrays alike

def _pow_derivs(c, p, k):
    f = np.power(c, p - k)
    for i in range(k):
        f = f * (p - i)
    return f


def sqrt(x):
    if isinstance(x, Jet):
        return x.compose(lambda c, k: _pow_derivs(c, 0.5, k))
    return np.sqrt(x)


def powf(x, p):
    if isinstance(x, Jet):
        return x.compose(lambda c, k: _pow_derivs(c, p, k))
    return np.power(x, p)


def exp(x):
    if isinstance(x, Jet):
        return x.compose(lambda c, k: np.exp(c))
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        def derivs(c, k):
            if k == 0:
                return np.log(c)
            return ((-1.0) ** (k - 1)) * math.factorial(k - 1) * np.power(c, -float(k))
        return x.compose(derivs)
    return np.log(x)


def sin(x):
    if isinstance(x, Jet):
        cycle = (np.sin, np.cos, lambda c: -np.sin(c), lambda c: -np.cos(c))
        return x.compose(lambda c, k: cycle[k % 4](c))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        cycle = (np.cos, lambda c: -np.sin(c), lambda c: -np.cos(c), np.sin)
        return x.compose(lambda c, k: cycle[k % 4](c))
    return np.cos(x)


def horner(s, series_coeffs):
    """Evaluate sum_k c_k s^k by Horner's rule; works on jets and arrays."""
    acc = series_coeffs[-1] * (s * 0 + 1.0) if isinstance(s, Jet) else \
        np.full_like(np.asarray(s, dtype=float), series_coeffs[-1])
    for c in series_coeffs[-2::-1]:
        acc = acc * s + c
    return acc


class SeriesFunction:
    """Analytic function defined by Taylor coefficients at 0.

    Evaluation is Horner on plain arrays and exact truncated composition on
    jets; derivative series are precomputed, so a jet evaluation costs
    O(order) products regardless of series length.  ``deriv(x, k)``
    evaluates the k-th derivative on plain arrays.
    """

    def __init__(self, series_coeffs):
        base = np.asarray(series_coeffs, dtype=float)
        self.ladders = [base]
        for _ in range(MAX_ORDER):
            prev = self.ladders[-1]
            self.ladders.append(prev[1:] * np.arange(1, len(prev)))

    def deriv(self, x, k):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float),
                                                self.ladders[k])

    def __call__(self, x):
        if isinstance(x, Jet):
            return x.compose(self.deriv)
        return self.deriv(x, 0)


def series_function(series_coeffs):
    return SeriesFunction(series_coeffs)
