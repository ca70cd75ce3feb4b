"""Truncated multivariate Taylor arithmetic (jets).

A jet represents a smooth function near a base point p by the normalized
coefficients of its Taylor expansion,

    f(x) = sum_alpha  c_alpha * (x - p)^alpha,        |alpha| <= order,

so that the partial derivative d^alpha f(p) equals c_alpha * alpha!.
Coefficients are stored densely in graded lexicographic order as an array of
shape (n_terms, batch): one jet value carries the expansions of f at a whole
batch of base points, and every operation vectorizes over that axis.

Arithmetic (+, -, *, /) and the analytic functions exp, log, sqrt, sin, cos,
and real powers are exact on truncated series: if the inputs carry the true
Taylor coefficients of their functions up to some order, the result carries
the true coefficients of the composite up to the propagated validity order.
Validity shrinks only under differentiation (by one) and is tracked on each
value; reading a coefficient beyond it raises :class:`JetOrderError` instead
of returning a number that merely looks plausible.
"""

import functools
import itertools
import math

import numpy as np

from . import fieldmath


class JetError(ValueError):
    pass


class SingularPointError(JetError):
    """Operation hit a point outside the function's domain (1/0, log of <= 0)."""


class JetOrderError(JetError):
    """Requested information beyond the jet's validity order."""


@functools.lru_cache(maxsize=None)
def jet_space(n_vars: int, order: int) -> "JetSpace":
    return JetSpace(n_vars, order)


class JetSpace:
    """Index tables for dense jets in ``n_vars`` variables up to total ``order``.

    Build once per (n_vars, order) via :func:`jet_space`; jets sharing a space
    share its multiplication and differentiation tables.
    """

    def __init__(self, n_vars: int, order: int):
        if n_vars < 1 or order < 0:
            raise JetError(f"bad jet space ({n_vars} vars, order {order})")
        self.n_vars = n_vars
        self.order = order

        exps = []
        for total in range(order + 1):
            block = [e for e in itertools.product(range(total + 1), repeat=n_vars)
                     if sum(e) == total]
            block.sort()
            exps.extend(block)
        self.exponents = np.array(exps, dtype=np.int64)
        self.size = len(exps)
        self.degrees = self.exponents.sum(axis=1)
        self.factorials = np.array(
            [math.prod(math.factorial(int(k)) for k in e) for e in exps],
            dtype=float)

        # Integer keys in base (order+1) are collision-free: each component of a
        # representable multi-index is <= order.
        base = order + 1
        weights = base ** np.arange(n_vars, dtype=np.int64)
        keys = self.exponents @ weights
        self._key_sort = np.argsort(keys)
        self._sorted_keys = keys[self._key_sort]
        self._weights = weights

        i_idx, j_idx = np.meshgrid(np.arange(self.size), np.arange(self.size),
                                   indexing="ij")
        keep = (self.degrees[i_idx] + self.degrees[j_idx] <= order)
        ii = i_idx[keep]
        jj = j_idx[keep]
        kk = self._lookup(self.exponents[ii] + self.exponents[jj])
        srt = np.argsort(kk, kind="stable")
        self._mul_i = ii[srt]
        self._mul_j = jj[srt]
        kk = kk[srt]
        uniq, seg = np.unique(kk, return_index=True)
        if not np.array_equal(uniq, np.arange(self.size)):
            raise JetError("multiplication table misses target indices")
        self._mul_seg = seg

        self._d_src = []
        self._d_dst = []
        self._d_mul = []
        for v in range(n_vars):
            src = np.nonzero(self.exponents[:, v] >= 1)[0]
            lowered = self.exponents[src].copy()
            lowered[:, v] -= 1
            self._d_src.append(src)
            self._d_dst.append(self._lookup(lowered))
            self._d_mul.append(self.exponents[src, v].astype(float)[:, None])

    def _lookup(self, exps: np.ndarray) -> np.ndarray:
        keys = exps @ self._weights
        pos = np.searchsorted(self._sorted_keys, keys)
        return self._key_sort[pos]

    def lookup(self, exps: np.ndarray) -> np.ndarray:
        """Indices of the given rows of multi-index exponents (must be representable)."""
        exps = np.asarray(exps, dtype=np.int64)
        if np.any(exps < 0) or np.any(exps.sum(axis=-1) > self.order):
            raise JetError("multi-index outside this space")
        return self._lookup(exps)

    def index_of(self, alpha) -> int:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n_vars or any(a < 0 for a in alpha) \
                or sum(alpha) > self.order:
            raise JetError(f"multi-index {alpha} not representable in this space")
        pos = np.searchsorted(self._sorted_keys,
                              np.dot(alpha, self._weights))
        return int(self._key_sort[pos])

    def mul_raw(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        terms = a[self._mul_i] * b[self._mul_j]
        return np.add.reduceat(terms, self._mul_seg, axis=0)

    def constant(self, value) -> "Jet":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        coeffs = np.zeros((self.size, value.shape[0]))
        coeffs[0] = value
        return Jet(self, coeffs, self.order)

    def variables(self, point) -> list:
        """Coordinate jets x_v = p_v + (x - p)_v at base points ``point``.

        ``point`` has shape (n_vars,) or (n_vars, batch). Seeds are exact
        polynomials, so they carry full validity order.
        """
        point = np.asarray(point, dtype=float)
        if point.ndim == 1:
            point = point[:, None]
        if point.shape[0] != self.n_vars:
            raise JetError(f"expected {self.n_vars} coordinates, got {point.shape[0]}")
        out = []
        for v in range(self.n_vars):
            coeffs = np.zeros((self.size, point.shape[1]))
            coeffs[0] = point[v]
            if self.order >= 1:
                e = [0] * self.n_vars
                e[v] = 1
                coeffs[self.index_of(e)] = 1.0
            out.append(Jet(self, coeffs, self.order))
        return out


class Jet:
    __array_ufunc__ = None  # keep numpy scalars from hijacking binary ops

    def __init__(self, space: JetSpace, coeffs: np.ndarray, order: int):
        self.space = space
        self.coeffs = coeffs
        self.order = order

    @property
    def batch(self) -> int:
        return self.coeffs.shape[1]

    def value(self) -> np.ndarray:
        return self.coeffs[0].copy()

    def coeff(self, alpha) -> np.ndarray:
        idx = self.space.index_of(alpha)
        if self.space.degrees[idx] > self.order:
            raise JetOrderError(
                f"coefficient {tuple(alpha)} beyond validity order {self.order}")
        return self.coeffs[idx].copy()

    def deriv(self, alpha) -> np.ndarray:
        return self.coeff(alpha) * self.space.factorials[self.space.index_of(alpha)]

    def partial(self, v: int) -> "Jet":
        if self.order < 1:
            raise JetOrderError("cannot differentiate a jet of validity order 0")
        sp = self.space
        out = np.zeros_like(self.coeffs)
        out[sp._d_dst[v]] = self.coeffs[sp._d_src[v]] * sp._d_mul[v]
        return Jet(sp, out, self.order - 1)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise JetError("jets from different spaces")
            return other
        if isinstance(other, (int, float, np.floating, np.integer, np.ndarray)):
            return self.space.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.coeffs + o.coeffs, min(self.order, o.order))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.coeffs - o.coeffs, min(self.order, o.order))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, o.coeffs - self.coeffs, min(self.order, o.order))

    def __neg__(self):
        return Jet(self.space, -self.coeffs, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs * float(other), self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.space, self.space.mul_raw(self.coeffs, o.coeffs),
                   min(self.order, o.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs / float(other), self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            if n < 0:
                return self.reciprocal() ** (-int(n))
            result = self.space.constant(np.ones(self.batch))
            result.order = self.order
            base = self
            n = int(n)
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return self.pow_real(float(n))

    def _compose(self, series) -> "Jet":
        """Evaluate sum_m a_m * (self - value)^m by Horner; ``series[m]`` is a_m."""
        sp = self.space
        u = self.coeffs.copy()
        u[0] = 0.0
        out = np.zeros_like(self.coeffs)
        out[0] = series[-1]
        for m in range(sp.order - 1, -1, -1):
            out = sp.mul_raw(out, u)
            out[0] += series[m]
        return Jet(sp, out, self.order)

    def reciprocal(self) -> "Jet":
        c0 = self.coeffs[0]
        if np.any(c0 == 0.0):
            raise SingularPointError("reciprocal of a jet with zero value")
        series = [1.0 / c0]
        for _ in range(self.space.order):
            series.append(-series[-1] / c0)
        return self._compose(series)

    def exp(self) -> "Jet":
        e0 = np.exp(self.coeffs[0])
        series = [e0 / math.factorial(m) for m in range(self.space.order + 1)]
        return self._compose(series)

    def log(self) -> "Jet":
        c0 = self.coeffs[0]
        if np.any(c0 <= 0.0):
            raise SingularPointError("log of a jet with non-positive value")
        series = [np.log(c0)]
        for m in range(1, self.space.order + 1):
            series.append((-1.0) ** (m - 1) / (m * c0 ** m))
        return self._compose(series)

    def pow_real(self, a: float) -> "Jet":
        c0 = self.coeffs[0]
        if np.any(c0 <= 0.0):
            raise SingularPointError("real power of a jet with non-positive value")
        series = [c0 ** a]
        for m in range(1, self.space.order + 1):
            series.append(series[-1] * (a - m + 1) / (m * c0))
        return self._compose(series)

    def sqrt(self) -> "Jet":
        return self.pow_real(0.5)

    def sin(self) -> "Jet":
        c0 = self.coeffs[0]
        cyc = [np.sin(c0), np.cos(c0), -np.sin(c0), -np.cos(c0)]
        series = [cyc[m % 4] / math.factorial(m)
                  for m in range(self.space.order + 1)]
        return self._compose(series)

    def cos(self) -> "Jet":
        c0 = self.coeffs[0]
        cyc = [np.cos(c0), -np.sin(c0), -np.cos(c0), np.sin(c0)]
        series = [cyc[m % 4] / math.factorial(m)
                  for m in range(self.space.order + 1)]
        return self._compose(series)

    def __repr__(self):
        return (f"Jet(vars={self.space.n_vars}, order={self.order}, "
                f"batch={self.batch}, value~{np.mean(self.coeffs[0]):.6g})")


fieldmath.fexp.register(Jet, lambda x: x.exp())
fieldmath.flog.register(Jet, lambda x: x.log())
fieldmath.fsqrt.register(Jet, lambda x: x.sqrt())
fieldmath.fsin.register(Jet, lambda x: x.sin())
fieldmath.fcos.register(Jet, lambda x: x.cos())
fieldmath.fpowr.register(Jet, lambda x, a: x.pow_real(a))
