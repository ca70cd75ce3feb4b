"""Riemannian geometry of a coordinate chart over generic field elements.

Every function here is written once against a small element protocol (ring
arithmetic, ``.partial(i)``, the analytic functions in :mod:`.fieldmath`) and
therefore runs unchanged on truncated jets and on grid-sampled fields. That
single code path is what makes the symbolic checks and the finite-difference
checks share one set of sign conventions.

Conventions, fixed once and verified by the unit-sphere anchor test:

* Christoffel symbols  Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
* Curvature operator   R(e_i, e_j) e_k = Rup^l_{k i j} e_l  with
  Rup^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
              + Gamma^l_{ip} Gamma^p_{jk} - Gamma^l_{jp} Gamma^p_{ik}.
* Lowered curvature    riem_low[i,j,k,l] = < R(e_i,e_j) e_k , e_l >,
  so the round sphere has positive sectional curvature and
  Ric_jk = g^{il} riem_low[i,j,k,l] gives scalar curvature +2 on the unit
  2-sphere. The same array contracted as g^{ij} riem_low[p,i,j,q] returns
  Ric_pq, which is the form the curvature-reaction terms below use.

Tensor components are stored in object ndarrays with covariant axes first;
:func:`covariant_derivative` prepends the new covariant axis.
"""

from functools import cached_property, reduce

import numpy as np

from .fieldmath import fsqrt
from .jet import Jet, JetError


class MetricError(ValueError):
    pass


class ChartDomainError(ValueError):
    """Sample point lies outside the chart's validity region."""


def _acc(terms):
    return reduce(lambda a, b: a + b, terms)


def field_data(elem) -> np.ndarray:
    """Pointwise values of an element, for guards and reporting."""
    if isinstance(elem, Jet):
        return elem.value()
    if isinstance(elem, (int, float, np.floating, np.ndarray)):
        return np.asarray(elem, dtype=float)
    values = getattr(elem, "values", None)
    if values is not None:
        return np.asarray(values)
    raise TypeError(f"not a field element: {elem!r}")


class TensorValue:
    """Components of a tensor at the chart's base points.

    ``comps`` is an object ndarray of field elements with shape (n,)*(cov+con),
    covariant axes first. Purely a labeled container; the geometry functions
    below do the index work.
    """

    def __init__(self, cov: int, con: int, comps: np.ndarray):
        self.cov = cov
        self.con = con
        self.comps = comps

    def __getitem__(self, idx):
        return self.comps[idx]

    @property
    def rank(self):
        return self.cov + self.con


def tensor_map(fn, *tensors: TensorValue) -> TensorValue:
    """Apply ``fn`` componentwise; all inputs must share a signature."""
    first = tensors[0]
    comps = np.empty(first.comps.shape, dtype=object)
    for idx in np.ndindex(*first.comps.shape):
        comps[idx] = fn(*(t.comps[idx] for t in tensors))
    return TensorValue(first.cov, first.con, comps)


class MetricChart:
    """A metric given by its components in one coordinate chart.

    ``g`` is an (n, n) nested sequence of field elements, symmetric in its
    indices. ``partial_map`` maps spatial axis i to the element variable index
    to differentiate; identity when the elements carry only spatial variables.
    Curvature data is computed lazily and cached on the chart.
    """

    def __init__(self, g, partial_map=None):
        comps = np.empty((len(g), len(g)), dtype=object)
        for i in range(len(g)):
            for j in range(len(g)):
                comps[i, j] = g[i][j]
        self.n = comps.shape[0]
        self.g = comps
        self.partial_map = tuple(partial_map) if partial_map is not None \
            else tuple(range(self.n))
        if len(self.partial_map) != self.n:
            raise MetricError("partial_map length must equal the dimension")

    def d(self, elem, i: int):
        return elem.partial(self.partial_map[i])

    @cached_property
    def det(self):
        if self.n == 1:
            return self.g[0, 0]
        if self.n == 2:
            return self.g[0, 0] * self.g[1, 1] - self.g[0, 1] * self.g[1, 0]
        return _acc(_cofactor(self.g, 0, j) * self.g[0, j] for j in range(self.n))

    @cached_property
    def ginv(self):
        det = self.det
        data = field_data(det)
        if np.any(data <= 0.0):
            raise MetricError("metric is not positive definite on the chart")
        comps = np.empty((self.n, self.n), dtype=object)
        if self.n == 1:
            comps[0, 0] = 1.0 / det
        elif self.n == 2:
            comps[0, 0] = self.g[1, 1] / det
            comps[1, 1] = self.g[0, 0] / det
            off = -self.g[0, 1] / det
            comps[0, 1] = off
            comps[1, 0] = off
        else:
            for i in range(self.n):
                for j in range(i + 1):
                    val = _cofactor(self.g, j, i) / det
                    comps[i, j] = val
                    comps[j, i] = val
        return comps

    @cached_property
    def christoffels(self):
        n = self.n
        dg = np.empty((n, n, n), dtype=object)  # dg[i][j][l] = d_i g_jl
        for i in range(n):
            for j in range(n):
                for l in range(j + 1):
                    val = self.d(self.g[j, l], i)
                    dg[i, j, l] = val
                    dg[i, l, j] = val
        gam = np.empty((n, n, n), dtype=object)  # gam[k][i][j], symmetric in i,j
        for k in range(n):
            for i in range(n):
                for j in range(i + 1):
                    val = 0.5 * _acc(
                        self.ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                        for l in range(n))
                    gam[k, i, j] = val
                    gam[k, j, i] = val
        return gam

    @cached_property
    def riem_low(self):
        n = self.n
        gam = self.christoffels
        rup = np.empty((n, n, n, n), dtype=object)  # rup[l][k][i][j]
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    for k in range(n):
                        if i == j:
                            rup[l, k, i, j] = 0.0 * gam[0, 0, 0]
                        elif i > j:
                            rup[l, k, i, j] = -rup[l, k, j, i]
                        else:
                            rup[l, k, i, j] = (
                                self.d(gam[l, j, k], i) - self.d(gam[l, i, k], j)
                                + _acc(gam[l, i, p] * gam[p, j, k]
                                       - gam[l, j, p] * gam[p, i, k]
                                       for p in range(n)))
        low = np.empty((n, n, n, n), dtype=object)  # low[i][j][k][l]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        low[i, j, k, l] = _acc(self.g[l, m] * rup[m, k, i, j]
                                               for m in range(n))
        return low

    @cached_property
    def ricci(self) -> TensorValue:
        n = self.n
        low = self.riem_low
        comps = np.empty((n, n), dtype=object)
        for j in range(n):
            for k in range(j + 1):
                val = _acc(self.ginv[i, l] * low[i, j, k, l]
                           for i in range(n) for l in range(n))
                comps[j, k] = val
                comps[k, j] = val
        return TensorValue(2, 0, comps)

    @cached_property
    def scalar_curvature(self):
        return trace_sym2(self, self.ricci)

    @cached_property
    def volume_density(self):
        return fsqrt(self.det)


def _cofactor(m: np.ndarray, i: int, j: int):
    sub = np.delete(np.delete(m, i, axis=0), j, axis=1)
    sign = 1.0 if (i + j) % 2 == 0 else -1.0
    return sign * _det_obj(sub)


def _det_obj(m: np.ndarray):
    if m.shape[0] == 1:
        return m[0, 0]
    return _acc(_cofactor(m, 0, j) * m[0, j] for j in range(m.shape[0]))


def covariant_derivative(chart: MetricChart, t: TensorValue) -> TensorValue:
    """Levi-Civita covariant derivative; the new covariant axis comes first."""
    n = chart.n
    gam = chart.christoffels
    comps = np.empty((n,) + t.comps.shape, dtype=object)
    for i in range(n):
        for idx in np.ndindex(*t.comps.shape):
            val = chart.d(t.comps[idx], i)
            for a in range(t.cov):
                val = val - _acc(gam[p, i, idx[a]]
                                 * t.comps[idx[:a] + (p,) + idx[a + 1:]]
                                 for p in range(n))
            for a in range(t.cov, t.rank):
                val = val + _acc(gam[idx[a], i, p]
                                 * t.comps[idx[:a] + (p,) + idx[a + 1:]]
                                 for p in range(n))
            comps[(i,) + idx] = val
    return TensorValue(t.cov + 1, t.con, comps)


def scalar_tensor(s) -> TensorValue:
    comps = np.empty((), dtype=object)
    comps[()] = s
    return TensorValue(0, 0, comps)


def differential(chart: MetricChart, s) -> TensorValue:
    return covariant_derivative(chart, scalar_tensor(s))


def raise_vector(chart: MetricChart, v: TensorValue) -> TensorValue:
    n = chart.n
    comps = np.empty((n,), dtype=object)
    for i in range(n):
        comps[i] = _acc(chart.ginv[i, j] * v[j] for j in range(n))
    return TensorValue(0, 1, comps)


def lower_vector(chart: MetricChart, v: TensorValue) -> TensorValue:
    n = chart.n
    comps = np.empty((n,), dtype=object)
    for i in range(n):
        comps[i] = _acc(chart.g[i, j] * v[j] for j in range(n))
    return TensorValue(1, 0, comps)


def gradient(chart: MetricChart, s) -> TensorValue:
    return raise_vector(chart, differential(chart, s))


def hessian(chart: MetricChart, s) -> TensorValue:
    return covariant_derivative(chart, differential(chart, s))


def laplacian(chart: MetricChart, s):
    return trace_sym2(chart, hessian(chart, s))


def rough_laplacian(chart: MetricChart, t: TensorValue) -> TensorValue:
    n = chart.n
    dd = covariant_derivative(chart, covariant_derivative(chart, t))
    comps = np.empty(t.comps.shape, dtype=object)
    for idx in np.ndindex(*t.comps.shape):
        comps[idx] = _acc(chart.ginv[i, j] * dd.comps[(i, j) + idx]
                          for i in range(n) for j in range(n))
    return TensorValue(t.cov, t.con, comps)


def trace_sym2(chart: MetricChart, h: TensorValue):
    n = chart.n
    return _acc(chart.ginv[i, j] * h[i, j] for i in range(n) for j in range(n))


def raise_sym2(chart: MetricChart, h: TensorValue) -> TensorValue:
    n = chart.n
    comps = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            comps[i, j] = _acc(chart.ginv[i, p] * chart.ginv[j, q] * h[p, q]
                               for p in range(n) for q in range(n))
    return TensorValue(0, 2, comps)


def inner_sym2(chart: MetricChart, a: TensorValue, b: TensorValue):
    """<A, B> = g^{ip} g^{jq} A_ij B_pq for covariant symmetric 2-tensors."""
    n = chart.n
    bup = raise_sym2(chart, b)
    return _acc(a[i, j] * bup[i, j] for i in range(n) for j in range(n))


def inner_vec(chart: MetricChart, a: TensorValue, b: TensorValue):
    """Metric pairing of two vectors given in any index positions."""
    n = chart.n
    if a.cov == 1 and b.con == 1 or a.con == 1 and b.cov == 1:
        return _acc(a[i] * b[i] for i in range(n))
    if a.cov == 1:
        return _acc(chart.ginv[i, j] * a[i] * b[j]
                    for i in range(n) for j in range(n))
    return _acc(chart.g[i, j] * a[i] * b[j]
                for i in range(n) for j in range(n))


def sym2_apply(chart: MetricChart, a: TensorValue, u: TensorValue, w: TensorValue):
    """A(U, W) for a covariant symmetric 2-tensor; vectors in any index position."""
    n = chart.n
    uc = u if u.con == 1 else raise_vector(chart, u)
    wc = w if w.con == 1 else raise_vector(chart, w)
    return _acc(a[i, j] * uc[i] * wc[j] for i in range(n) for j in range(n))


def mixed_ricci(chart: MetricChart) -> np.ndarray:
    """R^i_j = g^{il} Ric_lj as an (n, n) object array, first index raised."""
    n = chart.n
    ric = chart.ricci
    comps = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            comps[i, j] = _acc(chart.ginv[i, l] * ric[l, j] for l in range(n))
    return comps


def divergence_sym2(chart: MetricChart, h: TensorValue) -> TensorValue:
    """(div h)_i = g^{jk} (nabla_j h)_{ki}, a covariant vector."""
    n = chart.n
    dh = covariant_derivative(chart, h)  # dh[j][k][i]
    comps = np.empty((n,), dtype=object)
    for i in range(n):
        comps[i] = _acc(chart.ginv[j, k] * dh.comps[j, k, i]
                        for j in range(n) for k in range(n))
    return TensorValue(1, 0, comps)


def divergence_vec(chart: MetricChart, v: TensorValue):
    """div X = nabla_i X^i; accepts the vector in either index position."""
    n = chart.n
    vc = v if v.con == 1 else raise_vector(chart, v)
    dv = covariant_derivative(chart, vc)  # dv[i][^j]
    return _acc(dv.comps[i, i] for i in range(n))


def div_div(chart: MetricChart, h: TensorValue):
    return divergence_vec(chart, divergence_sym2(chart, h))


def lichnerowicz_laplacian(chart: MetricChart, h: TensorValue) -> TensorValue:
    """Delta_L h_pq = Delta h_pq + 2 riem_low[p,i,j,q] h^{ij}
                      - Ric_p^k h_kq - Ric_q^k h_pk."""
    n = chart.n
    rough = rough_laplacian(chart, h)
    hup = raise_sym2(chart, h)
    low = chart.riem_low
    ric = chart.ricci
    ric_mixed = np.empty((n, n), dtype=object)  # Ric_p^k
    for p in range(n):
        for k in range(n):
            ric_mixed[p, k] = _acc(ric[p, l] * chart.ginv[l, k] for l in range(n))
    comps = np.empty((n, n), dtype=object)
    for p in range(n):
        for q in range(p + 1):
            val = rough[p, q] \
                + 2.0 * _acc(low[p, i, j, q] * hup[i, j]
                             for i in range(n) for j in range(n)) \
                - _acc(ric_mixed[p, k] * h[k, q] for k in range(n)) \
                - _acc(ric_mixed[q, k] * h[p, k] for k in range(n))
            comps[p, q] = val
            comps[q, p] = val
    return TensorValue(2, 0, comps)


def sym2_from(fn, n: int) -> TensorValue:
    """Build a covariant symmetric 2-tensor from fn(i, j), calling j <= i once."""
    comps = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i + 1):
            val = fn(i, j)
            comps[i, j] = val
            comps[j, i] = val
    return TensorValue(2, 0, comps)


def vector_from(fn, n: int, con: bool = False) -> TensorValue:
    comps = np.empty((n,), dtype=object)
    for i in range(n):
        comps[i] = fn(i)
    return TensorValue(0, 1, comps) if con else TensorValue(1, 0, comps)
