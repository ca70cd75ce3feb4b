import numpy as np
import pytest

from harnacklab import geometry as geo
from harnacklab.geometry import MetricError, field_data
from harnacklab.jet import jet_space


def _coords(order=5, pts=None):
    sp = jet_space(2, order)
    if pts is None:
        pts = np.array([[0.3, -0.8, 0.45], [0.7, 0.25, -0.6]])
    return sp.variables(pts)


def flat_chart(order=4):
    x, y = _coords(order)
    one, zero = 1.0 + 0.0 * x, 0.0 * x
    return geo.MetricChart([[one, zero], [zero, one]]), x, y


def generic_chart(order=5):
    """delta plus an anisotropic trig perturbation; nothing special holds."""
    x, y = _coords(order)
    g00 = 1.0 + 0.2 * (x + 2.0 * y).sin()
    g01 = 0.15 * (2.0 * x - y).cos()
    g11 = 1.0 + 0.25 * (x * 0.5 + y).cos()
    return geo.MetricChart([[g00, g01], [g01, g11]]), x, y


def sphere_chart(order=5):
    # round unit 2-sphere in stereographic coordinates
    x, y = _coords(order)
    conf = 4.0 * ((1.0 + x * x + y * y) ** 2).reciprocal()
    zero = 0.0 * x
    return geo.MetricChart([[conf, zero], [zero, conf]]), x, y


def _maxabs(elem):
    return float(np.max(np.abs(field_data(elem))))


def test_flat_chart_is_flat():
    ch, x, _ = flat_chart()
    for i in range(2):
        for j in range(2):
            for k in range(2):
                assert _maxabs(ch.christoffels[k, i, j]) == 0.0
    assert _maxabs(ch.scalar_curvature) == 0.0
    assert all(_maxabs(ch.ricci[i, j]) == 0.0 for i in range(2) for j in range(2))


def test_sphere_scalar_curvature_is_two():
    ch, _, _ = sphere_chart()
    r = field_data(ch.scalar_curvature)
    assert np.max(np.abs(r - 2.0)) < 1e-10


def test_sphere_is_einstein():
    ch, _, _ = sphere_chart()
    for i in range(2):
        for j in range(2):
            gap = ch.ricci[i, j] - 0.5 * ch.scalar_curvature * ch.g[i, j]
            assert _maxabs(gap) < 1e-11


def test_conformal_scalar_curvature_oracle():
    # g = e^{2u} delta has R = -2 e^{-2u} (flat laplacian of u); the right
    # side below never touches the curvature machinery
    x, y = _coords(6)
    u = 0.3 * (x + 0.5 * y).sin() + 0.2 * (x * y).cos()
    conf = (2.0 * u).exp()
    zero = 0.0 * x
    ch = geo.MetricChart([[conf, zero], [zero, conf]])
    lap0 = u.partial(0).partial(0) + u.partial(1).partial(1)
    want = -2.0 * (-2.0 * u).exp() * lap0
    assert _maxabs(ch.scalar_curvature - want) < 1e-10


def test_cigar_scalar_curvature_closed_form():
    x, y = _coords(5)
    conf = 4.0 * (1.0 + x * x + y * y).reciprocal()
    zero = 0.0 * x
    ch = geo.MetricChart([[conf, zero], [zero, conf]])
    want = (1.0 + x * x + y * y).reciprocal()
    assert _maxabs(ch.scalar_curvature - want) < 1e-12


def test_scalar_curvature_scaling_law():
    ch, x, y = generic_chart()
    scaled = geo.MetricChart([[4.0 * ch.g[i][j] for j in range(2)]
                              for i in range(2)])
    gap = scaled.scalar_curvature - 0.25 * ch.scalar_curvature
    assert _maxabs(gap) < 1e-12


def test_riemann_symmetries_and_first_bianchi():
    ch, _, _ = generic_chart()
    low = ch.riem_low
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    assert _maxabs(low[i, j, k, l] + low[j, i, k, l]) < 1e-13
                    assert _maxabs(low[i, j, k, l] + low[i, j, l, k]) < 1e-12
                    assert _maxabs(low[i, j, k, l] - low[k, l, i, j]) < 1e-12
                    bianchi = low[i, j, k, l] + low[j, k, i, l] + low[k, i, j, l]
                    assert _maxabs(bianchi) < 1e-12


def test_contracted_bianchi():
    ch, _, _ = generic_chart()
    div_ric = geo.divergence_sym2(ch, ch.ricci)
    dr = geo.differential(ch, ch.scalar_curvature)
    for i in range(2):
        assert _maxabs(div_ric[i] - 0.5 * dr[i]) < 1e-11


def test_metric_compatibility():
    ch, _, _ = generic_chart()
    nabla_g = geo.covariant_derivative(ch, geo.TensorValue(2, 0, ch.g))
    for idx in np.ndindex(2, 2, 2):
        assert _maxabs(nabla_g.comps[idx]) < 1e-13


def test_lichnerowicz_annihilates_the_metric():
    ch, _, _ = generic_chart()
    lg = geo.lichnerowicz_laplacian(ch, geo.TensorValue(2, 0, ch.g))
    for i in range(2):
        for j in range(2):
            assert _maxabs(lg[i, j]) < 1e-10


def test_volume_density_cigar_origin():
    sp = jet_space(2, 4)
    x, y = sp.variables(np.array([[0.0], [0.0]]))
    conf = 4.0 * (1.0 + x * x + y * y).reciprocal()
    zero = 0.0 * x
    ch = geo.MetricChart([[conf, zero], [zero, conf]])
    assert field_data(ch.volume_density)[0] == pytest.approx(4.0, abs=1e-14)


def test_flat_divergence_examples():
    ch, x, y = flat_chart()
    h = geo.sym2_from(lambda i, j: x.cos() if i == j else 0.0 * x, 2)
    div = geo.divergence_sym2(ch, h)
    assert _maxabs(div[0] + x.sin()) < 1e-13
    assert _maxabs(div[1]) < 1e-13
    assert _maxabs(geo.div_div(ch, h) + x.cos()) < 1e-12
    assert _maxabs(geo.laplacian(ch, x.sin()) + x.sin()) < 1e-12


def test_raise_lower_roundtrip():
    ch, x, y = generic_chart()
    v = geo.vector_from(lambda i: [x.sin(), x * y][i], 2, con=True)
    back = geo.raise_vector(ch, geo.lower_vector(ch, v))
    for i in range(2):
        assert _maxabs(back[i] - v[i]) < 1e-13
    h = geo.sym2_from(lambda i, j: [[1.0 + x * x, x * y], [x * y, y.cos()]][i][j], 2)
    hup = geo.raise_sym2(ch, h)
    for i in range(2):
        for j in range(2):
            lowered = sum(ch.g[i, k] * ch.g[j, l] * hup[k, l]
                          for k in range(2) for l in range(2))
            assert _maxabs(lowered - h[i, j]) < 1e-12
    assert _maxabs(geo.trace_sym2(ch, geo.TensorValue(2, 0, ch.g)) - 2.0) < 1e-13
    # <h, g> = tr h
    assert _maxabs(geo.inner_sym2(ch, h, geo.TensorValue(2, 0, ch.g))
                   - geo.trace_sym2(ch, h)) < 1e-12


def test_inner_vec_index_position_invariance():
    ch, x, y = generic_chart()
    v = geo.vector_from(lambda i: [x.sin() + 0.3, x * y - 0.2][i], 2, con=True)
    w = geo.vector_from(lambda i: [y.cos(), 1.0 + 0.1 * x][i], 2, con=True)
    a = geo.inner_vec(ch, v, w)
    b = geo.inner_vec(ch, geo.lower_vector(ch, v), w)
    c = geo.inner_vec(ch, geo.lower_vector(ch, v), geo.lower_vector(ch, w))
    assert _maxabs(a - b) < 1e-13
    assert _maxabs(a - c) < 1e-13
    norm = field_data(geo.inner_vec(ch, v, v))
    assert np.all(norm > 0.0)


def test_hessian_is_symmetric_and_traces_to_laplacian():
    ch, x, y = generic_chart()
    u = (x + 2.0 * y).sin() * x
    hess = geo.hessian(ch, u)
    assert _maxabs(hess[0, 1] - hess[1, 0]) == 0.0
    assert _maxabs(geo.trace_sym2(ch, hess) - geo.laplacian(ch, u)) < 1e-13
    rough = geo.rough_laplacian(ch, geo.scalar_tensor(u))
    assert _maxabs(rough.comps[()] - geo.laplacian(ch, u)) < 1e-11


def test_mixed_ricci_and_sym2_apply():
    ch, x, y = generic_chart()
    mixed = geo.mixed_ricci(ch)
    for i in range(2):
        for j in range(2):
            manual = sum(ch.ginv[i, k] * ch.ricci[k, j] for k in range(2))
            assert _maxabs(mixed[i, j] - manual) < 1e-13
    v = geo.vector_from(lambda i: [x, y][i], 2, con=True)
    quad = geo.sym2_apply(ch, ch.ricci, v, v)
    manual = sum(ch.ricci[i, j] * v[i] * v[j] for i in range(2) for j in range(2))
    assert _maxabs(quad - manual) < 1e-13


def test_degenerate_metric_raises():
    x, y = _coords(3)
    ch = geo.MetricChart([[0.0 * x, 0.0 * x], [0.0 * x, 1.0 + 0.0 * x]])
    with pytest.raises(MetricError):
        ch.ginv


def test_covariant_derivative_prepends_axis():
    ch, x, y = generic_chart()
    v = geo.vector_from(lambda i: [x.sin(), y.cos()][i], 2, con=True)
    dv = geo.covariant_derivative(ch, v)
    assert dv.cov == 1 and dv.con == 1
    assert dv.comps.shape == (2, 2)
    # new covariant slot first: dv[i, j] = nabla_i v^j
    manual = ch.d(v[1], 0) + sum(ch.christoffels[1, 0, p] * v[p]
                                 for p in range(2))
    assert _maxabs(dv.comps[0, 1] - manual) < 1e-13
