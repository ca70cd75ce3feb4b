import numpy as np
import pytest

from harnacklab import fields, geometry as geo
from harnacklab.geometry import field_data
from harnacklab.solitons import build_context


def _maxabs(elem):
    return float(np.max(np.abs(field_data(elem))))


def test_heat_propagation_matches_closed_form():
    ctx = build_context("flat_torus", n_points=6, order=6)
    u0 = ctx.x.sin()
    q = 2
    u = fields.propagate_scalar(ctx, u0, fields.rhs_heat, q=q)
    exact = ctx.x.sin() * (-ctx.t).exp()
    # every derivative with total degree inside the validity order and at
    # most q time differentiations must be exact
    assert u.order == 4
    for e, alpha in enumerate(ctx.space.exponents):
        if ctx.space.degrees[e] > u.order or alpha[ctx.time_index] > q:
            continue
        got, want = u.deriv(alpha), exact.deriv(alpha)
        assert np.max(np.abs(got - want)) < 1e-12, tuple(alpha)


def test_propagation_solves_its_equation():
    ctx = build_context("cigar_flow", n_points=6, order=5)
    u0 = fields.trig_scalar(ctx, 3, "u")
    u = fields.propagate_scalar(ctx, u0, fields.rhs_heat, q=2)
    gap = ctx.dt(u) - geo.laplacian(ctx.chart, u)
    # pointwise defect: every coefficient the value touches sits in the
    # filled (spatial, time) box, so the equation holds exactly at the points
    assert _maxabs(gap) < 1e-10


def test_propagation_is_linear():
    ctx = build_context("flat_torus", n_points=5, order=5)
    a = fields.trig_scalar(ctx, 1, "a")
    b = fields.trig_scalar(ctx, 2, "b")
    pa = fields.propagate_scalar(ctx, a, fields.rhs_heat, q=2)
    pb = fields.propagate_scalar(ctx, b, fields.rhs_heat, q=2)
    pab = fields.propagate_scalar(ctx, a + 2.0 * b, fields.rhs_heat, q=2)
    assert np.max(np.abs(pab.coeffs - (pa.coeffs + 2.0 * pb.coeffs))) < 1e-12


def test_conjugate_potential_rule_recovers_gauge_shift():
    # f = t - log(e^t + r^2) satisfies df/dt = -Lap f + |grad f|^2 - R
    ctx = build_context("cigar_flow_v2", n_points=6, order=5)
    lhs = ctx.dt(ctx.f)
    rhs = fields.rhs_conjugate_potential(ctx, ctx.f)
    assert _maxabs(lhs - rhs) < 1e-11


def test_strip_time():
    ctx = build_context("cigar_flow", n_points=4, order=4)
    u = ctx.x.sin() * (-ctx.t).exp()
    s = fields.strip_time(ctx, u)
    assert _maxabs(ctx.dt(s)) == 0.0
    # the stripped jet agrees with u on the t-degree-zero slice
    et = ctx.space.exponents[:, ctx.time_index]
    assert np.max(np.abs((s.coeffs - u.coeffs)[et == 0])) == 0.0


def test_trig_fields_deterministic_and_nonconstant():
    ctx = build_context("cigar_static", n_points=8, order=4)
    a = fields.trig_scalar(ctx, 5, "w")
    b = fields.trig_scalar(ctx, 5, "w")
    c = fields.trig_scalar(ctx, 5, "other")
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, c.coeffs)
    grad_sq = a.partial(0) * a.partial(0) + a.partial(1) * a.partial(1)
    assert np.all(np.max(field_data(grad_sq)) > 0.0)


def test_trig_vector_time_linear():
    ctx = build_context("cigar_flow", n_points=5, order=4)
    x, dxdt = fields.trig_vector(ctx, 2, "X", time_linear=True)
    for i in range(2):
        gap = ctx.dt(x[i]) - dxdt[i]
        assert _maxabs(gap) < 1e-13
        assert _maxabs(ctx.dt(dxdt[i])) == 0.0


def test_make_perturbation_kinds():
    ctx = build_context("cigar_flow", n_points=5, order=4)
    ric = fields.make_perturbation(ctx, "ricci")
    assert ric is ctx.chart.ricci
    met = fields.make_perturbation(ctx, "metric")
    for i in range(2):
        for j in range(2):
            assert met[i, j] is ctx.chart.g[i, j]
    static = fields.make_perturbation(ctx, "static", seed=4)
    assert all(_maxabs(ctx.dt(static[i, j])) == 0.0
               for i in range(2) for j in range(2))
    prop = fields.make_perturbation(ctx, "propagated", seed=4)
    lich = geo.lichnerowicz_laplacian(ctx.chart, prop)
    for i in range(2):
        for j in range(2):
            assert _maxabs(ctx.dt(prop[i, j]) - lich[i, j]) < 1e-10
    with pytest.raises(ValueError):
        fields.make_perturbation(ctx, "nope")


def test_propagated_ricci_is_a_fixed_point():
    # on an exact Ricci flow, d Rc/dt = Lichnerowicz(Rc): propagating the
    # initial Ricci slice must reproduce the chart's own Ricci tensor
    ctx = build_context("cigar_flow", n_points=5, order=6)
    prop = fields.propagate_sym2(ctx, ctx.chart.ricci, q=1)
    et = ctx.space.exponents[:, ctx.time_index]
    for i in range(2):
        for j in range(2):
            gap = prop[i, j] - ctx.chart.ricci[i, j]
            valid = (ctx.space.degrees <= gap.order) & (et <= 1)
            assert gap.order >= 3
            assert np.max(np.abs(gap.coeffs[valid])) < 1e-10


def test_rhs_linear_heat_reduces_to_heat_plus_reaction():
    ctx = build_context("cigar_flow", n_points=5, order=4)
    u = fields.trig_scalar(ctx, 7, "u")
    a = fields.rhs_linear_heat(1.0)(ctx, u)
    b = fields.rhs_heat(ctx, u) + ctx.chart.scalar_curvature * u
    assert _maxabs(a - b) < 1e-13


def test_propagation_requires_time_variable():
    ctx = build_context("cigar_static", n_points=4, order=4, time="const")
    u0 = ctx.x.sin()
    with pytest.raises(ValueError):
        fields.propagate_scalar(ctx, u0, fields.rhs_heat)
    ctx2 = build_context("cigar_static", n_points=4, order=4)
    with pytest.raises(ValueError):
        fields.propagate_scalar(ctx2, u0, fields.rhs_heat, q=0)


def test_neg_grad_potential_is_contravariant_negative_gradient():
    ctx = build_context("cigar_static", n_points=5, order=4)
    x = fields.neg_grad_potential(ctx)
    grad = geo.raise_vector(ctx.chart, geo.differential(ctx.chart, ctx.f))
    for i in range(2):
        assert _maxabs(x[i] + grad[i]) < 1e-13
