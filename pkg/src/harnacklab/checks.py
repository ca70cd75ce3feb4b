"""Identity checks: the registry, residual conventions, and runners.

Every check evaluates one mathematical identity (or inequality) on a soliton
chart at a pack of sample points via exact jet arithmetic and reports a
*relative* residual per point:

    residual = |sum of signed terms| / (sum of |each term| + 1e-30),

where the terms are the finest additive pieces of the identity (for an
evolution identity, the time derivative and Laplacian of each summand of the
quantity count separately). This makes residuals scale-invariant: replacing h
by c*h or u by c*u leaves them unchanged. For tensor identities the numerator
is the worst component and the denominator sums over all components, so a
residual hiding in a small component is not masked by a large one.

Identities whose terms vanish individually on the check's chart (the vanishing
brackets of the evolution identity on a steady soliton) are normalized by the
sums of |atomic factor products| instead, which stays bounded away from zero
whenever the underlying curvature does.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import fields, geometry as geo, harnack as hk
from .geometry import field_data
from .solitons import CATALOG, build_context, catalog_get

DEFAULT_TOLERANCE = 1e-8
TOLERANCE_CAP = 1e-6
_FLOOR = 1e-30

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped"

_ALL = ("cigar_static", "cigar_flow", "cigar_flow_v2", "flat_steady_linear",
        "gaussian_shrinker", "sphere_shrinker", "flat_torus")
_STEADY = ("cigar_static", "cigar_flow", "cigar_flow_v2", "flat_steady_linear",
           "flat_torus")
_SHRINKING = ("gaussian_shrinker", "sphere_shrinker")
_NORMALIZED = ("cigar_static", "cigar_flow", "cigar_flow_v2", "flat_steady_linear")
_EXACT_FLOW = ("cigar_flow", "cigar_flow_v2", "flat_steady_linear",
               "gaussian_shrinker", "sphere_shrinker", "flat_torus")
_STEADY_SYSTEM = ("cigar_flow", "cigar_flow_v2", "flat_steady_linear", "flat_torus")
_GRAD2 = ("cigar_flow_v2", "flat_steady_linear", "flat_torus")
_EPS_SET = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)


def rel_residual(terms) -> np.ndarray:
    """Per-point relative residual of a list of signed scalar terms."""
    arrs = [np.broadcast_to(field_data(t), np.broadcast_shapes(
        *(field_data(u).shape for u in terms))) for t in terms]
    num = np.abs(sum(arrs))
    den = sum(np.abs(a) for a in arrs) + _FLOOR
    return num / den


def tensor_residual(term_lists, extra_scale=None) -> np.ndarray:
    """Residual for a componentwise identity: ``term_lists[component]`` is the
    signed term list of that component. Numerator takes the worst component,
    denominator sums magnitudes over all components and terms.

    ``extra_scale`` widens the denominator for identities whose every term
    vanishes identically on some chart (both sides of grad R = 2 Rc(grad f)
    are zero on an Einstein shrinker): it should carry the magnitude of the
    arithmetic that produced the terms, so roundoff is not divided by itself."""
    nums, den = [], _FLOOR
    for terms in term_lists:
        arrs = [field_data(t) for t in terms]
        nums.append(np.abs(sum(arrs)))
        den = den + sum(np.abs(a) for a in arrs)
    if extra_scale is not None:
        den = den + extra_scale
    return np.max(nums, axis=0) / den


def _nabla_ricci_atom_scale(chart) -> np.ndarray:
    """Pre-cancellation magnitude of computing grad Rc: |d Rc| plus the
    |Gamma * Rc| correction atoms, summed over components. This is the scale
    against which the roundoff of any grad-Rc-built quantity is measured."""
    ric = chart.ricci
    gam = chart.christoffels
    out = _FLOOR
    for i in range(2):
        for p in range(2):
            for q in range(2):
                atoms = np.abs(field_data(chart.d(ric[p, q], i)))
                for k in range(2):
                    atoms = atoms + np.abs(field_data(gam[k, i, p] * ric[k, q])) \
                        + np.abs(field_data(gam[k, i, q] * ric[p, k]))
                out = out + atoms
    return out


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    statement: str
    applies_to: tuple
    runner: object = field(repr=False, compare=False, default=None)
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, "tolerance", min(self.tolerance, TOLERANCE_CAP))


@dataclass
class CheckReport:
    check_id: str
    soliton: str
    seed: int
    n_points: int
    tolerance: float
    status: str
    max_rel_residual: float | None
    median_rel_residual: float | None
    millis: float
    parts: dict = field(default_factory=dict)
    point_residuals: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "soliton": self.soliton,
            "n_points": self.n_points,
            "max_rel_residual": self.max_rel_residual,
            "median_rel_residual": self.median_rel_residual,
            "tolerance": self.tolerance,
            "status": self.status,
            "millis": self.millis,
            "parts": self.parts,
        }


def _sym2_terms(pairs):
    """Component term lists for a symmetric-2-tensor identity from
    [(tensor, scale), ...]; only the upper triangle enters (components repeat)."""
    out = []
    for i in range(2):
        for j in range(i + 1):
            out.append([t[i, j] * s for t, s in pairs])
    return out


# ---------------------------------------------------------------------------
# runners: each returns {part_name: per-point residual array}

def _run_s1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    hf = geo.hessian(ch, ctx.f)
    pairs = [(ch.ricci, 1.0), (hf, 1.0)]
    if ctx.spec.kind == "shrinking":
        half_inv_t = 0.5 / ctx.t
        comps = geo.sym2_from(lambda i, j: ch.g[i, j] * half_inv_t, 2)
        pairs.append((comps, 1.0))
    parts = {"soliton_equation": tensor_residual(_sym2_terms(pairs))}
    if ctx.spec.ricci_flow_exact:
        dg = geo.sym2_from(lambda i, j: ctx.dt(ch.g[i, j]), 2)
        parts["ricci_flow"] = tensor_residual(
            _sym2_terms([(dg, 1.0), (ch.ricci, 2.0)]))
    return parts


def _run_s2(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    r = ch.scalar_curvature
    df = geo.differential(ch, ctx.f)
    dr = geo.differential(ch, r)
    rc2 = geo.inner_sym2(ch, ch.ricci, ch.ricci)
    grr = geo.inner_vec(ch, dr, df)
    if ctx.spec.kind == "shrinking":
        terms = [0.5 * geo.laplacian(ch, r), rc2, -0.5 * grr,
                 r / (2.0 * ctx.t)]
    else:
        terms = [geo.laplacian(ch, r), 2.0 * rc2, -grr]
    parts = {"scalar_curvature_identity": rel_residual(terms)}
    gf = geo.raise_vector(ch, df)
    parts["curvature_gradient"] = tensor_residual(
        [[dr[i]] + [-2.0 * ch.ricci[i, k] * gf[k] for k in range(2)]
         for i in range(2)],
        extra_scale=_nabla_ricci_atom_scale(ch))
    return parts


def _run_s3(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    df = geo.differential(ch, ctx.f)
    one = ctx.space.constant(np.ones(n_points))
    return {
        "normalization": rel_residual(
            [ch.scalar_curvature, geo.inner_vec(ch, df, df), -one]),
        "trace_equation": rel_residual(
            [ch.scalar_curvature, geo.laplacian(ch, ctx.f)]),
    }


def _run_h1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    m = hk.matrix_harnack(ch)
    p = hk.p_tensor(ch)
    gf = geo.gradient(ch, ctx.f)
    shrinking = ctx.spec.kind == "shrinking"
    out = []
    for i in range(2):
        for j in range(i + 1):
            terms = [m[i, j]] + [-p[k, i, j] * gf[k] for k in range(2)]
            if shrinking:
                terms.append(ch.ricci[i, j] / (2.0 * ctx.t))
            out.append(terms)
    return {"matrix_harnack_potential": tensor_residual(out)}


def _run_h2(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    p = hk.p_tensor(ch)
    gf = geo.gradient(ch, ctx.f)
    low = ch.riem_low
    out = []
    for i in range(2):
        for pp in range(2):
            for q in range(2):
                out.append([p[i, pp, q]]
                           + [-low[pp, i, j, q] * gf[j] for j in range(2)])
    return {"p_tensor_curvature": tensor_residual(
        out, extra_scale=_nabla_ricci_atom_scale(ch))}


def _run_h3(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    gf = geo.gradient(ch, ctx.f)
    lap_gf = geo.rough_laplacian(ch, gf)
    mixed = geo.mixed_ricci(ch)
    out = []
    for j in range(2):
        terms = [ctx.dt(gf[j]), -lap_gf[j]] \
            + [-mixed[j, k] * gf[k] for k in range(2)]
        if ctx.spec.kind == "shrinking":
            terms.append(gf[j] / ctx.t)
        out.append(terms)
    return {"potential_gradient_evolution": tensor_residual(out)}


def _run_h4(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    terms = hk.linear_trace_terms(ch, ch.ricci, fields.neg_grad_potential(ctx))
    if ctx.spec.kind == "shrinking":
        terms = terms + [ch.scalar_curvature / (2.0 * ctx.t)]
    return {"trace_harnack_soliton": rel_residual(terms)}


def _run_h4t(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    x, _ = fields.trig_vector(ctx, seed, "h4t.X")
    zt = [2.0 * t for t in hk.linear_trace_terms(ch, ch.ricci, x)]
    tr = hk.trace_harnack_terms(ch, x)
    return {"trace_form": rel_residual(tr + [-t for t in zt])}


def _heat_terms(ctx, pieces):
    """d/dt and -Lap of each summand separately."""
    ch = ctx.chart
    return [ctx.dt(z) for z in pieces] + [-geo.laplacian(ch, z) for z in pieces]


def _run_eq1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    h = fields.make_perturbation(ctx, "propagated", seed=seed)
    x, _ = fields.trig_vector(ctx, seed, "eq1.X", time_linear=True)
    dxdt = geo.vector_from(lambda i: ctx.dt(x[i]), 2, con=True)
    lhs = _heat_terms(ctx, hk.linear_trace_terms(ch, h, x))
    rhs = hk.evolution_rhs_terms(ch, h, x, dxdt)
    parts = {"evolution_identity": rel_residual(lhs + [-t for t in rhs])}
    if ctx.spec.kind == "steady":
        parts.update(_eq1_vanishing_brackets(ctx))
    return parts


def _eq1_vanishing_brackets(ctx):
    """On a steady soliton with h = Ric, X = -grad f, each of the four groups
    on the right of the evolution identity vanishes. Each group is normalized
    by the sum of |atomic factor products| so the residual cannot divide by a
    quantity that itself vanishes on the soliton."""
    ch = ctx.chart
    h = ch.ricci
    x = fields.neg_grad_potential(ctx)
    dxdt = geo.vector_from(lambda i: ctx.dt(x[i]), 2, con=True)
    brackets = hk.evolution_rhs_terms(ch, h, x, dxdt)

    def a(e):
        return np.abs(field_data(e))

    hup = geo.raise_sym2(ch, h)
    m = hk.matrix_harnack(ch)
    p = hk.p_tensor(ch)
    low = ch.riem_low
    mixed = geo.mixed_ricci(ch)
    lap_ric = geo.rough_laplacian(ch, ch.ricci)
    hess_r = geo.hessian(ch, ch.scalar_curvature)
    ric_up = geo.raise_sym2(ch, ch.ricci)
    den1 = _FLOOR
    for pp in range(2):
        for q in range(2):
            m_atoms = a(lap_ric[pp, q]) + 0.5 * a(hess_r[pp, q]) \
                + sum(2.0 * a(low[pp, i, j, q] * ric_up[i, j])
                      for i in range(2) for j in range(2)) \
                + sum(a(ch.ricci[pp, k] * mixed[k, q]) for k in range(2))
            px = sum(2.0 * a(p[i, pp, q] * x[i]) for i in range(2))
            rxx = sum(a(low[pp, i, j, q] * x[i] * x[j])
                      for i in range(2) for j in range(2))
            den1 = den1 + 2.0 * a(hup[pp, q]) * (m_atoms + px + rxx)

    divh = geo.divergence_sym2(ch, h)
    hx = geo.vector_from(lambda i: sum(h[i, k] * x[k] for k in range(2)), 2)
    dx = geo.covariant_derivative(ch, x)
    d_divh = geo.covariant_derivative(ch, divh)
    d_hx = geo.covariant_derivative(ch, hx)
    den2 = _FLOOR
    for i in range(2):
        for j in range(2):
            for l in range(2):
                den2 = den2 + 4.0 * (a(dx.comps[j, i]) + a(mixed[i, j])) \
                    * a(ch.ginv[j, l]) * (a(d_divh.comps[l, i]) + a(d_hx.comps[l, i]))

    lap_x = geo.rough_laplacian(ch, x)
    den3 = _FLOOR
    for j in range(2):
        w_atoms = a(divh[j]) + a(hx[j])
        v_atoms = a(dxdt[j]) + a(lap_x[j]) \
            + sum(a(mixed[j, k] * x[k]) for k in range(2))
        den3 = den3 + 2.0 * w_atoms * v_atoms

    den4 = _FLOOR
    for i in range(2):
        for j in range(2):
            for pp in range(2):
                for l in range(2):
                    den4 = den4 + 2.0 * a(h[i, j]) \
                        * (a(dx.comps[pp, i]) + a(mixed[i, pp])) * a(ch.ginv[pp, l]) \
                        * (a(dx.comps[l, j]) + a(mixed[j, l]))

    return {
        f"vanishing_bracket_{k + 1}": np.abs(field_data(brackets[k])) / den
        for k, den in zip(range(4), [den1, den2, den3, den4])
    }


def _run_l1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    h = fields.make_perturbation(ctx, "propagated", seed=seed)
    pieces = hk.linear_trace_terms(ctx.chart, h, fields.neg_grad_potential(ctx))
    return {"heat_equation": rel_residual(_heat_terms(ctx, pieces))}


def _run_l2(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    h = fields.make_perturbation(ctx, "propagated", seed=seed)
    zp = hk.linear_trace_terms(ch, h, fields.neg_grad_potential(ctx))
    bigh = geo.trace_sym2(ch, h)
    pieces = zp + [bigh / (2.0 * ctx.t)]
    damped = _heat_terms(ctx, pieces) + [(2.0 / ctx.t) * z for z in pieces]
    t2 = ctx.t * ctx.t
    conserved = _heat_terms(ctx, [t2 * z for z in pieces])
    trace_ev = [ctx.dt(bigh), -geo.laplacian(ch, bigh),
                -2.0 * geo.inner_sym2(ch, h, ch.ricci)]
    return {
        "damped_heat": rel_residual(damped),
        "conserved_form": rel_residual(conserved),
        "trace_evolution": rel_residual(trace_ev),
    }


def _run_r1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order, time="const", deform=True)
    ch0 = ctx.chart
    h = fields.trig_sym2(ctx, seed, "r1.h")
    bigh = geo.trace_sym2(ch0, h)
    gs = [[ch0.g[i, j] + ctx.s * h[i, j] for j in range(2)] for i in range(2)]
    chs = geo.MetricChart(gs, partial_map=(0, 1))
    fs = ctx.f + ctx.s * (0.5 * bigh)
    lhs = ctx.ds(sum(hk.perelman_scalar_terms(chs, fs)))
    zterms = hk.linear_trace_terms(ch0, h, fields.neg_grad_potential(ctx))
    defect = geo.tensor_map(lambda p, q: p + q, ch0.ricci, geo.hessian(ch0, ctx.f))
    coupling = -2.0 * geo.inner_sym2(ch0, h, defect)
    parts = {"deformation_identity":
             rel_residual([lhs] + [-t for t in zterms] + [-coupling])}
    density = (-fs).exp() * chs.volume_density
    parts["weighted_measure"] = (np.abs(field_data(ctx.ds(density)))
                                 / (np.abs(field_data(density)) + _FLOOR))
    return parts


def _run_r2(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart

    def residual(f):
        v = hk.conjugate_density(ch, f)
        lhs = hk.box_star_terms(ch, ctx.dt, v)
        rhs = -2.0 * hk.soliton_defect_norm2(ch, f) * (-f).exp()
        return rel_residual(lhs + [-rhs])

    f0 = fields.trig_scalar(ctx, seed, "r2.f0", base=0.5)
    fprop = fields.propagate_scalar(ctx, f0, fields.rhs_conjugate_potential, q=1)
    parts = {"generic_potential": residual(fprop)}
    if ctx.spec.potential_time_rule == "grad2":
        parts["soliton_potential"] = residual(ctx.f)
    return parts


def _log_solution(ctx, seed, eps):
    u0 = fields.trig_scalar(ctx, seed, "b.u0", amplitude=0.3).exp()
    u = fields.propagate_scalar(ctx, u0, fields.rhs_linear_heat(eps), q=1)
    return u.log()


def _run_b1(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    u = ctx.f.exp()
    return {"potential_solution": rel_residual(
        [ctx.dt(u), -geo.laplacian(ch, u), -ch.scalar_curvature * u])}


def _run_b2(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    v = _log_solution(ctx, seed, 1.0)
    lhs = hk.l_eps_terms(ctx.chart, ctx.dt, v, hk.log_q(ctx.chart, v), 1.0)
    rhs = hk.lq_production_terms(ctx.chart, v, ctx.f)
    return {"log_laplacian_evolution": rel_residual(lhs + [-t for t in rhs])}


def _run_b3(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    v = _log_solution(ctx, seed, 1.0)
    dv = geo.differential(ch, v)
    w = geo.inner_vec(ch, dv, dv) + ch.scalar_curvature
    lhs = hk.l_eps_terms(ch, ctx.dt, v, w, 1.0)
    rhs = hk.grad2r_production_terms(ch, v)
    return {"gradient_energy_evolution": rel_residual(lhs + [-t for t in rhs])}


def _run_b4(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    v = _log_solution(ctx, seed, 1.0)
    lhs = hk.l_eps_terms(ch, ctx.dt, v, hk.harnack_p_eps(ch, v, 1.0), 1.0)
    rhs = hk.lp_production_terms(ch, v, ctx.f)
    return {"harnack_evolution": rel_residual(lhs + [-t for t in rhs])}


def _run_b5(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    v = _log_solution(ctx, seed, 1.0)
    q = field_data(hk.log_q(ch, v))
    lp = field_data(sum(
        hk.l_eps_terms(ch, ctx.dt, v, hk.harnack_p_eps(ch, v, 1.0), 1.0)))
    bound = q * q / ctx.spec.dim
    return {"cauchy_schwarz_bound":
            np.maximum(bound - lp, 0.0) / (np.abs(bound) + np.abs(lp) + _FLOOR)}


def _run_b6(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    parts = {}
    for eps in _EPS_SET:
        v = _log_solution(ctx, seed, eps)
        lhs = hk.l_eps_terms(ch, ctx.dt, v, hk.harnack_p_eps(ch, v, eps), eps)
        rhs = hk.leps_production_terms(ch, v, ctx.f, eps)
        parts[f"eps({eps:g})"] = rel_residual(lhs + [-t for t in rhs])
    return parts


def _run_b7(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    v = fields.trig_scalar(ctx, seed, "b7.v", base=0.2)
    parts = {}
    for eps in _EPS_SET:
        lhs, rhs = hk.ricci_terms_rewrite(ctx.chart, ctx.chart.ricci, v,
                                          ctx.f, eps)
        parts[f"eps({eps:g})"] = rel_residual(lhs + [-t for t in rhs])
    return parts


def _run_b8(name, seed, n_points, order):
    ctx = build_context(name, seed, n_points, order)
    ch = ctx.chart
    v = _log_solution(ctx, seed, -1.0)
    lhs = hk.l_eps_terms(ch, ctx.dt, v, hk.harnack_p_eps(ch, v, -1.0), -1.0)
    diff = geo.tensor_map(lambda a, b: a - b, ch.ricci, geo.hessian(ch, v))
    rhs1 = -geo.inner_sym2(ch, diff, diff)
    hfv = geo.hessian(ch, ctx.f + v)
    rhs2 = -geo.inner_sym2(ch, hfv, hfv)
    return {
        "energy_production": rel_residual(lhs + [-rhs1]),
        "soliton_production": rel_residual(lhs + [-rhs2]),
    }


def _make_registry():
    specs = [
        CheckSpec(
            "CHK-S1",
            "Ric + Hess f = lam g with lam = 0 (steady) or -1/(2t) (shrinking); "
            "moving charts also solve dg/dt = -2 Ric exactly",
            _ALL, _run_s1, 1e-9),
        CheckSpec(
            "CHK-S2",
            "Lap R + 2|Rc|^2 = <grad R, grad f> (steady; shrinking adds -R/t) "
            "and grad R = 2 Rc(grad f)",
            _ALL, _run_s2),
        CheckSpec(
            "CHK-S3",
            "normalized steady: R + |grad f|^2 = 1 and R = -Lap f",
            _NORMALIZED, _run_s3),
        CheckSpec(
            "CHK-H1",
            "M_pq = P_ipq grad^i f on a steady gradient soliton",
            _STEADY, _run_h1),
        CheckSpec(
            "CHK-H1s",
            "shrinking form of the matrix Harnack contraction: "
            "M_pq + R_pq/(2t) = P_ipq grad^i f",
            _SHRINKING, _run_h1),
        CheckSpec(
            "CHK-H2",
            "P_ipq = riem[p,i,j,q] grad^j f on any gradient soliton",
            _ALL, _run_h2),
        CheckSpec(
            "CHK-H3",
            "((d/dt - Lap) grad f)^j = R^j_k grad^k f on a steady soliton",
            _STEADY, _run_h3),
        CheckSpec(
            "CHK-H3s",
            "((d/dt - Lap) grad f)^j - R^j_k grad^k f = -(1/t) grad^j f (shrinking)",
            _SHRINKING, _run_h3),
        CheckSpec(
            "CHK-H4",
            "Z(Rc, -grad f) = 0 on a steady gradient soliton",
            _STEADY, _run_h4),
        CheckSpec(
            "CHK-H4s",
            "Z(Rc, -grad f) + R/(2t) = 0 on a shrinking gradient soliton",
            _SHRINKING, _run_h4),
        CheckSpec(
            "CHK-H4t",
            "2 Z(Rc, X) = Lap R + 2|Rc|^2 + 2<grad R, X> + 2 Rc(X,X) for any X",
            _ALL, _run_h4t, 1e-9),
        CheckSpec(
            "CHK-EQ1",
            "(d/dt - Lap) Z(h,X) equals the four curvature production groups "
            "under Ricci flow with dh/dt = Lichnerowicz(h); on a steady soliton "
            "with h = Rc, X = -grad f each group vanishes",
            _EXACT_FLOW, _run_eq1, 1e-7),
        CheckSpec(
            "CHK-L1",
            "Z(h, -grad f) solves the heat equation on a steady soliton "
            "(dg/dt = -2Rc, df/dt = Lap f or |grad f|^2, dh/dt = Lichnerowicz(h))",
            _STEADY_SYSTEM, _run_l1, 1e-7),
        CheckSpec(
            "CHK-L2",
            "on a shrinker, (d/dt - Lap)(Z + H/2t) = -(2/t)(Z + H/2t), "
            "equivalently t^2 (Z + H/2t) is a heat solution; and "
            "(d/dt - Lap) H = 2<h, Rc>",
            _SHRINKING, _run_l2, 1e-7),
        CheckSpec(
            "CHK-R1",
            "under dg/ds = h, df/ds = H/2: "
            "d/ds (R + 2 Lap f - |grad f|^2) = Z(h, -grad f) - 2<h, Rc + Hess f>, "
            "and the weighted measure e^{-f} dvol is stationary",
            _ALL, _run_r1),
        CheckSpec(
            "CHK-R2",
            "V = (2 Lap f - |grad f|^2 + R) e^{-f} satisfies "
            "(-d/dt - Lap + R) V = -2 |Rc + Hess f|^2 e^{-f} along the "
            "conjugate-potential flow df/dt = -Lap f + |grad f|^2 - R",
            _STEADY_SYSTEM, _run_r2, 1e-7),
        CheckSpec(
            "CHK-B1",
            "u = e^f solves du/dt = Lap u + R u when df/dt = |grad f|^2 on a "
            "normalized steady (or f = 0 flat)",
            _GRAD2, _run_b1),
        CheckSpec(
            "CHK-B2",
            "L Q = |Hess v|^2 + <Rc, Hess v> + Rc(grad(v-f), grad(v-f)) for "
            "Q = Lap v + R, v = log u, du/dt = Lap u + R u",
            _GRAD2, _run_b2, 1e-7),
        CheckSpec(
            "CHK-B3",
            "L(|grad v|^2 + R) = |Rc|^2 - |Hess v|^2",
            _GRAD2, _run_b3, 1e-7),
        CheckSpec(
            "CHK-B4",
            "L P = |Hess v + Rc|^2 + 2 Rc(grad(v-f), grad(v-f)) for "
            "P = 2 Lap v + |grad v|^2 + 3R",
            _GRAD2, _run_b4, 1e-7),
        CheckSpec(
            "CHK-B5",
            "L P >= Q^2 / n pointwise when Rc >= 0 (Cauchy-Schwarz)",
            ("cigar_flow_v2",), _run_b5, 1e-7),
        CheckSpec(
            "CHK-B6",
            "L_eps P_eps equals its five-term production formula for "
            "P_eps = 2 Lap v + |grad v|^2 + (2 eps + 1) R, du/dt = eps^{-1} Lap u + R u",
            _GRAD2, _run_b6, 1e-7),
        CheckSpec(
            "CHK-B7",
            "algebraic rewrite of the Ricci production terms: "
            "2/eps A(grad(v - eps f)) + (1 - 1/eps) A(grad(v+f)) = "
            "(1 + 1/eps) A(grad(v-f)) + 2(eps - 1/eps) A(grad f) for symmetric A",
            _ALL, _run_b7, 1e-7),
        CheckSpec(
            "CHK-B8",
            "eps = -1: (1/2 (d/dt + Lap) + grad v . grad)(2 Lap v + |grad v|^2 - R) "
            "= -|Rc - Hess v|^2 = -|Hess(f + v)|^2",
            _GRAD2, _run_b8, 1e-7),
    ]
    return {s.check_id: s for s in specs}


REGISTRY = _make_registry()


class UnknownCheckError(KeyError):
    pass


def get_check(check_id: str) -> CheckSpec:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise UnknownCheckError(
            f"unknown check {check_id!r}; known: {sorted(REGISTRY)}") from None


def run_check(check_id: str, soliton: str, seed: int = 0, n_points: int = 32,
              order: int = 6, tolerance: float | None = None) -> CheckReport:
    spec = get_check(check_id)
    cat = catalog_get(soliton)
    tol = spec.tolerance if tolerance is None else min(tolerance, TOLERANCE_CAP)
    if cat.grid_only or soliton not in spec.applies_to:
        return CheckReport(check_id, soliton, seed, n_points, tol,
                           STATUS_SKIPPED, None, None, 0.0)
    t0 = time.perf_counter()
    parts = spec.runner(soliton, seed, n_points, order)
    millis = 1000.0 * (time.perf_counter() - t0)
    worst = np.max(np.stack([np.broadcast_to(p, (n_points,)) for p in
                             parts.values()]), axis=0)
    status = STATUS_PASS if float(worst.max()) <= tol else STATUS_FAIL
    return CheckReport(
        check_id, soliton, seed, n_points, tol, status,
        float(worst.max()), float(np.median(worst)), millis,
        parts={k: float(np.max(v)) for k, v in sorted(parts.items())},
        point_residuals=worst)


def run_suite(checks=None, solitons=None, seed: int = 0, n_points: int = 32,
              order: int = 6, tolerance: float | None = None) -> list:
    check_ids = list(checks) if checks else sorted(REGISTRY)
    names = list(solitons) if solitons else list(CATALOG)
    return [run_check(c, s, seed=seed, n_points=n_points, order=order,
                      tolerance=tolerance)
            for c in check_ids for s in names]
