"""Auxiliary fields on a soliton chart and evolution-constrained jets.

Random fields are trigonometric polynomials with seeded coefficients, so they
are globally smooth on every chart and reproducible from (seed, tag).

The propagation helpers turn a time-independent jet into the jet of the
solution of an evolution equation d(field)/dt = RHS(field) through the Taylor
recursion on the time variable: writing the field as
sum_r c_{beta,r} x^beta t^r, the equation forces

    c_{beta, r+1} = d_{beta, r} / (r + 1),

where d are the coefficients of the RHS evaluated on the jet filled up to time
degree r. The RHS is recomputed at each r, so metric coefficients that depend
on t themselves (moving charts) enter correctly. The propagated jet's validity
order is reduced to (RHS validity + 1), which encodes exactly which Taylor
coefficients the recursion pinned down; reading past it raises rather than
returning junk.
"""

import numpy as np

from . import geometry as geo
from .jet import Jet
from .solitons import SolitonContext, stream


def strip_time(ctx: SolitonContext, u: Jet) -> Jet:
    """Freeze u at its base time: zero every coefficient with t-degree >= 1."""
    if ctx.time_index is None:
        return u
    coeffs = u.coeffs.copy()
    coeffs[ctx.space.exponents[:, ctx.time_index] >= 1] = 0.0
    return Jet(ctx.space, coeffs, u.order)


def trig_scalar(ctx: SolitonContext, seed: int, tag: str,
                amplitude: float = 0.4, base: float = 0.0) -> Jet:
    """Seeded trigonometric polynomial in the spatial coordinates."""
    rng = stream(seed, "scalar:" + tag)
    x, y = ctx.x, ctx.y
    out = ctx.space.constant(np.full(ctx.n_points, base))
    for _ in range(3):
        a = amplitude * rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
        wx, wy = 0, 0
        while wx == 0 and wy == 0:
            wx, wy = (int(w) for w in rng.integers(-2, 3, size=2))
        phase = rng.uniform(0.0, 2 * np.pi)
        out = out + a * (wx * x + wy * y + phase).sin()
    return out


def trig_sym2(ctx: SolitonContext, seed: int, tag: str,
              amplitude: float = 0.4) -> geo.TensorValue:
    return geo.sym2_from(
        lambda i, j: trig_scalar(ctx, seed, f"{tag}[{i}{j}]", amplitude), 2)


def trig_vector(ctx: SolitonContext, seed: int, tag: str,
                amplitude: float = 0.5, time_linear: bool = False):
    """Contravariant vector field X, optionally X = A(x,y) + t*B(x,y).

    Returns (X, dX/dt) with the time derivative exact by construction; for a
    static field dX/dt is the zero vector.
    """
    a = geo.vector_from(
        lambda i: trig_scalar(ctx, seed, f"{tag}.A[{i}]", amplitude), 2, con=True)
    if not time_linear:
        zero = 0.0 * ctx.x
        return a, geo.vector_from(lambda i: zero, 2, con=True)
    b = geo.vector_from(
        lambda i: trig_scalar(ctx, seed, f"{tag}.B[{i}]", amplitude), 2, con=True)
    x = geo.vector_from(lambda i: a[i] + ctx.t * b[i], 2, con=True)
    return x, b


def rhs_heat(ctx: SolitonContext, u: Jet) -> Jet:
    return geo.laplacian(ctx.chart, u)


def rhs_grad2(ctx: SolitonContext, u: Jet) -> Jet:
    du = geo.differential(ctx.chart, u)
    return geo.inner_vec(ctx.chart, du, du)


def rhs_conjugate_potential(ctx: SolitonContext, u: Jet) -> Jet:
    """d f/dt = -Lap f + |grad f|^2 - R (potential along the conjugate heat flow)."""
    du = geo.differential(ctx.chart, u)
    return (-geo.laplacian(ctx.chart, u)
            + geo.inner_vec(ctx.chart, du, du)
            - ctx.chart.scalar_curvature)


def rhs_linear_heat(eps: float):
    """d u/dt = eps^{-1} Lap u + R u; eps = 1 is the linearized-flow scalar case."""
    def rhs(ctx: SolitonContext, u: Jet) -> Jet:
        return geo.laplacian(ctx.chart, u) / eps + ctx.chart.scalar_curvature * u
    return rhs


def _fill_time_degree(ctx: SolitonContext, coeffs: np.ndarray,
                      rhs_coeffs: np.ndarray, r: int, m: int):
    space = ctx.space
    et = space.exponents[:, ctx.time_index]
    spatial = space.degrees - et
    src = np.nonzero((et == r) & (spatial <= m)
                     & (space.degrees <= space.order - 1))[0]
    bumped = space.exponents[src].copy()
    bumped[:, ctx.time_index] += 1
    coeffs[space.lookup(bumped)] = rhs_coeffs[src] / (r + 1)


def propagate_scalar(ctx: SolitonContext, u0: Jet, rhs_fn, q: int = 1,
                     m: int | None = None) -> Jet:
    """Jet of the solution of d u/dt = rhs_fn(u) with initial slice u0.

    Only time exponents 1..q are filled; coefficients with a higher time
    exponent stay zero even when their total degree sits inside the tracked
    validity order. Consumers must differentiate at most q times in t.
    """
    if ctx.time_index is None:
        raise ValueError("propagation requires a context with a time variable")
    if q < 1:
        raise ValueError("need at least one time degree (q >= 1)")
    if m is None:
        m = ctx.space.order - q
    u = strip_time(ctx, u0)
    u = Jet(ctx.space, u.coeffs.copy(), u.order)
    for r in range(q):
        rhs = rhs_fn(ctx, u)
        _fill_time_degree(ctx, u.coeffs, rhs.coeffs, r, m)
        u = Jet(ctx.space, u.coeffs, min(u.order, rhs.order + 1))
    return u


def propagate_sym2(ctx: SolitonContext, h0: geo.TensorValue, q: int = 1,
                   m: int | None = None) -> geo.TensorValue:
    """Jet of the solution of d h/dt = Lichnerowicz(h) with initial slice h0.

    Same time-exponent contract as propagate_scalar: at most q derivatives
    in t are meaningful.
    """
    if ctx.time_index is None:
        raise ValueError("propagation requires a context with a time variable")
    if m is None:
        m = ctx.space.order - q
    comps = np.empty((2, 2), dtype=object)
    for i in range(2):
        for j in range(i + 1):
            hij = strip_time(ctx, h0[i, j])
            comps[i, j] = comps[j, i] = Jet(ctx.space, hij.coeffs.copy(), hij.order)
    h = geo.TensorValue(2, 0, comps)
    for r in range(q):
        rhs = geo.lichnerowicz_laplacian(ctx.chart, h)
        order = min(min(rhs[i, j].order for i in range(2) for j in range(i + 1)) + 1,
                    min(h[i, j].order for i in range(2) for j in range(i + 1)))
        for i in range(2):
            for j in range(i + 1):
                _fill_time_degree(ctx, h[i, j].coeffs, rhs[i, j].coeffs, r, m)
                h[i, j].order = order
    return h


def make_perturbation(ctx: SolitonContext, kind: str, seed: int = 0,
                      q: int = 1) -> geo.TensorValue:
    """Symmetric 2-tensor h for the linear trace checks.

    kind "ricci": the chart's own Ricci tensor (an exact linearized-flow
    solution when the chart solves Ricci flow exactly). kind "metric": the
    metric itself. kind "static": seeded trig data frozen in time.
    kind "propagated": seeded trig data pushed forward by the Lichnerowicz
    flow, the generic linearized-flow solution.
    """
    if kind == "ricci":
        return ctx.chart.ricci
    if kind == "metric":
        return geo.TensorValue(2, 0, ctx.chart.g)
    if kind == "static":
        return trig_sym2(ctx, seed, "h")
    if kind == "propagated":
        return propagate_sym2(ctx, trig_sym2(ctx, seed, "h"), q=q)
    raise ValueError(f"unknown perturbation kind {kind!r}")


def neg_grad_potential(ctx: SolitonContext) -> geo.TensorValue:
    grad = geo.gradient(ctx.chart, ctx.f)
    return geo.vector_from(lambda i: -grad[i], 2, con=True)
