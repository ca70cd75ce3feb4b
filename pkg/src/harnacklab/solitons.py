"""Catalog of explicit gradient Ricci solitons and jet contexts over them.

Each catalog entry supplies closed-form metric and potential components in one
coordinate chart, as functions of coordinate jets (x, y, t). The time argument
is always passed; static entries ignore it, and callers choose whether t is a
jet variable (so time derivatives are available) or a per-point constant.

Conventions: a gradient soliton satisfies Ric + Hess f = lam * g with lam = 0
(steady) or lam = -1/(2t), t < 0 (shrinking, so the metric g(t) = -2t * g_fixed
cases solve Ricci flow exactly). "Normalized steady" means R + |grad f|^2 = 1.
"""

import zlib
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from . import geometry as geo
from .jet import jet_space


class UnknownSolitonError(KeyError):
    pass


@dataclass(frozen=True)
class SolitonSpec:
    name: str
    kind: str                     # "steady" | "shrinking" | "none"
    description: str
    dim: int = 2
    time_dependent: bool = False
    ricci_flow_exact: bool = False
    normalized_steady: bool = False
    potential_time_rule: str = "none"   # "heat": df/dt = Lap f ; "grad2": df/dt = |grad f|^2
    f_identically_zero: bool = False
    grid_only: bool = False
    sample_box: tuple = ((-3.0, 3.0), (-3.0, 3.0))
    time_interval: tuple = (0.0, 0.0)
    builder: object = field(default=None, repr=False, compare=False)


def _cigar_conformal(x, y, t, moving: bool):
    r2 = x * x + y * y
    denom = (t.exp() + r2) if moving else (1.0 + r2)
    return 4.0 / denom, denom


def _build_cigar_static(x, y, t):
    conf, denom = _cigar_conformal(x, y, t, moving=False)
    zero = 0.0 * conf
    return [[conf, zero], [zero, conf]], -denom.log()


def _build_cigar_flow(x, y, t):
    conf, denom = _cigar_conformal(x, y, t, moving=True)
    zero = 0.0 * conf
    return [[conf, zero], [zero, conf]], -denom.log()


def _build_cigar_flow_v2(x, y, t):
    conf, denom = _cigar_conformal(x, y, t, moving=True)
    zero = 0.0 * conf
    return [[conf, zero], [zero, conf]], t - denom.log()


def _build_flat_linear(x, y, t):
    one = 1.0 + 0.0 * x
    zero = 0.0 * x
    return [[one, zero], [zero, one]], 0.6 * x + 0.8 * y + t


def _build_gaussian(x, y, t):
    one = 1.0 + 0.0 * x
    zero = 0.0 * x
    f = (x * x + y * y) / (-4.0 * t) - 1.0
    return [[one, zero], [zero, one]], f


def _build_sphere_shrinker(x, y, t):
    r2 = x * x + y * y
    conf = (-2.0 * t) * 4.0 / ((1.0 + r2) * (1.0 + r2))
    zero = 0.0 * conf
    return [[conf, zero], [zero, conf]], 0.0 * x


def _build_flat_torus(x, y, t):
    one = 1.0 + 0.0 * x
    zero = 0.0 * x
    return [[one, zero], [zero, one]], 0.0 * x


CATALOG = {
    s.name: s for s in [
        SolitonSpec(
            name="cigar_static", kind="steady",
            description="cigar soliton, fixed chart: g = 4 delta/(1+r^2), f = -log(1+r^2)",
            normalized_steady=True, builder=_build_cigar_static),
        SolitonSpec(
            name="cigar_flow", kind="steady",
            description="cigar moving under its flow: g = 4 delta/(e^t+r^2), f = -log(e^t+r^2)",
            time_dependent=True, ricci_flow_exact=True, normalized_steady=True,
            potential_time_rule="heat", time_interval=(-0.7, 0.7),
            builder=_build_cigar_flow),
        SolitonSpec(
            name="cigar_flow_v2", kind="steady",
            description="cigar flow with gauge-shifted potential f = t - log(e^t+r^2)",
            time_dependent=True, ricci_flow_exact=True, normalized_steady=True,
            potential_time_rule="grad2", time_interval=(-0.7, 0.7),
            builder=_build_cigar_flow_v2),
        SolitonSpec(
            name="flat_steady_linear", kind="steady",
            description="flat plane with unit linear potential f = 0.6x + 0.8y + t",
            time_dependent=True, ricci_flow_exact=True, normalized_steady=True,
            potential_time_rule="grad2", time_interval=(-0.7, 0.7),
            builder=_build_flat_linear),
        SolitonSpec(
            name="gaussian_shrinker", kind="shrinking",
            description="flat plane as a shrinker: f = |x|^2/(-4t) - 1, t < 0",
            time_dependent=True, ricci_flow_exact=True,
            potential_time_rule="grad2",
            sample_box=((-2.0, 2.0), (-2.0, 2.0)), time_interval=(-2.0, -0.5),
            builder=_build_gaussian),
        SolitonSpec(
            name="sphere_shrinker", kind="shrinking",
            description="round 2-sphere shrinking to a point: g(t) = -2t g_unit, f = 0",
            time_dependent=True, ricci_flow_exact=True, f_identically_zero=True,
            sample_box=((-2.0, 2.0), (-2.0, 2.0)), time_interval=(-2.0, -0.5),
            builder=_build_sphere_shrinker),
        SolitonSpec(
            name="flat_torus", kind="steady",
            description="flat square torus, f = 0 (steady but not normalized)",
            time_dependent=False, ricci_flow_exact=True,
            potential_time_rule="grad2", f_identically_zero=True,
            sample_box=((0.3, 2 * np.pi - 0.3), (0.3, 2 * np.pi - 0.3)),
            builder=_build_flat_torus),
        SolitonSpec(
            name="torus_generic", kind="none",
            description="perturbed flat torus metric, sampled data only (grid scenarios)",
            grid_only=True,
            sample_box=((0.3, 2 * np.pi - 0.3), (0.3, 2 * np.pi - 0.3))),
    ]
}


def catalog_get(name: str) -> SolitonSpec:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownSolitonError(
            f"unknown soliton {name!r}; known: {sorted(CATALOG)}") from None


def stream(seed: int, tag: str) -> np.random.Generator:
    """Independent, process-stable RNG stream for (seed, tag)."""
    return np.random.default_rng([seed, zlib.crc32(tag.encode())])


def sample_points(spec: SolitonSpec, seed: int, n: int) -> dict:
    """Low-discrepancy sample pack: spatial points (2, n) and times (n,).

    Points near a coordinate axis are nudged off it so that quantities with
    isolated critical points (|grad f| on the cigar at the origin) stay
    generic at every sample.
    """
    sampler = qmc.Halton(d=3, scramble=True, seed=stream(seed, "pts:" + spec.name))
    raw = sampler.random(n)
    lo = np.array([b[0] for b in spec.sample_box])
    hi = np.array([b[1] for b in spec.sample_box])
    xy = (lo + (hi - lo) * raw[:, :2]).T
    centered = (lo < 0).any()
    if centered:
        near = np.abs(xy) < 0.08
        xy = np.where(near, xy + 0.13 * np.where(xy >= 0, 1.0, -1.0), xy)
    t0, t1 = spec.time_interval
    times = t0 + (t1 - t0) * raw[:, 2]
    if spec.kind == "shrinking" and np.any(times >= 0.0):
        raise geo.ChartDomainError("shrinking soliton sampled at t >= 0")
    return {"xy": xy, "t": times}


class SolitonContext:
    """One soliton chart evaluated as jets at a pack of sample points.

    ``time`` selects whether t enters the jet space as a variable ("var") or
    as a per-point constant ("const"); ``deform`` appends one extra variable s
    seeded at 0 for one-parameter deformations. Variable layout: x, y[, t][, s].
    """

    def __init__(self, spec: SolitonSpec, seed: int, n_points: int, order: int,
                 time: str, deform: bool):
        if spec.grid_only:
            raise UnknownSolitonError(
                f"{spec.name} is defined by sampled data only; no jet chart")
        if time not in ("var", "const"):
            raise ValueError(f"time must be 'var' or 'const', got {time!r}")
        self.spec = spec
        self.seed = seed
        self.n_points = n_points
        self.order = order
        self.time_index = 2 if time == "var" else None
        self.deform_index = (2 + (time == "var")) if deform else None
        n_vars = 2 + (time == "var") + deform

        pack = sample_points(spec, seed, n_points)
        self.points = pack
        self.space = jet_space(n_vars, order)
        seeds = [pack["xy"][0], pack["xy"][1]]
        if time == "var":
            seeds.append(pack["t"])
        if deform:
            seeds.append(np.zeros(n_points))
        jets = self.space.variables(np.array(seeds))
        self.x, self.y = jets[0], jets[1]
        self.t = jets[2] if time == "var" else self.space.constant(pack["t"])
        self.s = jets[self.deform_index] if deform else None

        g, f = spec.builder(self.x, self.y, self.t)
        self.chart = geo.MetricChart(g, partial_map=(0, 1))
        self.f = f

    def dt(self, elem):
        if self.time_index is None:
            raise ValueError("context built with constant time; no d/dt")
        return elem.partial(self.time_index)

    def ds(self, elem):
        if self.deform_index is None:
            raise ValueError("context built without a deformation variable")
        return elem.partial(self.deform_index)


@lru_cache(maxsize=64)
def build_context(name: str, seed: int = 0, n_points: int = 32, order: int = 6,
                  time: str = "var", deform: bool = False) -> SolitonContext:
    return SolitonContext(catalog_get(name), seed, n_points, order, time, deform)
