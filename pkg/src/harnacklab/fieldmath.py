"""Analytic functions dispatched over field-like values.

Geometry and identity code is written once against a small element protocol:
ring arithmetic via operators, ``.partial(i)`` for coordinate derivatives, and
the analytic functions below. Truncated-jet values and grid-sampled values both
register here; plain Python floats fall back to :mod:`math`.
"""

import functools
import math


@functools.singledispatch
def fexp(x):
    return math.exp(x)


@functools.singledispatch
def flog(x):
    return math.log(x)


@functools.singledispatch
def fsqrt(x):
    return math.sqrt(x)


@functools.singledispatch
def fsin(x):
    return math.sin(x)


@functools.singledispatch
def fcos(x):
    return math.cos(x)


@functools.singledispatch
def fpowr(x, a: float):
    return math.pow(x, a)
