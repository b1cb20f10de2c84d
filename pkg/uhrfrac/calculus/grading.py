# -*- coding: utf-8 -*-
"""Node spacing for graded meshes, written as easing/tweening functions.

A graded mesh on an interval [a, b] with n panels and grading exponent r has
the nodes a + (b - a) * (j/n)**r. That is exactly an "ease in" tween from a
to b in n steps: the easing function decides how the steps are distributed.
r = 1 gives a uniform split, r > 1 crowds the nodes towards a, which absorbs
the (psi(t) - psi(0))**(gamma - 1) head of a mild solution or the
(t - s_i)**alpha onset after an impulse interval.

The easing functions share the signature ``func(t, b, c, d)``: tick ``t`` out
of ``d`` ticks, begin value ``b`` and change ``c``.

Example::

    >>> list(tween(ease_linear, 0., 1., 4))
    [0.25, 0.5, 0.75, 1.0]
    >>> list(tween(ease_in_quad, 0., 1., 2, include_begin=True))
    [0.0, 1.0]
    >>> list(tween(ease_in_quad, 0., 1., 2))
    [0.25, 1.0]
    >>> [round(v, 6) for v in tween(graded(3.0), 1., 2., 2)]
    [1.125, 2.0]

"""

from functools import partial

__all__ = (
    'ease_in_power',
    'ease_in_quad',
    'ease_linear',
    'graded',
    'tween'
)


def tween(func, begin=0., end=1., steps=10, include_begin=False):
    """Wrap an easing function in a generator with a fixed number of steps.

    Yields ``steps`` values between ``begin`` and ``end`` (inclusive), where
    the in-between values are determined by ``func``. If ``include_begin`` is
    ``True`` (default ``False``), the first value yielded is ``begin`` and
    the remaining ``steps - 1`` values are distributed up to ``end``.

    """
    change = float(end - begin)
    tick = 0.0

    if include_begin:
        steps -= 1
        yield begin

    while tick < steps:
        tick += 1
        yield func(tick, begin, change, steps)


def ease_linear(t, b, c, d):
    return c * t / d + b


def ease_in_quad(t, b, c, d):
    t /= d
    return c * t * t + b


def ease_in_power(t, b, c, d, r=2.0):
    """Ease in with an arbitrary exponent r >= 1."""
    t /= d
    return c * t ** r + b


def graded(r):
    """Return the easing function for grading exponent r."""
    if r == 1.0:
        return ease_linear
    if r == 2.0:
        return ease_in_quad
    return partial(ease_in_power, r=r)
