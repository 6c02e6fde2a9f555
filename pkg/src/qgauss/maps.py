"""Circle and interval maps that drive the chaotic variate generator.

Three layers:

* chebyshev_pair -- the degree-d angle-multiplying map on the unit circle,
  written as polynomial pairs (P_d, Q_d) in Horner form.  The degree-8 pair
  uses the exact expression shapes of the reference implementation; the
  conformance tests pin its bit patterns, so do not re-associate the
  arithmetic.
* tri_map -- the slope-l piecewise linear fold of [0, 1] onto itself, with
  the slope depressed by a small epsilon so the top of the tent never maps
  exactly onto the fixed point at 1.
* z_map / z_map_derivative -- the fold conjugated by g(u) = sqrt(-2 q_ln u),
  acting on the radial coordinate z.  Its orbit distributes z like the
  radial part of a two dimensional deformed Gaussian.

All maps are scalar and allocation free; the generator inlines the same
arithmetic for its batch loop and the tests assert bit equality between the
two paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, NamedTuple, Tuple

from .specfun import q_exp, q_ln

__all__ = [
    "CirclePoint",
    "MapConfig",
    "chebyshev_pair",
    "tri_map",
    "z_map",
    "z_map_derivative",
]


class CirclePoint(NamedTuple):
    """Point (w, v) = (cos t, sin t) on (or numerically near) the unit circle."""

    w: float
    v: float


@dataclass(frozen=True)
class MapConfig:
    """Static map parameters for one generator instance.

    d        circle map degree, integer in 2..8
    l        interval fold order, integer >= 2
    c        fold applications per step, integer >= 1
    epsilon  slope depression; effective slope is l*(1 - epsilon)
    """

    d: int = 8
    l: int = 2
    c: int = 1
    epsilon: float = 5e-6

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or not 2 <= self.d <= 8:
            raise ValueError("d must be an integer in 2..8, got %r" % (self.d,))
        if not isinstance(self.l, int) or self.l < 2:
            raise ValueError("l must be an integer >= 2, got %r" % (self.l,))
        if not isinstance(self.c, int) or self.c < 1:
            raise ValueError("c must be an integer >= 1, got %r" % (self.c,))
        if not 0.0 <= self.epsilon < 1e-3:
            raise ValueError(
                "epsilon must satisfy 0 <= epsilon < 1e-3, got %r" % (self.epsilon,)
            )

    @property
    def slope(self) -> float:
        """Effective fold slope l*(1 - epsilon)."""
        return self.l * (1.0 - self.epsilon)


# Cosine-side polynomials P_d(w) = cos(d t) for w = cos t, Horner form.

def _p1(w: float) -> float:
    return w


def _p2(w: float) -> float:
    return 2.0 * w * w - 1.0


def _p3(w: float) -> float:
    return (4.0 * w * w - 3.0) * w


def _p4(w: float) -> float:
    return (8.0 * w * w - 8.0) * w * w + 1.0


def _p5(w: float) -> float:
    return ((16.0 * w * w - 20.0) * w * w + 5.0) * w


def _p6(w: float) -> float:
    return ((32.0 * w * w - 48.0) * w * w + 18.0) * w * w - 1.0


def _p7(w: float) -> float:
    return (((64.0 * w * w - 112.0) * w * w + 56.0) * w * w - 7.0) * w


def _p8(w: float) -> float:
    return (((128.0 * w * w - 256.0) * w * w + 160.0) * w * w - 32.0) * w * w + 1.0


# Sine-side companions Q_d(w, v) = sin(d t) for v = sin t.

def _q1(w: float, v: float) -> float:
    return v


def _q2(w: float, v: float) -> float:
    return 2.0 * w * v


def _q3(w: float, v: float) -> float:
    return v * (4.0 * w * w - 1.0)


def _q4(w: float, v: float) -> float:
    return v * ((8.0 * w * w - 4.0) * w)


def _q5(w: float, v: float) -> float:
    return v * ((16.0 * w * w - 12.0) * w * w + 1.0)


def _q6(w: float, v: float) -> float:
    return v * (((32.0 * w * w - 32.0) * w * w + 6.0) * w)


def _q7(w: float, v: float) -> float:
    return v * (((64.0 * w * w - 80.0) * w * w + 24.0) * w * w - 1.0)


def _q8(w: float, v: float) -> float:
    return 8 * w * v * (((16.0 * w * w - 24.0) * w * w + 10.0) * w * w - 1.0)


_CHEB: Dict[int, Tuple[Callable[[float], float], Callable[[float, float], float]]] = {
    1: (_p1, _q1),
    2: (_p2, _q2),
    3: (_p3, _q3),
    4: (_p4, _q4),
    5: (_p5, _q5),
    6: (_p6, _q6),
    7: (_p7, _q7),
    8: (_p8, _q8),
}


def chebyshev_pair(d: int, p: CirclePoint, renormalize: bool = True) -> CirclePoint:
    """Apply the degree-d circle map to p = (w, v).

    Computes (P_d(w), Q_d(w, v)), which multiplies the angle of p by d when
    p lies on the unit circle.  With renormalize=True (default) the result
    is divided by its radius, which suppresses the d-fold per-step growth
    of rounding drift; pass renormalize=False to get the raw polynomial
    values.
    """
    try:
        pf, qf = _CHEB[d]
    except (KeyError, TypeError):
        raise ValueError("degree d must be an integer in 1..8, got %r" % (d,)) from None
    w, v = p
    nv = qf(w, v)
    nw = pf(w)
    if renormalize:
        r = math.sqrt(nw * nw + nv * nv)
        nw /= r
        nv /= r
    return CirclePoint(nw, nv)


def tri_map(l: int, epsilon: float, u: float) -> float:
    """One application of the slope-l fold of [0, 1] onto itself.

    Stretches u by s = l*(1 - epsilon) and folds the result back into the
    unit interval, reversing direction on every odd integer cell.  For
    l = 2 this is the classic tent map, written in the same single-
    expression form as the reference implementation so that orbits agree
    bit for bit.
    """
    if not isinstance(l, int) or l < 2:
        raise ValueError("l must be an integer >= 2, got %r" % (l,))
    if not 0.0 <= epsilon < 1e-3:
        raise ValueError("epsilon must satisfy 0 <= epsilon < 1e-3, got %r" % (epsilon,))
    if not 0.0 <= u <= 1.0:
        raise ValueError("u must lie in [0, 1], got %r" % (u,))
    s = l * (1.0 - epsilon)
    if l == 2:
        return 1.0 - abs(1.0 - s * u)
    y = s * u
    k = int(y)
    if k & 1:
        r = (k + 1) - y
    else:
        r = y - k
    # guard the cell edges against one-ulp escapes
    if r < 0.0:
        return 0.0
    if r > 1.0:
        return 1.0
    return r


# Lower clamp applied to u = q_exp(q, -z*z/2) before folding (q >= 1 only;
# for q < 1 a vanishing u is the compact support edge and is handled as such).
_U_CLAMP_LO = 1e-300


def _u_floor(q_int: float) -> float:
    """Smallest post-fold u whose deformed log stays inside double range.

    For q > 1 the inverse conjugation evaluates u**(1-q); below
    exp(-709/(q-1)) that power overflows, so the fold output is floored
    there.  The floor only matters for strongly deformed regimes (it is
    about 8e-9 at q = 39) and is unreachable noise otherwise.
    """
    if q_int <= 1.0:
        return _U_CLAMP_LO
    return max(_U_CLAMP_LO, math.exp(-709.0 / (q_int - 1.0)))


def z_map(q_int: float, cfg: MapConfig, z: float) -> float:
    """One step of the conjugated radial map: z -> g(T_l^c(g_inv(z))).

    g_inv(z) = q_exp(q_int, -z*z/2) sends z into [0, 1], the fold acts c
    times, and g(u) = sqrt(-2 q_ln(q_int, u)) maps back.  For q_int < 1
    the radius lives on the compact interval [0, sqrt(2/(1-q_int))] and z
    outside it is a domain error; a fold output of exactly 0 maps to the
    support edge.  For q_int >= 1 the fold output is floored (see _u_floor)
    so the returned z is always finite.
    """
    if not (math.isfinite(z) and z >= 0.0):
        raise ValueError("z must be finite and >= 0, got %r" % (z,))
    if q_int < 1.0:
        z_edge = math.sqrt(2.0 / (1.0 - q_int))
        if z > z_edge:
            raise ValueError(
                "z=%r is outside the radial support [0, %r] for q_int=%r"
                % (z, z_edge, q_int)
            )
    u = q_exp(q_int, -z * z * 0.5)
    if q_int >= 1.0 and u < _U_CLAMP_LO:
        u = _U_CLAMP_LO
    for _ in range(cfg.c):
        u = tri_map(cfg.l, cfg.epsilon, u)
    if q_int >= 1.0:
        lo = _u_floor(q_int)
        if u < lo:
            u = lo
        return math.sqrt(-2.0 * q_ln(q_int, u))
    if u == 0.0:
        return math.sqrt(2.0 / (1.0 - q_int))
    return math.sqrt(-2.0 * q_ln(q_int, u))


def z_map_derivative(q_int: float, z: float) -> float:
    """Derivative of the base radial map (l=2, c=1, zero epsilon) at z.

    The map has a single non-differentiable fold point z* where
    g_inv(z*) = 1/2; requests within 1e-9 of z* are rejected.  Below z*
    the map descends (the fold uses its decreasing arm), above z* it
    ascends, so the sign flips across z*.
    """
    if not (math.isfinite(z) and z > 0.0):
        raise ValueError("z must be finite and > 0, got %r" % (z,))
    if q_int < 1.0:
        z_edge = math.sqrt(2.0 / (1.0 - q_int))
        if z > z_edge:
            raise ValueError(
                "z=%r is outside the radial support [0, %r] for q_int=%r"
                % (z, z_edge, q_int)
            )
    z_star = math.sqrt(-2.0 * q_ln(q_int, 0.5))
    if abs(z - z_star) <= 1e-9:
        raise ValueError(
            "derivative undefined within 1e-9 of the fold point z*=%r" % (z_star,)
        )
    u = q_exp(q_int, -z * z * 0.5)
    scale = 2.0 ** (1.0 - q_int)
    if z > z_star:
        # u < 1/2: increasing arm of the fold
        return scale * z / math.sqrt(-2.0 * q_ln(q_int, 2.0 * u))
    # u > 1/2: decreasing arm; u**q / (1-u)**q restores the conjugation factors
    w = 2.0 * (1.0 - u)
    return (
        -scale
        * (1.0 - u) ** (-q_int)
        * u ** q_int
        * z
        / math.sqrt(-2.0 * q_ln(q_int, w))
    )
