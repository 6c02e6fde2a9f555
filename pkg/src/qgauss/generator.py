"""Deterministic chaotic variate generator and the transform reference sampler.

The chaotic generator carries three floats of state: a point (w, v) on the
unit circle advanced by the degree-d polynomial pair, and a radial value z
advanced by the conjugated fold map.  Each step emits the pair
(xi, eta) = (w*z, v*z), whose marginals converge to the q_out family member.

Bit discipline: generate() and step() share one inlined loop (_run) whose
arithmetic matches maps.z_map and the raw maps.chebyshev_pair expression for
expression.  The circle point is renormalized only when its squared radius
drifts more than 1e-10 from 1, which keeps short orbits bit-identical to the
unrenormalized reference recursion while holding the invariant over long
runs; the renormalization happens before the step's outputs are formed.

The transform sampler (gbmm_sample) is the independent route used for
cross-validation: two uniforms in, one (x, y) pair out, no state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .maps import _CHEB, _U_CLAMP_LO, MapConfig, _u_floor
from .specfun import q_ln

__all__ = [
    "QSpec",
    "make_spec",
    "GeneratorState",
    "init",
    "step",
    "generate",
    "SampleBatch",
    "gbmm_sample",
    "gbmm_generate",
    "UniformStream",
    "derive_seed",
]

# Same Gaussian-fallback width as specfun.q_exp/q_ln.
_Q_ONE_EPS = 1e-12

# Circle renormalization threshold on |w*w + v*v - 1|.
_RADIUS_TOL = 1e-10


@dataclass(frozen=True)
class QSpec:
    """Deformation parameters of one generator instance.

    q_out  the family parameter of the emitted marginals, q_out < 3
    q_int  internal map deformation (q_out + 1)/(3 - q_out)
    nu     tail index (3 - q_out)/(q_out - 1) for q_out > 1, else None
    """

    q_out: float
    q_int: float
    nu: Optional[float]


def make_spec(q_out: float) -> QSpec:
    """Build a QSpec from the output deformation parameter."""
    if not (math.isfinite(q_out) and q_out < 3.0):
        raise ValueError("q_out must be finite and < 3, got %r" % (q_out,))
    q_int = (q_out + 1.0) / (3.0 - q_out)
    nu = (3.0 - q_out) / (q_out - 1.0) if q_out > 1.0 else None
    return QSpec(q_out=q_out, q_int=q_int, nu=nu)


@dataclass
class GeneratorState:
    """Mutable orbit state plus the seeds it was started from."""

    spec: QSpec
    cfg: MapConfig
    w: float
    v: float
    z: float
    steps: int = 0
    v0: float = 0.1
    z0: float = 1.0
    w0_sign: int = 1


def init(
    spec: QSpec,
    cfg: MapConfig,
    v0: float = 0.1,
    z0: float = 1.0,
    w0_sign: int = 1,
) -> GeneratorState:
    """Seed a generator orbit.

    v0 fixes the circle point as (w, v) = (w0_sign*sqrt(1 - v0*v0), v0) and
    must lie strictly inside (0, 1); z0 seeds the radial map and must be
    positive, finite, and (for q_int < 1) inside the compact radial support.
    """
    if not (math.isfinite(v0) and 0.0 < v0 < 1.0):
        raise ValueError(
            "v0 must lie strictly inside (0, 1), got %r" % (v0,)
        )
    if not (math.isfinite(z0) and z0 > 0.0):
        raise ValueError("z0 must be finite and > 0, got %r" % (z0,))
    if w0_sign not in (1, -1):
        raise ValueError("w0_sign must be +1 or -1, got %r" % (w0_sign,))
    if spec.q_int < 1.0:
        z_edge = math.sqrt(2.0 / (1.0 - spec.q_int))
        if z0 > z_edge:
            raise ValueError(
                "z0=%r is outside the radial support [0, %r] for q_int=%r"
                % (z0, z_edge, spec.q_int)
            )
    w0 = w0_sign * math.sqrt(1.0 - v0 * v0)
    return GeneratorState(
        spec=spec, cfg=cfg, w=w0, v=v0, z=z0, steps=0, v0=v0, z0=z0, w0_sign=w0_sign
    )


def _run(
    state: GeneratorState, n: int, xi_out: np.ndarray, eta_out: np.ndarray
) -> None:
    """Advance the orbit n steps, filling xi_out/eta_out in place.

    This is the single authoritative step loop; step() and generate() both
    call it.  The z update repeats the arithmetic of maps.z_map with the
    same expression shapes and clamp order.
    """
    w = state.w
    v = state.v
    z = state.z
    cfg = state.cfg
    pf, qf = _CHEB[cfg.d]
    s = cfg.l * (1.0 - cfg.epsilon)
    fold_l = cfg.l
    fold_c = cfg.c
    tent = fold_l == 2
    q = state.spec.q_int
    gaussian = abs(q - 1.0) < _Q_ONE_EPS
    one_m_q = 1.0 - q
    q_ge_1 = q >= 1.0
    u_lo = _u_floor(q) if q_ge_1 else 0.0
    z_edge = math.sqrt(2.0 / one_m_q) if q < 1.0 else 0.0
    exp_ = math.exp
    log_ = math.log
    sqrt_ = math.sqrt
    for i in range(n):
        v = qf(w, v)
        w = pf(w)
        r2 = w * w + v * v
        if abs(r2 - 1.0) > _RADIUS_TOL:
            r = sqrt_(r2)
            w /= r
            v /= r
        if gaussian:
            u = exp_(-z * z * 0.5)
        else:
            t = 1.0 + one_m_q * (-z * z * 0.5)
            u = exp_(log_(t) / one_m_q) if t > 0.0 else 0.0
        if q_ge_1 and u < _U_CLAMP_LO:
            u = _U_CLAMP_LO
        if tent:
            for _ in range(fold_c):
                u = 1.0 - abs(1.0 - s * u)
        else:
            for _ in range(fold_c):
                y = s * u
                k = int(y)
                u = (k + 1) - y if k & 1 else y - k
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
        if q_ge_1:
            if u < u_lo:
                u = u_lo
            if gaussian:
                z = sqrt_(-2.0 * log_(u))
            else:
                z = sqrt_(-2.0 * ((exp_(log_(u) * one_m_q) - 1.0) / one_m_q))
        elif u == 0.0:
            z = z_edge
        else:
            z = sqrt_(-2.0 * ((exp_(log_(u) * one_m_q) - 1.0) / one_m_q))
        xi_out[i] = w * z
        eta_out[i] = v * z
    state.w = w
    state.v = v
    state.z = z
    state.steps += n


def step(state: GeneratorState) -> Tuple[float, float]:
    """Advance one step and return the output pair (xi, eta)."""
    xi = np.empty(1)
    eta = np.empty(1)
    _run(state, 1, xi, eta)
    return float(xi[0]), float(eta[0])


@dataclass(eq=False)
class SampleBatch:
    """A generated block of output pairs plus everything needed to redo it."""

    xi: np.ndarray
    eta: np.ndarray
    spec: QSpec
    cfg: MapConfig
    method: str
    seed_info: Dict[str, object] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.xi.size)

    def metadata(self) -> Dict[str, object]:
        """JSON-ready regeneration record."""
        return {
            "method": self.method,
            "count": self.count,
            "q_out": self.spec.q_out,
            "q_int": self.spec.q_int,
            "nu": self.spec.nu,
            "d": self.cfg.d,
            "l": self.cfg.l,
            "c": self.cfg.c,
            "epsilon": self.cfg.epsilon,
            **self.seed_info,
        }


def generate(state: GeneratorState, n: int) -> SampleBatch:
    """Generate n output pairs, advancing the state in place."""
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a non-negative integer, got %r" % (n,))
    xi = np.empty(n)
    eta = np.empty(n)
    seed_info = {
        "v0": state.v0,
        "z0": state.z0,
        "w0_sign": state.w0_sign,
        "skipped_steps": state.steps,
    }
    _run(state, n, xi, eta)
    return SampleBatch(
        xi=xi, eta=eta, spec=state.spec, cfg=state.cfg,
        method="chaotic", seed_info=seed_info,
    )


def gbmm_sample(spec: QSpec, u1: float, u2: float) -> Tuple[float, float]:
    """Transform two uniforms from (0,1) into one output pair.

    Radius sqrt(-2 q_ln(q_int, u1)) and angle 2*pi*u2.  Boundary values of
    u1 or u2 are domain errors.  For strongly deformed q_int > 1 the radius
    power u1**(1-q_int) can exceed double range; u1 is floored at the same
    bound as the chaotic route (see maps._u_floor), which is unreachable
    from a 53-bit uniform for q_int below about 20.
    """
    if not 0.0 < u1 < 1.0:
        raise ValueError("u1 must lie strictly inside (0, 1), got %r" % (u1,))
    if not 0.0 < u2 < 1.0:
        raise ValueError("u2 must lie strictly inside (0, 1), got %r" % (u2,))
    if spec.q_int > 1.0:
        lo = _u_floor(spec.q_int)
        if u1 < lo:
            u1 = lo
    r = math.sqrt(-2.0 * q_ln(spec.q_int, u1))
    a = 2.0 * math.pi * u2
    return r * math.cos(a), r * math.sin(a)


def gbmm_generate(spec: QSpec, stream: "UniformStream", n: int) -> SampleBatch:
    """Draw n transform-sampled pairs from a uniform stream."""
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a non-negative integer, got %r" % (n,))
    seed_state = stream.state
    xi = np.empty(n)
    eta = np.empty(n)
    for i in range(n):
        u1 = stream.next_float()
        u2 = stream.next_float()
        x, y = gbmm_sample(spec, u1, u2)
        xi[i] = x
        eta[i] = y
    return SampleBatch(
        xi=xi, eta=eta, spec=spec, cfg=MapConfig(),
        method="gbmm", seed_info={"stream_state": seed_state},
    )


# SplitMix64 constants.
_MASK64 = (1 << 64) - 1
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB
_TWO_NEG53 = 2.0 ** -53


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _SM_MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _SM_MIX2) & _MASK64
    return x ^ (x >> 31)


class UniformStream:
    """Deterministic uniform(0,1) stream (SplitMix64).

    next_float maps the top 53 bits of each 64-bit word to the open
    interval (0, 1): ((word >> 11) + 0.5) * 2**-53, so 0.0 and 1.0 are
    never produced.  Used for trial seeding, the transform sampler, and
    the Monte Carlo null draws.
    """

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        if not isinstance(seed, int):
            raise ValueError("seed must be an integer, got %r" % (seed,))
        self._s = seed & _MASK64

    @property
    def state(self) -> int:
        return self._s

    def next_uint64(self) -> int:
        self._s = (self._s + _SM_GAMMA) & _MASK64
        return _mix64(self._s)

    def next_float(self) -> float:
        return ((self.next_uint64() >> 11) + 0.5) * _TWO_NEG53

    def take(self, n: int) -> np.ndarray:
        """Draw n floats as an array (same values as n next_float calls)."""
        out = np.empty(n)
        nf = self.next_float
        for i in range(n):
            out[i] = nf()
        return out


def derive_seed(master: int, *indices: int) -> int:
    """Fold integer indices into a master seed, with full avalanche per index.

    Pure function of its arguments; used to give every (q, trial) cell of a
    trial table its own independent substream.
    """
    s = _mix64(master & _MASK64)
    for k in indices:
        s = _mix64(((s + _SM_GAMMA) & _MASK64) ^ _mix64((k + _SM_GAMMA) & _MASK64))
    return s
