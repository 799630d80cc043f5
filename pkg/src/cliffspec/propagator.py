"""Exact transfer matrices for psi'' = -(kappa^2 + lambda) psi, with scaling.

A segment of constant kappa^2 has the closed-form propagator over a signed
displacement s (rotation for q^2 = kappa^2 + lambda > 0, hyperbolic for
q^2 < 0, shear at q^2 = 0).  Hyperbolic factors carry their e^(mu*|s|)
growth in a separate natural-log scale so that paths with mu*|s| of several
hundred never overflow.  All entry math broadcasts over numpy arrays; the
public API wraps scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import PotentialSpec, pieces_between

SERIES_Q2 = 1e-12   # |q^2| below this: second-order series around the shear


@dataclass(frozen=True)
class StateVector:
    psi: float
    dpsi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.psi) and math.isfinite(self.dpsi)):
            raise ValueError("state entries must be finite")
        if self.psi == 0.0 and self.dpsi == 0.0:
            raise ValueError("state must not be identically zero")


@dataclass(frozen=True)
class TransferResult:
    """Normalized 2x2 matrix M with true transfer = e^log_scale * M."""

    m11: float
    m12: float
    m21: float
    m22: float
    log_scale: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det_restored(self) -> float:
        """det(M) * e^(2 log_scale); equals 1 for exact propagation.

        Evaluated in log space so large scale factors cannot overflow.  Note
        the entry-level determinant is representable only while
        2*log_scale stays below ~ -ln(eps); past that the subdominant
        singular direction is below roundoff for any 2x2 float matrix.
        """
        d = self.m11 * self.m22 - self.m12 * self.m21
        if d == 0.0:
            return 0.0
        arg = math.log(abs(d)) + 2.0 * self.log_scale
        if arg > 709.0:
            return math.copysign(math.inf, d)
        return math.copysign(math.exp(arg), d)

    def apply(self, state: StateVector) -> tuple[StateVector, float]:
        """Apply to a state; returns unit-normalized state plus log amplitude."""
        x = self.m11 * state.psi + self.m12 * state.dpsi
        y = self.m21 * state.psi + self.m22 * state.dpsi
        h = math.hypot(x, y)
        if h == 0.0:
            raise ArithmeticError("transfer annihilated the state")
        return StateVector(x / h, y / h), self.log_scale + math.log(h)


def matrix_entries(kappa_sq, lam, length):
    """Broadcastable entries (m11, m12, m21, m22, log_scale) of the propagator."""
    ksq, lm, s = np.broadcast_arrays(
        np.asarray(kappa_sq, dtype=float),
        np.asarray(lam, dtype=float),
        np.asarray(length, dtype=float),
    )
    q2 = ksq + lm
    m11 = np.empty(q2.shape)
    m12 = np.empty(q2.shape)
    m21 = np.empty(q2.shape)
    m22 = np.empty(q2.shape)
    log = np.zeros(q2.shape)

    osc = q2 >= SERIES_Q2
    hyp = q2 <= -SERIES_Q2
    ser = ~(osc | hyp)

    if np.any(osc):
        q = np.sqrt(q2[osc])
        qs = q * s[osc]
        c, sn = np.cos(qs), np.sin(qs)
        m11[osc] = c
        m12[osc] = sn / q
        m21[osc] = -q * sn
        m22[osc] = c

    if np.any(hyp):
        mu = np.sqrt(-q2[hyp])
        sh_ = s[hyp]
        t = mu * np.abs(sh_)
        u = np.exp(-2.0 * t)
        ch = 0.5 * (1.0 + u)
        sh = 0.5 * (1.0 - u) * np.sign(sh_)
        m11[hyp] = ch
        m12[hyp] = sh / mu
        m21[hyp] = mu * sh
        m22[hyp] = ch
        log[hyp] = t

    if np.any(ser):
        q2s = q2[ser]
        ss = s[ser]
        m11[ser] = 1.0 - 0.5 * q2s * ss * ss
        m12[ser] = ss * (1.0 - q2s * ss * ss / 6.0)
        m21[ser] = -q2s * ss * (1.0 - q2s * ss * ss / 6.0)
        m22[ser] = 1.0 - 0.5 * q2s * ss * ss
    return m11, m12, m21, m22, log


def multiply_entries(a, b):
    """Entrywise product a @ b of two entry tuples, renormalized to max-abs 1."""
    a11, a12, a21, a22, la = a
    b11, b12, b21, b22, lb = b
    c11 = a11 * b11 + a12 * b21
    c12 = a11 * b12 + a12 * b22
    c21 = a21 * b11 + a22 * b21
    c22 = a21 * b12 + a22 * b22
    scale = np.maximum(np.maximum(np.abs(c11), np.abs(c12)),
                       np.maximum(np.abs(c21), np.abs(c22)))
    return (c11 / scale, c12 / scale, c21 / scale, c22 / scale,
            la + lb + np.log(scale))


def apply_entries(e, v1, v2):
    """Apply entry tuple to a (broadcast) vector; unit-normalized + log amplitude.

    A vector annihilated to float zero (possible only when the true image
    underflows relative to the matrix scale) comes back as zeros with a
    -inf log, i.e. an exact underflow rather than NaN.
    """
    m11, m12, m21, m22, lm = e
    x = m11 * v1 + m12 * v2
    y = m21 * v1 + m22 * v2
    h = np.hypot(x, y)
    safe = h > 0.0
    hs = np.where(safe, h, 1.0)
    with np.errstate(divide="ignore"):
        return x / hs, y / hs, lm + np.where(safe, np.log(hs), -np.inf)


def _normalized_result(e) -> TransferResult:
    m11, m12, m21, m22, log = (np.asarray(x, dtype=float) for x in e)
    scale = max(abs(m11), abs(m12), abs(m21), abs(m22))
    return TransferResult(float(m11 / scale), float(m12 / scale),
                          float(m21 / scale), float(m22 / scale),
                          float(log + math.log(scale)))


def segment_matrix(kappa_sq: float, lam: float, length: float) -> TransferResult:
    """Propagator across one constant-kappa^2 segment of signed length."""
    for name, v in (("kappa_sq", kappa_sq), ("lam", lam), ("length", length)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    return _normalized_result(matrix_entries(kappa_sq, lam, length))


def transfer(spec: PotentialSpec, sigma_from: float, sigma_to: float, lam: float) -> TransferResult:
    """Ordered product of segment propagators from sigma_from to sigma_to.

    Renormalizes after every factor; satisfies the composition law
    transfer(a, c) = transfer(b, c) o transfer(a, b) up to scale alignment.
    """
    if not (math.isfinite(sigma_from) and math.isfinite(sigma_to) and math.isfinite(lam)):
        raise ValueError("non-finite input")
    if sigma_from == sigma_to:
        return TransferResult(1.0, 0.0, 0.0, 1.0, 0.0)
    backward = sigma_to < sigma_from
    hi, lo = (sigma_from, sigma_to) if backward else (sigma_to, sigma_from)
    acc = (np.float64(1.0), np.float64(0.0), np.float64(0.0), np.float64(1.0), np.float64(0.0))
    pieces = list(pieces_between(spec, hi, lo))
    if not backward:
        pieces.reverse()
    for ksq, right, left in pieces:
        w = right - left
        e = matrix_entries(ksq, lam, -w if backward else w)
        acc = multiply_entries(e, acc)
    return _normalized_result(acc)


def propagate_state(spec: PotentialSpec, state: StateVector, sigma_from: float,
                    sigma_to: float, lam: float) -> tuple[StateVector, float]:
    """Transport (psi, psi') data; returns unit state and log amplitude."""
    return transfer(spec, sigma_from, sigma_to, lam).apply(state)


def block_entries(n: int, lam):
    """Vectorized transfer across block n, from 2^(1-n) down to 2^-n."""
    from . import potential as pot
    a = matrix_entries(pot.stage_a_kappa_sq(n), lam, -pot.stage_a_width(n))
    b = matrix_entries(pot.stage_b_kappa_sq(n), lam, -pot.stage_b_width(n))
    return multiply_entries(b, a)


def segment_norm_integral(kappa_sq: float, lam: float, psi_right: float,
                          dpsi_right: float, width: float) -> float:
    """Exact integral of psi^2 across a segment, anchored at its right edge.

    With u the distance measured leftward from the right edge,
    psi(u) = A f(q u) + B g(q u) where (f, g) is (cos, sin), (cosh, sinh) or
    (1, u) depending on the sign of q^2; A = psi_right, B = -dpsi_right / q.
    The hyperbolic case is arranged in exponentially split terms so it stays
    finite for mu*width up to ~350.
    """
    w = width
    q2 = kappa_sq + lam
    if abs(q2) < SERIES_Q2:
        return (psi_right * psi_right * w - psi_right * dpsi_right * w * w
                + dpsi_right * dpsi_right * w ** 3 / 3.0)
    if q2 > 0:
        q = math.sqrt(q2)
        A, B = psi_right, -dpsi_right / q
        s2 = math.sin(2.0 * q * w)
        c2 = math.cos(2.0 * q * w)
        return ((A * A + B * B) * w / 2.0 + (A * A - B * B) * s2 / (4.0 * q)
                + A * B * (1.0 - c2) / (2.0 * q))
    mu = math.sqrt(-q2)
    A, B = psi_right, -dpsi_right / mu
    grow = math.expm1(2.0 * mu * w)        # e^(2 mu w) - 1
    decay = -math.expm1(-2.0 * mu * w)     # 1 - e^(-2 mu w)
    return ((A + B) ** 2 * grow / (8.0 * mu) + (A - B) ** 2 * decay / (8.0 * mu)
            + (A * A - B * B) * w / 2.0)
