"""Admissible-direction limit at the inner edge, and the zero-energy profiles.

The inner boundary sigma -> 0+ admits exactly one ray of initial data whose
solution keeps finite norm and vanishing current: the renormalized limit of
the second row of the transfer matrix down to sigma = 2^-n.  Block
transfers approach diag(1/4, 4) as n grows, so the limit converges
geometrically once 4^n kappa0^2 dominates |lambda|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import potential as pot
from .propagator import (
    apply_entries,
    block_entries,
    matrix_entries,
    multiply_entries,
    segment_norm_integral,
    transfer,
)

#: convergence gate: the deep-block limit is trusted once 4^n kappa0^2 exceeds
#: this multiple of |lambda| (energy contributes <~ 1% per remaining block)
ENERGY_NEGLECT_FACTOR = 100.0


class ConvergenceError(RuntimeError):
    """Boundary-limit iteration failed to settle within n_max blocks."""

    def __init__(self, message: str, residual: float, n_used: int):
        super().__init__(message)
        self.residual = residual
        self.n_used = n_used


@dataclass(frozen=True)
class BoundaryVector:
    """Unit ray (w1, w2) of admissible data, with convergence metadata."""

    w1: float
    w2: float
    n_used: int
    converged: bool
    residual: float


def _standalone_sign(w1: float, w2: float) -> tuple[float, float]:
    if w1 < 0.0 or (w1 == 0.0 and w2 < 0.0):
        return -w1, -w2
    return w1, w2


def threshold_block(lam_abs: float, factor: float = ENERGY_NEGLECT_FACTOR) -> int:
    """Smallest n >= 1 with 4^n kappa0^2 >= factor * |lambda|."""
    n = 1
    while 4.0 ** n * pot.KAPPA0_SQ < factor * lam_abs:
        n += 1
    return n


def boundary_vector(spec: pot.PotentialSpec, sigma: float, lam: float,
                    tol: float = 1e-12, n_max: int | None = None) -> BoundaryVector:
    """Admissible unit ray at sigma: normalized limit of (W22, -W21).

    The iteration deepens the endpoint one block at a time and stops when the
    energy-neglect gate holds and the normalized ray moved by less than tol.
    A non-converged result is returned flagged, never silently.
    """
    if n_max is None:
        n_max = spec.n_blocks
    if n_max > spec.n_blocks:
        raise ValueError(f"n_max={n_max} exceeds constructed blocks {spec.n_blocks}")
    if sigma < spec.sigma_min:
        raise pot.RangeError(f"sigma={sigma} below constructed range")

    # first block boundary at or below sigma
    n0 = 0
    while 2.0 ** (-n0) > sigma:
        n0 += 1
    if 2.0 ** (-n0) == sigma:
        acc = (np.float64(1.0), np.float64(0.0), np.float64(0.0), np.float64(1.0),
               np.float64(0.0))
    else:
        t = transfer(spec, sigma, 2.0 ** (-n0), lam)
        acc = (np.float64(t.m11), np.float64(t.m12), np.float64(t.m21),
               np.float64(t.m22), np.float64(t.log_scale))

    w_prev = None
    w1 = w2 = 0.0
    residual = math.inf
    n = n0
    while n < n_max:
        n += 1
        acc = multiply_entries(block_entries(n, lam), acc)
        w1, w2 = _standalone_sign(float(acc[3]), -float(acc[2]))
        h = math.hypot(w1, w2)
        w1, w2 = w1 / h, w2 / h
        if w_prev is not None:
            residual = min(math.hypot(w1 - w_prev[0], w2 - w_prev[1]),
                           math.hypot(w1 + w_prev[0], w2 + w_prev[1]))
            if residual < tol and 4.0 ** n * pot.KAPPA0_SQ >= ENERGY_NEGLECT_FACTOR * abs(lam):
                return BoundaryVector(w1, w2, n, True, residual)
        w_prev = (w1, w2)
    return BoundaryVector(w1, w2, n, False, residual)


def covector_table(lam, n_top: int, n_deep: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Unit annihilator covectors c_n at boundaries 2^-n, n = n_top..n_deep.

    c_n is the renormalized limit of row 2 of the transfer from 2^-n to
    2^-N; data (psi, psi') at 2^-n is admissible iff c_n . (psi, psi') = 0,
    so the admissible ray there is (c_n[1], -c_n[0]).  Built by one upward
    sweep of the exact recursion c_(n-1) = c_n . B_n seeded with (0, 1) at
    n_deep; the seeding error contracts by ~16 per upward block.

    Vectorized over a lambda array; returns a list indexed by n (entries
    below n_top are None).
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    c1 = np.zeros(lam.shape)
    c2 = np.ones_like(c1)
    table: list = [None] * (n_deep + 1)
    table[n_deep] = (c1.copy(), c2.copy())
    for n in range(n_deep, n_top, -1):
        b11, b12, b21, b22, _ = block_entries(n, lam)
        d1 = c1 * b11 + c2 * b21
        d2 = c1 * b12 + c2 * b22
        h = np.hypot(d1, d2)
        c1, c2 = d1 / h, d2 / h
        table[n - 1] = (c1.copy(), c2.copy())
    return table


def admissible_rays(lam, n_top: int = 0, extra_blocks: int = 8) -> list[tuple[np.ndarray, np.ndarray]]:
    """Admissible unit rays at block boundaries n = n_top.. for a lambda array.

    Sign follows the upward recursion (continuous in lambda and n); no
    standalone convention is applied.
    """
    lam = np.asarray(lam, dtype=float)
    lam_abs = float(np.max(np.abs(lam))) if lam.size else 0.0
    n_deep = threshold_block(lam_abs) + extra_blocks
    table = covector_table(lam, n_top, n_deep)
    rays: list = [None] * len(table)
    for n, c in enumerate(table):
        if c is not None:
            rays[n] = (c[1], -c[0])
    return rays


# ---------------------------------------------------------------------------
# zero-energy profiles


@dataclass(frozen=True)
class ProfileSamples:
    """Dense samples of a zero-energy profile plus per-block diagnostics."""

    kind: str
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    block_peaks: np.ndarray
    partial_norms: np.ndarray


_PROFILE_SEEDS = {"zeta": (0.0, 1.0), "phi": (1.0, 0.0)}


def asymptotic_profile(spec: pot.PotentialSpec, kind: str, n_blocks_out: int,
                       samples_per_segment: int = 64) -> ProfileSamples:
    """Integrate the zero-energy equation leftward from sigma = 1.

    kind 'zeta' starts from (0, 1) (vanishing value, unit slope) and grows;
    kind 'phi' starts from (1, 0) (unit value, flat) and decays.  Segments
    are solved in closed form; partial norms accumulate the exact
    per-segment integrals from sigma = 1 down to each block boundary.
    """
    if kind not in _PROFILE_SEEDS:
        raise ValueError(f"kind must be 'zeta' or 'phi', got {kind!r}")
    if n_blocks_out < 1 or samples_per_segment < 1:
        raise ValueError("counts must be >= 1")
    if n_blocks_out > spec.n_blocks:
        raise ValueError("n_blocks_out exceeds constructed blocks")

    u = np.array(_PROFILE_SEEDS[kind])
    log_amp = 0.0
    grid_parts, val_parts, der_parts = [], [], []
    peaks, norms = [], []
    acc_norm = 0.0
    for n in range(1, n_blocks_out + 1):
        right = pot.block_right(n)
        amp_block = 0.0
        for ksq, width, seg_right in (
            (pot.stage_a_kappa_sq(n), pot.stage_a_width(n), right),
            (pot.stage_b_kappa_sq(n), pot.stage_b_width(n), pot.block_mid(n)),
        ):
            offs = width * np.arange(samples_per_segment) / samples_per_segment
            e = matrix_entries(ksq, 0.0, -offs)
            scale = math.exp(log_amp)
            grid_parts.append(seg_right - offs)
            val_parts.append((e[0] * u[0] + e[1] * u[1]) * scale)
            der_parts.append((e[2] * u[0] + e[3] * u[1]) * scale)
            # harmonic amplitude of this segment; at lambda = 0 each stage
            # spans >= pi/2 ending at an extremum, so the crest is attained
            amp_block = max(amp_block, math.hypot(u[0], u[1] / math.sqrt(ksq)) * scale)
            acc_norm += segment_norm_integral(ksq, 0.0, u[0], u[1], width) * scale ** 2
            v1, v2, la = apply_entries(matrix_entries(ksq, 0.0, -width), u[0], u[1])
            u = np.array([float(v1), float(v2)])
            log_amp += float(la)
        peaks.append(amp_block)
        norms.append(acc_norm)
    # close the grid at the final block boundary
    scale = math.exp(log_amp)
    grid_parts.append(np.array([pot.block_left(n_blocks_out)]))
    val_parts.append(np.array([u[0] * scale]))
    der_parts.append(np.array([u[1] * scale]))
    return ProfileSamples(
        kind=kind,
        grid=np.concatenate(grid_parts),
        values=np.concatenate(val_parts),
        derivs=np.concatenate(der_parts),
        block_peaks=np.array(peaks),
        partial_norms=np.array(norms),
    )


def probability_current(psi, dpsi):
    """Im(conj(psi) * dpsi); the hbar/m prefactor lives in the unit layer."""
    out = np.imag(np.conjugate(psi) * dpsi)
    return float(out) if np.ndim(out) == 0 else out
