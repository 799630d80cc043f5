"""Segment decomposition of the self-similar cliff potential.

The cliff occupies the dimensionless interval (0, 1].  It is a sequence of
blocks: block n covers (2^-n, 2^(1-n)] and holds two constant-wavenumber
stages.  Stage A (outer, 3/4 of the local period) has kappa = 2^(n-1)*kappa0;
stage B (inner, 1/4 of the quadrupled-strength period) has
kappa = 2^(n+1)*kappa0.  Requiring each block to close exactly on the next
power of two fixes kappa0 = 13*pi/4, which makes the stage widths
(6/13)*2^(1-n) and (1/13)*2^-n.

Everything downstream works in the dimensionless variables
sigma = x/x0 and lambda = 2*m*E*x0^2/hbar^2; physical units enter only
through :class:`PhysicalParams` conversions.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterator

KAPPA0 = 13.0 * math.pi / 4.0
KAPPA0_SQ = KAPPA0 * KAPPA0

_STAGE_A_FRAC = 6.0 / 13.0   # stage-A width over the block's right edge
_MID_FRAC = 7.0 / 13.0       # stage boundary over the block's right edge


class RangeError(ValueError):
    """Position outside the constructed sigma range."""


@dataclass(frozen=True)
class PhysicalParams:
    """Physical scales (hbar, mass, cliff-edge position).

    Defaults give E = lambda, the convention used for the bound-state data
    products (hbar = 1, m = 1/2, x0 = 1).
    """

    hbar: float = 1.0
    mass: float = 0.5
    x0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar", "mass", "x0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    def lambda_from_energy(self, energy: float) -> float:
        return 2.0 * self.mass * energy * self.x0 ** 2 / self.hbar ** 2

    def energy_from_lambda(self, lam: float) -> float:
        return lam * self.hbar ** 2 / (2.0 * self.mass * self.x0 ** 2)


@dataclass(frozen=True)
class Segment:
    sigma_left: float
    sigma_right: float
    kappa_sq: float

    @property
    def width(self) -> float:
        return self.sigma_right - self.sigma_left


def block_right(n: int) -> float:
    return 2.0 ** (1 - n)


def block_mid(n: int) -> float:
    return _MID_FRAC * 2.0 ** (1 - n)


def block_left(n: int) -> float:
    return 2.0 ** (-n)


def stage_a_width(n: int) -> float:
    return _STAGE_A_FRAC * 2.0 ** (1 - n)


def stage_b_width(n: int) -> float:
    return 2.0 ** (-n) / 13.0


def stage_a_kappa_sq(n: int) -> float:
    return 4.0 ** (n - 1) * KAPPA0_SQ


def stage_b_kappa_sq(n: int) -> float:
    return 4.0 ** (n + 1) * KAPPA0_SQ


@dataclass(frozen=True)
class PotentialSpec:
    """Ordered segment list (rightmost first) covering (2^-n_blocks, 1]."""

    kappa0: float
    n_blocks: int
    segments: tuple[Segment, ...]
    # ascending breakpoints and aligned kappa^2 values, for O(log n) lookup
    _breaks: tuple[float, ...] = field(repr=False, default=())
    _values: tuple[float, ...] = field(repr=False, default=())

    @property
    def sigma_min(self) -> float:
        return 2.0 ** (-self.n_blocks)

    def __post_init__(self) -> None:
        if not self._breaks:
            breaks = [s.sigma_left for s in reversed(self.segments)]
            values = [s.kappa_sq for s in reversed(self.segments)]
            object.__setattr__(self, "_breaks", tuple(breaks))
            object.__setattr__(self, "_values", tuple(values))


def build_potential(n_blocks: int = 40) -> PotentialSpec:
    """Construct the exact segment decomposition down to sigma = 2^-n_blocks.

    Breakpoints come from the closed forms (never accumulated subtraction),
    so consecutive segments share edge values exactly.
    """
    if not isinstance(n_blocks, int) or n_blocks < 1:
        raise ValueError(f"n_blocks must be a positive integer, got {n_blocks}")
    segs = []
    for n in range(1, n_blocks + 1):
        segs.append(Segment(block_mid(n), block_right(n), stage_a_kappa_sq(n)))
        segs.append(Segment(block_left(n), block_mid(n), stage_b_kappa_sq(n)))
    return PotentialSpec(kappa0=KAPPA0, n_blocks=n_blocks, segments=tuple(segs))


def kappa_sq_at(spec: PotentialSpec, sigma: float) -> float:
    """kappa^2 at sigma, right-continuous at breakpoints; 0 in the free region."""
    if not math.isfinite(sigma):
        raise RangeError(f"sigma must be finite, got {sigma}")
    if sigma >= 1.0:
        return 0.0
    if sigma < spec.sigma_min:
        raise RangeError(
            f"sigma={sigma} below constructed range (min {spec.sigma_min})")
    i = bisect_right(spec._breaks, sigma) - 1
    return spec._values[i]


def physical_potential(params: PhysicalParams, spec: PotentialSpec, x: float) -> float:
    """V(x) = -(hbar^2 / (2 m x0^2)) * kappa^2(x / x0)."""
    ksq = kappa_sq_at(spec, x / params.x0)
    return -(params.hbar ** 2 / (2.0 * params.mass * params.x0 ** 2)) * ksq


def pieces_between(spec: PotentialSpec, sigma_hi: float, sigma_lo: float) -> Iterator[tuple[float, float, float]]:
    """Yield (kappa_sq, right, left) pieces covering [sigma_lo, sigma_hi], outermost first.

    Pieces are clipped to the requested interval; the free region above
    sigma = 1 is a single kappa = 0 piece.  Zero-width pieces are skipped.
    """
    if sigma_lo > sigma_hi:
        raise ValueError("sigma_lo must not exceed sigma_hi")
    if sigma_lo < spec.sigma_min:
        raise RangeError(
            f"sigma={sigma_lo} below constructed range (min {spec.sigma_min})")
    hi = sigma_hi
    if hi > 1.0:
        top = max(sigma_lo, 1.0)
        if hi > top:
            yield (0.0, hi, top)
        hi = top
    n = 1
    while hi > sigma_lo and n <= spec.n_blocks:
        right, mid, left = block_right(n), block_mid(n), block_left(n)
        if hi > left:
            a_hi, a_lo = min(hi, right), max(sigma_lo, mid)
            if a_hi > a_lo:
                yield (stage_a_kappa_sq(n), a_hi, a_lo)
            b_hi, b_lo = min(hi, mid), max(sigma_lo, left)
            if b_hi > b_lo:
                yield (stage_b_kappa_sq(n), b_hi, b_lo)
            hi = min(hi, left)
        n += 1
