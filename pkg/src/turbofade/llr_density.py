"""Discretized LLR densities: the bookkeeping half of density evolution.

A density lives on a uniform symmetric grid of bin centers. The bin count is
odd so that one center sits at exactly 0.0 (the erasure point mass) and the
two end bins double as the +/- saturation masses: every operation folds any
mass that leaves the window into them. Convolutions run over FFT on the
zero-padded grid and are re-windowed the same way.

All constructors and operations renormalize to unit mass and log the drift;
a density whose raw mass deviates by more than 1e-9 is a bug upstream.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import ndtr

_log = logging.getLogger(__name__)

DEFAULT_HALF_RANGE = 40.0
DEFAULT_BINS = 4095

_DRIFT_WARN = 1e-9


@dataclass(frozen=True, eq=True)
class LlrGrid:
    """Uniform symmetric grid of LLR bin centers.

    bins must be odd: center (bins-1)/2 is then exactly 0.0 and negation is a
    pure reversal of the mass vector. delta = 2*half_range/bins, so the end
    centers sit at +/-(half_range - delta/2).
    """

    half_range: float = DEFAULT_HALF_RANGE
    bins: int = DEFAULT_BINS

    def __post_init__(self) -> None:
        if not (self.half_range > 0):
            raise ValueError("half_range must be positive")
        if self.bins < 3 or self.bins % 2 == 0:
            raise ValueError("bins must be an odd integer >= 3")
        centers = (np.arange(self.bins) - self.zero_index) * self.delta
        centers.flags.writeable = False
        object.__setattr__(self, "_centers", centers)

    @property
    def delta(self) -> float:
        return 2.0 * self.half_range / self.bins

    @property
    def zero_index(self) -> int:
        return (self.bins - 1) // 2

    @property
    def centers(self) -> np.ndarray:
        return self._centers

    def index_of(self, values) -> np.ndarray:
        """Nearest-center bin index, end bins absorbing anything outside."""
        idx = np.rint(np.asarray(values, dtype=np.float64) / self.delta).astype(np.int64)
        return np.clip(idx + self.zero_index, 0, self.bins - 1)


class LlrDensity:
    """Probability masses over an LlrGrid. Immutable once constructed."""

    __slots__ = ("grid", "masses")

    def __init__(self, grid: LlrGrid, masses: np.ndarray, _checked: bool = False):
        masses = np.asarray(masses, dtype=np.float64)
        if masses.shape != (grid.bins,):
            raise ValueError(f"masses must have shape ({grid.bins},)")
        if not _checked:
            masses = _finish(masses.copy())
        masses.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "masses", masses)

    def __setattr__(self, name, value):
        raise AttributeError("LlrDensity is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def delta(cls, grid: LlrGrid, value: float = 0.0) -> "LlrDensity":
        masses = np.zeros(grid.bins)
        masses[grid.index_of(value)] = 1.0
        return cls(grid, masses, _checked=True)

    @classmethod
    def from_gaussian(cls, grid: LlrGrid, mean: float, variance: float) -> "LlrDensity":
        """Gaussian discretized by CDF differences; tails fold into end bins."""
        if variance < 0:
            raise ValueError("variance must be nonnegative")
        if variance == 0.0:
            return cls.delta(grid, mean)
        sd = np.sqrt(variance)
        inner_edges = grid.centers[:-1] + 0.5 * grid.delta
        cdf = ndtr((inner_edges - mean) / sd)
        masses = np.empty(grid.bins)
        masses[0] = cdf[0]
        masses[1:-1] = np.diff(cdf)
        masses[-1] = 1.0 - cdf[-1]
        return cls(grid, _finish(masses), _checked=True)

    @classmethod
    def from_samples(cls, grid: LlrGrid, samples: np.ndarray) -> "LlrDensity":
        samples = np.asarray(samples, dtype=np.float64).ravel()
        if samples.size == 0:
            raise ValueError("need at least one sample")
        counts = np.bincount(grid.index_of(samples), minlength=grid.bins)
        return cls(grid, counts / samples.size, _checked=True)

    @classmethod
    def mixture(cls, parts, weights) -> "LlrDensity":
        parts = list(parts)
        weights = np.asarray(list(weights), dtype=np.float64)
        if len(parts) != weights.size or not parts:
            raise ValueError("parts and weights must be equal-length and nonempty")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        grid = parts[0].grid
        if any(p.grid != grid for p in parts):
            raise ValueError("all parts must share one grid")
        acc = np.zeros(grid.bins)
        for p, w in zip(parts, weights):
            acc += w * p.masses
        return cls(grid, _finish(acc), _checked=True)

    # ---- algebra -------------------------------------------------------

    def convolve(self, other: "LlrDensity") -> "LlrDensity":
        if other.grid != self.grid:
            raise ValueError("operands must share one grid")
        full = fftconvolve(self.masses, other.masses)
        return LlrDensity(self.grid, _rewindow(full, self.grid), _checked=True)

    def convolve_power(self, n: int) -> "LlrDensity":
        """n-fold self-convolution; n=0 is the delta at 0."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        out = LlrDensity.delta(self.grid)
        for _ in range(n):
            out = out.convolve(self)
        return out

    def negated(self) -> "LlrDensity":
        return LlrDensity(self.grid, self.masses[::-1].copy(), _checked=True)

    # ---- functionals ---------------------------------------------------

    def error_probability(self) -> float:
        """Mass below zero plus half the mass at exactly zero."""
        z = self.grid.zero_index
        return float(self.masses[:z].sum() + 0.5 * self.masses[z])

    def mean(self) -> float:
        return float(self.masses @ self.grid.centers)

    def variance(self) -> float:
        m = self.mean()
        return float(self.masses @ (self.grid.centers - m) ** 2)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draw of bin-center values."""
        cum = np.cumsum(self.masses)
        idx = np.searchsorted(cum, rng.random(size), side="right")
        return self.grid.centers[np.minimum(idx, self.grid.bins - 1)]

    def total_mass(self) -> float:
        return float(self.masses.sum())


def _finish(masses: np.ndarray) -> np.ndarray:
    """Clip FFT crumbs, renormalize, log drift; masses become read-only."""
    np.clip(masses, 0.0, None, out=masses)
    total = masses.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise ValueError("density mass is not positive and finite")
    drift = abs(total - 1.0)
    if drift > _DRIFT_WARN:
        _log.warning("density mass drifted by %.3e before renormalization", drift)
    elif drift > 1e-12:
        _log.debug("density mass drift %.3e", drift)
    masses /= total
    masses.flags.writeable = False
    return masses


def _rewindow(full: np.ndarray, grid: LlrGrid) -> np.ndarray:
    """Fold a full-length convolution back onto the grid.

    Index m of the full (2B-1)-length result carries value (m - 2z)*delta, so
    the window [z, z+B-1] maps onto the grid and everything outside lands in
    the saturation bins.
    """
    z = grid.zero_index
    out = full[z:z + grid.bins].copy()
    out[0] += full[:z].sum()
    out[-1] += full[z + grid.bins:].sum()
    return _finish(out)


def bitnode_update(channel: LlrDensity, extrinsic: LlrDensity, degree: int) -> LlrDensity:
    """A-priori density of a degree-d repeater bit: channel convolved with extrinsic^(d-1)."""
    if degree < 2:
        raise ValueError("degree must be at least 2")
    return channel.convolve(extrinsic.convolve_power(degree - 1))
