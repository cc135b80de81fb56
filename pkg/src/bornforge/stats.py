"""Small statistical toolbox shared by geometry and experiments.

Kept dependency-free on purpose: the chi-square tail uses the
Wilson-Hilferty cube-root normal approximation (good to ~1e-3 in p for
dof >= 3) and the normal quantile uses Acklam's rational approximation,
so no incomplete-gamma / special-function library is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySample,
    InvalidCount,
    ZeroExpected,
)


@dataclass(frozen=True)
class FrequencyTable:
    """Per-outcome tallies and their total."""

    counts: tuple[int, ...]
    total: int

    @classmethod
    def from_counts(cls, counts) -> "FrequencyTable":
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise InvalidCount("counts must be nonnegative")
        return cls(counts=counts, total=sum(counts))

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise InvalidCount("no observations tallied")
        return np.asarray(self.counts, dtype=np.float64) / self.total


# Acklam's inverse-normal-CDF approximation, |rel err| < 1.2e-9.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile requested at p={p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        return -normal_quantile(1.0 - p)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def normal_sf(z: float) -> float:
    """Upper tail of the standard normal CDF."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total < 1 or not 0 <= successes <= total:
        raise InvalidCount(f"successes={successes}, total={total}")
    if not 0.0 < confidence < 1.0:
        raise InvalidCount(f"confidence={confidence} outside (0, 1)")
    z = normal_quantile(0.5 + confidence / 2.0)
    phat = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (phat + z2 / (2 * total)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / total + z2 / (4 * total * total))
    return max(0.0, center - half), min(1.0, center + half)


def chi_square(counts, expected) -> tuple[float, int, float]:
    """Goodness-of-fit statistic, dof = bins - 1, Wilson-Hilferty p."""
    counts = np.asarray(counts, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if counts.shape != expected.shape or counts.ndim != 1:
        raise DimensionMismatch(f"{counts.shape} counts vs {expected.shape} expected")
    if np.any(expected <= 0.0):
        raise ZeroExpected("expected counts must all be positive")
    stat = float(((counts - expected) ** 2 / expected).sum())
    dof = counts.shape[0] - 1
    return stat, dof, chi_square_sf(stat, dof)


def chi_square_sf(stat: float, dof: int) -> float:
    """Wilson-Hilferty upper-tail probability for a chi-square stat."""
    if dof < 1:
        raise ZeroExpected(f"dof must be >= 1, got {dof}")
    if stat <= 0.0:
        return 1.0
    c = 2.0 / (9.0 * dof)
    z = ((stat / dof) ** (1.0 / 3.0) - (1.0 - c)) / math.sqrt(c)
    return normal_sf(z)


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance of sorted samples to a CDF."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptySample("KS statistic needs at least one sample")
    m = samples.size
    f = np.asarray(cdf(samples), dtype=np.float64)
    grid = np.arange(1, m + 1) / m
    d_plus = float((grid - f).max())
    d_minus = float((f - (grid - 1.0 / m)).max())
    return max(d_plus, d_minus)


def ks_critical_value(m: int, alpha: float = 0.001) -> float:
    """Asymptotic two-sided KS critical value at significance alpha."""
    if m < 1:
        raise EmptySample("sample size must be >= 1")
    return math.sqrt(-math.log(alpha / 2.0) / (2.0 * m))


def total_variation(p, q) -> float:
    """Half the L1 distance between two probability vectors."""
    pv = np.asarray(getattr(p, "t", p), dtype=np.float64)
    qv = np.asarray(getattr(q, "t", q), dtype=np.float64)
    if pv.shape != qv.shape:
        raise DimensionMismatch(f"{pv.shape} vs {qv.shape}")
    return 0.5 * float(np.abs(pv - qv).sum())
