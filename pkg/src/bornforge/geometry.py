"""Eigenset measures, simplex volumes, and measure-preservation checks.

Two independent routes compute the measure of the decision region for
outcome k given a simplex state t: the analytic value (t_k) and an
edge-Gram determinant volume ratio. Monte Carlo estimates give a third
route that also covers the complex model, where the regions can only be
measured through sampling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import stats
from ._kernels import decide_batch
from .errors import (
    DegenerateSimplex,
    DimensionMismatch,
    IndexOutOfRange,
    InsufficientSamples,
    SingularMap,
)
from .sampling import (
    _rng,
    uniform_complex_sphere_batch,
    uniform_simplex_batch,
)
from .states import MixtureState, PureState

_BATCH = 1 << 16
_MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte Carlo measure in [0, 1] with binomial standard error."""

    value: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class UniformityReport:
    """Chi-square over equal-measure cells plus per-coordinate KS."""

    chi_square: float
    dof: int
    p_value: float
    ks_marginals: tuple[float, ...]
    ks_critical: float
    samples: int
    bins: int


@dataclass(frozen=True)
class DetScalingReport:
    """Hit-count comparison of a region's measure with its linear image."""

    det: float
    measure_original: float
    measure_image: float
    expected_image: float
    z: float
    samples: int


def eigenset_measure_analytic(system: MixtureState, k: int) -> float:
    """Exact measure of the decision region for outcome k: t_k."""
    if not 0 <= k < system.n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{system.n - 1}")
    return float(system.t[k])


def _vertices_with_apex(apex: np.ndarray, k: int) -> np.ndarray:
    v = np.eye(apex.shape[0])
    v[k] = apex
    return v


def _gram_volume_sq(vertices: np.ndarray) -> float:
    edges = vertices[:-1] - vertices[-1]
    return float(np.linalg.det(edges @ edges.T))


def simplex_volume_ratio(apex_replacement: MixtureState, k: int, n: int) -> float:
    """Volume of the simplex with vertex k replaced by the given point,
    relative to the standard simplex, via edge-Gram determinants.

    Agrees with eigenset_measure_analytic to well below 1e-10.
    """
    if apex_replacement.n != n:
        raise DimensionMismatch(f"point dim {apex_replacement.n}, expected {n}")
    if not 0 <= k < n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{n - 1}")
    modified = _gram_volume_sq(_vertices_with_apex(apex_replacement.t, k))
    standard = _gram_volume_sq(np.eye(n))
    if modified < (1e-12) ** 2 * standard:
        raise DegenerateSimplex(
            f"volume ratio below 1e-12 for component {k}"
        )
    return float(np.sqrt(modified / standard))


def eigenset_measure_mc(
    system: Union[MixtureState, PureState], k: int, samples: int, rng
) -> VolumeEstimate:
    """Fraction of uniformly drawn observer states deciding outcome k."""
    if not 0 <= k < system.n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{system.n - 1}")
    if samples < 1:
        raise InsufficientSamples("need at least one sample")
    complex_model = isinstance(system, PureState)
    nums = np.abs(system.q) if complex_model else system.t
    gen = _rng(rng)
    hits = 0
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        if complex_model:
            obs = np.abs(uniform_complex_sphere_batch(system.n, b, gen))
        else:
            obs = uniform_simplex_batch(system.n, b, gen)
        outcomes, _ = decide_batch(nums, obs)
        hits += int((outcomes == k).sum())
        done += b
    value = hits / samples
    return VolumeEstimate(
        value=value,
        stderr=float(np.sqrt(value * (1.0 - value) / samples)),
        samples=samples,
    )


def simplex_to_cube(points: np.ndarray) -> np.ndarray:
    """Map flat-Dirichlet points to uniform points on [0,1]^(n-1) by the
    chain of conditional Beta CDFs along the coordinates."""
    points = np.atleast_2d(points)
    count, n = points.shape
    u = np.empty((count, n - 1))
    rem = np.ones(count)
    for d in range(n - 1):
        y = np.clip(points[:, d] / np.where(rem > 0, rem, 1.0), 0.0, 1.0)
        e = n - 1 - d
        u[:, d] = y if e == 1 else 1.0 - (1.0 - y) ** e
        rem = rem - points[:, d]
    return u


def _axis_bin_counts(bins: int, axes: int) -> list[int]:
    factors = []
    b = bins
    d = 2
    while d * d <= b:
        while b % d == 0:
            factors.append(d)
            b //= d
        d += 1
    if b > 1:
        factors.append(b)
    counts = [1] * axes
    for f in sorted(factors, reverse=True):
        counts[int(np.argmin(counts))] *= f
    return counts


def equal_measure_cells(points: np.ndarray, bins: int) -> np.ndarray:
    """Cell index in 0..bins-1 for each point, with every cell carrying
    the same flat-Dirichlet mass (product binning on the cube image)."""
    u = simplex_to_cube(points)
    axis_bins = _axis_bin_counts(bins, u.shape[1])
    idx = np.zeros(u.shape[0], dtype=np.int64)
    for d, m in enumerate(axis_bins):
        part = np.minimum((u[:, d] * m).astype(np.int64), m - 1)
        idx = idx * m + part
    return idx


def uniformity_report(points: np.ndarray, bins: int) -> UniformityReport:
    """Test a point cloud on the simplex against the flat measure."""
    points = np.atleast_2d(points)
    count, n = points.shape
    if count < 10 * bins:
        raise InsufficientSamples(f"{count} samples for {bins} bins (need 10x)")
    cells = equal_measure_cells(points, bins)
    observed = np.bincount(cells, minlength=bins).astype(np.float64)
    expected = np.full(bins, count / bins)
    stat, dof, p = stats.chi_square(observed, expected)
    exponent = n - 1
    ks = tuple(
        stats.ks_statistic(
            np.sort(points[:, d]), lambda x: 1.0 - (1.0 - x) ** exponent
        )
        for d in range(n)
    )
    return UniformityReport(
        chi_square=stat,
        dof=dof,
        p_value=p,
        ks_marginals=ks,
        ks_critical=stats.ks_critical_value(count),
        samples=count,
        bins=bins,
    )


def verify_omega_pushforward(n: int, samples: int, bins: int, rng) -> UniformityReport:
    """Draw sphere samples, push through omega, and test flatness."""
    if samples < 10 * bins:
        raise InsufficientSamples(f"{samples} samples for {bins} bins (need 10x)")
    gen = _rng(rng)
    z = uniform_complex_sphere_batch(n, samples, gen)
    points = np.real(z * z.conj())
    return uniformity_report(points, bins)


def barycentric_coordinates(points: np.ndarray, system: MixtureState, k: int) -> np.ndarray:
    """Coordinates of points w.r.t. the simplex whose vertex k is the
    system state; rows sum to 1 for points on the probability plane."""
    if not 0 <= k < system.n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{system.n - 1}")
    v = _vertices_with_apex(system.t, k).T
    if abs(float(np.linalg.det(v))) < 1e-12:
        raise DegenerateSimplex(f"system component {k} too small")
    return np.linalg.solve(v, np.atleast_2d(points).T).T


def det_scaling_check(
    system: MixtureState, k: int, scale_map, samples: int, rng
) -> DetScalingReport:
    """Compare the measure of the scaled decision cone against |det T|
    times the original measure, both by hit-counting in one box.

    The region is the solid cone under the vertex-k decision simplex,
    so its ambient n-dimensional measure transforms with the full
    determinant of the diagonal map.
    """
    diag = np.asarray(scale_map, dtype=np.float64).reshape(-1)
    if diag.shape[0] != system.n:
        raise DimensionMismatch(f"map dim {diag.shape[0]} vs state dim {system.n}")
    if np.any(diag <= 0.0):
        raise SingularMap("scale map entries must be positive")
    if not 0 <= k < system.n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{system.n - 1}")
    v = _vertices_with_apex(system.t, k).T
    det_v = abs(float(np.linalg.det(v)))
    if det_v < 1e-12:
        raise DegenerateSimplex(f"system component {k} too small")
    v_inv = np.linalg.inv(v)
    det = float(np.prod(diag))
    box_hi = np.maximum(1.0, diag)
    vol_box = float(np.prod(box_hi))
    gen = _rng(rng)

    def membership(x: np.ndarray) -> np.ndarray:
        c = x @ v_inv.T
        return (c >= -_MEMBERSHIP_TOL).all(axis=1) & (
            c.sum(axis=1) <= 1.0 + _MEMBERSHIP_TOL
        )

    in_orig = np.empty(samples, dtype=np.float64)
    in_image = np.empty(samples, dtype=np.float64)
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        x = gen.random((b, system.n)) * box_hi
        in_orig[done : done + b] = membership(x)
        in_image[done : done + b] = membership(x / diag)
        done += b
    diff = in_image - det * in_orig
    se = float(diff.std(ddof=1) / np.sqrt(samples))
    z = float(diff.mean() / se) if se > 0 else 0.0
    return DetScalingReport(
        det=det,
        measure_original=float(in_orig.mean() * vol_box),
        measure_image=float(in_image.mean() * vol_box),
        expected_image=float(det * in_orig.mean() * vol_box),
        z=z,
        samples=samples,
    )
