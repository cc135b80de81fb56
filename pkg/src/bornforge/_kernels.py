"""Hot decision kernels: numba @njit with a pure-numpy fallback.

The per-trial work is an argmax over likelihood ratios num_k/den_k,
compared by cross-multiplication (num_k*den_j vs num_j*den_k) so that
zero and infinite ratios are exact. Components with num_k == 0 have
ratio exactly 0 and never win.

Backend selection is per call via the BORNFORGE_BACKEND env var:
"numba" (require jit), "numpy" (force fallback), anything else or unset
resolves to numba when importable. Both backends perform identical
float operations, so outcomes agree bit-for-bit.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import AllRatiosZero, DimensionMismatch

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def active_backend() -> str:
    """Resolve the backend for the current call: 'numba' or 'numpy'."""
    choice = os.environ.get("BORNFORGE_BACKEND", "auto").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("BORNFORGE_BACKEND=numba but numba is unavailable")
        return "numba"
    return "numba" if HAS_NUMBA else "numpy"


@njit(cache=True, nogil=True)
def _decide_fixed_nb(nums, obs, outcomes, tied):
    trials, n = obs.shape
    for b in range(trials):
        m = 0
        for k in range(1, n):
            if nums[k] > 0.0 and (
                nums[m] == 0.0 or nums[k] * obs[b, m] > nums[m] * obs[b, k]
            ):
                m = k
        ties = 0
        for j in range(n):
            if nums[j] > 0.0 and nums[j] * obs[b, m] == nums[m] * obs[b, j]:
                ties += 1
        outcomes[b] = m
        tied[b] = ties > 1


@njit(cache=True, nogil=True)
def _decide_rows_nb(nums, obs, outcomes, tied):
    trials, n = obs.shape
    for b in range(trials):
        m = 0
        for k in range(1, n):
            if nums[b, k] > 0.0 and (
                nums[b, m] == 0.0
                or nums[b, k] * obs[b, m] > nums[b, m] * obs[b, k]
            ):
                m = k
        ties = 0
        for j in range(n):
            if (
                nums[b, j] > 0.0
                and nums[b, j] * obs[b, m] == nums[b, m] * obs[b, j]
            ):
                ties += 1
        outcomes[b] = m
        tied[b] = ties > 1


def _decide_np(nums, obs):
    # P[b, k, j] = num_k * den_{b,j}; k beats j iff P[b,k,j] > P[b,j,k],
    # with zero-numerator components losing to any positive one.
    if nums.ndim == 2:
        p = nums[:, :, None] * obs[:, None, :]
        pos = nums > 0.0
        beats = pos[:, :, None] & (~pos[:, None, :] | (p > p.swapaxes(1, 2)))
    else:
        p = nums[None, :, None] * obs[:, None, :]
        pos = nums > 0.0
        beats = pos[None, :, None] & (~pos[None, None, :] | (p > p.swapaxes(1, 2)))
    maximal = ~beats.any(axis=1)
    outcomes = maximal.argmax(axis=1).astype(np.int64)
    tied = maximal.sum(axis=1) > 1
    return outcomes, tied


def decide_batch(nums: np.ndarray, obs: np.ndarray):
    """Argmax decisions for a fixed numerator vector over observer rows.

    Returns (outcomes int64 (B,), tied bool (B,)); ties report the
    lowest index among the maxima.
    """
    nums = np.ascontiguousarray(nums, dtype=np.float64)
    obs = np.ascontiguousarray(obs, dtype=np.float64)
    if nums.ndim != 1 or obs.ndim != 2 or obs.shape[1] != nums.shape[0]:
        raise DimensionMismatch(
            f"nums {nums.shape} incompatible with observers {obs.shape}"
        )
    if not np.any(nums > 0.0):
        raise AllRatiosZero("system state assigns zero mass to every outcome")
    if active_backend() == "numba":
        outcomes = np.empty(obs.shape[0], dtype=np.int64)
        tied = np.empty(obs.shape[0], dtype=np.bool_)
        _decide_fixed_nb(nums, obs, outcomes, tied)
        return outcomes, tied
    return _decide_np(nums, obs)


def decide_batch_rows(nums: np.ndarray, obs: np.ndarray):
    """As decide_batch but with a per-row numerator matrix (mixtures)."""
    nums = np.ascontiguousarray(nums, dtype=np.float64)
    obs = np.ascontiguousarray(obs, dtype=np.float64)
    if nums.shape != obs.shape or nums.ndim != 2:
        raise DimensionMismatch(
            f"numerators {nums.shape} must match observers {obs.shape}"
        )
    if not np.all(np.any(nums > 0.0, axis=1)):
        raise AllRatiosZero("a row assigns zero mass to every outcome")
    if active_backend() == "numba":
        outcomes = np.empty(obs.shape[0], dtype=np.int64)
        tied = np.empty(obs.shape[0], dtype=np.bool_)
        _decide_rows_nb(nums, obs, outcomes, tied)
        return outcomes, tied
    return _decide_np(nums, obs)


def warmup() -> None:
    """Trigger JIT compilation so timing/benchmark runs start hot."""
    if HAS_NUMBA:
        nums = np.array([0.5, 0.5])
        obs = np.array([[0.4, 0.6]])
        out = np.empty(1, dtype=np.int64)
        tied = np.empty(1, dtype=np.bool_)
        _decide_fixed_nb(nums, obs, out, tied)
        _decide_rows_nb(obs, obs, out, tied)
