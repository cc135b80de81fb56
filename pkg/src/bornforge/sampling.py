"""Seeded observer-state samplers.

Streams are addressed by (seed, stream_index) and realized with the
counter-based Philox generator, so any (seed, stream) pair yields the
same sequence on every run and under any worker layout. Uniform batch
draws of size B consume the stream exactly like B successive single
draws; the rejection sampler consumes it in batch-internal order, so
identical call patterns give identical results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, KindMismatch, RejectionExhausted
from .states import Frame, MixtureState, PureState, UnitaryMap, validate_mixture, validate_pure

_MASK64 = (1 << 64) - 1
_MAX_CONSECUTIVE_REJECTIONS = 10**6

ObserverState = Union[MixtureState, PureState]


@dataclass(frozen=True)
class RngStream:
    """Address of an independent random stream."""

    seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed & _MASK64, self.stream_index & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SamplerSpec:
    """Observer-state distribution: uniform, or uniform plus an
    epsilon-ball component around `center` carrying `weight` mass."""

    kind: str = "uniform"
    center: Optional[ObserverState] = None
    epsilon: float = 0.0
    weight: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "epsilon_concentrated"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.kind == "epsilon_concentrated":
            if self.center is None:
                raise ValueError("epsilon_concentrated sampler needs a center")
            if not self.epsilon > 0.0:
                raise ValueError("epsilon must be positive")
            if not 0.0 <= self.weight <= 1.0:
                raise ValueError("weight must lie in [0, 1]")


def _rng(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def uniform_simplex_batch(n: int, count: int, rng) -> np.ndarray:
    """(count, n) flat-Dirichlet samples via normalized exponentials."""
    gen = _rng(rng)
    g = gen.standard_exponential((count, n))
    return g / g.sum(axis=1, keepdims=True)


def uniform_simplex(n: int, rng) -> MixtureState:
    """One sample from the normalized Lebesgue measure on the simplex."""
    return validate_mixture(uniform_simplex_batch(n, 1, rng)[0])


def uniform_complex_sphere_batch(n: int, count: int, rng) -> np.ndarray:
    """(count, n) complex rows uniform on the unit sphere of C^n."""
    gen = _rng(rng)
    parts = gen.standard_normal((count, 2, n))
    z = parts[:, 0, :] + 1j * parts[:, 1, :]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def uniform_complex_sphere(n: int, rng) -> PureState:
    """One sample from the rotation-invariant sphere measure."""
    return validate_pure(uniform_complex_sphere_batch(n, 1, rng)[0])


def phase_fix(z: np.ndarray) -> np.ndarray:
    """Rotate each row's global phase so its largest-modulus component
    is real nonnegative (projective representative for distances)."""
    z = np.atleast_2d(z)
    idx = np.abs(z).argmax(axis=1)
    lead = z[np.arange(z.shape[0]), idx]
    mod = np.abs(lead)
    phase = np.where(mod > 0, lead / np.where(mod > 0, mod, 1.0), 1.0)
    return z * phase.conj()[:, None]


def _distances(batch: np.ndarray, center: np.ndarray, complex_model: bool) -> np.ndarray:
    if complex_model:
        diff = phase_fix(batch) - phase_fix(center[None, :])[0]
        return np.linalg.norm(diff, axis=1)
    return np.linalg.norm(batch - center[None, :], axis=1)


def sample_observer_batch(spec: SamplerSpec, n: int, count: int, rng, complex_model: bool = False) -> np.ndarray:
    """(count, n) observer states per the sampler spec.

    epsilon_concentrated draws each sample from the uniform law with
    probability 1-weight and otherwise rejection-samples the uniform
    law restricted to the epsilon-ball around the center.
    """
    gen = _rng(rng)
    uniform = uniform_complex_sphere_batch if complex_model else uniform_simplex_batch
    if spec.kind == "uniform" or spec.weight == 0.0:
        return uniform(n, count, gen)

    center = spec.center
    if complex_model and not isinstance(center, PureState):
        raise KindMismatch("complex model needs a PureState center")
    if not complex_model and not isinstance(center, MixtureState):
        raise KindMismatch("real model needs a MixtureState center")
    c = center.q if complex_model else center.t
    if c.shape[0] != n:
        raise DimensionMismatch(f"center dim {c.shape[0]} vs requested {n}")

    concentrated = gen.random(count) < spec.weight
    out = uniform(n, count, gen)
    need = int(concentrated.sum())
    if need:
        accepted = np.empty((need, n), dtype=out.dtype)
        filled = 0
        rejected_run = 0
        while filled < need:
            chunk = uniform(n, max(need - filled, 1024), gen)
            ok = _distances(chunk, c, complex_model) <= spec.epsilon
            hits = chunk[ok]
            if hits.shape[0] == 0:
                rejected_run += chunk.shape[0]
                if rejected_run >= _MAX_CONSECUTIVE_REJECTIONS:
                    raise RejectionExhausted(
                        f"{rejected_run} consecutive rejections; epsilon too small"
                    )
                continue
            rejected_run = 0
            take = min(hits.shape[0], need - filled)
            accepted[filled : filled + take] = hits[:take]
            filled += take
        out[concentrated] = accepted
    return out


def sample_observer(spec: SamplerSpec, n: int, rng, complex_model: bool = False) -> ObserverState:
    """One observer state per the sampler spec."""
    row = sample_observer_batch(spec, n, 1, rng, complex_model=complex_model)[0]
    return validate_pure(row) if complex_model else validate_mixture(row)


def haar_unitary(n: int, rng) -> UnitaryMap:
    """Haar-distributed unitary via QR of a complex Gaussian matrix
    with the R-diagonal phases folded back in."""
    gen = _rng(rng)
    parts = gen.standard_normal((2, n, n))
    z = parts[0] + 1j * parts[1]
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return UnitaryMap(q * (d / np.abs(d))[None, :])


def random_frame(n: int, rng) -> Frame:
    """Frame whose vectors are the rows of a Haar-random unitary."""
    return Frame(haar_unitary(n, rng).matrix)
