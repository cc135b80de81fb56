"""State types for the two observation models.

The real model lives on the standard (n-1)-simplex: a state is a
probability vector. The complex model lives on the unit sphere of C^n:
a state is a unit-norm amplitude vector. Frames (orthonormal bases) and
unitary maps connect coefficient descriptions of the complex model, and
``omega`` sends amplitude vectors onto the simplex.

Vectors within EPS_NORM of normalization are renormalized exactly at
construction, so downstream code may assume exact normalization.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeComponent,
    NotNormalized,
    NotOrthonormal,
    NotUnitary,
    ZeroVector,
)

EPS_NORM = 1e-9
EPS_ORTH = 1e-9
EPS_RECON = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class OutcomeSet:
    """n >= 2 distinct outcome labels."""

    n: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise DimensionMismatch(f"need at least 2 outcomes, got {self.n}")
        labels = self.labels or tuple(f"x{i + 1}" for i in range(self.n))
        if len(labels) != self.n:
            raise DimensionMismatch(
                f"{len(labels)} labels for {self.n} outcomes"
            )
        if len(set(labels)) != self.n:
            raise ValueError("outcome labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class MixtureState:
    """Point of the standard simplex: t_i >= 0, sum t_i = 1."""

    t: np.ndarray

    @property
    def n(self) -> int:
        return self.t.shape[0]

    def to_json(self) -> list[float]:
        return [float(x) for x in self.t]


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector."""

    q: np.ndarray

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def to_json(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.q]


def validate_mixture(raw) -> MixtureState:
    """Validate and exactly renormalize a probability vector.

    Raises NegativeComponent for entries below -EPS_NORM and
    NotNormalized when the sum is off by more than EPS_NORM.
    """
    t = np.asarray(raw, dtype=np.float64).reshape(-1)
    if t.shape[0] < 2:
        raise DimensionMismatch(f"need dimension >= 2, got {t.shape[0]}")
    if np.any(t < -EPS_NORM):
        raise NegativeComponent(f"negative component in {t.tolist()}")
    t = np.clip(t, 0.0, None)
    total = float(t.sum())
    if abs(total - 1.0) > EPS_NORM:
        raise NotNormalized(f"components sum to {total}, not 1")
    return MixtureState(_frozen(t / total))


def validate_pure(raw, strict: bool = False) -> PureState:
    """Validate and renormalize a complex amplitude vector.

    Raises ZeroVector for numerically zero input. With strict=True the
    norm must already be within EPS_NORM of one.
    """
    q = np.asarray(raw, dtype=np.complex128).reshape(-1)
    if q.shape[0] < 2:
        raise DimensionMismatch(f"need dimension >= 2, got {q.shape[0]}")
    norm = float(np.linalg.norm(q))
    if norm < EPS_NORM:
        raise ZeroVector("amplitude vector has zero norm")
    if strict and abs(norm - 1.0) > EPS_NORM:
        raise NotNormalized(f"norm is {norm}, not 1")
    return PureState(_frozen(q / norm))


def mixture_from_json(obj) -> MixtureState:
    """Parse the shared JSON format for real states: [t1, ..., tn]."""
    return validate_mixture(obj)


def pure_from_json(obj, strict: bool = False) -> PureState:
    """Parse the shared JSON format for complex states: [[re, im], ...]."""
    pairs = np.asarray(obj, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DimensionMismatch(
            "complex state JSON must be a list of [re, im] pairs"
        )
    return validate_pure(pairs[:, 0] + 1j * pairs[:, 1], strict=strict)


@dataclass(frozen=True)
class Frame:
    """Complete orthonormal basis of C^n; rows are the basis vectors."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionMismatch(f"frame must be n x n, got {b.shape}")
        gram = b.conj() @ b.T
        if not np.allclose(gram, np.eye(b.shape[0]), atol=EPS_ORTH):
            raise NotOrthonormal("frame vectors are not orthonormal")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def computational(cls, n: int) -> "Frame":
        return cls(np.eye(n, dtype=np.complex128))


@dataclass(frozen=True)
class UnitaryMap:
    """n x n matrix with U^dagger U = I (entrywise within EPS_ORTH)."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatch(f"unitary must be n x n, got {u.shape}")
        if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=EPS_ORTH):
            raise NotUnitary("U^dagger U deviates from the identity")
        object.__setattr__(self, "matrix", _frozen(u))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def omega(q: PureState) -> MixtureState:
    """Componentwise product with the conjugate: z -> (z_k z_k*)_k.

    Sends the complex unit sphere onto the simplex; the pushforward of
    the rotation-invariant sphere measure is the flat simplex measure.
    """
    return validate_mixture(np.real(q.q * q.q.conj()))


def coefficients_in_frame(q: PureState, frame: Frame) -> np.ndarray:
    """Coefficient vector (<b_i, q>)_i of q in the given frame."""
    if q.n != frame.n:
        raise DimensionMismatch(f"state dim {q.n} vs frame dim {frame.n}")
    return frame.basis.conj() @ q.q


def born_probabilities(q: PureState, frame: Frame) -> MixtureState:
    """Outcome distribution (|<b_i, q>|^2)_i for a state in a frame."""
    c = coefficients_in_frame(q, frame)
    return validate_mixture(np.real(c * c.conj()))


def apply_unitary(u: UnitaryMap, q: PureState) -> PureState:
    """Image Uq, renormalized against accumulated rounding."""
    if u.n != q.n:
        raise DimensionMismatch(f"unitary dim {u.n} vs state dim {q.n}")
    return validate_pure(u.matrix @ q.q)
