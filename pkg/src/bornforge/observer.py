"""The maximum-likelihood-ratio decision engine.

Per trial, the observer registers the outcome whose likelihood ratio
(system weight over observer weight, componentwise) is maximal. Real
states compare t_k/r_k directly; complex states compare the moduli of
the coefficient vectors. All comparisons are done by cross
multiplication, never division, so 0 and infinity behave exactly:
a component the system cannot yield (numerator 0) is never chosen.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ._kernels import decide_batch
from .errors import (
    AllRatiosZero,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidBarycentric,
    KindMismatch,
)
from .states import EPS_NORM, MixtureState, PureState, validate_mixture, validate_pure

State = Union[MixtureState, PureState]


@dataclass(frozen=True)
class LikelihoodRatios:
    """Componentwise odds plus the magnitudes they were formed from.

    ratios[k] is numerators[k]/denominators[k] in the extended reals,
    with 0/x = 0 (including 0/0) and x/0 = inf for x > 0. Decisions
    never consume `ratios`; they cross-multiply the magnitudes.
    """

    ratios: np.ndarray
    numerators: np.ndarray
    denominators: np.ndarray
    model: str

    def born_level(self) -> "LikelihoodRatios":
        """Squared (Born-level) odds; decisions are unchanged because
        squaring is monotone on the nonnegative reals."""
        if self.model != "complex":
            raise KindMismatch("Born-level odds exist only in the complex model")
        return LikelihoodRatios(
            ratios=self.ratios**2,
            numerators=self.numerators**2,
            denominators=self.denominators**2,
            model="complex",
        )


@dataclass(frozen=True)
class Decision:
    """Chosen outcome plus tie metadata (lowest-index tie-break)."""

    outcome_index: int
    tied: bool
    tied_set: tuple[int, ...]


def _magnitudes(system: State, observer: State):
    if isinstance(system, MixtureState) and isinstance(observer, MixtureState):
        model = "real"
        num, den = system.t, observer.t
    elif isinstance(system, PureState) and isinstance(observer, PureState):
        model = "complex"
        num, den = np.abs(system.q), np.abs(observer.q)
    else:
        raise KindMismatch(
            f"cannot mix {type(system).__name__} with {type(observer).__name__}"
        )
    if num.shape[0] != den.shape[0]:
        raise DimensionMismatch(
            f"system dim {num.shape[0]} vs observer dim {den.shape[0]}"
        )
    return num, den, model


def _ratio_values(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = num / den
    return np.where(num == 0.0, 0.0, np.where(den == 0.0, np.inf, raw))


def likelihood_ratios(system: State, observer: State) -> LikelihoodRatios:
    """Odds vector for each outcome: system magnitude over observer's."""
    num, den, model = _magnitudes(system, observer)
    return LikelihoodRatios(
        ratios=_ratio_values(num, den), numerators=num, denominators=den, model=model
    )


def decide_magnitudes(num: np.ndarray, den: np.ndarray) -> Decision:
    """Decision core on raw nonnegative magnitude vectors."""
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    if num.shape != den.shape or num.ndim != 1:
        raise DimensionMismatch(f"shapes {num.shape} vs {den.shape}")
    outcomes, _ = decide_batch(num, den[None, :])
    m = int(outcomes[0])
    both_zero = (num == 0.0) & (num[m] == 0.0)
    cross_equal = (num > 0.0) & (num[m] > 0.0) & (num * den[m] == num[m] * den)
    tied_set = tuple(int(i) for i in np.flatnonzero(both_zero | cross_equal))
    return Decision(outcome_index=m, tied=len(tied_set) > 1, tied_set=tied_set)


def decide(system: State, observer: State) -> Decision:
    """Outcome with the maximal likelihood ratio; lowest index on ties."""
    num, den, _ = _magnitudes(system, observer)
    if not np.any(num > 0.0):
        raise AllRatiosZero("system state assigns zero mass to every outcome")
    return decide_magnitudes(num, den)


def eigenset_contains(k: int, system: State, observer: State) -> bool:
    """True iff outcome k's ratio strictly exceeds every other ratio."""
    num, den, _ = _magnitudes(system, observer)
    if not 0 <= k < num.shape[0]:
        raise IndexOutOfRange(f"outcome {k} outside 0..{num.shape[0] - 1}")
    if not np.any(num > 0.0):
        raise AllRatiosZero("system state assigns zero mass to every outcome")
    if num[k] == 0.0:
        return False
    others = np.arange(num.shape[0]) != k
    beaten = (num[others] == 0.0) | (num[k] * den[others] > num[others] * den[k])
    return bool(beaten.all())


def barycentric_observer(k: int, system: MixtureState, lam) -> MixtureState:
    """Convex combination of the outcome vertices with vertex k replaced
    by the system state: sum_{i != k} lam_i e_i + lam_k * system.

    For strictly interior lam and a full-support system, the result
    decides outcome k (its ratio is 1/lam_k, which dominates).
    """
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    if lam.shape[0] != system.n:
        raise DimensionMismatch(f"{lam.shape[0]} weights for dim {system.n}")
    if not 0 <= k < system.n:
        raise IndexOutOfRange(f"outcome {k} outside 0..{system.n - 1}")
    if np.any(lam <= 0.0):
        raise InvalidBarycentric("weights must be strictly positive")
    if abs(float(lam.sum()) - 1.0) > EPS_NORM:
        raise InvalidBarycentric(f"weights sum to {lam.sum()}, not 1")
    r = lam.copy()
    r[k] = 0.0
    r += lam[k] * system.t
    return validate_mixture(r)


def swap_components(state: State, i: int, j: int) -> State:
    """Exchange components i and j, leaving all others untouched."""
    n = state.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"indices ({i}, {j}) outside 0..{n - 1}")
    if i == j:
        raise IndexOutOfRange("swap indices must differ")
    if isinstance(state, MixtureState):
        t = state.t.copy()
        t[[i, j]] = t[[j, i]]
        return validate_mixture(t)
    q = state.q.copy()
    q[[i, j]] = q[[j, i]]
    return validate_pure(q)
