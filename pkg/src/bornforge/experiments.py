"""Repeated-observation experiments and their reports.

Trials are partitioned into fixed 65536-trial batches; batch b draws
from the Philox stream (seed, 1+b) and results merge in batch order, so
a given (seed, config) produces identical results at any worker count.
Stream (seed, 0) is reserved for setup draws such as a random system
state. BORNFORGE_THREADS caps the worker pool (unset: 1, 0: auto).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import stats
from ._kernels import decide_batch, decide_batch_rows
from .errors import (
    ConfigError,
    DimensionMismatch,
    InvalidAlpha,
    KindMismatch,
    PreconditionViolated,
)
from .geometry import VolumeEstimate, eigenset_measure_mc
from .observer import _ratio_values, decide, decide_magnitudes, swap_components
from .sampling import (
    RngStream,
    SamplerSpec,
    _rng,
    haar_unitary,
    sample_observer_batch,
    uniform_complex_sphere,
    uniform_simplex,
    uniform_simplex_batch,
)
from .states import (
    Frame,
    MixtureState,
    PureState,
    apply_unitary,
    born_probabilities,
    coefficients_in_frame,
)

_BATCH = 1 << 16

State = Union[MixtureState, PureState]


def worker_count() -> int:
    """Resolve BORNFORGE_THREADS: unset -> 1, 0 -> cpu count, k -> k."""
    raw = os.environ.get("BORNFORGE_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"BORNFORGE_THREADS must be an integer, got {raw!r}") from exc
    if value == 0:
        return os.cpu_count() or 1
    return max(1, value)


def default_checkpoints(trials: int) -> tuple[int, ...]:
    """Powers of ten from 1000 up to the trial count, plus the end."""
    points = []
    p = 1000
    while p <= trials:
        points.append(p)
        p *= 10
    if not points or points[-1] != trials:
        points.append(trials)
    return tuple(points)


@dataclass(frozen=True)
class ExperimentConfig:
    """One repeated-observation run."""

    model: str
    n: int
    system: Union[State, str]
    trials: int
    seed: int
    frame: Optional[Frame] = None
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    checkpoints: Optional[tuple[int, ...]] = None
    decision_stat: str = "modulus"

    def __post_init__(self):
        if self.model not in ("real", "complex"):
            raise ConfigError(f"model must be 'real' or 'complex', got {self.model!r}")
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.decision_stat not in ("modulus", "squared"):
            raise ConfigError(f"unknown decision_stat {self.decision_stat!r}")
        if self.checkpoints is not None:
            cps = tuple(int(c) for c in self.checkpoints)
            if any(c < 1 or c > self.trials for c in cps) or list(cps) != sorted(set(cps)):
                raise ConfigError("checkpoints must be sorted, unique, and <= trials")
            object.__setattr__(self, "checkpoints", cps)

    def resolved_checkpoints(self) -> tuple[int, ...]:
        return self.checkpoints if self.checkpoints is not None else default_checkpoints(self.trials)


@dataclass(frozen=True)
class TracePoint:
    trials: int
    tv: float
    frequencies: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentResult:
    """Tallies against the reference distribution, with trace."""

    model: str
    n: int
    trials: int
    seed: int
    system: list
    reference: tuple[float, ...]
    counts: tuple[int, ...]
    frequencies: tuple[float, ...]
    ci_halfwidths: tuple[float, ...]
    tie_count: int
    trace: tuple[TracePoint, ...]

    def max_sigma_deviation(self) -> float:
        """Largest |freq - ref| in units of sqrt(ref(1-ref)/trials)."""
        worst = 0.0
        for f, p in zip(self.frequencies, self.reference):
            sigma = (p * (1.0 - p) / self.trials) ** 0.5
            if sigma == 0.0:
                if f != p:
                    return float("inf")
                continue
            worst = max(worst, abs(f - p) / sigma)
        return worst

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "system": self.system,
            "reference": list(self.reference),
            "counts": list(self.counts),
            "frequencies": list(self.frequencies),
            "ci_halfwidths": list(self.ci_halfwidths),
            "tie_count": self.tie_count,
            "trace": [
                {"trials": t.trials, "tv": t.tv, "frequencies": list(t.frequencies)}
                for t in self.trace
            ],
        }


def resolve_system(config: ExperimentConfig) -> State:
    """Materialize the system state; 'random' draws from stream 0."""
    if isinstance(config.system, str):
        if config.system != "random":
            raise ConfigError(f"system must be a state or 'random', got {config.system!r}")
        rng = RngStream(config.seed, 0)
        if config.model == "real":
            return uniform_simplex(config.n, rng)
        return uniform_complex_sphere(config.n, rng)
    state = config.system
    expected = MixtureState if config.model == "real" else PureState
    if not isinstance(state, expected):
        raise KindMismatch(
            f"{config.model} model needs {expected.__name__}, got {type(state).__name__}"
        )
    if state.n != config.n:
        raise DimensionMismatch(f"state dim {state.n} vs config n {config.n}")
    return state


def _decision_inputs(config: ExperimentConfig, system: State):
    """Numerator magnitudes, reference distribution, and frame."""
    if config.model == "real":
        return system.t.copy(), system.t.copy(), None
    frame = config.frame if config.frame is not None else Frame.computational(config.n)
    coeff = coefficients_in_frame(system, frame)
    nums = np.abs(coeff)
    if config.decision_stat == "squared":
        nums = nums**2
    reference = born_probabilities(system, frame).t
    return nums, reference, frame


def _observer_magnitudes(config: ExperimentConfig, frame, size: int, gen) -> np.ndarray:
    if config.model == "real":
        return sample_observer_batch(config.sampler, config.n, size, gen)
    z = sample_observer_batch(config.sampler, config.n, size, gen, complex_model=True)
    mags = np.abs(z @ frame.basis.conj().T)
    if config.decision_stat == "squared":
        mags = mags**2
    return mags


def _batch_sizes(trials: int) -> list[int]:
    sizes = [_BATCH] * (trials // _BATCH)
    if trials % _BATCH:
        sizes.append(trials % _BATCH)
    return sizes


def _map_batches(fn, n_batches: int):
    workers = worker_count()
    if workers <= 1 or n_batches <= 1:
        return map(fn, range(n_batches))
    with ThreadPoolExecutor(max_workers=min(workers, n_batches)) as pool:
        return iter(list(pool.map(fn, range(n_batches))))


def _tally(config: ExperimentConfig, outcome_batches, reference: np.ndarray):
    """Merge per-batch outcomes in order, recording checkpoint traces."""
    n = config.n
    counts = np.zeros(n, dtype=np.int64)
    tie_count = 0
    trace = []
    checkpoints = list(config.resolved_checkpoints())
    next_cp = 0
    done = 0
    for outcomes, tied in outcome_batches:
        size = outcomes.shape[0]
        while next_cp < len(checkpoints) and done < checkpoints[next_cp] <= done + size:
            cp = checkpoints[next_cp]
            cp_counts = counts + np.bincount(outcomes[: cp - done], minlength=n)
            freqs = cp_counts / cp
            trace.append(
                TracePoint(
                    trials=cp,
                    tv=stats.total_variation(freqs, reference),
                    frequencies=tuple(float(x) for x in freqs),
                )
            )
            next_cp += 1
        counts += np.bincount(outcomes, minlength=n)
        tie_count += int(tied.sum())
        done += size
    return counts, tie_count, trace


def run_repeated(config: ExperimentConfig) -> ExperimentResult:
    """Tally decisions over freshly drawn observer states each trial."""
    system = resolve_system(config)
    nums, reference, frame = _decision_inputs(config, system)
    sizes = _batch_sizes(config.trials)

    def one_batch(b: int):
        gen = RngStream(config.seed, 1 + b).generator()
        mags = _observer_magnitudes(config, frame, sizes[b], gen)
        return decide_batch(nums, mags)

    counts, tie_count, trace = _tally(config, _map_batches(one_batch, len(sizes)), reference)
    freqs = counts / config.trials
    halfwidths = []
    for k in range(config.n):
        low, high = stats.wilson_interval(int(counts[k]), config.trials)
        halfwidths.append((high - low) / 2.0)
    return ExperimentResult(
        model=config.model,
        n=config.n,
        trials=config.trials,
        seed=config.seed,
        system=system.to_json(),
        reference=tuple(float(x) for x in reference),
        counts=tuple(int(c) for c in counts),
        frequencies=tuple(float(f) for f in freqs),
        ci_halfwidths=tuple(halfwidths),
        tie_count=tie_count,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class MixtureSpec:
    """Statistical mixture of pure components with positive weights."""

    components: tuple[PureState, ...]
    weights: MixtureState

    def __post_init__(self):
        if len(self.components) < 1:
            raise ConfigError("mixture needs at least one component")
        if self.weights.n != len(self.components):
            raise DimensionMismatch(
                f"{self.weights.n} weights for {len(self.components)} components"
            )
        dims = {c.n for c in self.components}
        if len(dims) != 1:
            raise DimensionMismatch(f"component dimensions differ: {sorted(dims)}")

    @property
    def n(self) -> int:
        return self.components[0].n


@dataclass(frozen=True)
class MixtureReport:
    """Empirical mixture frequencies against the linear prediction."""

    n: int
    trials: int
    seed: int
    weights: tuple[float, ...]
    components: list
    counts: tuple[int, ...]
    frequencies: tuple[float, ...]
    prediction: tuple[float, ...]
    residuals: tuple[float, ...]
    sigma: tuple[float, ...]
    z_scores: tuple[float, ...]
    ci_halfwidths: tuple[float, ...]
    max_abs_z: float
    violation: bool
    violation_threshold: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "weights": list(self.weights),
            "components": self.components,
            "counts": list(self.counts),
            "frequencies": list(self.frequencies),
            "prediction": list(self.prediction),
            "residuals": list(self.residuals),
            "sigma": list(self.sigma),
            "z_scores": list(self.z_scores),
            "ci_halfwidths": list(self.ci_halfwidths),
            "max_abs_z": self.max_abs_z,
            "violation": self.violation,
            "violation_threshold": self.violation_threshold,
        }


def run_mixture(spec: MixtureSpec, config: ExperimentConfig) -> MixtureReport:
    """Each trial first draws a component per the weights, then observes.

    The linear prediction is the weight-average of the components'
    outcome distributions; residuals carry per-outcome z scores.
    """
    if config.model != "complex":
        raise PreconditionViolated("mixture runs are defined for the complex model")
    if spec.n != config.n:
        raise DimensionMismatch(f"mixture dim {spec.n} vs config n {config.n}")
    frame = config.frame if config.frame is not None else Frame.computational(config.n)
    comp_mags = np.stack(
        [np.abs(coefficients_in_frame(c, frame)) for c in spec.components]
    )
    if config.decision_stat == "squared":
        comp_mags = comp_mags**2
    weights = spec.weights.t
    prediction = np.einsum(
        "c,cn->n",
        weights,
        np.stack([born_probabilities(c, frame).t for c in spec.components]),
    )
    sizes = _batch_sizes(config.trials)

    def one_batch(b: int):
        gen = RngStream(config.seed, 1 + b).generator()
        comp_idx = gen.choice(len(spec.components), size=sizes[b], p=weights)
        mags = _observer_magnitudes(config, frame, sizes[b], gen)
        return decide_batch_rows(comp_mags[comp_idx], mags)

    counts, _, _ = _tally(config, _map_batches(one_batch, len(sizes)), prediction)
    freqs = counts / config.trials
    residuals = freqs - prediction
    sigma = np.sqrt(prediction * (1.0 - prediction) / config.trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0, residuals / np.where(sigma > 0, sigma, 1.0), np.where(residuals == 0.0, 0.0, np.inf))
    halfwidths = []
    for k in range(config.n):
        low, high = stats.wilson_interval(int(counts[k]), config.trials)
        halfwidths.append((high - low) / 2.0)
    max_abs_z = float(np.abs(z).max())
    threshold = 5.0
    return MixtureReport(
        n=config.n,
        trials=config.trials,
        seed=config.seed,
        weights=tuple(float(w) for w in weights),
        components=[c.to_json() for c in spec.components],
        counts=tuple(int(c) for c in counts),
        frequencies=tuple(float(f) for f in freqs),
        prediction=tuple(float(p) for p in prediction),
        residuals=tuple(float(r) for r in residuals),
        sigma=tuple(float(s) for s in sigma),
        z_scores=tuple(float(v) for v in z),
        ci_halfwidths=tuple(halfwidths),
        max_abs_z=max_abs_z,
        violation=bool(max_abs_z > threshold),
        violation_threshold=threshold,
    )


def run_mixture_violation(
    spec: MixtureSpec, nonuniform: SamplerSpec, config: ExperimentConfig
) -> MixtureReport:
    """Mixture run under a non-uniform observer distribution; the
    linearity residuals are expected to blow past 5 sigma."""
    if nonuniform.kind != "epsilon_concentrated":
        raise PreconditionViolated("violation run needs an epsilon_concentrated sampler")
    return run_mixture(spec, replace(config, sampler=nonuniform))


@dataclass(frozen=True)
class InvarianceReport:
    kind: str
    matches: int
    total: int

    @property
    def match_rate(self) -> float:
        return self.matches / self.total if self.total else 1.0


def run_unitary_invariance(config: ExperimentConfig, unitaries: int, rng) -> InvarianceReport:
    """Decide each paired trial in the original triple (system,
    observer, frame) and in the transported triple (U system, U
    observer, U frame); the outcomes must agree exactly."""
    if config.model != "complex":
        raise PreconditionViolated("unitary invariance applies to the complex model")
    system = resolve_system(config)
    frame = config.frame if config.frame is not None else Frame.computational(config.n)
    gen = _rng(rng)
    matches = 0
    for _ in range(unitaries):
        u = haar_unitary(config.n, gen)
        observer = uniform_complex_sphere(config.n, gen)
        d1 = decide_magnitudes(
            np.abs(coefficients_in_frame(system, frame)),
            np.abs(coefficients_in_frame(observer, frame)),
        )
        moved_frame = Frame(frame.basis @ u.matrix.T)
        d2 = decide_magnitudes(
            np.abs(coefficients_in_frame(apply_unitary(u, system), moved_frame)),
            np.abs(coefficients_in_frame(apply_unitary(u, observer), moved_frame)),
        )
        matches += int(d1.outcome_index == d2.outcome_index)
    return InvarianceReport(kind="unitary", matches=matches, total=unitaries)


def run_projective_invariance(config: ExperimentConfig, samples: int, rng) -> InvarianceReport:
    """Rescale either state by a random nonzero complex scalar; the
    decision must not move."""
    system = resolve_system(config)
    nums, _, frame = _decision_inputs(config, system)
    gen = _rng(rng)
    matches = 0
    for _ in range(samples):
        mags = _observer_magnitudes(config, frame, 1, gen)[0]
        scale = 10.0 ** gen.uniform(-3.0, 3.0)
        base = decide_magnitudes(nums, mags)
        scaled_sys = decide_magnitudes(nums * scale, mags)
        scaled_obs = decide_magnitudes(nums, mags * scale)
        matches += int(base == scaled_sys == scaled_obs)
    return InvarianceReport(kind="projective", matches=matches, total=samples)


def run_monotone_equivalence(config: ExperimentConfig, samples: int, rng) -> InvarianceReport:
    """Decide with the magnitude odds and with their squares (the
    Born-level odds); the outcome sequence must match trial by trial."""
    if config.model != "complex":
        raise PreconditionViolated("the squared-odds comparison is complex-model only")
    system = resolve_system(config)
    frame = config.frame if config.frame is not None else Frame.computational(config.n)
    nums = np.abs(coefficients_in_frame(system, frame))
    gen = _rng(rng)
    plain = replace(config, decision_stat="modulus")
    done = 0
    matches = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        mags = _observer_magnitudes(plain, frame, b, gen)
        out1, _ = decide_batch(nums, mags)
        out2, _ = decide_batch(nums**2, mags**2)
        matches += int((out1 == out2).sum())
        done += b
    return InvarianceReport(kind="monotone", matches=matches, total=samples)


@dataclass(frozen=True)
class InvarianceSuiteReport:
    projective: InvarianceReport
    monotone: InvarianceReport
    unitary: InvarianceReport

    def all_exact(self) -> bool:
        return all(
            r.matches == r.total for r in (self.projective, self.monotone, self.unitary)
        )

    def to_json_dict(self) -> dict:
        return {
            kind: {"matches": r.matches, "total": r.total, "match_rate": r.match_rate}
            for kind, r in (
                ("projective", self.projective),
                ("monotone", self.monotone),
                ("unitary", self.unitary),
            )
        }


def run_invariance_suite(config: ExperimentConfig, samples: int) -> InvarianceSuiteReport:
    """Projective, monotone, and unitary invariance at the same size."""
    return InvarianceSuiteReport(
        projective=run_projective_invariance(config, samples, RngStream(config.seed, 0)),
        monotone=run_monotone_equivalence(config, samples, RngStream(config.seed, 1)),
        unitary=run_unitary_invariance(config, samples, RngStream(config.seed, 2)),
    )


@dataclass(frozen=True)
class ContextualityReport:
    """Decision flip under a component swap, with the probability of the
    untouched outcome measured on both sides."""

    outcome_before: int
    outcome_after: int
    changed: bool
    reference_outcome: int
    prob_before: VolumeEstimate
    prob_after: VolumeEstimate
    z: float
    ratios_before: tuple[float, ...]
    ratios_after: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "outcome_before": self.outcome_before,
            "outcome_after": self.outcome_after,
            "changed": self.changed,
            "reference_outcome": self.reference_outcome,
            "prob_before": {
                "value": self.prob_before.value,
                "stderr": self.prob_before.stderr,
                "samples": self.prob_before.samples,
            },
            "prob_after": {
                "value": self.prob_after.value,
                "stderr": self.prob_after.stderr,
                "samples": self.prob_after.samples,
            },
            "z": self.z,
            "ratios_before": list(self.ratios_before),
            "ratios_after": list(self.ratios_after),
        }


def run_contextuality_demo(
    system: MixtureState,
    observer: MixtureState,
    i: int,
    j: int,
    samples: int = 10**6,
    seed: int = 0,
) -> ContextualityReport:
    """Swap system components i and j with the observer held fixed.

    The decided outcome may move to or from a third outcome, but the
    probability of the decided outcome whose component the swap leaves
    untouched is the same on both sides (within Monte Carlo error).
    """
    d_before = decide(system, observer)
    swapped = swap_components(system, i, j)
    d_after = decide(swapped, observer)
    if d_before.outcome_index not in (i, j):
        reference = d_before.outcome_index
    elif d_after.outcome_index not in (i, j):
        reference = d_after.outcome_index
    else:
        raise PreconditionViolated(
            f"both decisions ({d_before.outcome_index}, {d_after.outcome_index}) "
            f"fall on the swapped components ({i}, {j})"
        )
    prob_before = eigenset_measure_mc(system, reference, samples, RngStream(seed, 1))
    prob_after = eigenset_measure_mc(swapped, reference, samples, RngStream(seed, 2))
    se = float(np.hypot(prob_before.stderr, prob_after.stderr))
    z = (prob_before.value - prob_after.value) / se if se > 0 else 0.0
    return ContextualityReport(
        outcome_before=d_before.outcome_index,
        outcome_after=d_after.outcome_index,
        changed=d_before.outcome_index != d_after.outcome_index,
        reference_outcome=reference,
        prob_before=prob_before,
        prob_after=prob_after,
        z=float(z),
        ratios_before=tuple(float(x) for x in _ratio_values(system.t, observer.t)),
        ratios_after=tuple(float(x) for x in _ratio_values(swapped.t, observer.t)),
    )


@dataclass(frozen=True)
class AlphaDiagnostic:
    """Separability diagnostic: total mass alpha on 'outcome reflects
    the system' versus 1-alpha on 'outcome reflects the observer'."""

    alpha: float
    max_odds: float
    majorization_holds: bool


def alpha_diagnostic(p_sys, p_obs) -> AlphaDiagnostic:
    """Largest odds across outcomes for sub-normalized hypothesis masses.

    When alpha > 1/2 some odds must exceed 1: otherwise p_sys <= p_obs
    componentwise and summing gives alpha <= 1 - alpha.
    """
    p_sys = np.asarray(p_sys, dtype=np.float64).reshape(-1)
    p_obs = np.asarray(p_obs, dtype=np.float64).reshape(-1)
    if p_sys.shape != p_obs.shape:
        raise DimensionMismatch(f"{p_sys.shape} vs {p_obs.shape}")
    if np.any(p_sys < 0.0) or np.any(p_obs < 0.0):
        raise InvalidAlpha("hypothesis masses must be nonnegative")
    alpha = float(p_sys.sum())
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha = {alpha} outside (0, 1)")
    if abs(float(p_obs.sum()) - (1.0 - alpha)) > 1e-9:
        raise InvalidAlpha(
            f"masses sum to {alpha} + {float(p_obs.sum())}, not 1"
        )
    max_odds = float(_ratio_values(p_sys, p_obs).max())
    return AlphaDiagnostic(
        alpha=alpha, max_odds=max_odds, majorization_holds=max_odds > 1.0
    )


@dataclass(frozen=True)
class AlphaSweepReport:
    """Majorization over random pairs with alpha > 1/2, plus the
    proportional counterexample with alpha < 1/2."""

    n: int
    pairs: int
    holds: int
    proportional_alpha: float
    proportional_max_odds: float

    def all_hold(self) -> bool:
        return self.holds == self.pairs

    def proportional_below_one(self) -> bool:
        return self.proportional_max_odds < 1.0

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": self.pairs,
            "holds": self.holds,
            "all_hold": self.all_hold(),
            "proportional_alpha": self.proportional_alpha,
            "proportional_max_odds": self.proportional_max_odds,
            "proportional_below_one": self.proportional_below_one(),
        }


def alpha_sweep(n: int, pairs: int, rng) -> AlphaSweepReport:
    """Random sub-normalized pairs with alpha in (0.5, 1) must each have
    some odds above one; a proportional pair with alpha < 0.5 must not."""
    from .sampling import uniform_simplex_batch

    gen = _rng(rng)
    alphas = gen.uniform(0.5, 1.0, size=pairs)
    alphas[alphas == 0.5] = np.nextafter(0.5, 1.0)
    sys_rows = uniform_simplex_batch(n, pairs, gen)
    obs_rows = uniform_simplex_batch(n, pairs, gen)
    holds = 0
    for a, s, o in zip(alphas, sys_rows, obs_rows):
        holds += int(alpha_diagnostic(a * s, (1.0 - a) * o).majorization_holds)
    low_alpha = gen.uniform(0.05, 0.45)
    shared = uniform_simplex(n, gen).t
    low = alpha_diagnostic(low_alpha * shared, (1.0 - low_alpha) * shared)
    return AlphaSweepReport(
        n=n,
        pairs=pairs,
        holds=holds,
        proportional_alpha=low.alpha,
        proportional_max_odds=low.max_odds,
    )
