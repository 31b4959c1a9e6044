"""Duration priors, weekly Bayesian updates, and Monte-Carlo schedule runs.

Posteriors are weighted sample sets: a fixed grid of draws from the prior is
reweighted by a Gaussian likelihood on the total duration implied by each
week's progress evidence (elapsed / percent complete). Monte-Carlo trials
resample those weighted sets through per-trial counter-based substreams, so
results are reproducible for a given seed no matter how trials are chunked
across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.special import ndtri

from . import kernel
from .errors import DegenerateEvidence, MissingPosterior
from .project_model import ActivityNetwork, Calendar, FLOAT_EPS
from .rng import DOMAIN_DURATION, DOMAIN_PRIOR, SubStream, uniform_matrix

POSTERIOR_GRID = 4096
ESS_FLOOR = 64
DEFAULT_SD_FRACTION = 0.15
MCS_CHUNK = 4096


@dataclass(frozen=True)
class DurationPrior:
    """Triangular(a, m, b) or lognormal(mean, sd) duration model in workdays."""

    kind: str
    a: float = 0.0
    m: float = 0.0
    b: float = 0.0
    mean: float = 0.0
    sd: float = 0.0

    def __post_init__(self):
        if self.kind == "triangular":
            if not (0 <= self.a <= self.m <= self.b):
                raise ValueError(f"triangular bounds out of order: {self.a}, {self.m}, {self.b}")
        elif self.kind == "lognormal":
            if self.mean <= 0 or self.sd <= 0:
                raise ValueError("lognormal needs mean > 0 and sd > 0")
        else:
            raise ValueError(f"unknown prior kind {self.kind!r}")

    @staticmethod
    def triangular(a: float, m: float, b: float) -> "DurationPrior":
        return DurationPrior("triangular", a=a, m=m, b=b)

    @staticmethod
    def lognormal(mean: float, sd: float) -> "DurationPrior":
        return DurationPrior("lognormal", mean=mean, sd=sd)

    @property
    def prior_mean(self) -> float:
        if self.kind == "triangular":
            return (self.a + self.m + self.b) / 3.0
        return self.mean

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "triangular":
            a, m, b = self.a, self.m, self.b
            if b == a:
                return np.full_like(np.asarray(u, dtype=float), a)
            split = (m - a) / (b - a)
            u = np.asarray(u, dtype=float)
            left = a + np.sqrt(u * (b - a) * (m - a))
            right = b - np.sqrt((1.0 - u) * (b - a) * (b - m))
            return np.where(u < split, left, right)
        # moment-matched lognormal: draws reproduce the given mean and sd
        sigma2 = math.log(1.0 + (self.sd / self.mean) ** 2)
        mu = math.log(self.mean) - sigma2 / 2.0
        z = ndtri(np.maximum(np.asarray(u, dtype=float), 2.0**-53))
        return np.exp(mu + math.sqrt(sigma2) * z)


def sample_prior(prior: DurationPrior, stream: SubStream, n: int = 1) -> np.ndarray:
    """Draw n durations from the prior via inverse-CDF on the given stream."""
    return prior.inverse_cdf(stream.uniforms(n))


@dataclass(frozen=True)
class Evidence:
    activity_id: str
    week: int
    percent_complete: float
    elapsed: float
    likelihood_sd: float | None = None

    def __post_init__(self):
        if not (0 < self.percent_complete <= 1):
            raise DegenerateEvidence(
                f"{self.activity_id} week {self.week}: percent_complete must be in (0, 1]"
            )
        if self.elapsed < 0:
            raise ValueError("elapsed must be >= 0")

    @property
    def implied_duration(self) -> float:
        return self.elapsed / self.percent_complete


@dataclass(frozen=True)
class DurationPosterior:
    """Weighted sample set over an activity's total duration."""

    samples: np.ndarray
    weights: np.ndarray
    prior_mean: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError("posterior weights must sum to 1")

    def __eq__(self, other):
        if not isinstance(other, DurationPosterior):
            return NotImplemented
        return (
            np.array_equal(self.samples, other.samples)
            and np.array_equal(self.weights, other.weights)
            and self.flags == other.flags
        )

    @property
    def mean(self) -> float:
        return float(np.dot(self.samples, self.weights))

    @property
    def sd(self) -> float:
        mu = self.mean
        return float(math.sqrt(max(0.0, np.dot(self.weights, (self.samples - mu) ** 2))))

    @property
    def minimum(self) -> float:
        return float(self.samples.min())

    @property
    def maximum(self) -> float:
        return float(self.samples.max())

    def cumulative_weights(self) -> np.ndarray:
        return np.cumsum(self.weights)

    def shifted(self, days: float) -> "DurationPosterior":
        return replace(self, samples=self.samples + days)

    def scaled(self, factor: float) -> "DurationPosterior":
        return replace(self, samples=self.samples * factor)


def posterior_from_prior(
    prior: DurationPrior, activity_id: str, seed: int, n: int = POSTERIOR_GRID
) -> DurationPosterior:
    stream = SubStream(seed, DOMAIN_PRIOR, activity_id)
    # midpoint-stratified grid keeps the sample set stable and well spread
    u = (np.arange(n) + stream.uniforms(n)) / n
    samples = prior.inverse_cdf(u)
    weights = np.full(n, 1.0 / n)
    return DurationPosterior(samples, weights, prior_mean=prior.prior_mean)


def bayesian_update(post: DurationPosterior, evidence: Evidence) -> DurationPosterior:
    """Reweight the sample set by a Gaussian likelihood on implied duration."""
    sd = evidence.likelihood_sd
    if sd is None:
        sd = DEFAULT_SD_FRACTION * post.prior_mean
    if sd <= 0:
        raise ValueError("likelihood sd must be positive")
    implied = evidence.implied_duration
    with np.errstate(over="ignore", invalid="ignore"):
        z = (post.samples - implied) / sd
        logw = np.log(np.maximum(post.weights, 1e-300)) - 0.5 * z * z
        logw -= logw.max()
        w = np.exp(logw)
    total = float(w.sum())
    flags = tuple(f for f in post.flags if f != "resampled")
    if not math.isfinite(total) or total <= 0.0:
        return replace(post, flags=post.flags + ("degenerate_update",))
    w /= total
    ess = 1.0 / float(np.dot(w, w))
    if ess < ESS_FLOOR:
        # systematic resampling with a fixed mid-offset keeps this step
        # deterministic without consuming a random stream
        positions = (np.arange(len(w)) + 0.5) / len(w)
        idx = np.searchsorted(np.cumsum(w), positions, side="right")
        idx = np.minimum(idx, len(w) - 1)
        samples = post.samples[idx]
        w = np.full(len(w), 1.0 / len(w))
        return DurationPosterior(samples, w, post.prior_mean, flags + ("resampled",))
    return DurationPosterior(post.samples, w, post.prior_mean, flags)


@dataclass(frozen=True)
class FinishDistribution:
    trial_finishes: np.ndarray
    criticality_counts: dict[str, int]
    seed: int
    n_trials: int

    def __eq__(self, other):
        if not isinstance(other, FinishDistribution):
            return NotImplemented
        return (
            np.array_equal(self.trial_finishes, other.trial_finishes)
            and self.criticality_counts == other.criticality_counts
            and self.seed == other.seed
            and self.n_trials == other.n_trials
        )


def run_mcs(
    network: ActivityNetwork,
    posteriors: Mapping[str, DurationPosterior],
    calendar: Calendar | None = None,
    n_trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    chunk: int = MCS_CHUNK,
) -> FinishDistribution:
    """Monte-Carlo CPM: one posterior draw per activity per trial.

    Chunk boundaries are fixed by ``chunk`` (not by ``workers``), and each
    trial's draws come from its own counter-based substream, so outputs are
    identical for any worker count.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    n = len(network)
    ids = [a.id for a in network.activities]
    sample_arrays = []
    cumw_arrays = []
    for act_id in ids:
        if act_id not in posteriors:
            raise MissingPosterior(act_id)
        p = posteriors[act_id]
        sample_arrays.append(p.samples)
        cumw_arrays.append(p.cumulative_weights())
    arr = network.kernel_arrays()
    ranges = [(lo, min(lo + chunk, n_trials)) for lo in range(0, n_trials, chunk)]

    def run_chunk(bounds):
        lo, hi = bounds
        trials = np.arange(lo, hi, dtype=np.uint64)
        u = uniform_matrix(seed, DOMAIN_DURATION, trials, n)
        durations = np.empty((hi - lo, n))
        for i in range(n):
            idx = np.searchsorted(cumw_arrays[i], u[:, i], side="right")
            idx = np.minimum(idx, len(sample_arrays[i]) - 1)
            durations[:, i] = sample_arrays[i][idx]
        return kernel.mcs_batch(
            arr["topo"],
            arr["in_off"],
            arr["in_pred"],
            arr["in_kind"],
            arr["in_lag"],
            arr["out_off"],
            arr["out_succ"],
            arr["out_kind"],
            arr["out_lag"],
            durations,
            FLOAT_EPS,
        )

    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, ranges))
    else:
        results = [run_chunk(r) for r in ranges]

    finishes = np.concatenate([r[0] for r in results])
    counts = np.sum([r[1] for r in results], axis=0)
    return FinishDistribution(
        trial_finishes=finishes,
        criticality_counts={ids[i]: int(counts[i]) for i in range(n)},
        seed=seed,
        n_trials=n_trials,
    )


def quantile(dist: FinishDistribution, p: float) -> float:
    """Linear-interpolation empirical quantile of the trial finishes."""
    if not (0 < p < 1):
        raise ValueError("p must be in (0, 1)")
    return float(np.quantile(dist.trial_finishes, p))


def criticality_index(dist: FinishDistribution) -> dict[str, float]:
    return {
        act: 100.0 * count / dist.n_trials for act, count in dist.criticality_counts.items()
    }


@dataclass
class BufferLedger:
    """Weekly feeding/project buffer consumption with cumulative tracking."""

    feeding_size: float
    project_size: float
    weeks: list[int] = field(default_factory=list)
    feeding_deltas: list[float] = field(default_factory=list)
    project_deltas: list[float] = field(default_factory=list)
    overruns: list[str] = field(default_factory=list)

    @property
    def feeding_cumulative(self) -> list[float]:
        return np.cumsum(self.feeding_deltas).tolist() if self.feeding_deltas else []

    @property
    def project_cumulative(self) -> list[float]:
        return np.cumsum(self.project_deltas).tolist() if self.project_deltas else []

    def percent_used(self, which: str = "project") -> float:
        if which == "project":
            total = sum(self.project_deltas)
            size = self.project_size
        else:
            total = sum(self.feeding_deltas)
            size = self.feeding_size
        return 100.0 * total / size if size else 0.0


def derived_buffer_delta(previous_p50: float, current_p50: float, remaining: float) -> float:
    """Optional derived consumption: forecast slip clipped to what's left.

    Ingested deltas are the primary mode; this helper backs the derived mode
    where consumption is read off the week-over-week P50 movement.
    """
    return min(max(0.0, current_p50 - previous_p50), max(0.0, remaining))


def buffer_update(
    ledger: BufferLedger, week: int, feeding_delta: float, project_delta: float
) -> BufferLedger:
    """Append one week of buffer consumption; overruns recorded, not fatal."""
    if feeding_delta < 0 or project_delta < 0:
        raise ValueError("buffer deltas must be >= 0")
    out = BufferLedger(
        ledger.feeding_size,
        ledger.project_size,
        ledger.weeks + [week],
        ledger.feeding_deltas + [feeding_delta],
        ledger.project_deltas + [project_delta],
        list(ledger.overruns),
    )
    if sum(out.feeding_deltas) > out.feeding_size + 1e-9:
        out.overruns.append(f"feeding buffer overrun at week {week}")
    if sum(out.project_deltas) > out.project_size + 1e-9:
        out.overruns.append(f"project buffer overrun at week {week}")
    return out


@dataclass(frozen=True)
class ForecastEntry:
    week: int
    p50: float
    p80: float
    actual: float | None = None
    note: str = ""


def weekly_forecast_log(entries: Sequence[ForecastEntry]) -> dict:
    """Tabulate weekly P50/P80 vs actual; flag convergence and band narrowing.

    Convergence = first week where |P50 - actual| <= 0.5 days.
    """
    if not entries:
        raise ValueError("need at least one forecast entry")
    rows = []
    convergence_week = None
    band_nonincreasing = True
    prev_band = None
    for e in entries:
        note = e.note
        if (
            convergence_week is None
            and e.actual is not None
            and abs(e.p50 - e.actual) <= 0.5
        ):
            convergence_week = e.week
            note = (note + "; " if note else "") + "P50 aligns with actual"
        band = e.p80 - e.p50
        if prev_band is not None and band > prev_band + 1e-9:
            band_nonincreasing = False
        prev_band = band
        rows.append(
            {
                "week": e.week,
                "p50": e.p50,
                "p80": e.p80,
                "actual": e.actual,
                "note": note,
            }
        )
    return {
        "rows": rows,
        "convergence_week": convergence_week,
        "band_nonincreasing": band_nonincreasing,
    }
