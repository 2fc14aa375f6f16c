"""Finite random-matrix models used as an independent Monte Carlo check.

Each trial draws its own generator from ``SeedSequence(seed).spawn(trials)``,
so the pooled sample depends only on the spec and not on how trials are
scheduled across threads.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import stats

from .errors import QRBreakdown, SingularInverseFactor, ValidationError
from .measures import RadialBrownMeasure, radial_cdf
from .stable import StableParams, nu_beta_moment, stable_table
from .semigroup import brown_from_s

KINDS = ("ginibre", "haar_unitary", "truncated_haar", "ginibre_product", "free_sum")
COND_LIMIT = 1e12
MAX_RESAMPLES = 100


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    trials: int = 1
    seed: int = 0
    s: float = 1.0  # truncated_haar keeps the leading round(n/s) block
    k: int = 1  # ginibre_product forms G1 G2^{-k}
    summands: Tuple["EnsembleSpec", ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1 or self.trials < 1:
            raise ValidationError("n and trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.kind == "truncated_haar" and not (self.s >= 1 and 1 <= self.m <= self.n):
            raise ValidationError("truncated_haar needs s >= 1 and 1 <= m <= n")
        if self.kind == "ginibre_product" and self.k < 0:
            raise ValidationError("k must be >= 0")
        if self.kind == "free_sum":
            if not self.summands:
                raise ValidationError("free_sum needs at least one summand")
            if any(sp.kind == "free_sum" for sp in self.summands):
                raise ValidationError("nested free_sum is not supported")

    @property
    def m(self) -> int:
        return int(round(self.n / self.s))

    def to_json(self) -> dict:
        d = asdict(self)
        d["summands"] = [sp.to_json() for sp in self.summands]
        return d


@dataclass
class ExperimentReport:
    spec: EnsembleSpec
    scaled_radii: np.ndarray
    ks: float
    n_resamples: int
    predicted_ref: str
    wall_time_s: float = field(default=0.0, compare=False)

    def radii_quantiles(self, levels: int = 101) -> list:
        return np.quantile(self.scaled_radii, np.linspace(0, 1, levels)).tolist()

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "ks": self.ks,
            "n_resamples": self.n_resamples,
            "predicted": self.predicted_ref,
            "radii_quantiles": self.radii_quantiles(),
            "wall_time_s": self.wall_time_s,
        }


def sample_ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n complex Gaussian matrix with E|g_ij|^2 = 1/n."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    scale = 1.0 / math.sqrt(2 * n)
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def sample_haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    g = sample_ginibre(n, rng)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    if np.any(np.abs(d) < 1e-300):
        raise QRBreakdown("zero pivot in QR of a Gaussian sample")
    u = q * (d / np.abs(d))
    resid = np.max(np.abs(u.conj().T @ u - np.eye(n)))
    if resid > 1e-10:
        raise QRBreakdown(f"unitarity residual {resid:.3g}")
    return u


def _well_conditioned_ginibre(n, rng):
    for tries in range(MAX_RESAMPLES + 1):
        g = sample_ginibre(n, rng)
        if np.linalg.cond(g) <= COND_LIMIT:
            return g, tries
    raise SingularInverseFactor(f"no inverse factor with condition number <= {COND_LIMIT:g}")


def _product(n, k, rng):
    """G1 G2^{-k} via k right-solves; returns the matrix and the resample count."""
    g1 = sample_ginibre(n, rng)
    if k == 0:
        return g1, 0
    g2, resampled = _well_conditioned_ginibre(n, rng)
    x = g1
    for _ in range(k):
        x = np.linalg.solve(g2.T, x.T).T
    return x, resampled


def build_matrix(spec: EnsembleSpec, rng: np.random.Generator):
    """One draw of the ensemble; returns (matrix, number of resampled factors)."""
    if spec.kind == "ginibre":
        return sample_ginibre(spec.n, rng), 0
    if spec.kind == "haar_unitary":
        return sample_haar_unitary(spec.n, rng), 0
    if spec.kind == "truncated_haar":
        u = sample_haar_unitary(spec.n, rng)
        return u[: spec.m, : spec.m], 0
    if spec.kind == "ginibre_product":
        return _product(spec.n, spec.k, rng)
    total, resampled = np.zeros((spec.n, spec.n), dtype=complex), 0
    for sub in spec.summands:
        a, r = build_matrix(EnsembleSpec(sub.kind, spec.n, 1, 0, sub.s, sub.k), rng)
        total += a
        resampled += r
    return total, resampled


def _run_trials(spec: EnsembleSpec, per_trial: Callable, parallel: int):
    streams = np.random.SeedSequence(spec.seed).spawn(spec.trials)

    def job(ss):
        a, r = build_matrix(spec, np.random.default_rng(ss))
        return per_trial(a), r

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as ex:
            results = list(ex.map(job, streams))
    else:
        results = [job(ss) for ss in streams]
    return [v for v, _ in results], sum(r for _, r in results)


def _as_cdf(predicted) -> Tuple[Callable, str]:
    if isinstance(predicted, RadialBrownMeasure):
        return (lambda r: radial_cdf(predicted, r)), "radial_brown_measure"
    return predicted, getattr(predicted, "__name__", "callable")


def run_experiment(
    spec: EnsembleSpec,
    predicted: Union[RadialBrownMeasure, Callable],
    scaling: float = 1.0,
    parallel: int = 1,
    predicted_ref: Optional[str] = None,
) -> ExperimentReport:
    """Pool scaled eigenvalue moduli over trials and compare with the prediction by KS."""
    start = time.perf_counter()
    cdf, ref = _as_cdf(predicted)
    radii, resampled = _run_trials(spec, lambda a: np.abs(np.linalg.eigvals(a)), parallel)
    pooled = np.sort(np.concatenate(radii) * scaling)
    ks = float(stats.kstest(pooled, cdf).statistic)
    return ExperimentReport(spec, pooled, ks, resampled, predicted_ref or ref, time.perf_counter() - start)


def stable_brown(k: int, n_grid: int = 512) -> RadialBrownMeasure:
    """mu_k computed through the Brown-measure pipeline."""
    return brown_from_s(stable_table(StableParams(float(k))), 0.0, n_grid)


def free_sum_check(k: int, n: int, trials: int, seed: int = 0, parallel: int = 1) -> ExperimentReport:
    """Two independent copies of G1 G2^{-k}, radii divided by 2^((1+k)/2), against mu_k."""
    if k < 0:
        raise ValidationError("k must be >= 0")
    part = EnsembleSpec("ginibre_product", n, k=k)
    spec = EnsembleSpec("free_sum", n, trials, seed, summands=(part, part))
    return run_experiment(spec, stable_brown(k), 2 ** (-(1 + k) / 2), parallel, f"mu_{k}")


@dataclass(frozen=True)
class SingularMomentResult:
    empirical: float
    predicted: float
    rel_error: float
    std_error: float
    near_divergent: bool
    n_resamples: int


def singular_moment_check(
    k: int, gamma: float, n: int, trials: int, seed: int = 0, parallel: int = 1
) -> SingularMomentResult:
    """Mean of sigma^(2 gamma) over squared singular values of G1 G2^{-k} vs nu_k."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    predicted = nu_beta_moment(float(k), gamma)
    if predicted.unbounded:
        raise ValidationError("gamma outside the convergent range (-1/2, 1/(1+k))")
    spec = EnsembleSpec("ginibre_product", n, trials, seed, k=k)
    vals, resampled = _run_trials(
        spec, lambda a: np.linalg.svd(a, compute_uv=False) ** (2 * gamma), parallel
    )
    per_trial = np.array([v.mean() for v in vals])
    emp = float(per_trial.mean())
    se = float(per_trial.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    upper = 1.0 / (1.0 + k)
    near = gamma > 0.8 * upper or gamma < -0.4
    return SingularMomentResult(emp, predicted.value, abs(emp / predicted.value - 1), se, near, resampled)
