"""Self-test suites: numerical identities checked on random atomic measures."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .measures import PositiveRealMeasure, moment, pushforward, symmetrize
from .semigroup import atom_after_compression, brown_from_s, compress_s, semigroup_additivity_check
from .stable import StableParams, mu_beta_quantile, stability_residual, stable_scaling_factor, stable_table
from .transforms import (
    chi,
    psi,
    r_table,
    s_from_r,
    s_of_inverse,
    s_of_square,
    s_table,
    s_transform,
)


def random_atomic_measure(rng: np.random.Generator, max_atoms: int = 5, atom0: float = 0.0) -> PositiveRealMeasure:
    """Up to ``max_atoms`` distinct atoms in [0.1, 10] with Dirichlet weights."""
    k = int(rng.integers(1, max_atoms + 1))
    x = np.unique(np.round(rng.uniform(0.1, 10.0, size=k), 6))
    w = rng.dirichlet(np.ones(len(x))) * (1 - atom0)
    return PositiveRealMeasure.from_atoms(list(zip(x, w)), atom0=atom0)


def interior_w(rng, delta: float, size: int, margin: float = 0.01) -> np.ndarray:
    return rng.uniform(delta - 1 + margin, -margin, size=size)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    max_error: float
    tolerance: float
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error < self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<24} {self.cases:>5} {self.max_error:>11.3e} {self.tolerance:>9.1e} {self.seconds:>7.2f}s  {status}"


def _rel(a, b):
    return np.abs(np.asarray(a) / np.asarray(b) - 1.0)


def psi_chi_roundtrip(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        w = interior_w(rng, mu.atom0, 10)
        err = max(err, float(np.max(np.abs(psi(mu, chi(mu, w)) - w))))
    return err


def s_from_r_agreement(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        w = interior_w(rng, mu.atom0, 5)
        err = max(err, float(np.max(np.abs(s_from_r(mu, w, r_table(mu)) - s_transform(mu, w)))))
    return err


def squaring_identity(rng, n):
    err = 0.0
    for _ in range(n):
        pos = random_atomic_measure(rng)
        nu = symmetrize(pos)
        w = interior_w(rng, 0.0, 5)
        err = max(err, float(np.max(np.abs(s_of_square(nu, w) - s_transform(pushforward(pos, "square"), w)))))
    return err


def inversion_identity(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        w = interior_w(rng, 0.0, 5)
        err = max(err, float(np.max(np.abs(s_of_inverse(mu, w) - s_transform(pushforward(mu, "inverse"), w)))))
    return err


def s_scaling(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        t = float(rng.uniform(0.2, 5.0))
        w = interior_w(rng, mu.atom0, 5)
        lhs = s_transform(pushforward(mu, "dilate", t), w)
        err = max(err, float(np.max(np.abs(lhs - s_transform(mu, w) / t))))
    return err


def r_scaling(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        t = float(rng.uniform(0.2, 5.0))
        r_mu, r_t = r_table(mu), r_table(pushforward(mu, "dilate", t))
        reach = min(1.0, r_mu.epsilon / t, r_t.epsilon)
        z = -reach * rng.uniform(0.05, 0.95, size=5)
        err = max(err, float(np.max(np.abs(r_t(z) - t * r_mu(t * z)))))
    return err


def semigroup_law(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        s1, s2 = rng.uniform(1.0, 4.0, size=2)
        err = max(err, semigroup_additivity_check(mu, float(s1), float(s2), n=32))
    return err


def atom_consistency(rng, n):
    err = 0.0
    for _ in range(n):
        delta = float(rng.uniform(0.0, 0.9))
        mu = PositiveRealMeasure.from_atoms([(1.0, 1 - delta)], atom0=delta)
        s = float(rng.uniform(1.0, 3.0))
        table = compress_s(s_table(mu), s)
        err = max(err, abs(table.domain_left - (atom_after_compression(delta, s) - 1)))
    return err


def stable_pipeline(rng, n):
    err = 0.0
    for beta in (0.0, 0.5, 1.0, 2.0, 5.0):
        b = brown_from_s(stable_table(StableParams(beta)), 0.0, 512)
        err = max(err, float(np.max(_rel(b.q_values, mu_beta_quantile(beta, b.t_grid)))))
    return err


def stable_stability(rng, n):
    err = 0.0
    for beta in (0.0, 1.0, 2.0):
        for s in (1.5, 2.0, 3.0):
            err = max(err, stability_residual(beta, s))
    return err


def alpha_multiplicative(rng, n):
    err = 0.0
    for _ in range(n):
        beta = float(rng.uniform(0, 5))
        s, t = rng.uniform(1.0, 10.0, size=2)
        a = stable_scaling_factor(beta, s * t)
        err = max(err, abs(a / (stable_scaling_factor(beta, s) * stable_scaling_factor(beta, t)) - 1))
    return err


def rmax_moment(rng, n):
    err = 0.0
    for _ in range(n):
        mu = random_atomic_measure(rng)
        b = brown_from_s(s_table(mu), mu.atom0, 64)
        err = max(err, abs(b.r_max - math.sqrt(moment(mu, 1.0).value)))
    return err


SUITES: List[tuple] = [
    ("psi_chi_roundtrip", psi_chi_roundtrip, 1e-10),
    ("s_from_r", s_from_r_agreement, 1e-8),
    ("squaring", squaring_identity, 1e-8),
    ("inversion", inversion_identity, 1e-8),
    ("s_scaling", s_scaling, 1e-10),
    ("r_scaling", r_scaling, 1e-10),
    ("semigroup_law", semigroup_law, 1e-10),
    ("atom_consistency", atom_consistency, 1e-10),
    ("stable_pipeline_rel", stable_pipeline, 1e-10),
    ("stability_residual", stable_stability, 1e-10),
    ("alpha_multiplicative", alpha_multiplicative, 1e-14),
    ("rmax_vs_moment", rmax_moment, 1e-8),
]


def run_suites(cases: int = 100, seed: int = 0) -> List[SuiteResult]:
    out = []
    for i, (name, fn, tol) in enumerate(SUITES):
        rng = np.random.default_rng([seed, i])
        start = time.perf_counter()
        err = fn(rng, cases)
        out.append(SuiteResult(name, cases, err, tol, time.perf_counter() - start))
    return out


def format_table(results: List[SuiteResult]) -> str:
    head = f"{'suite':<24} {'cases':>5} {'max_error':>11} {'tol':>9} {'time':>8}  result"
    return "\n".join([head] + [r.line() for r in results])
