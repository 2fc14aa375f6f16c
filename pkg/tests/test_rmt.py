import time

import numpy as np
import pytest
from scipy import stats

from freebrown import rmt
from freebrown.errors import SingularInverseFactor, ValidationError
from freebrown.measures import point_mass
from freebrown.semigroup import CompressionParams, compressed_brown
from freebrown.rmt import (
    EnsembleSpec,
    free_sum_check,
    run_experiment,
    sample_ginibre,
    sample_haar_unitary,
    singular_moment_check,
    stable_brown,
)


def test_ginibre_entry_variance():
    rng = np.random.default_rng(11)
    draws = np.abs(np.array([sample_ginibre(1, rng)[0, 0] for _ in range(100_000)])) ** 2
    # |g|^2 is Exp(1): sd 1, so 3 sigma of the mean is 3 / sqrt(N)
    assert abs(draws.mean() - 1) < 3 / np.sqrt(draws.size)


def test_ginibre_trace_normalization():
    rng = np.random.default_rng(12)
    vals = [np.trace(g @ g.conj().T).real / 256 for g in (sample_ginibre(256, rng) for _ in range(50))]
    assert abs(np.mean(vals) - 1) < 0.02


def test_ginibre_deterministic():
    a = sample_ginibre(8, np.random.default_rng(5))
    b = sample_ginibre(8, np.random.default_rng(5))
    assert a.tobytes() == b.tobytes()


def test_haar_unitary_properties():
    u = sample_haar_unitary(64, np.random.default_rng(1))
    assert np.max(np.abs(u.conj().T @ u - np.eye(64))) < 1e-10
    assert np.max(np.abs(np.abs(np.linalg.eigvals(u)) - 1)) < 1e-8


def test_haar_trace_centered():
    rng = np.random.default_rng(2)
    tr = [np.trace(sample_haar_unitary(256, rng)) / 256 for _ in range(100)]
    assert abs(np.mean(tr)) < 0.05


def test_haar_n1_uniform_phase():
    rng = np.random.default_rng(3)
    ph = np.array([np.angle(sample_haar_unitary(1, rng)[0, 0]) for _ in range(4000)])
    assert stats.kstest(ph, stats.uniform(loc=-np.pi, scale=2 * np.pi).cdf).pvalue > 1e-3


def test_spec_validation():
    with pytest.raises(ValidationError):
        EnsembleSpec("gue", 4)
    with pytest.raises(ValidationError):
        EnsembleSpec("ginibre", 4, trials=0)
    with pytest.raises(ValidationError):
        EnsembleSpec("truncated_haar", 4, s=0.5)
    with pytest.raises(ValidationError):
        EnsembleSpec("free_sum", 4)


def test_truncation_size():
    assert EnsembleSpec("truncated_haar", 1024, s=2).m == 512
    a, _ = rmt.build_matrix(EnsembleSpec("truncated_haar", 10, s=3), np.random.default_rng(0))
    assert a.shape == (3, 3)


def test_reproducible_and_schedule_independent():
    spec = EnsembleSpec("ginibre_product", 48, trials=4, seed=99, k=1)
    a = run_experiment(spec, stable_brown(1))
    b = run_experiment(spec, stable_brown(1), parallel=3)
    assert a.scaled_radii.tobytes() == b.scaled_radii.tobytes()
    assert a.ks == b.ks
    ja, jb = a.to_json(), b.to_json()
    ja.pop("wall_time_s"), jb.pop("wall_time_s")
    assert ja == jb


def test_report_fields():
    rep = run_experiment(EnsembleSpec("ginibre", 32, 2, 1), stable_brown(0))
    assert np.all(np.diff(rep.scaled_radii) >= 0)
    assert 0 <= rep.ks <= 1
    assert set(rep.to_json()) >= {"spec", "ks", "n_resamples", "radii_quantiles", "wall_time_s"}


def test_singular_inverse_factor(monkeypatch):
    monkeypatch.setattr(rmt, "COND_LIMIT", 1.0)
    with pytest.raises(SingularInverseFactor):
        run_experiment(EnsembleSpec("ginibre_product", 8, 1, 0, k=1), stable_brown(1))


def test_free_sum_smoke():
    start = time.perf_counter()
    rep = free_sum_check(1, 64, 1, seed=3)
    assert time.perf_counter() - start < 1.0
    assert rep.scaled_radii.size == 64


def test_singular_moment_gamma_zero():
    res = singular_moment_check(1, 0.0, 32, 2, seed=4)
    assert res.empirical == 1.0 and res.predicted == 1.0


def test_singular_moment_near_divergent_flag():
    res = singular_moment_check(1, 0.45, 64, 3, seed=5)
    assert res.near_divergent and np.isfinite(res.empirical)
    assert not singular_moment_check(1, 0.25, 64, 2, seed=5).near_divergent


def test_singular_moment_rejects_divergent_gamma():
    with pytest.raises(ValidationError):
        singular_moment_check(1, 0.5, 16, 1)


@pytest.mark.slow
def test_truncated_haar_ks_shrinks_with_n():
    pred = compressed_brown(point_mass(1.0), CompressionParams(2.0, "sqrt_s"))
    medians = []
    for n in (256, 512, 1024):
        ks = [
            run_experiment(EnsembleSpec("truncated_haar", n, 1, seed, s=2.0), pred, np.sqrt(2)).ks
            for seed in range(20)
        ]
        medians.append(np.median(ks))
    assert medians[0] > medians[1] > medians[2]
