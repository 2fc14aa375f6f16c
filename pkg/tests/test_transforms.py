import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from freebrown.errors import AtomAtZero, DeltaZeroMeasure, OutOfDomain, PointOnSupport
from freebrown.measures import (
    PositiveRealMeasure,
    free_poisson,
    point_mass,
    pushforward,
    quarter_circular,
    symmetrize,
)
from freebrown.transforms import (
    analytic_table,
    cauchy,
    chi,
    psi,
    r_from_s,
    r_table,
    r_transform,
    s_from_r,
    s_multiply,
    s_of_inverse,
    s_of_square,
    s_table,
    s_transform,
    symmetric_s_transform,
)

from conftest import atomic_measures, interior

BERN = PositiveRealMeasure.from_atoms([(1, 0.5), (4, 0.5)])
FP = free_poisson(1.0)
W3 = np.array([-0.9, -0.5, -0.1])


def mp_cauchy(z):
    # closed-form Marchenko-Pastur(1) Cauchy transform on z < 0
    return (z + np.sqrt(z * z - 4 * z)) / (2 * z)


# -- Cauchy ----------------------------------------------------------------


def test_cauchy_point_masses():
    assert cauchy(point_mass(1.0), 2.0) == pytest.approx(1.0)
    delta0 = PositiveRealMeasure(1.0, np.array([]), np.array([]))
    assert cauchy(delta0, 3.0 + 1j) == pytest.approx(1 / (3.0 + 1j))


def test_cauchy_free_poisson_at_minus_one():
    g = cauchy(FP, -1.0)
    assert g == pytest.approx(mp_cauchy(-1.0), abs=1e-10)
    assert g == pytest.approx(-0.6180339887, abs=1e-4)
    dens = lambda x: math.sqrt((4 - x) / x) / (2 * math.pi)
    ref, _ = integrate.quad(lambda x: dens(x) / (-1 - x), 0, 4)
    assert g == pytest.approx(ref, abs=1e-9)


def test_cauchy_upper_half_plane_sign():
    z = np.array([0.5 + 0.1j, 2 + 1j, -3 + 0.01j])
    assert np.all(cauchy(FP, z).imag < 0)


def test_cauchy_on_support_rejected():
    with pytest.raises(PointOnSupport):
        cauchy(BERN, 2.0)


# -- psi / chi / S ---------------------------------------------------------


def test_psi_examples():
    assert psi(point_mass(1.0), -1.0) == pytest.approx(-0.5)
    assert psi(point_mass(3.0), -0.7) == pytest.approx(-2.1 / 3.1)
    assert psi(BERN, -1.0) == pytest.approx(-0.65, abs=1e-15)


def test_chi_examples():
    assert chi(point_mass(1.0), -0.5) == pytest.approx(-1.0, abs=1e-12)
    c, w = 2.5, -0.3
    assert chi(point_mass(c), w) == pytest.approx(w / (c * (1 + w)), abs=1e-12)
    assert abs(chi(BERN, -0.65) + 1) < 1e-10


def test_chi_out_of_domain():
    mu = PositiveRealMeasure.from_atoms([(1, 0.5)], atom0=0.5)
    with pytest.raises(OutOfDomain):
        chi(mu, -0.6)


def test_s_point_mass_constant():
    assert np.allclose(s_transform(point_mass(4.0), W3), 0.25, atol=1e-12)


def test_s_free_poisson():
    assert np.max(np.abs(s_transform(FP, W3) - 1 / (1 + W3))) < 1e-8


def test_s_bernoulli_quadratic_oracle():
    # psi(u) = -1/2 clears to a polynomial in u; pick its negative root
    w = -0.5
    p1, p2 = np.poly1d([-1, 1]), np.poly1d([-4, 1])  # 1 - u, 1 - 4u
    u = np.poly1d([1, 0])
    poly = 0.5 * (u * p2 + 4 * u * p1) - w * p1 * p2
    root = [r.real for r in poly.roots if abs(r.imag) < 1e-14 and r.real < 0][0]
    assert s_transform(BERN, w) == pytest.approx((1 + w) / w * root, abs=1e-12)


def test_s_of_delta_zero_rejected():
    with pytest.raises(DeltaZeroMeasure):
        s_transform(PositiveRealMeasure(1.0, np.array([]), np.array([])), -0.5)


@given(atomic_measures(with_atom0=True), st.lists(st.floats(0, 1), min_size=10, max_size=10))
def test_psi_chi_round_trip(mu, fracs):
    w = interior(mu.atom0, np.array(fracs))
    assert np.max(np.abs(psi(mu, chi(mu, w)) - w)) < 1e-10


@given(atomic_measures(with_atom0=True))
def test_s_monotone(mu):
    w = np.linspace(mu.atom0 - 1 + 1e-3, -1e-3, 60)
    d = np.diff(s_transform(mu, w))
    if mu.is_point_mass():
        assert np.all(np.abs(d) < 1e-12)
    else:
        assert np.all(d < 0)


@given(atomic_measures(), st.floats(0.2, 5), st.floats(0, 1))
def test_s_scaling(mu, t, frac):
    w = interior(0.0, frac)
    assert abs(s_transform(pushforward(mu, "dilate", t), w) - s_transform(mu, w) / t) < 1e-10


# -- symmetric branch ------------------------------------------------------


@pytest.mark.parametrize("c", [1.0, 2.0])
def test_symmetric_point_pair(c):
    nu = symmetrize(point_mass(c))
    w = np.linspace(-0.95, -0.05, 7)
    sq = symmetric_s_transform(nu, w).square()
    assert np.max(np.abs(sq - (1 + w) / w / c**2)) < 1e-12


def test_symmetric_value_is_imaginary():
    v = symmetric_s_transform(symmetrize(point_mass(1.0)), -0.5)
    z = v.complex_value()
    assert z.real == 0 and z.imag < 0 and z * z == pytest.approx(v.square())


def test_s_of_square_examples():
    w = np.linspace(-0.9, -0.1, 5)
    assert np.max(np.abs(s_of_square(symmetrize(point_mass(1.0)), w) - 1)) < 1e-12
    assert np.max(np.abs(s_of_square(symmetrize(point_mass(2.0)), w) - 0.25)) < 1e-12
    semicircle = symmetrize(quarter_circular())
    assert np.max(np.abs(s_of_square(semicircle, W3) - 1 / (1 + W3))) < 1e-8


@given(atomic_measures(), st.floats(0, 1))
def test_squaring_identity(pos, frac):
    w = interior(0.0, frac)
    lhs = s_of_square(symmetrize(pos), w)
    assert abs(lhs - s_transform(pushforward(pos, "square"), w)) < 1e-8


# -- inversion -------------------------------------------------------------


def test_s_of_inverse_examples():
    assert np.max(np.abs(s_of_inverse(FP, W3) + W3)) < 1e-8
    assert s_of_inverse(point_mass(3.0), -0.4) == pytest.approx(3.0, abs=1e-12)
    oracle = PositiveRealMeasure.from_atoms([(0.25, 0.5), (1, 0.5)])
    assert s_of_inverse(BERN, -0.3) == pytest.approx(s_transform(oracle, -0.3), abs=1e-12)


def test_s_of_inverse_rejects_atom():
    with pytest.raises(AtomAtZero):
        s_of_inverse(PositiveRealMeasure.from_atoms([(1, 0.5)], atom0=0.5), -0.3)


@given(atomic_measures(), st.floats(0, 1))
def test_inversion_identity(mu, frac):
    w = interior(0.0, frac)
    assert abs(s_of_inverse(mu, w) - s_transform(pushforward(mu, "inverse"), w)) < 1e-8


# -- products --------------------------------------------------------------


def test_s_multiply_examples():
    sa, sb = s_table(point_mass(2.0)), s_table(point_mass(5.0))
    assert s_multiply(sa, sb, -0.3) == pytest.approx(0.1, abs=1e-12)
    circ = analytic_table(lambda z: 1 / (1 + z))
    for k in (1, 2, 3):
        power = analytic_table(lambda z, k=k: (-z) ** k, limit_left=1.0)
        w = np.linspace(-0.99, -0.01, 50)
        assert np.array_equal(s_multiply(circ, power, w), 1 / (1 + w) * (-w) ** k)
    c = 3.0
    lhs = s_transform(pushforward(FP, "dilate", c), W3)
    assert np.max(np.abs(lhs - 1 / (c * (1 + W3)))) < 1e-8


# -- R side ----------------------------------------------------------------


def test_r_point_mass():
    assert np.allclose(r_transform(point_mass(2.0), np.array([-0.5, -0.1])), 2.0, atol=1e-12)


def test_r_free_poisson():
    w = np.array([-0.5, -0.2, -0.05])
    assert np.max(np.abs(r_transform(FP, w) - 1 / (1 - w))) < 1e-8


def test_r_inverts_cauchy():
    r = r_table(BERN)
    w = -np.array([0.05, 0.3, 0.9]) * min(1.0, r.epsilon)
    z = r(w) + 1 / w
    assert np.max(np.abs(cauchy(BERN, z) - w)) < 1e-10


@given(atomic_measures(), st.floats(0.2, 5), st.floats(0.05, 0.95))
def test_r_scaling(mu, t, frac):
    r_mu, r_t = r_table(mu), r_table(pushforward(mu, "dilate", t))
    z = -frac * min(1.0, r_mu.epsilon / t, r_t.epsilon)
    assert abs(r_t(z) - t * r_mu(t * z)) < 1e-10


def test_s_from_r_examples():
    assert s_from_r(point_mass(4.0), -0.3) == pytest.approx(0.25, abs=1e-12)
    assert np.max(np.abs(s_from_r(FP, W3) - 1 / (1 + W3))) < 1e-8
    assert s_from_r(BERN, -0.5) == pytest.approx(s_transform(BERN, -0.5), abs=1e-12)


@given(atomic_measures(), st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_s_from_r_matches_s(mu, fracs):
    w = interior(0.0, np.array(fracs))
    assert np.max(np.abs(s_from_r(mu, w) - s_transform(mu, w))) < 1e-8


@given(atomic_measures(), st.floats(0.05, 0.95))
def test_r_from_s_matches_r(mu, frac):
    r, s = r_table(mu), s_table(mu)
    # w S(w) sweeps (-S(-1+), 0), and S(-1+) is the -1 moment
    z = -frac * min(0.5, r.epsilon, s.limit_left)
    assert abs(r_from_s(s, z) - r(z)) < 1e-8
