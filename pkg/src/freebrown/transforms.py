"""Cauchy, psi, chi, R and S transforms on the negative real axis.

Conventions::

    G(z)   = int dmu(t) / (z - t)
    psi(u) = int u t / (1 - u t) dmu(t),        u < 0
    chi    = inverse of psi on (delta - 1, 0),  delta = mu({0})
    S(w)   = (1 + w) / w * chi(w)
    R(w)   = G^{-1}(w) - 1 / w

For a symmetric measure psi is evaluated on the imaginary axis, psi(i t) is
real, and the S-transform is purely imaginary; it is returned as a positive
magnitude ``m`` with S = -i m, so S**2 = -m**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import AtomAtZero, DeltaZeroMeasure, OutOfDomain, PointOnSupport
from .measures import PositiveRealMeasure, SymmetricRealMeasure, moment
from .roots import bracket, invert_increasing

Measure = Union[PositiveRealMeasure, SymmetricRealMeasure]

PROVENANCES = ("analytic", "psiInversion", "compressed")
EDGE_TOL = 1e-9


def _as_array(x):
    a = np.asarray(x, dtype=float)
    return a.ndim == 0, np.atleast_1d(a)


def _ret(scalar, a):
    return float(a[0]) if scalar else a


# -- Cauchy transform ---------------------------------------------------------


def cauchy(mu: Measure, z):
    """G_mu(z) for real z off the support or complex z with Im z != 0."""
    x, w = mu.nodes()
    z_arr = np.asarray(z)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.iscomplexobj(z_arr):
        real = z_arr.imag == 0
    else:
        real = np.ones(z_arr.shape, bool)
    zr = z_arr.real
    if np.any(real & (zr >= x[0]) & (zr <= x[-1])):
        raise PointOnSupport("real argument lies within the support")
    g = np.sum(w / (z_arr[:, None] - x[None, :]), axis=1)
    if scalar:
        return g[0]
    return g


# -- psi / chi / S for measures on [0, inf) -----------------------------------


def _psi_parts(mu: PositiveRealMeasure):
    x, w = mu.nodes()

    def psi_(u):
        ut = u[:, None] * x[None, :]
        return np.sum(w * ut / (1 - ut), axis=1)

    def one_plus_psi(u):
        return np.sum(w / (1 - u[:, None] * x[None, :]), axis=1)

    def dpsi(u):
        d = 1 - u[:, None] * x[None, :]
        return np.sum(w * x / (d * d), axis=1)

    return psi_, one_plus_psi, dpsi


def psi(mu: PositiveRealMeasure, u):
    scalar, u = _as_array(u)
    if np.any(u >= 0):
        raise OutOfDomain("psi is evaluated on u < 0")
    return _ret(scalar, _psi_parts(mu)[0](u))


def _check_w(w, delta):
    if np.any(~((w > delta - 1) & (w < 0))):
        raise OutOfDomain(f"argument outside ({delta - 1:.6g}, 0)")


def _invert_on_negative_axis(f, f1p, df, w):
    """Solve f(u) = w for u < 0; near w = -1 the equivalent 1 + f = 1 + w is used."""
    u = np.empty_like(w)
    near = w <= -0.5
    for sel, func, target in ((~near, f, w), (near, f1p, 1 + w)):
        if not sel.any():
            continue
        tgt = target[sel]
        lo, hi = bracket(func, tgt, -1.0, -1e-12, lambda v: 2 * v, lambda v: 0.5 * v)
        u[sel] = invert_increasing(func, tgt, lo, hi, fprime=df)
    return u


def chi(mu: PositiveRealMeasure, w):
    """Inverse of psi: the unique u < 0 with psi(u) = w."""
    scalar, w = _as_array(w)
    _check_w(w, mu.atom0)
    f, f1p, df = _psi_parts(mu)
    return _ret(scalar, _invert_on_negative_axis(f, f1p, df, w))


def s_transform(mu: PositiveRealMeasure, w):
    if mu.is_delta_zero():
        raise DeltaZeroMeasure("S-transform of delta_0 is undefined")
    scalar, w = _as_array(w)
    return _ret(scalar, (1 + w) / w * chi(mu, w))


@dataclass(frozen=True)
class STransformTable:
    """An evaluable S-transform on (domain_left, 0).

    ``limit_left`` / ``limit_right`` are the limits of S at the two ends of
    the domain (``inf`` allowed).  With ``branch_factor`` set the evaluator
    returns magnitudes m of a purely imaginary symmetric S-transform.
    """

    domain_left: float
    evaluator: Callable = field(compare=False, repr=False)
    provenance: str = "analytic"
    limit_left: float = math.inf
    limit_right: float = 0.0
    point_mass: bool = False
    branch_factor: bool = False

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __call__(self, z):
        scalar, z = _as_array(z)
        if np.any(~((z > self.domain_left) & (z < 0))):
            raise OutOfDomain(f"S-transform argument outside ({self.domain_left:.6g}, 0)")
        return _ret(scalar, np.asarray(self.evaluator(z), dtype=float))

    @property
    def delta(self) -> float:
        """Atom at zero implied by the domain: domain_left = delta - 1."""
        return self.domain_left + 1.0


def s_table(mu: PositiveRealMeasure) -> STransformTable:
    """S-transform of ``mu`` by numerical psi-inversion."""
    if mu.is_delta_zero():
        raise DeltaZeroMeasure("S-transform of delta_0 is undefined")
    m1 = moment(mu, 1.0)
    right = 0.0 if m1.unbounded else 1.0 / m1.value
    if mu.atom0 > 0:
        left = math.inf
    else:
        mm1 = moment(mu, -1.0)
        left = math.inf if mm1.unbounded else mm1.value

    def ev(z):
        out = np.empty_like(z)
        edge = z > -EDGE_TOL
        out[edge] = right
        if (~edge).any():
            out[~edge] = s_transform(mu, z[~edge])
        return out

    return STransformTable(mu.atom0 - 1.0, ev, "psiInversion", left, right, mu.is_point_mass())


def analytic_table(fn, domain_left=-1.0, limit_left=math.inf, limit_right=0.0, point_mass=False):
    return STransformTable(domain_left, fn, "analytic", limit_left, limit_right, point_mass)


def s_multiply(sa: STransformTable, sb: STransformTable, w):
    """S_{a box-times b}(w) = S_a(w) S_b(w) on the intersected domain."""
    return multiply_tables(sa, sb)(w)


def multiply_tables(sa: STransformTable, sb: STransformTable) -> STransformTable:
    left = max(sa.domain_left, sb.domain_left)
    prov = "analytic" if sa.provenance == sb.provenance == "analytic" else "psiInversion"
    ll = sa.limit_left * sb.limit_left if left == sa.domain_left == sb.domain_left else math.inf
    lr = sa.limit_right * sb.limit_right
    return STransformTable(
        left,
        lambda z: sa.evaluator(z) * sb.evaluator(z),
        prov,
        ll,
        lr,
        sa.point_mass and sb.point_mass,
    )


def s_of_inverse(mu: PositiveRealMeasure, w):
    """S of the image of ``mu`` under t -> 1/t, via S_inv(w) S(-1 - w) = 1."""
    if mu.atom0 > 0:
        raise AtomAtZero("inverse measure needs mu({0}) = 0")
    scalar, w = _as_array(w)
    return _ret(scalar, 1.0 / s_transform(mu, -1.0 - w))


# -- symmetric measures -------------------------------------------------------


def _sym_parts(nu: SymmetricRealMeasure):
    xs, ws = nu.nodes()
    xp, wp = nu.positive_part.nodes()

    # psi(i t) written as a function of tau = -t < 0, which makes it increasing
    def f(tau):
        itx = 1j * (-tau)[:, None] * xs[None, :]
        return np.sum(ws * itx / (1 - itx), axis=1).real

    def f1p(tau):
        itx = 1j * (-tau)[:, None] * xs[None, :]
        return np.sum(ws / (1 - itx), axis=1).real

    def df(tau):
        t = -tau[:, None]
        d = 1 + (t * xp[None, :]) ** 2
        return np.sum(wp * 2 * t * xp**2 / (d * d), axis=1)

    return f, f1p, df


@dataclass(frozen=True)
class BranchValue:
    """Purely imaginary S-transform value S = -i * magnitude (H-branch)."""

    magnitude: Union[float, np.ndarray]

    def square(self):
        return -np.square(self.magnitude)

    def complex_value(self):
        return -1j * np.asarray(self.magnitude)


def symmetric_s_transform(nu: SymmetricRealMeasure, w) -> BranchValue:
    """S-transform of an even measure on the H-branch (psi evaluated at i t, t > 0)."""
    if nu.positive_part.is_delta_zero():
        raise DeltaZeroMeasure("S-transform of delta_0 is undefined")
    scalar, w = _as_array(w)
    _check_w(w, nu.atom0)
    f, f1p, df = _sym_parts(nu)
    t = -_invert_on_negative_axis(f, f1p, df, w)
    m = np.abs((1 + w) / w) * t
    return BranchValue(_ret(scalar, m))


def symmetric_s_table(nu: SymmetricRealMeasure) -> STransformTable:
    return STransformTable(
        nu.atom0 - 1.0,
        lambda z: symmetric_s_transform(nu, z).magnitude,
        "psiInversion",
        branch_factor=True,
        point_mass=nu.positive_part.is_point_mass(),
    )


def s_of_square(nu: SymmetricRealMeasure, w):
    """S of the image of ``nu`` under t -> t^2: w / (1 + w) * S_nu(w)^2."""
    scalar, w = _as_array(w)
    sq = symmetric_s_transform(nu, w).square()
    return _ret(scalar, w / (1 + w) * sq)


# -- R-transform --------------------------------------------------------------


@dataclass(frozen=True)
class RTransformTable:
    """R-transform on (-epsilon, 0), computed by inverting G left of the support."""

    epsilon: float
    evaluator: Callable = field(compare=False, repr=False)
    inverse_cauchy: Callable = field(compare=False, repr=False)
    cauchy_derivative: Callable = field(compare=False, repr=False)

    def __call__(self, w):
        scalar, w = _as_array(w)
        if np.any(~((w > -self.epsilon) & (w < 0))):
            raise OutOfDomain(f"R-transform argument outside ({-self.epsilon:.6g}, 0)")
        return _ret(scalar, self.evaluator(w))


def r_table(mu: Measure) -> RTransformTable:
    """Tabulate R by inverting the decreasing map z -> G(z) on (-inf, inf supp)."""
    x, wts = mu.nodes()
    a = float(x[0])
    floor = 4 * np.finfo(float).eps * max(1.0, abs(a))

    def g(y):  # G(a - y), increasing in y > 0
        return np.sum(wts / ((a - y)[:, None] - x[None, :]), axis=1)

    def dg(y):
        d = (a - y)[:, None] - x[None, :]
        return np.sum(wts / (d * d), axis=1)

    offsets = 2.0 ** np.arange(-40, 41)
    offsets = offsets[offsets > floor]
    eps = float(np.max(-g(offsets)))

    def ginv(w):
        lo, hi = np.full(w.shape, 1e-12 * max(1.0, abs(a))), np.ones(w.shape)
        lo = np.maximum(lo, floor)
        for _ in range(200):
            bad = g(lo) > w
            if not bad.any():
                break
            if np.any(lo[bad] <= floor):
                raise OutOfDomain("R-transform argument beyond the range of G")
            lo[bad] = np.maximum(0.5 * lo[bad], floor)
        lo, hi = bracket(g, w, lo, hi, lambda v: np.maximum(0.5 * v, floor), lambda v: 2 * v)
        y = invert_increasing(g, w, lo, hi, fprime=dg)
        return a - y

    def ev(w):
        return ginv(w) - 1.0 / w

    def dG(z):
        d = z[:, None] - x[None, :]
        return -np.sum(wts / (d * d), axis=1)

    return RTransformTable(eps, ev, ginv, dG)


def r_transform(mu: Measure, w):
    return r_table(mu)(w)


def s_from_r(mu: PositiveRealMeasure, w, r: Optional[RTransformTable] = None):
    """S(w) = C^{-1}(w) / w with C(z) = z R(z), C inverted by monotone root finding."""
    scalar, w = _as_array(w)
    _check_w(w, mu.atom0)
    r = r_table(mu) if r is None else r
    eps = r.epsilon
    cap = -eps * (1 - 1e-12) if math.isfinite(eps) else -math.inf

    last = {}

    def ginv(z):
        # the root finder evaluates C and dC at the same points back to back
        prev = last.get("z")
        if prev is None or prev.shape != z.shape or not np.array_equal(prev, z):
            last["z"], last["y"] = z.copy(), r.inverse_cauchy(z)
        return last["y"]

    def C(z):
        return z * ginv(z) - 1.0

    def dC(z):
        y = ginv(z)
        return y + z / r.cauchy_derivative(y)

    lo = np.full(w.shape, max(-min(1.0, 0.5 * eps), cap))
    for _ in range(2100):
        bad = C(lo) > w
        if not bad.any():
            break
        if np.any(lo[bad] <= cap):
            raise OutOfDomain("w outside the range of z R(z)")
        lo[bad] = np.maximum(2 * lo[bad], cap)
    hi = np.full(w.shape, -1e-12 * min(1.0, eps))
    lo, hi = bracket(C, w, lo, hi, lambda v: v, lambda v: 0.5 * v)
    z = invert_increasing(C, w, lo, hi, fprime=dC)
    return _ret(scalar, z / w)


def r_from_s(table: STransformTable, z):
    """R(z) recovered from an S-transform: w S(w) is the inverse of z R(z)."""
    scalar, z = _as_array(z)
    left = table.domain_left

    def K(w):
        return w * np.asarray(table.evaluator(w), dtype=float)

    # S is decreasing, so w S(w) = z forces z / S(left+) <= w <= z / S(0-)
    span = -left
    lo = np.full(z.shape, left + 1e-14 * span)
    hi = np.full(z.shape, -1e-300)
    if table.limit_right > 0:
        lo = np.maximum(lo, z / table.limit_right * (1 + 1e-12))
    if math.isfinite(table.limit_left):
        hi = np.minimum(hi, z / table.limit_left * (1 - 1e-12))
    if np.any(K(lo) > z) or np.any(K(hi) < z):
        raise OutOfDomain("argument outside the range of w S(w)")
    def dK(w):
        # central difference kept inside the domain; only used for Newton polish
        h = 1e-6 * np.minimum(-w, w - left)
        return (K(w + h) - K(w - h)) / (2 * h)

    w = invert_increasing(K, z, lo, hi, fprime=dK)
    return _ret(scalar, w / z)
