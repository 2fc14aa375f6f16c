"""The stable family mu_beta.

mu_beta is the Brown measure of x = u h with S_{h^2}(z) = (-z)^beta / (1 + z),
beta >= 0.  Its radial quantile is t^(1/2) (1 - t)^(-beta/2); the semigroup
acts on it by dilation with factor s^((1 + beta)/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain, ValidationError
from .measures import ExtendedReal
from .roots import bracket, invert_increasing
from .semigroup import CompressionParams, compress_s, compressed_brown
from .transforms import STransformTable, analytic_table


@dataclass(frozen=True)
class StableParams:
    beta: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValidationError("beta must be >= 0")
        if not self.c > 0:
            raise ValidationError("c must be > 0")


def _stable_values(beta, c, z):
    return c * np.power(-z, beta) / (1 + z)


def stable_s(params: StableParams, z):
    """c (-z)^beta / (1 + z) on (-1, 0)."""
    za = np.asarray(z, dtype=float)
    if np.any(~((za > -1) & (za < 0))):
        raise OutOfDomain("stable S-transform is evaluated on (-1, 0)")
    out = _stable_values(params.beta, params.c, za)
    return float(out) if out.ndim == 0 else out


def stable_table(params: StableParams) -> STransformTable:
    right = params.c if params.beta == 0 else 0.0
    return analytic_table(
        lambda z: _stable_values(params.beta, params.c, z),
        domain_left=-1.0,
        limit_left=math.inf,
        limit_right=right,
    )


def mu_beta_quantile(beta: float, t, c: float = 1.0):
    """Radius of the disk carrying mass t: t^(1/2) (1 - t)^(-beta/2), scaled by c^(-1/2)."""
    ta = np.asarray(t, dtype=float)
    if np.any(~((ta > 0) & (ta < 1))):
        raise OutOfDomain("t must lie in (0, 1)")
    out = np.sqrt(ta) * np.exp(-0.5 * beta * np.log1p(-ta)) / math.sqrt(c)
    return float(out) if out.ndim == 0 else out


def _radius_to_t(beta, r):
    # r(v) with v = log(1 - t); -log r is increasing in v on (-inf, 0)
    target = -np.log(r)

    def h(v):
        return -0.5 * np.log(-np.expm1(v)) + 0.5 * beta * v

    def dh(v):
        return 0.5 * np.exp(v) / -np.expm1(v) + 0.5 * beta

    lo, hi = bracket(h, target, -1.0, -1.0, lambda v: 2 * v, lambda v: 0.5 * v)
    v = invert_increasing(h, target, lo, hi, fprime=dh)
    return -np.expm1(v), np.exp(v)


def mu_beta_radial_density(beta: float, r, planar: bool = True):
    """Density of mu_beta at radius r.

    ``planar=True`` gives rho_beta(r) with d mu = rho(|z|) dm_2(z);
    ``planar=False`` gives the density f_beta(r) = 2 pi r rho_beta(r) of |Z|.
    """
    if not beta > 0:
        raise ValidationError("radial density is provided for beta > 0")
    ra = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(ra <= 0):
        raise OutOfDomain("radius must be positive")
    t, one_minus_t = _radius_to_t(beta, ra)
    drdt = 0.5 * t**-0.5 * one_minus_t ** (-beta / 2) + 0.5 * beta * t**0.5 * one_minus_t ** (-beta / 2 - 1)
    f = 1.0 / drdt
    out = f / (2 * np.pi * ra) if planar else f
    return float(out[0]) if np.ndim(r) == 0 else out


def _gamma_ratio(num, den):
    if max(num + den) < 170:
        return math.prod(math.gamma(a) for a in num) / math.prod(math.gamma(a) for a in den)
    return math.exp(sum(math.lgamma(a) for a in num) - sum(math.lgamma(a) for a in den))


def mu_beta_abs_moment(beta: float, k: float) -> ExtendedReal:
    """E|Z|^k for Z ~ mu_beta; unbounded once beta k >= 2."""
    if k < 0:
        raise ValidationError("moment order must be >= 0")
    if beta * k >= 2:
        return ExtendedReal.infinite()
    return ExtendedReal(_gamma_ratio((1 + k / 2, 1 - beta * k / 2), (2 + k / 2 - beta * k / 2,)))


def nu_beta_moment(beta: float, gamma: float) -> ExtendedReal:
    """int x^gamma d nu_beta(x), nu_beta the law of |x|^2 for the stable x."""
    if not beta > 0:
        raise ValidationError("nu_beta moments are provided for beta > 0")
    if gamma == 0:
        return ExtendedReal(1.0)
    if not -0.5 < gamma < 1.0 / (1.0 + beta):
        return ExtendedReal.infinite()
    sinc = float(np.sinc(gamma))
    ratio = _gamma_ratio((1 + 2 * gamma, 1 - (1 + beta) * gamma), (2 + (1 - beta) * gamma,))
    return ExtendedReal(sinc * ratio)


def stable_scaling_factor(beta: float, s: float) -> float:
    """alpha_s = s^((1 + beta)/2): mu_beta^{boxplus s} is the law of alpha_s Z."""
    if not s > 0:
        raise ValidationError("s must be positive")
    return s ** ((1 + beta) / 2)


def _interior_z(n: int) -> np.ndarray:
    return -(np.arange(n) + 0.5) / n


def stability_residual(beta: float, s: float, c: float = 1.0, n: int = 512) -> float:
    """Max |compress_s(S_beta, s)(z) - s^-(1+beta) S_beta(z)| over interior z."""
    p = StableParams(beta, c)
    base = stable_table(p)
    z = _interior_z(n)
    lhs = compress_s(base, s)(z)
    rhs = s ** -(1 + beta) * stable_s(p, z)
    return float(np.max(np.abs(lhs - rhs)))


def dilation_residual(beta: float, s: float, n: int = 512) -> float:
    """Max relative gap between the quantile of mu_beta^{boxplus s} and alpha_s * Q_beta."""
    b = compressed_brown(stable_table(StableParams(beta)), CompressionParams(s, "s"), n)
    expected = stable_scaling_factor(beta, s) * mu_beta_quantile(beta, b.t_grid)
    return float(np.max(np.abs(b.q_values / expected - 1)))
