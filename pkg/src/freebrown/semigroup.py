"""Free-compression semigroup of Brown measures of R-diagonal elements.

For x = u h with Brown measure mu, the s-th member of the semigroup
(equivalently the Brown measure of s * [P_s x P_s] with tr P_s = 1/s) has

    S_s(z) = (1/s) * (1 + z/s) / (1 + z) * S_{h^2}(z/s),

and the Brown measure of any R-diagonal element is recovered from S_{h^2}
through its radial quantile Q(t) = S_{h^2}(t - 1) ** (-1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonMonotoneS, ValidationError, VarianceNotNormalized
from .measures import PositiveRealMeasure, RadialBrownMeasure, chebyshev_t_grid, moment
from .transforms import STransformTable, r_from_s, s_table

SCALINGS = ("none", "sqrt_s", "s")


@dataclass(frozen=True)
class CompressionParams:
    """Semigroup time ``s >= 1`` and which rescaling of pi_s(x) to report.

    ``none``: pi_s(x); ``sqrt_s``: sqrt(s) pi_s(x); ``s``: s pi_s(x), the
    semigroup member itself.
    """

    s: float
    scaling: str = "sqrt_s"

    def __post_init__(self):
        if not self.s >= 1:
            raise ValidationError("semigroup time s must be >= 1")
        if self.scaling not in SCALINGS:
            raise ValidationError(f"scaling must be one of {SCALINGS}")

    @property
    def radius_factor(self) -> float:
        return {"none": 1.0 / self.s, "sqrt_s": 1.0 / math.sqrt(self.s), "s": 1.0}[self.scaling]


def compress_s(base: STransformTable, s: float) -> STransformTable:
    """S-transform of h_s^2 given the S-transform of h^2."""
    if not s >= 1:
        raise ValidationError("semigroup time s must be >= 1")
    if s == 1:
        return base
    left = max(s * base.domain_left, -1.0)

    def ev(z):
        return (1.0 / s) * (1 + z / s) / (1 + z) * np.asarray(base.evaluator(z / s), dtype=float)

    return STransformTable(left, ev, "compressed", math.inf, base.limit_right / s, False)


def power_s(base: STransformTable, s: float) -> STransformTable:
    """S-transform of the free additive power nu^{boxplus s}: (1/s) S_nu(z/s)."""
    if not s >= 1:
        raise ValidationError("power s must be >= 1")
    left = max(s * base.domain_left, -1.0)

    def ev(z):
        return np.asarray(base.evaluator(z / s), dtype=float) / s

    return STransformTable(left, ev, "compressed", math.inf, base.limit_right / s, base.point_mass)


def atom_after_compression(delta, s):
    """Mass at 0 of the s-th semigroup member: max(1 - s (1 - delta), 0)."""
    if not 0 <= delta < 1:
        raise ValidationError("delta must lie in [0, 1)")
    if not s >= 1:
        raise ValidationError("semigroup time s must be >= 1")
    return max(1 - s * (1 - delta), 0)


def brown_from_s(S: STransformTable, delta: float, n: int = 512) -> RadialBrownMeasure:
    """Radial Brown measure with quantile Q(t) = S(t - 1)^(-1/2) on (delta, 1)."""
    if abs(S.domain_left - (delta - 1)) > 1e-10:
        raise ValidationError(
            f"S-transform domain starts at {S.domain_left:.12g}, expected delta - 1 = {delta - 1:.12g}"
        )
    t = chebyshev_t_grid(n, delta, 1.0)
    vals = np.asarray(S.evaluator(t - 1.0), dtype=float)
    if np.any(~(vals > 0)):
        raise NonMonotoneS("S-transform must be positive on its domain")
    q = vals**-0.5
    drop = np.diff(q) < -1e-10 * np.maximum(q[1:], 1.0)
    if drop.any():
        raise NonMonotoneS("S-transform is increasing somewhere; quantile would decrease")
    q = np.maximum.accumulate(q)
    r_min = 0.0 if math.isinf(S.limit_left) else S.limit_left**-0.5
    r_max = math.inf if S.limit_right == 0 else S.limit_right**-0.5
    r_min = min(r_min, float(q[0]))
    r_max = max(r_max, float(q[-1]))

    lo_t, hi_t = np.nextafter(delta, 1.0), np.nextafter(1.0, 0.0)

    def quantile(tt):
        tt = np.clip(np.atleast_1d(np.asarray(tt, dtype=float)), lo_t, hi_t)
        with np.errstate(divide="ignore"):
            return np.asarray(S.evaluator(tt - 1.0), dtype=float) ** -0.5

    return RadialBrownMeasure(delta, t, q, r_min, r_max, quantile)


def _base_table(h2: Union[PositiveRealMeasure, STransformTable]) -> STransformTable:
    return h2 if isinstance(h2, STransformTable) else s_table(h2)


def compressed_brown(
    h2: Union[PositiveRealMeasure, STransformTable], p: CompressionParams, n: int = 512
) -> RadialBrownMeasure:
    """Brown measure of pi_s(x), sqrt(s) pi_s(x) or s pi_s(x) for x with |x|^2 ~ h2."""
    base = _base_table(h2)
    delta_s = atom_after_compression(base.delta, p.s)
    b = brown_from_s(compress_s(base, p.s), delta_s, n)
    return b.dilate(p.radius_factor)


@dataclass(frozen=True)
class SupportDescriptor:
    kind: str  # "disk" or "annulus"
    inner: float
    outer: float


def support_after_compression(b: RadialBrownMeasure, s: float) -> SupportDescriptor:
    """Support of the s-th semigroup member; any inner hole closes once s > 1."""
    if not s >= 1:
        raise ValidationError("semigroup time s must be >= 1")
    if s == 1:
        inner = b.r_min if b.atom0 == 0 else 0.0
        return SupportDescriptor("annulus" if inner > 0 else "disk", inner, b.r_max)
    return SupportDescriptor("disk", 0.0, math.sqrt(s) * b.r_max)


def disk_convergence_gap(h2: PositiveRealMeasure, s: float, n: int = 512) -> float:
    """Sup distance between the sqrt(s)-scaled compressed quantile and sqrt(t).

    Includes the endpoint limits t -> delta_s and t -> 1.
    """
    m1 = moment(h2, 1.0)
    if m1.unbounded or abs(m1.value - 1.0) > 1e-6:
        raise VarianceNotNormalized("requires int t dmu_{h^2} = 1")
    b = compressed_brown(h2, CompressionParams(s, "sqrt_s"), n)
    gap = float(np.max(np.abs(b.q_values - np.sqrt(b.t_grid))))
    gap = max(gap, abs(b.r_max - 1.0), abs(b.r_min - math.sqrt(b.atom0)), math.sqrt(b.atom0))
    return gap


def _z_grid(left: float, n: int) -> np.ndarray:
    return left * (np.arange(n) + 0.5) / n


def semigroup_additivity_check(h2, s1: float, s2: float, n: int = 256) -> float:
    """Max |compress(compress(S, s1), s2) - compress(S, s1 s2)| on a grid of z."""
    base = _base_table(h2)
    twice = compress_s(compress_s(base, s1), s2)
    once = compress_s(base, s1 * s2)
    z = _z_grid(once.domain_left, n)
    return float(np.max(np.abs(twice(z) - once(z))))


def r_additivity_residual(h2, s1: float, s2: float, points: np.ndarray) -> float:
    """Max |R_{nu^{s1}} + R_{nu^{s2}} - R_{nu^{s1+s2}}| at the given points.

    The powers are formed at the S level, so this checks that the S-level
    power law carries the additive R-level semigroup.
    """
    base = _base_table(h2)
    r1 = r_from_s(power_s(base, s1), points)
    r2 = r_from_s(power_s(base, s2), points)
    r12 = r_from_s(power_s(base, s1 + s2), points)
    return float(np.max(np.abs(r1 + r2 - r12)))


def common_r_points(h2, k: int, rng: np.random.Generator, s_max: float = 1.0) -> np.ndarray:
    """Random points inside the R-domain shared by every power 1 <= s <= s_max."""
    base = _base_table(h2)
    w0 = 0.5 * max(base.domain_left, -1.0 / s_max)
    z0 = float(w0 * base(w0))
    return z0 * rng.uniform(0.02, 0.98, size=k)
