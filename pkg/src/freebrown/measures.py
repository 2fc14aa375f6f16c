"""Measures on [0, inf), symmetric measures on R, and radial Brown measures.

A positive measure is an atom at zero, finitely many atoms, and an optional
density tabulated on a grid.  The density carries its own quadrature weights
so that every integral against the measure is a finite weighted sum over
``nodes()``.  A grid built from raw values gets trapezoid weights; the
closed-form families (free Poisson, quarter circle) come with tanh-sinh
weights in an angle variable, which keep their inverse-square-root edges
integrable to near machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InversionOfAtomAtZero, ValidationError
from .roots import invert_increasing

MASS_TOL = 1e-9


@dataclass(frozen=True)
class ExtendedReal:
    """A nonnegative quantity that may be +infinity (``unbounded=True``)."""

    value: float = 0.0
    unbounded: bool = False

    @classmethod
    def infinite(cls) -> "ExtendedReal":
        return cls(math.nan, True)

    def __float__(self) -> float:
        return math.inf if self.unbounded else float(self.value)

    def to_json(self):
        return "inf" if self.unbounded else float(self.value)


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    w = np.zeros_like(grid)
    if grid.size > 1:
        d = np.diff(grid)
        w[:-1] += 0.5 * d
        w[1:] += 0.5 * d
    return w


@dataclass(frozen=True)
class DensityGrid:
    """Density values on a strictly increasing grid of positive locations.

    ``weights`` are quadrature weights (trapezoid if omitted), so the mass of
    the density is ``sum(weights * values)``.  ``left_exponent`` /
    ``right_exponent``, when set, record that the density behaves like
    ``x**a`` beyond the first / last grid node; :func:`moment` uses them to
    decide divergence.
    """

    grid: np.ndarray
    values: np.ndarray
    weights: Optional[np.ndarray] = None
    left_exponent: Optional[float] = None
    right_exponent: Optional[float] = None

    def __post_init__(self):
        grid = _readonly(self.grid)
        values = _readonly(self.values)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValidationError("density grid and values must be 1-d arrays of equal length")
        if grid.size and (grid[0] <= 0 or np.any(np.diff(grid) <= 0)):
            raise ValidationError("density grid must be positive and strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValidationError("density values must be finite and nonnegative")
        weights = trapezoid_weights(grid) if self.weights is None else np.asarray(self.weights, float)
        if weights.shape != grid.shape or np.any(weights < 0):
            raise ValidationError("quadrature weights must be nonnegative, one per node")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", _readonly(weights))

    @property
    def masses(self) -> np.ndarray:
        return self.weights * self.values

    def mass(self) -> float:
        return float(np.sum(self.masses))


@dataclass(frozen=True)
class PositiveRealMeasure:
    """Probability measure on [0, inf): ``atom0`` at zero, atoms, optional density."""

    atom0: float = 0.0
    atom_x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atom_w: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: Optional[DensityGrid] = None

    def __post_init__(self):
        x, w = _readonly(self.atom_x), _readonly(self.atom_w)
        if x.shape != w.shape or x.ndim != 1:
            raise ValidationError("atom locations and weights must match")
        if x.size and (x[0] <= 0 or np.any(np.diff(x) <= 0)):
            raise ValidationError("atom locations must be positive and strictly increasing")
        if np.any(w <= 0):
            raise ValidationError("atom weights must be positive")
        if not 0.0 <= self.atom0 <= 1.0:
            raise ValidationError("atom0 must lie in [0, 1]")
        object.__setattr__(self, "atom_x", x)
        object.__setattr__(self, "atom_w", w)
        object.__setattr__(self, "atom0", float(self.atom0))
        if abs(self.mass() - 1.0) > MASS_TOL:
            raise ValidationError(f"total mass {self.mass():.12g} differs from 1")

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple], atom0: float = 0.0) -> "PositiveRealMeasure":
        atoms = sorted((float(a), float(b)) for a, b in atoms)
        x = np.array([a for a, _ in atoms])
        w = np.array([b for _, b in atoms])
        return cls(atom0, x, w)

    def mass(self) -> float:
        m = self.atom0 + float(np.sum(self.atom_w))
        if self.density is not None:
            m += self.density.mass()
        return m

    @cached_property
    def _nodes(self):
        xs = [self.atom_x]
        ws = [self.atom_w]
        if self.atom0 > 0:
            xs.insert(0, np.zeros(1))
            ws.insert(0, np.array([self.atom0]))
        if self.density is not None:
            keep = self.density.masses > 0
            xs.append(self.density.grid[keep])
            ws.append(self.density.masses[keep])
        x = np.concatenate(xs)
        w = np.concatenate(ws)
        order = np.argsort(x, kind="stable")
        return _readonly(x[order]), _readonly(w[order])

    def nodes(self):
        """Locations and masses of the discrete representation (sorted)."""
        return self._nodes

    @property
    def delta(self) -> float:
        return self.atom0

    def support_min(self) -> float:
        return float(self.nodes()[0][0])

    def support_max(self) -> float:
        return float(self.nodes()[0][-1])

    def is_point_mass(self) -> bool:
        return self.nodes()[0].size == 1

    def is_delta_zero(self) -> bool:
        return self.atom0 >= 1.0 - MASS_TOL

    def to_json(self) -> dict:
        d = {
            "atom0": self.atom0,
            "atoms": [{"x": float(x), "w": float(w)} for x, w in zip(self.atom_x, self.atom_w)],
        }
        if self.density is not None:
            g = self.density
            d["density"] = {
                "grid": g.grid.tolist(),
                "values": g.values.tolist(),
                "weights": g.weights.tolist(),
            }
            if g.left_exponent is not None:
                d["density"]["left_exponent"] = g.left_exponent
            if g.right_exponent is not None:
                d["density"]["right_exponent"] = g.right_exponent
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PositiveRealMeasure":
        atoms = [(a["x"], a["w"]) for a in d.get("atoms", [])]
        if "density" not in d:
            return cls.from_atoms(atoms, atom0=d.get("atom0", 0.0))
        dens = d["density"]
        grid = DensityGrid(
            dens["grid"],
            dens["values"],
            dens.get("weights"),
            dens.get("left_exponent"),
            dens.get("right_exponent"),
        )
        atoms = sorted(atoms)
        return cls(
            d.get("atom0", 0.0),
            np.array([a for a, _ in atoms]),
            np.array([b for _, b in atoms]),
            grid,
        )

    @classmethod
    def load(cls, path) -> "PositiveRealMeasure":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


@dataclass(frozen=True)
class SymmetricRealMeasure:
    """Even measure on R, stored through its law on [0, inf)."""

    positive_part: PositiveRealMeasure

    @property
    def atom0(self) -> float:
        return self.positive_part.atom0

    @cached_property
    def _signed(self):
        x, w = self.positive_part.nodes()
        pos = x > 0
        xs = np.concatenate([-x[pos][::-1], x[~pos], x[pos]])
        ws = np.concatenate([0.5 * w[pos][::-1], w[~pos], 0.5 * w[pos]])
        return _readonly(xs), _readonly(ws)

    def nodes(self):
        """Signed locations and masses, each positive mass split evenly over +-x."""
        return self._signed

    def cdf(self, x):
        xs, ws = self.nodes()
        c = np.concatenate([[0.0], np.cumsum(ws)])
        return c[np.searchsorted(xs, np.asarray(x, dtype=float), side="right")]

    def mass_at(self, x) -> float:
        xs, ws = self.nodes()
        return float(np.sum(ws[xs == x]))


def point_mass(c: float) -> PositiveRealMeasure:
    if c == 0:
        return PositiveRealMeasure(atom0=1.0)
    return PositiveRealMeasure.from_atoms([(c, 1.0)])


def _tanh_sinh_angle(h: float):
    """Tanh-sinh nodes and weights for an integral over theta in (0, pi/2)."""
    k = np.arange(-int(6.5 / h), int(6.5 / h) + 1) * h
    s = 0.5 * np.pi * np.sinh(k)
    with np.errstate(over="ignore"):
        ch = np.cosh(s)
        wt = 0.25 * np.pi * 0.5 * np.pi * np.cosh(k) / ch**2 * h
        # theta and its distance to pi/2, each computed without cancellation
        theta = 0.25 * np.pi * np.exp(s) / ch
        comp = 0.25 * np.pi * np.exp(-s) / ch
    theta = np.nan_to_num(theta, nan=0.0, posinf=0.0)
    comp = np.nan_to_num(comp, nan=0.0, posinf=0.0)
    keep = (theta > 0) & (comp > 0) & (wt > 0)
    return theta[keep], comp[keep], wt[keep]


def _finalize_grid(x, values, masses, **exps) -> DensityGrid:
    ok = (values > 0) & (masses > 0) & np.isfinite(values)
    x, values, masses = x[ok], values[ok], masses[ok]
    keep = np.concatenate([[True], np.diff(x) > 0])
    x, values, masses = x[keep], values[keep], masses[keep]
    return DensityGrid(x, values, masses / values, **exps)


def free_poisson(lam: float = 1.0, h: float = 1 / 64) -> PositiveRealMeasure:
    """Marchenko-Pastur law with rate ``lam`` and unit jump size.

    Density ``sqrt((b - x)(x - a)) / (2 pi x)`` on ``[(1 - sqrt lam)^2,
    (1 + sqrt lam)^2]`` plus an atom ``1 - lam`` at zero when ``lam < 1``.
    Nodes are ``x = a + (b - a) sin^2(theta)`` with tanh-sinh weights in theta.
    """
    if lam <= 0:
        raise ValidationError("free Poisson rate must be positive")
    a = (1 - math.sqrt(lam)) ** 2
    b = (1 + math.sqrt(lam)) ** 2
    theta, comp, wt = _tanh_sinh_angle(h)
    sn, cs = np.sin(theta), np.sin(comp)
    x = a + (b - a) * sn**2
    pos = x > 0
    sn, cs, wt, x = sn[pos], cs[pos], wt[pos], x[pos]
    # density * dx/dtheta, written to stay finite at both edges
    masses = wt * (b - a) ** 2 * sn**2 * cs**2 / (np.pi * x)
    values = (b - a) * sn * cs / (2 * np.pi * x)
    cont = min(lam, 1.0)
    masses *= cont / masses.sum()
    left = -0.5 if lam == 1.0 else None
    dens = _finalize_grid(x, values, masses, left_exponent=left)
    return PositiveRealMeasure(max(1.0 - lam, 0.0), density=dens)


def quarter_circular(h: float = 1 / 64) -> PositiveRealMeasure:
    """Law of |c| for a standard circular c: density sqrt(4 - x^2)/pi on [0, 2]."""
    theta, comp, wt = _tanh_sinh_angle(h)
    sn, cs = np.sin(theta), np.sin(comp)
    x = 2 * sn
    values = 2 * cs / np.pi
    masses = wt * 4 * cs**2 / np.pi
    masses /= masses.sum()
    return PositiveRealMeasure(density=_finalize_grid(x, values, masses))


def symmetrize(mu: PositiveRealMeasure) -> SymmetricRealMeasure:
    return SymmetricRealMeasure(mu)


_MAPS = ("square", "sqrt", "inverse", "dilate")


def pushforward(mu: PositiveRealMeasure, kind: str, c: float = 1.0) -> PositiveRealMeasure:
    """Image of ``mu`` under t -> t^2, sqrt(t), 1/t or c*t.

    Quadrature masses travel with their nodes, so total mass is preserved
    exactly; stored density values get the Jacobian factor.
    """
    if kind not in _MAPS:
        raise ValidationError(f"unknown map {kind!r}; expected one of {_MAPS}")
    if kind == "inverse" and mu.atom0 > 0:
        raise InversionOfAtomAtZero("cannot invert a measure with an atom at 0")
    if kind == "dilate" and not c > 0:
        raise ValidationError("dilation factor must be positive")

    def f(x):
        if kind == "square":
            return x * x
        if kind == "sqrt":
            return np.sqrt(x)
        if kind == "inverse":
            return 1.0 / x
        return c * x

    def jac(x):  # |f'(x)|
        if kind == "square":
            return 2 * x
        if kind == "sqrt":
            return 0.5 / np.sqrt(x)
        if kind == "inverse":
            return 1.0 / (x * x)
        return np.full_like(x, c)

    def exp_map(a_left, a_right):
        # density ~ x^a carried through the map, as (left, right) exponents
        if kind == "dilate":
            return a_left, a_right
        if kind == "square":
            g = lambda a: None if a is None else (a - 1) / 2
            return g(a_left), g(a_right)
        if kind == "sqrt":
            g = lambda a: None if a is None else 2 * a + 1
            return g(a_left), g(a_right)
        g = lambda a: None if a is None else -a - 2
        return g(a_right), g(a_left)

    ax, aw = f(mu.atom_x), mu.atom_w
    order = np.argsort(ax)
    dens = None
    if mu.density is not None:
        g = mu.density
        y = f(g.grid)
        vals = g.values / jac(g.grid)
        wts = g.weights * jac(g.grid)
        o = np.argsort(y)
        left, right = exp_map(g.left_exponent, g.right_exponent)
        dens = DensityGrid(y[o], vals[o], wts[o], left, right)
    return PositiveRealMeasure(mu.atom0, ax[order], aw[order], dens)


def moment(mu: PositiveRealMeasure, gamma: float) -> ExtendedReal:
    """Integral of t**gamma, flagged unbounded when it diverges."""
    x, w = mu.nodes()
    if gamma < 0 and mu.atom0 > 0:
        return ExtendedReal.infinite()
    g = mu.density
    if g is not None:
        if g.right_exponent is not None and gamma + g.right_exponent >= -1:
            return ExtendedReal.infinite()
        if g.left_exponent is not None and gamma + g.left_exponent <= -1:
            return ExtendedReal.infinite()
    pos = x > 0
    total = float(np.sum(w[pos] * x[pos] ** gamma))
    if gamma == 0:
        total += float(np.sum(w[~pos]))
    return ExtendedReal(total)


def chebyshev_t_grid(n: int = 512, left: float = 0.0, right: float = 1.0) -> np.ndarray:
    """``n`` Chebyshev points strictly inside (left, right), clustered at both ends."""
    k = np.arange(n)
    u = 0.5 * (1 - np.cos((2 * k + 1) * np.pi / (2 * n)))
    return left + (right - left) * u


@dataclass(frozen=True)
class RadialBrownMeasure:
    """Rotation-invariant measure on C given by its radial quantile.

    Mass ``atom0`` sits at the origin; for t in (atom0, 1) the disk of radius
    Q(t) carries mass t.  ``q_values`` tabulate Q on ``t_grid``; ``quantile``,
    when present, evaluates Q exactly and is used to refine CDF lookups.
    ``r_max = inf`` marks an unbounded support.
    """

    atom0: float
    t_grid: np.ndarray
    q_values: np.ndarray
    r_min: float
    r_max: float
    quantile: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        t, q = _readonly(self.t_grid), _readonly(self.q_values)
        if t.shape != q.shape or t.ndim != 1:
            raise ValidationError("t grid and quantile values must match")
        if not 0 <= self.atom0 < 1:
            raise ValidationError("atom0 must lie in [0, 1)")
        if np.any(np.diff(t) <= 0) or (t.size and (t[0] <= self.atom0 or t[-1] >= 1)):
            raise ValidationError("t grid must be increasing inside (atom0, 1)")
        if np.any(np.diff(q) < 0):
            raise ValidationError("quantile values must be nondecreasing")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "q_values", q)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.r_max)

    def dilate(self, c: float) -> "RadialBrownMeasure":
        """Radii multiplied by ``c`` (the law of c*X)."""
        qf = self.quantile
        return RadialBrownMeasure(
            self.atom0,
            self.t_grid,
            c * self.q_values,
            c * self.r_min,
            c * self.r_max,
            None if qf is None else (lambda t: c * qf(t)),
        )

    def cdf(self, r):
        return radial_cdf(self, r)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(quantile_csv(self))


def quantile_csv(b: RadialBrownMeasure) -> str:
    lines = ["t,r"]
    lines += [f"{t:.12g},{r:.12g}" for t, r in zip(b.t_grid, b.q_values)]
    return "\n".join(lines) + "\n"


def radial_cdf(b: RadialBrownMeasure, r):
    """mu(B(0, r)) by monotone inversion of the quantile table."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = np.empty_like(r)
    low = r < b.r_min
    high = r >= b.r_max
    out[low] = b.atom0
    out[high] = 1.0
    mid = ~(low | high)
    if mid.any():
        rr = r[mid]
        if b.quantile is not None:
            idx = np.searchsorted(b.q_values, rr, side="right")
            t_ext = np.concatenate([[np.nextafter(b.atom0, 1.0)], b.t_grid, [np.nextafter(1.0, 0.0)]])
            lo, hi = t_ext[idx], t_ext[idx + 1]
            q = b.quantile
            out[mid] = invert_increasing(lambda t: np.asarray(q(t), dtype=float), rr, lo, hi)
        else:
            ts = b.t_grid
            qs = b.q_values
            if math.isfinite(b.r_min):
                ts, qs = np.concatenate([[b.atom0], ts]), np.concatenate([[b.r_min], qs])
            if math.isfinite(b.r_max):
                ts, qs = np.concatenate([ts, [1.0]]), np.concatenate([qs, [b.r_max]])
            out[mid] = _interp_monotone(rr, qs, ts)
    return float(out[0]) if scalar else out


def _interp_monotone(x, xp, fp):
    # np.interp needs strictly increasing xp; collapse flat stretches
    keep = np.concatenate([np.diff(xp) > 0, [True]])
    return np.interp(x, xp[keep], fp[keep])
