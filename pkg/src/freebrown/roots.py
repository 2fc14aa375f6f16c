"""Vectorised inversion of monotone scalar functions.

Every transform inverse in the package (chi, G^{-1}, the inverse of z R(z))
goes through :func:`invert_increasing`: safeguarded Newton on a bracket,
falling back to bisection (geometric while the bracket spans several decades)
whenever a Newton step would leave it.
"""

import numpy as np

from .errors import SolverFailure

_EPS = np.finfo(float).eps


def bracket(f, target, lo, hi, grow_lo, grow_hi, max_steps=2100):
    """Move ``lo``/``hi`` until ``f(lo) <= target <= f(hi)`` elementwise.

    ``grow_lo`` and ``grow_hi`` map an endpoint to the next trial endpoint
    (for example doubling a negative number, or halving towards zero).
    Raises :class:`SolverFailure` if the target is not bracketed after
    ``max_steps`` moves or an endpoint stops being finite.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    for end, grow, bad in ((lo, grow_lo, lambda v: v > target), (hi, grow_hi, lambda v: v < target)):
        for _ in range(max_steps):
            mask = bad(f(end))
            if not mask.any():
                break
            end[mask] = grow(end[mask])
            if not np.all(np.isfinite(end)) or np.any(end[mask] == 0.0):
                raise SolverFailure("bracket expansion left the representable range")
        else:
            raise SolverFailure("could not bracket target")
    return lo, hi


def _midpoint(a, b):
    mid = 0.5 * (a + b)
    # geometric steps while the bracket spans decades on one side of zero
    same = a * b > 0
    wide = same & ((a / np.where(b == 0, 1.0, b) > 4) | (b / np.where(a == 0, 1.0, a) > 4))
    return np.where(wide, np.sign(a) * np.sqrt(np.abs(a) * np.abs(b)), mid)


def invert_increasing(f, target, lo, hi, fprime=None, max_iter=210):
    """Solve ``f(x) = target`` for nondecreasing ``f`` on a valid bracket.

    ``f`` (and ``fprime``) take and return 1-d arrays.  With a derivative,
    Newton steps are taken whenever they land inside the current bracket and
    bisection is the fallback; without one, plain bisection runs to machine
    precision.
    """
    target = np.atleast_1d(np.asarray(target, dtype=float))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()

    if fprime is None:
        for _ in range(max_iter):
            active = (hi - lo) > 4 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
            if not active.any():
                break
            idx = np.flatnonzero(active)
            mid = _midpoint(lo[idx], hi[idx])
            below = f(mid) < target[idx]
            lo[idx[below]] = mid[below]
            hi[idx[~below]] = mid[~below]
        return 0.5 * (lo + hi)

    x = _midpoint(lo, hi)
    active = np.ones(target.shape, bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xi = x[idx]
        r = f(xi) - target[idx]
        below = r < 0
        lo[idx[below]] = xi[below]
        hi[idx[~below]] = np.where(r[~below] > 0, xi[~below], hi[idx[~below]])
        d = fprime(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xi - r / d
        a, b = lo[idx], hi[idx]
        ok = (d > 0) & np.isfinite(newton) & (newton >= a) & (newton <= b)
        nxt = np.where(r == 0, xi, newton)
        rejected = ~ok & (r != 0)
        if rejected.any():
            nxt[rejected] = _midpoint(a[rejected], b[rejected])
        done = (np.abs(nxt - xi) <= 4 * _EPS * np.abs(xi)) | ((b - a) <= 4 * _EPS * np.maximum(np.abs(a), np.abs(b)))
        x[idx] = nxt
        active[idx[done]] = False
    return x
