"""The hyperplane section of the cone over a standard-form hypersurface.

For h = x^3 - x<y,y> + P(y), the slice {x = 1} carries the two functions

    alpha(z) = d h / d x at (1, z) = 3 - <z, z>
    beta(z)  = h(1, z)            = 1 - <z, z> + P(z)

The section is star shaped around 0 and is probed by rays: along a unit
direction d the restriction of beta is f(t) = 1 - t^2 + c t^3 with
c = P(d).  Its smallest positive and biggest negative roots delimit the
section; for |c| <= 2/(3 sqrt 3) they obey the analytic bracket
t_pos in [1, sqrt 3], t_neg in [-1, -sqrt(3)/2] (stated for c >= 0; apply
to -d for c < 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import StandardCubic
from .errors import NoPositiveRoot, NotCCPSR, OutsideDomain
from .symtensor import SymCubic, _check_vector

__all__ = ["RayRoots", "alpha", "beta", "ray_roots", "dom_contains", "phi",
           "CLOSEDNESS_THRESHOLD"]

#: Sharp bound on the sphere maximum of P for closed instances.
CLOSEDNESS_THRESHOLD = 2.0 / (3.0 * math.sqrt(3.0))

_ROOT_TOL = 1e-13
_TANGENT_TOL = 1e-9


@dataclass(frozen=True)
class RayRoots:
    """Boundary roots of f(t) = 1 - t^2 + c t^3 along a unit direction."""

    direction: np.ndarray
    c: float
    t_pos: float
    t_neg: float


def beta(std: StandardCubic, z) -> float:
    """h evaluated at (1, z)."""
    z = _check_vector(z, std.n, "z")
    return 1.0 - float(z @ z) + std.p3.eval(z)


def alpha(std: StandardCubic, z) -> float:
    """x-derivative of h at (1, z); equals 3 - <z, z> in standard form."""
    z = _check_vector(z, std.n, "z")
    return 3.0 - float(z @ z)


def _bisect_newton(f, fprime, lo: float, hi: float) -> float:
    """Root of f on a sign-changing bracket [lo, hi], bisection then Newton."""
    flo = f(lo)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            lo = hi = mid
            break
        if (flo > 0) == (fmid > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(4):
        d = fprime(t)
        if abs(d) < 1e-14:
            break
        step = f(t) / d
        t_new = t - step
        if not (min(lo, hi) - 1e-9 <= t_new <= max(lo, hi) + 1e-9):
            break
        t = t_new
        if abs(step) < _ROOT_TOL * max(1.0, abs(t)):
            break
    return t


def _positive_root(c: float) -> float:
    """Smallest positive root of 1 - t^2 + c t^3 for 0 <= c <= threshold."""
    if c <= 0.0:
        return 1.0
    if c >= CLOSEDNESS_THRESHOLD - _TANGENT_TOL:
        # Tangent (double root) regime: the root coincides with the local
        # minimum of f, which a sign-change bracket cannot isolate.
        return 2.0 / (3.0 * c)
    hi = 2.0 / (3.0 * c)  # local minimum, f(hi) < 0 strictly below threshold
    f = lambda t: 1.0 - t * t + c * t**3
    fp = lambda t: t * (3.0 * c * t - 2.0)
    return _bisect_newton(f, fp, 0.0, hi)


def _negative_root(c: float) -> float:
    """Biggest negative root of 1 - t^2 + c t^3 for c >= 0."""
    if c == 0.0:
        return -1.0
    f = lambda t: 1.0 - t * t + c * t**3
    fp = lambda t: t * (3.0 * c * t - 2.0)
    return _bisect_newton(f, fp, -1.0 - 1e-9, 0.0)


def ray_roots(p3: SymCubic, direction) -> RayRoots:
    """Boundary roots along a unit direction.

    Raises NoPositiveRoot when P(direction) exceeds the closedness threshold,
    in which case beta stays positive along the whole ray.
    """
    d = _check_vector(direction, p3.n, "direction")
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise OutsideDomain("direction must be nonzero")
    d = d / norm
    c = p3.eval(d)
    if abs(c) > CLOSEDNESS_THRESHOLD + 1e-12:
        raise NoPositiveRoot(
            f"P(direction) = {c:g} exceeds {CLOSEDNESS_THRESHOLD:g}; the ray "
            "does not meet the section boundary"
        )
    if c >= 0.0:
        t_pos = _positive_root(c)
        t_neg = _negative_root(c)
    else:
        # Oddness: roots of f_c are the negated roots of f_{-c}.
        t_pos = -_negative_root(-c)
        t_neg = -_positive_root(-c)
    d_ro = d.copy()
    d_ro.setflags(write=False)
    return RayRoots(direction=d_ro, c=float(c), t_pos=float(t_pos), t_neg=float(t_neg))


def dom_contains(std: StandardCubic, z) -> bool:
    """True iff z lies strictly inside the section (ray characterization)."""
    z = _check_vector(z, std.n, "z")
    r = float(np.linalg.norm(z))
    if r == 0.0:
        return True
    try:
        roots = ray_roots(std.p3, z / r)
    except NoPositiveRoot as exc:
        raise NotCCPSR(
            "section is unbounded along this ray; the instance is not closed"
        ) from exc
    return r < roots.t_pos


def phi(std: StandardCubic, z) -> np.ndarray:
    """Scale (1, z) onto the level set {h = 1}."""
    z = _check_vector(z, std.n, "z")
    b = beta(std, z)
    if b <= 0.0 or not dom_contains(std, z):
        raise OutsideDomain(f"point with beta = {b:g} is not in the section")
    return np.concatenate(([1.0], z)) * b ** (-1.0 / 3.0)
