"""Sphere maximization of cubic forms and the closedness trichotomy.

The connected component of {x^3 - x<y,y> + P(y) = 1} through (1, 0) is a
closed hypersurface of hyperbolic points exactly when

    max_{|z| = 1} P(z) <= 2 / (3 sqrt 3),

with equality characterizing the instances that are singular at infinity and
strict inequality the ones with regular boundary behaviour.  Critical points
of P on the sphere solve the Z-eigenvalue system grad P(z) = lambda z with
lambda = 3 P(z); the maximizer is found by seeded multistart projected
gradient ascent, each converged point polished by Newton on the Lagrange
system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ambient import StandardCubic
from .domain import CLOSEDNESS_THRESHOLD, ray_roots
from .errors import ConvergenceFailure, NotCCPSR
from .symtensor import SymCubic, _check_vector

__all__ = [
    "SphereMaxResult",
    "MembershipReport",
    "GeneratingSetPosition",
    "EigenRangeReport",
    "max_on_sphere",
    "classify",
    "hyperbolicity_form",
    "eigen_range_check",
    "BOUNDARY_TOL",
]

#: Tolerance band around the closedness threshold for the trichotomy.
BOUNDARY_TOL = 1e-9

_KKT_TOL = 1e-9


class GeneratingSetPosition(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class SphereMaxResult:
    max_value: float
    argmax: np.ndarray
    kkt_residual: float
    starts_used: int


@dataclass(frozen=True)
class MembershipReport:
    sphere_max: SphereMaxResult
    is_closed_ccpsr: bool
    singular_at_infinity: bool
    regular_boundary: bool
    generating_set_position: GeneratingSetPosition

    def to_json_dict(self) -> dict:
        return {
            "sphere_max": float(self.sphere_max.max_value),
            "argmax": [float(v) for v in self.sphere_max.argmax],
            "kkt_residual": float(self.sphere_max.kkt_residual),
            "starts_used": self.sphere_max.starts_used,
            "is_closed_ccpsr": self.is_closed_ccpsr,
            "singular_at_infinity": self.singular_at_infinity,
            "regular_boundary": self.regular_boundary,
            "generating_set_position": self.generating_set_position.value,
        }


def _kkt_residual(p3: SymCubic, z: np.ndarray) -> float:
    grad = p3.gradient(z)
    lam = 3.0 * p3.eval(z)
    return float(np.linalg.norm(grad - lam * z))


def _ascend(p3: SymCubic, z: np.ndarray, iters: int = 200) -> np.ndarray:
    """Projected gradient ascent on the unit sphere with backtracking."""
    z = z / np.linalg.norm(z)
    val = p3.eval(z)
    step = 0.5
    for _ in range(iters):
        grad = p3.gradient(z)
        tang = grad - (grad @ z) * z
        gnorm = np.linalg.norm(tang)
        if gnorm < 1e-12:
            break
        improved = False
        for _ in range(30):
            cand = z + step * tang
            cand /= np.linalg.norm(cand)
            cand_val = p3.eval(cand)
            if cand_val > val:
                z, val = cand, cand_val
                improved = True
                step *= 1.3
                break
            step *= 0.5
        if not improved:
            break
    return z


def _newton_polish(p3: SymCubic, z: np.ndarray, iters: int = 40) -> np.ndarray:
    """Newton iteration on grad P(z) = lambda z, |z|^2 = 1."""
    n = p3.n
    z = z / np.linalg.norm(z)
    lam = 3.0 * p3.eval(z)
    for _ in range(iters):
        grad = p3.gradient(z)
        F = np.concatenate([grad - lam * z, [0.5 * (z @ z - 1.0)]])
        if np.linalg.norm(F) < 1e-15:
            break
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = 6.0 * p3.contract(z) - lam * np.eye(n)
        J[:n, n] = -z
        J[n, :n] = z
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        z = z + delta[:n]
        lam = lam + delta[n]
        nz = np.linalg.norm(z)
        if nz == 0.0:
            break
        z /= nz
        lam = 3.0 * p3.eval(z)
    return z


def max_on_sphere(p3: SymCubic, seed: int = 0, starts: int | None = None) -> SphereMaxResult:
    """Global maximum of P over the unit sphere (deterministic in the seed).

    For n = 1 the answer is analytic.  For n = 2 a dense angular scan guards
    against missed basins before the seeded multistart.
    """
    n = p3.n
    if starts is None:
        starts = max(64, 16 * n * n)
    if starts < 1:
        raise ValueError("starts must be at least 1")

    if n == 1:
        c = float(p3.tensor[0, 0, 0])
        argmax = np.array([1.0 if c >= 0 else -1.0])
        return SphereMaxResult(
            max_value=abs(c), argmax=argmax, kkt_residual=0.0, starts_used=1
        )

    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((starts, n))
    candidates = [row / np.linalg.norm(row) for row in raw if np.linalg.norm(row) > 0]
    candidates.extend(np.eye(n))
    candidates.extend(-np.eye(n))
    if n == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
        circle = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        vals = np.einsum("ijk,ai,aj,ak->a", p3.tensor, circle, circle, circle)
        order = np.argsort(vals)[::-1]
        candidates.extend(circle[order[:8]])

    certified = None  # (value, point, residual), ties broken by first finder
    fallback = None
    for z0 in candidates:
        z = _ascend(p3, np.asarray(z0, dtype=float))
        z = _newton_polish(p3, z)
        res = _kkt_residual(p3, z)
        val = p3.eval(z)
        if res <= _KKT_TOL:
            if certified is None or val > certified[0]:
                certified = (val, z, res)
        if fallback is None or val > fallback[0]:
            fallback = (val, z, res)

    if certified is None:
        val, z, res = fallback
        result = SphereMaxResult(
            max_value=float(val),
            argmax=z,
            kkt_residual=float(res),
            starts_used=len(candidates),
        )
        raise ConvergenceFailure(
            f"no start satisfied the critical point certificate ({res:g})",
            best=result,
        )
    val, z, res = certified
    z = z.copy()
    z.setflags(write=False)
    return SphereMaxResult(
        max_value=float(val),
        argmax=z,
        kkt_residual=float(res),
        starts_used=len(candidates),
    )


def classify(p3: SymCubic, seed: int = 0, starts: int | None = None) -> MembershipReport:
    """Closedness / singularity / boundary-regularity trichotomy for P."""
    sm = max_on_sphere(p3, seed=seed, starts=starts)
    m = sm.max_value
    closed = m <= CLOSEDNESS_THRESHOLD + BOUNDARY_TOL
    singular = abs(m - CLOSEDNESS_THRESHOLD) <= BOUNDARY_TOL
    regular = m < CLOSEDNESS_THRESHOLD - BOUNDARY_TOL
    if regular:
        position = GeneratingSetPosition.INTERIOR
    elif singular:
        position = GeneratingSetPosition.BOUNDARY
    else:
        position = GeneratingSetPosition.OUTSIDE
    return MembershipReport(
        sphere_max=sm,
        is_closed_ccpsr=closed,
        singular_at_infinity=singular,
        regular_boundary=regular,
        generating_set_position=position,
    )


def hyperbolicity_form(std: StandardCubic, z) -> np.ndarray:
    """The matrix 3 I - 9 P(z, ., .) + z z^T; positive definite on the section
    exactly when the instance is closed."""
    z = _check_vector(z, std.n, "z")
    return 3.0 * np.eye(std.n) - 9.0 * std.p3.contract(z) + np.outer(z, z)


@dataclass(frozen=True)
class EigenRangeReport:
    min_eigenvalue: float
    max_eigenvalue: float
    samples: int
    seed: int
    within_bounds: bool

    def to_json_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "samples": self.samples,
            "seed": self.seed,
            "within_bounds": self.within_bounds,
        }


def eigen_range_check(std: StandardCubic, samples: int, seed: int = 0) -> EigenRangeReport:
    """Extremes of the eigenvalues of P(z, ., .) over sampled section points.

    For closed instances every eigenvalue lies in (-5/6, 2/3); the report
    flags containment with a 1e-9 slack.  Raises NotCCPSR when the instance
    is not closed.
    """
    if not classify(std.p3, seed=seed).is_closed_ccpsr:
        raise NotCCPSR("eigenvalue bounds hold for closed instances only")
    n = std.n
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, -np.inf
    batch = 2048
    remaining = samples
    while remaining > 0:
        k = min(batch, remaining)
        remaining -= k
        dirs = rng.standard_normal((k, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = np.array([ray_roots(std.p3, d).t_pos for d in dirs])
        # Bias samples toward the boundary, where the extremes live.
        u = rng.uniform(0.0, 1.0, size=k) ** (1.0 / max(n, 1))
        pts = dirs * (radii * u * (1.0 - 1e-12))[:, None]
        mats = np.einsum("ijk,ai->ajk", std.p3.tensor, pts)
        eigs = np.linalg.eigvalsh(mats)
        lo = min(lo, float(eigs.min()))
        hi = max(hi, float(eigs.max()))
    within = (-5.0 / 6.0 - 1e-9) < lo and hi < (2.0 / 3.0 + 1e-9)
    return EigenRangeReport(
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        samples=samples,
        seed=seed,
        within_bounds=within,
    )
