"""Reduction of a hyperbolic cubic to standard form at a chosen point.

Given a hyperbolic cubic h on R^(n+1) and a hyperbolic point p with
h(p) = 1, there is an invertible change of coordinates A with

    (h o A)(x, y) = x^3 - x <y, y> + P(y)      and      A (1, 0)^T = p.

The construction used here:

1.  Orthonormalize the positive definite form
    <p,p><.,.> - <p,.>^2 + dh_p^2 by a Cholesky factor B, after which the
    differential at the moved point is proportional to the Euclidean pairing
    with the point.
2.  Rotate the moved point onto the first coordinate axis (Householder
    reflection) and rescale uniformly so it becomes e_1.
3.  Shear away the residual x^2 y_i coefficients with the unipotent matrix
    whose top row is -d_y h / d_x h.
4.  Normalize the x y y block to minus the identity with E, the inverse
    transpose of the lower Cholesky factor of the induced positive definite
    Gram matrix.  Fixing E this way picks one deterministic representative
    out of the O(n) family of admissible normalizations.

When the cubic is already in standard form, the same point-moving matrix

    A(p) = [[p_x, (w o E)], [p_y, E]],   w = -d_y h / d_x h at p,

moves the base point directly (`move_point`), and its linearization at the
base point yields the first variation of P under base-point motion
(`delta_p3`), parameterized by an antisymmetric-matrix-valued direction
field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import AmbientCubic, LinearChange, StandardCubic, is_hyperbolic_point
from .domain import alpha, dom_contains, phi
from .errors import (
    AlphaNonpositive,
    DimensionMismatch,
    LevelMismatch,
    NotHyperbolic,
    NumericalFailure,
    OutsideDomain,
)
from .symtensor import SymCubic, _check_vector, cubic_from_values

__all__ = ["ReductionResult", "SoNDirectionField", "standard_form_at", "move_point", "delta_p3"]

_CHOL_PIVOT_MIN = 1e-12


@dataclass(frozen=True)
class ReductionResult:
    change: LinearChange
    standard: StandardCubic
    base_point: np.ndarray
    rescaled: bool = False

    def to_json_dict(self) -> dict:
        return {
            "A": [list(map(float, row)) for row in self.change.matrix],
            "p": [float(v) for v in self.base_point],
            "p3": self.standard.to_json_dict(),
            "rescaled": self.rescaled,
        }


class SoNDirectionField:
    """Linear map v -> sum_i v_i B_i with antisymmetric generators B_i."""

    __slots__ = ("n", "generators")

    def __init__(self, generators):
        gens = np.asarray(generators, dtype=float)
        if gens.ndim != 3 or gens.shape[0] != gens.shape[1] or gens.shape[1] != gens.shape[2]:
            raise DimensionMismatch(
                f"expected n antisymmetric n x n generators, got shape {gens.shape}"
            )
        skew = np.max(np.abs(gens + np.transpose(gens, (0, 2, 1))))
        if skew > 1e-12:
            raise DimensionMismatch(f"generators not antisymmetric (residual {skew:g})")
        gens = gens.copy()
        gens.setflags(write=False)
        self.n = gens.shape[0]
        self.generators = gens

    @classmethod
    def zero(cls, n: int) -> "SoNDirectionField":
        return cls(np.zeros((n, n, n)))

    def __call__(self, v) -> np.ndarray:
        v = _check_vector(v, self.n, "v")
        return np.einsum("i,ijk->jk", v, self.generators)


def _chol_lower(G: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with an explicit pivot floor."""
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("Gram matrix is not positive definite") from exc
    if np.min(np.diag(L)) < _CHOL_PIVOT_MIN:
        raise NumericalFailure(
            f"Cholesky pivot {np.min(np.diag(L)):g} below {_CHOL_PIVOT_MIN:g}"
        )
    return L


def _householder_to_first_axis(unit: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping e_1 to the given unit vector (and back)."""
    m = unit.size
    e1 = np.zeros(m)
    e1[0] = 1.0
    u = unit - e1
    nu2 = float(u @ u)
    if nu2 < 1e-30:
        return np.eye(m)
    return np.eye(m) - 2.0 * np.outer(u, u) / nu2


def _point_moving_matrix(h: AmbientCubic, p: np.ndarray) -> np.ndarray:
    """The explicit block matrix [[p_x, w o E], [p_y, E]] at a point of {h=1}.

    Requires d_x h > 0 at p.  E is fixed as the inverse transpose of the
    lower Cholesky factor of the Gram matrix of the positive definite form
    (v, w) -> -1/2 h''_p(L v, L w), where L lifts v to (w . v, v).
    """
    m = h.m
    grad = h.gradient(p)
    if grad[0] <= 0.0:
        raise AlphaNonpositive(f"d_x h = {grad[0]:g} at the target point")
    w = -grad[1:] / grad[0]
    lift = np.zeros((m, m - 1))
    lift[0, :] = w
    lift[1:, :] = np.eye(m - 1)
    gram = -0.5 * lift.T @ h.hessian(p) @ lift
    E = np.linalg.inv(_chol_lower(gram)).T
    A = np.zeros((m, m))
    A[:, 0] = p
    A[0, 1:] = w @ E
    A[1:, 1:] = E
    return A


def standard_form_at(h: AmbientCubic, p, rescale: bool = True) -> ReductionResult:
    """Reduce h to standard form with base point p.

    p must be a hyperbolic point of h.  If h(p) differs from 1 it is pulled
    onto the level set by scaling (recorded in the result) when rescale is
    enabled and h(p) > 0; otherwise LevelMismatch is raised.
    """
    p = _check_vector(p, h.m, "p")
    level = h.eval(p)
    rescaled = False
    if abs(level - 1.0) > 1e-9:
        if not (rescale and level > 0.0):
            raise LevelMismatch(f"h(p) = {level:.17g}, expected 1")
        p = p * level ** (-1.0 / 3.0)
        rescaled = True
    if not is_hyperbolic_point(h, p):
        raise NotHyperbolic("the base point is not a hyperbolic point of h")

    m = h.m
    # 1. Orthonormalize <p,p><.,.> - <p,.>^2 + dh_p^2.
    grad = h.gradient(p)
    G = float(p @ p) * np.eye(m) - np.outer(p, p) + np.outer(grad, grad)
    B = np.linalg.inv(_chol_lower(G)).T
    T1 = h.tensor.pullback(B)
    q = np.linalg.solve(B, p)

    # 2. Rotate the moved point onto the first axis, then rescale it to e_1.
    nq = float(np.linalg.norm(q))
    R = _householder_to_first_axis(q / nq)
    T2 = T1.pullback(R)

    A_prefix = B @ R * nq  # composed with the uniform scaling nq * Id
    T3 = T2 * nq**3

    # 3 + 4. Shear and quadratic-block normalization via the explicit
    # point-moving matrix at e_1.
    h3 = AmbientCubic(T3)
    e1 = np.zeros(m)
    e1[0] = 1.0
    A_tail = _point_moving_matrix(h3, e1)
    T5 = T3.pullback(A_tail)

    A_total = A_prefix @ A_tail
    standard = StandardCubic.from_ambient(AmbientCubic(T5), tol=1e-9)
    p_ro = p.copy()
    p_ro.setflags(write=False)
    return ReductionResult(
        change=LinearChange(A_total),
        standard=standard,
        base_point=p_ro,
        rescaled=rescaled,
    )


def move_point(std: StandardCubic, z) -> ReductionResult:
    """Re-reduce a standard-form cubic with base point moved to Phi(z).

    z must lie strictly inside the section; the explicit point-moving matrix
    additionally needs alpha(z) > 0, which holds automatically there.
    """
    z = _check_vector(z, std.n, "z")
    if not dom_contains(std, z):
        raise OutsideDomain("target point is outside the section")
    if alpha(std, z) <= 0.0:
        raise AlphaNonpositive(f"alpha(z) = {alpha(std, z):g}")
    h = std.to_ambient()
    p = phi(std, z)
    A = _point_moving_matrix(h, p)
    reduced = h.tensor.pullback(A)
    standard = StandardCubic.from_ambient(AmbientCubic(reduced), tol=1e-9)
    p_ro = p.copy()
    p_ro.setflags(write=False)
    return ReductionResult(
        change=LinearChange(A), standard=standard, base_point=p_ro, rescaled=False
    )


def delta_p3(std: StandardCubic, dB0: SoNDirectionField, v) -> SymCubic:
    """First variation of P under base-point motion in direction v.

    The variation is the cubic

        y -> -(2/3) <y,y> <y,v> + 3 P(y, y, dB0(v) y + (3/2) P(y, ., v)),

    assembled into a symmetric tensor by polarization from point values.
    """
    n = std.n
    v = _check_vector(v, n, "v")
    if dB0.n != n:
        raise DimensionMismatch("direction field dimension mismatch")
    P = std.p3
    M = dB0(v) + 1.5 * P.contract(v)

    def value(y: np.ndarray) -> float:
        return -(2.0 / 3.0) * float(y @ y) * float(y @ v) + 3.0 * P.polarize(
            y, y, M @ y
        )

    return cubic_from_values(value, n)
