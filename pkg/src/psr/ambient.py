"""Cubic homogeneous polynomials on the ambient space R^(n+1).

Provides general cubics with evaluation / gradient / Hessian, hyperbolicity
testing of points (negative Hessian of Lorentz signature on a positive level
set), invertible linear coordinate changes, and the container for cubics in
the standard form

    h(x, y) = x^3 - x <y, y> + P(y),

whose distinguished point (1, 0, ..., 0) always lies on {h = 1} and is
hyperbolic.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, MalformedInput
from .symtensor import SymCubic, _check_vector

__all__ = [
    "AmbientCubic",
    "StandardCubic",
    "LinearChange",
    "is_hyperbolic_point",
    "hessian_signature",
    "apply_change",
]

# Eigenvalues of -h''(p) within this relative distance of zero (against the
# spectral radius) are treated as degenerate; such points are not hyperbolic.
DEGENERACY_RTOL = 1e-10


class AmbientCubic:
    """Cubic homogeneous polynomial on R^m."""

    __slots__ = ("m", "tensor")

    def __init__(self, tensor: SymCubic):
        self.m = tensor.n
        self.tensor = tensor

    @classmethod
    def from_coeffs(cls, m: int, coeffs) -> "AmbientCubic":
        return cls(SymCubic.from_coeffs(m, coeffs))

    def eval(self, p) -> float:
        return self.tensor.eval(p)

    def gradient(self, p) -> np.ndarray:
        """dh_p; satisfies the Euler identity dh_p(p) = 3 h(p)."""
        return self.tensor.gradient(p)

    def hessian(self, p) -> np.ndarray:
        """The second derivative h''_p as a symmetric m x m matrix; linear in p."""
        return 6.0 * self.tensor.contract(p)

    def to_json_dict(self) -> dict:
        return self.tensor.to_json_dict(dim_key="m")

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "AmbientCubic":
        return cls(SymCubic.from_json_dict(doc, dim_key="m"))

    def __repr__(self) -> str:
        return f"AmbientCubic(m={self.m}, {self.tensor.coeffs()})"


def hessian_signature(h: AmbientCubic, p) -> tuple:
    """Counts (negative, zero, positive) of eigenvalues of -h''_p.

    Eigenvalues are classified against DEGENERACY_RTOL times the spectral
    radius; the zero count flags degeneracy.
    """
    neg_hess = -h.hessian(p)
    eigs = np.linalg.eigvalsh(neg_hess)
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    tol = DEGENERACY_RTOL * scale
    n_zero = int(np.sum(np.abs(eigs) <= tol))
    n_neg = int(np.sum(eigs < -tol))
    n_pos = int(np.sum(eigs > tol))
    return n_neg, n_zero, n_pos


def is_hyperbolic_point(h: AmbientCubic, p) -> bool:
    """True iff h(p) > 0 and -h''_p has signature (m-1, 1).

    Points with a (near-)degenerate Hessian are conservatively classified as
    not hyperbolic.  Returns False rather than raising for h(p) <= 0.
    """
    p = _check_vector(p, h.m, "p")
    if h.eval(p) <= 0.0:
        return False
    n_neg, n_zero, n_pos = hessian_signature(h, p)
    return n_zero == 0 and n_neg == 1 and n_pos == h.m - 1


class LinearChange:
    """Invertible linear change of coordinates on R^m, inverse cached."""

    __slots__ = ("m", "matrix", "inverse")

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got {matrix.shape}")
        det = np.linalg.det(matrix)
        if abs(det) <= 1e-12:
            raise MalformedInput(f"matrix is numerically singular (det = {det:g})")
        inverse = np.linalg.inv(matrix)
        resid = np.max(np.abs(matrix @ inverse - np.eye(matrix.shape[0])))
        if resid > 1e-10:
            raise MalformedInput(f"inverse inaccurate (residual {resid:g})")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        inverse.setflags(write=False)
        self.m = matrix.shape[0]
        self.matrix = matrix
        self.inverse = inverse

    def __repr__(self) -> str:
        return f"LinearChange(m={self.m})"


def apply_change(h: AmbientCubic, change: LinearChange) -> AmbientCubic:
    """The composed polynomial h o A."""
    if change.m != h.m:
        raise DimensionMismatch("change of coordinates has wrong dimension")
    return AmbientCubic(h.tensor.pullback(change.matrix))


class StandardCubic:
    """The cubic x^3 - x <y,y> + P(y) on R^(n+1), keyed by its P part."""

    __slots__ = ("n", "p3")

    def __init__(self, p3: SymCubic):
        self.n = p3.n
        self.p3 = p3

    def to_ambient(self) -> AmbientCubic:
        n = self.n
        T = np.zeros((n + 1, n + 1, n + 1))
        T[0, 0, 0] = 1.0
        for i in range(1, n + 1):
            T[0, i, i] = T[i, 0, i] = T[i, i, 0] = -1.0 / 3.0
        T[1:, 1:, 1:] = self.p3.tensor
        return AmbientCubic(SymCubic(T))

    @classmethod
    def from_ambient(cls, h: AmbientCubic, tol: float = 1e-9) -> "StandardCubic":
        """Extract P from an ambient cubic already in standard form.

        Validates the x-blocks: coefficient 1 on x^3, no x^2 y_i terms, and
        the x y_i y_j block equal to minus the identity, all within tol.
        """
        T = h.tensor.tensor
        n = h.m - 1
        if n < 1:
            raise DimensionMismatch("ambient dimension must be at least 2")
        if abs(T[0, 0, 0] - 1.0) > tol:
            raise MalformedInput(f"x^3 coefficient is {T[0, 0, 0]:.17g}, expected 1")
        if np.max(np.abs(T[0, 0, 1:])) > tol / 3.0:
            raise MalformedInput("nonzero x^2 y coefficients")
        block = T[0, 1:, 1:]
        if np.max(np.abs(block + np.eye(n) / 3.0)) > tol / 3.0:
            raise MalformedInput("x y y block is not minus the identity")
        return cls(SymCubic(np.array(T[1:, 1:, 1:])))

    def base_point(self) -> np.ndarray:
        p = np.zeros(self.n + 1)
        p[0] = 1.0
        return p

    def to_json_dict(self) -> dict:
        return self.p3.to_json_dict()

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "StandardCubic":
        return cls(SymCubic.from_json_dict(doc))

    def __repr__(self) -> str:
        return f"StandardCubic(n={self.n}, p3={self.p3.coeffs()})"
