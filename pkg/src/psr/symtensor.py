"""Symmetric cubic forms on R^n.

A cubic form is stored as its full symmetric coefficient tensor T with
P(y) = sum_{i,j,k} T[i,j,k] y_i y_j y_k.  Human-facing I/O uses monomial
coefficients c_{ijk} for index triples i <= j <= k (1-based), related to the
tensor by c_{ijk} = T[i,j,k] * mult(i,j,k) with mult the number of distinct
permutations of the triple.
"""

from __future__ import annotations

import itertools
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionMismatch, MalformedInput

__all__ = ["SymCubic", "multiplicity", "cubic_from_values"]


def multiplicity(i: int, j: int, k: int) -> int:
    """Number of distinct permutations of the index triple."""
    if i == j == k:
        return 1
    if i == j or j == k or i == k:
        return 3
    return 6


def _check_vector(y, n: int, name: str = "vector") -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape != (n,):
        raise DimensionMismatch(f"{name} has dimension {y.size}, expected {n}")
    return y


class SymCubic:
    """Immutable symmetric cubic form on R^n."""

    __slots__ = ("n", "tensor")

    def __init__(self, tensor: np.ndarray):
        tensor = np.asarray(tensor, dtype=float)
        if tensor.ndim != 3 or len(set(tensor.shape)) != 1:
            raise DimensionMismatch(f"tensor must be cubic, got shape {tensor.shape}")
        tensor = tensor.copy()
        tensor.setflags(write=False)
        self.n = tensor.shape[0]
        self.tensor = tensor

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SymCubic":
        if n < 1:
            raise DimensionMismatch("dimension must be positive")
        return cls(np.zeros((n, n, n)))

    @classmethod
    def from_tensor(cls, arr, symmetrize: bool = False) -> "SymCubic":
        arr = np.asarray(arr, dtype=float)
        if symmetrize:
            sym = np.zeros_like(arr)
            for perm in itertools.permutations(range(3)):
                sym += np.transpose(arr, perm)
            arr = sym / 6.0
        else:
            for perm in itertools.permutations(range(3)):
                if not np.allclose(arr, np.transpose(arr, perm), atol=1e-12):
                    raise MalformedInput("tensor is not symmetric")
        return cls(arr)

    @classmethod
    def from_coeffs(cls, n: int, coeffs: Mapping[tuple, float]) -> "SymCubic":
        """Build from monomial coefficients keyed by 1-based triples i<=j<=k."""
        if n < 1:
            raise DimensionMismatch("dimension must be positive")
        T = np.zeros((n, n, n))
        for idx, c in coeffs.items():
            i, j, k = idx
            if not (1 <= i <= j <= k <= n):
                raise MalformedInput(f"index triple {idx} not ascending in 1..{n}")
            val = float(c) / multiplicity(i, j, k)
            for a, b, d in set(itertools.permutations((i - 1, j - 1, k - 1))):
                T[a, b, d] = val
        return cls(T)

    # -- evaluation --------------------------------------------------------

    def eval(self, y) -> float:
        """P(y)."""
        y = _check_vector(y, self.n, "y")
        return float(np.einsum("ijk,i,j,k->", self.tensor, y, y, y))

    def polarize(self, u, v, w) -> float:
        """Full symmetric trilinear form; polarize(y, y, y) = eval(y)."""
        u = _check_vector(u, self.n, "u")
        v = _check_vector(v, self.n, "v")
        w = _check_vector(w, self.n, "w")
        return float(np.einsum("ijk,i,j,k->", self.tensor, u, v, w))

    def contract(self, z) -> np.ndarray:
        """Symmetric matrix M with M[a, b] = polarize(z, e_a, e_b); linear in z."""
        z = _check_vector(z, self.n, "z")
        return np.einsum("ijk,i->jk", self.tensor, z)

    def gradient(self, y) -> np.ndarray:
        """grad P(y), with components 3 * polarize(y, y, e_k)."""
        y = _check_vector(y, self.n, "y")
        return 3.0 * np.einsum("ijk,i,j->k", self.tensor, y, y)

    def pullback(self, M) -> "SymCubic":
        """The form Q with Q(y) = P(M y). M need not be invertible."""
        M = np.asarray(M, dtype=float)
        if M.shape != (self.n, self.n):
            raise DimensionMismatch(f"matrix shape {M.shape}, expected {(self.n, self.n)}")
        return SymCubic(np.einsum("abc,ai,bj,ck->ijk", self.tensor, M, M, M))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "SymCubic") -> "SymCubic":
        if not isinstance(other, SymCubic):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch("dimension mismatch in addition")
        return SymCubic(self.tensor + other.tensor)

    def __sub__(self, other: "SymCubic") -> "SymCubic":
        if not isinstance(other, SymCubic):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch("dimension mismatch in subtraction")
        return SymCubic(self.tensor - other.tensor)

    def __mul__(self, s) -> "SymCubic":
        return SymCubic(self.tensor * float(s))

    __rmul__ = __mul__

    def __neg__(self) -> "SymCubic":
        return SymCubic(-self.tensor)

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.tensor**2)))

    def allclose(self, other: "SymCubic", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(
            np.allclose(self.tensor, other.tensor, atol=atol, rtol=0.0)
        )

    # -- monomial coefficients and JSON -------------------------------------

    def coeffs(self, drop_zero: bool = True) -> dict:
        """Monomial coefficients keyed by 1-based ascending triples."""
        out = {}
        for i in range(self.n):
            for j in range(i, self.n):
                for k in range(j, self.n):
                    c = self.tensor[i, j, k] * multiplicity(i + 1, j + 1, k + 1)
                    if drop_zero and c == 0.0:
                        continue
                    out[(i + 1, j + 1, k + 1)] = float(c)
        return out

    def to_json_dict(self, dim_key: str = "n") -> dict:
        coeff_list = [
            {"idx": list(idx), "c": c} for idx, c in sorted(self.coeffs().items())
        ]
        return {dim_key: self.n, "coeffs": coeff_list}

    @classmethod
    def from_json_dict(cls, doc: Mapping, dim_key: str = "n") -> "SymCubic":
        if not isinstance(doc, Mapping) or dim_key not in doc or "coeffs" not in doc:
            raise MalformedInput(f'expected object with "{dim_key}" and "coeffs"')
        n = doc[dim_key]
        if not isinstance(n, int) or n < 1:
            raise MalformedInput(f'"{dim_key}" must be a positive integer')
        coeffs = {}
        for entry in doc["coeffs"]:
            try:
                idx = tuple(entry["idx"])
                c = float(entry["c"])
            except (TypeError, KeyError, ValueError) as exc:
                raise MalformedInput(f"bad coefficient entry {entry!r}") from exc
            if len(idx) != 3 or not all(isinstance(i, int) for i in idx):
                raise MalformedInput(f"index triple {idx} must be three integers")
            if not (1 <= idx[0] <= idx[1] <= idx[2] <= n):
                raise MalformedInput(f"index triple {idx} not ascending in 1..{n}")
            if idx in coeffs:
                raise MalformedInput(f"duplicate index triple {idx}")
            coeffs[idx] = c
        return cls.from_coeffs(n, coeffs)

    def __repr__(self) -> str:
        terms = ", ".join(f"{idx}: {c:.6g}" for idx, c in self.coeffs().items())
        return f"SymCubic(n={self.n}, {{{terms}}})"


def cubic_from_values(f: Callable[[np.ndarray], float], n: int) -> SymCubic:
    """Recover the symmetric tensor of a cubic form from point evaluations.

    Uses the third-order polarization identity, which is exact (up to
    roundoff) whenever f is a homogeneous cubic.
    """
    T = np.zeros((n, n, n))
    E = np.eye(n)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                u, v, w = E[i], E[j], E[k]
                val = (
                    f(u + v + w)
                    - f(u + v)
                    - f(u + w)
                    - f(v + w)
                    + f(u)
                    + f(v)
                    + f(w)
                ) / 6.0
                for a, b, c in set(itertools.permutations((i, j, k))):
                    T[a, b, c] = val
    return SymCubic(T)
