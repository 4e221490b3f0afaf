"""Curvature of the section metric and a finite-difference oracle.

The hypersurface metric pulls back to the section as

    g_z = -beta''_z / (tau beta(z)) + (tau - 1) dbeta_z x dbeta_z / (tau beta(z))^2

with tau = 3 for cubics.  At the base point z = 0 all curvature quantities
have closed forms in the coefficient tensor T of P alone:

    scalar       n(1-n) + (9 tau / 8) sum(-T_aal T_iil + T_ail^2)
    Christoffel  -(3/2) T_ijk                  (for the tau-scaled metric)
    Riemann      (2/tau)(d_ik d_jl - d_jk d_il)
                 + (9/4) sum_a (-T_ila T_jka + T_ika T_jla)
    Ricci        (2(1-n)/tau) d_jk + (9/4) sum_ai (-T_iia T_jka + T_ija T_ika)

Away from the base point the scalar curvature is computed by moving the base
point there first; an independent finite-difference assembly from metric
values alone serves as the oracle.  The degree parameter tau only enters the
formulas; stored polynomials are always cubic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import StandardCubic
from .domain import beta, dom_contains
from .errors import DegeneratePlane, OutsideDomain, PsrError
from .standard_form import move_point
from .symtensor import SymCubic, _check_vector

__all__ = [
    "CurvatureReport",
    "GeodesicPath",
    "StencilExit",
    "scalar_at_base",
    "scalar_at",
    "ds_at_base",
    "riemann_at_base",
    "ricci_at_base",
    "sectional_at_base",
    "christoffel_at_base",
    "pullback_metric",
    "fd_scalar_oracle",
    "geodesic",
    "curvature_report",
]


class StencilExit(OutsideDomain):
    """A finite-difference stencil stepped outside the section."""


def scalar_at_base(p3: SymCubic, tau: int = 3) -> float:
    """Scalar curvature at the distinguished base point."""
    if tau < 3:
        raise ValueError("tau must be at least 3")
    T = p3.tensor
    n = p3.n
    diag = np.einsum("aal->l", T)
    s = -float(diag @ diag) + float(np.sum(T * T))
    return n * (1 - n) + 9.0 * tau / 8.0 * s


def scalar_at(std: StandardCubic, z) -> float:
    """Scalar curvature at Phi(z), via re-reduction to the base point."""
    z = _check_vector(z, std.n, "z")
    if not np.any(z):
        return scalar_at_base(std.p3)
    return scalar_at_base(move_point(std, z).standard.p3)


def ds_at_base(p3: SymCubic) -> np.ndarray:
    """Differential of the scalar curvature at the base point (tau = 3)."""
    T = p3.tensor
    n = p3.n
    diag = np.einsum("aal->l", T)
    M = (
        -np.outer(diag, diag)
        - 2.0 * np.einsum("i,ijl->jl", diag, T)
        + 3.0 * np.einsum("aij,ail->jl", T, T)
    )
    return 1.5 * (n - 1) * diag + (81.0 / 8.0) * np.einsum("jlk,jl->k", T, M)


def riemann_at_base(p3: SymCubic, tau: int = 3) -> np.ndarray:
    """Curvature operator R[i, j, k, l]: R(e_i, e_j) e_k = sum_l R[i,j,k,l] e_l."""
    if tau < 3:
        raise ValueError("tau must be at least 3")
    T = p3.tensor
    n = p3.n
    I = np.eye(n)
    R = (2.0 / tau) * (
        np.einsum("ik,jl->ijkl", I, I) - np.einsum("jk,il->ijkl", I, I)
    )
    R += (9.0 / 4.0) * (
        -np.einsum("ila,jka->ijkl", T, T) + np.einsum("ika,jla->ijkl", T, T)
    )
    return R


def ricci_at_base(p3: SymCubic, tau: int = 3) -> np.ndarray:
    """Ricci tensor at the base point, coded independently of riemann_at_base."""
    if tau < 3:
        raise ValueError("tau must be at least 3")
    T = p3.tensor
    n = p3.n
    diag = np.einsum("iia->a", T)
    return (2.0 * (1 - n) / tau) * np.eye(n) + (9.0 / 4.0) * (
        -np.einsum("a,jka->jk", diag, T) + np.einsum("ija,ika->jk", T, T)
    )


def sectional_at_base(p3: SymCubic, v, w, tau: int = 3) -> float:
    """Sectional curvature of the plane spanned by v and w at the base point.

    The plane is completed to an orthonormal frame by Gram-Schmidt; the value
    does not depend on the chosen basis of the plane.
    """
    n = p3.n
    v = _check_vector(v, n, "v")
    w = _check_vector(w, n, "w")
    nv = np.linalg.norm(v)
    if nv < 1e-14:
        raise DegeneratePlane("v is numerically zero")
    e1 = v / nv
    w_perp = w - (w @ e1) * e1
    nw = np.linalg.norm(w_perp)
    if nw < 1e-12 * max(1.0, float(np.linalg.norm(w))):
        raise DegeneratePlane("v and w are linearly dependent")
    e2 = w_perp / nw
    # Complete (e1, e2) to an orthonormal basis; the columns of F are the frame.
    F = np.zeros((n, n))
    F[:, 0] = e1
    F[:, 1] = e2
    k = 2
    for cand in np.eye(n):
        if k == n:
            break
        res = cand - F[:, :k] @ (F[:, :k].T @ cand)
        nr = np.linalg.norm(res)
        if nr > 1e-8:
            F[:, k] = res / nr
            k += 1
    Tp = p3.pullback(F).tensor
    s = float(np.sum(-Tp[0, 0, :] * Tp[1, 1, :] + Tp[0, 1, :] ** 2))
    return -1.0 + 9.0 * tau / 8.0 * s


def christoffel_at_base(p3: SymCubic) -> np.ndarray:
    """Christoffels G[k, i, j] at the base point for the tau-scaled metric."""
    return -1.5 * np.transpose(p3.tensor, (2, 0, 1))


def pullback_metric(std: StandardCubic, z) -> np.ndarray:
    """Section metric at z; positive definite inside the section."""
    z = _check_vector(z, std.n, "z")
    b = beta(std, z)
    if b <= 0.0:
        raise OutsideDomain(f"beta(z) = {b:g} is not positive")
    db = -2.0 * z + std.p3.gradient(z)
    d2b = -2.0 * np.eye(std.n) + 6.0 * std.p3.contract(z)
    return -d2b / (3.0 * b) + (2.0 / 9.0) * np.outer(db, db) / b**2


def _metric_and_derivative(std: StandardCubic, z: np.ndarray):
    """Analytic g(z) and dg[a, i, j] = d g_ij / d z_a for the section metric."""
    T = std.p3.tensor
    n = std.n
    b = beta(std, z)
    if b <= 0.0:
        raise OutsideDomain(f"beta(z) = {b:g} is not positive")
    db = -2.0 * z + std.p3.gradient(z)
    H = -2.0 * np.eye(n) + 6.0 * std.p3.contract(z)
    g = -H / (3.0 * b) + (2.0 / 9.0) * np.outer(db, db) / b**2
    # d_a beta'' = 6 T[a], d_a dbeta = H[a, :].
    dg = (
        -2.0 * T / b
        + np.einsum("ij,a->aij", H, db) / (3.0 * b**2)
        + (2.0 / 9.0)
        * (np.einsum("ai,j->aij", H, db) + np.einsum("i,aj->aij", db, H))
        / b**2
        - (4.0 / 9.0) * np.einsum("a,i,j->aij", db, db, db) / b**3
    )
    return g, dg


def _fd_christoffel(metric, point: np.ndarray, h: float) -> np.ndarray:
    """G[k, i, j] from central differences of a metric-valued callable."""
    n = point.size
    g = metric(point)
    dg = np.zeros((n, n, n))
    for a in range(n):
        zp, zm = point.copy(), point.copy()
        zp[a] += h
        zm[a] -= h
        dg[a] = (metric(zp) - metric(zm)) / (2.0 * h)
    ginv = np.linalg.inv(g)
    # bracket[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    bracket = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    return 0.5 * np.einsum("ijl,lk->kij", bracket, ginv)


def fd_scalar_oracle(std: StandardCubic, z, step: float = 1e-4) -> float:
    """Scalar curvature at Phi(z) assembled from metric values only.

    Central finite differences of the tau-scaled section metric give the
    Christoffel symbols and their derivatives; one Richardson extrapolation
    step removes the leading O(step^2) error.  Independent of the
    closed-form curvature path.
    """
    z = _check_vector(z, std.n, "z")
    n = std.n
    if not dom_contains(std, z):
        raise OutsideDomain("stencil center is outside the section")
    for a in range(n):
        for sgn in (2.0, -2.0):
            zz = z.copy()
            zz[a] += sgn * step
            if beta(std, zz) <= 0.0:
                raise StencilExit("finite-difference stencil leaves the section")

    def metric(point: np.ndarray) -> np.ndarray:
        return 3.0 * pullback_metric(std, point)

    def scalar_fixed_step(h: float) -> float:
        ginv0 = np.linalg.inv(metric(z))
        gamma0 = _fd_christoffel(metric, z, h)
        dgamma = np.zeros((n, n, n, n))  # dgamma[a, k, i, j] = d_a G^k_ij
        for a in range(n):
            zp, zm = z.copy(), z.copy()
            zp[a] += h
            zm[a] -= h
            dgamma[a] = (
                _fd_christoffel(metric, zp, h) - _fd_christoffel(metric, zm, h)
            ) / (2.0 * h)
        # Ric_ij = d_a G^a_ij - d_i G^a_aj + G^a_ab G^b_ij - G^a_ib G^b_aj
        ric = (
            np.einsum("aaij->ij", dgamma)
            - np.einsum("iaaj->ij", dgamma)
            + np.einsum("aab,bij->ij", gamma0, gamma0)
            - np.einsum("aib,baj->ij", gamma0, gamma0)
        )
        return float(np.einsum("ij,ij->", ginv0, ric))

    s_h = scalar_fixed_step(step)
    s_h2 = scalar_fixed_step(step / 2.0)
    richardson = (4.0 * s_h2 - s_h) / 3.0
    # The tau-scaled metric was used; its scalar is 1/tau times the target.
    return 3.0 * richardson


@dataclass
class GeodesicPath:
    samples: list = field(default_factory=list)  # (t, z, zdot) triples
    arc_length: float = 0.0
    exited: bool = False
    min_beta: float = float("inf")
    speed_drift: float = 0.0
    dt: float = 0.0


class _GeodesicKernel:
    """Closed-form metric, derivative contractions, and RK4 right-hand side.

    Works with raw arrays and scalar contractions only; this is the hot path
    of the integrator.
    """

    def __init__(self, std: StandardCubic):
        self.T = np.asarray(std.p3.tensor)
        self.n = std.n
        self.I = np.eye(std.n)

    def accel(self, z: np.ndarray, v: np.ndarray) -> np.ndarray:
        T, I = self.T, self.I
        Cz = np.tensordot(T, z, axes=([0], [0]))
        b = 1.0 - float(z @ z) + float(z @ Cz @ z)
        db = -2.0 * z + 3.0 * (z @ Cz)
        H = -2.0 * I + 6.0 * Cz
        g = -H / (3.0 * b) + (2.0 / 9.0) * np.outer(db, db) / (b * b)
        Cv = np.tensordot(T, v, axes=([0], [0]))
        Tvv = v @ Cv  # (T v v)_k
        Hv = H @ v
        vHv = float(v @ Hv)
        dbv = float(db @ v)
        b2, b3 = b * b, b * b * b
        d_center = (
            -2.0 * Tvv / b
            + vHv * db / (3.0 * b2)
            + (4.0 / 9.0) * dbv * Hv / b2
            - (4.0 / 9.0) * dbv * dbv * db / b3
        )
        d_sides = (
            -2.0 * Tvv / b
            + dbv * Hv / (3.0 * b2)
            + (2.0 / 9.0) * (vHv * db + dbv * Hv) / b2
            - (4.0 / 9.0) * dbv * dbv * db / b3
        )
        return -0.5 * np.linalg.solve(g, 2.0 * d_sides - d_center)

    def beta_speed(self, z: np.ndarray, v: np.ndarray) -> tuple:
        """(beta, metric speed) in one pass."""
        Cz = np.tensordot(self.T, z, axes=([0], [0]))
        b = 1.0 - float(z @ z) + float(z @ Cz @ z)
        if b <= 0.0:
            return b, 0.0
        db = -2.0 * z + 3.0 * (z @ Cz)
        H = -2.0 * self.I + 6.0 * Cz
        g = -H / (3.0 * b) + (2.0 / 9.0) * np.outer(db, db) / (b * b)
        return b, float(np.sqrt(max(v @ g @ v, 0.0)))


# Relative beta accuracy degrades like eps/beta near the section boundary, so
# below this level speed drift reflects roundoff, not truncation; halving the
# step cannot help there.
_CANCELLATION_BETA = 1e-8


def geodesic(
    std: StandardCubic,
    z0,
    v0,
    t_max: float,
    dt: float = 1e-3,
    max_samples: int = 4096,
    max_retries: int = 3,
) -> GeodesicPath:
    """Integrate the geodesic of the section metric from (z0, v0).

    Fixed-step RK4 with analytic Christoffel symbols (the metric is rational
    in z, so all its derivatives are closed form).  Integration stops early
    with exited set when beta drops below 1e-10.  If the metric speed drifts
    by more than 1e-6 relative while beta is still well resolved, the run is
    retried with half the step.
    """
    z0 = _check_vector(z0, std.n, "z0")
    v0 = _check_vector(v0, std.n, "v0")
    if not np.any(v0):
        raise PsrError("v0 must be nonzero")
    if not dom_contains(std, z0):
        raise OutsideDomain("geodesic start is outside the section")

    kern = _GeodesicKernel(std)
    accel = kern.accel
    attempt_dt = float(dt)
    path = GeodesicPath(dt=attempt_dt)
    for attempt in range(max_retries + 1):
        n_steps = max(1, int(np.ceil(t_max / attempt_dt - 1e-12)))
        stride = max(1, n_steps // max_samples)
        path = GeodesicPath(dt=attempt_dt)
        zz, vv = z0.copy(), v0.copy()
        b0, s0 = kern.beta_speed(zz, vv)
        drift = 0.0
        t = 0.0
        path.samples.append((0.0, zz.copy(), vv.copy()))
        path.min_beta = b0
        retry = False
        for k in range(n_steps):
            hstep = min(attempt_dt, t_max - t)
            half = 0.5 * hstep
            k1v = accel(zz, vv)
            k2z = vv + half * k1v
            k2v = accel(zz + half * vv, k2z)
            k3z = vv + half * k2v
            k3v = accel(zz + half * k2z, k3z)
            k4z = vv + hstep * k3v
            k4v = accel(zz + hstep * k3z, k4z)
            sixth = hstep / 6.0
            z_new = zz + sixth * (vv + 2.0 * (k2z + k3z) + k4z)
            v_new = vv + sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
            t += hstep
            b, sp = kern.beta_speed(z_new, v_new)
            if b < path.min_beta:
                path.min_beta = b
            if b < 1e-10:
                path.exited = True
                break
            path.arc_length += sp * hstep
            rel = abs(sp - s0) / s0
            if rel > drift:
                drift = rel
            zz, vv = z_new, v_new
            if (k + 1) % stride == 0 or k == n_steps - 1:
                path.samples.append((t, zz.copy(), vv.copy()))
            if drift > 1e-6:
                retry = b >= _CANCELLATION_BETA and attempt < max_retries
                break
        path.speed_drift = drift
        if not retry:
            return path
        attempt_dt *= 0.5
    return path


@dataclass(frozen=True)
class CurvatureReport:
    scalar: float
    ricci: np.ndarray
    christoffels: np.ndarray
    tau: int
    p3: SymCubic

    def sectional(self, v, w) -> float:
        return sectional_at_base(self.p3, v, w, tau=self.tau)

    def to_json_dict(self) -> dict:
        return {
            "scalar": float(self.scalar),
            "ricci": [list(map(float, row)) for row in self.ricci],
            "christoffels": [
                [list(map(float, row)) for row in plane] for plane in self.christoffels
            ],
            "tau": self.tau,
        }


def curvature_report(p3: SymCubic, tau: int = 3) -> CurvatureReport:
    return CurvatureReport(
        scalar=scalar_at_base(p3, tau=tau),
        ricci=ricci_at_base(p3, tau=tau),
        christoffels=christoffel_at_base(p3),
        tau=tau,
        p3=p3,
    )
