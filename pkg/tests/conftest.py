"""Shared helpers: seeded instance generators and the independent grid oracle."""

import numpy as np
import pytest

from psr import CLOSEDNESS_THRESHOLD, StandardCubic, SymCubic, max_on_sphere


def random_symmetric_cubic(rng, n):
    return SymCubic.from_tensor(rng.standard_normal((n, n, n)), symmetrize=True)


def random_closed_instance(rng, n, margin=0.8):
    """A standard-form instance with sphere maximum = margin * threshold."""
    raw = random_symmetric_cubic(rng, n)
    m = max_on_sphere(raw, seed=0, starts=16).max_value
    if m < 1e-12:
        return StandardCubic(raw)
    return StandardCubic((margin * CLOSEDNESS_THRESHOLD / m) * raw)


def sample_in_domain(rng, std, count, shrink=0.95):
    """Points sampled inside the section by rescaled random rays."""
    from psr import ray_roots

    pts = []
    while len(pts) < count:
        d = rng.standard_normal(std.n)
        norm = np.linalg.norm(d)
        if norm == 0:
            continue
        d /= norm
        t_pos = ray_roots(std.p3, d).t_pos
        u = rng.uniform(0.0, 1.0) ** (1.0 / std.n)
        pts.append(shrink * u * t_pos * d)
    return pts


def grid_closedness_oracle(p3, grid_n=400, extent=2.0, eig_tol=1e-9):
    """Decide closedness at n = 2 from first principles on a dense grid.

    Floods the beta > 0 component of the origin; the instance is closed iff
    the component stays away from the grid border (precompactness) and the
    hyperbolicity form 3 I - 9 P(z,.,.) + z z^T stays positive on it.
    Independent of the sphere-maximization route.
    """
    from scipy import ndimage

    assert p3.n == 2
    xs = np.linspace(-extent, extent, grid_n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    T = p3.tensor
    cubic = np.einsum("ijk,ai,aj,ak->a", T, pts, pts, pts)
    betas = 1.0 - np.einsum("ai,ai->a", pts, pts) + cubic
    mask = (betas > 0.0).reshape(grid_n, grid_n)
    labels, _ = ndimage.label(mask)
    center = labels[grid_n // 2, grid_n // 2]
    if center == 0:
        return False
    comp = labels == center
    border = np.zeros_like(comp)
    border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    if np.any(comp & border):
        return False  # not precompact
    sel = comp.ravel()
    zs = pts[sel]
    C = np.einsum("ijk,ai->ajk", T, zs)
    form = (
        3.0 * np.eye(2)[None, :, :]
        - 9.0 * C
        + np.einsum("ai,aj->aij", zs, zs)
    )
    a = form[:, 0, 0]
    b = form[:, 0, 1]
    c = form[:, 1, 1]
    min_eig = 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b**2)
    return bool(np.min(min_eig) > -eig_tol)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
