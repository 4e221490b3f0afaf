import math

import numpy as np
import pytest

from psr import (
    StandardCubic,
    SymCubic,
    christoffel_at_base,
    ds_at_base,
    fd_scalar_oracle,
    geodesic,
    pullback_metric,
    ricci_at_base,
    riemann_at_base,
    scalar_at,
    scalar_at_base,
    sectional_at_base,
    surface_fixture,
)
from psr.errors import DegeneratePlane, OutsideDomain

from conftest import random_closed_instance, random_symmetric_cubic, sample_in_domain

S3 = math.sqrt(3.0)


def a_form():
    return SymCubic.from_coeffs(2, {(1, 1, 1): 2 / (3 * S3), (1, 2, 2): -2 / S3})


def b_form():
    return SymCubic.from_coeffs(2, {(1, 1, 1): 2 / (3 * S3), (1, 2, 2): 1 / S3})


def test_scalar_flat_term():
    assert scalar_at_base(SymCubic.zero(2)) == pytest.approx(-2.0, abs=1e-15)
    assert scalar_at_base(SymCubic.zero(4)) == pytest.approx(-12.0, abs=1e-15)


def test_scalar_classical_surfaces():
    assert scalar_at_base(a_form()) == pytest.approx(0.0, abs=1e-10)
    assert scalar_at_base(b_form()) == pytest.approx(-9.0 / 4.0, abs=1e-10)


def test_scalar_vanishes_for_curves(rng):
    p3 = random_symmetric_cubic(rng, 1)
    assert scalar_at_base(p3) == pytest.approx(0.0, abs=1e-13)


def test_scalar_at_origin_equals_base(rng):
    std = random_closed_instance(rng, 2)
    assert scalar_at(std, np.zeros(2)) == scalar_at_base(std.p3)


def test_scalar_constant_on_homogeneous_fixture(rng):
    std = StandardCubic(a_form())
    for z in sample_in_domain(rng, std, 20, shrink=0.8):
        assert scalar_at(std, z) == pytest.approx(0.0, abs=1e-8)


def test_scalar_matches_fd_oracle(rng):
    for _ in range(3):
        std = random_closed_instance(rng, 2)
        for z in [np.zeros(2)] + sample_in_domain(rng, std, 2, shrink=0.6):
            assert fd_scalar_oracle(std, z) == pytest.approx(
                scalar_at(std, z), abs=1e-4
            )


def test_ds_zero_cubic():
    assert np.allclose(ds_at_base(SymCubic.zero(3)), 0.0)


def test_ds_vanishes_on_homogeneous_fixtures():
    assert np.max(np.abs(ds_at_base(a_form()))) < 1e-10
    assert np.max(np.abs(ds_at_base(b_form()))) < 1e-10


def test_ds_matches_move_point_differences(rng):
    for _ in range(3):
        std = random_closed_instance(rng, 2, margin=0.7)
        analytic = ds_at_base(std.p3)
        eps = 1e-4
        for k in range(2):
            step = np.zeros(2)
            step[k] = eps
            fd = (scalar_at(std, step) - scalar_at(std, -step)) / (2 * eps)
            assert analytic[k] == pytest.approx(fd, abs=1e-5)


def test_riemann_constant_curvature_part():
    n = 3
    R = riemann_at_base(SymCubic.zero(n))
    I = np.eye(n)
    expect = (2.0 / 3.0) * (
        np.einsum("ik,jl->ijkl", I, I) - np.einsum("jk,il->ijkl", I, I)
    )
    assert np.allclose(R, expect, atol=1e-15)


def test_riemann_antisymmetry(rng):
    R = riemann_at_base(random_symmetric_cubic(rng, 3))
    assert np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3)))) < 1e-12


def test_riemann_contracts_to_ricci(rng):
    p3 = random_symmetric_cubic(rng, 3)
    R = riemann_at_base(p3)
    # Ric(j, k) = sum_i <R(e_i, e_j) e_k, e_i>.
    contracted = np.einsum("ijki->jk", R)
    assert np.allclose(contracted, ricci_at_base(p3), atol=1e-12)


def test_ricci_trace_consistency(rng):
    p3 = random_symmetric_cubic(rng, 3)
    ric = ricci_at_base(p3)
    # The metric at the base point is (2/tau) times the identity.
    scalar = (3.0 / 2.0) * float(np.trace(ric))
    assert scalar == pytest.approx(scalar_at_base(p3), rel=1e-12, abs=1e-12)


def test_sectional_flat():
    p3 = SymCubic.zero(3)
    for v, w in [((1, 0, 0), (0, 1, 0)), ((1, 1, 0), (0, 1, 1))]:
        assert sectional_at_base(p3, v, w) == pytest.approx(-1.0, abs=1e-12)


def test_sectional_surface_identity():
    for p3 in (a_form(), b_form()):
        K = sectional_at_base(p3, [1.0, 0.0], [0.0, 1.0])
        assert 2 * K == pytest.approx(scalar_at_base(p3), abs=1e-9)


def test_sectional_surface_identity_random(rng):
    p3 = random_symmetric_cubic(rng, 2)
    K = sectional_at_base(p3, [1.0, 0.0], [0.0, 1.0])
    assert 2 * K == pytest.approx(scalar_at_base(p3), rel=1e-9, abs=1e-9)


def test_sectional_basis_invariance(rng):
    p3 = random_symmetric_cubic(rng, 4)
    v, w = rng.standard_normal((2, 4))
    base = sectional_at_base(p3, v, w)
    assert sectional_at_base(p3, w, v) == pytest.approx(base, abs=1e-9)
    a, b, c, d = rng.standard_normal(4)
    v2 = a * v + b * w
    w2 = c * v + d * w
    if abs(a * d - b * c) > 1e-3:
        assert sectional_at_base(p3, v2, w2) == pytest.approx(base, abs=1e-9)


def test_sectional_from_riemann(rng):
    p3 = random_symmetric_cubic(rng, 3)
    R = riemann_at_base(p3)
    g = (2.0 / 3.0) * np.eye(3)
    v, w = rng.standard_normal((2, 3))
    Rvw_w = np.einsum("ijkl,i,j,k->l", R, v, w, w)
    num = Rvw_w @ g @ v
    area2 = (v @ g @ v) * (w @ g @ w) - (v @ g @ w) ** 2
    assert num / area2 == pytest.approx(sectional_at_base(p3, v, w), abs=1e-9)


def test_sectional_degenerate_plane():
    with pytest.raises(DegeneratePlane):
        sectional_at_base(SymCubic.zero(3), [1.0, 0, 0], [2.0, 0, 0])


def test_pullback_metric_origin(rng):
    std = random_closed_instance(rng, 3)
    assert np.allclose(pullback_metric(std, np.zeros(3)), (2 / 3) * np.eye(3))


def test_pullback_metric_curve_closed_form(rng):
    std = StandardCubic(SymCubic.zero(1))
    for z in rng.uniform(-0.9, 0.9, size=10):
        b = 1 - z * z
        expect = 2 / (3 * b) + (8 / 9) * z * z / b**2
        assert pullback_metric(std, [z])[0, 0] == pytest.approx(expect, rel=1e-13)


def test_pullback_metric_positive_definite(rng):
    for _ in range(3):
        std = random_closed_instance(rng, 2)
        for z in sample_in_domain(rng, std, 30):
            eigs = np.linalg.eigvalsh(pullback_metric(std, z))
            assert eigs.min() > 0.0


def test_pullback_metric_outside_raises():
    std = StandardCubic(SymCubic.zero(2))
    with pytest.raises(OutsideDomain):
        pullback_metric(std, [2.0, 0.0])


def test_christoffel_values():
    assert np.all(christoffel_at_base(SymCubic.zero(2)) == 0.0)
    gamma = christoffel_at_base(SymCubic.from_coeffs(1, {(1, 1, 1): 2 / (3 * S3)}))
    assert gamma[0, 0, 0] == pytest.approx(-1 / S3, abs=1e-15)


def test_christoffel_matches_fd(rng):
    std = random_closed_instance(rng, 2)
    gamma = christoffel_at_base(std.p3)
    h = 1e-5

    def metric(z):
        return 3.0 * pullback_metric(std, z)

    n = 2
    dg = np.zeros((n, n, n))
    for a in range(n):
        zp, zm = np.zeros(n), np.zeros(n)
        zp[a] += h
        zm[a] -= h
        dg[a] = (metric(zp) - metric(zm)) / (2 * h)
    ginv = np.linalg.inv(metric(np.zeros(n)))
    bracket = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    fd_gamma = 0.5 * np.einsum("ijl,lk->kij", bracket, ginv)
    assert np.max(np.abs(fd_gamma - gamma)) < 1e-6


def test_fd_oracle_flat_case():
    std = StandardCubic(SymCubic.zero(2))
    assert fd_scalar_oracle(std, np.zeros(2)) == pytest.approx(-2.0, abs=1e-5)


def test_fd_oracle_classical_surface():
    std = StandardCubic(b_form())
    assert fd_scalar_oracle(std, np.zeros(2)) == pytest.approx(-9 / 4, abs=1e-4)


def test_fd_oracle_stencil_exit():
    from psr.curvature import StencilExit

    std = StandardCubic(SymCubic.zero(2))
    with pytest.raises(OutsideDomain):
        fd_scalar_oracle(std, [0.9999999, 0.0], step=1e-3)
    with pytest.raises(StencilExit):
        fd_scalar_oracle(std, [0.99985, 0.0], step=1e-3)


def test_geodesic_stays_inside_and_conserves_speed():
    std = StandardCubic(SymCubic.zero(1))
    v0 = np.array([math.sqrt(1.5)])  # unit metric speed at the origin
    path = geodesic(std, [0.0], v0, t_max=8.0, dt=1e-3)
    assert not path.exited
    assert path.min_beta > 0.0
    assert path.speed_drift < 1e-6
    assert path.arc_length == pytest.approx(8.0, rel=1e-6)
    zs = np.array([z[0] for _, z, _ in path.samples])
    assert np.all(np.abs(zs) < 1.0)


def test_geodesic_speed_conservation_on_fixtures(rng):
    for kind in ("b", "d"):
        std = surface_fixture(kind).standard
        v0 = rng.standard_normal(2)
        g0 = pullback_metric(std, np.zeros(2))
        v0 /= math.sqrt(v0 @ g0 @ v0)
        path = geodesic(std, np.zeros(2), v0, t_max=5.0, dt=2e-3)
        assert not path.exited
        assert path.speed_drift < 1e-6
        assert path.arc_length == pytest.approx(5.0, rel=1e-5)


def test_geodesic_exit_flag_near_boundary():
    std = StandardCubic(SymCubic.zero(1))
    path = geodesic(std, [0.999999], [1.0], t_max=50.0, dt=1e-3)
    assert path.exited
    assert path.min_beta < 1e-9


def test_geodesic_affine_reparametrization(rng):
    std = random_closed_instance(rng, 2, margin=0.5)
    v0 = np.array([0.4, -0.2])
    p1 = geodesic(std, np.zeros(2), v0, t_max=3.0, dt=1e-3)
    p2 = geodesic(std, np.zeros(2), 2.0 * v0, t_max=1.5, dt=5e-4)
    assert p1.arc_length == pytest.approx(p2.arc_length, rel=1e-6)
    z1 = p1.samples[-1][1]
    z2 = p2.samples[-1][1]
    assert np.allclose(z1, z2, atol=1e-7)
