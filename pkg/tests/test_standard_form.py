import math

import numpy as np
import pytest

from psr import (
    AmbientCubic,
    LinearChange,
    SoNDirectionField,
    StandardCubic,
    SymCubic,
    apply_change,
    classify,
    delta_p3,
    max_on_sphere,
    move_point,
    scalar_at_base,
    standard_form_at,
    surface_fixture,
)
from psr.errors import LevelMismatch, NotHyperbolic, OutsideDomain
from psr.moduli import homogeneity_test

from conftest import random_closed_instance

S3 = math.sqrt(3.0)


def test_identity_on_standard_input(rng):
    std = random_closed_instance(rng, 3)
    h = std.to_ambient()
    res = standard_form_at(h, std.base_point())
    assert np.max(np.abs(res.change.matrix - np.eye(4))) < 1e-9
    assert res.standard.p3.allclose(std.p3, atol=1e-9)
    assert not res.rescaled


def test_xyz_reduction_invariants():
    h = AmbientCubic.from_coeffs(3, {(1, 2, 3): 1.0})
    res = standard_form_at(h, [1.0, 1.0, 1.0])
    # Equivalent to the classical fixture: same sphere maximum and scalar
    # curvature (the reduction is unique only up to a rotation in y).
    assert max_on_sphere(res.standard.p3).max_value == pytest.approx(
        2 / (3 * S3), abs=1e-9
    )
    assert scalar_at_base(res.standard.p3) == pytest.approx(0.0, abs=1e-9)


def test_x2y_reduction():
    h = AmbientCubic.from_coeffs(2, {(1, 1, 2): 1.0})
    res = standard_form_at(h, [1.0, 1.0])
    c = res.standard.p3.coeffs(drop_zero=False)
    assert abs(c[(1, 1, 1)]) == pytest.approx(2 / (3 * S3), abs=1e-12)


def test_reduction_result_invariants(rng):
    std = random_closed_instance(rng, 2)
    h = std.to_ambient()
    A = LinearChange(rng.standard_normal((3, 3)) + 3 * np.eye(3))
    hA = apply_change(h, A)
    p = A.inverse @ std.base_point()
    res = standard_form_at(hA, p)
    assert np.max(np.abs(res.change.matrix @ np.array([1.0, 0, 0]) - p)) < 1e-10
    moved = apply_change(hA, res.change)
    target = res.standard.to_ambient()
    assert np.max(np.abs(moved.tensor.tensor - target.tensor.tensor)) < 1e-9
    T = moved.tensor.tensor
    assert T[0, 0, 0] == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(T[0, 0, 1:])) < 1e-9
    assert np.max(np.abs(T[0, 1:, 1:] + np.eye(2) / 3.0)) < 1e-9


def test_reduction_recovers_invariants_random(rng):
    for _ in range(6):
        n = int(rng.integers(1, 4))
        std = random_closed_instance(rng, n, margin=0.7)
        h = std.to_ambient()
        A = LinearChange(rng.standard_normal((n + 1, n + 1)) + 3 * np.eye(n + 1))
        hA = apply_change(h, A)
        res = standard_form_at(hA, A.inverse @ std.base_point())
        assert max_on_sphere(res.standard.p3).max_value == pytest.approx(
            max_on_sphere(std.p3).max_value, abs=1e-7
        )
        assert scalar_at_base(res.standard.p3) == pytest.approx(
            scalar_at_base(std.p3), abs=1e-7
        )


def test_idempotence_rotation_invariant_stats(rng):
    std = random_closed_instance(rng, 3)
    res = standard_form_at(std.to_ambient(), std.base_point())
    assert res.standard.p3.frobenius_norm() == pytest.approx(
        std.p3.frobenius_norm(), rel=1e-9
    )


def test_rescaling_reported(rng):
    std = random_closed_instance(rng, 2)
    h = std.to_ambient()
    res = standard_form_at(h, 1.7 * std.base_point())
    assert res.rescaled
    assert np.allclose(res.base_point, std.base_point(), atol=1e-12)
    res2 = standard_form_at(h, std.base_point())
    assert not res2.rescaled
    with pytest.raises(LevelMismatch):
        standard_form_at(h, 1.7 * std.base_point(), rescale=False)


def test_not_hyperbolic_rejected():
    # x^3 alone has degenerate Hessian in the y-directions everywhere.
    h = AmbientCubic.from_coeffs(2, {(1, 1, 1): 1.0})
    with pytest.raises(NotHyperbolic):
        standard_form_at(h, [1.0, 0.0])


def test_move_point_identity(rng):
    std = random_closed_instance(rng, 2)
    res = move_point(std, np.zeros(2))
    assert np.max(np.abs(res.change.matrix - np.eye(3))) < 1e-12
    assert res.standard.p3.allclose(std.p3, atol=1e-12)


def test_move_point_family_example():
    std = StandardCubic(SymCubic.from_coeffs(2, {(1, 1, 1): 2 / (3 * S3)}))
    for r in (-0.7, 0.4, 1.5):
        res = move_point(std, [r, 0.0])
        c = res.standard.p3.coeffs(drop_zero=False)
        assert c[(1, 1, 1)] == pytest.approx(2 / (3 * S3), abs=1e-12)
        assert c[(1, 2, 2)] == pytest.approx(-2 * r / 3, abs=1e-12)
        assert abs(c[(1, 1, 2)]) < 1e-12
        assert abs(c[(2, 2, 2)]) < 1e-12


def test_move_point_outside_raises(rng):
    std = StandardCubic(SymCubic.zero(2))
    with pytest.raises(OutsideDomain):
        move_point(std, [1.5, 0.0])


def test_move_point_base_point_on_level_set(rng):
    std = random_closed_instance(rng, 3)
    h = std.to_ambient()
    z = 0.3 * rng.standard_normal(3)
    res = move_point(std, z)
    assert h.eval(res.base_point) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(res.change.matrix @ np.array([1.0, 0, 0, 0]) - res.base_point)) < 1e-10


def test_delta_p3_zero_cubic():
    std = StandardCubic(SymCubic.zero(2))
    var = delta_p3(std, SoNDirectionField.zero(2), [1.0, 0.0])
    c = var.coeffs(drop_zero=False)
    assert c[(1, 1, 1)] == pytest.approx(-2.0 / 3.0, abs=1e-14)
    assert c[(1, 2, 2)] == pytest.approx(-2.0 / 3.0, abs=1e-14)
    assert abs(c[(1, 1, 2)]) < 1e-14
    assert abs(c[(2, 2, 2)]) < 1e-14


def test_delta_p3_linearity(rng):
    std = random_closed_instance(rng, 3)
    gens1 = rng.standard_normal((3, 3, 3))
    gens1 = gens1 - np.transpose(gens1, (0, 2, 1))
    gens2 = rng.standard_normal((3, 3, 3))
    gens2 = gens2 - np.transpose(gens2, (0, 2, 1))
    B1, B2 = SoNDirectionField(gens1), SoNDirectionField(gens2)
    v1, v2 = rng.standard_normal((2, 3))
    zero = SoNDirectionField.zero(3)
    lhs = delta_p3(std, B1, 2.0 * v1 + v2)
    rhs = (
        2.0 * delta_p3(std, B1, v1)
        + delta_p3(std, B1, v2)
    )
    assert np.max(np.abs(lhs.tensor - rhs.tensor)) < 1e-10
    # Superposition in the direction field at fixed v.
    B_sum = SoNDirectionField(gens1 + gens2)
    lhs2 = delta_p3(std, B_sum, v1)
    rhs2 = (
        delta_p3(std, B1, v1).tensor
        + delta_p3(std, B2, v1).tensor
        - delta_p3(std, zero, v1).tensor
    )
    assert np.max(np.abs(lhs2.tensor - rhs2)) < 1e-10


def test_delta_p3_vanishes_for_homogeneous_fixture():
    p3 = SymCubic.from_coeffs(2, {(1, 1, 1): 2 / (3 * S3), (1, 2, 2): -2 / S3})
    result = homogeneity_test(p3)
    assert result.is_homogeneous
    std = StandardCubic(p3)
    for v in np.eye(2):
        var = delta_p3(std, result.dB0, v)
        assert var.frobenius_norm() < 1e-10


def test_delta_p3_position_vector_identity(rng):
    p3 = surface_fixture("b").standard.p3
    result = homogeneity_test(p3)
    assert result.is_homogeneous
    C = p3
    for _ in range(10):
        y = rng.standard_normal(2)
        M = result.dB0(y) + 1.5 * C.contract(y)
        val = -(2.0 / 3.0) * (y @ y) ** 2 + 3.0 * C.polarize(y, y, M @ y)
        assert val == pytest.approx(0.0, abs=1e-10)


def test_parity_freedom(rng):
    std = random_closed_instance(rng, 2)
    flipped = std.p3.pullback(-np.eye(2))
    a = classify(std.p3)
    b = classify(flipped)
    assert a.is_closed_ccpsr == b.is_closed_ccpsr
    assert a.singular_at_infinity == b.singular_at_infinity
    assert a.regular_boundary == b.regular_boundary
