import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballkernel.errors import ContractError, DomainError, InconsistentData
from ballkernel.geometry import (
    BallAutomorphism,
    DiskAutomorphism,
    NoFit,
    apply,
    automorphism_invariant,
    compose,
    involution_at,
    mobius_fit,
    pseudo_hyperbolic,
    random_automorphism,
    random_ball_points,
    rudin_identity_residual,
)
from ballkernel.linalg import random_unitary, unitary_defect


def test_involution_at_origin_is_identity(rng):
    phi = involution_at(np.zeros(3))
    X = random_ball_points(rng, 5, 3)
    assert np.array_equal(phi.apply_many(X), X)
    assert phi.identity_involution


def test_involution_one_dimensional_formula(rng):
    phi = involution_at([0.5])
    assert abs(apply(phi, [0.5])[0]) < 1e-16
    for x in 0.9 * (rng.random(10) - 0.5) + 0.9j * (rng.random(10) - 0.5):
        expected = (0.5 - x) / (1 - 0.5 * x)
        assert abs(apply(phi, [x])[0] - expected) < 1e-15


def test_involution_in_c2(rng):
    a = np.array([0.3, 0.0])
    phi = involution_at(a)
    assert np.linalg.norm(phi(a)) < 1e-16
    assert np.allclose(phi(np.zeros(2)), a)
    X = random_ball_points(rng, 100, 2)
    assert np.max(np.abs(phi.apply_many(phi.apply_many(X)) - X)) < 1e-10


def test_involution_rejects_boundary():
    with pytest.raises(DomainError):
        involution_at([1.0, 0.0])
    with pytest.raises(DomainError):
        involution_at([1 - 1e-13])


def test_apply_pure_unitary(rng):
    U = random_unitary(3, rng)
    phi = BallAutomorphism.from_unitary(U)
    x = random_ball_points(rng, 1, 3)[0]
    assert np.allclose(phi(x), U @ x)
    assert np.allclose(BallAutomorphism.identity(3)(x), x)


def test_origin_fixing_automorphism_preserves_inner_products(rng):
    phi = BallAutomorphism.from_unitary(random_unitary(3, rng))
    X = random_ball_points(rng, 6, 3)
    Y = phi.apply_many(X)
    assert np.max(np.abs(X @ X.conj().T - Y @ Y.conj().T)) < 1e-8


def test_automorphism_rejects_non_unitary():
    with pytest.raises(ContractError):
        BallAutomorphism(2 * np.eye(2), np.zeros(2))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_compose_with_inverse_is_identity(rng, d):
    X = random_ball_points(rng, 100, d)
    for _ in range(5):
        phi = random_automorphism(rng, d)
        ident = compose(phi, phi.inverse())
        assert np.max(np.abs(ident.apply_many(X) - X)) < 1e-10
        ident = compose(phi.inverse(), phi)
        assert np.max(np.abs(ident.apply_many(X) - X)) < 1e-10


def test_compose_involution_with_itself(rng):
    a = random_ball_points(rng, 1, 2)[0]
    ident = compose(involution_at(a), involution_at(a))
    X = random_ball_points(rng, 100, 2)
    assert np.max(np.abs(ident.apply_many(X) - X)) < 1e-10
    assert np.linalg.norm(ident.base) < 1e-12


def test_compose_unitary_after_involution(rng):
    a = random_ball_points(rng, 1, 2)[0]
    U = random_unitary(2, rng)
    phi = compose(BallAutomorphism.from_unitary(U), involution_at(a))
    assert np.linalg.norm(phi(a)) < 1e-15
    assert np.allclose(phi.base, a)


def test_compose_matches_pointwise_action(rng):
    for d in (1, 2, 4):
        phi, psi = random_automorphism(rng, d), random_automorphism(rng, d)
        X = random_ball_points(rng, 50, d)
        both = compose(phi, psi)
        assert np.max(np.abs(both.apply_many(X) - phi.apply_many(psi.apply_many(X)))) < 1e-10
        assert unitary_defect(both.unitary) < 1e-13


def test_compose_dimension_mismatch():
    with pytest.raises(ContractError):
        compose(BallAutomorphism.identity(1), BallAutomorphism.identity(2))


def test_rudin_identity_examples(rng):
    a = random_ball_points(rng, 1, 3)[0]
    phi = involution_at(a)
    assert rudin_identity_residual(phi, a, a) < 1e-15
    x, y = random_ball_points(rng, 2, 3)
    assert rudin_identity_residual(involution_at(np.zeros(3)), x, y) == 0.0


def test_rudin_identity_random_d3(rng):
    for _ in range(200):
        phi = random_automorphism(rng, 3)
        x, y = random_ball_points(rng, 2, 3)
        assert rudin_identity_residual(phi, x, y) < 1e-12


def test_automorphism_invariant_is_preserved(rng):
    for d in (1, 2, 3):
        phi = random_automorphism(rng, d)
        x, y = random_ball_points(rng, 2, d)
        before = automorphism_invariant(x, y)
        after = automorphism_invariant(phi(x), phi(y))
        assert abs(before - after) < 1e-10 * before


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_involution_property(d, seed):
    rng = np.random.default_rng(seed)
    a = random_ball_points(rng, 1, d)[0]
    X = random_ball_points(rng, 8, d)
    phi = involution_at(a)
    assert np.max(np.abs(phi.apply_many(phi.apply_many(X)) - X)) < 1e-10


# --- the disk ---------------------------------------------------------------


def test_pseudo_hyperbolic_examples():
    a = 0.3 - 0.4j
    assert pseudo_hyperbolic(0, a) == pytest.approx(abs(a), abs=1e-16)
    assert pseudo_hyperbolic(a, a) == 0
    assert pseudo_hyperbolic(0.5, -0.5) == pytest.approx(0.8, abs=1e-16)


def test_pseudo_hyperbolic_symmetric(rng):
    for _ in range(50):
        x, y = 0.9 * (rng.random(2) - 0.5) + 0.9j * (rng.random(2) - 0.5)
        assert pseudo_hyperbolic(x, y) == pytest.approx(pseudo_hyperbolic(y, x), abs=1e-15)


def test_disk_automorphism_matrix_roundtrip(rng):
    phi = DiskAutomorphism(1.2, 0.3 + 0.2j)
    back = DiskAutomorphism.from_matrix(phi.matrix())
    assert back.theta == pytest.approx(phi.theta)
    assert back.b == pytest.approx(phi.b)
    z = 0.4 - 0.1j
    assert phi.inverse()(phi(z)) == pytest.approx(z)
    psi = DiskAutomorphism(-0.7, -0.5j)
    assert phi.compose(psi)(z) == pytest.approx(phi(psi(z)))


def test_mobius_fit_identity():
    fit = mobius_fit([(0.1, 0.1), (0.5j, 0.5j), (-0.3, -0.3)])
    assert abs(fit.theta) < 1e-14 and abs(fit.b) < 1e-14


def test_mobius_fit_swap_gives_involution():
    fit = mobius_fit([(0, 0.5), (0.5, 0)])
    # oracle: evaluate the expected involution directly
    for z in (0, 0.5, 0.2 + 0.3j, -0.7j):
        assert fit(z) == pytest.approx((0.5 - z) / (1 - 0.5 * z), abs=1e-15)


def test_mobius_fit_distance_obstruction():
    # rho(0, 0.3) = 0.3 but rho(0, 0.4) = 0.4
    result = mobius_fit([(0, 0), (0.3, 0.4)])
    assert isinstance(result, NoFit)
    assert result.pair == (0, 1)


def test_mobius_fit_orientation_obstruction():
    xs = [0.1 + 0.2j, -0.4 + 0.1j, 0.3 - 0.5j]
    result = mobius_fit([(x, x.conjugate()) for x in xs])
    assert isinstance(result, NoFit)


def test_mobius_fit_single_pair_flags_rotation():
    fit = mobius_fit([(0.2, -0.3j)])
    assert fit.rotation_free
    assert fit(0.2) == pytest.approx(-0.3j)


def test_mobius_fit_inconsistent():
    with pytest.raises(InconsistentData):
        mobius_fit([(0.2, 0.1), (0.2, 0.3)])


def test_schwarz_pick_equality_and_contraction(rng):
    phi = DiskAutomorphism(0.4, 0.6 - 0.2j)
    for _ in range(200):
        x, y = np.sqrt(rng.random(2)) * 0.99 * np.exp(2j * math.pi * rng.random(2))
        rho = pseudo_hyperbolic(x, y)
        assert abs(pseudo_hyperbolic(phi(x), phi(y)) - rho) < 1e-12
        assert pseudo_hyperbolic(x * x / 2, y * y / 2) <= rho + 1e-12
