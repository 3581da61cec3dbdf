import cmath
import itertools
import math

import numpy as np
import pytest

from ballkernel.classification import (
    Collision,
    Injective,
    PointMap,
    branch_collision,
    candidate_assignments,
    congruence_test,
    counterexample_construct,
    g_power,
    isometry_search,
    isometry_test,
    ratio_matrix,
)
from ballkernel.errors import CapExceeded, ContractError, DomainError, DuplicatePoints, Refusal
from ballkernel.geometry import automorphism_invariant, random_automorphism, random_ball_points
from ballkernel.kernels import KernelSpaceSpec
from ballkernel.linalg import inner, unitary_defect


def test_isometry_test_identity_map(rng):
    A = random_ball_points(rng, 4, 2)
    res = isometry_test(PointMap(A, A), KernelSpaceSpec(2, 1.5))
    assert res
    assert np.allclose(res.factors, 1, atol=1e-15)
    assert res.residual == 0


@pytest.mark.parametrize("t", [1, 0.5, 2.5])
def test_isometry_test_factor_formula(rng, t):
    d = 2
    A = random_ball_points(rng, 5, d)
    phi = random_automorphism(rng, d)
    a = phi.base
    res = isometry_test(PointMap(A, phi.apply_many(A)), KernelSpaceSpec(d, t))
    assert res and res.residual < 1e-9
    expected = np.array([abs(math.sqrt(1 - np.vdot(a, a).real) / (1 - inner(x, a))) ** t for x in A])
    assert np.max(np.abs(np.abs(res.factors) - expected)) < 1e-8


def test_isometry_test_rejects_non_isometry(rng):
    A = random_ball_points(rng, 4, 2)
    B = random_ball_points(rng, 4, 2)
    res = isometry_test(PointMap(A, B), KernelSpaceSpec(2, 1))
    assert not res and res.rank > 1


def test_point_map_validation():
    with pytest.raises(ContractError):
        PointMap([[0.1], [0.2]], [[0.1], [0.2]], (0, 0))
    with pytest.raises(ContractError):
        PointMap([[0.1], [0.2]], [[0.1]])
    with pytest.raises(DuplicatePoints):
        PointMap([[0.1], [0.1]], [[0.1], [0.2]])


def test_ratio_matrix_is_hermitian(rng):
    A, B = random_ball_points(rng, 5, 3), random_ball_points(rng, 5, 3)
    R = ratio_matrix(PointMap(A, B), KernelSpaceSpec(3, 2.2))
    assert np.array_equal(R, R.conj().T)


def test_search_permuted_copy(rng):
    A = random_ball_points(rng, 5, 2)
    perm = [3, 0, 4, 1, 2]
    B = A[perm]
    res = isometry_search(A, B, KernelSpaceSpec(2, 1))
    assert res
    assert np.allclose(res.map.paired_targets(), A)


def test_search_size_mismatch(rng):
    res = isometry_search(random_ball_points(rng, 3, 2), random_ball_points(rng, 2, 2), KernelSpaceSpec(2, 1))
    assert not res


def test_search_cap():
    with pytest.raises(CapExceeded):
        isometry_search(np.linspace(0, 0.5, 10)[:, None], np.linspace(0, 0.5, 10)[:, None], KernelSpaceSpec(1, 1))


def test_search_against_brute_force(rng):
    space = KernelSpaceSpec(2, 2)
    A = random_ball_points(rng, 5, 2)
    B = random_automorphism(rng, 2).apply_many(A)[[2, 4, 0, 1, 3]]
    pruned = isometry_search(A, B, space)
    # oracle: test every one of the 120 assignments directly
    hits = [s for s in itertools.permutations(range(5)) if isometry_test(PointMap(A, B, s), space)]
    assert len(hits) >= 1
    assert pruned and pruned.map.assignment == hits[0]
    brute = isometry_search(A, B, space, prune=False)
    assert brute.map.assignment == hits[0]


def test_candidate_assignments_lexicographic(rng):
    A = random_ball_points(rng, 4, 1)
    cands = list(candidate_assignments(A, A))
    assert cands == sorted(cands)
    assert (0, 1, 2, 3) in cands


# --- congruence -------------------------------------------------------------


def test_congruence_recovers_automorphism(rng):
    for d in (1, 2, 3):
        A = random_ball_points(rng, 5, d)
        phi = random_automorphism(rng, d)
        B = phi.apply_many(A)
        verdict = congruence_test(A, B)
        assert verdict
        assert verdict.assignment == (0, 1, 2, 3, 4)
        assert np.max(np.linalg.norm(verdict.witness.apply_many(A) - B, axis=1)) < 1e-8
        assert unitary_defect(verdict.witness.unitary) < 1e-10


def test_congruence_invariant_mismatch():
    A = [[0, 0], [0.5, 0]]
    B = [[0, 0], [0.6, 0]]
    # oracle: the invariant differs between the two pairs
    dA = automorphism_invariant(np.array(A[0]), np.array(A[1]))
    dB = automorphism_invariant(np.array(B[0]), np.array(B[1]))
    assert dA == pytest.approx(1 / 0.75) and dB == pytest.approx(1 / 0.64)
    verdict = congruence_test(A, B)
    assert not verdict and verdict.refusal_reason
    assert not congruence_test(A, B, assignment=(0, 1))


def test_congruence_refuses_mirror_image(rng):
    # complex conjugation preserves the invariant but is anti-holomorphic
    A = random_ball_points(rng, 4, 2)
    assert not congruence_test(A, A.conj())


def test_congruence_cap():
    X = np.linspace(0, 0.5, 10)[:, None]
    with pytest.raises(CapExceeded):
        congruence_test(X, X)


# --- branch collision and counterexamples -----------------------------------


def test_branch_collision_injective_for_small_t():
    for t in (0.5, 1, 2):
        res = branch_collision(t)
        assert isinstance(res, Injective)
        assert res.pairs_checked > 9000 and res.min_separation > 1e-12


def test_branch_collision_t4():
    res = branch_collision(4, r=0.5)
    assert isinstance(res, Collision)
    assert res.z == pytest.approx(1 - 0.5 * cmath.exp(1j * math.pi / 4), abs=1e-16)
    assert res.w == res.z.conjugate()
    assert abs(res.gz + 1 / 16) < 1e-15 and abs(res.gw + 1 / 16) < 1e-15


def test_branch_collision_t3():
    res = branch_collision(3, r=0.8)
    # oracle: evaluate both sides independently
    assert abs(g_power(res.z, 3) - (-0.512)) < 1e-14
    assert abs(g_power(res.z, 3) - g_power(res.w, 3)) < 1e-14
    assert abs(res.z) == abs(res.w) and res.z != res.w


def test_branch_collision_errors():
    with pytest.raises(DomainError):
        branch_collision(0)
    with pytest.raises(DomainError):
        branch_collision(3, r=1.5)


@pytest.mark.parametrize("t, d", [(3, 1), (4, 2), (2.1, 3)])
def test_counterexample_verdicts(t, d):
    ce = counterexample_construct(t, d)
    assert inner(ce.A[1], ce.A[2]) == ce.z
    assert inner(ce.B[1], ce.B[2]) == ce.w
    assert np.allclose(np.linalg.norm(ce.A, axis=1), np.linalg.norm(ce.B, axis=1), atol=1e-15)
    R = ratio_matrix(ce.map, KernelSpaceSpec(d, t))
    assert np.max(np.abs(R - 1)) < 1e-10
    assert isometry_test(ce.map, KernelSpaceSpec(d, t))
    assert not congruence_test(ce.A, ce.B, assignment=ce.map.assignment)


def test_counterexample_sets_are_congruent_another_way():
    # the point sets coincide as sets up to swapping a1 and a2's partners
    ce = counterexample_construct(3)
    verdict = congruence_test(ce.A, ce.B)
    assert verdict and verdict.assignment != ce.map.assignment


def test_counterexample_refused_for_small_t():
    for t in (0.5, 1, 2):
        with pytest.raises(Refusal):
            counterexample_construct(t)
