"""Isometry and congruence decisions for finite subsets of the ball.

A bijection ``phi: A -> B`` induces an isometric isomorphism of the kernel
subspaces ``H_A -> H_B`` exactly when the ratio matrix

    R[i, j] = k(a_i, a_j) / k(phi a_i, phi a_j)

factors as ``f(a_i) conj(f(a_j))``, i.e. has rank one with a positive
diagonal.  ``A`` and ``B`` are congruent when some automorphism of the ball
carries one onto the other.  For ``t <= 2`` the two notions coincide; for
``t > 2`` they do not, and :func:`counterexample_construct` exhibits a map
that passes the first test and fails the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    ContractError,
    DomainError,
    DuplicatePoints,
    NotIsometricData,
    NotRankOne,
    Refusal,
)
from .geometry import (
    BallAutomorphism,
    _involution_rows,
    as_point_set,
    compose,
    invariant_matrix,
    involution_at,
)
from .kernels import KernelSpaceSpec, find_duplicate
from .linalg import (
    DEFAULT_TOL,
    TolerancePolicy,
    inner_products,
    numerical_rank,
    principal_power,
    rank1_factor,
    rank1_residual,
    unitary_extension,
)

SEARCH_CAP = 9
# relative slack when comparing automorphism invariants during pruning; loose
# on purpose so that pruning never discards an assignment the full test accepts
PRUNE_RTOL = 1e-6


def _distinct_points(points, d=None) -> np.ndarray:
    X = as_point_set(points, d)
    dup = find_duplicate(X)
    if dup is not None:
        raise DuplicatePoints(*dup)
    return X


@dataclass(frozen=True, eq=False)
class PointMap:
    """The bijection ``sources[i] -> targets[assignment[i]]``."""

    sources: np.ndarray
    targets: np.ndarray
    assignment: tuple = None

    def __post_init__(self):
        A = _distinct_points(self.sources)
        B = _distinct_points(self.targets)
        if A.shape != B.shape:
            raise ContractError(f"source shape {A.shape} does not match target shape {B.shape}")
        sigma = tuple(range(len(A))) if self.assignment is None else tuple(int(j) for j in self.assignment)
        if sorted(sigma) != list(range(len(A))):
            raise ContractError(f"assignment {sigma} is not a permutation of range({len(A)})")
        object.__setattr__(self, "sources", A)
        object.__setattr__(self, "targets", B)
        object.__setattr__(self, "assignment", sigma)

    @property
    def dim(self) -> int:
        return self.sources.shape[1]

    def __len__(self):
        return len(self.sources)

    def paired_targets(self) -> np.ndarray:
        return self.targets[list(self.assignment)]


@dataclass(frozen=True, eq=False)
class IsometryWitness:
    """Factors ``f(a_i)`` proving that ``map`` induces an isometry."""

    map: PointMap
    factors: np.ndarray
    residual: float

    found = True

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotIsometric:
    reason: str
    rank: Optional[int] = None

    found = False

    def __bool__(self):
        return False


def ratio_matrix(pmap: PointMap, space: KernelSpaceSpec) -> np.ndarray:
    """``R[i, j] = (1 - <b_i, b_j>)^t / (1 - <a_i, a_j>)^t`` (exactly Hermitian).

    Both bases lie in the right half plane, so the quotient of principal
    powers is ``exp(t (Log p - Log q))``; this form returns exactly 1 for
    identical entries.
    """
    A = pmap.sources
    B = pmap.paired_targets()
    P, Q = 1.0 - inner_products(B), 1.0 - inner_products(A)
    if not (np.all(P.real > 0) and np.all(Q.real > 0)):
        raise DomainError("kernel base left the right half plane")
    R = np.exp(space.t * (np.log(P) - np.log(Q)))
    upper = np.triu(R, 1)
    return upper + upper.conj().T + np.diag(R.diagonal().real)


def isometry_test(pmap: PointMap, space: KernelSpaceSpec) -> IsometryWitness | NotIsometric:
    """Decide whether ``pmap`` induces an isometric isomorphism ``H_A -> H_B``.

    The reported residual is the max entrywise reconstruction error of the
    ratio matrix divided by its largest entry.
    """
    if pmap.dim != space.d:
        raise ContractError(f"points live in C^{pmap.dim}, space is over C^{space.d}")
    R = ratio_matrix(pmap, space)
    try:
        f = rank1_factor(R, space.tol)
    except NotRankOne as exc:
        return NotIsometric(f"ratio matrix has rank {exc.rank}", exc.rank)
    residual = rank1_residual(R, f) / float(np.max(np.abs(R)))
    if residual > space.tol.tol_eq:
        return NotIsometric(f"rank-one reconstruction error {residual:.3g}", 1)
    return IsometryWitness(pmap, f, residual)


def _check_sizes(A: np.ndarray, B: np.ndarray, cap: int):
    if len(A) > cap:
        raise CapExceeded(len(A), cap)
    if A.shape[1:] != B.shape[1:]:
        raise ContractError(f"dimension mismatch: C^{A.shape[1]} vs C^{B.shape[1]}")


def candidate_assignments(A, B, rtol: float = PRUNE_RTOL) -> Iterator[tuple]:
    """Bijections ``A -> B`` that preserve the invariant ``|1-<x,y>|^2/((1-|x|^2)(1-|y|^2))``.

    Yields in lexicographic order.  The invariant is preserved by every ball
    automorphism and, through the 2x2 minors of the ratio matrix, by every
    map that induces an isometry for any exponent ``t``; pruning on it is
    therefore exact.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = len(A)
    if n != len(B):
        return
    DA = invariant_matrix(A)
    DB = invariant_matrix(B)
    iu = np.triu_indices(n, 1)
    sa, sb = np.sort(DA[iu]), np.sort(DB[iu])
    if not np.allclose(sa, sb, rtol=rtol, atol=0.0):
        return

    def close(x, y):
        return abs(x - y) <= rtol * max(x, y)

    sigma: list[int] = []
    used = [False] * n

    def extend(i):
        if i == n:
            yield tuple(sigma)
            return
        for j in range(n):
            if used[j]:
                continue
            if all(close(DA[i, k], DB[j, sigma[k]]) for k in range(i)):
                used[j] = True
                sigma.append(j)
                yield from extend(i + 1)
                sigma.pop()
                used[j] = False

    yield from extend(0)


def isometry_search(A, B, space: KernelSpaceSpec, cap: int = SEARCH_CAP, prune: bool = True):
    """First assignment (lexicographic) that induces an isometry, if any.

    With ``prune=False`` every one of the ``n!`` permutations is tested.
    """
    import itertools

    A = _distinct_points(A, space.d)
    B = _distinct_points(B, space.d)
    if len(A) != len(B):
        return NotIsometric(f"no bijection between {len(A)} and {len(B)} points")
    _check_sizes(A, B, cap)
    candidates = candidate_assignments(A, B) if prune else itertools.permutations(range(len(A)))
    tried = 0
    for sigma in candidates:
        tried += 1
        result = isometry_test(PointMap(A, B, sigma), space)
        if result:
            return result
    return NotIsometric(f"no assignment induces an isometry ({tried} tested)")


@dataclass(frozen=True, eq=False)
class CongruenceVerdict:
    congruent: bool
    witness: Optional[BallAutomorphism] = None
    assignment: Optional[tuple] = None
    max_error: Optional[float] = None
    refusal_reason: Optional[str] = None

    def __bool__(self):
        return self.congruent


def _try_assignment(A, B, sigma, tol: TolerancePolicy):
    """Extend ``A[i] -> B[sigma[i]]`` to an automorphism, or explain why not.

    Moves ``A[0]`` and its partner to the origin with involutions, compares
    the inner products of the moved sets, extends by a unitary and conjugates
    back: the witness is ``phi_b o U o phi_a``.
    """
    Bs = B[list(sigma)]
    a, b = A[0], Bs[0]
    A0 = _involution_rows(a, A)
    B0 = _involution_rows(b, Bs)
    gap = np.abs(inner_products(A0) - inner_products(B0))
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    if gap[i, j] > tol.tol_eq:
        return None, (
            f"inner products differ after centring at point 0: "
            f"pair ({i}, {j}) off by {gap[i, j]:.3g}"
        )
    try:
        U = unitary_extension(A0, B0, tol)
        witness = compose(
            involution_at(b, tol),
            compose(BallAutomorphism.from_unitary(U, tol), involution_at(a, tol)),
        )
    except (NotIsometricData, ContractError, DomainError) as exc:
        return None, f"extension failed: {exc}"
    err = float(np.max(np.linalg.norm(witness.apply_many(A) - Bs, axis=1)))
    if err > tol.tol_eq:
        return None, f"witness misses targets by {err:.3g}"
    return (witness, err), None


def congruence_test(
    A,
    B,
    tol: TolerancePolicy = DEFAULT_TOL,
    assignment: Optional[Sequence[int]] = None,
    cap: int = SEARCH_CAP,
) -> CongruenceVerdict:
    """Decide whether an automorphism of the ball carries ``A`` onto ``B``.

    With ``assignment`` given, only that pairing is tried: the question is
    then whether that particular map extends to an automorphism.  Otherwise
    all invariant-preserving bijections are tried in lexicographic order.
    """
    A = _distinct_points(A)
    B = _distinct_points(B)
    if len(A) != len(B):
        return CongruenceVerdict(False, refusal_reason=f"sizes differ: {len(A)} vs {len(B)}")
    _check_sizes(A, B, cap)
    if len(A) == 0:
        return CongruenceVerdict(True, BallAutomorphism.identity(A.shape[1]), (), 0.0)

    if assignment is not None:
        sigma = tuple(int(j) for j in assignment)
        if sorted(sigma) != list(range(len(A))):
            raise ContractError(f"assignment {sigma} is not a permutation")
        found, reason = _try_assignment(A, B, sigma, tol)
        if found:
            return CongruenceVerdict(True, found[0], sigma, found[1])
        return CongruenceVerdict(False, assignment=sigma, refusal_reason=reason)

    tried = 0
    for sigma in candidate_assignments(A, B):
        tried += 1
        found, _ = _try_assignment(A, B, sigma, tol)
        if found:
            return CongruenceVerdict(True, found[0], sigma, found[1])
    if tried == 0:
        reason = "no bijection preserves the pairwise automorphism invariants"
    else:
        reason = f"none of the {tried} invariant-preserving bijections extends to an automorphism"
    return CongruenceVerdict(False, refusal_reason=reason)


# --- branch behaviour of (1 - z)^t -----------------------------------------


def g_power(z, t: float):
    """``(1 - z)^t`` on the principal branch."""
    return principal_power(1.0 - z, t)


@dataclass(frozen=True)
class Injective:
    t: float
    pairs_checked: int
    min_separation: float

    injective = True


@dataclass(frozen=True)
class Collision:
    t: float
    r: float
    z: complex
    w: complex
    gz: complex
    gw: complex

    injective = False

    @property
    def gap(self) -> float:
        return abs(self.gz - self.gw)


def default_collision_radius(t: float) -> float:
    return min(0.8, math.cos(math.pi / t))


def branch_collision(t: float, r: Optional[float] = None, seed: int = 0, pairs: int = 10_000):
    """Injectivity of ``z -> (1 - z)^t`` on the punctured disk.

    For ``t <= 2`` the map is injective: ``1 - z`` stays in the right half
    plane, so two arguments can differ by at most ``pi`` and ``t`` times that
    cannot reach ``2 pi``.  The verdict carries a random spot-check (pairs at
    least ``1e-3`` apart) reporting the smallest image separation seen.

    For ``t > 2``, ``z = 1 - r exp(i pi / t)`` and ``w = conj(z)`` satisfy
    ``(1 - z)^t = (1 - w)^t = -r^t`` with ``|z| = |w|``.  Any
    ``0 < r < min(1, 2 cos(pi / t))`` keeps ``z`` in the disk.
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive, got {t!r}")
    if t <= 2:
        rng = np.random.default_rng(seed)
        Z = _random_disk(rng, pairs)
        W = _random_disk(rng, pairs)
        keep = np.abs(Z - W) > 1e-3
        sep = np.abs(g_power(Z[keep], t) - g_power(W[keep], t))
        return Injective(t, int(keep.sum()), float(sep.min()) if sep.size else math.inf)

    c = math.cos(math.pi / t)
    r = default_collision_radius(t) if r is None else float(r)
    if not (0.0 < r < min(1.0, 2.0 * c)):
        raise DomainError(f"r={r!r} would leave the punctured disk for t={t!r}")
    zp = r * complex(math.cos(math.pi / t), math.sin(math.pi / t))
    z = 1.0 - zp
    w = z.conjugate()
    return Collision(t, r, z, w, g_power(z, t), g_power(w, t))


def _random_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    z = np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    return z[np.abs(z) > 0]


@dataclass(frozen=True, eq=False)
class Counterexample:
    A: np.ndarray
    B: np.ndarray
    map: PointMap
    z: complex
    w: complex


def counterexample_construct(t: float, d: int = 1, r: Optional[float] = None) -> Counterexample:
    """Three-point sets whose obvious bijection is isometric but not congruent.

    With ``(z, w)`` from :func:`branch_collision`, ``A = {0, a1, a2}`` and
    ``B = {0, b1, b2}`` where ``a1 = z/sqrt|z| e1``, ``a2 = sqrt|z| e1`` and
    likewise for ``b`` with ``w``, so that ``<a1, a2> = z`` and
    ``<b1, b2> = w``.  The map ``0 -> 0, a_i -> b_i`` has an all-ones ratio
    matrix, yet fixes the origin while changing an inner product, so no
    automorphism (a unitary, once the origin is fixed) extends it.
    """
    if not (math.isfinite(t) and t > 2):
        raise Refusal(f"t = {t!r} <= 2: isometric subspaces come only from congruent sets")
    if int(d) != d or d < 1:
        raise ContractError(f"d must be a positive integer, got {d!r}")
    col = branch_collision(t, r)
    z, w = col.z, col.w
    sz, sw = math.sqrt(abs(z)), math.sqrt(abs(w))
    A = np.zeros((3, d), dtype=complex)
    B = np.zeros((3, d), dtype=complex)
    A[1, 0], A[2, 0] = z / sz, sz
    B[1, 0], B[2, 0] = w / sw, sw
    # report the inner products actually realised, so <a1, a2> == z holds exactly
    z = complex(np.vdot(A[2], A[1]))
    w = complex(np.vdot(B[2], B[1]))
    return Counterexample(A, B, PointMap(A, B), z, w)
