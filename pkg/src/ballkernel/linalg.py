"""Complex scalar and dense matrix substrate.

Principal-branch logarithms and powers, Hermitian rank tests, rank-one
factorisation and unitary completion of inner-product-preserving data.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, DomainError, NotIsometricData, NotPositive, NotRankOne


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical tolerances used by every decision in the package.

    Parameters
    ----------
    tol_rank
        Relative singular-value cutoff for rank decisions.
    tol_eq
        Entrywise equality slack for residual checks.
    tol_herm
        Hermitian symmetry slack (scaled by ``max(1, max|M|)``).
    """

    tol_rank: float = 1e-9
    tol_eq: float = 1e-8
    tol_herm: float = 1e-10

    def __post_init__(self):
        for name in ("tol_rank", "tol_eq", "tol_herm"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ContractError(f"{name} must lie in (0, 1), got {value!r}")


DEFAULT_TOL = TolerancePolicy()


def principal_log(z: complex) -> complex:
    """Principal logarithm with imaginary part in ``(-pi, pi]``."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")
    if z == 0:
        raise DomainError("logarithm of zero")
    if z.imag == 0.0 and z.real < 0.0:
        # cmath honours the sign of zero and would return -pi for -0.0j
        return complex(math.log(-z.real), math.pi)
    return cmath.log(z)


def principal_power(z, t: float):
    """``exp(t * Log z)`` on the right half plane ``Re z > 0``.

    Accepts a scalar or an ndarray; arrays are handled elementwise.
    """
    if np.ndim(z) == 0:
        z = complex(z)
        if not z.real > 0.0:
            raise DomainError(f"principal_power needs Re(z) > 0, got {z!r}")
        return cmath.exp(t * principal_log(z))
    z = np.asarray(z, dtype=complex)
    if not np.all(z.real > 0.0):
        raise DomainError("principal_power needs Re(z) > 0 for every entry")
    return np.exp(t * np.log(z))


def hermitian_defect(M) -> float:
    M = np.asarray(M, dtype=complex)
    return float(np.max(np.abs(M - M.conj().T), initial=0.0))


def check_hermitian(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    defect = hermitian_defect(M)
    if defect > tol.tol_herm * scale:
        raise ContractError(f"matrix is not Hermitian (defect {defect:.3g})")
    return M


def numerical_rank(M, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Count singular values above ``tol_rank`` times the largest one."""
    M = check_hermitian(M, tol)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.tol_rank * s[0]))


def rank1_factor(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Return ``f`` with ``M[i, j] == f[i] * conj(f[j])``.

    The global phase is fixed by making ``f[0]`` real and positive:
    ``f[0] = sqrt(M[0, 0])`` and ``f[j] = conj(M[0, j]) / f[0]``.
    """
    M = check_hermitian(M, tol)
    diag = M.diagonal()
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.any(diag.real <= 0.0) or np.any(np.abs(diag.imag) > tol.tol_herm * scale):
        raise NotPositive("rank-one factor needs a strictly positive real diagonal")
    rank = numerical_rank(M, tol)
    if rank != 1:
        raise NotRankOne(rank)
    f0 = math.sqrt(diag[0].real)
    f = np.conj(M[0]) / f0
    f[0] = f0
    return f


def rank1_residual(M, f) -> float:
    """Max entrywise error of the reconstruction ``f f^*``."""
    M = np.asarray(M, dtype=complex)
    f = np.asarray(f, dtype=complex)
    return float(np.max(np.abs(M - np.outer(f, f.conj())), initial=0.0))


def inner(x, y) -> complex:
    """``<x, y> = sum x_i conj(y_i)`` (linear in the first slot)."""
    return complex(np.vdot(y, x))


def inner_products(X) -> np.ndarray:
    """Pairwise inner products of the rows of ``X``: ``G[i, j] = <x_i, x_j>``."""
    X = np.asarray(X, dtype=complex)
    return X @ X.conj().T


def _orthonormal_completion(Q: np.ndarray, d: int) -> np.ndarray:
    """Extend the orthonormal columns of ``Q`` (d x r) to a d x d unitary."""
    r = Q.shape[1]
    if r == 0:
        return np.eye(d, dtype=complex)
    full, _ = scipy.linalg.qr(Q, mode="full")
    return np.hstack([Q, full[:, r:]])


def _polar_unitary(M: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(M, full_matrices=False)
    return W @ Vh


def unitary_extension(sources, targets, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``U`` on C^d with ``U @ sources[i] == targets[i]``.

    Requires the two families to have the same pairwise inner products.  A
    pivoted QR of the sources picks an orthonormal basis of their span; the
    matching basis of the target span is the polar factor of
    ``targets^T C^*`` where ``C`` holds the source coordinates.  Both bases
    are completed by a full QR, which fixes the otherwise arbitrary
    complements deterministically.
    """
    S = np.atleast_2d(np.asarray(sources, dtype=complex))
    T = np.atleast_2d(np.asarray(targets, dtype=complex))
    if S.shape != T.shape:
        raise ContractError(f"shape mismatch: {S.shape} vs {T.shape}")
    k, d = S.shape
    if k == 0:
        return np.eye(d, dtype=complex)
    gap = float(np.max(np.abs(inner_products(S) - inner_products(T))))
    if gap > tol.tol_eq:
        raise NotIsometricData(f"inner products differ by {gap:.3g}")

    # columns are the vectors
    Sc, Tc = S.T, T.T
    Q, R, piv = scipy.linalg.qr(Sc, mode="economic", pivoting=True)
    rdiag = np.abs(np.diag(R))
    cutoff = tol.tol_rank * max(1.0, float(rdiag[0]) if rdiag.size else 0.0)
    r = int(np.count_nonzero(rdiag > cutoff))
    Qs = Q[:, :r]
    coords = Qs.conj().T @ Sc  # r x k
    Qt = _polar_unitary(Tc @ coords.conj().T) if r else np.zeros((d, 0), dtype=complex)

    U = _orthonormal_completion(Qt, d) @ _orthonormal_completion(Qs, d).conj().T
    U = _polar_unitary(U)

    miss = float(np.max(np.linalg.norm(U @ Sc - Tc, axis=0)))
    if miss > tol.tol_eq:
        raise NotIsometricData(f"unitary extension misses targets by {miss:.3g}")
    return U


def unitary_defect(U) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    phases = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * phases
