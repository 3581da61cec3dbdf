"""Automorphisms of the unit ball and disk, and pseudo-hyperbolic geometry.

Every automorphism of the ball B_d is stored in the canonical form
``x -> U @ phi_a(x)`` where ``phi_a`` is the involution exchanging ``a``
and the origin and ``U`` is unitary.  ``phi_a`` follows Rudin's formula

    phi_a(x) = (a - P_a x - s_a Q_a x) / (1 - <x, a>),

with ``P_a`` the orthogonal projection onto ``span(a)``, ``Q_a = I - P_a``
and ``s_a = sqrt(1 - |a|^2)``.  ``phi_0`` is taken to be the identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError, InconsistentData
from .linalg import DEFAULT_TOL, TolerancePolicy, unitary_defect

BOUNDARY_MARGIN = 1e-12
# composed base points closer to 0 than this are treated as 0
BASE_SNAP = 1e-13


def as_ball_point(x, d: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a complex vector strictly inside the ball."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.ndim != 1:
        raise ContractError(f"a ball point must be a vector, got shape {x.shape}")
    if d is not None and x.shape[0] != d:
        raise ContractError(f"expected dimension {d}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DomainError("ball point has non-finite coordinates")
    if np.linalg.norm(x) >= 1.0 - BOUNDARY_MARGIN:
        raise DomainError(f"point of norm {np.linalg.norm(x):.17g} is not inside the ball")
    return x


def as_point_set(points, d: int | None = None) -> np.ndarray:
    """Stack points into an ``(n, d)`` complex array, validating each row."""
    rows = [as_ball_point(p, d) for p in points]
    if not rows:
        return np.zeros((0, d or 0), dtype=complex)
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1:
        raise ContractError(f"points have mixed dimensions {sorted(dims)}")
    return np.vstack(rows)


def _involution_rows(a: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Apply ``phi_a`` to each row of ``X``."""
    aa = float(np.vdot(a, a).real)
    if aa == 0.0:
        return X.copy()
    xa = X @ a.conj()  # <x, a> per row
    proj = np.outer(xa / aa, a)
    s = math.sqrt(1.0 - aa)
    return (a - proj - s * (X - proj)) / (1.0 - xa)[:, None]


@dataclass(frozen=True, eq=False)
class BallAutomorphism:
    """The map ``x -> unitary @ phi_base(x)`` of the unit ball."""

    unitary: np.ndarray
    base: np.ndarray
    tol: TolerancePolicy = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        U = np.asarray(self.unitary, dtype=complex)
        a = as_ball_point(self.base)
        if U.shape != (a.shape[0], a.shape[0]):
            raise ContractError(f"unitary of shape {U.shape} does not match dimension {a.shape[0]}")
        defect = unitary_defect(U)
        if defect > self.tol.tol_eq:
            raise ContractError(f"matrix is not unitary (defect {defect:.3g})")
        object.__setattr__(self, "unitary", U)
        object.__setattr__(self, "base", a)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    @property
    def identity_involution(self) -> bool:
        """True when the involution part is trivial, i.e. a pure unitary."""
        return not np.any(self.base)

    @classmethod
    def identity(cls, d: int) -> "BallAutomorphism":
        return cls(np.eye(d, dtype=complex), np.zeros(d, dtype=complex))

    @classmethod
    def from_unitary(cls, U, tol: TolerancePolicy = DEFAULT_TOL) -> "BallAutomorphism":
        U = np.asarray(U, dtype=complex)
        return cls(U, np.zeros(U.shape[0], dtype=complex), tol)

    def apply_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        if X.shape[1] != self.dim:
            raise ContractError(f"points of dimension {X.shape[1]} for an automorphism of B_{self.dim}")
        Y = _involution_rows(self.base, X) @ self.unitary.T
        if np.any(np.linalg.norm(Y, axis=1) >= 1.0 - BOUNDARY_MARGIN):
            raise DomainError("image reached the boundary; numerical breakdown")
        return Y

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def inverse(self) -> "BallAutomorphism":
        # phi_a o U^* o phi_{Ua} = U^* by unitary equivariance of the involutions
        return BallAutomorphism(self.unitary.conj().T, self.unitary @ self.base, self.tol)

    def action_error(self, other: "BallAutomorphism", X) -> float:
        """Max Euclidean distance between the two actions on the rows of ``X``."""
        return float(np.max(np.linalg.norm(self.apply_many(X) - other.apply_many(X), axis=1)))


def involution_at(a, tol: TolerancePolicy = DEFAULT_TOL) -> BallAutomorphism:
    """The involution exchanging ``a`` and 0 (identity when ``a = 0``)."""
    a = as_ball_point(a)
    return BallAutomorphism(np.eye(a.shape[0], dtype=complex), a, tol)


def apply(phi: BallAutomorphism, x) -> np.ndarray:
    x = as_ball_point(x, phi.dim)
    return phi.apply_many(x[None, :])[0]


def compose(phi: BallAutomorphism, psi: BallAutomorphism) -> BallAutomorphism:
    """Canonical form of ``phi o psi``.

    The new base is ``(phi o psi)^{-1}(0)``; the new unitary is read off the
    origin-fixing (hence linear) map ``phi o psi o phi_base`` column by column
    and projected onto the unitary group.
    """
    if phi.dim != psi.dim:
        raise ContractError(f"dimension mismatch: {phi.dim} vs {psi.dim}")
    d = phi.dim
    base = psi.inverse().apply_many(phi.base[None, :])[0]
    if np.linalg.norm(base) < BASE_SNAP:
        # phi_a tends to -id as a -> 0 while phi_0 = id; a rounding-level base
        # is really the origin, and reading the unitary at 0 keeps it continuous
        base = np.zeros(d, dtype=complex)
    probe = 0.5 * np.eye(d, dtype=complex)
    lin = phi.apply_many(psi.apply_many(_involution_rows(base, probe))).T / 0.5
    defect = unitary_defect(lin)
    if defect > phi.tol.tol_eq:
        raise ContractError(f"composition lost unitarity (defect {defect:.3g})")
    W, _, Vh = np.linalg.svd(lin)
    return BallAutomorphism(W @ Vh, base, phi.tol)


def rudin_identity_residual(phi: BallAutomorphism, x, y) -> float:
    """``|lhs - rhs|`` for the transformation rule of ``1 - <x, y>``.

    With ``a = phi^{-1}(0)``::

        1 - <phi x, phi y> = (1 - |a|^2)(1 - <x, y>) / ((1 - <x, a>)(1 - <a, y>))
    """
    a = phi.base
    x = as_ball_point(x, phi.dim)
    y = as_ball_point(y, phi.dim)
    px, py = phi.apply_many(np.vstack([x, y]))
    lhs = 1.0 - np.vdot(py, px)
    aa = np.vdot(a, a).real
    rhs = (1.0 - aa) * (1.0 - np.vdot(y, x)) / ((1.0 - np.vdot(a, x)) * (1.0 - np.vdot(y, a)))
    return float(abs(lhs - rhs))


def automorphism_invariant(x, y) -> float:
    """``|1 - <x, y>|^2 / ((1 - |x|^2)(1 - |y|^2))``, preserved by Aut(B_d).

    Equals ``1 / (1 - rho(x, y)^2)`` where rho is the pseudo-hyperbolic
    distance, so it is a cheap necessary condition for congruence.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    num = abs(1.0 - np.vdot(y, x)) ** 2
    return float(num / ((1.0 - np.vdot(x, x).real) * (1.0 - np.vdot(y, y).real)))


def invariant_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    G = X @ X.conj().T
    nrm = 1.0 - np.real(np.diagonal(G))
    return np.abs(1.0 - G) ** 2 / np.outer(nrm, nrm)


def random_ball_points(rng: np.random.Generator, n: int, d: int, radius: float = 0.9) -> np.ndarray:
    """``n`` points uniform in the ball of the given radius in C^d."""
    Z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / (2 * d))
    return Z * r[:, None]


def random_automorphism(rng: np.random.Generator, d: int, radius: float = 0.9) -> BallAutomorphism:
    from .linalg import random_unitary

    a = random_ball_points(rng, 1, d, radius)[0]
    return BallAutomorphism(random_unitary(d, rng), a)


# --- the disk -------------------------------------------------------------


def _disk_point(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite disk point {z!r}")
    if abs(z) >= 1.0 - BOUNDARY_MARGIN:
        raise DomainError(f"{z!r} is not inside the unit disk")
    return z


def pseudo_hyperbolic(x, y) -> float:
    """``|x - y| / |1 - conj(x) y|`` for ``x, y`` in the open disk."""
    x = _disk_point(x)
    y = _disk_point(y)
    return abs(x - y) / abs(1.0 - x.conjugate() * y)


@dataclass(frozen=True)
class DiskAutomorphism:
    """``z -> exp(i theta) (z - b) / (1 - conj(b) z)``.

    ``rotation_free`` marks a fit made from a single pair, where any
    post-rotation about the image point would fit equally well.
    """

    theta: float
    b: complex
    rotation_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, "theta", math.remainder(float(self.theta), 2 * math.pi))
        object.__setattr__(self, "b", _disk_point(self.b))

    @property
    def rotation(self) -> complex:
        return cmath.exp(1j * self.theta)

    def __call__(self, z):
        return self.rotation * (z - self.b) / (1.0 - np.conj(self.b) * z)

    def matrix(self) -> np.ndarray:
        h = cmath.exp(0.5j * self.theta)
        return np.array([[h, -h * self.b], [-self.b.conjugate() / h, 1.0 / h]])

    @classmethod
    def from_matrix(cls, M) -> "DiskAutomorphism":
        (p, q), (_, s) = np.asarray(M, dtype=complex)
        return cls(cmath.phase(p / s), -q / p)

    def compose(self, other: "DiskAutomorphism") -> "DiskAutomorphism":
        return DiskAutomorphism.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> "DiskAutomorphism":
        return DiskAutomorphism.from_matrix(np.linalg.inv(self.matrix()))


def _translation(c: complex) -> np.ndarray:
    """Matrix of ``z -> (z - c) / (1 - conj(c) z)``."""
    return np.array([[1.0, -c], [-c.conjugate(), 1.0]])


def _translation_inv(c: complex) -> np.ndarray:
    return np.array([[1.0, c], [c.conjugate(), 1.0]])


@dataclass(frozen=True)
class NoFit:
    """No disk automorphism matches the data; ``pair`` locates the obstruction."""

    pair: tuple
    reason: str


def mobius_fit(pairs, tol: TolerancePolicy = DEFAULT_TOL):
    """Recover the disk automorphism sending each ``x_i`` to ``y_i``.

    The first pair fixes the translation part and the second fixes the
    rotation; every remaining pair is then checked.  Pseudo-hyperbolic
    distances are compared first, since an automorphism must preserve them.
    Returns a :class:`DiskAutomorphism` or a :class:`NoFit`.
    """
    cleaned = []
    seen = {}
    for x, y in pairs:
        x, y = _disk_point(x), _disk_point(y)
        key = next((k for k in seen if abs(k - x) < BOUNDARY_MARGIN), None)
        if key is not None:
            if abs(seen[key] - y) >= BOUNDARY_MARGIN:
                raise InconsistentData(f"{x!r} is paired with both {seen[key]!r} and {y!r}")
            continue
        seen[x] = y
        cleaned.append((x, y))
    if not cleaned:
        raise ContractError("mobius_fit needs at least one pair")

    n = len(cleaned)
    for i in range(n):
        for j in range(i + 1, n):
            rx = pseudo_hyperbolic(cleaned[i][0], cleaned[j][0])
            ry = pseudo_hyperbolic(cleaned[i][1], cleaned[j][1])
            if abs(rx - ry) > tol.tol_eq:
                return NoFit((i, j), f"pseudo-hyperbolic distances differ: {rx:.12g} vs {ry:.12g}")

    (x1, y1) = cleaned[0]
    if n == 1:
        fit = DiskAutomorphism.from_matrix(_translation_inv(y1) @ _translation(x1))
        return DiskAutomorphism(fit.theta, fit.b, rotation_free=True)

    x2, y2 = cleaned[1]
    u = (x2 - x1) / (1.0 - x1.conjugate() * x2)
    v = (y2 - y1) / (1.0 - y1.conjugate() * y2)
    h = cmath.exp(0.5j * (cmath.phase(v) - cmath.phase(u)))
    rot = np.array([[h, 0.0], [0.0, 1.0 / h]])
    fit = DiskAutomorphism.from_matrix(_translation_inv(y1) @ rot @ _translation(x1))

    for i, (x, y) in enumerate(cleaned):
        if abs(fit(x) - y) > tol.tol_eq:
            return NoFit((0, i), f"orientation-reversing data: pair {i} misses by {abs(fit(x) - y):.3g}")
    return fit
