"""Reproducing kernels of H_d^t and of weighted Hardy spaces on the disk.

The kernel of H_d^t is ``k(x, y) = (1 - <x, y>)^(-t)`` with the principal
branch, ``<x, y> = sum x_i conj(y_i)``.  A weighted Hardy space ``H_w`` has
kernel ``sum_n (conj(x) z)^n / w_n``; weights are kept as finite arrays
``w_0 .. w_N`` together with an optional closed-form tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import ContractError, DomainError, DuplicatePoints, NotAFunctionSpace
from .geometry import as_ball_point, as_point_set, _disk_point
from .linalg import DEFAULT_TOL, TolerancePolicy, principal_power

DUPLICATE_RADIUS = 1e-12
DEFAULT_HORIZON = 256


@dataclass(frozen=True)
class KernelSpaceSpec:
    """The space H_d^t together with the tolerances used on it."""

    d: int
    t: float
    tol: TolerancePolicy = DEFAULT_TOL

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ContractError(f"d must be a positive integer, got {self.d!r}")
        if not (math.isfinite(self.t) and self.t > 0):
            raise ContractError(f"t must be positive, got {self.t!r}")


def kernel_eval(x, y, space: KernelSpaceSpec) -> complex:
    """``(1 - <x, y>)^(-t)``."""
    x = as_ball_point(x, space.d)
    y = as_ball_point(y, space.d)
    return 1.0 / principal_power(1.0 - complex(np.vdot(y, x)), space.t)


def kernel_matrix(X, Y, t: float) -> np.ndarray:
    """Unchecked ``K[i, j] = k(X[i], Y[j])`` for already-validated rows."""
    return 1.0 / principal_power(1.0 - X @ Y.conj().T, t)


def find_duplicate(X) -> Optional[tuple]:
    X = np.asarray(X, dtype=complex)
    for i in range(len(X)):
        dist = np.linalg.norm(X[i + 1:] - X[i], axis=1)
        hit = np.flatnonzero(dist < DUPLICATE_RADIUS)
        if hit.size:
            return i, i + 1 + int(hit[0])
    return None


@dataclass(frozen=True, eq=False)
class GramMatrix:
    points: np.ndarray
    space: KernelSpaceSpec
    matrix: np.ndarray

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_psd(self, rel: float = 1e-10) -> bool:
        trace = float(np.trace(self.matrix).real)
        return self.min_eigenvalue() >= -rel * trace


def gram(points, space: KernelSpaceSpec) -> GramMatrix:
    """Gram matrix ``[k(x_i, x_j)]`` of pairwise distinct ball points."""
    X = as_point_set(points, space.d)
    dup = find_duplicate(X)
    if dup is not None:
        raise DuplicatePoints(*dup)
    K = kernel_matrix(X, X, space.t)
    # mirror the upper triangle so the result is exactly Hermitian
    upper = np.triu(K, 1)
    K = upper + upper.conj().T + np.diag(K.diagonal().real)
    return GramMatrix(X, space, K)


# --- weight sequences -------------------------------------------------------


def _family_values(kind: str, param: float, horizon: int) -> np.ndarray:
    n = np.arange(horizon + 1, dtype=float)
    if kind == "constant":
        return np.full(horizon + 1, float(param))
    if kind == "power":
        return (n + 1.0) ** param
    if kind == "binomial":
        # 1 / C(n + t - 1, n), with C built as a running product
        ratios = (n[1:] + param - 1.0) / n[1:]
        coeff = np.concatenate([[1.0], np.cumprod(ratios)])
        return 1.0 / coeff
    raise ContractError(f"unknown weight family {kind!r}")


# leading-order behaviour w_n ~ C * (n + 1)^p, used to certify equivalence
def _family_asymptotics(kind: str, param: float) -> tuple[float, float]:
    if kind == "constant":
        return float(param), 0.0
    if kind == "power":
        return 1.0, float(param)
    if kind == "binomial":
        return math.exp(float(gammaln(param))), 1.0 - float(param)
    raise ContractError(f"unknown weight family {kind!r}")


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Positive weights ``w_0 .. w_N``.

    ``family`` is one of ``"constant"``, ``"power"``, ``"binomial"`` or
    ``None`` for a custom array; ``param`` is the family parameter.
    """

    values: np.ndarray
    family: Optional[str] = None
    param: Optional[float] = None
    _asym: Optional[tuple] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ContractError("a weight sequence needs at least w_0 and w_1")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            bad = int(np.flatnonzero(~(np.isfinite(v) & (v > 0.0)))[0])
            raise DomainError(f"weight w_{bad} = {v[bad]!r} is not positive")
        object.__setattr__(self, "values", v)
        if self.family is not None:
            expected = _family_values(self.family, self.param, v.size - 1)
            if not np.allclose(v, expected, rtol=1e-12, atol=0.0):
                raise ContractError(f"values disagree with the {self.family} closed form")
            object.__setattr__(self, "_asym", _family_asymptotics(self.family, self.param))

    @property
    def horizon(self) -> int:
        return self.values.size - 1

    @property
    def asymptotics(self) -> Optional[tuple]:
        """``(C, p)`` with ``w_n ~ C (n+1)^p`` for tagged families, else None."""
        return self._asym

    @property
    def tag(self) -> str:
        if self.family is None:
            return "custom"
        return f"{self.family}({self.param:g})"

    @classmethod
    def constant(cls, c: float = 1.0, horizon: int = DEFAULT_HORIZON) -> "WeightSequence":
        if not c > 0:
            raise DomainError(f"constant weight must be positive, got {c!r}")
        return cls(_family_values("constant", c, horizon), "constant", float(c))

    @classmethod
    def power(cls, s: float, horizon: int = DEFAULT_HORIZON) -> "WeightSequence":
        """``w_n = (n + 1)^s``."""
        return cls(_family_values("power", s, horizon), "power", float(s))

    @classmethod
    def binomial(cls, t: float, horizon: int = DEFAULT_HORIZON) -> "WeightSequence":
        """``w_n = 1 / C(n + t - 1, n)``: the weights of H_1^t."""
        if not t > 0:
            raise DomainError(f"binomial parameter must be positive, got {t!r}")
        return cls(_family_values("binomial", t, horizon), "binomial", float(t))

    @classmethod
    def custom(cls, values) -> "WeightSequence":
        return cls(np.asarray(values, dtype=float))

    def truncate(self, horizon: int) -> "WeightSequence":
        if horizon >= self.horizon:
            return self
        return WeightSequence(self.values[: horizon + 1], self.family, self.param)


@dataclass(frozen=True)
class RadiusVerdict:
    passed: bool
    horizon_limited: bool
    index: Optional[int] = None
    value: Optional[float] = None

    def __bool__(self):
        return self.passed


def root_test_profile(w: WeightSequence) -> np.ndarray:
    """``w_n^(-1/n)`` for ``n = 1 .. N`` (index 0 of the result is n = 1)."""
    n = np.arange(1, w.horizon + 1, dtype=float)
    return np.exp(-np.log(w.values[1:]) / n)


def radius_guard(w: WeightSequence, slack: float = 0.1) -> RadiusVerdict:
    """Check that ``sum (conj(x) z)^n / w_n`` converges on the whole disk.

    Tagged families are exact: every constant, power and binomial sequence
    has ``w_n^(1/n) -> 1``.  For a custom array only a finite proxy is
    available, ``w_n^(-1/n) <= 1 + slack`` on the upper half of the horizon.
    """
    if w.family is not None:
        return RadiusVerdict(True, False)
    prof = root_test_profile(w)
    start = max(1, w.horizon // 2)
    for n in range(start, w.horizon + 1):
        if prof[n - 1] > 1.0 + slack:
            return RadiusVerdict(False, True, n, float(prof[n - 1]))
    return RadiusVerdict(True, True)


@dataclass(frozen=True)
class WeightedKernelValue:
    value: complex
    tail_bound: float
    truncation_dominated: bool


def weighted_kernel_eval(x, z, w: WeightSequence, tol: TolerancePolicy = DEFAULT_TOL) -> WeightedKernelValue:
    """Truncated ``sum_{n<=N} (conj(x) z)^n / w_n`` with an error bound.

    The bound adds a geometric tail, using ``max w_n^(-1/n)`` over the upper
    half of the horizon as the growth rate beyond ``N``, to the standard
    ``gamma_N`` bound for recursive floating-point summation.
    """
    x = _disk_point(x)
    z = _disk_point(z)
    guard = radius_guard(w)
    if not guard:
        raise NotAFunctionSpace(guard.index, guard.value)
    u = x.conjugate() * z
    N = w.horizon
    powers = np.cumprod(np.concatenate([[1.0 + 0j], np.full(N, u)]))
    terms = powers / w.values
    value = complex(np.sum(terms))

    rate = float(np.max(root_test_profile(w)[max(1, N // 2) - 1:])) * abs(u)
    if rate >= 1.0:
        tail = math.inf
    elif u == 0:
        tail = 0.0
    else:
        tail = math.exp((N + 1) * math.log(rate)) / (1.0 - rate)
    eps = np.finfo(float).eps
    # n-fold products plus recursive summation: at most 2(N + 2) roundings per term
    gamma = 2 * (N + 2) * eps / (1.0 - 2 * (N + 2) * eps)
    rounding = gamma * float(np.sum(np.abs(terms)))
    bound = tail + rounding
    return WeightedKernelValue(value, bound, not tail < tol.tol_eq)
