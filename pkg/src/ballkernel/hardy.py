"""Equivalence and isomorphism of weighted Hardy spaces on the disk.

``H_w`` and ``H_u`` are isomorphic through the diagonal map
``z^n -> (w_n / u_n) z^n`` whenever the ratio ``w_n / u_n`` stays between
two positive constants, and isometrically (``alpha_n = sqrt(c)``) when the
ratio is a constant ``c``.  Finite arrays can only suggest asymptotics, so
verdicts on custom weights are marked ``horizon_limited``; closed-form
families are decided from their leading-order behaviour ``C (n+1)^p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import Refusal
from .kernels import WeightSequence
from .linalg import DEFAULT_TOL, TolerancePolicy

# a ratio whose log-log slope over the last quarter of the horizon exceeds
# this, monotonically, is treated as unbounded
TREND_SLOPE = 0.05
EXPONENT_TOL = 1e-12


@dataclass(frozen=True)
class HardyEquivalenceVerdict:
    """Outcome of comparing two weight sequences.

    ``kind`` is ``"isometric"``, ``"equivalent"`` or ``"inequivalent"``.
    ``trend`` is +1 when ``w_n / u_n`` grows without bound, -1 when it
    decays to zero and 0 otherwise.
    """

    kind: str
    horizon: int
    horizon_limited: bool
    c: Optional[float] = None
    epsilon: Optional[float] = None
    M: Optional[float] = None
    witness_index: Optional[int] = None
    trend: int = 0

    @property
    def isomorphic(self) -> bool:
        return self.kind != "inequivalent"


def _log_slope(ratio: np.ndarray) -> tuple[float, bool]:
    N = ratio.size - 1
    lo = N - N // 4
    n = np.arange(lo, N + 1)
    lr = np.log(ratio[lo:])
    if n.size < 2:
        return 0.0, False
    slope = float(np.polyfit(np.log(n + 1.0), lr, 1)[0])
    steps = np.diff(lr)
    monotone = bool(np.all(steps > 0) or np.all(steps < 0))
    return slope, monotone


def hardy_equivalence(w: WeightSequence, u: WeightSequence, tol: TolerancePolicy = DEFAULT_TOL) -> HardyEquivalenceVerdict:
    """Compare ``w`` and ``u`` over their common horizon."""
    N = min(w.horizon, u.horizon)
    w, u = w.truncate(N), u.truncate(N)
    ratio = w.values / u.values
    lo, hi = float(ratio.min()), float(ratio.max())

    if w.asymptotics is not None and u.asymptotics is not None:
        (cw, pw), (cu, pu) = w.asymptotics, u.asymptotics
        if abs(pw - pu) > EXPONENT_TOL:
            trend = 1 if pw > pu else -1
            idx = int(np.argmax(ratio) if trend > 0 else np.argmin(ratio))
            return HardyEquivalenceVerdict("inequivalent", N, False, witness_index=idx, trend=trend)
        limit = cw / cu
        if hi <= lo * (1.0 + tol.tol_eq):
            return HardyEquivalenceVerdict("isometric", N, False, c=limit, epsilon=lo, M=hi)
        return HardyEquivalenceVerdict("equivalent", N, False, epsilon=min(lo, limit), M=max(hi, limit))

    if hi <= lo * (1.0 + tol.tol_eq):
        return HardyEquivalenceVerdict("isometric", N, True, c=float(np.mean(ratio)), epsilon=lo, M=hi)
    slope, monotone = _log_slope(ratio)
    if monotone and abs(slope) > TREND_SLOPE:
        trend = 1 if slope > 0 else -1
        idx = int(np.argmax(ratio) if trend > 0 else np.argmin(ratio))
        return HardyEquivalenceVerdict("inequivalent", N, True, witness_index=idx, trend=trend)
    return HardyEquivalenceVerdict("equivalent", N, True, epsilon=lo, M=hi)


@dataclass(frozen=True, eq=False)
class HardyIsomorphism:
    """The diagonal operator ``T z^n = alpha_n z^n`` from ``H_w`` to ``H_u``."""

    alpha: np.ndarray
    w: WeightSequence
    u: WeightSequence
    isometric: bool
    verdict: HardyEquivalenceVerdict

    @property
    def horizon(self) -> int:
        return self.alpha.size - 1

    def norm_ratios(self) -> np.ndarray:
        """``||T z^n||_u / ||z^n||_w = alpha_n sqrt(u_n / w_n)``."""
        return self.alpha * np.sqrt(self.u.values / self.w.values)

    def kernel_image(self, s: complex) -> np.ndarray:
        """Taylor coefficients of ``T k_s^w``."""
        n = np.arange(self.horizon + 1)
        return np.conj(s) ** n / self.w.values * self.alpha

    def kernel_identity_residual(self, s: complex) -> float:
        """Max relative coefficient error of ``T k_s^w = k_s^u``.

        In isometric mode the image is ``k_s^u / sqrt(c)`` instead, which
        is what gets compared.
        """
        n = np.arange(self.horizon + 1)
        target = np.conj(s) ** n / self.u.values
        if self.isometric:
            target = target / math.sqrt(self.verdict.c)
        got = self.kernel_image(s)
        mask = target != 0
        return float(np.max(np.abs(got[mask] - target[mask]) / np.abs(target[mask]), initial=0.0))

    def exact_alpha(self) -> list[Fraction]:
        """``w_n / u_n`` as exact rationals of the stored binary weights."""
        return [Fraction(float(a)) / Fraction(float(b)) for a, b in zip(self.w.values, self.u.values)]


def build_hardy_isomorphism(
    w: WeightSequence, u: WeightSequence, isometric: bool = False, tol: TolerancePolicy = DEFAULT_TOL
) -> HardyIsomorphism:
    """Diagonal isomorphism ``H_w -> H_u``.

    ``alpha_n = w_n / u_n`` by default; with ``isometric=True`` and a
    constant ratio ``c``, ``alpha_n = sqrt(c)`` so every monomial keeps its norm.
    """
    verdict = hardy_equivalence(w, u, tol)
    if not verdict.isomorphic:
        raise Refusal(f"weights are inequivalent (ratio diverges near n={verdict.witness_index})")
    N = verdict.horizon
    w, u = w.truncate(N), u.truncate(N)
    if isometric:
        if verdict.kind != "isometric":
            raise Refusal("weights are not proportional; no isometric diagonal isomorphism")
        alpha = np.full(N + 1, math.sqrt(verdict.c))
    else:
        alpha = w.values / u.values
    return HardyIsomorphism(alpha, w, u, isometric, verdict)


@dataclass(frozen=True, eq=False)
class RotationComposition:
    """``C_phi`` for ``phi(z) = exp(i theta) z`` between truncated spaces."""

    theta: float
    diagonal: np.ndarray
    norm_profile: np.ndarray
    bounded: bool
    inverse_bounded: bool
    horizon_limited: bool

    @property
    def is_isomorphism(self) -> bool:
        return self.bounded and self.inverse_bounded


def rotation_composition(theta: float, w: WeightSequence, u: WeightSequence, tol: TolerancePolicy = DEFAULT_TOL) -> RotationComposition:
    """Diagonal form of composition with a rotation, ``z^n -> e^{i n theta} z^n``.

    The norm profile ``||C z^n||_u / ||z^n||_w = sqrt(u_n / w_n)`` does not
    depend on ``theta``; ``C`` is bounded with bounded inverse exactly when
    ``w`` and ``u`` are equivalent.
    """
    verdict = hardy_equivalence(w, u, tol)
    N = verdict.horizon
    n = np.arange(N + 1)
    diagonal = np.exp(1j * n * theta)
    profile = np.sqrt(u.values[: N + 1] / w.values[: N + 1])
    # ratio w/u growing means the profile decays: C bounded, inverse not
    bounded = verdict.isomorphic or verdict.trend > 0
    inverse_bounded = verdict.isomorphic or verdict.trend < 0
    return RotationComposition(theta, diagonal, profile, bounded, inverse_bounded, verdict.horizon_limited)
