"""Randomised invariant suites behind ``ballkernel selftest``.

Each suite draws ``cases`` instances from the shared generator and returns
the worst residual it saw; a suite passes when that stays under its
threshold.  With ``cases = 0`` every suite passes vacuously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classification as cl
from . import geometry as geo
from . import hardy
from . import kernels as ker
from . import linalg as la


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


def _power_multiplicative(rng, cases):
    worst = 0.0
    for _ in range(cases):
        z, w = rng.random(2) + 0.05 + 1j * (rng.random(2) - 0.5)
        if (z * w).real <= 0:
            continue
        t = 5 * rng.random()
        lhs = la.principal_power(z, t) * la.principal_power(w, t)
        rhs = la.principal_power(z * w, t)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


def _rank_one(rng, cases):
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 7))
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        M = np.outer(f, f.conj())
        g = la.rank1_factor(M)
        worst = max(worst, la.rank1_residual(M, g) / np.max(np.abs(M)))
    return worst


def _unitary_extension(rng, cases):
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        k = int(rng.integers(1, d + 2))
        S = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
        V = la.random_unitary(d, rng)
        U = la.unitary_extension(S, S @ V.T)
        worst = max(worst, la.unitary_defect(U), float(np.max(np.abs(S @ U.T - S @ V.T))))
    return worst


def _rudin_identity(rng, cases):
    """Identity (c) in inner-product form and in kernel form at non-integer t."""
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        phi = geo.random_automorphism(rng, d)
        x, y = geo.random_ball_points(rng, 2, d)
        worst = max(worst, geo.rudin_identity_residual(phi, x, y))
        a = phi.base
        t = 0.25 + 3 * rng.random()
        X = np.vstack([x, y])
        f = math.sqrt(1 - np.vdot(a, a).real) / (1 - X @ a.conj())
        ft = ker.principal_power(f, t)
        PX = phi.apply_many(X)
        lhs = ker.kernel_matrix(PX, PX, t)[0, 1] * ft[0] * np.conj(ft[1])
        rhs = ker.kernel_matrix(X, X, t)[0, 1]
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


def _involution(rng, cases):
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        a = geo.random_ball_points(rng, 1, d)[0]
        X = geo.random_ball_points(rng, 4, d)
        phi = geo.involution_at(a)
        worst = max(worst, float(np.max(np.abs(phi.apply_many(phi.apply_many(X)) - X))))
        worst = max(worst, float(np.linalg.norm(phi(a))))
    return worst


def _schwarz_pick(rng, cases):
    worst = 0.0
    for _ in range(cases):
        b = complex(*(0.9 * (rng.random(2) - 0.5)))
        phi = geo.DiskAutomorphism(2 * math.pi * rng.random(), b)
        x, y = np.sqrt(0.9 * rng.random(2)) * np.exp(2j * math.pi * rng.random(2))
        before = geo.pseudo_hyperbolic(x, y)
        worst = max(worst, abs(geo.pseudo_hyperbolic(phi(x), phi(y)) - before))
        # z -> z^2/2 is a holomorphic self-map and may only contract
        worst = max(worst, geo.pseudo_hyperbolic(x * x / 2, y * y / 2) - before)
    return worst


def _gram_psd(rng, cases):
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        t = 3 * rng.random() + 0.1
        G = ker.gram(geo.random_ball_points(rng, int(rng.integers(1, 7)), d), ker.KernelSpaceSpec(d, t))
        trace = float(np.trace(G.matrix).real)
        worst = max(worst, -G.min_eigenvalue() / trace)
    return worst


def _congruent_isometric(rng, cases):
    """Congruent sets give isometric subspaces and the witness is recovered."""
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        t = float(rng.choice([0.5, 1.0, 2.0]))
        A = geo.random_ball_points(rng, int(rng.integers(2, 6)), d, 0.8)
        phi = geo.random_automorphism(rng, d, 0.8)
        B = phi.apply_many(A)
        wit = cl.isometry_test(cl.PointMap(A, B), ker.KernelSpaceSpec(d, t))
        verdict = cl.congruence_test(A, B, assignment=range(len(A)))
        if not (wit and verdict):
            return math.inf
        worst = max(worst, wit.residual, verdict.max_error)
    return worst


def _counterexamples(rng, cases):
    worst = 0.0
    for _ in range(cases):
        t = 2.0 + 6 * rng.random() + 1e-3
        d = int(rng.integers(1, 4))
        ce = cl.counterexample_construct(t, d)
        wit = cl.isometry_test(ce.map, ker.KernelSpaceSpec(d, t))
        if not wit or cl.congruence_test(ce.A, ce.B, assignment=ce.map.assignment):
            return math.inf
        worst = max(worst, wit.residual)
    return worst


def _hardy_symmetry(rng, cases):
    worst = 0.0
    for _ in range(cases):
        N = 64
        w = ker.WeightSequence.custom(np.exp(rng.standard_normal(N + 1) * 0.3))
        u = ker.WeightSequence.custom(np.exp(rng.standard_normal(N + 1) * 0.3))
        fwd = hardy.hardy_equivalence(w, u)
        back = hardy.hardy_equivalence(u, w)
        if fwd.kind != back.kind:
            return math.inf
        if fwd.kind == "equivalent":
            worst = max(worst, abs(fwd.epsilon * back.M - 1), abs(fwd.M * back.epsilon - 1))
    return worst


SUITES = [
    ("principal_power_multiplicative", _power_multiplicative, 1e-12),
    ("rank_one_reconstruction", _rank_one, 1e-12),
    ("unitary_extension", _unitary_extension, 1e-10),
    ("rudin_identity", _rudin_identity, 1e-10),
    ("involution", _involution, 1e-10),
    ("schwarz_pick", _schwarz_pick, 1e-12),
    ("gram_psd", _gram_psd, 1e-10),
    ("congruent_implies_isometric", _congruent_isometric, 1e-8),
    ("counterexamples", _counterexamples, 1e-10),
    ("hardy_symmetry", _hardy_symmetry, 1e-12),
]


def run_selftest(seed: int = 0, cases: int = 50) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    return [SuiteResult(name, cases, float(fn(rng, cases)), thr) for name, fn, thr in SUITES]
