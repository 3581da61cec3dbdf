"""Command-line front end.

Every subcommand writes exactly one JSON document to stdout and uses the
exit code to carry the verdict: 0 affirmative, 1 negative, 2 error or
refusal.  Complex numbers are ``[re, im]`` pairs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import classification as cl
from .errors import BallKernelError, ContractError, DomainError
from .geometry import BallAutomorphism, as_point_set
from .hardy import build_hardy_isomorphism, hardy_equivalence
from .kernels import DEFAULT_HORIZON, KernelSpaceSpec, WeightSequence, gram
from .linalg import DEFAULT_TOL, TolerancePolicy, unitary_defect
from .selftest import run_selftest

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(BallKernelError):
    pass


# --- serialisation ----------------------------------------------------------


def cpx(z) -> list:
    z = complex(z)
    # + 0.0 folds negative zeros
    return [z.real + 0.0, z.imag + 0.0]


def from_cpx(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ContractError(f"expected a [re, im] pair, got {pair!r}")
    re, im = pair
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
        raise ContractError(f"non-numeric complex entry {pair!r}")
    return complex(re, im)


def cvec(v) -> list:
    return [cpx(z) for z in np.asarray(v).ravel()]


def cmat(M) -> list:
    return [cvec(row) for row in np.asarray(M)]


def dump_point_set(X) -> dict:
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    return {"d": int(X.shape[1]), "points": [cvec(row) for row in X]}


def load_point_set(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "d" not in doc or "points" not in doc:
        raise ContractError("point set document needs 'd' and 'points'")
    d = doc["d"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ContractError(f"'d' must be a positive integer, got {d!r}")
    pts = doc["points"]
    if not isinstance(pts, list):
        raise ContractError("'points' must be a list")
    rows = []
    for k, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != d:
            raise ContractError(f"point {k} does not have {d} coordinates")
        rows.append([from_cpx(c) for c in p])
    if not rows:
        return np.zeros((0, d), dtype=complex)
    return as_point_set(rows, d)


def dump_automorphism(phi: BallAutomorphism) -> dict:
    return {"unitary": cmat(phi.unitary), "base": cvec(phi.base)}


def load_automorphism(doc) -> BallAutomorphism:
    U = np.array([[from_cpx(c) for c in row] for row in doc["unitary"]], dtype=complex)
    a = np.array([from_cpx(c) for c in doc["base"]], dtype=complex)
    return BallAutomorphism(U, a)


def _num(x):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def tolerance_doc(tol: TolerancePolicy) -> dict:
    return {"tol_rank": tol.tol_rank, "tol_eq": tol.tol_eq, "tol_herm": tol.tol_herm}


def verdict_document(command, verdict, witness=None, residuals=None, tol=DEFAULT_TOL, **extra) -> dict:
    doc = {
        "command": command,
        "verdict": verdict,
        "witness": witness,
        "residuals": {k: _num(v) for k, v in (residuals or {}).items()},
        "tolerances": tolerance_doc(tol),
    }
    doc.update(extra)
    return doc


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def emit(doc):
    sys.stdout.write(json.dumps(doc, allow_nan=False) + "\n")


def _tol(args) -> TolerancePolicy:
    return DEFAULT_TOL if args.tol is None else TolerancePolicy(tol_eq=args.tol)


# --- commands ---------------------------------------------------------------


def cmd_gram(args) -> int:
    tol = _tol(args)
    X = load_point_set(read_json(args.points))
    G = gram(X, KernelSpaceSpec(X.shape[1], args.t, tol))
    emit({
        "command": "gram",
        "d": int(X.shape[1]),
        "t": args.t,
        "matrix": cmat(G.matrix),
        "min_eigenvalue": G.min_eigenvalue() if len(X) else 0.0,
        "tolerances": tolerance_doc(tol),
    })
    return EXIT_YES


def _parse_assignment(text, n):
    if text is None:
        return None
    try:
        sigma = tuple(int(s) for s in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --assignment {text!r}") from exc
    if sorted(sigma) != list(range(n)):
        raise UsageError(f"--assignment {text!r} is not a permutation of 0..{n - 1}")
    return sigma


def _load_pair(args):
    A = load_point_set(read_json(args.A))
    B = load_point_set(read_json(args.B))
    if A.shape[1] != B.shape[1]:
        raise UsageError(f"A lives in C^{A.shape[1]} but B in C^{B.shape[1]}")
    return A, B


def cmd_isometry(args) -> int:
    tol = _tol(args)
    A, B = _load_pair(args)
    space = KernelSpaceSpec(A.shape[1], args.t, tol)
    if len(A) != len(B):
        result = cl.NotIsometric(f"no bijection between {len(A)} and {len(B)} points")
    elif args.search:
        result = cl.isometry_search(A, B, space, cap=args.cap)
    else:
        sigma = _parse_assignment(args.assignment, len(A))
        result = cl.isometry_test(cl.PointMap(A, B, sigma), space)
    if result:
        witness = {"assignment": list(result.map.assignment), "factors": cvec(result.factors)}
        emit(verdict_document("isometry", "isometric", witness, {"rank_one": result.residual}, tol, t=args.t))
        return EXIT_YES
    emit(verdict_document("isometry", "not_isometric", None, {}, tol, t=args.t, reason=result.reason))
    return EXIT_NO


def cmd_congruence(args) -> int:
    tol = _tol(args)
    A, B = _load_pair(args)
    sigma = None
    if not args.search and len(A) == len(B):
        sigma = _parse_assignment(args.assignment, len(A)) or tuple(range(len(A)))
    v = cl.congruence_test(A, B, tol, assignment=sigma, cap=args.cap)
    if v:
        witness = dump_automorphism(v.witness)
        witness["assignment"] = list(v.assignment)
        res = {"max_point_error": v.max_error, "unitary_defect": unitary_defect(v.witness.unitary)}
        emit(verdict_document("congruence", "congruent", witness, res, tol))
        return EXIT_YES
    emit(verdict_document("congruence", "not_congruent", None, {}, tol, reason=v.refusal_reason))
    return EXIT_NO


def cmd_counterexample(args) -> int:
    if not args.t > 2:
        raise UsageError(
            f"t = {args.t:g} <= 2: for such t every point map inducing an isometry of "
            "kernel subspaces extends to a ball automorphism, so no counterexample exists"
        )
    tol = _tol(args)
    ce = cl.counterexample_construct(args.t, args.d, args.r)
    Path(args.out_A).write_text(json.dumps(dump_point_set(ce.A)) + "\n")
    Path(args.out_B).write_text(json.dumps(dump_point_set(ce.B)) + "\n")

    wit = cl.isometry_test(ce.map, KernelSpaceSpec(args.d, args.t, tol))
    under_map = cl.congruence_test(ce.A, ce.B, tol, assignment=ce.map.assignment)
    any_map = cl.congruence_test(ce.A, ce.B, tol)
    ok = bool(wit) and not under_map
    doc = verdict_document(
        "counterexample",
        "non_faithful" if ok else "self_check_failed",
        {"z": cpx(ce.z), "w": cpx(ce.w), "assignment": list(ce.map.assignment)},
        {"rank_one": wit.residual if wit else math.inf},
        tol,
        t=args.t,
        d=args.d,
        isometric=bool(wit),
        congruent=bool(under_map),
        # the two triples are mirror images of an isosceles triangle, so a
        # different pairing of the same sets can still be congruent
        sets_congruent_under_other_assignment=bool(any_map),
        files={"A": str(args.out_A), "B": str(args.out_B)},
    )
    emit(doc)
    return EXIT_YES if ok else EXIT_ERROR


def parse_weight_spec(spec: str, horizon: int) -> WeightSequence:
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise UsageError(f"weight spec {spec!r} must look like kind:value")
    if kind == "file":
        doc = read_json(arg)
        values = doc.get("weights") if isinstance(doc, dict) else doc
        if not isinstance(values, list):
            raise UsageError(f"{arg}: expected a list of weights or {{'weights': [...]}}")
        return WeightSequence.custom(values)
    try:
        value = float(arg)
    except ValueError as exc:
        raise UsageError(f"bad number in weight spec {spec!r}") from exc
    makers = {"const": WeightSequence.constant, "power": WeightSequence.power, "binom": WeightSequence.binomial}
    if kind not in makers:
        raise UsageError(f"unknown weight family {kind!r} (use const, power, binom or file)")
    return makers[kind](value, horizon)


def cmd_hardy(args) -> int:
    tol = _tol(args)
    w = parse_weight_spec(args.w, args.horizon)
    u = parse_weight_spec(args.u, args.horizon)
    v = hardy_equivalence(w, u, tol)
    extra = {"w": w.tag, "u": u.tag, "horizon": v.horizon, "horizon_limited": v.horizon_limited}
    if not v.isomorphic:
        emit(verdict_document("hardy", "inequivalent", None, {}, tol, witness_index=v.witness_index, **extra))
        return EXIT_NO
    iso = build_hardy_isomorphism(w, u, isometric=v.kind == "isometric", tol=tol)
    witness = {"alpha": [float(a) for a in iso.alpha], "isometric_mode": iso.isometric}
    residuals = {
        "kernel_identity": iso.kernel_identity_residual(0.5),
        "norm_ratio_spread": float(np.ptp(iso.norm_ratios())) if iso.isometric else 0.0,
    }
    bounds = {"c": v.c} if v.kind == "isometric" else {"epsilon": v.epsilon, "M": v.M}
    emit(verdict_document("hardy", v.kind, witness, residuals, tol, **bounds, **extra))
    return EXIT_YES


def cmd_selftest(args) -> int:
    results = run_selftest(args.seed, args.cases)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max residual {r.max_residual:.3e} (threshold {r.threshold:.0e})", file=sys.stderr)
    passed = all(r.passed for r in results)
    emit({
        "command": "selftest",
        "verdict": "pass" if passed else "fail",
        "seed": args.seed,
        "cases": args.cases,
        "suites": {
            r.name: {"passed": r.passed, "max_residual": _num(r.max_residual), "threshold": r.threshold}
            for r in results
        },
    })
    return EXIT_YES if passed else EXIT_NO


# --- entry point ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ballkernel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tol_flag(sp):
        sp.add_argument("--tol", type=float, default=None, help="entrywise equality tolerance (default 1e-8)")

    g = sub.add_parser("gram", help="Gram matrix of a point set in H_d^t")
    g.add_argument("--points", required=True)
    g.add_argument("--t", type=float, required=True)
    tol_flag(g)
    g.set_defaults(func=cmd_gram)

    i = sub.add_parser("isometry", help="does a point map induce an isometry H_A -> H_B")
    i.add_argument("--A", required=True)
    i.add_argument("--B", required=True)
    i.add_argument("--t", type=float, required=True)
    i.add_argument("--assignment", help="comma-separated permutation, default identity")
    i.add_argument("--search", action="store_true", help="search over all assignments")
    i.add_argument("--cap", type=int, default=cl.SEARCH_CAP)
    tol_flag(i)
    i.set_defaults(func=cmd_isometry)

    c = sub.add_parser("congruence", help="does a ball automorphism carry A onto B")
    c.add_argument("--A", required=True)
    c.add_argument("--B", required=True)
    c.add_argument("--assignment", help="comma-separated permutation, default identity")
    c.add_argument("--search", action="store_true", help="search over all assignments")
    c.add_argument("--cap", type=int, default=cl.SEARCH_CAP)
    tol_flag(c)
    c.set_defaults(func=cmd_congruence)

    x = sub.add_parser("counterexample", help="isometric but non-congruent triples for t > 2")
    x.add_argument("--t", type=float, required=True)
    x.add_argument("--d", type=int, default=1)
    x.add_argument("--r", type=float, default=None, help="collision radius (default min(0.8, cos(pi/t)))")
    x.add_argument("--out-A", dest="out_A", required=True)
    x.add_argument("--out-B", dest="out_B", required=True)
    tol_flag(x)
    x.set_defaults(func=cmd_counterexample)

    h = sub.add_parser("hardy", help="compare two weighted Hardy spaces")
    h.add_argument("--w", required=True, help="const:c | power:s | binom:t | file:path.json")
    h.add_argument("--u", required=True)
    h.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    tol_flag(h)
    h.set_defaults(func=cmd_hardy)

    s = sub.add_parser("selftest", help="run the randomised invariant suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cases", type=int, default=50)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BallKernelError, DomainError) as exc:
        print(f"ballkernel {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
