"""Command line interface and verification reports.

Subcommands::

    qkzlab tsscpp     --n N [--modified] [--tau [VAL]] [--t [VAL]] [--method M]
    qkzlab components --n N [--basis B] [--symbolic | --homogeneous]
    qkzlab sum-rules  --n N
    qkzlab verify     --suite S --max-n K

Polynomials go to standard output in canonical text (or JSON with
``--json``); ``verify`` writes the JSON report to standard output and a
short summary to standard error.

Exit codes: 0 success, 1 a verification check failed, 2 invalid flags,
3 a size exceeded a resource bound.  ``QKZLAB_THREADS`` caps the number of
worker processes used by ``verify`` (default 1).
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import qkz, tsscpp
from .exactalg import ZERO, ExactPoly, parse_poly, var
from .extract import schur_sum_residual
from .linkpat import (
    basis_coefficient,
    catalan_sequences,
    enumerate_link_patterns,
    sequences_An,
)

SCHEMA = "qkzlab-report/1"
SUITES = ("tsscpp", "qkz", "identities", "conjectures")

# resource bounds: key -> (flag, default)
BOUND_FLAGS = {
    "tsscpp": ("--max-tsscpp", 8),
    "direct": ("--max-direct", 6),
    "asm": ("--max-asm", 6),
    "symbolic": ("--max-symbolic", qkz.BOUNDS["symbolic"]),
    "homogeneous": ("--max-homogeneous", qkz.BOUNDS["homogeneous"]),
    "damnint": ("--max-damnint", qkz.BOUNDS["damnint"]),
    "integident": ("--max-integident", qkz.BOUNDS["integident"]),
    "schur": ("--max-schur", 3),
    "spin": ("--max-spin", 4),
}


class BoundViolation(Exception):
    def __init__(self, key: str, n: int, bound: int):
        flag = BOUND_FLAGS[key][0]
        super().__init__(f"n={n} exceeds the resource bound {flag}={bound}; raise {flag} to allow it")


def _bound(args, key: str) -> int:
    return getattr(args, BOUND_FLAGS[key][0][2:].replace("-", "_"))


def _require(args, key: str, n: int) -> None:
    b = _bound(args, key)
    if n > b:
        raise BoundViolation(key, n, b)


# -- checks ---------------------------------------------------------------------
#
# A check maps n to a list of (label, residual); it passes iff every
# residual is zero.  Booleans are turned into residuals 0 / 1.

Residuals = list[tuple[str, ExactPoly]]


def _flag(label: str, ok: bool) -> tuple[str, ExactPoly]:
    return label, ZERO if ok else ExactPoly.from_terms([({}, 1)])


def _diff(label: str, a, b) -> tuple[str, ExactPoly]:
    return label, ExactPoly._coerce(a) - ExactPoly._coerce(b)


def _asm(n: int) -> int:
    return tsscpp.asm_count(n, "formula") if n >= 1 else 1


def chk_tsscpp_methods(n: int) -> Residuals:
    w = tsscpp.WeightSpec.symbolic(n)
    ref = tsscpp.gen_poly(n, w, "lgv")
    out = [_diff("extract-lgv", tsscpp.gen_poly(n, w, "extract"), ref)]
    if n <= 6:
        out.append(_diff("direct-lgv", tsscpp.gen_poly(n, w, "direct"), ref))
    wm = tsscpp.WeightSpec.symbolic(n, modified=True)
    refm = tsscpp.gen_poly(n, wm, "lgv", modified=True)
    out.append(_diff("modified extract-lgv", tsscpp.gen_poly(n, wm, "extract", modified=True), refm))
    if n <= 6:
        out.append(_diff("modified direct-lgv", tsscpp.gen_poly(n, wm, "direct", modified=True), refm))
    return out


def chk_tsscpp_asm(n: int) -> Residuals:
    ones = tsscpp.gen_poly(n, tsscpp.WeightSpec.uniform(n, tau=1))
    return [
        _diff("gen_poly(1,..,1) - A_n", ones, _asm(n)),
        _diff("formula - enumeration", tsscpp.asm_count(n, "formula"), tsscpp.asm_count(n, "brute")),
    ]


def chk_tsscpp_modified(n: int) -> Residuals:
    p = tsscpp.nprime_specialized(n)
    at11 = p.substitute("t", 1).substitute("tau", 1)
    at01 = p.substitute("t", 0).substitute("tau", 1)
    lead_t = p.substitute("tau", 1)
    d = lead_t.degree("t")
    lead = lead_t.coefficient("t", d) if d is not None else ZERO
    return [
        _diff("N'(1,1) - A_n", at11, _asm(n)),
        _diff("N'(0,1) - A_{n-1}", at01, _asm(n - 1)),
        _diff("leading t coefficient - A_{n-1}", lead, _asm(n - 1)),
    ]


def chk_refined_asm(n: int) -> Residuals:
    target = tsscpp.refined_asm_polynomial(n)
    return [
        _diff("N'(t,1) - refined ASM", tsscpp.nprime_specialized(n, tau=1), target),
        _diff("top slice (t,1,..,1) - refined ASM", tsscpp.gen_poly(n, tsscpp.WeightSpec.top_slice(n)), target),
        _diff("hat N'(t,1) - refined ASM", qkz.sum_rules(n).refined.substitute("tau", 1), target),
    ]


def chk_conjecture(n: int) -> Residuals:
    return [("N' - hat N'", qkz.conjecture_residual(n))]


def chk_sum_rules(n: int) -> Residuals:
    sr = qkz.sum_rules(n)
    out = [(f"consistency {k}", v) for k, v in sr.consistency(n).items()]
    out.append(_diff("sum(tau=1) - A_n", sr.sum.substitute("tau", 1), _asm(n)))
    out.append(_diff("refined(t=0,tau=1) - A_{n-1}", sr.refined.substitute("t", 0).substitute("tau", 1), _asm(n - 1)))
    return out


def chk_homogeneous(n: int) -> Residuals:
    vec = qkz.solve_components(n, "homogeneous", bound=n)
    out = [_diff("sum of components - extraction", vec.total(), qkz.sum_rules(n).sum)]
    out.append(_diff("sum at tau=1 - A_n", vec.total().substitute("tau", 1), _asm(n)))
    for a in sequences_An(n):
        out.append((f"partial sum {a}", qkz.partial_sum_residual(a, "homogeneous", vector=vec)))
    return out


def _symbolic_vector(n: int) -> qkz.QkzVector:
    return qkz.solve_components(n, "symbolic", bound=n)


def _all_sequences(n: int):
    return list(itertools.combinations_with_replacement(range(1, 2 * n), n))


def chk_degree(n: int) -> Residuals:
    names = qkz.z_names(2 * n)
    vec = _symbolic_vector(n)
    out = []
    for a in _all_sequences(n):
        p = qkz.psi_seq_symbolic(a, n)
        out.append(_flag(f"degree Psi{a}", (not p) or p.is_homogeneous(names, n * (n - 1))))
    for k, p in vec.entries.items():
        out.append(_flag(f"degree Psi_{k}", p.is_homogeneous(names, n * (n - 1))))
    return out


def chk_wheel(n: int) -> Residuals:
    out = []
    vec = _symbolic_vector(n)
    polys = [(str(a), qkz.psi_seq_symbolic(a, n)) for a in _all_sequences(n)] + list(vec.entries.items())
    for label, p in polys:
        for t in itertools.combinations(range(1, 2 * n + 1), 3):
            out.append((f"{label} {t}", qkz.wheel_residual(p, n, t)))
    return out


def chk_recurrence(n: int) -> Residuals:
    out = []
    for a in _all_sequences(n):
        for i in range(1, 2 * n):
            out.append((f"Psi{a} i={i}", qkz.recurrence_residual(a, i)))
    for p in enumerate_link_patterns(n):
        for i in range(1, 2 * n):
            out.append((f"Psi_{p} i={i}", qkz.pattern_recurrence_residual(p, i)))
    return out


def chk_exchange_cyclic(n: int) -> Residuals:
    return qkz.qkz_residual_records(n, bound=n)


def chk_evaluation(n: int) -> Residuals:
    vec = _symbolic_vector(n)
    pats = enumerate_link_patterns(n)
    out = []
    for p in pats:
        for r in pats:
            expected = qkz.expected_evaluation(p) if p == r else ZERO
            out.append(_diff(f"Psi_{r} at {p}", qkz.evaluate_at_pattern(vec[r], p), expected))
        for a in sorted(set(catalan_sequences(n)) | set(sequences_An(n))):
            value = qkz.evaluate_at_pattern(qkz.psi_seq_symbolic(a, n), p)
            out.append(_diff(f"Psi{a} at {p}", value, qkz.expected_evaluation(p) * qkz.tau_to_q(basis_coefficient(a, p))))
    return out


def chk_partial_symbolic(n: int) -> Residuals:
    vec = _symbolic_vector(n)
    return [(f"partial sum {a}", qkz.partial_sum_residual(a, "symbolic", vector=vec)) for a in sequences_An(n)]


def chk_cross_method(n: int) -> Residuals:
    C = (qkz.q - qkz.qi) ** (n * (n - 1))
    ones = {f"z{i}": 1 for i in range(1, 2 * n + 1)}
    out = []
    for a in _all_sequences(n):
        sym = qkz.psi_seq_symbolic(a, n).substitute_many(ones)
        out.append(_diff(f"Psi{a}", sym, C * qkz.tau_to_q(qkz.psi_seq_homogeneous(a, n))))
    return out


def chk_damnint(n: int) -> Residuals:
    out = [("fast", qkz.identity_damnint_residual(n, bound=n)), ("middle", qkz.damnint_middle_residual(n))]
    if n <= 3:
        out.append(("literal", qkz.identity_damnint_residual(n, bound=n, literal=True)))
    return out


def chk_integident(n: int) -> Residuals:
    lhs = qkz.integident_lhs(n)
    out = [_diff("lhs - rhs", lhs, qkz.integident_rhs(n)), ("x-dependence", qkz.x_dependent_part(lhs))]
    if n <= 3:
        out.append(_diff("per-permutation", qkz.integident_lhs(n, per_permutation=True), lhs))
    return out


def chk_schur(n: int) -> Residuals:
    return [(p, schur_sum_residual(n, 8, p)) for p in ("all", "even")]


def chk_spin(n: int) -> Residuals:
    out = []
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        out.append(_diff(f"routes {a}", qkz.spin_component(a, n), qkz.spin_component(a, n, route="integral")))
    largest = qkz.spin_component(tuple(range(1, 2 * n, 2)), n)
    out.append(_diff("largest = hat N'(-1/q, tau)", largest, qkz.sum_rules(n).refined.substitute("t", -qkz.qi)))
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        for p in enumerate_link_patterns(n):
            total = sum((c for _, c in qkz.spin_expansion_terms(a, p)), ZERO)
            out.append(_diff(f"local rule {a} {p}", qkz.spin_pattern_weight(a, p), total))
    if n <= 2:
        for a in itertools.combinations(range(1, 2 * n + 1), n):
            out.append(_diff(f"symbolic routes {a}", qkz.spin_component(a, n, "symbolic"),
                             qkz.spin_component(a, n, "symbolic", route="integral")))
    return out


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    bound: str
    fn: Callable[[int], Residuals]


CHECKS = [
    Check("tsscpp.methods", "tsscpp", "tsscpp", chk_tsscpp_methods),
    Check("tsscpp.asm", "tsscpp", "asm", chk_tsscpp_asm),
    Check("tsscpp.modified", "tsscpp", "tsscpp", chk_tsscpp_modified),
    Check("qkz.degree", "qkz", "symbolic", chk_degree),
    Check("qkz.wheel", "qkz", "symbolic", chk_wheel),
    Check("qkz.recurrence", "qkz", "symbolic", chk_recurrence),
    Check("qkz.exchange-cyclic", "qkz", "symbolic", chk_exchange_cyclic),
    Check("qkz.evaluation", "qkz", "symbolic", chk_evaluation),
    Check("qkz.partial-sum-symbolic", "qkz", "symbolic", chk_partial_symbolic),
    Check("qkz.cross-method", "qkz", "symbolic", chk_cross_method),
    Check("qkz.homogeneous", "qkz", "homogeneous", chk_homogeneous),
    Check("qkz.sum-rules", "qkz", "homogeneous", chk_sum_rules),
    Check("identities.damnint", "identities", "damnint", chk_damnint),
    Check("identities.integident", "identities", "integident", chk_integident),
    Check("identities.schur", "identities", "schur", chk_schur),
    Check("conjectures.refined-tsscpp", "conjectures", "homogeneous", chk_conjecture),
    Check("conjectures.refined-asm", "conjectures", "asm", chk_refined_asm),
    Check("conjectures.spin", "conjectures", "spin", chk_spin),
]
_BY_ID = {c.id: c for c in CHECKS}


def run_check(check_id: str, n: int) -> dict:
    """Run one check at size ``n`` and return its report record."""
    check = _BY_ID[check_id]
    start = time.perf_counter()
    results = check.fn(n)
    failures = [f"{label}: {res}" for label, res in results if res]
    return {
        "id": check_id,
        "params": {"n": n},
        "status": "fail" if failures else "pass",
        "residual": "; ".join(failures) if failures else None,
        "wall_time": round(time.perf_counter() - start, 6),
    }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QKZLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class VerificationReport:
    suite: str
    bounds: dict[str, int]
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["status"] != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "bounds": dict(sorted(self.bounds.items())),
            "passed": self.passed,
            "checks": self.checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def summary(self) -> str:
        counts = {s: sum(1 for c in self.checks if c["status"] == s) for s in ("pass", "fail", "skipped-bound")}
        lines = [f"suite {self.suite}: {counts['pass']} pass, {counts['fail']} fail, {counts['skipped-bound']} skipped-bound"]
        for c in self.checks:
            if c["status"] == "fail":
                lines.append(f"  FAIL {c['id']} n={c['params']['n']}: {c['residual'][:300]}")
        return "\n".join(lines)


def verify(suite: str, max_n: int, bounds: dict[str, int], threads: int = 1) -> VerificationReport:
    suites = SUITES if suite == "all" else (suite,)
    report = VerificationReport(suite, {"max-n": max_n, **bounds})
    jobs, order = [], []
    for check in CHECKS:
        if check.suite not in suites:
            continue
        for n in range(1, max_n + 1):
            key = (check.id, n)
            order.append(key)
            if n > bounds[check.bound]:
                continue
            jobs.append(key)
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            done = dict(zip(jobs, pool.map(run_check, *zip(*jobs))))
    else:
        done = {key: run_check(*key) for key in jobs}
    for check_id, n in order:
        if (check_id, n) in done:
            report.checks.append(done[(check_id, n)])
        else:
            flag, _ = BOUND_FLAGS[_BY_ID[check_id].bound]
            report.checks.append({
                "id": check_id,
                "params": {"n": n},
                "status": "skipped-bound",
                "residual": None,
                "wall_time": 0.0,
                "bound": f"{flag}={bounds[_BY_ID[check_id].bound]}",
            })
    return report


# -- argument parsing -------------------------------------------------------------


def _value(text: str) -> ExactPoly:
    try:
        return ExactPoly._coerce(int(text))
    except ValueError:
        pass
    try:
        return parse_poly(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse weight {text!r}: {exc}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_bounds(p: argparse.ArgumentParser, keys) -> None:
    for key in keys:
        flag, default = BOUND_FLAGS[key]
        p.add_argument(flag, type=_positive, default=default, help=f"resource bound (default {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkzlab", description="Exact TSSCPP and qKZ computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tsscpp", help="weighted TSSCPP generating polynomial")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--modified", action="store_true")
    p.add_argument("--tau", nargs="?", const="tau", default=None, type=str,
                   help="common weight t_1=..=t_{n-1}; bare flag means the symbol tau")
    p.add_argument("--t", nargs="?", const="t", default=None, type=str,
                   help="weight t_0 of modified configurations; bare flag means the symbol t")
    p.add_argument("--method", choices=tsscpp.METHODS, default="lgv")
    p.add_argument("--json", action="store_true")
    _add_bounds(p, ["tsscpp", "direct"])

    p = sub.add_parser("components", help="qKZ components as JSON")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--basis", choices=("link_pattern", "sequence", "spin"), default="link_pattern")
    p.add_argument("--family", choices=("An", "catalan"), default="An",
                   help="sequence family for --basis sequence")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--mode", choices=("symbolic", "homogeneous"), dest="mode")
    mode.add_argument("--symbolic", action="store_const", const="symbolic", dest="mode")
    mode.add_argument("--homogeneous", action="store_const", const="homogeneous", dest="mode")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    _add_bounds(p, ["symbolic", "homogeneous"])

    p = sub.add_parser("sum-rules", help="sum and refined sum of homogeneous components")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--tau", nargs="?", const="tau", default=None, type=str)
    p.add_argument("--t", nargs="?", const="t", default=None, type=str)
    p.add_argument("--json", action="store_true")
    _add_bounds(p, ["homogeneous"])

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--max-n", type=_positive, default=3)
    p.add_argument("--json", action="store_true", help="accepted for symmetry; the report is always JSON")
    _add_bounds(p, list(BOUND_FLAGS))
    return parser


def _weight(text: str | None, default: ExactPoly) -> ExactPoly:
    return default if text is None else _value(text)


def cmd_tsscpp(args) -> str:
    n = args.n
    _require(args, "tsscpp", n)
    if args.method == "direct":
        _require(args, "direct", n)
    if args.t is not None and not args.modified:
        raise argparse.ArgumentTypeError("--t only applies together with --modified")
    if args.tau is None:
        w = tsscpp.WeightSpec.symbolic(n, args.modified)
        if args.modified and args.t is not None:
            w = tsscpp.WeightSpec(n, (_value(args.t),) + w.slices[1:], True)
    else:
        tau = _value(args.tau)
        t = _weight(args.t, var("t0"))
        w = tsscpp.WeightSpec.uniform(n, tau=tau, t=t, modified=args.modified)
    poly = tsscpp.gen_poly(n, w, args.method, args.modified)
    if args.json:
        return json.dumps({"n": n, "modified": args.modified, "method": args.method, "polynomial": str(poly)})
    return str(poly)


def cmd_components(args) -> str:
    mode = args.mode or "homogeneous"
    _require(args, mode, args.n)
    bound = _bound(args, mode)
    if args.basis == "link_pattern":
        vec = qkz.solve_components(args.n, mode, bound=bound)
    elif args.basis == "sequence":
        vec = qkz.sequence_components(args.n, mode, args.family, bound=bound)
    else:
        vec = qkz.spin_components(args.n, mode, bound=bound)
    return vec.to_json(indent=2)


def cmd_sum_rules(args) -> str:
    _require(args, "homogeneous", args.n)
    sr = qkz.sum_rules(args.n)
    total, refined = sr.sum, sr.refined
    if args.tau is not None:
        total = total.substitute("tau", _value(args.tau))
        refined = refined.substitute("tau", _value(args.tau))
    if args.t is not None:
        refined = refined.substitute("t", _value(args.t))
    if args.json:
        return json.dumps({"n": args.n, "sum": str(total), "refined": str(refined)})
    return f"sum: {total}\nrefined: {refined}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            bounds = {key: _bound(args, key) for key in BOUND_FLAGS}
            report = verify(args.suite, args.max_n, bounds, _threads())
            print(report.to_json())
            print(report.summary(), file=sys.stderr)
            return 0 if report.passed else 1
        handler = {"tsscpp": cmd_tsscpp, "components": cmd_components, "sum-rules": cmd_sum_rules}[args.command]
        print(handler(args))
        return 0
    except BoundViolation as exc:
        print(f"qkzlab: error: {exc}", file=sys.stderr)
        return 3
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"qkzlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
