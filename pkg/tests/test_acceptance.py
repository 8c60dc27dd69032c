"""Acceptance criteria, one test per criterion.

Each test carries a ``criterion`` label; the conftest hook prints a
PASS/FAIL line for every label in the terminal summary.  All comparisons
are exact.
"""
from __future__ import annotations

import itertools

from qkzlab import qkz
from qkzlab.exactalg import ZERO, var
from qkzlab.extract import schur_sum_residual
from qkzlab.linkpat import (
    LinkPattern,
    basis_coefficient,
    catalan_sequences,
    enumerate_link_patterns,
    sequences_An,
)
from qkzlab.tsscpp import (
    WeightSpec,
    asm_count,
    asm_refined,
    enumerate_asm,
    gen_poly,
    nprime_specialized,
    refined_asm_polynomial,
)

import test_exactalg
import test_extract
import test_linkpat

q, qi, tau, t = qkz.q, qkz.qi, var("tau"), var("t")
t0, t1, t2 = var("t0"), var("t1"), var("t2")
A = {0: 1, 1: 1, 2: 2, 3: 7, 4: 42, 5: 429, 6: 7436}
METHODS = ("direct", "lgv", "extract")


def criterion(label):
    def mark(fn):
        fn.criterion = label
        return fn
    return mark


@criterion("criterion 01: N(6|tau) by three methods, agreement for n <= 6")
def test_criterion_01_three_methods():
    for m in METHODS:
        assert gen_poly(3, WeightSpec.uniform(3, tau=tau), m) == 1 + 3 * tau + 2 * tau ** 2 + tau ** 3
    for n in range(1, 7):
        for modified in (False, True):
            w = WeightSpec.symbolic(n, modified) if n <= 4 else WeightSpec.uniform(n, tau=tau, t=t, modified=modified)
            ref = gen_poly(n, w, "lgv", modified)
            assert all(gen_poly(n, w, m, modified) == ref for m in METHODS)


@criterion("criterion 02: modified generating polynomial at n = 3")
def test_criterion_02_modified_examples():
    expected = (1 + t0 * t1) * (t0 + t1) + (t0 ** 2 + t0 * t1 + t1 ** 2) * t2
    for m in METHODS:
        assert gen_poly(3, WeightSpec.symbolic(3, True), m, True) == expected
    assert nprime_specialized(3) == t + tau + 2 * t ** 2 * tau + 2 * t * tau ** 2 + tau ** 3


@criterion("criterion 03: unweighted counts equal A_n, formula equals brute force")
def test_criterion_03_asm_counts():
    ones = [1, 2, 7, 42, 429, 7436]
    for n in range(1, 7):
        for m in METHODS:
            assert gen_poly(n, WeightSpec.uniform(n, tau=1), m) == A[n]
        assert asm_count(n, "formula") == len(enumerate_asm(n)) == A[n] == ones[n - 1]


@criterion("criterion 04: restrictions of the modified polynomial, n <= 5")
def test_criterion_04_restrictions():
    for n in range(1, 6):
        p = nprime_specialized(n)
        assert p.substitute("t", 1).substitute("tau", 1) == A[n]
        assert p.substitute("t", 0).substitute("tau", 1) == A[n - 1]
        assert p.coefficient("t", n - 1).substitute("tau", 1) == A[n - 1]
        assert p.degree("t") == n - 1


@criterion("criterion 05: refined TSSCPP and refined ASM polynomials, n <= 5")
def test_criterion_05_refined():
    assert refined_asm_polynomial(3) == 2 + 3 * t + 2 * t ** 2
    for n in range(1, 6):
        expected = sum((c * t ** k for k, c in enumerate(asm_refined(n))), ZERO)
        assert nprime_specialized(n, t, 1) == expected
        assert gen_poly(n, WeightSpec.top_slice(n)) == expected
        assert qkz.sum_rules(n).refined.substitute("tau", 1) == expected


@criterion("criterion 06: homogeneous sequence components, sums equal A_n")
def test_criterion_06_homogeneous():
    values = [qkz.psi_seq_homogeneous(a) for a in ((1, 3, 5), (1, 3, 4), (1, 2, 5), (1, 2, 4))]
    assert values == [tau ** 3 + tau, tau ** 2 + 1, tau ** 2, 2 * tau]
    assert sum(values, ZERO) == tau ** 3 + 2 * tau ** 2 + 3 * tau + 1
    for n in range(1, 7):
        total = sum((qkz.psi_seq_homogeneous(a) for a in sequences_An(n)), ZERO)
        assert total == qkz.solve_components(n).total()
        assert total.substitute("tau", 1) == A[n]


@criterion("criterion 07: partial-sum identity, symbolic n <= 3, homogeneous n <= 5")
def test_criterion_07_partial_sums():
    for n in range(1, 4):
        for a in sequences_An(n):
            assert qkz.partial_sum_residual(a, "symbolic") == 0
    for n in range(1, 6):
        for a in sequences_An(n):
            assert qkz.partial_sum_residual(a, "homogeneous") == 0


@criterion("criterion 08: symbolic suite for n <= 3")
def test_criterion_08_symbolic_suite():
    for n in range(1, 4):
        N = 2 * n
        names = qkz.z_names(N)
        vec = qkz.solve_components(n, "symbolic")
        seqs = list(itertools.combinations_with_replacement(range(1, N), n))
        polys = [qkz.psi_seq_symbolic(a, n) for a in seqs] + list(vec.entries.values())
        for p in polys:
            assert not p or p.is_homogeneous(names, n * (n - 1))
            for triple in itertools.combinations(range(1, N + 1), 3):
                assert qkz.wheel_residual(p, n, triple) == 0
        for i in range(1, N):
            assert all(qkz.recurrence_residual(a, i) == 0 for a in seqs)
            assert all(qkz.pattern_recurrence_residual(p, i) == 0 for p in enumerate_link_patterns(n))
        assert all(r == 0 for _, r in qkz.qkz_residual_records(n))
        C = (q - qi) ** (n * (n - 1))
        pats = enumerate_link_patterns(n)
        for p in pats:
            for r in pats:
                expected = C * qkz.tau_to_q(tau) ** qkz.evaluation_exponent(p) if p == r else ZERO
                assert qkz.evaluate_at_pattern(vec[r], p) == expected
            for a in catalan_sequences(n):
                value = qkz.evaluate_at_pattern(qkz.psi_seq_symbolic(a, n), p)
                assert value == qkz.expected_evaluation(p) * qkz.tau_to_q(basis_coefficient(a, p))


@criterion("criterion 09: refined sum at n = 3 and the refined conjecture, n <= 4")
def test_criterion_09_refined_sum():
    assert qkz.sum_rules(3).refined == tau ** 3 + 2 * t * tau ** 2 + 2 * t ** 2 * tau + tau + t
    for n in range(1, 5):
        assert qkz.conjecture_residual(n) == 0


@criterion("criterion 10: identity suite")
def test_criterion_10_identities():
    for n in range(1, 6):
        assert qkz.identity_damnint_residual(n) == 0
    for n in range(1, 5):
        lhs = qkz.integident_lhs(n)
        assert lhs - qkz.integident_rhs(n) == 0
        assert qkz.x_dependent_part(lhs) == 0
        assert qkz.identity_integident_residual(n) == 0
    for n in range(1, 4):
        for parity in ("all", "even"):
            assert schur_sum_residual(n, 8, parity) == 0


@criterion("criterion 11: spin suite")
def test_criterion_11_spin():
    for n in range(1, 5):
        for a in itertools.combinations(range(1, 2 * n + 1), n):
            assert qkz.spin_component(a, n) == qkz.spin_component(a, n, route="integral")
            for p in enumerate_link_patterns(n):
                w = qkz.spin_pattern_weight(a, p)
                assert w == sum((c for _, c in qkz.spin_expansion_terms(a, p)), ZERO)
        largest = qkz.spin_component(tuple(range(1, 2 * n, 2)), n)
        assert largest == qkz.sum_rules(n).refined.substitute("t", -qi)
    weights = [qkz.spin_pattern_weight(a, LinkPattern.parse("(1,2)")) for a in ((1,), (2,))]
    assert weights == [1, -qi]
    assert qkz.spin_pattern_weight((1, 4), LinkPattern.parse("(1,4)(2,3)")) == 0
    cases = [c for _, c in qkz.spin_expansion_terms((2, 3), LinkPattern.parse("(1,4)(2,3)"))]
    assert sorted(map(str, cases)) == sorted(map(str, [1, -1 - q ** -2, 0 * q, q ** -2]))
    assert sum(cases, ZERO) == 0


@criterion("criterion 12: property suites")
def test_criterion_12_properties():
    test_exactalg.test_ring_axioms()
    test_exactalg.test_canonical_idempotence()
    test_extract.test_extraction_order_independence()
    test_extract.test_extraction_matches_full_expansion()
    for n in range(1, 7):
        test_linkpat.test_tl_relations(n)
        test_linkpat.test_basis_coefficient_indicator_on_An(n)
