from __future__ import annotations

import itertools

import pytest

from qkzlab import qkz
from qkzlab.exactalg import ZERO, ExactPoly, var
from qkzlab.linkpat import LinkPattern, catalan_sequences, enumerate_link_patterns, sequences_An
from qkzlab.residues import residue_sum_parts
from qkzlab.tsscpp import nprime_specialized

q, qi, tau, t = qkz.q, qkz.qi, qkz.tau, var("t")
z = qkz.z
P = LinkPattern.parse
ASM = [1, 1, 2, 7, 42, 429, 7436]  # A_0 .. A_6


def all_sequences(n):
    return itertools.combinations_with_replacement(range(1, 2 * n), n)


def test_base_component():
    assert qkz.base_component(1) == 1
    b = qkz.base_component(2)
    assert b == (q * z(1) - qi * z(2)) * (q * z(3) - qi * z(4))
    at = b.substitute_many({"z1": qi, "z2": qi, "z3": q, "z4": q})
    assert at == (q - qi) ** 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_base_sequence_is_base_component(n):
    assert qkz.psi_seq_symbolic(tuple(range(1, n + 1))) == qkz.base_component(n)


def test_symbolic_small_values():
    assert qkz.psi_seq_symbolic((1,), 1) == 1
    assert qkz.psi_seq_symbolic((0, 2), 2) == 0
    with pytest.raises(ValueError):
        qkz.psi_seq_symbolic((3, 1), 2)


def test_homogeneous_examples():
    assert qkz.psi_seq_homogeneous((1, 3, 5)) == tau ** 3 + tau
    assert qkz.psi_seq_homogeneous((1, 3, 4)) == tau ** 2 + 1
    assert qkz.psi_seq_homogeneous((1, 2, 5)) == tau ** 2
    assert qkz.psi_seq_homogeneous((1, 2, 4)) == 2 * tau
    for n in range(1, 6):
        assert qkz.psi_seq_homogeneous(tuple(range(1, n + 1))) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dense_and_sparse_engines_agree(n):
    for a in all_sequences(n):
        assert qkz.psi_seq_homogeneous(a, engine="dense") == qkz.psi_seq_homogeneous(a, engine="sparse")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_homogeneous_is_symbolic_at_one(n):
    C = (q - qi) ** (n * (n - 1))
    ones = {f"z{i}": 1 for i in range(1, 2 * n + 1)}
    for a in all_sequences(n):
        sym = qkz.psi_seq_symbolic(a, n).substitute_many(ones)
        assert sym == C * qkz.tau_to_q(qkz.psi_seq_homogeneous(a, n))


def test_tau_bridge():
    p = 3 + tau - 2 * tau ** 4
    assert qkz.q_to_tau(qkz.tau_to_q(p)) == p
    with pytest.raises(qkz.NotInTauSubring):
        qkz.q_to_tau(q)
    with pytest.raises(qkz.NotInTauSubring):
        qkz.q_to_tau(q ** 2 - q ** -1)


def test_solve_examples():
    v1 = qkz.solve_components(1)
    assert v1.entries == {"(1,2)": ExactPoly._coerce(1)}
    v2 = qkz.solve_components(2)
    assert v2[P("(1,2)(3,4)")] == tau and v2[P("(1,4)(2,3)")] == 1
    v3 = qkz.solve_components(3)
    assert len(v3.entries) == 5 and v3.total() == tau ** 3 + 2 * tau ** 2 + 3 * tau + 1
    assert qkz.solve_components(1, "symbolic").entries == {"(1,2)": ExactPoly._coerce(1)}


def test_bounds():
    with pytest.raises(qkz.ResourceBoundExceeded):
        qkz.solve_components(4, "symbolic")
    with pytest.raises(qkz.ResourceBoundExceeded):
        qkz.identity_damnint_residual(6)
    with pytest.raises(ValueError):
        qkz.solve_components(2, "numeric")


@pytest.mark.parametrize("n", range(1, 7))
def test_homogeneous_sum_is_asm(n):
    vec = qkz.solve_components(n)
    assert vec.total().substitute("tau", 1) == ASM[n]
    assert vec.total() == qkz.sum_rules(n).sum
    values = [p.substitute("tau", 1).constant_value() for p in vec.entries.values()]
    assert min(values) == 1 and max(values) == ASM[n - 1]
    assert vec[LinkPattern.from_openings(tuple(range(1, 2 * n, 2)))].substitute("tau", 1) == ASM[n - 1]


@pytest.mark.parametrize("n", range(1, 6))
def test_partial_sums_homogeneous(n):
    for a in sequences_An(n):
        assert qkz.partial_sum_residual(a, "homogeneous") == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_partial_sums_symbolic(n):
    for a in sequences_An(n):
        assert qkz.partial_sum_residual(a, "symbolic") == 0


def test_partial_sum_example():
    members = [P("(1,2)(3,6)(4,5)"), P("(1,2)(3,4)(5,6)")]
    vec = qkz.solve_components(3)
    assert qkz.psi_seq_homogeneous((1, 3, 4)) == tau ** 2 + 1
    assert qkz.psi_seq_homogeneous((1, 3, 5)) == vec[members[1]]
    from qkzlab.linkpat import partition_L, SequenceNotInFamily
    assert len(partition_L((1, 3, 4))) == 2
    with pytest.raises(SequenceNotInFamily):
        qkz.partial_sum_residual((1, 2, 3))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbolic_degree_and_wheel(n):
    names = qkz.z_names(2 * n)
    vec = qkz.solve_components(n, "symbolic")
    polys = [qkz.psi_seq_symbolic(a, n) for a in all_sequences(n)] + list(vec.entries.values())
    for p in polys:
        if p:
            assert p.is_homogeneous(names, n * (n - 1))
        for triple in itertools.combinations(range(1, 2 * n + 1), 3):
            assert qkz.wheel_residual(p, n, triple) == 0


def test_wheel_examples():
    assert qkz.wheel_residual(qkz.base_component(2), 2, (1, 2, 3)) == 0
    assert qkz.wheel_residual(ExactPoly._coerce(1), 2, (1, 2, 3)) == 1
    with pytest.raises(ValueError):
        qkz.wheel_residual(ExactPoly._coerce(1), 2, (3, 2, 1))


def test_recurrence_examples():
    assert qkz.recurrence_residual((1, 3), 2) == 0
    assert qkz.recurrence_residual((1, 3), 1) == 0
    assert qkz.recurrence_residual((2, 2), 2) == 0
    # without the normalization factor the relation is off by (-1)^(n-1) q^(n-i)
    assert qkz.recurrence_residual((1, 2), 2, printed=True) != 0
    assert qkz.recurrence_normalization(2, 2) == -1


def test_printed_recurrence_sign_at_base():
    # the base component itself, n = 2, i = 2: the sign is forced
    b = qkz.base_component(2).substitute("z3", q ** 2 * z(2))
    assert b == -(z(2) - q ** 2 * z(1)) * (q ** 2 * z(2) - q ** -2 * z(4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_recurrences(n):
    for a in all_sequences(n):
        for i in range(1, 2 * n):
            assert qkz.recurrence_residual(a, i) == 0
    for p in enumerate_link_patterns(n):
        for i in range(1, 2 * n):
            assert qkz.pattern_recurrence_residual(p, i) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_qkz_relations(n):
    records = qkz.qkz_residual_records(n)
    assert records and all(r == 0 for _, r in records)
    assert any(k.startswith("cyclic") for k, _ in records)


def test_cyclic_direction_matters():
    vec = qkz.solve_components(3, "symbolic")
    p = P("(1,2)(3,6)(4,5)")
    shift = {f"z{j}": z(j + 1) for j in range(1, 6)}
    shift["z6"] = q ** 6 * z(1)
    wrong = vec[p.rotate(1)].substitute_many(shift) - q ** 6 * vec[p]
    assert wrong != 0
    assert qkz.cyclic_residual(vec, p) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_evaluations(n):
    vec = qkz.solve_components(n, "symbolic")
    pats = enumerate_link_patterns(n)
    for p in pats:
        for r in pats:
            value = qkz.evaluate_at_pattern(vec[r], p)
            assert value == (qkz.expected_evaluation(p) if p == r else 0)
        for a in set(catalan_sequences(n)) | set(sequences_An(n)):
            value = qkz.evaluate_at_pattern(qkz.psi_seq_symbolic(a, n), p)
            from qkzlab.linkpat import basis_coefficient
            assert value == qkz.expected_evaluation(p) * qkz.tau_to_q(basis_coefficient(a, p))


def test_evaluation_examples():
    base = LinkPattern.base(2)
    assert qkz.evaluate_at_pattern(qkz.base_component(2), base) == (q - qi) ** 2
    assert qkz.evaluation_exponent(P("(1,2)(3,4)(5,6)")) == 3
    with pytest.raises(qkz.DegreeMismatch):
        qkz.evaluate_at_pattern(z(1), base)


@pytest.mark.parametrize("n", [2, 3])
def test_residue_sum_is_pole_free(n):
    N = 2 * n
    for a in catalan_sequences(n):
        num, den = residue_sum_parts(qkz._psi_integral(a, N))
        for f in den:
            # each denominator factor vanishes on a locus z_x = c * z_y;
            # the numerator must vanish there too
            names = sorted(v for v in f.variables() if v.startswith("z"))
            hits = 0
            for x, y in itertools.permutations(names, 2):
                for c in (ExactPoly._coerce(1), q ** 2, q ** -2):
                    if f.substitute(x, c * var(y)) == 0:
                        hits += 1
                        assert num.substitute(x, c * var(y)) == 0
            assert hits


def test_sum_rules():
    sr = qkz.sum_rules(3)
    assert sr.refined == tau ** 3 + 2 * t * tau ** 2 + 2 * t ** 2 * tau + tau + t
    assert sr.sum.substitute("tau", 1) == 7
    assert sr.refined.substitute("t", 0).substitute("tau", 1) == 2
    for n in range(1, 6):
        assert all(v == 0 for v in qkz.sum_rules(n).consistency(n).values())


@pytest.mark.parametrize("n", range(1, 6))
def test_conjecture(n):
    assert qkz.conjecture_residual(n) == 0


def test_spin_examples():
    assert qkz.spin_component((1,), 1) == 1
    assert qkz.spin_component((1,), 1, route="integral") == 1
    for n in range(1, 5):
        largest = qkz.spin_component(tuple(range(1, 2 * n, 2)), n)
        assert largest == qkz.sum_rules(n).refined.substitute("t", -qi)


@pytest.mark.parametrize("n", range(1, 5))
def test_spin_routes(n):
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        assert qkz.spin_component(a, n) == qkz.spin_component(a, n, route="integral")


@pytest.mark.parametrize("n", [1, 2])
def test_spin_routes_symbolic(n):
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        assert qkz.spin_component(a, n, "symbolic") == qkz.spin_component(a, n, "symbolic", route="integral")


def test_spin_local_rules():
    arch = P("(1,2)")
    assert qkz.spin_pattern_weight((1,), arch) == 1
    assert qkz.spin_pattern_weight((2,), arch) == -qi
    assert qkz.spin_pattern_weight((1, 4), P("(1,4)(2,3)")) == 0
    assert qkz.spin_pattern_weight((1, 2), P("(1,4)(2,3)")) == 1
    terms = dict(qkz.spin_expansion_terms((2, 3), P("(1,4)(2,3)")))
    assert terms[(0, 0)] == 1
    assert terms[(0, 1)] == -(1 + q ** -2)
    assert terms[(1, 0)] == 0
    assert terms[(1, 1)] == q ** -2
    assert sum(terms.values(), ZERO) == 0


@pytest.mark.parametrize("n", range(1, 5))
def test_spin_local_rule_matches_expansion(n):
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        for p in enumerate_link_patterns(n):
            expansion = sum((c for _, c in qkz.spin_expansion_terms(a, p)), ZERO)
            assert qkz.spin_pattern_weight(a, p) == expansion


@pytest.mark.parametrize("n", range(1, 6))
def test_damnint(n):
    assert qkz.identity_damnint_residual(n) == 0
    assert qkz.damnint_middle_residual(n) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_damnint_literal(n):
    assert qkz.identity_damnint_residual(n, literal=True) == 0


@pytest.mark.parametrize("n", range(1, 5))
def test_integident(n):
    lhs = qkz.integident_lhs(n)
    assert lhs - qkz.integident_rhs(n) == 0
    assert qkz.x_dependent_part(lhs) == 0


def test_integident_examples():
    assert qkz.integident_lhs(1) == var("alpha1")
    for n in (2, 3):
        assert qkz.integident_lhs(n, per_permutation=True) == qkz.integident_lhs(n)


def test_vector_json_round_trip():
    for vec in (qkz.solve_components(3), qkz.solve_components(2, "symbolic"),
                qkz.sequence_components(3), qkz.spin_components(2)):
        back = qkz.QkzVector.from_json(vec.to_json())
        assert back == vec


def test_r_matrix_unitarity_on_components():
    vec = qkz.solve_components(2, "symbolic")
    r = qkz.RMatrixSpec(1, z(2), z(1))
    scaled = r.apply_scaled(vec)
    assert set(scaled) == set(vec.entries)
    assert r.denominator() == q * z(1) - qi * z(2)
