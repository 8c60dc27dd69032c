from __future__ import annotations

import pytest

from qkzlab.exactalg import var
from qkzlab.tsscpp import (
    NilpConfig,
    SizeTooLargeForBruteForce,
    WeightSpec,
    asm_count,
    asm_refined,
    enumerate_asm,
    enumerate_nilp,
    gen_poly,
    nprime_specialized,
    refined_asm_polynomial,
    weighted_path_count,
)

t, tau = var("t"), var("tau")
t0, t1, t2 = var("t0"), var("t1"), var("t2")
ASM = [1, 2, 7, 42, 429, 7436]


def test_enumeration_counts():
    assert len(enumerate_nilp(1)) == 1 and enumerate_nilp(1)[0].paths == ()
    assert len(enumerate_nilp(2)) == 2
    assert len(enumerate_nilp(3)) == 7
    assert [len(enumerate_nilp(n, modified=True)) for n in (1, 2, 3, 4)] == [1, 2, 7, 42]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_configurations_are_valid(n):
    for modified in (False, True):
        for c in enumerate_nilp(n, modified):
            pts = [c.points(i) for i in range(1, n)]
            flat = [p for path in pts for p in path]
            assert len(flat) == len(set(flat))
            for i, path in enumerate(pts, start=1):
                assert path[0] == (i, -i)
                assert path[-1][1] == (1 if modified else 0)
            ends = c.endpoints()
            assert list(ends) == sorted(set(ends))
            if modified and n > 1:
                rs = [e - 1 for e in ends]
                assert rs[0] == 1 and all((b - a) % 2 == 1 for a, b in zip(rs, rs[1:]))


def test_nilp_json_round_trip():
    for c in enumerate_nilp(4):
        assert NilpConfig.from_json(c.to_json()) == c


def test_weighted_path_count_examples():
    w = WeightSpec.uniform(3, tau=tau)
    assert weighted_path_count(1, 1, w) == tau
    assert weighted_path_count(1, 2, w) == 1
    assert weighted_path_count(2, 1, w) == 0


@pytest.mark.parametrize("method", ["direct", "lgv", "extract"])
def test_gen_poly_examples(method):
    assert gen_poly(3, WeightSpec.uniform(3, tau=tau), method) == 1 + 3 * tau + 2 * tau ** 2 + tau ** 3
    expected = (1 + t0 * t1) * (t0 + t1) + (t0 ** 2 + t0 * t1 + t1 ** 2) * t2
    assert gen_poly(3, WeightSpec.symbolic(3, True), method, True) == expected
    assert gen_poly(2, WeightSpec.uniform(2, tau=tau), method) == 1 + tau


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_method_agreement_symbolic(n):
    for modified in (False, True):
        w = WeightSpec.symbolic(n, modified)
        ref = gen_poly(n, w, "lgv", modified)
        assert gen_poly(n, w, "direct", modified) == ref
        assert gen_poly(n, w, "extract", modified) == ref


@pytest.mark.parametrize("n", [5, 6])
def test_method_agreement_specialized(n):
    for modified in (False, True):
        w = WeightSpec.uniform(n, tau=tau, t=t, modified=modified)
        ref = gen_poly(n, w, "lgv", modified)
        assert gen_poly(n, w, "direct", modified) == ref
        assert gen_poly(n, w, "extract", modified) == ref


def test_nprime_examples():
    assert nprime_specialized(3) == t + tau + 2 * t ** 2 * tau + 2 * t * tau ** 2 + tau ** 3
    assert nprime_specialized(3, 1, 1) == 7
    assert nprime_specialized(3, 0, 1) == 2


@pytest.mark.parametrize("n", range(1, 6))
def test_nprime_restrictions(n):
    p = nprime_specialized(n)
    assert p.substitute("t", 1) == gen_poly(n, WeightSpec.uniform(n, tau=tau))
    if n > 1:
        smaller = nprime_specialized(n - 1, t=tau)
        # the large-t law holds identically in tau
        assert p.coefficient("t", n - 1) == smaller and p.degree("t") == n - 1
        # the t = 0 restriction only holds after tau = 1
        assert p.substitute("t", 0).substitute("tau", 1) == smaller.substitute("tau", 1) == ASM[n - 2]


def test_zero_t_restriction_is_not_a_polynomial_identity():
    full = gen_poly(3, WeightSpec.symbolic(3, True), "lgv", True)
    assert full.substitute("t0", 0) == t1 + t1 ** 2 * t2
    smaller = gen_poly(2, WeightSpec(2, (t1, t2), True), "lgv", True)
    assert smaller == t1 + t2


def test_asm_counts():
    for n in range(1, 7):
        assert asm_count(n) == ASM[n - 1]
    assert asm_count(7, "formula") == 218348
    with pytest.raises(SizeTooLargeForBruteForce):
        enumerate_asm(7)


def test_asm_refined():
    assert asm_refined(1) == (1,)
    assert asm_refined(3) == (2, 3, 2)
    assert asm_refined(4) == (7, 14, 14, 7)
    assert refined_asm_polynomial(3) == 2 + 3 * t + 2 * t ** 2


def test_weight_spec_length_check():
    with pytest.raises(ValueError):
        WeightSpec(3, (tau,), False)
