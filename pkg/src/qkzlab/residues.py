"""Exact residue sums for the z-dependent contour integrals.

The integrals in question have the shape::

    prefactor(z) * oint prod_l dw_l  N(w) / prod_l [ prod_{i in S_l} (w_l - z_i)
                                                   * prod_{i in T_l} (q w_l - q^-1 z_i) ]

with contours catching only the poles ``w_l = z_i``, ``i in S_l``.  Every
pole is simple, so the integral is the finite sum over index choices
``k_l in S_l`` of the integrand with ``w_l -> z_{k_l}`` and the factor
``(w_l - z_{k_l})`` removed.

All factors appearing in numerator and denominator are binomials, so each
summand is kept as a multiset of normalized binomials.  Common factors are
cancelled symbolically, the sum is taken over the least common multiple of
the remaining denominators, and that denominator is then divided out
exactly.  A nonzero remainder would mean the sum is not a polynomial.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

from .exactalg import ONE, ZERO, ExactPoly, var

__all__ = ["ResidueIntegral", "residue_sum", "residue_sum_parts", "normalize_factor"]


def normalize_factor(f: ExactPoly) -> tuple[ExactPoly, ExactPoly]:
    """Split ``f`` as ``unit * key`` where ``key`` has leading coefficient 1 at monomial 1."""
    if not f:
        raise ZeroDivisionError("zero factor")
    lead = max(f._terms)
    c = f._terms[lead]
    if c not in (1, -1):
        raise ValueError(f"factor {f} has a non-unit leading coefficient")
    unit = ExactPoly._raw({lead: c})
    return unit, f * (unit ** -1)


@dataclass
class ResidueIntegral:
    """Description of one multiple contour integral in the z variables.

    ``caught[l]`` and ``uncaught[l]`` are the index sets ``S_l`` and ``T_l``;
    ``pair`` returns the numerator factors coupling ``w_l`` and ``w_m``
    (``l < m``) and ``single`` those depending on one ``w_l``.
    """

    N: int
    prefactor: list[ExactPoly]
    caught: list[list[int]]
    uncaught: list[list[int]]
    pair: Callable[[ExactPoly, ExactPoly], list[ExactPoly]]
    single: Callable[[int, ExactPoly], list[ExactPoly]] | None = None

    def z(self, i: int) -> ExactPoly:
        return var(f"z{i}")


def _summands(integral: ResidueIntegral):
    q = var("q")
    qi = q ** -1
    n = len(integral.caught)
    z = [None] + [integral.z(i) for i in range(1, integral.N + 1)]
    pre_unit = ONE
    pre = Counter()
    for f in integral.prefactor:
        u, key = normalize_factor(f)
        pre_unit = pre_unit * u
        pre[key] += 1
    for ks in itertools.product(*integral.caught):
        if len(set(ks)) < n:
            # pair factors contain (w_m - w_l), which vanishes
            continue
        unit = pre_unit
        num, den = Counter(pre), Counter()
        factors = []
        for l in range(n):
            for m in range(l + 1, n):
                factors.extend(integral.pair(z[ks[l]], z[ks[m]]))
            if integral.single is not None:
                factors.extend(integral.single(l, z[ks[l]]))
        for f in factors:
            u, key = normalize_factor(f)
            unit = unit * u
            num[key] += 1
        for l, k in enumerate(ks):
            for i in integral.caught[l]:
                if i != k:
                    u, key = normalize_factor(z[k] - z[i])
                    unit = unit * u ** -1
                    den[key] += 1
            for i in integral.uncaught[l]:
                u, key = normalize_factor(q * z[k] - qi * z[i])
                unit = unit * u ** -1
                den[key] += 1
        common = num & den
        num -= common
        den -= common
        yield unit, num, den


def residue_sum_parts(integral: ResidueIntegral) -> tuple[ExactPoly, list[ExactPoly]]:
    """(numerator, denominator factors) of the residue sum over a common denominator."""
    terms = list(_summands(integral))
    if not terms:
        return ZERO, []
    lcm = Counter()
    for _, _, den in terms:
        lcm |= den
    total = ZERO
    for unit, num, den in terms:
        extra = lcm - den
        factors = sorted(list(num.elements()) + list(extra.elements()), key=len)
        acc = unit
        for f in factors:
            acc = acc * f
        total = total + acc
    return total, list(lcm.elements())


def residue_sum(integral: ResidueIntegral) -> ExactPoly:
    total, den = residue_sum_parts(integral)
    for f in den:
        if not total:
            break
        total = total.divide_exact(f)
    return total
