"""Coefficient extraction from products of power-series factors.

A contour integral around the origin picks a Taylor coefficient.  The
integrands handled here are products of polynomial numerator factors and
denominator factors that are units of the power-series ring, so the
coefficient can be obtained by truncated expansion.

Two engines are provided:

* :func:`coefficient_of` - sparse, sequential elimination of one extraction
  variable at a time; parameters stay symbolic.
* :class:`DenseBox` - every coefficient inside a box of exponents at once,
  stored in a numpy array.  Used when many coefficients of the same
  polynomial product are needed (the homogeneous qKZ components).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactalg import (
    ONE,
    ZERO,
    ExactPoly,
    box_filter,
    const,
    determinant,
    total_degree_filter,
    var,
)

__all__ = [
    "NonUnitDenominator",
    "SeriesFactor",
    "SeriesProduct",
    "numerator",
    "denominator",
    "coefficient_of",
    "expand_truncated",
    "series_inverse",
    "DenseBox",
    "schur_sum_residual",
]


class NonUnitDenominator(ValueError):
    """A denominator factor is not invertible as a power series around 0."""


@dataclass(frozen=True)
class SeriesFactor:
    body: ExactPoly
    denominator: bool = False


@dataclass(frozen=True)
class SeriesProduct:
    """Product of series factors; ``extraction_vars`` are expanded around 0."""

    factors: tuple[SeriesFactor, ...]
    extraction_vars: tuple[str, ...]

    def __init__(self, factors: Iterable[SeriesFactor], extraction_vars: Sequence[str]):
        object.__setattr__(self, "factors", tuple(factors))
        object.__setattr__(self, "extraction_vars", tuple(extraction_vars))


def numerator(p) -> SeriesFactor:
    return SeriesFactor(ExactPoly._coerce(p), False)


def denominator(p) -> SeriesFactor:
    return SeriesFactor(ExactPoly._coerce(p), True)


def _check_series(body: ExactPoly, names: Sequence[str]) -> None:
    for n in names:
        lo = body.min_degree(n)
        if lo is not None and lo < 0:
            raise ValueError(f"factor {body} has a negative power of {n}")


def _split_constant(body: ExactPoly, names: Sequence[str]) -> tuple[ExactPoly, ExactPoly]:
    """(part of degree 0 in all ``names``, remainder)."""
    b0 = body
    for n in names:
        b0 = b0.coefficient(n, 0)
    return b0, body - b0


def series_inverse(body: ExactPoly, names: Sequence[str], keep) -> ExactPoly:
    """Truncated expansion of ``1/body`` in the variables ``names``.

    ``keep`` is a predicate on packed monomial keys that bounds the
    expansion; it must reject all sufficiently large exponents so that the
    geometric series terminates.
    """
    b0, rest = _split_constant(body, names)
    if not b0.is_unit_monomial():
        raise NonUnitDenominator(f"constant term {b0} of {body} is not a unit")
    inv0 = b0 ** -1
    ratio = -(rest * inv0)
    term = inv0.filter_terms(keep)
    acc = term
    while term:
        term = term.mul_truncated(ratio, keep)
        acc = acc + term
    return acc


def expand_truncated(factors: Iterable[SeriesFactor], names: Sequence[str], keep) -> ExactPoly:
    """Product of all factors with terms outside ``keep`` discarded."""
    names = list(names)
    nums, dens = [], []
    for f in factors:
        _check_series(f.body, names)
        (dens if f.denominator else nums).append(f.body)
    acc = ONE.filter_terms(keep)
    for body in sorted(nums, key=len):
        acc = acc.mul_truncated(body, keep)
        if not acc:
            return ZERO
    for body in dens:
        acc = acc.mul_truncated(series_inverse(body, names, keep), keep)
        if not acc:
            return ZERO
    return acc


def coefficient_of(
    sp: SeriesProduct,
    exponents: Sequence[int],
    order: Sequence[str] | None = None,
) -> ExactPoly:
    """Coefficient of ``prod u**e`` in the expansion of ``sp`` around 0.

    Variables are eliminated one at a time (in ``order``, default the
    declared order): all factors involving the current variable are
    expanded, truncated at the target exponents, and replaced by the
    coefficient of the target power.  The result does not depend on the
    order.
    """
    names = list(sp.extraction_vars)
    if len(exponents) != len(names):
        raise ValueError("one exponent per extraction variable is required")
    if any(e < 0 for e in exponents):
        return ZERO
    bounds = dict(zip(names, exponents))
    order = list(order) if order is not None else names
    if sorted(order) != sorted(names):
        raise ValueError("order must be a permutation of the extraction variables")

    pending: list[SeriesFactor] = []
    for f in sp.factors:
        _check_series(f.body, names)
        if f.denominator:
            b0, _ = _split_constant(f.body, names)
            if not b0.is_unit_monomial():
                raise NonUnitDenominator(f"constant term {b0} of {f.body} is not a unit")
        pending.append(f)

    for v in order:
        involved = [f for f in pending if v in f.body.variables()]
        pending = [f for f in pending if v not in f.body.variables()]
        keep = box_filter(bounds)
        acc = expand_truncated(involved, list(bounds), keep)
        pending.append(numerator(acc.coefficient(v, bounds.pop(v))))

    result = ONE
    for f in pending:
        if f.denominator:
            if not f.body.is_unit_monomial():
                raise NonUnitDenominator(f"{f.body} is not a unit")
            result = result * f.body ** -1
        else:
            result = result * f.body
    return result


class DenseBox:
    """All coefficients of a polynomial product inside an exponent box.

    ``names`` are the dense axes (extraction variables followed by
    parameters), each with an inclusive upper bound.  Factors must be
    polynomials with non-negative exponents in ``names`` and no other
    variables.  Coefficients are held in int64 while a running bound
    guarantees no overflow, and in Python integers (object arrays) after.
    """

    def __init__(self, names: Sequence[str], bounds: Sequence[int]):
        self.names = list(names)
        self.bounds = list(bounds)
        self.data = np.zeros([b + 1 for b in self.bounds], dtype=np.int64)
        self.data[(0,) * len(self.names)] = 1
        self._max = 1

    def _terms(self, p: ExactPoly) -> list[tuple[tuple[int, ...], int]]:
        out = []
        for exps, c in p.terms():
            extra = set(exps) - set(self.names)
            if extra:
                raise ValueError(f"variables {sorted(extra)} are not box axes")
            vec = tuple(exps.get(n, 0) for n in self.names)
            if min(vec, default=0) < 0:
                raise ValueError("negative exponents are not allowed in a box")
            out.append((vec, c))
        return out

    def multiply(self, p: ExactPoly) -> None:
        terms = self._terms(p)
        norm = sum(abs(c) for _, c in terms)
        if self.data.dtype == np.int64 and self._max * norm >= 2 ** 62:
            self.data = self.data.astype(object)
        new = np.zeros_like(self.data)
        for vec, c in terms:
            if any(e > b for e, b in zip(vec, self.bounds)):
                continue
            dst = tuple(slice(e, b + 1) for e, b in zip(vec, self.bounds))
            src = tuple(slice(0, b + 1 - e) for e, b in zip(vec, self.bounds))
            new[dst] += c * self.data[src]
        self.data = new
        if self.data.dtype == np.int64:
            self._max = int(np.abs(self.data).max(initial=0))

    def coefficient(self, exponents: Mapping[str, int], free: Sequence[str] = ()) -> ExactPoly:
        """Coefficient at fixed exponents; axes listed in ``free`` stay symbolic."""
        index = []
        for n, b in zip(self.names, self.bounds):
            if n in free:
                index.append(slice(None))
            else:
                e = exponents.get(n, 0)
                if e < 0 or e > b:
                    return ZERO
                index.append(e)
        block = np.asarray(self.data[tuple(index)])
        free = [n for n in self.names if n in free]
        items = []
        for pos in zip(*np.nonzero(block)) if block.ndim else ([()] if block else []):
            c = int(block[pos])
            items.append(({n: int(e) for n, e in zip(free, pos)}, c))
        return ExactPoly.from_terms(items)


def _increasing_sequences(n: int, order: int, even: bool) -> Iterable[tuple[int, ...]]:
    def rec(prefix: tuple[int, ...], budget: int):
        if len(prefix) == n:
            yield prefix
            return
        if prefix:
            start = prefix[-1] + 1
            step = 2 if even else 1
        else:
            start, step = 0, (2 if even else 1)
        remaining = n - len(prefix)
        r = start
        # smallest possible completion r, r+1, ... must fit in the budget
        while r * remaining + remaining * (remaining - 1) // 2 <= budget:
            yield from rec(prefix + (r,), budget - r)
            r += step

    yield from rec((), order)


def schur_sum_residual(n: int, order: int, parity: str = "all") -> ExactPoly:
    """Summed determinants minus the closed product, to total degree ``order``.

    With ``parity="all"`` the sum runs over all ``0 <= r_0 < ... < r_{n-1}``
    and the product is ``prod (u_j-u_i)/(1-u_i u_j) prod 1/(1-u_i)``;
    with ``parity="even"`` ``r_0`` is even, successive gaps are odd and the
    last factor becomes ``1/(1-u_i^2)``.
    """
    if parity not in ("all", "even"):
        raise ValueError("parity must be 'all' or 'even'")
    even = parity == "even"
    names = [f"u{i}" for i in range(1, n + 1)]
    u = [var(x) for x in names]
    lhs = ZERO
    for r in _increasing_sequences(n, order, even):
        lhs = lhs + determinant([[ui ** rj for rj in r] for ui in u])
    factors = []
    for i in range(n):
        for j in range(i + 1, n):
            factors.append(numerator(u[j] - u[i]))
            factors.append(denominator(1 - u[i] * u[j]))
        factors.append(denominator(1 - u[i] ** 2 if even else 1 - u[i]))
    rhs = expand_truncated(factors, names, total_degree_filter(names, order))
    return lhs - rhs
