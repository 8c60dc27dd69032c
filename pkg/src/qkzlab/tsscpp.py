"""Weighted TSSCPP enumeration through non-intersecting lattice paths.

Path ``i`` (``1 <= i <= n-1``) starts at ``(i, -i)`` and takes ``i`` steps,
each vertical ``(0, 1)`` or diagonal ``(1, 1)``, ending on ``y = 0``.  A step
from height ``-k`` to ``1-k`` lies in slice ``k`` and a vertical step there
carries the weight ``t_k``.  Modified configurations add one more step per
path into slice 0 (weight ``t_0``), with final abscissae ``r_i + 1`` subject
to ``r_1 = 1`` and ``r_{i+1} - r_i`` odd.

The generating polynomial is computed three ways (direct enumeration, LGV
determinants, coefficient extraction); the module also carries alternating
sign matrix counts used as oracles for the refined statements.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Iterator, Sequence

from .exactalg import ONE, ZERO, ExactPoly, const, determinant, var
from .extract import SeriesProduct, coefficient_of, denominator, numerator

__all__ = [
    "NilpConfig",
    "WeightSpec",
    "SizeTooLargeForBruteForce",
    "enumerate_nilp",
    "weighted_path_count",
    "gen_poly",
    "nprime_specialized",
    "asm_count",
    "asm_refined",
    "enumerate_asm",
    "refined_asm_polynomial",
]

VERTICAL, DIAGONAL = "V", "D"
METHODS = ("direct", "lgv", "extract")


class SizeTooLargeForBruteForce(ValueError):
    pass


@dataclass(frozen=True)
class NilpConfig:
    """One NILP configuration; ``paths[i-1]`` lists the steps of path ``i`` bottom-up."""

    n: int
    paths: tuple[tuple[str, ...], ...]
    modified: bool = False

    def endpoint(self, i: int) -> int:
        """Final abscissa of path ``i``."""
        return i + self.paths[i - 1].count(DIAGONAL)

    def endpoints(self) -> tuple[int, ...]:
        return tuple(self.endpoint(i) for i in range(1, self.n))

    def slice_of(self, i: int, j: int) -> int:
        # step j (0-based, bottom-up) of path i climbs from y=-i+j to y=-i+j+1
        return i - j

    def weight(self, w: "WeightSpec") -> ExactPoly:
        out = ONE
        for i, steps in enumerate(self.paths, start=1):
            for j, s in enumerate(steps):
                if s == VERTICAL:
                    out = out * w[self.slice_of(i, j)]
        return out

    def points(self, i: int) -> list[tuple[int, int]]:
        x, y = i, -i
        pts = [(x, y)]
        for s in self.paths[i - 1]:
            x, y = x + (s == DIAGONAL), y + 1
            pts.append((x, y))
        return pts

    def to_json(self) -> str:
        return json.dumps(["".join(p) for p in self.paths])

    @classmethod
    def from_json(cls, text: str, modified: bool = False) -> "NilpConfig":
        paths = tuple(tuple(p) for p in json.loads(text))
        return cls(len(paths) + 1, paths, modified)


@dataclass(frozen=True)
class WeightSpec:
    """Slice weights ``t_0..t_{n-1}``; ``t_0`` is only meaningful when modified."""

    n: int
    slices: tuple[ExactPoly, ...]
    modified: bool = False

    def __post_init__(self):
        expected = self.n if self.modified else self.n - 1
        if len(self.slices) != expected:
            raise ValueError(f"expected {expected} slice weights, got {len(self.slices)}")

    def __getitem__(self, k: int) -> ExactPoly:
        return self.slices[k] if self.modified else self.slices[k - 1]

    @classmethod
    def symbolic(cls, n: int, modified: bool = False) -> "WeightSpec":
        first = 0 if modified else 1
        return cls(n, tuple(var(f"t{k}") for k in range(first, n)), modified)

    @classmethod
    def top_slice(cls, n: int, t="t") -> "WeightSpec":
        """Weight ``t`` on the top slice and 1 on all others (unmodified)."""
        t = var(t) if isinstance(t, str) else ExactPoly._coerce(t)
        body = (t,) + (ONE,) * (n - 2) if n > 1 else ()
        return cls(n, body, False)

    @classmethod
    def uniform(cls, n: int, tau=1, t=None, modified: bool = False) -> "WeightSpec":
        tau = ExactPoly._coerce(tau)
        body = (tau,) * (n - 1)
        if modified:
            return cls(n, (ExactPoly._coerce(1 if t is None else t),) + body, True)
        return cls(n, body, False)


def _path_steps(i: int, length: int, occupied: set) -> Iterator[tuple[tuple[str, ...], list]]:
    def rec(x, y, steps, pts):
        if len(steps) == length:
            yield tuple(steps), pts
            return
        for s, dx in ((VERTICAL, 0), (DIAGONAL, 1)):
            p = (x + dx, y + 1)
            if p in occupied:
                continue
            yield from rec(p[0], p[1], steps + [s], pts + [p])

    start = (i, -i)
    if start not in occupied:
        yield from rec(i, -i, [], [start])


def enumerate_nilp(n: int, modified: bool = False) -> list[NilpConfig]:
    """All (modified) TSSCPP path configurations of size ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: list[NilpConfig] = []

    def rec(i: int, paths: list, occupied: set, last_end: int):
        if i == n:
            out.append(NilpConfig(n, tuple(paths), modified))
            return
        for steps, pts in _path_steps(i, i + (1 if modified else 0), occupied):
            end = pts[-1][0]
            if end <= last_end:
                raise AssertionError("non-intersecting paths must end in increasing order")
            if modified:
                r = end - 1
                if i == 1 and r != 1:
                    continue
                if i > 1 and (r - (last_end - 1)) % 2 == 0:
                    continue
            rec(i + 1, paths + [steps], occupied | set(pts), end)

    rec(1, [], set(), 0 if not modified else 0)
    return out


def _elementary(values: Sequence[ExactPoly], m: int) -> ExactPoly:
    """Elementary symmetric polynomial ``e_m`` of ``values``."""
    if m < 0 or m > len(values):
        return ZERO
    e = [ONE] + [ZERO] * m
    for v in values:
        for k in range(m, 0, -1):
            e[k] = e[k] + e[k - 1] * v
    return e[m]


def weighted_path_count(i: int, r: int, w: WeightSpec, modified: bool = False) -> ExactPoly:
    """Weighted number of paths from ``(i, -i)`` to ``(r, 0)``, or to ``(r+1, 1)`` if modified.

    Equals the coefficient of ``u**(2i-r)`` in ``prod_k (1 + t_k u)`` over the
    slices the path crosses.
    """
    first = 0 if modified else 1
    return _elementary([w[k] for k in range(first, i + 1)], 2 * i - r)


def _endpoint_sequences(n: int, modified: bool) -> Iterator[tuple[int, ...]]:
    def rec(prefix):
        i = len(prefix) + 1
        if i == n:
            yield tuple(prefix)
            return
        if modified:
            if i == 1:
                candidates = [1]
            else:
                candidates = range(prefix[-1] + 1, 2 * i + 1, 2)
        else:
            candidates = range(prefix[-1] + 1 if prefix else 1, 2 * i + 1)
        for r in candidates:
            yield from rec(prefix + [r])

    yield from rec([])


def _lgv(n: int, w: WeightSpec, modified: bool) -> ExactPoly:
    total = ZERO
    for rs in _endpoint_sequences(n, modified):
        rows = [[weighted_path_count(i, r, w, modified) for r in rs] for i in range(1, n)]
        total = total + determinant(rows)
    return total


def _extract(n: int, w: WeightSpec, modified: bool) -> ExactPoly:
    names = [f"u{i}" for i in range(1, n + 1)]
    u = [var(x) for x in names]
    factors = []
    for i in range(n):
        for j in range(i + 1, n):
            # weights are indexed from 1: factor (1 + t_i u_j) for i < j
            factors.append(numerator((u[j] - u[i]) * (1 + w[i + 1] * u[j])))
            factors.append(denominator(1 - u[i] * u[j]))
        if modified:
            factors.append(numerator(1 + w[0] * u[i]))
            factors.append(denominator(1 - u[i] ** 2))
        else:
            factors.append(denominator(1 - u[i]))
    sp = SeriesProduct(factors, names)
    return coefficient_of(sp, [2 * i for i in range(n)])


def gen_poly(n: int, w: WeightSpec | None = None, method: str = "lgv", modified: bool = False) -> ExactPoly:
    """Generating polynomial ``N_10`` (or the modified ``N'_10``) of size ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if w is None:
        w = WeightSpec.symbolic(n, modified)
    if w.modified != modified or w.n != n:
        raise ValueError("weight spec does not match n / modified")
    if method == "direct":
        return sum((c.weight(w) for c in enumerate_nilp(n, modified)), ZERO)
    if method == "lgv":
        return _lgv(n, w, modified)
    if method == "extract":
        return _extract(n, w, modified)
    raise ValueError(f"unknown method {method!r}")


def nprime_specialized(n: int, t=None, tau=None, method: str = "lgv") -> ExactPoly:
    """``N'_10(2n | t, tau)``: modified polynomial at ``t_0 = t``, ``t_k = tau``."""
    t = var("t") if t is None else t
    tau = var("tau") if tau is None else tau
    return gen_poly(n, WeightSpec.uniform(n, tau=tau, t=t, modified=True), method, True)


# -- alternating sign matrices -----------------------------------------------


def _asm_formula(n: int) -> int:
    return prod(factorial(3 * k + 1) for k in range(n)) // prod(factorial(n + k) for k in range(n))


def _is_asm_line(v: Sequence[int]) -> bool:
    if sum(v) != 1:
        return False
    for partial in itertools.accumulate(v):
        if partial < 0:
            return False
    for partial in itertools.accumulate(reversed(v)):
        if partial < 0:
            return False
    return True


def is_asm(m: Sequence[Sequence[int]]) -> bool:
    return all(_is_asm_line(r) for r in m) and all(_is_asm_line(c) for c in zip(*m))


def enumerate_asm(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All n x n alternating sign matrices by exhaustive row-wise search."""
    if n > 6:
        raise SizeTooLargeForBruteForce(f"brute-force ASM enumeration is bounded to n <= 6, got {n}")
    rows = [r for r in itertools.product((-1, 0, 1), repeat=n) if _is_asm_line(r)]
    out = []

    def rec(prefix, colsum):
        if len(prefix) == n:
            if all(c == 1 for c in colsum):
                out.append(tuple(prefix))
            return
        for r in rows:
            new = [c + x for c, x in zip(colsum, r)]
            # column partial sums from the top stay in {0, 1}
            if all(0 <= c <= 1 for c in new):
                rec(prefix + [r], new)

    rec([], [0] * n)
    assert all(is_asm(m) for m in out)
    return out


def asm_count(n: int, method: str = "both") -> int:
    """Number of ASMs; ``method="both"`` cross-checks formula and enumeration."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "formula":
        return _asm_formula(n)
    brute = len(enumerate_asm(n))
    if method == "brute":
        return brute
    formula = _asm_formula(n)
    if formula != brute:
        raise AssertionError(f"A_{n}: formula {formula} != enumeration {brute}")
    return formula


@lru_cache(maxsize=None)
def asm_refined(n: int) -> tuple[int, ...]:
    """``(A_{n,1}, ..., A_{n,n})`` by the position of the 1 in the top row."""
    counts = [0] * n
    for m in enumerate_asm(n):
        counts[m[0].index(1)] += 1
    return tuple(counts)


def refined_asm_polynomial(n: int, t: str = "t") -> ExactPoly:
    """``sum_k A_{n,k} t^(k-1)``."""
    tv = var(t)
    return sum((c * tv ** k for k, c in enumerate(asm_refined(n))), ZERO)
