"""Link patterns, the Temperley-Lieb action and the sequence families.

A link pattern on ``2n`` points is a noncrossing perfect matching, stored as
the tuple ``match`` with ``match[i-1]`` the partner of point ``i``.  The
canonical order on patterns is the lexicographic order of their opening
sequences.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exactalg import ONE, ZERO, ExactPoly, var

__all__ = [
    "LinkPattern",
    "SequenceNotInFamily",
    "enumerate_link_patterns",
    "tl_apply",
    "pattern_stats",
    "sequences_An",
    "partition_L",
    "catalan_sequences",
    "chebyshev_U",
    "basis_coefficient",
    "basis_coefficient_recursive",
    "format_sequence",
    "parse_sequence",
]


class SequenceNotInFamily(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LinkPattern:
    match: tuple[int, ...]

    def __post_init__(self):
        m = self.match
        N = len(m)
        if N % 2:
            raise ValueError("a link pattern needs an even number of points")
        for i, j in enumerate(m, start=1):
            if not 1 <= j <= N or j == i or m[j - 1] != i:
                raise ValueError(f"not a fixed-point-free involution: {m}")
        for i, j in self.arches():
            for k, l in self.arches():
                if i < k < j < l:
                    raise ValueError(f"arches ({i},{j}) and ({k},{l}) cross")

    @property
    def n(self) -> int:
        return len(self.match) // 2

    def __call__(self, i: int) -> int:
        return self.match[i - 1]

    def arches(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.match, start=1) if i < j]

    def openings(self) -> tuple[int, ...]:
        return tuple(i for i, j in self.arches())

    def epsilon(self) -> tuple[int, ...]:
        return tuple(1 if j > i else -1 for i, j in enumerate(self.match, start=1))

    def depth(self) -> int:
        return self.n ** 2 + sum(i * e for i, e in enumerate(self.epsilon(), start=1))

    def rotate(self, shift: int = 1) -> "LinkPattern":
        """Pattern with every label moved up by ``shift`` (mod 2n)."""
        N = len(self.match)
        new = [0] * N
        for i, j in enumerate(self.match, start=1):
            new[(i - 1 + shift) % N] = (j - 1 + shift) % N + 1
        return LinkPattern(tuple(new))

    def remove_arch(self, i: int) -> "LinkPattern":
        """Delete the little arch ``(i, i+1)`` and relabel the rest."""
        if self(i) != i + 1:
            raise ValueError(f"({i},{i + 1}) is not a little arch")

        def relabel(k):
            return k if k < i else k - 2

        pairs = [(relabel(a), relabel(b)) for a, b in self.arches() if a != i]
        return LinkPattern.from_arches(pairs, self.n - 1)

    @classmethod
    def from_arches(cls, pairs: Sequence[tuple[int, int]], n: int | None = None) -> "LinkPattern":
        if n is None:
            n = len(pairs)
        m = [0] * (2 * n)
        for a, b in pairs:
            m[a - 1], m[b - 1] = b, a
        return cls(tuple(m))

    @classmethod
    def from_openings(cls, openings: Sequence[int], n: int | None = None) -> "LinkPattern":
        n = len(openings) if n is None else n
        opens = set(openings)
        stack, pairs = [], []
        for i in range(1, 2 * n + 1):
            if i in opens:
                stack.append(i)
            else:
                if not stack:
                    raise ValueError(f"{tuple(openings)} is not an opening sequence")
                pairs.append((stack.pop(), i))
        if stack:
            raise ValueError(f"{tuple(openings)} is not an opening sequence")
        return cls.from_arches(pairs, n)

    @classmethod
    def base(cls, n: int) -> "LinkPattern":
        """The fully nested pattern ``i <-> 2n+1-i``."""
        return cls(tuple(2 * n + 1 - i for i in range(1, 2 * n + 1)))

    def __str__(self) -> str:
        return "".join(f"({a},{b})" for a, b in self.arches())

    @classmethod
    def parse(cls, text: str) -> "LinkPattern":
        pairs = [(int(a), int(b)) for a, b in re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)]
        if not pairs and text.strip() not in ("", "()"):
            raise ValueError(f"cannot parse link pattern {text!r}")
        return cls.from_arches(pairs)


def format_sequence(a: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in a) + ")"


def parse_sequence(text: str) -> tuple[int, ...]:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"cannot parse sequence {text!r}")
    inner = body[1:-1].strip()
    return tuple(int(x) for x in inner.split(",")) if inner else ()


@lru_cache(maxsize=None)
def catalan_sequences(n: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing sequences with ``a_l <= 2l - 1``, lexicographic order."""
    out = []

    def rec(prefix):
        l = len(prefix) + 1
        if l > n:
            out.append(tuple(prefix))
            return
        lo = prefix[-1] + 1 if prefix else 1
        for a in range(lo, 2 * l):
            rec(prefix + [a])

    rec([])
    return tuple(out)


def enumerate_link_patterns(n: int) -> list[LinkPattern]:
    """All link patterns on ``2n`` points in canonical order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return [LinkPattern.from_openings(a, n) for a in catalan_sequences(n)]


def tl_apply(i: int, pi: LinkPattern) -> tuple[LinkPattern, int]:
    """Action of the Temperley-Lieb generator ``e_i`` (site ``2n`` pairs with 1).

    Returns the image pattern and the number of closed loops created.
    """
    N = len(pi.match)
    if not 1 <= i <= N:
        raise ValueError(f"site {i} out of range 1..{N}")
    j = i % N + 1
    if pi(i) == j:
        return pi, 1
    a, b = pi(i), pi(j)
    m = list(pi.match)
    m[i - 1], m[j - 1] = j, i
    m[a - 1], m[b - 1] = b, a
    return LinkPattern(tuple(m)), 0


def pattern_stats(pi: LinkPattern) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """(epsilon, openings, depth) with depth ``n^2 + sum i*epsilon_i``."""
    return pi.epsilon(), pi.openings(), pi.depth()


def _check_An(a: Sequence[int]) -> None:
    if not a or a[0] != 1 or any(x not in (2 * l - 2, 2 * l - 1) for l, x in enumerate(a, start=1)):
        raise SequenceNotInFamily(f"{format_sequence(a)} is not in A_{len(a)}")


def sequences_An(n: int) -> list[tuple[int, ...]]:
    """The ``2^(n-1)`` sequences with ``a_1 = 1`` and ``a_l in {2l-2, 2l-1}``."""
    out = [[1]]
    for l in range(2, n + 1):
        out = [s + [c] for s in out for c in (2 * l - 1, 2 * l - 2)]
    return [tuple(s) for s in out] if n >= 1 else [()]


def partition_L(a: Sequence[int], n: int | None = None) -> list[LinkPattern]:
    """Patterns whose openings at odd sites are exactly the odd entries of ``a``."""
    n = len(a) if n is None else n
    if len(a) != n:
        raise SequenceNotInFamily("sequence length must equal n")
    _check_An(a)
    odd = {x for x in a if x % 2}
    out = []
    for pi in enumerate_link_patterns(n):
        if all((pi(m) > m) == (m in odd) for m in range(1, 2 * n, 2)):
            out.append(pi)
    return out


@lru_cache(maxsize=None)
def chebyshev_U(k: int) -> ExactPoly:
    """``U_k`` in tau: ``U_{-1}=0, U_0=1, U_{k+1} = -tau U_k - U_{k-1}``."""
    if k < 0:
        return ZERO
    tau = var("tau")
    prev, cur = ZERO, ONE
    for _ in range(k):
        prev, cur = cur, -tau * cur - prev
    return cur


def basis_coefficient(a: Sequence[int], pi: LinkPattern, n: int | None = None) -> ExactPoly:
    """Coefficient of ``Psi_pi`` in ``Psi_{a_1..a_n}`` (closed product formula)."""
    out = ONE
    for i, j in pi.arches():
        k = sum(1 for x in a if i <= x < j) - (j - i + 1) // 2
        if k < 0:
            return ZERO
        out = out * chebyshev_U(k)
    return out


def basis_coefficient_recursive(a: Sequence[int], pi: LinkPattern) -> ExactPoly:
    """Same coefficient by repeatedly removing the leftmost little arch.

    Removing ``(i, i+1)`` with ``k`` entries of ``a`` equal to ``i`` gives
    ``U_{k-1}`` times the coefficient for the sequence where one copy of
    ``i`` is dropped, the other ``k-1`` become ``i-1`` and entries above
    ``i`` drop by 2.
    """
    a = sorted(a)
    if pi.n == 0:
        return ONE
    i = next(i for i in range(1, 2 * pi.n) if pi(i) == i + 1)
    k = a.count(i)
    if k == 0:
        return ZERO
    rest = [x for x in a if x < i] + [i - 1] * (k - 1) + [x - 2 for x in a if x > i]
    return chebyshev_U(k - 1) * basis_coefficient_recursive(rest, pi.remove_arch(i))
