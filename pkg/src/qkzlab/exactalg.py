"""Sparse multivariate Laurent polynomials with integer coefficients.

Every quantity in the package (generating polynomials, qKZ components,
residuals of identities) is an :class:`ExactPoly`.  Arithmetic is exact and
the internal representation is canonical, so equality is a dictionary
comparison.

Monomials are stored as packed integers: the exponent of the variable with
registry slot ``s`` occupies a signed ``_WIDTH``-bit field at offset
``_WIDTH * s``.  Because the encoding is linear, multiplying monomials is
integer addition of keys.
"""
from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "ExactPoly",
    "PolyMatrix",
    "NonUnitSubstitutionIntoLaurent",
    "NotSquare",
    "InexactDivision",
    "var",
    "const",
    "variables",
    "antisymmetrize",
    "keep_nonpositive",
    "determinant",
    "parse_poly",
]

_WIDTH = 20
_HALF = 1 << (_WIDTH - 1)
_MASK = (1 << _WIDTH) - 1


class NonUnitSubstitutionIntoLaurent(ValueError):
    """A variable with negative exponents was replaced by a non-unit."""


class NotSquare(ValueError):
    pass


class InexactDivision(ArithmeticError):
    """Raised when an exact division leaves a remainder."""


# -- variable registry -------------------------------------------------------

_SLOT: dict[str, int] = {}
_NAMES: list[str] = []
_LOW_OFFSET: list[int] = []  # sum of _HALF over all lower fields, per slot

_ORDER = [
    ("q", re.compile(r"q$")),
    ("t", re.compile(r"t$")),
    ("t_k", re.compile(r"t(\d+)$")),
    ("tau", re.compile(r"tau$")),
    ("z_i", re.compile(r"z(\d+)$")),
    ("u_l", re.compile(r"u(\d+)$")),
    ("alpha_l", re.compile(r"alpha(\d+)$")),
    ("x", re.compile(r"x$")),
    ("w_l", re.compile(r"w(\d+)$")),
]


def _rank(name: str) -> tuple:
    for pos, (_, pattern) in enumerate(_ORDER):
        m = pattern.match(name)
        if m:
            return (pos, int(m.group(1)) if m.groups() else 0, name)
    return (len(_ORDER), 0, name)


def _slot(name: str) -> int:
    s = _SLOT.get(name)
    if s is None:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ValueError(f"invalid variable name {name!r}")
        s = len(_NAMES)
        _SLOT[name] = s
        _NAMES.append(name)
        _LOW_OFFSET.append(sum(_HALF << (_WIDTH * r) for r in range(s)))
    return s


def _field(key: int, s: int) -> int:
    """Exponent stored in slot ``s`` of a packed monomial."""
    y = (key + _LOW_OFFSET[s]) >> (_WIDTH * s)
    return ((y + _HALF) & _MASK) - _HALF


def _decode(key: int) -> dict[str, int]:
    out = {}
    s = 0
    while key:
        e = ((key + _HALF) & _MASK) - _HALF
        if e:
            out[_NAMES[s]] = e
        key = (key - e) >> _WIDTH
        s += 1
    return out


def _encode(exps: Mapping[str, int]) -> int:
    key = 0
    for name, e in exps.items():
        if e:
            if not -_HALF < e < _HALF:
                raise OverflowError(f"exponent {e} out of range")
            key += e << (_WIDTH * _slot(name))
    return key


def _unit(name: str) -> int:
    return 1 << (_WIDTH * _slot(name))


# -- polynomials -------------------------------------------------------------


class ExactPoly:
    """Immutable sparse Laurent polynomial over the integers.

    ``terms`` maps packed monomial keys to nonzero ``int`` coefficients.  Use
    :func:`var`, :func:`const` or :func:`parse_poly` to build values; the
    arithmetic operators accept plain integers on either side.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        if terms:
            self._terms = {k: c for k, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[int, int]) -> "ExactPoly":
        # caller guarantees there are no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: int = 1) -> "ExactPoly":
        return cls({_encode(exps): coeff})

    @classmethod
    def from_terms(cls, items: Iterable[tuple[Mapping[str, int], int]]) -> "ExactPoly":
        out: dict[int, int] = {}
        for exps, c in items:
            k = _encode(exps)
            out[k] = out.get(k, 0) + c
        return cls(out)

    # -- inspection --

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterator[tuple[dict[str, int], int]]:
        for k, c in self._terms.items():
            yield _decode(k), c

    def variables(self) -> set[str]:
        names: set[str] = set()
        for k in self._terms:
            names.update(_decode(k))
        return names

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._terms.get(0, 0)

    def is_unit_monomial(self) -> bool:
        return len(self._terms) == 1 and next(iter(self._terms.values())) in (1, -1)

    def degree(self, name: str) -> int | None:
        """Largest exponent of ``name``; ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        if name not in _SLOT:
            return 0
        s = _SLOT[name]
        return max(_field(k, s) for k in self._terms)

    def min_degree(self, name: str) -> int | None:
        if not self._terms:
            return None
        if name not in _SLOT:
            return 0
        s = _SLOT[name]
        return min(_field(k, s) for k in self._terms)

    def total_degrees(self, names: Iterable[str]) -> set[int]:
        """Set of total degrees in ``names`` over all terms."""
        slots = [_SLOT[n] for n in names if n in _SLOT]
        return {sum(_field(k, s) for s in slots) for k in self._terms}

    def is_homogeneous(self, names: Iterable[str], degree: int | None = None) -> bool:
        degs = self.total_degrees(list(names))
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def coefficient(self, name: str, k: int) -> "ExactPoly":
        """Coefficient of ``name**k`` as a polynomial free of ``name``."""
        s = _slot(name)
        shift = k << (_WIDTH * s)
        return ExactPoly._raw(
            {key - shift: c for key, c in self._terms.items() if _field(key, s) == k}
        )

    def coefficient_of_monomial(self, exps: Mapping[str, int]) -> "ExactPoly":
        p = self
        for name, k in exps.items():
            p = p.coefficient(name, k)
        return p

    def split_by(self, name: str) -> dict[int, "ExactPoly"]:
        """Map exponent of ``name`` to the (``name``-free) coefficient."""
        s = _slot(name)
        unit = 1 << (_WIDTH * s)
        groups: dict[int, dict[int, int]] = {}
        for key, c in self._terms.items():
            e = _field(key, s)
            groups.setdefault(e, {})[key - e * unit] = c
        return {e: ExactPoly._raw(t) for e, t in groups.items()}

    # -- arithmetic --

    @staticmethod
    def _coerce(other) -> "ExactPoly":
        if isinstance(other, ExactPoly):
            return other
        if isinstance(other, int):
            return ExactPoly._raw({0: other} if other else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) < len(other._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return ExactPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return ExactPoly._raw({})
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            return ExactPoly._raw({k + kb: c * cb for k, c in a.items()})
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return ExactPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if not self.is_unit_monomial():
                raise ValueError("negative power of a non-unit")
            (k, c), = self._terms.items()
            return ExactPoly._raw({-k * (-e): c ** (-e)})
        result = ExactPoly._raw({0: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def mul_truncated(self, other: "ExactPoly", keep) -> "ExactPoly":
        """Product restricted to monomial keys accepted by ``keep(key)``."""
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        ok: dict[int, bool] = {}
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                flag = ok.get(k)
                if flag is None:
                    flag = ok[k] = keep(k)
                if flag:
                    out[k] = get(k, 0) + ca * cb
        return ExactPoly._raw({k: c for k, c in out.items() if c})

    def filter_terms(self, keep) -> "ExactPoly":
        return ExactPoly._raw({k: c for k, c in self._terms.items() if keep(k)})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- substitution --

    def substitute(self, name: str, value) -> "ExactPoly":
        """Replace variable ``name`` by ``value`` (an ExactPoly or int)."""
        value = self._coerce(value)
        if name not in _SLOT or not self:
            return self
        groups = self.split_by(name)
        if min(groups) < 0 and not value.is_unit_monomial():
            raise NonUnitSubstitutionIntoLaurent(
                f"{name} occurs with negative exponent; {value} is not a unit monomial"
            )
        if value.is_unit_monomial():
            (vk, vc), = value._terms.items()
            s = _SLOT[name]
            unit = 1 << (_WIDTH * s)
            out: dict[int, int] = {}
            for key, c in self._terms.items():
                e = _field(key, s)
                k = key - e * unit + e * vk
                v = out.get(k, 0) + c * (vc ** (e % 2) if vc == -1 else 1)
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
            return ExactPoly._raw(out)
        result = ExactPoly()
        powers = {0: ExactPoly._raw({0: 1})}
        for e in sorted(groups):
            if e not in powers:
                powers[e] = value ** e
            result = result + groups[e] * powers[e]
        return result

    def substitute_many(self, values: Mapping[str, object]) -> "ExactPoly":
        """Simultaneous substitution.

        All replacement values must be unit monomials or every replaced
        variable must be absent from the replacement values; otherwise the
        sequential fallback would not be simultaneous.
        """
        vals = {n: self._coerce(v) for n, v in values.items()}
        if all(v.is_unit_monomial() for v in vals.values()):
            slots = [(_SLOT[n], v) for n, v in vals.items() if n in _SLOT]
            out: dict[int, int] = {}
            for key, c in self._terms.items():
                k = key
                for s, v in slots:
                    e = _field(key, s)
                    if e:
                        (vk, vc), = v._terms.items()
                        k += e * (vk - (1 << (_WIDTH * s)))
                        if vc == -1 and e % 2:
                            c = -c
                v = out.get(k, 0) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
            return ExactPoly._raw(out)
        used = set().union(*(v.variables() for v in vals.values()))
        if used & set(vals):
            raise ValueError("non-monomial simultaneous substitution with overlapping variables")
        p = self
        for n, v in vals.items():
            p = p.substitute(n, v)
        return p

    def rename(self, mapping: Mapping[str, str]) -> "ExactPoly":
        return self.substitute_many({a: var(b) for a, b in mapping.items()})

    # -- division --

    def divide_exact(self, divisor: "ExactPoly") -> "ExactPoly":
        """Exact quotient by a unit monomial or a binomial.

        A binomial ``c1*m1 + c2*m2`` with ``c2/c1 = -lam`` is written as
        ``c1*m1*(1 - lam*m)``; the quotient by ``1 - lam*m`` is built by the
        recurrence ``Q = P + lam*m*Q`` along one variable of ``m``.  Raises
        :class:`InexactDivision` on a nonzero remainder.
        """
        divisor = self._coerce(divisor)
        d = divisor._terms
        if len(d) == 1:
            (k, c), = d.items()
            out = {}
            for key, v in self._terms.items():
                qv, r = divmod(v, c)
                if r:
                    raise InexactDivision(f"{self} / {divisor}")
                out[key - k] = qv
            return ExactPoly._raw(out)
        if len(d) != 2:
            raise NotImplementedError("exact division only by monomials and binomials")
        (k1, c1), (k2, c2) = sorted(d.items())
        if c2 % c1:
            k1, c1, k2, c2 = k2, c2, k1, c1
            if c2 % c1:
                raise NotImplementedError("binomial without a unit ratio")
        lam = -(c2 // c1)
        m = k2 - k1
        p = self.divide_exact(ExactPoly._raw({k1: c1}))
        if not p._terms:
            return p
        exps = _decode(m)
        name = min(exps, key=lambda n: (abs(exps[n]), _rank(n)))
        step = exps[name]
        s = _SLOT[name]
        groups: dict[int, dict[int, int]] = {}
        for key, c in p._terms.items():
            groups.setdefault(_field(key, s), {})[key] = c
        lo, hi = min(groups), max(groups)
        order = range(lo, hi + 1) if step > 0 else range(hi, lo - 1, -1)
        limit = hi - step if step > 0 else lo - step
        q_groups: dict[int, dict[int, int]] = {}
        for e in order:
            if (step > 0 and e > limit) or (step < 0 and e < limit):
                break
            cur = dict(groups.get(e, {}))
            prev = q_groups.get(e - step)
            if prev:
                for key, c in prev.items():
                    k = key + m
                    v = cur.get(k, 0) + lam * c
                    if v:
                        cur[k] = v
                    else:
                        cur.pop(k, None)
            if cur:
                q_groups[e] = cur
        quotient: dict[int, int] = {}
        for g in q_groups.values():
            quotient.update(g)
        qp = ExactPoly._raw(quotient)
        check = qp - qp * ExactPoly._raw({m: lam})
        if check != p:
            raise InexactDivision(f"remainder dividing by {divisor}")
        return qp

    # -- rendering --

    def sort_key_fn(self):
        names = sorted(self.variables(), key=_rank)

        def key(k):
            exps = _decode(k)
            vec = [exps.get(n, 0) for n in names]
            return (sum(vec), tuple(-e for e in vec))

        return names, key

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names, key = self.sort_key_fn()
        parts = []
        for k in sorted(self._terms, key=key):
            c = self._terms[k]
            exps = _decode(k)
            factors = []
            for n in names:
                e = exps.get(n, 0)
                if e == 1:
                    factors.append(n)
                elif e:
                    factors.append(f"{n}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"ExactPoly({str(self)!r})"


def var(name: str) -> ExactPoly:
    return ExactPoly._raw({_unit(name): 1})


def const(c: int) -> ExactPoly:
    return ExactPoly._raw({0: c} if c else {})


def variables(*names: str) -> tuple[ExactPoly, ...]:
    return tuple(var(n) for n in names)


ONE = const(1)
ZERO = const(0)


# -- structural operations ---------------------------------------------------


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def antisymmetrize(p: ExactPoly, names: Sequence[str]) -> ExactPoly:
    """Signed sum of ``p`` over all permutations of the listed variables."""
    if len(set(names)) != len(names):
        raise ValueError("variables must be distinct")
    out: dict[int, int] = {}
    for perm in itertools.permutations(range(len(names))):
        sign = _permutation_sign(perm)
        image = p.rename({names[i]: names[perm[i]] for i in range(len(names))})
        for k, c in image._terms.items():
            v = out.get(k, 0) + sign * c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return ExactPoly._raw(out)


def nonpositive_filter(names: Sequence[str]):
    slots = [_slot(n) for n in names]

    def keep(key: int) -> bool:
        for s in slots:
            if _field(key, s) > 0:
                return False
        return True

    return keep


def keep_nonpositive(p: ExactPoly, names: Sequence[str]) -> ExactPoly:
    """Terms of ``p`` whose exponent in every listed variable is at most 0."""
    return p.filter_terms(nonpositive_filter(names))


def box_filter(bounds: Mapping[str, int]):
    """Predicate on packed keys: ``0 <= exponent <= bound`` for each name."""
    slots = [(_slot(n), b) for n, b in bounds.items()]

    def keep(key: int) -> bool:
        for s, b in slots:
            e = _field(key, s)
            if e > b or e < 0:
                return False
        return True

    return keep


def total_degree_filter(names: Sequence[str], order: int):
    slots = [_slot(n) for n in names]

    def keep(key: int) -> bool:
        return sum(_field(key, s) for s in slots) <= order

    return keep


class PolyMatrix:
    """Rectangular matrix of ExactPoly entries."""

    def __init__(self, rows: Sequence[Sequence]):
        rows = [[ExactPoly._coerce(x) for x in row] for row in rows]
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        self.rows = rows

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def determinant(self) -> ExactPoly:
        return determinant(self)


def determinant(m: PolyMatrix | Sequence[Sequence]) -> ExactPoly:
    """Determinant by Laplace expansion along rows, memoized on column sets."""
    if not isinstance(m, PolyMatrix):
        m = PolyMatrix(m)
    nrows, ncols = m.shape
    if nrows != ncols:
        raise NotSquare(f"{nrows}x{ncols} matrix")
    if nrows == 0:
        return const(1)
    rows = m.rows
    memo: dict[int, ExactPoly] = {}

    def minor(row: int, cols: int) -> ExactPoly:
        # determinant of rows[row:] restricted to the column bitmask ``cols``
        if row == nrows:
            return const(1)
        if cols in memo:
            return memo[cols]
        acc = ExactPoly()
        sign = 1
        for j in range(ncols):
            if cols >> j & 1:
                entry = rows[row][j]
                if entry:
                    sub = minor(row + 1, cols & ~(1 << j))
                    if sub:
                        acc = acc + entry * sub if sign > 0 else acc - entry * sub
                sign = -sign
        memo[cols] = acc
        return acc

    return minor(0, (1 << ncols) - 1)


# -- parsing -----------------------------------------------------------------

_FACTOR = r"(?:\d+|[A-Za-z_]\w*(?:\^-?\d+)?)"
_TERM = re.compile(rf"\s*([+-]?)\s*({_FACTOR}(?:\s*\*\s*{_FACTOR})*)\s*")


def parse_poly(text: str) -> ExactPoly:
    """Parse the canonical text form, e.g. ``1 + 3*tau - q^-2*z1``."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    pos = 0
    out = ExactPoly()
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not first and not m.group(1)):
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        coeff = -1 if m.group(1) == "-" else 1
        exps: dict[str, int] = {}
        for factor in re.split(r"\s*\*\s*", m.group(2)):
            if factor.isdigit():
                coeff *= int(factor)
            else:
                name, _, e = factor.partition("^")
                exps[name] = exps.get(name, 0) + (int(e) if e else 1)
        out = out + ExactPoly.monomial(exps, coeff)
        pos = m.end()
        first = False
    return out
