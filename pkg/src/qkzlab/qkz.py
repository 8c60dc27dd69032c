"""Polynomial solution of the level-1 qKZ equation and its identities.

Two regimes are supported:

* symbolic: components are Laurent polynomials in ``z1..z2n`` and ``q``;
  sequence components come from the exact residue sum, link-pattern
  components from the triangular change of basis.
* homogeneous: ``z_i = 1`` and components are divided by the base
  component; everything is a polynomial in ``tau = -q - 1/q`` obtained by
  coefficient extraction.

The ``*_residual`` functions return ``left - right`` of an identity as an
exact polynomial; zero means the identity holds.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .exactalg import (
    ONE,
    ZERO,
    ExactPoly,
    antisymmetrize,
    keep_nonpositive,
    nonpositive_filter,
    box_filter,
    parse_poly,
    var,
)
from .extract import (
    DenseBox,
    SeriesProduct,
    coefficient_of,
    denominator,
    expand_truncated,
    numerator,
)
from .linkpat import (
    LinkPattern,
    SequenceNotInFamily,
    basis_coefficient,
    catalan_sequences,
    chebyshev_U,
    enumerate_link_patterns,
    format_sequence,
    parse_sequence,
    partition_L,
    sequences_An,
    tl_apply,
)
from .residues import ResidueIntegral, residue_sum
from .tsscpp import nprime_specialized

__all__ = [
    "QkzVector",
    "RMatrixSpec",
    "SingularChangeOfBasis",
    "DegreeMismatch",
    "NotInTauSubring",
    "ResourceBoundExceeded",
    "BOUNDS",
    "tau_to_q",
    "q_to_tau",
    "base_component",
    "psi_seq_symbolic",
    "psi_seq_homogeneous",
    "solve_components",
    "wheel_residual",
    "recurrence_residual",
    "pattern_recurrence_residual",
    "evaluate_at_pattern",
    "evaluation_exponent",
    "expected_evaluation",
    "recurrence_normalization",
    "qkz_residuals",
    "qkz_residual_records",
    "arched_exchange_residual",
    "cyclic_residual",
    "partial_sum_residual",
    "SumRules",
    "refined_from_sequences",
    "sequence_components",
    "spin_components",
    "damnint_middle_residual",
    "integident_rhs",
    "x_dependent_part",
    "sum_rules",
    "conjecture_residual",
    "spin_component",
    "spin_pattern_weight",
    "spin_expansion_terms",
    "identity_damnint_residual",
    "identity_integident_residual",
    "integident_lhs",
]

# default resource bounds; callers may pass larger values explicitly
BOUNDS = {"symbolic": 3, "homogeneous": 8, "damnint": 5, "integident": 4}


class SingularChangeOfBasis(ArithmeticError):
    pass


class DegreeMismatch(ValueError):
    pass


class NotInTauSubring(ValueError):
    pass


class ResourceBoundExceeded(ValueError):
    def __init__(self, what: str, n: int, bound: int):
        super().__init__(f"{what}: n={n} exceeds the bound {bound}")
        self.what, self.n, self.bound = what, n, bound


def _check_bound(what: str, n: int, bound: int | None, default_key: str) -> None:
    limit = BOUNDS[default_key] if bound is None else bound
    if n > limit:
        raise ResourceBoundExceeded(what, n, limit)


q = var("q")
qi = q ** -1
tau = var("tau")


def z(i: int) -> ExactPoly:
    return var(f"z{i}")


def z_names(N: int) -> list[str]:
    return [f"z{i}" for i in range(1, N + 1)]


def u_names(n: int) -> list[str]:
    return [f"u{i}" for i in range(1, n + 1)]


# -- tau <-> q ---------------------------------------------------------------


def tau_to_q(p: ExactPoly) -> ExactPoly:
    """Substitute ``tau = -q - q^-1``."""
    return p.substitute("tau", -q - qi)


def q_to_tau(p: ExactPoly) -> ExactPoly:
    """Inverse of :func:`tau_to_q`; raises NotInTauSubring if impossible."""
    rest = p
    out = ZERO
    while rest:
        rest_q = rest.split_by("q")
        d = max(rest_q)
        if d < 0:
            raise NotInTauSubring(f"{p} is not a polynomial in q + 1/q")
        lead = rest_q[d]
        # (-tau)^d = (q + 1/q)^d = q^d + ...
        term = lead * (-tau) ** d
        out = out + term
        rest = rest - tau_to_q(term)
    return out


# -- components ---------------------------------------------------------------


def base_component(n: int) -> ExactPoly:
    """``prod_{i<j<=n} (q z_i - z_j/q) * prod_{n<i<j<=2n} (q z_i - z_j/q)``."""
    out = ONE
    for lo, hi in ((1, n), (n + 1, 2 * n)):
        for i in range(lo, hi + 1):
            for j in range(i + 1, hi + 1):
                out = out * (q * z(i) - qi * z(j))
    return out


def _psi_integral(a: Sequence[int], N: int) -> ResidueIntegral:
    pre = [q * z(i) - qi * z(j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
    return ResidueIntegral(
        N,
        pre,
        caught=[list(range(1, x + 1)) for x in a],
        uncaught=[list(range(x + 1, N + 1)) for x in a],
        pair=lambda wl, wm: [wm - wl, q * wl - qi * wm],
    )


def _check_sequence(a: Sequence[int], N: int) -> None:
    if any(x > y for x, y in zip(a, a[1:])):
        raise ValueError(f"{format_sequence(a)} is not non-decreasing")
    if any(x > N - 1 for x in a):
        raise ValueError(f"{format_sequence(a)} has entries above {N - 1}")


@lru_cache(maxsize=None)
def _psi_symbolic_cached(a: tuple[int, ...], n: int) -> ExactPoly:
    N = 2 * n
    if any(x < l for l, x in enumerate(a, start=1)):
        return ZERO
    return residue_sum(_psi_integral(a, N))


def psi_seq_symbolic(a: Sequence[int], n: int | None = None) -> ExactPoly:
    """``Psi_{a_1..a_n}(z_1..z_2n; q)`` from the residue sum."""
    a = tuple(a)
    n = len(a) if n is None else n
    if len(a) != n:
        raise ValueError("sequence length must be n")
    _check_sequence(a, 2 * n)
    return _psi_symbolic_cached(a, n)


def _pair_factors(names: Sequence[str]) -> list[ExactPoly]:
    u = [var(x) for x in names]
    out = []
    for l in range(len(u)):
        for m in range(l + 1, len(u)):
            out.append((u[m] - u[l]) * (1 + u[l] * u[m] + tau * u[m]))
    return out


@lru_cache(maxsize=None)
def _homogeneous_box(n: int, bounds: tuple[int, ...]) -> DenseBox:
    names = u_names(n)
    box = DenseBox(names + ["tau"], list(bounds) + [n * (n - 1) // 2])
    for f in _pair_factors(names):
        box.multiply(f)
    return box


def _staircase(n: int) -> tuple[int, ...]:
    # both sequence families satisfy a_l <= 2l - 1
    return tuple(2 * l - 2 for l in range(1, n + 1))


def psi_seq_homogeneous(a: Sequence[int], n: int | None = None, engine: str = "dense") -> ExactPoly:
    """``Psi_a / Psi_pi0`` at ``z_i = 1`` as a polynomial in ``tau``.

    ``engine="dense"`` reads the coefficient from a cached box holding all
    coefficients of the integrand; ``engine="sparse"`` runs
    :func:`coefficient_of` on this single target.
    """
    a = tuple(a)
    n = len(a) if n is None else n
    if len(a) != n:
        raise ValueError("sequence length must be n")
    _check_sequence(a, 2 * n)
    exps = [x - 1 for x in a]
    if any(e < 0 for e in exps):
        return ZERO
    names = u_names(n)
    bounds = _staircase(n)
    if engine == "sparse" or any(e > b for e, b in zip(exps, bounds)):
        sp = SeriesProduct([numerator(f) for f in _pair_factors(names)], names)
        return coefficient_of(sp, exps)
    box = _homogeneous_box(n, bounds)
    return box.coefficient(dict(zip(names, exps)), free=["tau"])


@dataclass
class QkzVector:
    """Components of a qKZ vector in one basis.

    ``entries`` maps the text form of a basis element (pattern
    ``(1,4)(2,3)`` or sequence ``(1,3)``) to its component.
    """

    n: int
    basis: str
    mode: str
    entries: dict[str, ExactPoly] = field(default_factory=dict)

    def __getitem__(self, key) -> ExactPoly:
        if isinstance(key, LinkPattern):
            key = str(key)
        elif not isinstance(key, str):
            key = format_sequence(key)
        return self.entries[key]

    def total(self) -> ExactPoly:
        return sum(self.entries.values(), ZERO)

    def to_json(self, indent: int | None = None) -> str:
        payload = {
            "n": self.n,
            "basis": self.basis,
            "mode": self.mode,
            "entries": {k: str(v) for k, v in self.entries.items()},
        }
        return json.dumps(payload, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "QkzVector":
        d = json.loads(text)
        return cls(d["n"], d["basis"], d.get("mode", ""), {k: parse_poly(v) for k, v in d["entries"].items()})


def _psi_seq(a, n, mode):
    return psi_seq_symbolic(a, n) if mode == "symbolic" else psi_seq_homogeneous(a, n)


def _coefficient(a, pi, mode) -> ExactPoly:
    c = basis_coefficient(a, pi)
    return tau_to_q(c) if mode == "symbolic" else c


@lru_cache(maxsize=None)
def _solve_cached(n: int, mode: str) -> QkzVector:
    seqs = catalan_sequences(n)
    pats = [LinkPattern.from_openings(a, n) for a in seqs]
    rows = []
    for x, a in enumerate(seqs):
        row = {}
        for y, pi in enumerate(pats):
            c = _coefficient(a, pi, mode)
            if c:
                row[y] = c
        rows.append(row)
    # unit diagonal and lower triangular in lexicographic order
    for x, row in enumerate(rows):
        if row.get(x) != 1 or any(y > x for y in row):
            raise SingularChangeOfBasis(
                f"change of basis at n={n} is not unitriangular at {format_sequence(seqs[x])}"
            )
    comps: list[ExactPoly] = []
    for x, a in enumerate(seqs):
        value = _psi_seq(a, n, mode)
        for y, c in rows[x].items():
            if y < x:
                value = value - c * comps[y]
        comps.append(value)
    vec = QkzVector(n, "link_pattern", mode, {str(p): c for p, c in zip(pats, comps)})
    for a in sequences_An(n):
        if partial_sum_residual(a, mode, vector=vec):
            raise SingularChangeOfBasis(f"partial sum for {format_sequence(a)} fails at n={n}")
    return vec


def solve_components(n: int, mode: str = "homogeneous", bound: int | None = None) -> QkzVector:
    """Link-pattern components ``Psi_pi`` (homogeneous: ``Psi_pi / Psi_pi0``)."""
    if mode not in ("symbolic", "homogeneous"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_bound(f"{mode} components", n, bound, mode)
    return _solve_cached(n, mode)


def sequence_components(n: int, mode: str = "homogeneous", family: str = "An", bound: int | None = None) -> QkzVector:
    """Sequence-basis components for the family ``An`` or ``catalan``."""
    _check_bound(f"{mode} components", n, bound, mode)
    seqs = sequences_An(n) if family == "An" else catalan_sequences(n)
    return QkzVector(n, "sequence", mode, {format_sequence(a): _psi_seq(a, n, mode) for a in seqs})


def spin_components(n: int, mode: str = "homogeneous", bound: int | None = None) -> QkzVector:
    _check_bound(f"{mode} components", n, bound, mode)
    entries = {}
    for a in itertools.combinations(range(1, 2 * n + 1), n):
        entries[format_sequence(a)] = spin_component(a, n, mode)
    return QkzVector(n, "spin", mode, entries)


# -- symbolic checks ----------------------------------------------------------


def wheel_residual(p: ExactPoly, n: int, triple: tuple[int, int, int]) -> ExactPoly:
    """``p`` at ``z_i = z, z_j = q^2 z, z_k = q^4 z`` for ``i < j < k``."""
    i, j, k = triple
    if not i < j < k <= 2 * n:
        raise ValueError(f"need i < j < k <= {2 * n}, got {triple}")
    zz = var("z")
    return p.substitute_many({f"z{i}": zz, f"z{j}": q ** 2 * zz, f"z{k}": q ** 4 * zz})


def _recurrence_prefactor(i: int, N: int) -> ExactPoly:
    out = ONE
    for j in range(1, i):
        out = out * (z(i) - q ** 2 * z(j))
    for j in range(i + 2, N + 1):
        out = out * (q ** 2 * z(i) - q ** -2 * z(j))
    return out


def _reindex_after_removal(p: ExactPoly, i: int, N_small: int) -> ExactPoly:
    """Rename ``z_1..z_{N-2}`` to ``z_1..z_{i-1}, z_{i+2}..z_N``."""
    return p.rename({f"z{j}": f"z{j + 2}" for j in range(i, N_small + 1)})


def recurrence_normalization(n: int, i: int) -> ExactPoly:
    """Factor ``(-1)^(n-1) q^(n-i)`` relating the recurrence to the base normalization.

    With ``Psi_pi0`` equal to the product formula of :func:`base_component`,
    specializing ``z_{i+1} = q^2 z_i`` produces the usual prefactor times
    the smaller component times this factor.  At ``i = n`` on the base
    component it is the sign ``(-1)^(n-1)`` coming from
    ``q z_j - z_n/q = -(z_n - q^2 z_j)/q``.
    """
    return (-1) ** (n - 1) * q ** (n - i)


def recurrence_residual(a: Sequence[int], i: int, printed: bool = False) -> ExactPoly:
    """Residual of the recurrence at ``z_{i+1} = q^2 z_i`` for non-decreasing ``a``.

    When ``i`` occurs ``k >= 1`` times in ``a`` the right side is the usual
    prefactor times ``U_{k-1}(q)`` times the smaller component where one
    copy of ``i`` is removed, the others become ``i-1`` and larger entries
    drop by 2; otherwise the right side is 0.  ``printed=True`` leaves out
    :func:`recurrence_normalization`, which makes the residual nonzero.
    """
    a = tuple(a)
    n = len(a)
    N = 2 * n
    if not 1 <= i <= N - 1:
        raise ValueError(f"site {i} out of range")
    lhs = psi_seq_symbolic(a, n).substitute(f"z{i + 1}", q ** 2 * z(i))
    k = a.count(i)
    if k == 0:
        return lhs
    smaller = tuple([x for x in a if x < i] + [i - 1] * (k - 1) + [x - 2 for x in a if x > i])
    # the smaller sequence may end in 2n-2, past the usual range; the
    # residue sum is still defined there
    inner = _psi_symbolic_cached(smaller, n - 1) if n > 1 else ONE
    rhs = _recurrence_prefactor(i, N) * tau_to_q(chebyshev_U(k - 1)) * _reindex_after_removal(inner, i, N - 2)
    if not printed:
        rhs = recurrence_normalization(n, i) * rhs
    return lhs - rhs


def pattern_recurrence_residual(pi: LinkPattern, i: int, printed: bool = False) -> ExactPoly:
    """Same recurrence for a link-pattern component ``Psi_pi``."""
    n = pi.n
    N = 2 * n
    vec = solve_components(n, "symbolic", bound=max(n, BOUNDS["symbolic"]))
    lhs = vec[pi].substitute(f"z{i + 1}", q ** 2 * z(i))
    if pi(i) != i + 1:
        return lhs
    smaller = pi.remove_arch(i)
    inner = solve_components(n - 1, "symbolic", bound=max(n, BOUNDS["symbolic"]))[smaller] if n > 1 else ONE
    rhs = _recurrence_prefactor(i, N) * _reindex_after_removal(inner, i, N - 2)
    if not printed:
        rhs = recurrence_normalization(n, i) * rhs
    return lhs - rhs


def evaluate_at_pattern(p: ExactPoly, pi: LinkPattern, n: int | None = None) -> ExactPoly:
    """``p`` at ``z_i = q^(-epsilon_i(pi))``."""
    n = pi.n if n is None else n
    names = z_names(2 * n)
    if p and not p.is_homogeneous(names, n * (n - 1)):
        raise DegreeMismatch(f"expected z-degree {n * (n - 1)}, got {sorted(p.total_degrees(names))}")
    return p.substitute_many({f"z{i}": q ** (-e) for i, e in enumerate(pi.epsilon(), start=1)})


def evaluation_exponent(pi: LinkPattern) -> int:
    """Power of tau in the value of ``Psi_pi`` at its own point: half the depth.

    ``depth = n^2 + sum i eps_i`` is always even; half of it counts the boxes
    between ``pi`` and the base pattern.
    """
    return pi.depth() // 2


def expected_evaluation(pi: LinkPattern, exponent: int | None = None) -> ExactPoly:
    """``C tau^e`` with ``C = (q - 1/q)^(n(n-1))``, ``e`` from :func:`evaluation_exponent`."""
    n = pi.n
    e = evaluation_exponent(pi) if exponent is None else exponent
    return (q - qi) ** (n * (n - 1)) * tau_to_q(tau ** e)


@dataclass(frozen=True)
class RMatrixSpec:
    """``R_{i,i+1}(z, w) = [(q z - w/q) Id + (z - w) e_i] / (q w - z/q)``.

    Loops closed by ``e_i`` weigh ``-q - 1/q``.  :meth:`apply_scaled`
    returns the image multiplied by the denominator so that everything
    stays polynomial.
    """

    i: int
    z: ExactPoly
    w: ExactPoly

    def denominator(self) -> ExactPoly:
        return q * self.w - qi * self.z

    def apply_scaled(self, vec: QkzVector) -> dict[str, ExactPoly]:
        loop = -q - qi
        pats = [LinkPattern.parse(k) for k in vec.entries]
        out = {str(p): (q * self.z - qi * self.w) * vec[p] for p in pats}
        for r in pats:
            image, loops = tl_apply(self.i, r)
            key = str(image)
            out[key] = out[key] + (self.z - self.w) * loop ** loops * vec[r]
        return out


def _exchange_residual(vec: QkzVector, i: int, image: dict[str, ExactPoly], p: LinkPattern) -> ExactPoly:
    """Component ``p`` of ``(q z_i - z_{i+1}/q) (R(z_{i+1}, z_i) Psi - tau_i Psi)``."""
    swap = {f"z{i}": z(i + 1), f"z{i + 1}": z(i)}
    return image[str(p)] - (q * z(i) - qi * z(i + 1)) * vec[p].substitute_many(swap)


def arched_exchange_residual(vec: QkzVector, i: int, p: LinkPattern) -> ExactPoly:
    """Divided-difference form, valid for ``p`` with the little arch ``(i, i+1)``:
    ``(q z_i - z_{i+1}/q)(tau_i - 1) Psi_p = (z_{i+1} - z_i) sum_{r != p, e_i r = p} Psi_r``.
    """
    if p(i) != i + 1:
        raise ValueError(f"{p} has no little arch at ({i},{i + 1})")
    swap = {f"z{i}": z(i + 1), f"z{i + 1}": z(i)}
    pats = enumerate_link_patterns(p.n)
    acc = sum((vec[r] for r in pats if r != p and tl_apply(i, r)[0] == p), ZERO)
    lhs = (q * z(i) - qi * z(i + 1)) * (vec[p].substitute_many(swap) - vec[p])
    return lhs - (z(i + 1) - z(i)) * acc


def cyclic_residual(vec: QkzVector, p: LinkPattern) -> ExactPoly:
    """``Psi_{sigma p}(z_2, .., z_2n, q^6 z_1) - q^(3(n-1)) Psi_p``, sigma moving labels down by one."""
    n = p.n
    N = 2 * n
    shift = {f"z{j}": z(j + 1) for j in range(1, N)}
    shift[f"z{N}"] = q ** 6 * z(1)
    return vec[p.rotate(-1)].substitute_many(shift) - q ** (3 * (n - 1)) * vec[p]


def qkz_residual_records(n: int, bound: int | None = None) -> list[tuple[str, ExactPoly]]:
    """Labelled residuals of the exchange and cyclic relations."""
    _check_bound("qKZ residuals", n, bound, "symbolic")
    vec = solve_components(n, "symbolic", bound=bound)
    pats = enumerate_link_patterns(n)
    out = []
    for i in range(1, 2 * n):
        image = RMatrixSpec(i, z(i + 1), z(i)).apply_scaled(vec)
        for p in pats:
            out.append((f"exchange i={i} pi={p}", _exchange_residual(vec, i, image, p)))
            if p(i) == i + 1:
                out.append((f"exchange-arched i={i} pi={p}", arched_exchange_residual(vec, i, p)))
    for p in pats:
        out.append((f"cyclic pi={p}", cyclic_residual(vec, p)))
    return out


def qkz_residuals(n: int, bound: int | None = None) -> list[ExactPoly]:
    return [r for _, r in qkz_residual_records(n, bound)]


def partial_sum_residual(a: Sequence[int], mode: str = "homogeneous", vector: QkzVector | None = None) -> ExactPoly:
    """``Psi_a - sum_{pi in L(a)} Psi_pi`` for ``a`` in the family A_n."""
    a = tuple(a)
    n = len(a)
    members = partition_L(a, n)
    if vector is None:
        vector = solve_components(n, mode, bound=max(n, BOUNDS[mode]))
    return _psi_seq(a, n, mode) - sum((vector[p] for p in members), ZERO)


# -- sum rules and the refined conjecture ------------------------------------


@dataclass(frozen=True)
class SumRules:
    sum: ExactPoly
    refined: ExactPoly

    def consistency(self, n: int) -> dict[str, ExactPoly]:
        """Residuals of the specializations: t=1 gives the full sum, t=0 the
        largest component ``Psi_{1,3,..,2n-1}``, and the series over the
        sequence family reproduces the extraction."""
        largest = psi_seq_homogeneous(tuple(range(1, 2 * n, 2)), n)
        return {
            "t=1": self.refined.substitute("t", 1) - self.sum,
            "t=0": self.refined.substitute("t", 0) - largest,
            "series": self.refined - refined_from_sequences(n),
        }


def _weighted_extraction(n: int, weight: ExactPoly, engine: str = "sparse") -> ExactPoly:
    names = u_names(n)
    u = [var(x) for x in names]
    exps = [2 * l for l in range(n)]
    factors = [numerator(f) for f in _pair_factors(names)]
    factors += [numerator(1 + weight * ul) for ul in u]
    return coefficient_of(SeriesProduct(factors, names), exps)


@lru_cache(maxsize=None)
def sum_rules(n: int) -> SumRules:
    """Sum of all components and the ``t``-refined sum, by extraction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = _weighted_extraction(n, ONE)
    refined = _weighted_extraction(n, var("t"))
    return SumRules(total, refined)


def refined_from_sequences(n: int) -> ExactPoly:
    """``sum_{a in A_n} t^(sum(2l-1-a_l)) Psi_a``."""
    t = var("t")
    out = ZERO
    for a in sequences_An(n):
        power = sum(2 * l - 1 - x for l, x in enumerate(a, start=1))
        out = out + t ** power * psi_seq_homogeneous(a, n)
    return out


def conjecture_residual(n: int) -> ExactPoly:
    """``N'_10(2n|t,tau) - hat N'_10(2n|t,tau)``."""
    return nprime_specialized(n) - sum_rules(n).refined


# -- spin basis ----------------------------------------------------------------


def _spin_integral(a: Sequence[int], N: int) -> ResidueIntegral:
    n = len(a)
    pre = [q - qi] * n + [q * z(i) - qi * z(j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
    return ResidueIntegral(
        N,
        pre,
        caught=[list(range(1, x + 1)) for x in a],
        uncaught=[list(range(x, N + 1)) for x in a],
        pair=lambda wl, wm: [wm - wl, q * wl - qi * wm],
        single=lambda l, wl: [wl],
    )


def spin_component(a: Sequence[int], n: int | None = None, mode: str = "homogeneous", route: str = "sum") -> ExactPoly:
    """Spin-basis component with ``+`` at the positions ``a``.

    ``route="sum"`` combines sequence components with weights
    ``(-q)^(-sum eps)``; ``route="integral"`` evaluates the spin integral
    directly (residue sum when symbolic, extraction when homogeneous).
    """
    a = tuple(a)
    n = len(a) if n is None else n
    if any(x >= y for x, y in zip(a, a[1:])) or any(not 1 <= x <= 2 * n for x in a):
        raise ValueError(f"{format_sequence(a)} is not a set of spin positions")
    if route == "sum":
        out = ZERO
        for eps in itertools.product((0, 1), repeat=n):
            b = tuple(x - e for x, e in zip(a, eps))
            if any(x < 1 for x in b) or any(x > 2 * n - 1 for x in b):
                continue
            out = out + (-qi) ** sum(eps) * _psi_seq(b, n, mode)
        return out
    if route != "integral":
        raise ValueError(f"unknown route {route!r}")
    if mode == "symbolic":
        return residue_sum(_spin_integral(a, 2 * n))
    names = u_names(n)
    u = [var(x) for x in names]
    factors = [numerator(f) for f in _pair_factors(names)] + [numerator(1 - qi * ul) for ul in u]
    exps = [x - 1 for x in a]
    return coefficient_of(SeriesProduct(factors, names), exps)


def spin_pattern_weight(a: Sequence[int], pi: LinkPattern) -> ExactPoly:
    """Local rule: an arch weighs 1 for (+,-), ``-1/q`` for (-,+), else 0."""
    plus = set(a)
    out = ONE
    for i, j in pi.arches():
        si, sj = i in plus, j in plus
        if si and not sj:
            continue
        if sj and not si:
            out = out * (-qi)
        else:
            return ZERO
    return out


def spin_expansion_terms(a: Sequence[int], pi: LinkPattern) -> list[tuple[tuple[int, ...], ExactPoly]]:
    """Terms ``(-q)^(-sum eps) c(a - eps, pi)`` of the spin-to-pattern coefficient."""
    out = []
    for eps in itertools.product((0, 1), repeat=len(a)):
        b = tuple(x - e for x, e in zip(a, eps))
        c = tau_to_q(basis_coefficient(b, pi)) if all(x >= 1 for x in b) else ZERO
        out.append((eps, (-qi) ** sum(eps) * c))
    return out


# -- identities ---------------------------------------------------------------


def identity_damnint_residual(n: int, bound: int | None = None, literal: bool = False) -> ExactPoly:
    """Residual of the antisymmetrized non-positive-part identity.

    The default evaluation uses that the product ``prod (1 - u_l u_m)`` is
    symmetric, so it can be moved inside the antisymmetrization and the
    truncation to non-positive powers applied during the expansion.
    ``literal=True`` follows the formula as written (slow beyond n=3).
    """
    _check_bound("damnint identity", n, bound, "damnint")
    names = u_names(n)
    u = [var(x) for x in names]
    sym = [1 - u[l] * u[m] for l in range(n) for m in range(l, n)]
    inner = [1 + u[l] * u[m] + tau * u[m] for l in range(n) for m in range(l + 1, n)]
    lead = ONE
    for l in range(n):
        lead = lead * u[l] ** (-2 * l)
    if literal:
        f = lead
        for g in inner:
            f = f * g
        s = ONE
        for g in sym:
            s = s * g
        lhs = keep_nonpositive(s * antisymmetrize(f, names), names)
    else:
        keep = nonpositive_filter(names)
        acc = lead
        for g in inner + sym:
            acc = acc.mul_truncated(g, keep)
        lhs = antisymmetrize(acc, names)
    ui = [x ** -1 for x in u]
    rhs = ONE
    for l in range(n):
        for m in range(l + 1, n):
            rhs = rhs * (ui[m] - ui[l]) * (tau + ui[l] + ui[m])
    return lhs - rhs


def damnint_middle_residual(n: int) -> ExactPoly:
    """The elementary second equality: AS of ``prod (u^-1 (tau + u^-1))^(l-1)``."""
    names = u_names(n)
    ui = [var(x) ** -1 for x in names]
    f = ONE
    for l in range(n):
        f = f * (ui[l] * (tau + ui[l])) ** l
    rhs = ONE
    for l in range(n):
        for m in range(l + 1, n):
            rhs = rhs * (ui[m] - ui[l]) * (tau + ui[l] + ui[m])
    return antisymmetrize(f, names) - rhs


def _integident_common(n: int) -> list:
    names = u_names(n)
    u = [var(x) for x in names]
    x = var("x")
    factors = [numerator(1 - x * ul ** 2) for ul in u]
    for l in range(n):
        for m in range(l + 1, n):
            factors.append(numerator((1 + tau * u[m] + x * u[l] * u[m]) * (1 - x * u[l] * u[m])))
    return factors


def integident_lhs(n: int, per_permutation: bool = False) -> ExactPoly:
    """Left side of the integral identity with symbolic ``alpha_l``, tau, x.

    The determinant is expanded over permutations; for each permutation the
    product of geometric series ``1/(1 - alpha_l u_sigma(l))`` is expanded to
    the needed order.  By default the common polynomial part is expanded
    once and combined with every permutation; ``per_permutation=True``
    runs a full extraction for each permutation instead.
    """
    from .exactalg import _permutation_sign

    names = u_names(n)
    u = [var(x) for x in names]
    alpha = [var(f"alpha{l}") for l in range(1, n + 1)]
    exps = [2 * l + 1 for l in range(n)]
    common = _integident_common(n)
    total = ZERO
    perms = list(itertools.permutations(range(n)))
    if per_permutation:
        for sigma in perms:
            dens = [denominator(1 - alpha[l] * u[sigma[l]]) for l in range(n)]
            sp = SeriesProduct(common + dens, names)
            total = total + _permutation_sign(sigma) * coefficient_of(sp, exps)
        return total
    poly = expand_truncated(common, names, box_filter(dict(zip(names, exps))))
    for exps_d, c in poly.terms():
        d = [exps_d.get(nm, 0) for nm in names]
        rest = ExactPoly.monomial({k: v for k, v in exps_d.items() if k not in names}, c)
        gaps = [e - dd for e, dd in zip(exps, d)]
        acc = ZERO
        for sigma in perms:
            # alpha_l pairs with u_{sigma(l)}: alpha_l^(gap of u_{sigma(l)})
            term = ONE
            for l in range(n):
                term = term * alpha[l] ** gaps[sigma[l]]
            acc = acc + _permutation_sign(sigma) * term
        total = total + rest * acc
    return total


def integident_rhs(n: int) -> ExactPoly:
    alpha = [var(f"alpha{l}") for l in range(1, n + 1)]
    out = ONE
    for a in alpha:
        out = out * a
    for l in range(n):
        for m in range(l + 1, n):
            out = out * (alpha[m] - alpha[l]) * (tau + alpha[l] + alpha[m])
    return out


def identity_integident_residual(n: int, bound: int | None = None) -> ExactPoly:
    _check_bound("integral identity", n, bound, "integident")
    return integident_lhs(n) - integident_rhs(n)


def x_dependent_part(p: ExactPoly) -> ExactPoly:
    """Terms of ``p`` with a positive power of ``x``."""
    return sum((c for e, c in p.split_by("x").items() if e != 0), ZERO)
