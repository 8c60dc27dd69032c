from __future__ import annotations

from hypothesis import strategies as st

from qkzlab.exactalg import ExactPoly

VARS = ("q", "tau", "u1", "u2")


@st.composite
def polys(draw, names=VARS, low=-2, high=3, max_terms=5, laurent=True):
    lo = low if laurent else 0
    n_terms = draw(st.integers(0, max_terms))
    items = []
    for _ in range(n_terms):
        exps = {v: draw(st.integers(lo, high)) for v in names}
        items.append((exps, draw(st.integers(-5, 5))))
    return ExactPoly.from_terms(items)
