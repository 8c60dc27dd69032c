"""Weighted TSSCPP counts and their ASM specializations.

Run with ``python3 demos/tsscpp_counts.py``.
"""
from __future__ import annotations

from qkzlab.exactalg import var
from qkzlab.tsscpp import WeightSpec, asm_count, asm_refined, gen_poly, nprime_specialized

tau, t = var("tau"), var("t")

print("Generating polynomials with a common weight tau on every slice:")
for n in range(1, 6):
    p = gen_poly(n, WeightSpec.uniform(n, tau=tau))
    print(f"  n={n}: {p}")
    print(f"        at tau=1: {p.substitute('tau', 1)} (ASM count {asm_count(n)})")

print("\nModified configurations, first slice weighted by t:")
for n in range(1, 5):
    p = nprime_specialized(n)
    print(f"  n={n}: {p}")
    print(f"        tau=1 gives {p.substitute('tau', 1)}, refined ASM counts {asm_refined(n)}")
