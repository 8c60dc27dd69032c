"""Ground state components of the loop model.

Prints the homogeneous components for small sizes, the symbolic vector
for n = 2 and a couple of sanity checks.  Run with
``python3 demos/qkz_components.py``.
"""
from __future__ import annotations

from qkzlab import qkz

for n in (2, 3):
    vec = qkz.solve_components(n)
    print(f"n={n}, homogeneous components in tau:")
    for pattern, value in vec.entries.items():
        print(f"  {pattern:<24} {value}")
    print(f"  sum: {vec.total()}\n")

sym = qkz.solve_components(2, "symbolic")
print("n=2, full spectral parameter dependence:")
for pattern, value in sym.entries.items():
    print(f"  {pattern:<12} {value}")

records = qkz.qkz_residual_records(2)
print(f"\nexchange and cyclic residuals at n=2: {sum(1 for _, r in records if r == 0)}/{len(records)} vanish")
