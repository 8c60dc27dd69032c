"""Compare the refined sum of loop model components with refined TSSCPP counts.

Run with ``python3 demos/refined_conjecture.py``.
"""
from __future__ import annotations

from qkzlab import qkz
from qkzlab.tsscpp import nprime_specialized

for n in range(1, 6):
    refined = qkz.sum_rules(n).refined
    tsscpp_side = nprime_specialized(n)
    status = "agree" if refined == tsscpp_side else "DIFFER"
    print(f"n={n}: {status}")
    print(f"  refined sum: {refined}")
    if n == 3:
        print(f"  spin component (1,3,5), equal to the refined sum at t=-1/q: {qkz.spin_component((1, 3, 5), 3)}")
