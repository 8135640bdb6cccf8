"""How many bound states does the inner Dirichlet bracket guarantee?

Each Bessel zero x below (sqrt(3)/2) pi a/d gives one level of the
Dirichlet-closed window below the continuum, hence one eigenvalue.

Run: python demos/zeros_and_counts.py
"""

import math

from discwindow import (
    WaveguideGeometry,
    count_bound_states_upper,
    dirichlet_bracket_levels,
    figure_counts,
    threshold_report,
    zeros_below,
)

print("smallest zeros across all orders")
for z in zeros_below(8.0):
    print(f"  x_{z.order},{z.index} = {z.value:.12f}")

g = WaveguideGeometry(d=1.0, a=3.0)
print(f"\nlevels below pi^2 for a/d = {g.ratio:g}")
for lv in dirichlet_bracket_levels(g):
    print(f"  n={lv.zero.order} l={lv.zero.index}  lambda = {lv.value:.6f}")
print("guaranteed count:", count_bound_states_upper(g))
print("counting both angular signs:", count_bound_states_upper(g, "degenerate"))

print("\nstep function of the count against a/d")
previous = None
for ratio, count in figure_counts([k / 100 for k in range(10, 401)]):
    if count != previous:
        print(f"  count becomes {count} at a/d = {ratio:.2f}")
        previous = count

rep = threshold_report()
print("\nlargest (a/d)^2 with a unique guaranteed state")
print(f"  from the second zero:        {rep.derived:.6f}")
print(f"  leading asymptotic of zeros: {rep.leading_asymptotic:.6f}")
print(f"  published value:             {rep.published:.4f}  ({rep.relative_discrepancy:.1%} off)")

lam = 30.0
print(f"\nzeros below {lam:g}: {len(zeros_below(lam))}, estimate lambda^2/pi^2 = {lam**2 / math.pi**2:.1f}")
