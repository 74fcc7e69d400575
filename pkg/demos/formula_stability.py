"""Which look-ahead formula signatures are actually usable?

Derives coefficients from the order conditions for a range of (order j,
past points s) signatures, reports the parasitic root radius and the
eta*tau stability limit, and plots the characteristic roots of the shipped
formulas against the unit circle.  Signatures whose whole coefficient
family is unstable ((3,3), (4,5), (5,6), ...) are exactly the ones the
tracker refuses and replaces by the best stable lower order.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eigenflow.formulas import derive_formula

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

print(f"{'(j,s)':>8} {'stable':>7} {'parasitic radius':>17} {'eta*tau limit':>14}")
table = []
for s in range(1, 8):
    for j in range(1, s + 1):
        f = derive_formula(j, s)
        table.append(((j, s), f))
        print(f"{str((j, s)):>8} {str(f.stability_ok):>7} "
              f"{f.spurious_radius:17.6f} {f.eta_tau_limit:14.4f}")

fig, axes = plt.subplots(1, 3, figsize=(12, 4.2))
for ax, js in zip(axes, [(2, 4), (3, 5), (4, 6)]):
    f = derive_formula(*js)
    th = np.linspace(0, 2 * np.pi, 200)
    ax.plot(np.cos(th), np.sin(th), "k-", lw=0.6)
    r = f.characteristic_roots()
    ax.plot(r.real, r.imag, "o", ms=7)
    ax.set_aspect("equal")
    ax.set_title(f"formula {js}, radius {f.spurious_radius:.3f}")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "formula_roots.png"), dpi=130)
print("wrote", os.path.join(OUT, "formula_roots.png"))
