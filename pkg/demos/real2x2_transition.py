"""A real non-normal flow whose eigencurves turn right angles.

The obscured [[1, t], [t^2, 3]] flow has complex conjugate eigenvalues for
t < -1 that collide at t = -1 (both equal 2) and split into two real
branches.  The re-diagonalization oracle resolves both branches; the ZNN
tracker may collapse the pair onto a single branch past the transition -
when it does, the trace is flagged degenerate rather than silently wrong.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import eigenflow as ef

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

flow = ef.gallery("real2x2", seed=11)
oracle = ef.oracle_trace(flow, -1.006, 0.0, 0.002)
znn = ef.trace(flow, -1.006, 0.0, ef.ZNNConfig(tau=0.002, eta=30.0, formula=(3, 3)))

for tr in znn:
    state = "degenerate: " + "; ".join(tr.notes) if tr.degenerate else "healthy"
    print(f"znn curve {tr.curve_index}: {len(tr.restarts)} restarts, {state}")

ts = oracle[0].times
fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
for tr in oracle:
    axes[0].plot(ts, tr.values.real, lw=1.1, label=f"oracle {tr.curve_index}")
    axes[1].plot(ts, tr.values.imag, lw=1.1)
for tr in znn:
    axes[0].plot(tr.times, tr.values.real, "--", lw=1.0,
                 label=f"znn {tr.curve_index}" + (" (flagged)" if tr.degenerate else ""))
    axes[1].plot(tr.times, tr.values.imag, "--", lw=1.0)
axes[0].set_title("real parts: branches split at t = -1")
axes[1].set_title("imaginary parts: conjugate pair closes")
for ax in axes:
    ax.axvline(-1.0, color="k", ls=":", lw=0.8)
    ax.set_xlabel("t")
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "real2x2_transition.png"), dpi=130)
print("wrote", os.path.join(OUT, "real2x2_transition.png"))
