# %%
"""How squashing the ring redistributes its inertia.

Holds the perimeter at 2 m, sweeps the semi-axis b across the feasible
band, slaves the semi-axis a to the perimeter, and plots the three
principal moments. Two things to look for: the out-of-plane moment y2
always equals y1 + y3 (planar mass distribution), and both in-plane
moments have an interior peak, so only part of the band is usable as a
monotone command channel for steering.

Run from the repository root:

    python demos/inertia_vs_axis_ratio.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from morphring import RingParams, inertia_triple, solve_axis_for_perimeter

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# %%
# Sweep b and slave a. Warm-starting the perimeter solve with the
# previous a keeps the whole sweep under a second.
params = RingParams(mass=1.0, perimeter=2.0)
b_grid = np.linspace(0.02, 0.48, 240)
a_prev = None
rows = []
for b in b_grid:
    a = solve_axis_for_perimeter(params.perimeter, b, initial=a_prev)
    y = inertia_triple(a, b, params)
    rows.append((b, a, y.y1, y.y2, y.y3))
    a_prev = a
b, a, y1, y2, y3 = np.array(rows).T

print(f"perpendicular-axis residual: {np.max(np.abs(y2 - y1 - y3)):.2e}")
print(f"y1 peaks at b = {b[np.argmax(y1)]:.3f} m, y3 at b = {b[np.argmax(y3)]:.3f} m")

# %%
# The circle sits where the curves cross (a = b = P / 2 pi). Steering
# commands live on y3's rising branch, left of its peak.
circle_b = params.perimeter / (2.0 * np.pi)

fig, ax = plt.subplots(figsize=(7, 4.5))
ax.plot(b, y1, label="y1 (in plane, long axis)")
ax.plot(b, y2, label="y2 (out of plane)")
ax.plot(b, y3, label="y3 (in plane, short axis)")
ax.axvline(circle_b, color="0.6", ls=":", lw=1, label="circle")
ax.set_xlabel("semi-axis b (m) at perimeter 2 m")
ax.set_ylabel("moment of inertia (kg m$^2$)")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "inertia_vs_axis.svg")
print(f"wrote {OUT / 'inertia_vs_axis.svg'}")
