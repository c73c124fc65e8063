"""
Fitting the open-circuit characteristic with a Froelich hyperbola
=================================================================

Two measured OCC points are enough to pin down the two-constant law
psi = I_f / (a + b I_f), provided the second point actually lies below
the air-gap line through the first.  The fitted curve then yields a
saturated magnetising reactance for any operating flux, which is what
caps the self-excitation build-up at a finite voltage.
"""

import dataclasses
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import sesgsim as s

OUT = Path(__file__).parent / "output"

# reference constants for the 2.2 kVA machine
curve = s.FroelichCurve(a=0.48366, b=0.3478)
print(f"curve constants a = {curve.a}, b = {curve.b}")
print(f"air-gap slope 1/a = {1.0 / curve.a:.4f}, "
      f"flux ceiling 1/b = {curve.flux_asymptote:.4f} pu")
print(f"occ(1.0) = {s.evaluate_occ(curve, 1.0):.4f} pu")

# the same constants recovered from two anchor points on the curve
i1 = 0.6
i2 = 2.0
refit = s.fit_froelich((i1, s.evaluate_occ(curve, i1)), (i2, s.evaluate_occ(curve, i2)))
print(f"refit from anchors: a = {refit.a:.5f}, b = {refit.b:.5f}")

# saturated reactance: chord slope of the OCC at the operating flux,
# clamped so low-flux operation stays on the unsaturated value; the clamp
# needs the unsaturated x_md attached to the curve
machine = s.MachineParameters(
    Xd=1.7085, Xd_p=0.568, Xd_pp=0.177, Xq=0.9831, Xq_p=0.800, Xq_pp=0.528,
    Xls=0.085, Ra=0.003, Rf=0.03, r_1d=0.04, r_1q=0.06, r_2q=0.06,
)
d = s.derive_parameters(machine)
curve = dataclasses.replace(curve, x_md_unsat=d.x_md_unsat)
for psi in (0.2, 0.8, 1.0, 1.5, 2.0):
    x_sat = s.saturated_xmd(curve, psi)
    print(f"  psi_t = {psi:3.1f} -> x_md_sat = {x_sat:.4f}  "
          f"(unsaturated {d.x_md_unsat})")

# rescaling the d-axis around the saturated magnetising branch shifts the
# composite reactances and the field time constant together
d_sat = s.rescale_saturated_parameters(d, s.saturated_xmd(curve, 1.0))
print(f"at rated flux: xd {d.xd:.4f} -> {d_sat.xd:.4f}, "
      f"Td0_p {d.Td0_p:.4f} -> {d_sat.Td0_p:.4f} s")

i_f = np.linspace(0.0, 3.0, 300)
occ = np.array([s.evaluate_occ(curve, float(i)) for i in i_f])

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(i_f, occ, label="Froelich OCC")
ax.plot(i_f, i_f / curve.a, "--", label="air-gap line")
ax.axhline(curve.flux_asymptote, color="gray", lw=0.6, label="1/b ceiling")
ax.set_xlabel("field current [pu]")
ax.set_ylabel("terminal flux [pu]")
ax.set_ylim(0, 3.2)
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
OUT.mkdir(exist_ok=True)
fig.savefig(OUT / "saturation_occ.svg")
print(f"wrote {OUT / 'saturation_occ.svg'}")
