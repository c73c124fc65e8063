"""
Sudden open circuit after a sustained short
===========================================

The mirror experiment to the sudden short: the machine sits in the
short-circuit steady state (field flux pulled down by the armature
reaction), then the three phases are opened.  The currents vanish at the
switching instant and the terminal voltage recovers toward Ef with the
open-terminal field decay constant, which the damper branch stretches
well beyond the bare field constant.
"""

from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import sesgsim as s

OUT = Path(__file__).parent / "output"

cfg = s.load_config(resources.files("sesgsim") / "data" / "sudden_open_circuit.json")
d = s.derive_parameters(cfg.machine, cfg.time_constant_overrides)
ts = s.simulate(d, cfg.excitation, cfg.scenario, cfg.integrator)

t_open = cfg.scenario.events[0].time
before = ts.t < t_open
after = ts.t >= t_open

print(f"short-circuit steady state: i_d = {ts['i_d'][before][-1]:.5f} pu "
      f"(analytic -Ef/Xd = {-1.0 / d.xd:.5f}), psi_f = {ts['psi_f'][before][-1]:.5f} pu")

i_after = np.hypot(ts["i_d"][after], ts["i_q"][after])
v_mag = np.hypot(ts["v_d"], ts["v_q"])
print(f"max |i| after opening = {i_after.max():.2e} pu")
print(f"|v| just after opening = {v_mag[after][0]:.4f} pu, "
      f"final = {v_mag[-1]:.5f} pu (Ef = {cfg.excitation.Ef_setpoint})")

_, tau_fit = s.fit_recovery_constant(ts.t[after], v_mag[after],
                                     final=cfg.excitation.Ef_setpoint)
tau_model = s.open_terminal_field_modes(d)[0]
print(f"fitted recovery constant = {tau_fit:.4f} s")
print(f"slow open-terminal field mode = {tau_model:.4f} s "
      f"(ratio {tau_fit / tau_model:.3f})")
print(f"bare field constants for contrast: Td' = {d.Td_p:.4f} s, "
      f"Td0' = {d.Td0_p:.4f} s")

fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
axes[0].plot(ts.t, v_mag, lw=0.9)
axes[0].axhline(cfg.excitation.Ef_setpoint, color="gray", lw=0.6)
axes[0].axvline(t_open, color="red", lw=0.6)
axes[0].set_ylabel("|v| [pu]")
axes[0].grid(alpha=0.3)

axes[1].plot(ts.t, ts["psi_f"], lw=0.9, label="psi_f")
axes[1].plot(ts.t, ts["psi_d"], lw=0.9, label="psi_d")
axes[1].axvline(t_open, color="red", lw=0.6)
axes[1].set_xlabel("t [s]")
axes[1].set_ylabel("flux [pu]")
axes[1].legend()
axes[1].grid(alpha=0.3)

fig.tight_layout()
OUT.mkdir(exist_ok=True)
fig.savefig(OUT / "sudden_open_circuit.svg")
print(f"wrote {OUT / 'sudden_open_circuit.svg'}")
