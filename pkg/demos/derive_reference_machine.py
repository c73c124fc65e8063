"""
From nameplate reactances to the equivalent-circuit element set
===============================================================

The 2.2 kVA, 415 V laboratory machine is specified by its composite
reactances (synchronous, transient, sub-transient on both axes), the
leakage, and the winding resistances.  The simulator needs the per-branch
elements of the d and q equivalent circuits instead, so this script walks
the derivation and closes the loop: elements back to composites, which
must land on the inputs to machine precision.
"""

import sesgsim as s

# nameplate and short-circuit test data, all per-unit on the machine base
machine = s.MachineParameters(
    Xd=1.7085, Xd_p=0.568, Xd_pp=0.177,
    Xq=0.9831, Xq_p=0.800, Xq_pp=0.528,
    Xls=0.085, Ra=0.003, Rf=0.03,
    r_1d=0.04, r_1q=0.06, r_2q=0.06,  # damper estimates, not measured
)

d = s.derive_parameters(machine)

print("element reactances (pu):")
for name in ("x_md", "x_f", "x_1d", "x_mq", "x_1q", "x_2q"):
    print(f"  {name:5s} = {getattr(d, name):9.6f}")

# the composite chain must reproduce the inputs: each tighter transient
# level just parallels one more rotor branch onto the magnetising branch
print("\ncomposite round trip:")
for name, value in s.composite_reactances(d).items():
    given = getattr(machine, name)
    print(f"  {name:5s} = {value:9.6f}  (input {given}, error {value - given:+.2e})")

print("\ntime constants (s):")
for name in ("Td0_p", "Td_p", "Td0_pp", "Td_pp", "Tq0_p", "Tq_p", "Tq0_pp", "Tq_pp"):
    print(f"  {name:6s} = {getattr(d, name):9.6f}")

# the open-circuit field constant dominates voltage build-up and recovery;
# the sub-transient ones only shape the first few cycles of a fault
tau_slow, tau_fast = s.open_terminal_field_modes(d)
print(f"\nopen-terminal field modes: slow {tau_slow:.4f} s, fast {tau_fast:.4f} s")
print(f"(slow mode vs Td0_p = {tau_slow / d.Td0_p:.3f}: the damper branch")
print("stretches the bare field constant when the terminals are open)")

# per-unit bases implied by the nameplate, for converting measured ohms
z_base = s.impedance_base(415.0, 3.3)
print(f"\nstator impedance base {z_base:.2f} ohm; a 50 ohm load resistor")
print(f"is R_L = {s.to_per_unit(50.0, z_base):.3f} pu")
