"""Excitation source: a constant setpoint or the self-excitation loop.

In self-excited mode the stator terminals feed a diode bridge whose average
output drives the field winding; the bridge is modelled as its average
value, V_f proportional to the terminal-voltage magnitude.  The model's
field input Ef is already scaled so that open-terminal steady voltage
equals Ef, which absorbs the field-circuit conversion factor into a single
loop-gain knob:

    Ef = min(k_rect * (x_md_sat/x_md_unsat) * |v|, Ef_ceiling)

The saturation ratio makes the effective gain shrink as the core saturates;
this is what arrests the build-up at a finite voltage.  The default k_rect
folds the ideal-bridge average (1.35 * line voltage) over the field base
voltage: 1.35*415/220 for the reference machine.

Build-up needs remanent rotor flux, entering as a nonzero initial psi_f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError
from .model import FluxState, assemble_reduced
from .params import DerivedParameters
from .saturation import FroelichCurve, evaluate_occ

DEFAULT_RECTIFIER_GAIN = 1.35 * 415.0 / 220.0

MODES = ("separate", "self_excited")


@dataclass(frozen=True)
class ExcitationConfig:
    mode: str = "separate"
    Ef_setpoint: float = 1.0
    rectifier_gain: float = DEFAULT_RECTIFIER_GAIN
    residual_flux: float = 0.05
    Ef_ceiling: float = 5.0
    seed_stator_flux: bool = False

    def __post_init__(self):
        violations = []
        if self.mode not in MODES:
            violations.append(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.rectifier_gain <= 0:
            violations.append(f"rectifier_gain must be positive, got {self.rectifier_gain}")
        if self.Ef_ceiling <= 0:
            violations.append(f"Ef_ceiling must be positive, got {self.Ef_ceiling}")
        if self.mode == "self_excited" and self.residual_flux <= 0:
            violations.append(
                "residual_flux must be positive in self-excited mode: "
                "build-up impossible without remanence"
            )
        if violations:
            raise ConfigurationError(violations)


def excitation_emf(
    cfg: ExcitationConfig, v_d: float, v_q: float, d: DerivedParameters
) -> float:
    """Field emf for the present terminal voltage.

    Separate mode ignores the terminals.  Self-excited mode rectifies the
    voltage magnitude (non-negative by construction, matching the diodes)
    and clamps at the ceiling; d carries the current saturated x_md.
    """
    if cfg.mode == "separate":
        return cfg.Ef_setpoint
    v = math.hypot(v_d, v_q)
    gain = cfg.rectifier_gain * (d.x_md / d.x_md_unsat)
    return min(gain * v, cfg.Ef_ceiling)


def initial_state(
    cfg: ExcitationConfig, d: DerivedParameters | None = None
) -> FluxState:
    """Starting flux state: zero, or remanence in the field winding."""
    if cfg.mode == "separate":
        return FluxState()
    psi_d = 0.0
    if cfg.seed_stator_flux:
        if d is None:
            raise ConfigurationError(
                "seed_stator_flux requires derived parameters"
            )
        psi_d = cfg.residual_flux * d.x_md / (d.x_md + d.x_f)
    return FluxState(psi_d=psi_d, psi_f=cfg.residual_flux)


def critical_rectifier_gain(
    d: DerivedParameters,
    field_time_constant: str = "as_printed",
    tol: float = 1e-12,
) -> float:
    """Loop gain at the stability boundary of the unsaturated build-up.

    The open-terminal d-axis block is a 2x2 system in (psi_f, psi_1d); the
    feedback Ef = k * psi_d(slaved) adds k times a rank-one term to its
    field row.  The critical k is located by bisection on the sign of the
    largest eigenvalue real part.  For this model it lands on 1.0: the Ef
    convention normalises the steady loop gain to k itself.
    """
    m_red, b_red, gains = assemble_reduced(d, field_time_constant)
    m0 = m_red[:2, :2]
    feedback = b_red[0] * np.outer([1.0, 0.0], gains[:2])

    def growth(k: float) -> float:
        return float(np.max(np.linalg.eigvals(m0 + k * feedback).real))

    if growth(0.0) >= 0:
        raise NumericalError("open-loop rotor system is not stable")
    lo, hi = 0.0, 1.0
    for _ in range(80):
        if growth(hi) >= 0:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NumericalError("no critical gain below the search bound")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if growth(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def self_excitation_fixed_point(
    curve: FroelichCurve,
    x_md_unsat: float,
    k_rect: float,
    tol: float = 1e-12,
) -> float:
    """Steady terminal voltage of the saturated build-up, by bisection.

    The loop maps terminal voltage to an equivalent field current
    i = (k_rect/x_md_unsat)*v and back through the clamped open-circuit
    characteristic; the nonzero crossing of h(v) = occ_clamped(i) - v is
    the settling voltage.  Independent of the dynamic model, so it serves
    as an oracle for the simulated build-up.
    """
    c = k_rect / x_md_unsat

    def occ_clamped(i_f: float) -> float:
        return min(x_md_unsat * i_f, evaluate_occ(curve, i_f))

    def h(v: float) -> float:
        return occ_clamped(c * v) - v

    eps = 1e-9
    if h(eps) <= 0:
        raise ConfigurationError(
            f"rectifier gain {k_rect} is subcritical; no nonzero fixed point"
        )
    hi = 1.0
    for _ in range(200):
        if h(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NumericalError("fixed point search did not bracket a root")
    lo = eps
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
