"""Fixed-step time integration of the machine with events and saturation.

The run loop advances the flux state with classic RK4 (or forward Euler)
between switching events.  Events snap to the step grid (worst case half a
step of misalignment, recorded in the metadata) and change the operating
condition discontinuously while the stored state carries over, preserving
the magnetic energy of the retained windings.

Two structural regimes exist per segment:

* loaded (finite R_L including zero): the full six-state model;
* open terminals: the stator rows are eliminated and the four rotor states
  integrate on the zero-current manifold.  Modelling open terminals as a
  huge resistance instead is supported (open_terminal_elimination off) for
  verification, but pushes stator eigenvalues to omega_e*R_L/x'' and then
  needs a far smaller step than the default.

Saturation updates once per accepted step from the previous state (explicit
one-step lag, so there is no algebraic loop); the excitation feedback, by
contrast, is evaluated inside every integration stage.

Exceeding the divergence threshold ends the run early with the outcome flag
'diverged' and the trip time; for the unsaturated self-excitation experiment
that is the expected result, not a failure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import ConfigurationError, NumericalError, SaturationRangeError
from .excitation import ExcitationConfig, excitation_emf, initial_state as excitation_initial_state
from .model import (
    FluxState,
    OperatingCondition,
    assemble_matrices,
    assemble_reduced,
    electromagnetic_torque,
    inverse_park,
    slaved_stator_flux,
    steady_state,
)
from .params import DerivedParameters
from .saturation import FroelichCurve, rescale_saturated_parameters, saturated_xmd
from .scenarios import COLUMNS, ScenarioScript, TimeSeries

METHODS = ("rk4", "euler")


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float = 1e-4
    duration: float = 1.0
    method: str = "rk4"
    divergence_threshold: float = 10.0
    open_terminal_elimination: bool = True
    open_circuit_R_L: float = 1e4

    def __post_init__(self):
        violations = []
        if self.step_size <= 0:
            violations.append(f"step_size must be positive, got {self.step_size}")
        elif self.duration < self.step_size:
            violations.append(
                f"duration {self.duration} must be at least one step {self.step_size}"
            )
        if self.method not in METHODS:
            violations.append(f"method must be one of {METHODS}, got {self.method!r}")
        if self.divergence_threshold <= 1:
            violations.append(
                f"divergence_threshold must exceed 1 pu, got {self.divergence_threshold}"
            )
        if self.open_circuit_R_L <= 0:
            violations.append(
                f"open_circuit_R_L must be positive, got {self.open_circuit_R_L}"
            )
        if violations:
            raise ConfigurationError(violations)


def rk4_step(f, x: np.ndarray, dt: float) -> np.ndarray:
    """One classic fourth-order Runge-Kutta step of x' = f(x)."""
    stages = []
    k = f(x)
    for stage, scale in enumerate((0.5, 0.5, 1.0), start=1):
        if not np.all(np.isfinite(k)):
            raise NumericalError("non-finite RK4 stage", state=np.array(x), stage=stage)
        stages.append(k)
        k = f(x + dt * scale * k)
    if not np.all(np.isfinite(k)):
        raise NumericalError("non-finite RK4 stage", state=np.array(x), stage=4)
    stages.append(k)
    k1, k2, k3, k4 = stages
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_step(f, x: np.ndarray, dt: float) -> np.ndarray:
    """One forward Euler step."""
    k = f(x)
    if not np.all(np.isfinite(k)):
        raise NumericalError("non-finite Euler stage", state=np.array(x), stage=1)
    return x + dt * k


_STEPPERS = {"rk4": rk4_step, "euler": euler_step}


def simulate(
    d: DerivedParameters,
    excitation: ExcitationConfig,
    script: ScenarioScript,
    integ: IntegratorConfig,
    saturation_curve: FroelichCurve | None = None,
    field_time_constant: str = "as_printed",
    initial: FluxState | None = None,
    omega: float = 1.0,
) -> TimeSeries:
    """Run one scenario and return the sampled trace.

    ``saturation_curve`` of None runs the machine unsaturated.  ``initial``
    overrides the script's initial-state rule, which allows chaining runs
    from an exported final state.
    """
    dt = integ.step_size
    n_steps = int(round(integ.duration / dt))
    stepper = _STEPPERS[integ.method]
    warnings: list[str] = []
    notes: list[str] = []

    curve = saturation_curve
    if curve is not None and curve.x_md_unsat is None:
        curve = replace(curve, x_md_unsat=d.x_md_unsat)

    # event times snap to the step grid
    events_by_step: dict[int, list] = {}
    for ev in script.events:
        k = int(round(ev.time / dt))
        if k > n_steps:
            raise ConfigurationError(
                f"event at t={ev.time} falls outside the run duration {integ.duration}"
            )
        if abs(k * dt - ev.time) > 1e-12:
            warnings.append(
                f"event at t={ev.time} snapped to the grid at t={k * dt:.6g}"
            )
        events_by_step.setdefault(k, []).append(ev)

    exc = excitation
    r_load = script.initial_load
    d_now = d

    if (
        r_load is None
        and exc.mode == "separate"
        and script.events
        and d.Td0_p is not None
        and script.events[0].time < 5.0 * d.Td0_p
    ):
        warnings.append(
            f"first event at t={script.events[0].time} arrives before the "
            f"open-terminal settling window 5*Td0_p = {5.0 * d.Td0_p:.4f} s"
        )

    # --- initial state -----------------------------------------------------
    if initial is not None:
        x = initial.to_array()
    elif script.initial_state_mode == "zero":
        x = np.zeros(6)
    elif script.initial_state_mode == "excitation":
        x = excitation_initial_state(exc, d_now).to_array()
    else:  # short_circuit_steady: equilibrium at the initial condition
        if exc.mode != "separate":
            raise ConfigurationError(
                "steady initialisation requires separate excitation"
            )
        if r_load is None:
            mr, br, gains0 = assemble_reduced(d_now, field_time_constant)
            rotor = np.linalg.solve(mr, -br * exc.Ef_setpoint)
            psi_d, psi_q = slaved_stator_flux(gains0, rotor)
            x = np.concatenate(([psi_d, psi_q], rotor))
        else:
            m0 = assemble_matrices(
                d_now, OperatingCondition(R_L=r_load, omega=omega), field_time_constant
            )
            x = steady_state(m0, exc.Ef_setpoint)

    # --- per-segment machinery --------------------------------------------
    open_mode = False
    mats = None
    m_red = b_red = gains = None
    deriv = None
    a3 = None

    def rebuild():
        nonlocal open_mode, mats, m_red, b_red, gains, deriv, a3, x
        was_open = open_mode
        open_mode = r_load is None and integ.open_terminal_elimination
        if open_mode:
            mats = None
            m_red, b_red, gains = assemble_reduced(d_now, field_time_constant)
            if not was_open:
                # stator fluxes re-slave onto the zero-current manifold;
                # rotor fluxes carry over (their stored energy is continuous)
                rotor = x[2:].copy()
                psi_d, psi_q = slaved_stator_flux(gains, rotor)
                x = np.concatenate(([psi_d, psi_q], rotor))
            if exc.mode == "separate":
                ef_const = exc.Ef_setpoint

                def deriv_open(r):
                    return m_red @ r + b_red * ef_const
                deriv = deriv_open
            else:
                mr, br, g, ex, dd = m_red, b_red, gains, exc, d_now

                def deriv_open_self(r):
                    psi_d, psi_q = slaved_stator_flux(g, r)
                    ef = excitation_emf(ex, -omega * psi_q, omega * psi_d, dd)
                    return mr @ r + br * ef
                deriv = deriv_open_self
        else:
            eff_rl = integ.open_circuit_R_L if r_load is None else r_load
            oc = OperatingCondition(R_L=eff_rl, omega=omega)
            mats = assemble_matrices(d_now, oc, field_time_constant)
            if exc.mode == "separate":
                sysm, b, ef_const = mats.system, mats.B, exc.Ef_setpoint

                def deriv_full(y):
                    return sysm @ y + b * ef_const
                deriv = deriv_full
            else:
                sysm, b, a3l, ex, dd, rl = (
                    mats.system, mats.B, mats.A3, exc, d_now, eff_rl,
                )

                def deriv_full_self(y):
                    i = a3l @ y
                    ef = excitation_emf(ex, rl * i[0], rl * i[1], dd)
                    return sysm @ y + b * ef
                deriv = deriv_full_self
        a3 = mats.A3 if mats is not None else None

    rebuild()

    # --- main loop ----------------------------------------------------------
    core = np.empty((n_steps + 1, 14))
    outcome = "completed"
    diverged_at = None
    clamp_count = 0
    clamp_first = None
    n_recorded = 0

    for k in range(n_steps + 1):
        for ev in events_by_step.get(k, ()):
            if ev.action == "set_load":
                r_load = None if ev.value is None else float(ev.value)
            elif ev.action == "short_circuit":
                r_load = 0.0
            elif ev.action == "open_circuit":
                r_load = None
            elif ev.action == "set_Ef":
                exc = replace(exc, Ef_setpoint=float(ev.value))
            elif ev.action == "set_excitation_mode":
                exc = replace(exc, mode=ev.value)
            rebuild()

        # saturation update from the accepted state, one-step explicit lag
        if curve is not None:
            try:
                xm = saturated_xmd(curve, math.hypot(x[0], x[1]))
            except SaturationRangeError as err:
                warnings.append(f"saturation range trip at t={k * dt:.6g}: {err}")
                outcome = "diverged"
                diverged_at = k * dt
            else:
                if xm != d_now.x_md:
                    d_now = rescale_saturated_parameters(d_now, xm)
                    rebuild()

        # sample
        if open_mode:
            i_d = i_q = 0.0
            v_d, v_q = -omega * x[1], omega * x[0]
        else:
            i = a3 @ x
            i_d, i_q = float(i[0]), float(i[1])
            eff_rl = integ.open_circuit_R_L if r_load is None else r_load
            v_d, v_q = eff_rl * i_d, eff_rl * i_q
        ef_now = excitation_emf(exc, v_d, v_q, d_now)
        if exc.mode == "self_excited" and ef_now >= exc.Ef_ceiling * (1.0 - 1e-12):
            clamp_count += 1
            if clamp_first is None:
                clamp_first = k * dt
        core[k] = (
            k * dt, x[0], x[1], x[2], x[3], x[4], x[5],
            i_d, i_q, v_d, v_q,
            ef_now, d_now.x_md, electromagnetic_torque(x, (i_d, i_q)),
        )
        n_recorded = k + 1
        if outcome == "diverged" or k == n_steps:
            break

        # advance one step
        if open_mode:
            rotor = stepper(deriv, x[2:], dt)
            psi_d, psi_q = slaved_stator_flux(gains, rotor)
            x = np.concatenate(([psi_d, psi_q], rotor))
        else:
            x = stepper(deriv, x, dt)
        if np.max(np.abs(x)) > integ.divergence_threshold:
            outcome = "diverged"
            diverged_at = (k + 1) * dt

    core = core[:n_recorded]

    # phase quantities from the dq traces; theta = omega_e * omega * t
    theta = d.omega_e * omega * core[:, 0]
    v_abc = inverse_park(core[:, 9], core[:, 10], theta)
    i_abc = inverse_park(core[:, 7], core[:, 8], theta)

    data = np.empty((n_recorded, len(COLUMNS)))
    data[:, 0:11] = core[:, 0:11]
    data[:, 11], data[:, 12], data[:, 13] = v_abc
    data[:, 14], data[:, 15], data[:, 16] = i_abc
    data[:, 17:20] = core[:, 11:14]

    metadata = {
        "scenario": script.name,
        "outcome": outcome,
        "diverged_at": diverged_at,
        "warnings": warnings,
        "notes": notes,
        "field_time_constant": field_time_constant,
        "saturation_enabled": curve is not None,
        "excitation_mode": excitation.mode,
        "final_x_md": float(d_now.x_md),
        "Ef_clamped_samples": clamp_count,
        "Ef_clamp_first_time": clamp_first,
        "derived_parameters": _echo(d),
    }
    return TimeSeries(data=data, metadata=metadata)


def _echo(d: DerivedParameters) -> dict:
    return {k: v for k, v in asdict(d).items() if v is not None}
