"""Per-unit flux-linkage state-space model of the machine.

State vector (per-unit flux linkages):

    X = [psi_d, psi_q, psi_f, psi_1d, psi_1q, psi_2q]

Dynamics:  Xdot = (A1 + A2 A3) X + B Ef, with

    A1: rotational coupling (+/- omega*omega_e) in the stator rows and
        first-order decay with stator-flux feed-in in the rotor rows,
    A2: the -(Ra + R_L)*omega_e resistance block acting on the stator rows,
    A3: algebraic current extraction i = A3 X with sub-transient-leading
        coefficients (1/x''_d, 1/x''_q in the stator-flux positions),
    B:  field input, nonzero only in the psi_f row.

The field row can run with either the short-circuit transient constant (the
printed form of the source model, default) or the open-circuit constant;
both keep the same input gain structure, chosen so that the open-terminal
steady state satisfies |v| = Ef exactly.

Load convention: positive i_d, i_q deliver power to the load, and the
terminal voltage is v = +R_L * i.  With this sign the torque-power balance
T_e = v.i + Ra*|i|^2 closes at steady state; the magnitudes of all traces
are unaffected by the choice.

At open terminals the stator rows become numerically stiff when modelled as
a large load resistance.  The open-terminal path eliminates them instead:
i_d = i_q = 0 is enforced exactly by slaving the stator fluxes to the rotor
fluxes (the zero-current manifold of A3), leaving a well-conditioned
four-state rotor system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .params import DerivedParameters

STATE_NAMES = ("psi_d", "psi_q", "psi_f", "psi_1d", "psi_1q", "psi_2q")
ROTOR_SLICE = slice(2, 6)


@dataclass(frozen=True)
class FluxState:
    """Six per-unit flux linkages; the integrator works on the array form."""

    psi_d: float = 0.0
    psi_q: float = 0.0
    psi_f: float = 0.0
    psi_1d: float = 0.0
    psi_1q: float = 0.0
    psi_2q: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array(
            [self.psi_d, self.psi_q, self.psi_f, self.psi_1d, self.psi_1q, self.psi_2q]
        )

    @classmethod
    def from_array(cls, x: np.ndarray) -> "FluxState":
        if np.shape(x) != (6,):
            raise ParameterError(f"flux state needs 6 components, got shape {np.shape(x)}")
        return cls(*(float(v) for v in x))


@dataclass(frozen=True)
class OperatingCondition:
    """Load, speed and excitation seen by the machine in one segment.

    omega is the per-unit rotor speed; the model holds it at 1.0 in every
    shipped scenario but it stays a field so speed ramps remain possible.
    """

    R_L: float = 0.0
    omega: float = 1.0
    Ef: float = 0.0

    def __post_init__(self):
        if self.R_L < 0:
            raise ParameterError(f"load resistance must be non-negative, got {self.R_L}")
        if self.omega <= 0:
            raise ParameterError(f"rotor speed must be positive, got {self.omega}")


@dataclass(frozen=True)
class ModelMatrices:
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    B: np.ndarray
    C: np.ndarray
    system: np.ndarray  # A1 + A2 A3, cached for the integrator


def _field_constant(d: DerivedParameters, field_time_constant: str) -> float:
    if field_time_constant == "as_printed":
        t = d.Td_p
    elif field_time_constant == "open_circuit":
        t = d.Td0_p
    else:
        raise ParameterError(
            f"field_time_constant must be 'as_printed' or 'open_circuit', "
            f"got {field_time_constant!r}"
        )
    if t is None:
        raise ParameterError("time constants not derived yet")
    return t


def field_input_gain(d: DerivedParameters, field_time_constant: str = "as_printed") -> float:
    """Input gain of the psi_f row.

    (1/T_field)*(x'_d/(x_d - x'_d)): this is the unique gain for which the
    open-terminal steady state gives terminal voltage magnitude equal to Ef.
    """
    if d.xd == d.xd_p:
        raise ParameterError("xd equals xd_p; field input gain undefined")
    t_field = _field_constant(d, field_time_constant)
    return (1.0 / t_field) * d.xd_p / (d.xd - d.xd_p)


def current_extraction_matrix(d: DerivedParameters) -> np.ndarray:
    """A3: per-unit currents as a linear map of the flux state."""
    a3 = np.zeros((2, 6))
    a3[0, :] = [
        1.0 / d.xd_pp, 0.0,
        1.0 / d.xd - 1.0 / d.xd_p, 1.0 / d.xd_p - 1.0 / d.xd_pp,
        0.0, 0.0,
    ]
    a3[1, :] = [
        0.0, 1.0 / d.xq_pp,
        0.0, 0.0,
        1.0 / d.xq - 1.0 / d.xq_p, 1.0 / d.xq_p - 1.0 / d.xq_pp,
    ]
    return a3


def assemble_matrices(
    d: DerivedParameters,
    oc: OperatingCondition,
    field_time_constant: str = "as_printed",
) -> ModelMatrices:
    """Build the state-space matrices for one operating condition."""
    if not d.has_time_constants:
        raise ParameterError("time constants not derived yet")
    t_f = _field_constant(d, field_time_constant)
    we = d.omega_e
    w = oc.omega

    a1 = np.zeros((6, 6))
    a1[0, 1] = -w * we
    a1[1, 0] = w * we
    a1[2, 0] = 1.0 / t_f
    a1[2, 2] = -1.0 / t_f
    a1[3, 0] = 1.0 / d.Td_pp
    a1[3, 3] = -1.0 / d.Td_pp
    a1[4, 1] = 1.0 / d.Tq_p
    a1[4, 4] = -1.0 / d.Tq_p
    a1[5, 1] = 1.0 / d.Tq_pp
    a1[5, 5] = -1.0 / d.Tq_pp

    a2 = np.zeros((6, 2))
    a2[0, 0] = a2[1, 1] = -(d.ra + oc.R_L) * we

    a3 = current_extraction_matrix(d)

    b = np.zeros(6)
    b[2] = field_input_gain(d, field_time_constant)

    c = oc.R_L * a3
    return ModelMatrices(A1=a1, A2=a2, A3=a3, B=b, C=c, system=a1 + a2 @ a3)


def state_derivative(m: ModelMatrices, x: np.ndarray, Ef: float) -> np.ndarray:
    xdot = m.system @ x + m.B * Ef
    if not np.all(np.isfinite(xdot)):
        raise NumericalError("non-finite state derivative", state=np.array(x))
    return xdot


def extract_currents(d: DerivedParameters, x: np.ndarray) -> tuple[float, float]:
    """(i_d, i_q) from the flux state."""
    i = current_extraction_matrix(d) @ x
    return float(i[0]), float(i[1])


def terminal_voltage(
    d: DerivedParameters, x: np.ndarray, R_L: float
) -> tuple[float, float]:
    """(v_d, v_q) across the load; zero at a short circuit."""
    if R_L < 0:
        raise ParameterError(f"load resistance must be non-negative, got {R_L}")
    i_d, i_q = extract_currents(d, x)
    return R_L * i_d, R_L * i_q


def electromagnetic_torque(x: np.ndarray, i: tuple[float, float]) -> float:
    """T_e = psi_d*i_q - psi_q*i_d, per-unit at constant speed."""
    return float(x[0] * i[1] - x[1] * i[0])


def inverse_park(v_d, v_q, theta):
    """Amplitude-invariant inverse Park transform, balanced set.

    Accepts scalars or equally shaped arrays; phases b and c lag and lead
    by 2*pi/3.  The zero-sequence channel is omitted.
    """
    shift = 2.0 * math.pi / 3.0
    v_a = v_d * np.cos(theta) - v_q * np.sin(theta)
    v_b = v_d * np.cos(theta - shift) - v_q * np.sin(theta - shift)
    v_c = v_d * np.cos(theta + shift) - v_q * np.sin(theta + shift)
    return v_a, v_b, v_c


def steady_state(m: ModelMatrices, Ef: float) -> np.ndarray:
    """Equilibrium flux state for a constant Ef: solve (A1 + A2 A3) x = -B Ef."""
    try:
        return np.linalg.solve(m.system, -m.B * Ef)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular system matrix: {exc}") from exc


# ---------------------------------------------------------------------------
# Open-terminal fast-subsystem elimination.
#
# Setting i_d = i_q = 0 in the A3 rows expresses the stator fluxes as fixed
# linear combinations of the rotor fluxes; substituting them into the rotor
# rows leaves a four-state system in [psi_f, psi_1d, psi_1q, psi_2q] whose
# eigenvalues are the physical open-circuit decay modes.

def stator_slave_gains(d: DerivedParameters) -> tuple[float, float, float, float]:
    """(af, a1d, b1q, b2q): psi_d = af*psi_f + a1d*psi_1d and the q analogue."""
    af = -d.xd_pp * (1.0 / d.xd - 1.0 / d.xd_p)
    a1d = -d.xd_pp * (1.0 / d.xd_p - 1.0 / d.xd_pp)
    b1q = -d.xq_pp * (1.0 / d.xq - 1.0 / d.xq_p)
    b2q = -d.xq_pp * (1.0 / d.xq_p - 1.0 / d.xq_pp)
    return af, a1d, b1q, b2q


def slaved_stator_flux(
    gains: tuple[float, float, float, float], rotor: np.ndarray
) -> tuple[float, float]:
    """(psi_d, psi_q) on the zero-current manifold, from the rotor fluxes."""
    af, a1d, b1q, b2q = gains
    return (
        float(af * rotor[0] + a1d * rotor[1]),
        float(b1q * rotor[2] + b2q * rotor[3]),
    )


def assemble_reduced(
    d: DerivedParameters, field_time_constant: str = "as_printed"
) -> tuple[np.ndarray, np.ndarray, tuple[float, float, float, float]]:
    """Reduced rotor system (M, b, gains) for open terminals.

    rotor_dot = M rotor + b Ef, with stator fluxes recovered through the
    slave gains.
    """
    if not d.has_time_constants:
        raise ParameterError("time constants not derived yet")
    t_f = _field_constant(d, field_time_constant)
    af, a1d, b1q, b2q = stator_slave_gains(d)
    m = np.array([
        [(af - 1.0) / t_f, a1d / t_f, 0.0, 0.0],
        [af / d.Td_pp, (a1d - 1.0) / d.Td_pp, 0.0, 0.0],
        [0.0, 0.0, (b1q - 1.0) / d.Tq_p, b2q / d.Tq_p],
        [0.0, 0.0, b1q / d.Tq_pp, (b2q - 1.0) / d.Tq_pp],
    ])
    b = np.zeros(4)
    b[0] = field_input_gain(d, field_time_constant)
    return m, b, (af, a1d, b1q, b2q)


def open_terminal_voltage(
    gains: tuple[float, float, float, float], rotor: np.ndarray, omega: float = 1.0
) -> tuple[float, float]:
    """(v_d, v_q) = (-omega*psi_q, +omega*psi_d) with the slaved stator flux."""
    psi_d, psi_q = slaved_stator_flux(gains, rotor)
    return -omega * psi_q, omega * psi_d


def open_terminal_field_modes(
    d: DerivedParameters, field_time_constant: str = "as_printed"
) -> tuple[float, float]:
    """(tau_slow, tau_fast): d-axis decay time constants at open terminals.

    These are the eigenvalues of the coupled field/damper block of the
    reduced system; tau_slow governs the terminal-voltage recovery envelope
    after the machine is opened.
    """
    m, _, _ = assemble_reduced(d, field_time_constant)
    lam = np.linalg.eigvals(m[:2, :2])
    lam = np.sort(lam.real)
    if lam[-1] >= 0:
        raise NumericalError("open-terminal d-axis block is not stable")
    taus = sorted((-1.0 / lam[0], -1.0 / lam[1]), reverse=True)
    return float(taus[0]), float(taus[1])
