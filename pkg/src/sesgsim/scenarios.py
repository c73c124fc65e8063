"""Scripted experiments and trace diagnostics.

A scenario is pure data: an initial load and excitation reference plus a
time-ordered list of switching events.  The three validation experiments
ship as builders (sudden short circuit, sudden open circuit, self-excited
build-up) together with a generic load step.

The diagnostics extract envelope features from a finished run: peak and
sustained current, the decay time constants of the short-circuit envelope
(two-stage exponential peel), and the recovery constant of a rising
voltage trace.  Metrics that a trace does not support are reported as None
rather than fabricated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .model import FluxState

ACTIONS = ("set_load", "short_circuit", "open_circuit", "set_Ef", "set_excitation_mode")
INITIAL_STATE_MODES = ("excitation", "zero", "short_circuit_steady")

COLUMNS = (
    "t",
    "psi_d", "psi_q", "psi_f", "psi_1d", "psi_1q", "psi_2q",
    "i_d", "i_q", "v_d", "v_q",
    "v_a", "v_b", "v_c", "i_a", "i_b", "i_c",
    "Ef", "x_md_sat", "T_e",
)


@dataclass(frozen=True)
class Event:
    """One switching action at a point in time.

    set_load carries the new per-unit load resistance (None for open
    terminals); short_circuit and open_circuit are shorthands for
    set_load(0) and set_load(open).
    """

    time: float
    action: str
    value: object = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ConfigurationError(
                f"unknown event action {self.action!r}; expected one of {ACTIONS}"
            )
        if self.time < 0:
            raise ConfigurationError(f"event time must be non-negative, got {self.time}")
        if self.action == "set_load":
            if self.value is not None and (
                not isinstance(self.value, (int, float)) or self.value < 0
            ):
                raise ConfigurationError(
                    f"set_load value must be a non-negative resistance or None, "
                    f"got {self.value!r}"
                )
        elif self.action == "set_Ef":
            if not isinstance(self.value, (int, float)):
                raise ConfigurationError(f"set_Ef needs a numeric value, got {self.value!r}")
        elif self.action == "set_excitation_mode":
            if self.value not in ("separate", "self_excited"):
                raise ConfigurationError(
                    f"set_excitation_mode value must be 'separate' or "
                    f"'self_excited', got {self.value!r}"
                )
        elif self.value is not None:
            raise ConfigurationError(f"{self.action} takes no value")


@dataclass(frozen=True)
class ScenarioScript:
    """Timed event list driving one run; load None means open terminals."""

    name: str
    events: tuple[Event, ...] = ()
    initial_load: float | None = None
    initial_state_mode: str = "excitation"
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        times = [e.time for e in self.events]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ConfigurationError(f"event times must be non-decreasing, got {times}")
        if self.initial_state_mode not in INITIAL_STATE_MODES:
            raise ConfigurationError(
                f"initial_state_mode must be one of {INITIAL_STATE_MODES}, "
                f"got {self.initial_state_mode!r}"
            )
        if self.initial_load is not None and self.initial_load < 0:
            raise ConfigurationError(
                f"initial_load must be non-negative or None, got {self.initial_load}"
            )


def scenario_sudden_short_circuit(t_fault: float = 2.5) -> ScenarioScript:
    """Open-terminal steady state, then a three-phase short at t_fault.

    t_fault should exceed five open-circuit field time constants so the
    pre-fault voltage has settled; the runner records a warning otherwise.
    """
    return ScenarioScript(
        name="sudden_short_circuit",
        events=(Event(t_fault, "short_circuit"),),
        initial_load=None,
        initial_state_mode="excitation",
        description="constant excitation, open terminals, three-phase short at t_fault",
    )


def scenario_sudden_open_circuit(t_open: float = 0.5) -> ScenarioScript:
    """Short-circuit steady state, then the terminals open at t_open."""
    return ScenarioScript(
        name="sudden_open_circuit",
        events=(Event(t_open, "open_circuit"),),
        initial_load=0.0,
        initial_state_mode="short_circuit_steady",
        description="constant excitation, short-circuit steady start, terminals open at t_open",
    )


def scenario_self_excitation() -> ScenarioScript:
    """Pure voltage build-up from remanence onto open terminals."""
    return ScenarioScript(
        name="self_excitation",
        events=(),
        initial_load=None,
        initial_state_mode="excitation",
        description="self-excited build-up from residual field flux, no switching",
    )


def scenario_load_step(
    t_step: float = 1.0,
    R_L_initial: float | None = None,
    R_L_final: float = 1.0,
) -> ScenarioScript:
    """Generic resistive load step at t_step."""
    return ScenarioScript(
        name="load_step",
        events=(Event(t_step, "set_load", R_L_final),),
        initial_load=R_L_initial,
        initial_state_mode="excitation",
        description="load resistance steps to R_L_final at t_step",
    )


SCENARIOS = {
    "sudden_short_circuit": scenario_sudden_short_circuit,
    "sudden_open_circuit": scenario_sudden_open_circuit,
    "self_excitation": scenario_self_excitation,
    "load_step": scenario_load_step,
}


def build_scenario(name: str, params: dict | None = None) -> ScenarioScript:
    if name not in SCENARIOS:
        raise ConfigurationError(
            f"unknown scenario {name!r}; available: {sorted(SCENARIOS)}"
        )
    try:
        return SCENARIOS[name](**(params or {}))
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for scenario {name!r}: {exc}") from exc


@dataclass(frozen=True)
class TimeSeries:
    """Sampled run output with a fixed column schema plus run metadata.

    ``data`` has one row per sample and one column per entry of COLUMNS.
    Metadata carries the parameter echo, outcome flag ('completed' or
    'diverged'), warnings, and configuration hash when run from a file.
    """

    data: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] != len(COLUMNS):
            raise ConfigurationError(
                f"time series needs {len(COLUMNS)} columns, got shape {self.data.shape}"
            )
        t = self.data[:, 0]
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ConfigurationError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.data[:, COLUMNS.index(name)]
        except ValueError:
            raise KeyError(f"unknown column {name!r}; valid: {COLUMNS}") from None

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    @property
    def outcome(self) -> str:
        return self.metadata.get("outcome", "completed")

    def final_state(self) -> FluxState:
        if len(self) == 0:
            raise ConfigurationError("empty time series has no final state")
        return FluxState.from_array(self.data[-1, 1:7])


@dataclass(frozen=True)
class EnvelopeSummary:
    """Trace features; fields are None when the trace does not exhibit them.

    peak_current is the raw maximum of |i| including the rotating offset;
    initial_envelope is the cycle-mean envelope extrapolated back to the
    segment start, the quantity to compare against the sub-transient level.
    """

    peak_current: float | None = None
    sustained_current: float | None = None
    initial_envelope: float | None = None
    settling_time: float | None = None
    steady_terminal_voltage: float | None = None
    tau_slow: float | None = None
    tau_fast: float | None = None


def _log_linear_fit(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Fit y = K exp(-t/tau); returns (K, tau)."""
    a = np.vstack([np.ones_like(t), t]).T
    coef, *_ = np.linalg.lstsq(a, np.log(y), rcond=None)
    return float(np.exp(coef[0])), float(-1.0 / coef[1])


def cycle_mean_envelope(
    t: np.ndarray, i_d: np.ndarray, i_q: np.ndarray, carrier_period: float
) -> tuple[np.ndarray, np.ndarray]:
    """Envelope of the dq current vector by full-cycle vector averaging.

    Averaging i_d and i_q over one carrier period before taking the
    magnitude cancels the rotating offset component and leaves the
    unidirectional envelope, sampled every half period.
    """
    if t.size < 3:
        return np.empty(0), np.empty(0)
    dt = t[1] - t[0]
    hw = int(round(carrier_period / dt / 2.0))
    if hw < 1 or t.size < 4 * hw:
        return np.empty(0), np.empty(0)
    centers = np.arange(hw, t.size - hw, hw)
    env = np.array([
        math.hypot(i_d[c - hw:c + hw + 1].mean(), i_q[c - hw:c + hw + 1].mean())
        for c in centers
    ])
    return t[centers], env


def peel_decay_constants(
    env_t: np.ndarray, env: np.ndarray, final: float
) -> tuple[float | None, float | None, float | None, float | None]:
    """(tau_slow, tau_fast, K_slow, K_fast) of a two-exponential decay.

    Stage one fits the slow exponential on the low-amplitude window of the
    deviation from the final level, stage two fits the fast exponential on
    the early residual, then both are refitted once against each other's
    cleaned signal.  Windows are fractions of the initial span; segments
    without enough samples or with a non-decaying shape yield None.
    """
    dev = env - final
    span0 = float(dev.max()) if dev.size else 0.0
    if span0 <= 0:
        return None, None, None, None

    m1 = (dev > 0.02 * span0) & (dev < 0.2 * span0)
    if np.count_nonzero(m1) < 3:
        m1 = (dev > 0.01 * span0) & (dev < 0.5 * span0)
    if np.count_nonzero(m1) < 3:
        return None, None, None, None
    k_slow, tau_slow = _log_linear_fit(env_t[m1], dev[m1])
    if tau_slow <= 0:
        return None, None, None, None

    res1 = dev - k_slow * np.exp(-env_t / tau_slow)
    m2 = (res1 > 0.05 * span0) & (env_t < env_t[m1][0])
    if np.count_nonzero(m2) < 3:
        return tau_slow, None, k_slow, None
    k_fast, tau_fast = _log_linear_fit(env_t[m2], res1[m2])
    if tau_fast <= 0:
        return tau_slow, None, k_slow, None

    # one cross-refinement pass: refit each component on the signal with
    # the other peeled off
    res2 = dev - k_fast * np.exp(-env_t / tau_fast)
    m3 = (res2 > 0.01 * span0) & (dev < 0.5 * span0)
    if np.count_nonzero(m3) >= 3:
        k_slow, tau_slow = _log_linear_fit(env_t[m3], res2[m3])
    res1 = dev - k_slow * np.exp(-env_t / tau_slow)
    m2 = (res1 > 0.05 * span0) & (env_t < 3.0 * tau_fast)
    if np.count_nonzero(m2) >= 3:
        k_fast, tau_fast = _log_linear_fit(env_t[m2], res1[m2])
    if tau_slow <= 0 or tau_fast <= 0:
        return None, None, None, None
    if tau_fast > tau_slow:
        tau_slow, tau_fast = tau_fast, tau_slow
        k_slow, k_fast = k_fast, k_slow
    return tau_slow, tau_fast, k_slow, k_fast


def fit_recovery_constant(
    t: np.ndarray, values: np.ndarray, final: float | None = None
) -> tuple[float | None, float | None]:
    """(amplitude, tau) of an exponential approach to a final level.

    Fits the gap final - values on its 10 to 90 percent amplitude window;
    returns (None, None) when the trace does not rise toward the level.
    """
    if t.size < 10:
        return None, None
    if final is None:
        final = float(values[-max(1, values.size // 10):].mean())
    gap = final - values
    span = float(gap[0])
    if span <= 0 or not np.all(np.isfinite(gap)):
        return None, None
    mask = (gap > 0.1 * span) & (gap < 0.9 * span)
    if np.count_nonzero(mask) < 3:
        return None, None
    k, tau = _log_linear_fit(t[mask] - t[0], gap[mask])
    if tau <= 0:
        return None, None
    return k, tau


def envelope_metrics(
    ts: TimeSeries, t_start: float = 0.0, carrier_period: float = 0.02
) -> EnvelopeSummary:
    """Summary features of the current and voltage traces from t_start on.

    Sustained levels are means over the final tenth of the segment.  Decay
    constants come from the two-stage peel of the cycle-mean envelope; for
    the classic short-circuit trace they land on the transient and
    sub-transient constants.
    """
    t_all = ts.t
    sel = t_all >= t_start - 1e-12
    if not np.any(sel):
        return EnvelopeSummary()
    t = t_all[sel] - t_all[sel][0]
    i_d, i_q = ts["i_d"][sel], ts["i_q"][sel]
    v_mag = np.hypot(ts["v_d"][sel], ts["v_q"][sel])
    i_mag = np.hypot(i_d, i_q)
    tail = max(1, i_mag.size // 10)

    peak = float(i_mag.max())
    sustained = float(i_mag[-tail:].mean())
    steady_v = float(v_mag[-tail:].mean())

    env_t, env = cycle_mean_envelope(t, i_d, i_q, carrier_period)
    if env.size == 0:
        return EnvelopeSummary(
            peak_current=peak, sustained_current=sustained,
            steady_terminal_voltage=steady_v,
        )
    final_env = float(env[-max(1, env.size // 10):].mean())
    span0 = float(env.max()) - final_env

    scale = max(abs(final_env), 1.0)
    if span0 <= 1e-6 * scale:
        return EnvelopeSummary(
            peak_current=peak, sustained_current=sustained,
            settling_time=0.0, steady_terminal_voltage=steady_v,
        )
    outside = np.abs(env - final_env) > 0.02 * span0
    idx = np.nonzero(outside)[0]
    settling = 0.0 if idx.size == 0 else float(env_t[min(idx[-1] + 1, env_t.size - 1)])

    tau_slow, tau_fast, k_slow, k_fast = peel_decay_constants(env_t, env, final_env)
    initial_env = None
    if tau_slow is not None:
        initial_env = final_env + k_slow + (k_fast if k_fast is not None else 0.0)
    return EnvelopeSummary(
        peak_current=peak,
        sustained_current=sustained,
        initial_envelope=initial_env,
        settling_time=settling,
        steady_terminal_voltage=steady_v,
        tau_slow=tau_slow,
        tau_fast=tau_fast,
    )
