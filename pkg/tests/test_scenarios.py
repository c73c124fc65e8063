"""Scenario builders, trace container and envelope analysis."""

import dataclasses
import math

import numpy as np
import pytest

import sesgsim as s

W_E = 2.0 * math.pi * 50.0


def _synthetic_trace(t, i_d, i_q):
    data = np.zeros((t.size, len(s.COLUMNS)))
    data[:, 0] = t
    data[:, s.COLUMNS.index("i_d")] = i_d
    data[:, s.COLUMNS.index("i_q")] = i_q
    return s.TimeSeries(data=data)


def test_builders():
    ssc = s.build_scenario("sudden_short_circuit")
    assert ssc.initial_load is None
    assert ssc.events[0].action == "short_circuit"
    soc = s.build_scenario("sudden_open_circuit", {"t_open": 0.7})
    assert soc.initial_load == 0.0
    assert soc.initial_state_mode == "short_circuit_steady"
    assert soc.events[0].time == 0.7
    se = s.build_scenario("self_excitation")
    assert se.events == ()
    step = s.build_scenario("load_step", {"R_L_final": 0.8})
    assert step.events[0].value == 0.8


def test_build_scenario_rejects_unknown():
    with pytest.raises(s.ConfigurationError):
        s.build_scenario("three_phase_fault")
    with pytest.raises(s.ConfigurationError):
        s.build_scenario("load_step", {"resistance": 1.0})


def test_event_validation():
    with pytest.raises(s.ConfigurationError):
        s.Event(0.1, "explode")
    with pytest.raises(s.ConfigurationError):
        s.Event(-0.1, "short_circuit")
    with pytest.raises(s.ConfigurationError):
        s.Event(0.1, "short_circuit", 3.0)  # takes no value
    with pytest.raises(s.ConfigurationError):
        s.Event(0.1, "set_load", -2.0)
    with pytest.raises(s.ConfigurationError):
        s.ScenarioScript(name="x", events=(s.Event(0.2, "short_circuit"),
                                           s.Event(0.1, "open_circuit")))


def test_scripts_are_pure_data():
    a = s.build_scenario("sudden_short_circuit", {"t_fault": 1.0})
    b = s.build_scenario("sudden_short_circuit", {"t_fault": 1.0})
    assert a == b
    with pytest.raises(dataclasses.FrozenInstanceError):
        a.initial_load = 1.0


def test_timeseries_schema():
    with pytest.raises(s.ConfigurationError):
        s.TimeSeries(data=np.zeros((3, 5)))
    with pytest.raises(s.ConfigurationError):
        bad = np.zeros((3, len(s.COLUMNS)))  # non-increasing time
        s.TimeSeries(data=bad)
    ts = _synthetic_trace(np.arange(4) * 0.1, np.zeros(4), np.zeros(4))
    with pytest.raises(KeyError):
        ts["psi_x"]
    assert ts.outcome == "completed"
    assert len(ts) == 4
    assert ts.final_state() == s.FluxState()


def test_envelope_single_exponential():
    t = np.arange(0.0, 1.0, 1e-4)
    i_d = 1.0 + 2.0 * np.exp(-t / 0.1)
    ts = _synthetic_trace(t, i_d, np.zeros_like(t))
    m = s.envelope_metrics(ts)
    print("tau_slow", m.tau_slow, "tau_fast", m.tau_fast,
          "settling", m.settling_time)
    assert m.tau_slow is not None
    assert abs(m.tau_slow - 0.1) < 1e-3, f"fitted {m.tau_slow}, expected 0.100"
    assert m.tau_fast is None, "no second time scale in a single exponential"
    assert 0.25 < m.settling_time < 0.55
    assert abs(m.initial_envelope - 3.0) < 0.05


def test_envelope_two_exponentials():
    t = np.arange(0.0, 1.5, 1e-4)
    env = 0.585 + 3.0 * np.exp(-t / 0.08) + 4.0 * np.exp(-t / 0.017)
    ts = _synthetic_trace(t, env, np.zeros_like(t))
    m = s.envelope_metrics(ts)
    print("taus:", m.tau_slow, m.tau_fast, " U0:", m.initial_envelope)
    assert abs(m.tau_slow - 0.08) / 0.08 < 0.1
    assert abs(m.tau_fast - 0.017) / 0.017 < 0.15
    assert abs(m.initial_envelope - 7.585) / 7.585 < 0.05


def test_envelope_rejects_carrier():
    # a rotating component at the electrical frequency must average away
    t = np.arange(0.0, 1.0, 1e-4)
    dc = 1.0 + 2.0 * np.exp(-t / 0.1)
    ts = _synthetic_trace(t, dc + 1.5 * np.cos(W_E * t),
                          1.5 * np.sin(W_E * t))
    env_t, env = s.cycle_mean_envelope(t, ts["i_d"], ts["i_q"], 0.02)
    resid = np.max(np.abs(env - (1.0 + 2.0 * np.exp(-env_t / 0.1))))
    print("carrier leakage:", resid)
    assert resid < 0.02, f"cycle mean must cancel the carrier, leaked {resid}"


def test_constant_trace_summary():
    t = np.arange(0.0, 1.0, 1e-3)
    ts = _synthetic_trace(t, np.full_like(t, 0.4), np.zeros_like(t))
    m = s.envelope_metrics(ts)
    assert m.settling_time == 0.0
    assert m.tau_slow is None and m.tau_fast is None
    assert abs(m.sustained_current - 0.4) < 1e-12


def test_recovery_fit():
    t = np.arange(0.0, 3.0, 1e-3)
    v = 1.0 - 0.9 * np.exp(-t / 0.33)
    k, tau = s.fit_recovery_constant(t, v)
    print("recovery fit:", k, tau)
    assert abs(tau - 0.33) / 0.33 < 0.01
    assert abs(k - 0.9) < 0.02
    flat_k, flat_tau = s.fit_recovery_constant(t, np.ones_like(t))
    assert flat_k is None and flat_tau is None


def test_sustained_current_ignores_q_axis(derived, machine):
    """The sustained short-circuit level depends on Ef and Xd only."""
    perturbed = s.derive_parameters(dataclasses.replace(machine, Xq_p=0.75))
    script = s.build_scenario("sudden_short_circuit", {"t_fault": 2.5})
    integ = s.IntegratorConfig(step_size=1e-4, duration=5.0)
    exc = s.ExcitationConfig(Ef_setpoint=1.0)
    sustained = []
    for d in (derived, perturbed):
        ts = s.simulate(d, exc, script, integ)
        sustained.append(s.envelope_metrics(ts, t_start=2.5).sustained_current)
    print("sustained:", sustained)
    assert abs(sustained[0] - sustained[1]) < 1e-3, (
        f"sustained current moved with a q-axis parameter: {sustained}"
    )
