"""Separate and self-excited field supplies and the build-up fixed point."""

import numpy as np
import pytest

import sesgsim as s
from sesgsim.model import assemble_reduced


def test_separate_mode_ignores_terminals(derived):
    cfg = s.ExcitationConfig(mode="separate", Ef_setpoint=0.7)
    assert s.excitation_emf(cfg, 0.0, 0.0, derived) == 0.7
    assert s.excitation_emf(cfg, 5.0, -3.0, derived) == 0.7


def test_self_excited_gain_and_ceiling(derived):
    cfg = s.ExcitationConfig(mode="self_excited", rectifier_gain=2.0, Ef_ceiling=1.5)
    ef = s.excitation_emf(cfg, 0.3, 0.4, derived)
    # unsaturated parameters: the x_md ratio is one
    assert abs(ef - 2.0 * 0.5) < 1e-15
    assert s.excitation_emf(cfg, 3.0, 4.0, derived) == 1.5, "ceiling must clamp"
    assert s.excitation_emf(cfg, 0.0, 0.0, derived) == 0.0


def test_self_excited_tracks_saturated_xmd(derived, curve):
    import dataclasses
    c = dataclasses.replace(curve, x_md_unsat=derived.x_md_unsat)
    d_sat = s.rescale_saturated_parameters(derived, s.saturated_xmd(c, 1.0))
    cfg = s.ExcitationConfig(mode="self_excited", rectifier_gain=2.0, Ef_ceiling=10.0)
    ef_unsat = s.excitation_emf(cfg, 0.0, 1.0, derived)
    ef_sat = s.excitation_emf(cfg, 0.0, 1.0, d_sat)
    print("unsat", ef_unsat, "sat", ef_sat)
    assert ef_sat < ef_unsat, "saturation must weaken the feedback"
    assert abs(ef_sat - 2.0 * d_sat.x_md / derived.x_md_unsat) < 1e-15


def test_default_rectifier_gain():
    assert abs(s.DEFAULT_RECTIFIER_GAIN - 1.35 * 415.0 / 220.0) < 1e-12


def test_residual_flux_required():
    with pytest.raises(s.ConfigurationError) as err:
        s.ExcitationConfig(mode="self_excited", residual_flux=0.0)
    assert "residual" in str(err.value)


def test_initial_state(derived):
    assert s.excitation.initial_state(s.ExcitationConfig()) == s.FluxState()
    cfg = s.ExcitationConfig(mode="self_excited", residual_flux=0.07)
    st = s.excitation.initial_state(cfg)
    assert st.psi_f == 0.07 and st.psi_d == 0.0
    seeded = s.excitation.initial_state(
        s.ExcitationConfig(mode="self_excited", residual_flux=0.07,
                           seed_stator_flux=True),
        derived,
    )
    want = 0.07 * derived.x_md / (derived.x_md + derived.x_f)
    assert abs(seeded.psi_d - want) < 1e-15


def test_critical_gain(derived):
    k_crit = s.critical_rectifier_gain(derived)
    print("critical gain:", k_crit)
    assert abs(k_crit - 1.0) < 1e-9, f"critical gain {k_crit}, expected 1.0"


def test_growth_sign_around_critical(derived):
    m_red, b_red, gains = assemble_reduced(derived)
    m0 = m_red[:2, :2]
    feedback = b_red[0] * np.outer([1.0, 0.0], gains[:2])
    for k, sign in ((0.95, -1.0), (1.05, 1.0)):
        lam = np.max(np.linalg.eigvals(m0 + k * feedback).real)
        print(f"k={k}: max Re lambda = {lam:.5f}")
        assert lam * sign > 0, f"k={k}: growth rate {lam} has the wrong sign"


def test_fixed_point(derived, curve):
    v = s.self_excitation_fixed_point(curve, derived.x_md_unsat,
                                      s.DEFAULT_RECTIFIER_GAIN)
    print("fixed point:", v)
    assert abs(v - 1.988664685) < 1e-6
    # closed form: occ(c*v) = v with the curve unclamped at the fixed point
    c = s.DEFAULT_RECTIFIER_GAIN / derived.x_md_unsat
    want = (1.0 - curve.a / c) / curve.b
    assert abs(v - want) < 1e-9


def test_fixed_point_subcritical(derived, curve):
    with pytest.raises(s.ConfigurationError):
        s.self_excitation_fixed_point(curve, derived.x_md_unsat, 0.9)
