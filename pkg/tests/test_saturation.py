"""Froelich saturation curve fitting and d-axis parameter rescaling."""

import numpy as np
import pytest

import sesgsim as s


def test_fit_exact_anchors():
    c = s.fit_froelich((1.0, 0.5), (3.0, 0.75))
    print("fit:", c.a, c.b)
    assert c.a == 1.0, f"a = {c.a}, expected exactly 1"
    assert c.b == 1.0, f"b = {c.b}, expected exactly 1"


def test_fit_interpolates_anchors():
    anchors = ((0.8, 0.9), (1.9, 1.35))
    c = s.fit_froelich(*anchors)
    for i_f, psi in anchors:
        got = s.evaluate_occ(c, i_f)
        assert abs(got - psi) < 1e-12, f"anchor ({i_f},{psi}) reproduced as {got}"


def test_reference_curve(curve):
    v = s.evaluate_occ(curve, 1.0)
    print("occ(1.0) =", v)
    assert abs(v - 1.202704) < 1e-5
    assert abs(v - 1.0 / (0.48366 + 0.3478)) < 1e-12


def test_monotone_concave(curve):
    i_f = np.linspace(0.0, 3.0, 301)
    psi = np.array([s.evaluate_occ(curve, x) for x in i_f])
    d1 = np.diff(psi)
    d2 = np.diff(d1)
    assert np.all(d1 > 0), "curve must rise monotonically on [0, 3]"
    assert np.all(d2 < 0), "curve must be concave on [0, 3]"


def test_occ_rejects_negative_current(curve):
    with pytest.raises(s.SaturationRangeError):
        s.evaluate_occ(curve, -0.1)


def test_saturated_xmd(curve, derived):
    import dataclasses
    c = dataclasses.replace(curve, x_md_unsat=derived.x_md_unsat)
    # low flux: the air-gap line wins and x_md clamps at the unsaturated value
    assert s.saturated_xmd(c, 0.0) == derived.x_md_unsat
    assert s.saturated_xmd(c, 0.1) == derived.x_md_unsat
    # rated flux: the curve takes over
    got = s.saturated_xmd(c, 1.0)
    want = (1.0 - 0.3478 * 1.0) / 0.48366
    print("x_md_sat(1.0) =", got)
    assert abs(got - want) < 1e-12
    assert abs(got - 1.348468) < 1e-5


def test_equivalent_current_consistency(curve, derived):
    import dataclasses
    c = dataclasses.replace(curve, x_md_unsat=derived.x_md_unsat)
    for psi in (0.9, 1.2, 1.6, 2.0):
        i_eq = s.equivalent_field_current(c, psi)
        xm = s.saturated_xmd(c, psi)
        assert abs(xm * i_eq - psi) < 1e-12, (
            f"psi={psi}: x_md_sat*I_f_eq = {xm * i_eq}, expected {psi}"
        )


def test_flux_beyond_asymptote(curve, derived):
    import dataclasses
    c = dataclasses.replace(curve, x_md_unsat=derived.x_md_unsat)
    print("asymptote:", c.flux_asymptote)
    with pytest.raises(s.SaturationRangeError):
        s.saturated_xmd(c, 1.0 / 0.3478)


def test_fit_rejects_bad_anchors():
    with pytest.raises(s.FitError):
        s.fit_froelich((1.0, 0.8), (2.0, 0.5))  # flux decreasing
    with pytest.raises(s.FitError):
        s.fit_froelich((1.0, 0.5), (3.0, 1.5))  # secant slope increasing
    with pytest.raises(s.FitError):
        s.fit_froelich((-1.0, 0.5), (3.0, 0.75))


def test_rescale(derived):
    d = derived
    x_sat = 1.3485
    r = s.rescale_saturated_parameters(d, x_sat)
    print("rescaled Xd", r.xd, "Xd_p", r.xd_p, "Xd_pp", r.xd_pp)
    assert abs(r.xd - (x_sat + d.xls)) < 1e-12
    assert abs(r.xd_p - (s.parallel(x_sat, d.x_f) + d.xls)) < 1e-12
    assert abs(r.xd_pp - (s.parallel(x_sat, d.x_f, d.x_1d) + d.xls)) < 1e-12
    assert abs(r.xd - 1.4335) < 1e-9
    # time constants follow the shrunken magnetising path
    assert abs(r.Td0_p - (d.x_f + x_sat) / (d.rf * d.omega_e)) < 1e-12
    assert abs(r.Td_p - r.Td0_p * r.xd_p / r.xd) < 1e-12
    assert abs(r.Td0_pp - (d.x_1d + r.xd_p) / (d.r_1d * d.omega_e)) < 1e-12
    # q axis untouched
    assert r.xq == d.xq and r.xq_p == d.xq_p and r.xq_pp == d.xq_pp
    assert r.Tq0_p == d.Tq0_p and r.Tq_pp == d.Tq_pp
    # unsaturated reference preserved
    assert r.x_md_unsat == d.x_md_unsat


def test_rescale_identity_shortcut(derived):
    assert s.rescale_saturated_parameters(derived, derived.x_md) is derived


def test_rescale_bounds(derived):
    with pytest.raises(s.ParameterError):
        s.rescale_saturated_parameters(derived, derived.x_md_unsat * 1.5)
    with pytest.raises(s.ParameterError):
        s.rescale_saturated_parameters(derived, 0.0)
