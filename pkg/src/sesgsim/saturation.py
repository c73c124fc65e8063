"""Froelich-type magnetic saturation of the d-axis magnetising path.

The open-circuit characteristic is approximated by the two-parameter
hyperbola psi = I_f/(a + b*I_f).  Fitting needs exactly two anchor points of
the measured curve, one low on the knee and one high, so no regression
machinery is involved.  During simulation the air-gap flux magnitude
psi_t = sqrt(psi_d^2 + psi_q^2) is converted to an equivalent field current
by inverting the hyperbola, which collapses to a closed form for the
saturated magnetising reactance:

    x_md(sat) = (1 - b*psi_t)/a,  clamped from above at x_md(unsat)

The clamp represents the air-gap line: the hyperbola is a knee-region fit
whose initial slope 1/a need not match the unsaturated reactance.  Only the
d-axis saturates; q-axis quantities are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import FitError, ParameterError, SaturationRangeError
from .params import DerivedParameters, parallel

ANCHOR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FroelichCurve:
    """Saturation constants plus the anchor points they came from.

    ``anchor_low`` and ``anchor_high`` are (field current, flux linkage)
    pairs in per-unit; they are None when the constants were supplied
    directly instead of fitted.  ``x_md_unsat`` is needed for the air-gap
    line clamp; it may be attached later via ``dataclasses.replace``.
    """

    a: float
    b: float
    anchor_low: tuple[float, float] | None = None
    anchor_high: tuple[float, float] | None = None
    x_md_unsat: float | None = None

    def __post_init__(self):
        if self.a <= 0:
            raise FitError(f"Froelich constant a must be positive, got {self.a}")
        if self.b < 0:
            raise FitError(f"Froelich constant b must be non-negative, got {self.b}")
        for anchor in (self.anchor_low, self.anchor_high):
            if anchor is None:
                continue
            i_f, psi = anchor
            err = abs(evaluate_occ(self, i_f) - psi)
            if err > ANCHOR_TOLERANCE:
                raise FitError(
                    f"curve does not interpolate anchor ({i_f}, {psi}): "
                    f"residual {err:.3e}"
                )

    @property
    def flux_asymptote(self) -> float:
        """Upper bound of representable flux, 1/b (inf when b = 0)."""
        return float("inf") if self.b == 0 else 1.0 / self.b


def fit_froelich(
    anchor_low: tuple[float, float],
    anchor_high: tuple[float, float],
    x_md_unsat: float | None = None,
) -> FroelichCurve:
    """Two-point fit of the saturation hyperbola.

    With gamma = I_fl/psi_l the two interpolation conditions solve in closed
    form: b = (I_fu - gamma*psi_u)/(psi_u*(I_fu - I_fl)), a = gamma - b*I_fl.
    The anchors must exhibit a saturating shape (secant slope decreasing),
    otherwise b would come out non-positive.
    """
    i_fl, psi_l = anchor_low
    i_fu, psi_u = anchor_high
    if not (0 < i_fl < i_fu):
        raise FitError(f"anchor field currents must satisfy 0 < {i_fl} < {i_fu}")
    if not (0 < psi_l < psi_u):
        raise FitError(f"anchor flux values must satisfy 0 < {psi_l} < {psi_u}")
    if psi_l / i_fl <= psi_u / i_fu:
        raise FitError(
            "anchors do not saturate: secant slope must decrease from the "
            f"low anchor ({psi_l / i_fl:.4f}) to the high anchor "
            f"({psi_u / i_fu:.4f})"
        )
    gamma = i_fl / psi_l
    b = (i_fu - gamma * psi_u) / (psi_u * (i_fu - i_fl))
    a = gamma - b * i_fl
    if b <= 0 or a <= 0:
        raise FitError(f"degenerate fit: a = {a}, b = {b}")
    return FroelichCurve(
        a=a, b=b, anchor_low=(i_fl, psi_l), anchor_high=(i_fu, psi_u),
        x_md_unsat=x_md_unsat,
    )


def evaluate_occ(c: FroelichCurve, i_f: float) -> float:
    """Flux linkage on the fitted open-circuit characteristic."""
    if i_f < 0:
        raise SaturationRangeError(f"field current must be non-negative, got {i_f}")
    return i_f / (c.a + c.b * i_f)


def equivalent_field_current(c: FroelichCurve, psi_t: float) -> float:
    """Invert the characteristic: field current producing flux psi_t."""
    _check_flux_range(c, psi_t)
    return c.a * psi_t / (1.0 - c.b * psi_t)


def saturated_xmd(c: FroelichCurve, psi_t: float) -> float:
    """Saturated d-axis magnetising reactance at air-gap flux psi_t.

    The ratio of saturated to unsaturated flux at the equivalent field
    current reduces to (1 - b*psi_t)/a; the clamp keeps the result on the
    air-gap line at low flux.
    """
    if c.x_md_unsat is None:
        raise ParameterError("curve carries no x_md_unsat; cannot clamp")
    _check_flux_range(c, psi_t)
    return min(c.x_md_unsat, (1.0 - c.b * psi_t) / c.a)


def _check_flux_range(c: FroelichCurve, psi_t: float) -> None:
    if psi_t < 0:
        raise SaturationRangeError(f"flux magnitude must be non-negative, got {psi_t}")
    if psi_t >= c.flux_asymptote:
        raise SaturationRangeError(
            f"flux {psi_t:.6f} at or beyond the Froelich asymptote "
            f"{c.flux_asymptote:.6f}; state is blowing up"
        )


def rescale_saturated_parameters(
    d: DerivedParameters, x_md_sat: float
) -> DerivedParameters:
    """Parameter set with the d-axis magnetising reactance replaced.

    The d-axis composite reactances are rebuilt from x_md_sat with the field
    and damper branch reactances unchanged, and the d-axis time constants
    are refreshed to stay consistent with the new composites.  T''_d0 can
    only be recomputed when the damper resistance is known; under the
    override path it is kept and only the short-circuit constant follows the
    new reactance ratio.  Everything on the q-axis passes through untouched.
    """
    if not 0 < x_md_sat <= d.x_md_unsat * (1.0 + 1e-12):
        raise ParameterError(
            f"x_md_sat = {x_md_sat} outside (0, x_md_unsat = {d.x_md_unsat}]"
        )
    if x_md_sat == d.x_md:
        return d
    xd = x_md_sat + d.xls
    xd_p = parallel(x_md_sat, d.x_f) + d.xls
    xd_pp = parallel(x_md_sat, d.x_f, d.x_1d) + d.xls
    updates: dict[str, float] = {
        "x_md": x_md_sat, "xd": xd, "xd_p": xd_p, "xd_pp": xd_pp,
    }
    if d.Td0_p is not None:
        td0_p = (d.x_f + x_md_sat) / (d.rf * d.omega_e)
        updates["Td0_p"] = td0_p
        updates["Td_p"] = td0_p * xd_p / xd
        td0_pp = d.Td0_pp
        if d.r_1d is not None:
            td0_pp = (d.x_1d + xd_p) / (d.r_1d * d.omega_e)
            updates["Td0_pp"] = td0_pp
        if td0_pp is not None:
            updates["Td_pp"] = td0_pp * xd_pp / xd_p
    return replace(d, **updates)
