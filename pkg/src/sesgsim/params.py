"""Machine data in per-unit and derivation of equivalent-circuit parameters.

The machine is described by the quantities a standard test programme yields:
synchronous, transient and sub-transient reactances on both axes, the stator
leakage reactance, and the armature and field winding resistances, all in
per-unit on the machine base.  The d-q flux-linkage model needs the element
reactances of the two-axis equivalent circuit (magnetising, field and damper
branches) and eight open/short-circuit time constants.  Element reactances
follow from the composite reactances by reciprocal subtraction; time
constants follow from branch reactances and winding resistances, with the
short-circuit constants tied to the open-circuit ones by reactance ratios.

Damper winding resistances cannot be measured by the simple tests, so the
three damper-branch time constants may instead be supplied directly as
overrides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigurationError, ParameterError

TIME_CONSTANT_NAMES = (
    "Td0_p", "Td0_pp", "Tq0_p", "Tq0_pp", "Td_p", "Td_pp", "Tq_p", "Tq_pp",
)


def parallel(*reactances: float) -> float:
    """Parallel combination of reactances."""
    return 1.0 / sum(1.0 / x for x in reactances)


def impedance_base(rated_line_voltage: float, rated_current: float) -> float:
    """Ohmic base from the nameplate, line voltage over sqrt(3) times rated current."""
    if rated_line_voltage <= 0 or rated_current <= 0:
        raise ConfigurationError("impedance base requires positive rated voltage and current")
    return rated_line_voltage / (math.sqrt(3.0) * rated_current)


def to_per_unit(value: float, base: float) -> float:
    """Convert an ohmic (or other absolute) quantity to per-unit."""
    if base == 0:
        raise ConfigurationError("per-unit conversion with zero base")
    return value / base


@dataclass(frozen=True)
class MachineParameters:
    """Standard-test machine data, per-unit on the machine base.

    ``inertia_constant`` is accepted for completeness of the nameplate record
    but the model runs at fixed speed and never uses it.  Damper resistances
    ``r_1d``, ``r_1q``, ``r_2q`` are optional; when absent the damper time
    constants must be supplied as overrides.
    """

    Xd: float
    Xd_p: float
    Xd_pp: float
    Xq: float
    Xq_p: float
    Xq_pp: float
    Xls: float
    Ra: float
    Rf: float
    rated_line_voltage: float = 415.0
    rated_current: float = 3.3
    rated_speed_rpm: float = 1500.0
    electrical_frequency_hz: float = 50.0
    field_base_voltage: float | None = None
    field_base_current: float | None = None
    inertia_constant: float | None = None
    r_1d: float | None = None
    r_1q: float | None = None
    r_2q: float | None = None

    @property
    def omega_e(self) -> float:
        """Base electrical angular frequency, rad/s."""
        return 2.0 * math.pi * self.electrical_frequency_hz


@dataclass(frozen=True)
class DerivedParameters:
    """Equivalent-circuit parameter set consumed by the dynamic model.

    Carries the element reactances alongside the composite ones so the
    saturation rescaling can rebuild the d-axis chain from a reduced
    magnetising reactance without touching the q-axis.  ``x_md_unsat`` keeps
    the unsaturated magnetising reactance for excitation-loop ratios.  Time
    constant fields are None until ``derive_time_constants`` fills them.
    """

    x_md: float
    x_mq: float
    x_f: float
    x_1d: float
    x_1q: float
    x_2q: float
    xd: float
    xd_p: float
    xd_pp: float
    xq: float
    xq_p: float
    xq_pp: float
    xls: float
    ra: float
    rf: float
    omega_e: float
    x_md_unsat: float
    r_1d: float | None = None
    r_1q: float | None = None
    r_2q: float | None = None
    Td0_p: float | None = None
    Td0_pp: float | None = None
    Tq0_p: float | None = None
    Tq0_pp: float | None = None
    Td_p: float | None = None
    Td_pp: float | None = None
    Tq_p: float | None = None
    Tq_pp: float | None = None

    def __post_init__(self):
        for name in ("x_md", "x_mq", "x_f", "x_1d", "x_1q", "x_2q"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"element reactance {name} must be positive")
        for name in TIME_CONSTANT_NAMES:
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ParameterError(f"time constant {name} must be positive")

    @property
    def has_time_constants(self) -> bool:
        return all(getattr(self, n) is not None for n in TIME_CONSTANT_NAMES)


def validate_machine(p: MachineParameters) -> list[str]:
    """Check the reactance chains and sign constraints.

    Returns a list of human-readable violations, empty when the data is
    usable.  Callers that need an exception wrap the result in a
    ParameterError or ConfigurationError.
    """
    v: list[str] = []
    if p.Xls <= 0:
        v.append("Xls must be positive")
    for name in ("Ra", "Rf"):
        if getattr(p, name) <= 0:
            v.append(f"{name} must be positive")
    if not (p.Xd > p.Xd_p > p.Xd_pp):
        v.append(
            "Xd_pp: reactance chain must satisfy Xd > Xd_p > Xd_pp, got "
            f"Xd={p.Xd} Xd_p={p.Xd_p} Xd_pp={p.Xd_pp}"
        )
    if not (p.Xq > p.Xq_p > p.Xq_pp):
        v.append(
            "Xq_pp: reactance chain must satisfy Xq > Xq_p > Xq_pp, got "
            f"Xq={p.Xq} Xq_p={p.Xq_p} Xq_pp={p.Xq_pp}"
        )
    if p.Xls > 0 and p.Xd_pp <= p.Xls:
        v.append(f"Xd_pp={p.Xd_pp} must exceed the leakage reactance Xls={p.Xls}")
    if p.Xls > 0 and p.Xq_pp <= p.Xls:
        v.append(f"Xq_pp={p.Xq_pp} must exceed the leakage reactance Xls={p.Xls}")
    if p.electrical_frequency_hz <= 0:
        v.append("electrical_frequency_hz must be positive")
    for name in ("r_1d", "r_1q", "r_2q"):
        r = getattr(p, name)
        if r is not None and r <= 0:
            v.append(f"{name}: damper resistance must be positive when given")
    return v


def _invert_branch(label: str, total: float, *known: float) -> float:
    """Reactance of the remaining parallel branch, by reciprocal subtraction."""
    recip = 1.0 / total - sum(1.0 / x for x in known)
    if recip <= 0:
        raise ParameterError(
            f"{label}: reciprocal subtraction gave a non-positive branch "
            f"reactance; the composite reactances violate the chain ordering"
        )
    return 1.0 / recip


def derive_element_reactances(p: MachineParameters) -> DerivedParameters:
    """Element reactances of the two-axis equivalent circuit.

    Magnetising reactances are the composites less leakage; the field and
    damper branch reactances come from unwinding the parallel combinations
    behind the transient and sub-transient values.  Time constants are left
    unfilled.
    """
    violations = validate_machine(p)
    if violations:
        raise ParameterError("; ".join(violations))
    x_md = p.Xd - p.Xls
    x_mq = p.Xq - p.Xls
    x_f = _invert_branch("d-axis transient decomposition", p.Xd_p - p.Xls, x_md)
    x_1d = _invert_branch("d-axis sub-transient decomposition", p.Xd_pp - p.Xls, x_md, x_f)
    x_1q = _invert_branch("q-axis transient decomposition", p.Xq_p - p.Xls, x_mq)
    x_2q = _invert_branch("q-axis sub-transient decomposition", p.Xq_pp - p.Xls, x_mq, x_1q)
    return DerivedParameters(
        x_md=x_md, x_mq=x_mq, x_f=x_f, x_1d=x_1d, x_1q=x_1q, x_2q=x_2q,
        xd=p.Xd, xd_p=p.Xd_p, xd_pp=p.Xd_pp,
        xq=p.Xq, xq_p=p.Xq_p, xq_pp=p.Xq_pp,
        xls=p.Xls, ra=p.Ra, rf=p.Rf,
        omega_e=p.omega_e, x_md_unsat=x_md,
        r_1d=p.r_1d, r_1q=p.r_1q, r_2q=p.r_2q,
    )


def composite_reactances(d: DerivedParameters) -> dict[str, float]:
    """Re-evaluate the composite reactances from the element set.

    Used as a round-trip check: the result must reproduce the machine input
    values to numerical precision.
    """
    return {
        "Xd": d.x_md + d.xls,
        "Xd_p": parallel(d.x_md, d.x_f) + d.xls,
        "Xd_pp": parallel(d.x_md, d.x_f, d.x_1d) + d.xls,
        "Xq": d.x_mq + d.xls,
        "Xq_p": parallel(d.x_mq, d.x_1q) + d.xls,
        "Xq_pp": parallel(d.x_mq, d.x_1q, d.x_2q) + d.xls,
    }


def derive_time_constants(
    p: MachineParameters,
    d: DerivedParameters,
    overrides: dict[str, float] | None = None,
) -> DerivedParameters:
    """Fill in the eight open/short-circuit time constants (seconds).

    The field constant always follows from Rf.  Damper-branch open-circuit
    constants need the damper resistances; when those are absent each of
    Td0_pp, Tq0_p, Tq0_pp must appear in ``overrides``.  Short-circuit
    constants are open-circuit constants scaled by reactance ratios.  The
    q-axis transient short-circuit constant uses the same ratio form as the
    other three; the direct branch form is dimensionally inconsistent and is
    not used (runs record this substitution in their metadata).  Any value in
    ``overrides`` passes through verbatim.
    """
    overrides = dict(overrides or {})
    unknown = sorted(set(overrides) - set(TIME_CONSTANT_NAMES))
    if unknown:
        raise ConfigurationError(
            [f"unknown time constant override {name!r}" for name in unknown]
        )
    we = p.omega_e
    t: dict[str, float | None] = {name: None for name in TIME_CONSTANT_NAMES}

    t["Td0_p"] = (d.x_f + d.x_md) / (p.Rf * we)
    if p.r_1d is not None:
        t["Td0_pp"] = (d.x_1d + p.Xd_p) / (p.r_1d * we)
    if p.r_1q is not None:
        t["Tq0_p"] = (d.x_1q + d.x_mq) / (p.r_1q * we)
    if p.r_2q is not None:
        t["Tq0_pp"] = (d.x_2q + d.x_mq) / (p.r_2q * we)

    for name, value in overrides.items():
        if value <= 0:
            raise ConfigurationError([f"time constant override {name} must be positive"])
        t[name] = value

    missing = [n for n in ("Td0_pp", "Tq0_p", "Tq0_pp") if t[n] is None]
    if missing:
        raise ConfigurationError(
            [
                f"time constant {n} is underdetermined: supply the matching "
                f"damper resistance or an explicit override" for n in missing
            ]
        )

    # Short-circuit constants from reactance ratios, unless overridden.
    if t["Td_p"] is None:
        t["Td_p"] = t["Td0_p"] * p.Xd_p / p.Xd
    if t["Td_pp"] is None:
        t["Td_pp"] = t["Td0_pp"] * p.Xd_pp / p.Xd_p
    if t["Tq_p"] is None:
        t["Tq_p"] = t["Tq0_p"] * p.Xq_p / p.Xq
    if t["Tq_pp"] is None:
        t["Tq_pp"] = t["Tq0_pp"] * p.Xq_pp / p.Xq_p

    return replace(d, **t)


def derive_parameters(
    p: MachineParameters, overrides: dict[str, float] | None = None
) -> DerivedParameters:
    """Full derivation: element reactances plus time constants."""
    return derive_time_constants(p, derive_element_reactances(p), overrides)
