import pytest

import sesgsim as s


@pytest.fixture(scope="session")
def machine():
    """Reference 2 kVA alternator with illustrative damper resistances."""
    return s.MachineParameters(
        Xd=1.7085, Xd_p=0.568, Xd_pp=0.177,
        Xq=0.9831, Xq_p=0.800, Xq_pp=0.528,
        Xls=0.085, Ra=0.003, Rf=0.03,
        rated_line_voltage=415.0, rated_current=3.3,
        rated_speed_rpm=1500.0, electrical_frequency_hz=50.0,
        field_base_voltage=220.0, field_base_current=0.7,
        r_1d=0.04, r_1q=0.06, r_2q=0.06,
    )


@pytest.fixture(scope="session")
def derived(machine):
    return s.derive_parameters(machine)


@pytest.fixture(scope="session")
def curve():
    """Reference open-circuit saturation constants."""
    return s.FroelichCurve(a=0.48366, b=0.3478)
