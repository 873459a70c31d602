import re
import sys

import pytest

import implogic as il


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"test_criterion_(\d+)\w*", report.nodeid)
    if not match:
        return
    status = "PASS" if report.passed else "FAIL"
    name = report.nodeid.split("::")[-1]
    sys.stderr.write(f"\n[acceptance] criterion {match.group(1)}: {status} ({name})\n")


@pytest.fixture
def bottom_spec():
    return il.bottom_device_spec()


@pytest.fixture
def top_spec():
    return il.top_device_spec()


@pytest.fixture
def ideal_spec():
    return il.ideal_device_spec()


@pytest.fixture
def sinh_spec():
    iv = il.sinh_iv_from_conductances(115e-6, 10e-6, 1.5, 1.5)
    return il.MemristorSpec(v_set_min=1.5, v_set_max=1.5, v_reset_min=-1.5,
                            v_reset_max=-2.2, g_on=115e-6, g_off=10e-6,
                            iv_model=iv)


@pytest.fixture
def default_stack():
    return il.build_default_stack()


@pytest.fixture
def adder_stack():
    return il.build_adder_stack()


@pytest.fixture
def ideal_specs(ideal_spec):
    return {"bottom": ideal_spec, "top": ideal_spec}


@pytest.fixture
def ideal_configs(ideal_spec):
    return il.default_configs(ideal_spec)


@pytest.fixture
def off_states(default_stack):
    return {c: il.DeviceState(il.Logic.OFF) for c in default_stack.usable_cells()}
