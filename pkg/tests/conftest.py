import pytest
from hypothesis import HealthCheck, settings

from stark_packet import (
    InitialCondition,
    TimeGrid,
    evolve_psi_ode,
    exponential_packet,
    make_params,
    tabulated_packet,
)

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TRIPLES = {"blue": (5.0, 0.1), "black": (0.1, 5.0), "red": (3.0, 0.9)}


@pytest.fixture(scope="session")
def params():
    return make_params()


@pytest.fixture(scope="session")
def triple_runs(params):
    """psi series on the default grid for the three reference triples."""
    grid = TimeGrid.from_horizon(10.0, 1e-3)
    out = {}
    for key, (d, D) in TRIPLES.items():
        packet = exponential_packet(d, D, params)
        out[key] = (packet, evolve_psi_ode(params, packet, grid))
    return out


@pytest.fixture(scope="session")
def undriven_run(params):
    """Zero packet with the emitter fully excited: free spontaneous decay."""
    packet = tabulated_packet([-1.0, 0.0], [0.0, 0.0], 0.0, params)
    grid = TimeGrid.from_horizon(10.0, 1e-3)
    return packet, evolve_psi_ode(params, packet, grid, InitialCondition(psi0=1 + 0j))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
