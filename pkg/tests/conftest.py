import pytest

from stickslip import ForcingProfile, SimParams, convergence_study, find_periodic

# (criterion number, passed, detail) collected by the ``criterion`` fixture
_ACCEPTANCE = []


@pytest.fixture(scope="session")
def single():
    """V(t) = (0.5 sin 2 pi t, 0): sup|V'| = pi."""
    return ForcingProfile(sin_coeffs=[[0.5, 0.0]])


@pytest.fixture(scope="session")
def two_d():
    """Two harmonics in both components; the orbit leaves the x-axis."""
    return ForcingProfile(cos_coeffs=[[0.0, 0.4], [0.1, 0.0]], sin_coeffs=[[0.5, 0.0], [0.0, 0.15]])


@pytest.fixture(scope="session")
def orbit_k100(single):
    return find_periodic(SimParams(0.3, k=100.0), single, fp_tol=1e-10)


@pytest.fixture(scope="session")
def orbit_k1e3(single):
    return find_periodic(SimParams(0.3, k=1e3), single, fp_tol=1e-10)


@pytest.fixture(scope="session")
def orbit_k1e4(single):
    return find_periodic(SimParams(0.3, k=1e4), single, fp_tol=1e-10)


@pytest.fixture(scope="session")
def orbit_filippov(single):
    return find_periodic(SimParams(0.3), single, fp_tol=1e-10)


@pytest.fixture(scope="session")
def study(single, orbit_filippov):
    return convergence_study(SimParams(0.3), single, [10.0, 100.0, 1e3], reference=orbit_filippov, workers=2)


@pytest.fixture
def criterion():
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))
        assert passed, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
