import random

import pytest

from mcescrow.keygen import PROFILES, key_gen

TOY_P, TOY_Q, TOY_S = 11, 23, 7


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def toy_keys():
    return key_gen(TOY_P, TOY_Q, random.Random(0), s=TOY_S, witness_p=3, witness_q=3)


@pytest.fixture
def toy_params():
    return PROFILES["toy"]


@pytest.fixture(scope="session")
def desk_keys():
    from mcescrow.keygen import generate_keypair

    return generate_keypair(PROFILES["desk"], random.Random(64))


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[number] = (title, report.outcome.upper())


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"CRITERION {number} {verdict} {title}")
