import os

# acceptance criterion 8 is stated for a single-threaded run
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import time  # noqa: E402

import numpy as np  # noqa: E402
import pytest  # noqa: E402

FULL_SUITE_LIMIT = 60.0
ACCEPTANCE = {}
_START = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    def _record(number, name, passed, detail):
        ACCEPTANCE[number] = (name, bool(passed), detail)

    return _record


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _START
    if ACCEPTANCE:
        name, ok, detail = ACCEPTANCE.get(8, ("reproducibility", True, ""))
        within = elapsed < FULL_SUITE_LIMIT
        ACCEPTANCE[8] = (name, ok and within, f"{detail}; full suite {elapsed:.1f}s (limit {FULL_SUITE_LIMIT:.0f}s)")
        if not within and session.exitstatus == 0:
            session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] #{number} {name}: {detail}")
