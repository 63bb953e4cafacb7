import functools

import pytest

from rearrangement import kernels

# criterion number -> list of (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}
ACCEPTANCE_TITLES = {}


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def criterion(number, title):
    """Record the outcome of an acceptance test under its criterion number.

    The test may return a short detail string. Failures are recorded and re-raised.
    """
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            ACCEPTANCE_TITLES[number] = title
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE.setdefault(number, []).append((False, f"{fn.__name__}: {type(exc).__name__}"))
                raise
            ACCEPTANCE.setdefault(number, []).append((True, detail or fn.__name__))
        return wrapper
    return decorate


def acceptance_lines():
    lines = []
    for number in sorted(ACCEPTANCE):
        results = ACCEPTANCE[number]
        ok = all(passed for passed, _ in results)
        if len(results) == 1:
            detail = results[0][1]
        else:
            bad = [d for passed, d in results if not passed]
            detail = f"{sum(p for p, _ in results)}/{len(results)} checks passed"
            if bad:
                detail += "; failed: " + ", ".join(bad)
        lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {ACCEPTANCE_TITLES[number]} ({detail})")
    return lines


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
