import math

import numpy as np
import pytest


def brute_dft(x, cycles, H):
    """Peak phasors of harmonics 1..H by direct summation (no FFT)."""
    x = np.asarray(x, dtype=float)
    N = len(x)
    n = np.arange(N)
    out = []
    for h in range(1, H + 1):
        ang = 2 * math.pi * h * cycles * n / N
        out.append(2 / N * (np.sum(x * np.cos(ang)) - 1j * np.sum(x * np.sin(ang))))
    return np.array(out)


def brute_thd(x, cycles, H):
    m = np.abs(brute_dft(x, cycles, H))
    return 100 * math.sqrt(np.sum(m[1:] ** 2)) / m[0]


ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip()
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
