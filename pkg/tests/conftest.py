from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# shared oracles, written independently of the package

def dense_kron_sum(mats) -> np.ndarray:
    """sum_i I x .. x A_i x .. x I with the first index fastest (np.kron)."""
    sizes = [M.shape[0] for M in mats]
    total = np.zeros((int(np.prod(sizes)),) * 2, dtype=complex)
    for i, M in enumerate(mats):
        term = np.ones((1, 1))
        for j in reversed(range(len(mats))):
            term = np.kron(term, M if j == i else np.eye(sizes[j]))
        total += term
    return total


def fvec(X) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def random_stable(rng, n, hermitian=False, shift=None):
    """Random matrix with spectrum in the right half plane."""
    M = rng.standard_normal((n, n))
    if hermitian:
        M = M @ M.T + n * np.eye(n)
        return M
    return M / np.sqrt(n) + (shift if shift is not None else 3.0) * np.eye(n)
