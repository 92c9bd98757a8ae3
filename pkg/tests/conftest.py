import numpy as np
import pytest

from dpwforge import loopalg as la

N = 16


def loop(terms, n=N, twisted=True):
    return la.TwistedLoop.from_terms(terms, n, twisted)


def cylinder_F(z, n=N):
    """F = exp((z/lam - conj(z) lam) sigma1), the closed-form unitary factor of the cylinder."""
    X = loop({-1: z * la.SIGMA1, 1: -np.conj(z) * la.SIGMA1}, n).coeffs
    return la.TwistedLoop(la.expm_coeffs(X, n), True)


def cylinder_B(z, n=N):
    X = loop({1: np.conj(z) * la.SIGMA1}, n).coeffs
    return la.TwistedLoop(la.expm_coeffs(X, n), True)


def sphere_factors(z, n=N):
    s = np.sqrt(1 + abs(z) ** 2)
    F = loop({0: la.I2 / s, -1: np.array([[0, z], [0, 0]]) / s, 1: np.array([[0, 0], [-np.conj(z), 0]]) / s}, n)
    B = loop({0: np.diag([1 / s, s]), 1: np.array([[0, 0], [np.conj(z) / s, 0]])}, n)
    return F, B


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = []


@pytest.fixture
def record():
    """record(criterion, ok, detail): log one acceptance line, reported at the end of the run."""
    def _record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
