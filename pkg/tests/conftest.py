import numpy as np
import pytest

from noisyent.qmat import ket_to_dm, kron


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_kron(a, b):
    """Kronecker product by explicit index loops."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def bits(index, n):
    return [(index >> (n - 1 - q)) & 1 for q in range(n)]


def brute_partial_trace(rho, keep, n):
    """Reduced matrix by summing over basis labels of the dropped qubits."""
    d_keep = 2 ** len(keep)
    out = np.zeros((d_keep, d_keep), dtype=complex)
    for i in range(2**n):
        for j in range(2**n):
            bi, bj = bits(i, n), bits(j, n)
            if any(bi[q] != bj[q] for q in range(n) if q not in keep):
                continue
            ki = int("".join(str(bi[q]) for q in keep), 2)
            kj = int("".join(str(bj[q]) for q in keep), 2)
            out[ki, kj] += rho[i, j]
    return out


def brute_partial_transpose(rho, subset, n):
    """Swap the row and column bits of every qubit in ``subset``."""
    out = np.zeros_like(rho)
    for i in range(2**n):
        for j in range(2**n):
            bi, bj = bits(i, n), bits(j, n)
            for q in subset:
                bi[q], bj[q] = bj[q], bi[q]
            out[int("".join(map(str, bi)), 2), int("".join(map(str, bj)), 2)] = rho[i, j]
    return out


def random_pure_dm(n, rng):
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return ket_to_dm(psi / np.linalg.norm(psi))


def random_product_mixture(n_terms, rng):
    """Fully separable four-qubit state: convex mixture of single-qubit products."""
    w = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros((16, 16), dtype=complex)
    for wk in w:
        rho += wk * kron(*(random_pure_dm(1, rng) for _ in range(4)))
    return rho


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
