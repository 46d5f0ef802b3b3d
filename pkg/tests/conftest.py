"""Shared oracles: high-order sphere quadrature built from Gauss-Legendre
nodes in the polar angle and a uniform trapezoid in azimuth (exact for
azimuthal orders below the grid size)."""

import numpy as np
import pytest


def sphere_quadrature(n_polar=40):
    """Nodes (unit vectors) and weights with sum(w) = 4*pi."""
    x, wx = np.polynomial.legendre.leggauss(n_polar)
    theta = np.arccos(x)
    n_az = 2 * n_polar + 1
    phi = 2.0 * np.pi * np.arange(n_az) / n_az
    T, P = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack(
        [np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1
    ).reshape(-1, 3)
    w = np.repeat(wx, n_az) * (2.0 * np.pi / n_az)
    return dirs, w


@pytest.fixture(scope="session")
def squad():
    return sphere_quadrature(40)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Pass/fail lines recorded by the acceptance suite; echoed after the run so
# they are visible without -s despite output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
