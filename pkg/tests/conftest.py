"""Shared fixtures: the polynomial panel used across the suite."""

import pytest

from wudlab.poly import IntPoly


@pytest.fixture(scope="session")
def phi_poly():
    return IntPoly((-1, 1))


@pytest.fixture(scope="session")
def sigma_poly():
    return IntPoly((1, 1))


@pytest.fixture(scope="session")
def quad_poly():
    return IntPoly((1, 0, 1))  # T^2 + 1


@pytest.fixture(scope="session")
def poly_panel(phi_poly, sigma_poly, quad_poly):
    return [phi_poly, sigma_poly, quad_poly]
