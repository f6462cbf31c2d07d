import numpy as np
import pytest
from numpy.testing import assert_allclose

from slipfield.models.grid import Field2D, GridSpec, Profile1D
from slipfield.services.elliptic import (
    build_dtn,
    discrete_laplacian,
    elastic_energy,
    normal_derivative_S,
    solve_laplace,
)

SMALL = GridSpec(Nx=16, Ny=8)
MEDIUM = GridSpec(Nx=32, Ny=16)


def test_zero_data_gives_zero_field():
    field = solve_laplace(SMALL, Profile1D.constant(SMALL, 0.0), 0.0, 10.0)

    assert np.all(field.values == 0.0)


def test_uniform_traction_gives_linear_field():
    field = solve_laplace(SMALL, Profile1D.constant(SMALL, 0.0), 0.5, 10.0)

    expected = Field2D.from_function(SMALL, lambda X, Y: 0.05 * Y)
    assert_allclose(field.values, expected.values, atol=1e-12)


def test_elastic_energy_of_linear_field():
    field = Field2D.from_function(SMALL, lambda X, Y: 0.05 * Y)

    assert elastic_energy(field, 0.5, 10.0) == pytest.approx(-0.2, rel=1e-12)
    assert elastic_energy(Field2D.from_function(SMALL, lambda X, Y: 0 * X + 3.0), 0.0, 10.0) == 0.0


def test_normal_derivative_stencil():
    linear = Field2D.from_function(SMALL, lambda X, Y: 0.05 * Y)
    constant = Field2D.from_function(SMALL, lambda X, Y: 0 * X + 1.5)
    quadratic = Field2D.from_function(SMALL, lambda X, Y: Y ** 2)

    assert_allclose(normal_derivative_S(linear).values, 0.05, rtol=1e-12)
    assert_allclose(normal_derivative_S(constant).values, 0.0, atol=1e-14)
    assert_allclose(normal_derivative_S(quadratic).values, 0.0, atol=1e-14)


def test_laplacian_is_symmetric():
    M = discrete_laplacian(SMALL).matrix

    assert abs(M - M.T).max() == 0.0


def test_superposition():
    rng = np.random.default_rng(3)
    d1, d2 = rng.normal(size=(2, SMALL.Nx + 1))

    combined = solve_laplace(SMALL, d1 + d2, 0.7, 10.0)
    separate = solve_laplace(SMALL, d1, 0.2, 10.0).values + solve_laplace(SMALL, d2, 0.5, 10.0).values

    assert_allclose(combined.values, separate, atol=1e-10)


def test_mirror_symmetry():
    data = Profile1D.from_function(SMALL, lambda x: np.exp(x))

    field = solve_laplace(SMALL, data, 0.3, 10.0)
    mirrored = solve_laplace(SMALL, data.reflected(), 0.3, 10.0)

    assert_allclose(mirrored.values, field.values[:, ::-1], atol=1e-11)


def test_discrete_solution_minimises_quadratic_energy():
    grid = GridSpec(Nx=8, Ny=8)
    lap = discrete_laplacian(grid)
    rng = np.random.default_rng(11)
    rhs = lap.rhs(np.sin(grid.x), 0.5 / 10.0)
    solution = lap.solve_interior(rhs)
    best = lap.quadratic_energy(solution, rhs)

    for _ in range(50):
        delta = 1e-3 * rng.normal(size=solution.size)
        assert lap.quadratic_energy(solution + delta, rhs) > best


def test_dtn_reproduces_direct_normal_derivative():
    rng = np.random.default_rng(5)
    u_S = rng.normal(size=MEDIUM.Nx + 1)
    dtn = build_dtn(MEDIUM)

    direct = normal_derivative_S(solve_laplace(MEDIUM, u_S, 0.3, 10.0)).values

    assert_allclose(dtn.flux(u_S, 0.3, 10.0), direct, rtol=1e-9, atol=1e-9 * np.abs(direct).max())


def test_dtn_traction_response_is_unit():
    dtn = build_dtn(MEDIUM)

    assert_allclose(dtn.traction_response.values, 1.0, atol=1e-10)
    assert_allclose(dtn.flux(np.zeros(MEDIUM.Nx + 1), 0.5, 10.0), 0.05, atol=1e-11)


def test_dtn_annihilates_constants():
    A = build_dtn(MEDIUM).matrix

    assert np.abs(A @ np.ones(MEDIUM.Nx + 1)).max() <= 1e-9 * np.abs(A).max()


def test_dtn_is_weighted_symmetric_and_dissipative():
    dtn = build_dtn(MEDIUM)
    WA = dtn.weighted()
    rng = np.random.default_rng(7)

    assert np.abs(WA - WA.T).max() <= 1e-10 * np.abs(WA).max()
    for _ in range(100):
        v = rng.normal(size=MEDIUM.Nx + 1)
        v -= v.mean()
        assert v @ WA @ v < 0.0


@pytest.mark.parametrize("m", [1, 2])
def test_dtn_fourier_modes(m):
    grid = GridSpec(Nx=128, Ny=64)
    k = m * np.pi / grid.L
    mode = np.cos(k * (grid.x + grid.L))

    response = build_dtn(grid).matrix @ mode

    assert_allclose(response, -k * np.tanh(k * grid.H) * mode, atol=0.01 * k * np.tanh(k * grid.H))
