import numpy as np
import pytest

from slipfield.errors import FrameError
from slipfield.services.elastica import (
    IsotropicElasticity,
    SymTensor3,
    Vec3,
    glide_force,
    isotropic_stress,
    pk_force,
    random_frame,
    strain,
    strain_energy_density,
)


def _random_sym(rng) -> SymTensor3:
    return SymTensor3.from_matrix(rng.normal(size=(3, 3)))


def test_strain_symmetrizes_gradient():
    rotation = np.array([[0.0, 1.0, -2.0], [-1.0, 0.0, 0.5], [2.0, -0.5, 0.0]])
    shear = np.zeros((3, 3))
    shear[0, 2] = 0.4

    assert strain(rotation) == SymTensor3()
    assert strain(np.eye(3)) == SymTensor3.identity()
    assert strain(shear) == SymTensor3(s13=0.2)


def test_isotropic_stress():
    C = IsotropicElasticity(lam=2.0, mu=3.0)
    traceless = SymTensor3(s11=1.0, s22=-1.0, s12=0.5)

    np.testing.assert_allclose(isotropic_stress(SymTensor3.identity(), C).as_matrix(), 12.0 * np.eye(3))
    assert isotropic_stress(SymTensor3(), C) == SymTensor3()
    np.testing.assert_allclose(isotropic_stress(traceless, C).as_matrix(), 6.0 * traceless.as_matrix())


def test_strain_energy_density():
    assert strain_energy_density(SymTensor3(), IsotropicElasticity(1.0, 1.0)) == 0.0
    assert strain_energy_density(SymTensor3.identity(), IsotropicElasticity(0.0, 1.0)) == pytest.approx(3.0)


def test_energy_is_half_stress_contraction_and_coercive():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        C = IsotropicElasticity(lam=rng.uniform(0.0, 5.0), mu=rng.uniform(0.1, 5.0))
        e = _random_sym(rng)
        w = strain_energy_density(e, C)

        assert w == pytest.approx(0.5 * isotropic_stress(e, C).contract(e), rel=1e-12)
        assert w >= 0.5 * C.c_star * e.contract(e) - 1e-12


def test_screw_setting_forces():
    s, b1 = 0.7, 2.0
    sigma = SymTensor3(s13=s)
    b = Vec3(b1, 0.0, 0.0)

    force = pk_force(sigma, b, Vec3(1.0, 0.0, 0.0))

    np.testing.assert_allclose(force.as_array(), [0.0, -s * b1, 0.0])
    assert glide_force(sigma, b, Vec3(0.0, 0.0, 1.0)) == pytest.approx(s * b1)
    assert force.dot(Vec3(0.0, -1.0, 0.0)) == pytest.approx(s * b1)


def test_zero_stress_gives_zero_force():
    b = Vec3(1.0, 2.0, 3.0)

    assert pk_force(SymTensor3(), b, Vec3(0.0, 1.0, 0.0)) == Vec3(0.0, 0.0, 0.0)
    assert glide_force(SymTensor3(), b, Vec3(0.0, 0.0, 1.0)) == 0.0


def test_glide_component_of_pk_force_matches_glide_force():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        sigma = _random_sym(rng)
        b = Vec3.from_array(rng.normal(size=3))
        n, tau, nu = random_frame(rng)

        assert abs(pk_force(sigma, b, tau).dot(n) - glide_force(sigma, b, nu)) <= 1e-12


def test_pk_force_is_bilinear():
    rng = np.random.default_rng(9)
    s1, s2 = _random_sym(rng), _random_sym(rng)
    b1, b2 = (Vec3.from_array(rng.normal(size=3)) for _ in range(2))
    _, tau, _ = random_frame(rng)
    summed = SymTensor3.from_matrix(s1.as_matrix() + 2.0 * s2.as_matrix())

    np.testing.assert_allclose(
        pk_force(summed, b1, tau).as_array(),
        pk_force(s1, b1, tau).as_array() + 2.0 * pk_force(s2, b1, tau).as_array(),
        atol=1e-12,
    )
    np.testing.assert_allclose(
        pk_force(s1, Vec3.from_array(b1.as_array() + b2.as_array()), tau).as_array(),
        pk_force(s1, b1, tau).as_array() + pk_force(s1, b2, tau).as_array(),
        atol=1e-12,
    )


def test_non_unit_direction_is_rejected():
    with pytest.raises(FrameError):
        pk_force(SymTensor3(), Vec3(1.0, 0.0, 0.0), Vec3(0.0, 2.0, 0.0))
    with pytest.raises(FrameError):
        glide_force(SymTensor3(), Vec3(1.0, 0.0, 0.0), Vec3(0.0, 0.0, 0.9))


def test_negative_lame_constant_is_rejected():
    with pytest.raises(ValueError):
        IsotropicElasticity(lam=-1.0, mu=1.0)
