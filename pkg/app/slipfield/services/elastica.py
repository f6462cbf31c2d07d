"""Isotropic linear elasticity and Peach-Koehler forces in 3D."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import FrameError

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"vector components must be finite, got {self}")

    @classmethod
    def from_array(cls, a) -> "Vec3":
        a = np.asarray(a, dtype=float).reshape(3)
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "Vec3") -> float:
        return float(self.as_array() @ other.as_array())

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class SymTensor3:
    """Symmetric 3x3 tensor stored by its six independent components."""

    s11: float = 0.0
    s22: float = 0.0
    s33: float = 0.0
    s12: float = 0.0
    s13: float = 0.0
    s23: float = 0.0

    @classmethod
    def from_matrix(cls, m) -> "SymTensor3":
        """Symmetric part of a 3x3 array."""
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {m.shape}")
        s = 0.5 * (m + m.T)
        return cls(s[0, 0], s[1, 1], s[2, 2], s[0, 1], s[0, 2], s[1, 2])

    @classmethod
    def identity(cls) -> "SymTensor3":
        return cls(1.0, 1.0, 1.0)

    def as_matrix(self) -> np.ndarray:
        return np.array([
            [self.s11, self.s12, self.s13],
            [self.s12, self.s22, self.s23],
            [self.s13, self.s23, self.s33],
        ])

    def trace(self) -> float:
        return self.s11 + self.s22 + self.s33

    def contract(self, other: "SymTensor3") -> float:
        """a : b = a_ij b_ij."""
        return float(np.sum(self.as_matrix() * other.as_matrix()))

    def apply(self, v: Vec3) -> Vec3:
        return Vec3.from_array(self.as_matrix() @ v.as_array())


@dataclass(frozen=True)
class IsotropicElasticity:
    lam: float
    mu: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    @property
    def c_star(self) -> float:
        """Coercivity constant: w(e) >= c_star/2 |e|^2."""
        return 2.0 * self.mu


def strain(grad_u) -> SymTensor3:
    """e_ij = (d_j u_i + d_i u_j) / 2 from the displacement gradient grad_u[i, j] = d_j u_i."""
    grad_u = np.asarray(grad_u, dtype=float)
    if not np.all(np.isfinite(grad_u)):
        raise ValueError("displacement gradient must be finite")
    return SymTensor3.from_matrix(grad_u)


def isotropic_stress(e: SymTensor3, C: IsotropicElasticity) -> SymTensor3:
    return SymTensor3.from_matrix(C.lam * e.trace() * np.eye(3) + 2.0 * C.mu * e.as_matrix())


def strain_energy_density(e: SymTensor3, C: IsotropicElasticity) -> float:
    return 0.5 * C.lam * e.trace() ** 2 + C.mu * e.contract(e)


def _require_unit(v: Vec3, name: str) -> None:
    if abs(v.norm() - 1.0) > UNIT_TOL:
        raise FrameError(f"{name} must be a unit vector, |{name}| = {v.norm():.15g}")


def pk_force(sigma: SymTensor3, b: Vec3, tau: Vec3) -> Vec3:
    """Peach-Koehler force per unit length on a line with tangent tau: tau x (sigma b)."""
    _require_unit(tau, "tau")
    return Vec3.from_array(np.cross(tau.as_array(), sigma.apply(b).as_array()))


def glide_force(sigma: SymTensor3, b: Vec3, nu: Vec3) -> float:
    """Glide component (sigma nu) . b, nu the slip-plane normal."""
    _require_unit(nu, "nu")
    return sigma.apply(nu).dot(b)


def random_frame(rng: np.random.Generator) -> tuple[Vec3, Vec3, Vec3]:
    """Random right-handed orthonormal frame (n, tau, nu), n = tau x nu."""
    R = Rotation.random(None, rng).as_matrix()
    n, tau, nu = (Vec3.from_array(R[:, k]) for k in range(3))
    return n, tau, nu
