"""Two-link planar manipulator in the vertical plane.

Standard Lagrangian model with link inertias taken about each joint axis:

    M(q) q'' + C(q, q') q' + G(q) = tau,    tau = kappa u

``q1`` is measured from the horizontal, ``q2`` relative to link 1. The
Coriolis matrix uses the Christoffel form so that ``dM/dt - 2C`` is
skew-symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class RobotParams:
    m1: float = 5.0
    m2: float = 2.0
    l1: float = 1.0
    l2: float = 0.75
    lc1: float = 0.5
    lc2: float = 0.375
    I1: float = 1.66
    I2: float = 0.37
    gravity: float = 9.81
    kappa: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        object.__setattr__(self, "kappa", np.array(self.kappa, dtype=float).reshape(2, 2))

    def validate(self) -> None:
        """Raise ``ValueError`` if a physical invariant is violated."""
        for name in ("m1", "m2", "l1", "l2", "lc1", "lc2", "I1", "I2"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.lc1 > self.l1 or self.lc2 > self.l2:
            raise ValueError("center-of-mass offset exceeds link length")
        if not np.isfinite(self.gravity) or self.gravity < 0:
            raise ValueError(f"gravity must be non-negative, got {self.gravity}")
        if not np.all(np.isfinite(self.kappa)):
            raise ValueError("kappa must be finite")
        if abs(np.linalg.det(self.kappa)) < 1e-12:
            raise ValueError("kappa must be invertible")

    def slender_rod_deviation(self) -> tuple[float, float]:
        """Relative gap between I_i and the uniform-rod value m_i l_i^2 / 3."""
        rod1 = self.m1 * self.l1**2 / 3.0
        rod2 = self.m2 * self.l2**2 / 3.0
        return abs(self.I1 - rod1) / rod1, abs(self.I2 - rod2) / rod2

    def with_kappa(self, kappa) -> RobotParams:
        return replace(self, kappa=np.array(kappa, dtype=float))

    def __eq__(self, other):
        if not isinstance(other, RobotParams):
            return NotImplemented
        scalars = ("m1", "m2", "l1", "l2", "lc1", "lc2", "I1", "I2", "gravity")
        return all(getattr(self, s) == getattr(other, s) for s in scalars) and np.array_equal(
            self.kappa, other.kappa
        )

    __hash__ = None


@dataclass(frozen=True)
class JointState:
    q: np.ndarray
    dq: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(2))
        object.__setattr__(self, "dq", np.asarray(self.dq, dtype=float).reshape(2))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.dq)))


def _coupling(p: RobotParams) -> float:
    return p.m2 * p.l1 * p.lc2


def mass_matrix(p: RobotParams, q) -> np.ndarray:
    c2 = np.cos(q[1])
    a = _coupling(p)
    m11 = p.I1 + p.I2 + p.m2 * p.l1**2 + 2.0 * a * c2
    m12 = p.I2 + a * c2
    return np.array([[m11, m12], [m12, p.I2]])


def mass_matrix_rate(p: RobotParams, q, dq) -> np.ndarray:
    """Time derivative of ``mass_matrix`` along a trajectory with velocity ``dq``."""
    h = _coupling(p) * np.sin(q[1])
    return np.array([[-2.0 * h * dq[1], -h * dq[1]], [-h * dq[1], 0.0]])


def coriolis_matrix(p: RobotParams, q, dq) -> np.ndarray:
    h = _coupling(p) * np.sin(q[1])
    return np.array([[-h * dq[1], -h * (dq[0] + dq[1])], [h * dq[0], 0.0]])


def gravity_vector(p: RobotParams, q) -> np.ndarray:
    g2 = p.m2 * p.lc2 * p.gravity * np.cos(q[0] + q[1])
    g1 = (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity * np.cos(q[0]) + g2
    return np.array([g1, g2])


def gravity_component_bound(p: RobotParams) -> float:
    """Bound on ``max_i |G_i(q)|`` (the infinity norm) over all configurations."""
    return (p.m1 * p.lc1 + p.m2 * p.l1 + p.m2 * p.lc2) * p.gravity


def gravity_bound(p: RobotParams) -> float:
    """Bound on the Euclidean norm ``||G(q)||`` via ``|G_1| + |G_2|``."""
    return (p.m1 * p.lc1 + p.m2 * p.l1 + 2.0 * p.m2 * p.lc2) * p.gravity


def solve2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve the 2x2 system ``a x = b`` via the adjugate."""
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if not np.isfinite(det) or abs(det) < 1e-300:
        raise FloatingPointError(f"singular 2x2 system (det={det})")
    return np.array(
        [(a[1, 1] * b[0] - a[0, 1] * b[1]) / det, (a[0, 0] * b[1] - a[1, 0] * b[0]) / det]
    )


def forward_dynamics(p: RobotParams, s: JointState, tau) -> np.ndarray:
    """Joint accelerations under applied joint torque ``tau``."""
    rhs = np.asarray(tau, dtype=float) - coriolis_matrix(p, s.q, s.dq) @ s.dq - gravity_vector(p, s.q)
    return solve2(mass_matrix(p, s.q), rhs)


def potential_energy(p: RobotParams, q) -> float:
    return float(
        (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity * np.sin(q[0])
        + p.m2 * p.lc2 * p.gravity * np.sin(q[0] + q[1])
    )


def energy_series(p: RobotParams, q: np.ndarray, dq: np.ndarray) -> np.ndarray:
    """Total mechanical energy for stacked states ``q, dq`` of shape ``(n, 2)``."""
    a = _coupling(p)
    c2 = np.cos(q[:, 1])
    m11 = p.I1 + p.I2 + p.m2 * p.l1**2 + 2.0 * a * c2
    m12 = p.I2 + a * c2
    v1, v2 = dq[:, 0], dq[:, 1]
    kinetic = 0.5 * (m11 * v1 * v1 + 2.0 * m12 * v1 * v2 + p.I2 * v2 * v2)
    potential = (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity * np.sin(q[:, 0]) + p.m2 * p.lc2 * p.gravity * np.sin(
        q[:, 0] + q[:, 1]
    )
    return kinetic + potential


def mechanical_energy(p: RobotParams, s: JointState) -> tuple[float, float]:
    """Return ``(kinetic, potential)`` in joules."""
    kinetic = 0.5 * float(s.dq @ mass_matrix(p, s.q) @ s.dq)
    return kinetic, potential_energy(p, s.q)

