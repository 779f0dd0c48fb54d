"""Numerical property suite behind ``nussbaum-pid verify``.

Each check returns a ``Check``; model functions are injectable so that
deliberately broken variants can be shown to fail.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import _kernel
from .controller import (
    ControllerParams,
    control_input,
    generalized_error,
    nussbaum,
    nussbaum_antiderivative,
    three_term_input,
)
from .dynamics import (
    RobotParams,
    coriolis_matrix,
    gravity_bound,
    gravity_vector,
    mass_matrix,
    mass_matrix_rate,
    energy_series,
    potential_energy,
)
from .simulation import SimConfig, _kernel_args, run_scenario


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<28} {self.detail}"


def sample_states(n: int, seed: int = 0, dq_max: float = 10.0):
    """Uniform joint angles in [-pi, pi] and velocities in [-dq_max, dq_max]."""
    rng = np.random.default_rng(seed)
    q = rng.uniform(-np.pi, np.pi, size=(n, 2))
    dq = rng.uniform(-dq_max, dq_max, size=(n, 2))
    x = rng.uniform(-1.0, 1.0, size=(n, 2))
    return q, dq, x


def check_inertia(robot: RobotParams, n: int = 1000, mass=mass_matrix) -> Check:
    q, _, _ = sample_states(n)
    asym = 0.0
    eig = []
    for qi in q:
        m = mass(robot, qi)
        asym = max(asym, float(np.abs(m - m.T).max()))
        eig.append(np.linalg.eigvalsh(0.5 * (m + m.T)))
    eig = np.array(eig)
    m_lo, m_hi = float(eig[:, 0].min()), float(eig[:, 1].max())
    ok = asym <= 1e-12 and m_lo > 0
    return Check("P1 inertia SPD", ok, f"asym={asym:.1e} eig in [{m_lo:.4g}, {m_hi:.4g}]")


def check_skew_symmetry(robot: RobotParams, n: int = 1000, coriolis=coriolis_matrix, rate=mass_matrix_rate) -> Check:
    q, dq, x = sample_states(n, seed=1)
    worst = max(abs(float(xi @ (rate(robot, qi, dqi) - 2.0 * coriolis(robot, qi, dqi)) @ xi))
                for qi, dqi, xi in zip(q, dq, x))
    return Check("P2 skew symmetry", worst <= 1e-10, f"max |x'(dM-2C)x| = {worst:.1e}")


def check_gravity(robot: RobotParams, n: int = 1000, gravity=gravity_vector, h: float = 1e-6) -> Check:
    q, _, _ = sample_states(n, seed=2)
    grad_err = 0.0
    sup = 0.0
    for qi in q:
        g = gravity(robot, qi)
        fd = np.array([
            (potential_energy(robot, qi + h * d) - potential_energy(robot, qi - h * d)) / (2 * h)
            for d in np.eye(2)
        ])
        grad_err = max(grad_err, float(np.abs(g - fd).max()))
        sup = max(sup, float(np.linalg.norm(g)))
    bound = gravity_bound(robot)
    ok = grad_err <= 1e-6 and sup <= bound
    return Check("P3 gravity", ok, f"grad err={grad_err:.1e} sup|G|={sup:.4g} <= {bound:.4g}")


def unforced_energy_drift(robot: RobotParams, q0=(np.pi / 2, -np.pi / 2), dq0=(0.0, 0.0),
                          dt: float = 1e-4, duration: float = 5.0) -> float:
    """max |E(t) - E(0)| / |E(0)| along a torque-free RK4 trajectory."""
    rp = _kernel_args(SimConfig(robot=robot))[0]
    traj = _kernel.integrate_unforced(np.array([*q0, *dq0], float), dt, int(round(duration / dt)), rp)
    energy = energy_series(robot, traj[:, :2], traj[:, 2:])
    return float(np.abs(energy - energy[0]).max() / abs(energy[0]))


def check_passivity(robot: RobotParams, tol: float = 1e-6) -> Check:
    drift = unforced_energy_drift(robot)
    return Check("passivity (unforced)", drift < tol, f"relative energy drift {drift:.1e}")


def rk4_order_ratio(cfg: SimConfig | None = None, dt: float = 1e-3, duration: float = 1.0) -> float:
    cfg = SimConfig() if cfg is None else cfg
    ends = [
        run_scenario(replace(cfg, dt=h, duration=duration, decimation=1)).log.final_state
        for h in (dt, dt / 2, dt / 4)
    ]
    return float(np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2]))


def check_rk4_order(cfg: SimConfig | None = None) -> Check:
    ratio = rk4_order_ratio(cfg)
    return Check("RK4 order", 12.0 <= ratio <= 20.0, f"error ratio dt vs dt/2 = {ratio:.2f}")


def nussbaum_quadrature_error(antiderivative=nussbaum_antiderivative, v_max: float = 200.0, n: int = 400) -> float:
    """max over v in (0, v_max] of |analytic mean - quadrature mean|."""
    worst = 0.0
    for v in np.linspace(v_max / n, v_max, n):
        # one quad call per half period keeps each piece sign-definite
        edges = np.append(np.arange(0.0, v, np.pi), v)
        numeric = sum(quad(nussbaum, a, b, epsabs=1e-10, epsrel=1e-10)[0] for a, b in zip(edges[:-1], edges[1:]))
        worst = max(worst, abs(antiderivative(v) / v - numeric / v))
    return worst


def nussbaum_witnesses(antiderivative=nussbaum_antiderivative, v_max: float = 100.0, level: float = 10.0):
    """Smallest grid points v <= v_max with running mean above +level and below -level."""
    v = np.linspace(1e-3, v_max, 200_001)
    mean = antiderivative(v) / v
    up = v[mean > level]
    down = v[mean < -level]
    return (float(up[0]) if len(up) else None, float(down[0]) if len(down) else None)


def check_nussbaum(antiderivative=nussbaum_antiderivative) -> Check:
    err = nussbaum_quadrature_error(antiderivative)
    up, down = nussbaum_witnesses(antiderivative)
    ok = err <= 1e-8 and up is not None and down is not None
    fmt = lambda w: "none" if w is None else f"{w:.4g}"  # noqa: E731
    return Check("Nussbaum mean", ok, f"quad err={err:.1e} witnesses +10@{fmt(up)} -10@{fmt(down)}")


def gain_linking_error(params: ControllerParams | None = None, n: int = 1000, seed: int = 3,
                       collapsed: Callable = control_input) -> float:
    params = ControllerParams() if params is None else params
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        e, e_int, de = rng.uniform(-1, 1, size=(3, 2))
        kd = rng.uniform(-1, 1)
        zeta = rng.uniform(-5, 5)
        full = three_term_input(params, e, e_int, de, kd, zeta)
        short = collapsed(params, generalized_error(params, e, e_int, de), kd, zeta)
        worst = max(worst, float(np.abs(full - short).max()))
    return worst


def check_gain_linking() -> Check:
    err = gain_linking_error()
    return Check("PID gain linking", err <= 1e-12, f"max |three-term - collapsed| = {err:.1e}")


def run_all(robot: RobotParams | None = None) -> list[Check]:
    robot = RobotParams() if robot is None else robot
    return [
        check_inertia(robot),
        check_skew_symmetry(robot),
        check_gravity(robot),
        check_passivity(robot),
        check_rk4_order(SimConfig(robot=robot)),
        check_nussbaum(),
        check_gain_linking(),
    ]
