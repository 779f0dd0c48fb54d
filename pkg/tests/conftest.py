import numpy as np
import pytest
import sympy as sp

from nussbaum_pid.dynamics import RobotParams

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_robot():
    return RobotParams()


@pytest.fixture(scope="session")
def lagrangian_model(default_robot):
    """M, C q', G derived symbolically from the rod energies (independent of dynamics.py).

    Link inertias are given about the joint axis, so the centroidal inertia is
    I - m lc^2.
    """
    p = default_robot
    q1, q2, dq1, dq2, ddq1, ddq2 = sp.symbols("q1 q2 dq1 dq2 ddq1 ddq2")
    t = sp.symbols("t")
    Q1, Q2 = sp.Function("Q1")(t), sp.Function("Q2")(t)
    x1, y1 = p.lc1 * sp.cos(Q1), p.lc1 * sp.sin(Q1)
    x2 = p.l1 * sp.cos(Q1) + p.lc2 * sp.cos(Q1 + Q2)
    y2 = p.l1 * sp.sin(Q1) + p.lc2 * sp.sin(Q1 + Q2)
    ic1 = p.I1 - p.m1 * p.lc1**2
    ic2 = p.I2 - p.m2 * p.lc2**2
    v2 = lambda x, y: sp.diff(x, t) ** 2 + sp.diff(y, t) ** 2  # noqa: E731
    kin = (
        sp.Rational(1, 2) * p.m1 * v2(x1, y1)
        + sp.Rational(1, 2) * ic1 * sp.diff(Q1, t) ** 2
        + sp.Rational(1, 2) * p.m2 * v2(x2, y2)
        + sp.Rational(1, 2) * ic2 * (sp.diff(Q1, t) + sp.diff(Q2, t)) ** 2
    )
    pot = p.gravity * (p.m1 * y1 + p.m2 * y2)
    lag = kin - pot
    eqs = []
    for Q in (Q1, Q2):
        eqs.append(sp.diff(sp.diff(lag, sp.diff(Q, t)), t) - sp.diff(lag, Q))
    subs = {
        sp.diff(Q1, t, 2): ddq1, sp.diff(Q2, t, 2): ddq2,
        sp.diff(Q1, t): dq1, sp.diff(Q2, t): dq2,
    }
    eqs = [sp.expand(e.subs(subs).subs({Q1: q1, Q2: q2})) for e in eqs]
    M = sp.Matrix([[sp.diff(e, a) for a in (ddq1, ddq2)] for e in eqs])
    rest = [sp.simplify(e - M[i, 0] * ddq1 - M[i, 1] * ddq2) for i, e in enumerate(eqs)]
    G = [r.subs({dq1: 0, dq2: 0}) for r in rest]
    Cdq = [rest[i] - G[i] for i in range(2)]
    args = (q1, q2, dq1, dq2)
    f_M = sp.lambdify(args, M, "numpy")
    f_C = sp.lambdify(args, Cdq, "numpy")
    f_G = sp.lambdify(args, G, "numpy")

    class Model:
        @staticmethod
        def mass(q):
            return np.array(f_M(q[0], q[1], 0.0, 0.0), dtype=float)

        @staticmethod
        def coriolis_times_dq(q, dq):
            return np.array(f_C(q[0], q[1], dq[0], dq[1]), dtype=float)

        @staticmethod
        def gravity(q):
            return np.array(f_G(q[0], q[1], 0.0, 0.0), dtype=float)

        @classmethod
        def accel(cls, q, dq, tau):
            return np.linalg.solve(cls.mass(q), tau - cls.coriolis_times_dq(q, dq) - cls.gravity(q))

    return Model
