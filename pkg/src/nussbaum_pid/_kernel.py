"""Compiled closed-loop vector field and fixed-step RK4 loop.

Mirrors ``simulation.augmented_derivative`` (the numpy reference built from
the public model/controller functions); ``tests/test_simulation.py`` pins the
two together. Parameters travel as flat float arrays:

    robot: m1 m2 l1 l2 lc1 lc2 I1 I2 g k11 k12 k21 k22
    ctrl:  gamma k_delta alpha sigma width
"""

import math

import numpy as np
from numba import njit

KIND_NUSSBAUM = 0
KIND_FIXED = 1

# aux row layout (signals not stored in the state vector)
AUX_FIELDS = (
    "qd1", "qd2", "dqd1", "dqd2", "e1", "e2", "de1", "de2",
    "u1", "u2", "tau1", "tau2", "psi1", "psi2", "n_zeta", "kappa_delta", "v_track",
)
NAUX = len(AUX_FIELDS)
DQ_LIMIT = 1e6


@njit(cache=True)
def plant_accel(rp, q1, q2, dq1, dq2, t1, t2):
    m2, l1, lc1, lc2 = rp[1], rp[2], rp[4], rp[5]
    a = m2 * l1 * lc2
    c2 = math.cos(q2)
    h = a * math.sin(q2)
    m11 = rp[6] + rp[7] + m2 * l1 * l1 + 2.0 * a * c2
    m12 = rp[7] + a * c2
    m22 = rp[7]
    g2 = m2 * lc2 * rp[8] * math.cos(q1 + q2)
    g1 = (rp[0] * lc1 + m2 * l1) * rp[8] * math.cos(q1) + g2
    r1 = t1 - (-h * dq2 * dq1 - h * (dq1 + dq2) * dq2) - g1
    r2 = t2 - h * dq1 * dq1 - g2
    det = m11 * m22 - m12 * m12
    return (m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det, m11, m12, m22


@njit(cache=True)
def evaluate(t, s, rp, cp, levels, gmat, kind, out, aux):
    """Write d(s)/dt into ``out`` and record signals into ``aux``."""
    n = levels.shape[0]
    gamma, kd, alpha, sigma, width = cp[0], cp[1], cp[2], cp[3], cp[4]
    q1, q2, dq1, dq2, ei1, ei2 = s[0], s[1], s[2], s[3], s[4], s[5]
    zeta = s[6 + n]

    ct = math.cos(t)
    st = math.sin(t)
    qd1, qd2, dqd1, dqd2 = ct, -ct, -st, st
    e1 = qd1 - q1
    e2 = qd2 - q2
    de1 = dqd1 - dq1
    de2 = dqd2 - dq2
    p1 = 2.0 * gamma * e1 + gamma * gamma * ei1 + de1
    p2 = 2.0 * gamma * e2 + gamma * gamma * ei2 + de2
    npsi2 = p1 * p1 + p2 * p2

    kdelta = 0.0
    nz = -1.0
    if kind == KIND_NUSSBAUM:
        x = (e1, e2, de1, de2, q1, q2, p1, p2)
        phi = np.empty(n)
        for j in range(n):
            d2 = 0.0
            for xi in x:
                d = xi - levels[j]
                d2 += d * d
            phi[j] = math.exp(-0.5 * d2 / width)
        dot = 0.0
        for j in range(n):
            dot += s[6 + j] * phi[j]
        kdelta = -alpha * dot
        nz = zeta * zeta * math.cos(zeta)
        gain = -(kd + kdelta) * nz
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += gmat[j, k] * (alpha * npsi2 * phi[k] + sigma * s[6 + k])
            out[6 + j] = -acc
        out[6 + n] = (kd + kdelta) * npsi2
    else:
        gain = kd
        for j in range(n + 1):
            out[6 + j] = 0.0

    u1 = gain * p1
    u2 = gain * p2
    t1 = rp[9] * u1 + rp[10] * u2
    t2 = rp[11] * u1 + rp[12] * u2
    a1, a2, m11, m12, m22 = plant_accel(rp, q1, q2, dq1, dq2, t1, t2)
    out[0] = dq1
    out[1] = dq2
    out[2] = a1
    out[3] = a2
    out[4] = e1
    out[5] = e2

    aux[0] = qd1
    aux[1] = qd2
    aux[2] = dqd1
    aux[3] = dqd2
    aux[4] = e1
    aux[5] = e2
    aux[6] = de1
    aux[7] = de2
    aux[8] = u1
    aux[9] = u2
    aux[10] = t1
    aux[11] = t2
    aux[12] = p1
    aux[13] = p2
    aux[14] = nz
    aux[15] = kdelta
    aux[16] = 0.5 * (m11 * p1 * p1 + 2.0 * m12 * p1 * p2 + m22 * p2 * p2)


@njit(cache=True)
def _healthy(s):
    for v in s:
        if not math.isfinite(v):
            return False
    return math.sqrt(s[2] * s[2] + s[3] * s[3]) <= DQ_LIMIT


@njit(cache=True)
def rk4_step(t, s, dt, rp, cp, levels, gmat, kind, k1, aux):
    """One classical RK4 step given the stage-1 slope ``k1`` at ``(t, s)``."""
    m = s.shape[0]
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    scratch = np.empty(aux.shape[0])
    y = s + 0.5 * dt * k1
    evaluate(t + 0.5 * dt, y, rp, cp, levels, gmat, kind, k2, scratch)
    y = s + 0.5 * dt * k2
    evaluate(t + 0.5 * dt, y, rp, cp, levels, gmat, kind, k3, scratch)
    y = s + dt * k3
    evaluate(t + dt, y, rp, cp, levels, gmat, kind, k4, scratch)
    return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def hold_step(t, s, dt, rp, cp, levels, gmat, kind, k0, aux):
    """Zero-order hold: torque and controller-state rates frozen over the step.

    The plant is integrated with RK4 under constant torque; controller states
    (integral, weights, zeta) advance by one explicit Euler step.
    """
    t1, t2 = aux[10], aux[11]
    q = s[0:4].copy()

    def f(y):
        a1, a2, _, _, _ = plant_accel(rp, y[0], y[1], y[2], y[3], t1, t2)
        return np.array([y[2], y[3], a1, a2])

    c1 = f(q)
    c2 = f(q + 0.5 * dt * c1)
    c3 = f(q + 0.5 * dt * c2)
    c4 = f(q + dt * c3)
    out = s + dt * k0
    out[0:4] = q + dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    return out


@njit(cache=True)
def integrate(s0, dt, n_steps, decimation, rp, cp, levels, gmat, kind, hold):
    """Run ``n_steps`` steps; returns (states, aux, n_recorded, diverged_step, final)."""
    m = s0.shape[0]
    n_rec = n_steps // decimation + 1
    states = np.empty((n_rec, m))
    auxs = np.empty((n_rec, NAUX))
    s = s0.copy()
    k1 = np.empty(m)
    aux = np.empty(NAUX)
    rec = 0
    diverged = -1
    for k in range(n_steps + 1):
        t = k * dt
        evaluate(t, s, rp, cp, levels, gmat, kind, k1, aux)
        if k % decimation == 0:
            states[rec] = s
            auxs[rec] = aux
            rec += 1
        if k == n_steps:
            break
        if hold:
            s_next = hold_step(t, s, dt, rp, cp, levels, gmat, kind, k1, aux)
        else:
            s_next = rk4_step(t, s, dt, rp, cp, levels, gmat, kind, k1, aux)
        if not _healthy(s_next):
            diverged = k + 1
            break
        s = s_next
    return states, auxs, rec, diverged, s


@njit(cache=True)
def integrate_unforced(x0, dt, n_steps, rp):
    """RK4 on the plant alone with zero torque; returns every state ``[q, dq]``."""
    out = np.empty((n_steps + 1, 4))
    out[0] = x0

    def f(y):
        a1, a2, _, _, _ = plant_accel(rp, y[0], y[1], y[2], y[3], 0.0, 0.0)
        return np.array([y[2], y[3], a1, a2])

    x = x0.copy()
    for k in range(n_steps):
        c1 = f(x)
        c2 = f(x + 0.5 * dt * c1)
        c3 = f(x + 0.5 * dt * c2)
        c4 = f(x + dt * c3)
        x = x + dt / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        out[k + 1] = x
    return out
