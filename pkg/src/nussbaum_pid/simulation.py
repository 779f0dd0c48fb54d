"""Closed-loop scenarios: reference trajectory, augmented state, RK4, metrics.

The augmented state is a flat vector

    [q1, q2, dq1, dq2, e_int1, e_int2, psi_hat_0 .. psi_hat_{n-1}, zeta]

of length ``7 + nodes``. Controller memory is integrated together with the
plant, so every RK4 stage sees a consistent controller.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable, Iterator, NamedTuple

import numpy as np

from . import _kernel
from .approximator import basis_vector, center_levels
from .controller import (
    CONTROLLER_KINDS,
    FIXED_PID,
    NUSSBAUM_PID,
    ControllerParams,
    control_input,
    fixed_pid_input,
    kappa_delta,
    network_input,
    nussbaum,
    tracking_error,
    weight_derivative,
    zeta_derivative,
)
from .dynamics import JointState, RobotParams, energy_series, forward_dynamics


GROWTH_FACTOR = 2.0


class SimulationDiverged(FloatingPointError):
    pass


@dataclass(frozen=True)
class SimConfig:
    robot: RobotParams = field(default_factory=RobotParams)
    controller: ControllerParams = field(default_factory=ControllerParams)
    controller_kind: str = NUSSBAUM_PID
    q0: tuple[float, float] = (np.pi / 2, -np.pi / 2)
    dq0: tuple[float, float] = (0.0, 0.0)
    dt: float = 1e-4
    duration: float = 20.0
    decimation: int = 10
    hold: bool = False

    def validate(self) -> None:
        self.robot.validate()
        self.controller.validate()
        if self.controller.layout.input_dim != 8:
            raise ValueError("network input is [e, de, q, Psi]; input_dim must be 8")
        if self.controller_kind not in CONTROLLER_KINDS:
            raise ValueError(f"controller_kind must be one of {CONTROLLER_KINDS}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.duration) and self.duration >= self.dt):
            raise ValueError("duration must be at least dt")
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise ValueError("decimation must be a positive integer")
        for name in ("q0", "dq0"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (2,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be two finite numbers")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def nodes(self) -> int:
        return self.controller.layout.nodes


def desired_trajectory(t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c, s = np.cos(t), np.sin(t)
    return np.array([c, -c]), np.array([-s, s]), np.array([-c, c])


def initial_state(cfg: SimConfig) -> np.ndarray:
    n = cfg.nodes
    s = np.zeros(7 + n)
    s[0:2] = cfg.q0
    s[2:4] = cfg.dq0
    s[6 + n] = cfg.controller.zeta0
    return s


def unpack(s: np.ndarray, nodes: int) -> dict[str, np.ndarray | float]:
    return {
        "q": s[0:2],
        "dq": s[2:4],
        "e_int": s[4:6],
        "psi_hat": s[6 : 6 + nodes],
        "zeta": float(s[6 + nodes]),
    }


def controller_outputs(cfg: SimConfig, t: float, s: np.ndarray) -> dict:
    """Evaluate the controller at one augmented state (numpy reference path)."""
    p = cfg.controller
    x = unpack(s, cfg.nodes)
    qd, dqd, _ = desired_trajectory(t)
    err = tracking_error(p, x["q"], x["dq"], qd, dqd, x["e_int"])
    if cfg.controller_kind == NUSSBAUM_PID:
        phi = basis_vector(p.layout, network_input(err, x["q"]))
        kd = kappa_delta(p, x["psi_hat"], phi)
        u = control_input(p, err.psi, kd, x["zeta"])
        dpsi_hat = weight_derivative(p, err.psi, phi, x["psi_hat"])
        dzeta = zeta_derivative(p, err.psi, kd)
        n_zeta = nussbaum(x["zeta"])
    else:
        kd = 0.0
        u = fixed_pid_input(p, err.e, x["e_int"], err.de)
        dpsi_hat = np.zeros(cfg.nodes)
        dzeta = 0.0
        n_zeta = -1.0
    return {
        "err": err, "qd": qd, "dqd": dqd, "u": u, "tau": cfg.robot.kappa @ u,
        "kappa_delta": kd, "dpsi_hat": dpsi_hat, "dzeta": dzeta, "n_zeta": n_zeta,
    }


def augmented_derivative(cfg: SimConfig, t: float, s: np.ndarray) -> np.ndarray:
    x = unpack(s, cfg.nodes)
    c = controller_outputs(cfg, t, s)
    ddq = forward_dynamics(cfg.robot, JointState(x["q"], x["dq"]), c["tau"])
    out = np.concatenate([x["dq"], ddq, c["err"].e, c["dpsi_hat"], [c["dzeta"]]])
    if not np.all(np.isfinite(out)):
        raise SimulationDiverged(f"non-finite state derivative at t={t}")
    return out


def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, s: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(t, s)
    k2 = f(t + 0.5 * dt, s + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, s + 0.5 * dt * k2)
    k4 = f(t + dt, s + dt * k3)
    return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class SimRecord(NamedTuple):
    t: float
    q: np.ndarray
    qd: np.ndarray
    dq: np.ndarray
    dqd: np.ndarray
    e: np.ndarray
    de: np.ndarray
    u: np.ndarray
    tau: np.ndarray
    psi: np.ndarray
    zeta: float
    n_zeta: float
    kappa_delta: float
    psi_hat_norm: float
    v_track: float


@dataclass
class SimLog:
    """Columnar record stream; iterating yields ``SimRecord`` rows."""

    t: np.ndarray
    q: np.ndarray
    qd: np.ndarray
    dq: np.ndarray
    dqd: np.ndarray
    e: np.ndarray
    de: np.ndarray
    e_int: np.ndarray
    u: np.ndarray
    tau: np.ndarray
    psi: np.ndarray
    zeta: np.ndarray
    n_zeta: np.ndarray
    kappa_delta: np.ndarray
    psi_hat: np.ndarray
    psi_hat_norm: np.ndarray
    v_track: np.ndarray
    final_state: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i: int) -> SimRecord:
        return SimRecord(*(getattr(self, f)[i] for f in SimRecord._fields))

    def __iter__(self) -> Iterator[SimRecord]:
        return (self[i] for i in range(len(self)))

    def identical_to(self, other: SimLog) -> bool:
        return all(np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))


@dataclass
class RunMetrics:
    rms_error_tail: float
    max_abs_error_tail: np.ndarray
    max_abs_error: float
    sup_psi: float
    sup_psi_hat: float
    sup_abs_zeta: float
    zeta_final: float
    diverged: bool
    diverged_time: float | None
    t_end: float
    bounded: bool
    monitor: dict[str, tuple[float, float]] = field(default_factory=dict)

    def summary(self) -> str:
        e1, e2 = self.max_abs_error_tail
        lines = [
            f"rms_error_tail     {self.rms_error_tail:.6g} rad",
            f"max_abs_error_tail {e1:.6g} {e2:.6g} rad",
            f"max_abs_error      {self.max_abs_error:.6g} rad",
            f"sup_psi            {self.sup_psi:.6g}",
            f"sup_psi_hat        {self.sup_psi_hat:.6g}",
            f"zeta_final         {self.zeta_final:.6g}",
            f"bounded            {str(self.bounded).lower()}",
            f"diverged           {str(self.diverged).lower()}"
            + (f" (t={self.diverged_time:.6g} s)" if self.diverged else ""),
        ]
        return "\n".join(lines)


class SimResult(NamedTuple):
    log: SimLog
    metrics: RunMetrics


def _kernel_args(cfg: SimConfig):
    r = cfg.robot
    rp = np.array([r.m1, r.m2, r.l1, r.l2, r.lc1, r.lc2, r.I1, r.I2, r.gravity, *r.kappa.ravel()])
    c = cfg.controller
    cp = np.array([c.gamma, c.k_delta, c.alpha, c.sigma, c.layout.width])
    kind = _kernel.KIND_NUSSBAUM if cfg.controller_kind == NUSSBAUM_PID else _kernel.KIND_FIXED
    return rp, cp, center_levels(c.layout), c.adapt_matrix(), kind


def _build_log(cfg: SimConfig, states: np.ndarray, aux: np.ndarray, final: np.ndarray) -> SimLog:
    n = cfg.nodes
    a = {name: aux[:, i] for i, name in enumerate(_kernel.AUX_FIELDS)}
    pair = lambda x, y: np.column_stack([a[x], a[y]])  # noqa: E731
    t = np.arange(len(states)) * cfg.decimation * cfg.dt
    psi_hat = states[:, 6 : 6 + n]
    return SimLog(
        t=t, q=states[:, 0:2], qd=pair("qd1", "qd2"), dq=states[:, 2:4], dqd=pair("dqd1", "dqd2"),
        e=pair("e1", "e2"), de=pair("de1", "de2"), e_int=states[:, 4:6], u=pair("u1", "u2"),
        tau=pair("tau1", "tau2"), psi=pair("psi1", "psi2"), zeta=states[:, 6 + n],
        n_zeta=a["n_zeta"], kappa_delta=a["kappa_delta"], psi_hat=psi_hat,
        psi_hat_norm=np.linalg.norm(psi_hat, axis=1), v_track=a["v_track"], final_state=final,
    )


def quarter_masks(t: np.ndarray, horizon: float) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks for the first and final 25% of ``[0, horizon]``."""
    head, tail = t <= 0.25 * horizon, t >= 0.75 * horizon
    head[0] = tail[-1] = True
    return head, tail


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x**2))) if len(x) else float("nan")


def growth_monitor(log: SimLog, horizon: float) -> dict[str, tuple[float, float]]:
    """(head sup, tail sup) of |Psi|, |zeta|, |psi_hat| over the first/final quarters."""
    head, tail = quarter_masks(log.t, horizon)
    sig = {
        "psi": np.linalg.norm(log.psi, axis=1),
        "zeta": np.abs(log.zeta),
        "psi_hat": log.psi_hat_norm,
    }
    return {k: (float(v[head].max()), float(v[tail].max())) for k, v in sig.items()}


def compute_metrics(cfg: SimConfig, log: SimLog, diverged_time: float | None) -> RunMetrics:
    horizon = diverged_time if diverged_time is not None else cfg.n_steps * cfg.dt
    _, tail = quarter_masks(log.t, horizon)
    err_norm = np.linalg.norm(log.e, axis=1)
    mon = growth_monitor(log, horizon)
    # growth tripwire: a settled signal's final-quarter sup stays within 2x its early scale
    bounded = diverged_time is None and all(
        np.isfinite(tl) and tl <= GROWTH_FACTOR * max(hd, 1.0) for hd, tl in mon.values()
    )
    return RunMetrics(
        rms_error_tail=_rms(err_norm[tail]),
        max_abs_error_tail=np.abs(log.e[tail]).max(axis=0),
        max_abs_error=float(np.abs(log.e).max()),
        sup_psi=float(np.linalg.norm(log.psi, axis=1).max()),
        sup_psi_hat=float(log.psi_hat_norm.max()),
        sup_abs_zeta=float(np.abs(log.zeta).max()),
        zeta_final=float(log.zeta[-1]),
        diverged=diverged_time is not None,
        diverged_time=diverged_time,
        t_end=float(log.t[-1]),
        bounded=bounded,
        monitor=mon,
    )


def run_scenario(cfg: SimConfig) -> SimResult:
    """Integrate ``cfg`` over its horizon. Divergence is reported, not raised."""
    cfg.validate()
    rp, cp, levels, gmat, kind = _kernel_args(cfg)
    states, aux, n_rec, div_step, final = _kernel.integrate(
        initial_state(cfg), cfg.dt, cfg.n_steps, int(cfg.decimation), rp, cp, levels, gmat, kind, cfg.hold
    )
    log = _build_log(cfg, states[:n_rec], aux[:n_rec], final)
    diverged_time = div_step * cfg.dt if div_step >= 0 else None
    return SimResult(log, compute_metrics(cfg, log, diverged_time))


def kernel_derivative(cfg: SimConfig, t: float, s: np.ndarray) -> np.ndarray:
    """Compiled vector field evaluated once (for cross-checks)."""
    rp, cp, levels, gmat, kind = _kernel_args(cfg)
    out = np.empty_like(s)
    _kernel.evaluate(t, np.asarray(s, float), rp, cp, levels, gmat, kind, out, np.empty(_kernel.NAUX))
    return out


def error_decrease_check(log: SimLog, horizon: float | None = None) -> bool:
    """Decrease witness: tail errors finite and tail RMS |e| no larger than head RMS."""
    horizon = float(log.t[-1]) if horizon is None else horizon
    head, tail = quarter_masks(log.t, horizon)
    for sig in (log.e, log.de, log.e_int):
        if not np.all(np.isfinite(sig[tail])):
            return False
    err = np.linalg.norm(log.e, axis=1)
    return _rms(err[tail]) <= _rms(err[head])


def energy_balance(robot: RobotParams, log: SimLog) -> tuple[float, float]:
    """Return (E(T) - E(0) - supplied work, total |power| integral).

    Supplied work is the trapezoidal integral of dq . tau over the log, so the
    log should be undecimated for a tight balance.
    """
    energy = energy_series(robot, log.q, log.dq)
    power = np.einsum("ij,ij->i", log.dq, log.tau)
    work = np.trapezoid(power, log.t)
    scale = np.trapezoid(np.abs(power), log.t)
    return float(energy[-1] - energy[0] - work), float(scale)
