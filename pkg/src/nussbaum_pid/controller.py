"""Nussbaum-gain PID law with an RBF-driven adaptive derivative gain.

The PID gains are linked through the filter rate ``gamma``
(``k_p = 2 gamma k_d``, ``k_i = gamma^2 k_d``, same for the adaptive part),
so the three-term law collapses onto the generalized error

    Psi = 2 gamma e + gamma^2 int(e) + de
    u   = -(k_delta + kappa_delta) N(zeta) Psi
    kappa_delta = -alpha psi_hat . phi(x)
    psi_hat'    = -Gamma (alpha |Psi|^2 phi(x) + sigma psi_hat)
    zeta'       = (k_delta + kappa_delta) |Psi|^2

with ``N(zeta) = zeta^2 cos(zeta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approximator import RbfLayout

NUSSBAUM_PID = "nussbaum-pid"
FIXED_PID = "fixed-pid"
CONTROLLER_KINDS = (NUSSBAUM_PID, FIXED_PID)


@dataclass(frozen=True)
class ControllerParams:
    gamma: float = 0.5
    k_delta: float = 0.1
    alpha: float = 100.0
    sigma: float = 0.1
    # scalar (times identity) or a symmetric positive-definite nodes x nodes matrix
    adapt_gain: float | np.ndarray = 100.0
    layout: RbfLayout = field(default_factory=RbfLayout)
    zeta0: float = 0.0

    def validate(self) -> None:
        for name in ("gamma", "k_delta", "alpha", "sigma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if not np.isfinite(self.zeta0):
            raise ValueError("zeta0 must be finite")
        self.layout.validate()
        g = np.asarray(self.adapt_gain, dtype=float)
        if g.ndim == 0:
            if not np.isfinite(g) or g <= 0:
                raise ValueError(f"adapt_gain must be positive, got {float(g)}")
        else:
            n = self.layout.nodes
            if g.shape != (n, n):
                raise ValueError(f"adapt_gain matrix must be {n}x{n}, got {g.shape}")
            if not np.allclose(g, g.T, rtol=0, atol=1e-12):
                raise ValueError("adapt_gain matrix must be symmetric")
            if np.linalg.eigvalsh(g).min() <= 0:
                raise ValueError("adapt_gain matrix must be positive definite")

    def adapt_matrix(self) -> np.ndarray:
        g = np.asarray(self.adapt_gain, dtype=float)
        if g.ndim == 0:
            return float(g) * np.eye(self.layout.nodes)
        return g.copy()

    def linked_gains(self, kappa_delta: float = 0.0) -> dict[str, float]:
        """Proportional/integral gains implied by the derivative gains."""
        g = self.gamma
        return {
            "k_pi": 2.0 * g * self.k_delta,
            "k_iota": g * g * self.k_delta,
            "k_delta": self.k_delta,
            "kappa_pi": 2.0 * g * kappa_delta,
            "kappa_iota": g * g * kappa_delta,
            "kappa_delta": kappa_delta,
        }


@dataclass
class ControllerState:
    psi_hat: np.ndarray
    zeta: float
    e_int: np.ndarray

    @classmethod
    def initial(cls, params: ControllerParams) -> ControllerState:
        return cls(np.zeros(params.layout.nodes), float(params.zeta0), np.zeros(2))


@dataclass(frozen=True)
class TrackingError:
    e: np.ndarray
    de: np.ndarray
    psi: np.ndarray


def generalized_error(params: ControllerParams, e, e_int, de) -> np.ndarray:
    g = params.gamma
    return 2.0 * g * np.asarray(e, float) + g * g * np.asarray(e_int, float) + np.asarray(de, float)


def tracking_error(params: ControllerParams, q, dq, qd, dqd, e_int) -> TrackingError:
    e = np.asarray(qd, float) - np.asarray(q, float)
    de = np.asarray(dqd, float) - np.asarray(dq, float)
    return TrackingError(e, de, generalized_error(params, e, e_int, de))


def network_input(err: TrackingError, q) -> np.ndarray:
    """Approximator input ``[e, de, q, Psi]``."""
    return np.concatenate([err.e, err.de, np.asarray(q, float), err.psi])


def nussbaum(zeta):
    return zeta * zeta * np.cos(zeta)


def nussbaum_gain(zeta):
    """``K_N(zeta) = -N(zeta)``, the gain multiplying each PID channel."""
    return -nussbaum(zeta)


def nussbaum_antiderivative(v):
    """``int_0^v zeta^2 cos(zeta) d zeta``."""
    return v * v * np.sin(v) + 2.0 * v * np.cos(v) - 2.0 * np.sin(v)


def nussbaum_mean(v, antiderivative=nussbaum_antiderivative):
    """Running mean ``(1/v) int_0^v N``; unbounded above and below as ``v`` grows."""
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise ValueError("nussbaum_mean needs v > 0")
    out = antiderivative(v) / v
    return float(out) if out.ndim == 0 else out


def kappa_delta(params: ControllerParams, psi_hat, phi) -> float:
    return -params.alpha * float(np.dot(psi_hat, phi))


def control_input(params: ControllerParams, psi, kappa_delta: float, zeta: float) -> np.ndarray:
    return -(params.k_delta + kappa_delta) * nussbaum(zeta) * np.asarray(psi, float)


def three_term_input(params: ControllerParams, e, e_int, de, kappa_delta: float, zeta: float) -> np.ndarray:
    """Uncollapsed PID form with separately linked P, I and D gains."""
    k = params.linked_gains(kappa_delta)
    kn = nussbaum_gain(zeta)
    return (
        (k["k_pi"] + k["kappa_pi"]) * kn * np.asarray(e, float)
        + (k["k_iota"] + k["kappa_iota"]) * kn * np.asarray(e_int, float)
        + (k["k_delta"] + k["kappa_delta"]) * kn * np.asarray(de, float)
    )


def weight_derivative(params: ControllerParams, psi, phi, psi_hat) -> np.ndarray:
    psi = np.asarray(psi, float)
    drive = params.alpha * float(psi @ psi) * np.asarray(phi, float) + params.sigma * np.asarray(psi_hat, float)
    g = np.asarray(params.adapt_gain, dtype=float)
    return -(g * drive if g.ndim == 0 else g @ drive)


def zeta_derivative(params: ControllerParams, psi, kappa_delta: float) -> float:
    psi = np.asarray(psi, float)
    return (params.k_delta + kappa_delta) * float(psi @ psi)


def fixed_pid_input(params: ControllerParams, e, e_int, de) -> np.ndarray:
    """Baseline: the same law with ``N`` frozen at -1 and no adaptation."""
    return params.k_delta * generalized_error(params, e, e_int, de)
