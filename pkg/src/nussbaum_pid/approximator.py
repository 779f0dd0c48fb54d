"""Gaussian RBF network used as a linear-in-parameter approximator.

Centers sit on the main diagonal of the input hypercube: node ``j`` has every
coordinate equal to the ``j``-th point of an even grid over
``[center_min, center_max]``. Covariance is ``width * I``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RbfLayout:
    nodes: int = 20
    center_min: float = -12.5
    center_max: float = 12.5
    width: float = 1.0
    input_dim: int = 8

    def validate(self) -> None:
        if int(self.nodes) != self.nodes or self.nodes < 1:
            raise ValueError(f"nodes must be a positive integer, got {self.nodes}")
        if not self.center_min < self.center_max:
            raise ValueError("center_min must be below center_max")
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if int(self.input_dim) != self.input_dim or self.input_dim < 1:
            raise ValueError(f"input_dim must be a positive integer, got {self.input_dim}")


def center_levels(layout: RbfLayout) -> np.ndarray:
    """Per-node scalar coordinate shared by every input dimension."""
    if layout.nodes == 1:
        return np.array([0.5 * (layout.center_min + layout.center_max)])
    j = np.arange(layout.nodes)
    return layout.center_min + (layout.center_max - layout.center_min) * j / (layout.nodes - 1)


def centers(layout: RbfLayout) -> np.ndarray:
    """Array of shape ``(nodes, input_dim)``."""
    return np.repeat(center_levels(layout)[:, None], layout.input_dim, axis=1)


def basis_vector(layout: RbfLayout, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d2 = np.sum((x[None, :] - centers(layout)) ** 2, axis=1)
    return np.exp(-0.5 * d2 / layout.width)


def basis_jacobian(layout: RbfLayout, x) -> np.ndarray:
    """d(phi_j)/d(x_i) as a ``(nodes, input_dim)`` array."""
    x = np.asarray(x, dtype=float)
    diff = x[None, :] - centers(layout)
    return -diff / layout.width * basis_vector(layout, x)[:, None]


def network_output(psi_hat, phi) -> float:
    psi_hat = np.asarray(psi_hat, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if psi_hat.shape != phi.shape:
        raise ValueError(f"weight/basis length mismatch: {psi_hat.shape} vs {phi.shape}")
    return float(psi_hat @ phi)
