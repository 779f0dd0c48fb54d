"""CSV emission of simulation logs.

Values are written with ``repr`` so every float round-trips bit-exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .simulation import SimLog

HEADER = (
    "t", "q1", "q2", "qd1", "qd2", "dq1", "dq2", "e1", "e2", "u1", "u2", "tau1", "tau2",
    "Psi1", "Psi2", "zeta", "N_zeta", "kappa_delta", "psi_hat_norm", "v_track",
)


def log_columns(log: SimLog) -> np.ndarray:
    """Stack a log into a ``(rows, len(HEADER))`` array in header order."""
    return np.column_stack([
        log.t, log.q, log.qd, log.dq, log.e, log.u, log.tau, log.psi,
        log.zeta, log.n_zeta, log.kappa_delta, log.psi_hat_norm, log.v_track,
    ])


def write_csv(path: str | Path, log: SimLog) -> None:
    rows = log_columns(log)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(HEADER) + "\n")
        for row in rows.tolist():
            fh.write(",".join(map(repr, row)) + "\n")


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        if tuple(header) != HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        rows = [[float(x) for x in line.rstrip("\n").split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, len(HEADER))
    return {name: data[:, i] for i, name in enumerate(HEADER)}
