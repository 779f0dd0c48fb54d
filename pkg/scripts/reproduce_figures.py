"""Run the reference scenario and redraw the tracking, error and gain plots.

Writes ``<out>/<preset>.csv`` and, when matplotlib is installed, three PNGs.

    python scripts/reproduce_figures.py --out results/figures
"""

import argparse
from pathlib import Path

import numpy as np

from nussbaum_pid.config import preset
from nussbaum_pid.csvio import write_csv
from nussbaum_pid.simulation import run_scenario


def plot(log, out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    for i, ax in enumerate(axes):
        ax.plot(log.t, log.qd[:, i], "k--", lw=1, label="desired")
        ax.plot(log.t, log.q[:, i], lw=1, label="actual")
        ax.set_ylabel(f"q{i + 1} [rad]")
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(out / "tracking.png", dpi=150)

    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(log.t, log.e[:, 0], lw=1, label="e1")
    ax.plot(log.t, log.e[:, 1], lw=1, label="e2")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("error [rad]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "errors.png", dpi=150)

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 6))
    axes[0].plot(log.t, log.zeta, lw=1)
    axes[0].set_ylabel("zeta")
    axes[1].plot(log.t, log.kappa_delta, lw=1)
    axes[1].set_ylabel("kappa_delta")
    axes[2].semilogy(log.t, np.maximum(np.linalg.norm(log.psi, axis=1), 1e-12), lw=1)
    axes[2].set_ylabel("|Psi|")
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(out / "adaptation.png", dpi=150)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/figures")
    ap.add_argument("--preset", default="paper", choices=["paper", "flip", "skew"])
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log, metrics = run_scenario(preset(args.preset))
    write_csv(out / f"{args.preset}.csv", log)
    print(metrics.summary())
    try:
        plot(log, out)
    except ImportError:
        print("matplotlib not installed; CSV only")
    else:
        print(f"figures written to {out}")


if __name__ == "__main__":
    main()
