"""Scan the RK4 step size for each preset and report where the closed loop stays finite.

The adaptive gains make the closed loop stiff, so a step that is fine for
the unforced arm can blow up once the weights grow.

    python scripts/dt_stability_scan.py --dts 1e-3,5e-4,2.5e-4,1e-4
"""

import argparse
from dataclasses import replace

from nussbaum_pid.config import preset
from nussbaum_pid.simulation import run_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dts", default="1e-3,5e-4,2.5e-4,1e-4,5e-5")
    ap.add_argument("--presets", default="paper,flip,skew")
    ap.add_argument("--duration", type=float, default=20.0)
    args = ap.parse_args()

    print(f"{'preset':>6}  {'dt':>8}  {'diverged':>8}  {'t_div':>8}  {'max_e1':>9}  {'max_e2':>9}  {'zeta_end':>9}")
    for name in args.presets.split(","):
        for dt in map(float, args.dts.split(",")):
            cfg = replace(preset(name), dt=dt, duration=args.duration, decimation=max(1, round(1e-3 / dt)))
            m = run_scenario(cfg).metrics
            e1, e2 = m.max_abs_error_tail
            t_div = f"{m.diverged_time:.3f}" if m.diverged else "-"
            print(f"{name:>6}  {dt:8.1e}  {str(m.diverged).lower():>8}  {t_div:>8}  "
                  f"{e1:9.4g}  {e2:9.4g}  {m.zeta_final:9.4g}")


if __name__ == "__main__":
    main()
