"""Fixed PID against Nussbaum PID for each actuator-direction preset.

    python scripts/direction_comparison.py
"""

from dataclasses import replace

from nussbaum_pid.config import preset
from nussbaum_pid.controller import CONTROLLER_KINDS
from nussbaum_pid.simulation import run_scenario


def main() -> None:
    print(f"{'preset':>6}  {'controller':>12}  {'diverged':>8}  {'bounded':>7}  {'max|e|':>10}  {'rms_tail':>10}")
    for name in ("paper", "flip", "skew"):
        for kind in CONTROLLER_KINDS:
            m = run_scenario(replace(preset(name), controller_kind=kind)).metrics
            print(f"{name:>6}  {kind:>12}  {str(m.diverged).lower():>8}  {str(m.bounded).lower():>7}  "
                  f"{m.max_abs_error:10.4g}  {m.rms_error_tail:10.4g}")


if __name__ == "__main__":
    main()
