"""Command-line front end: ``run``, ``sweep`` and ``verify``.

Exit codes: 0 ok, 1 usage/config error, 2 I/O error, 3 verify failure.
A diverged run is a result, not an error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import verify
from .config import ConfigError, config_from_document, csv_path_of, load_document, preset, scale_kappa
from .controller import CONTROLLER_KINDS
from .csvio import write_csv
from .simulation import SimConfig, run_scenario

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3
DEFAULT_CSV = "run.csv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _controller_field(name):
    return lambda cfg, v: replace(cfg, controller=replace(cfg.controller, **{name: v}))


def _layout_field(name):
    return lambda cfg, v: replace(
        cfg, controller=replace(cfg.controller, layout=replace(cfg.controller.layout, **{name: v}))
    )


SWEEPABLE = {
    "kappa-scale": (float, scale_kappa),
    "k_delta": (float, _controller_field("k_delta")),
    "gamma": (float, _controller_field("gamma")),
    "alpha": (float, _controller_field("alpha")),
    "sigma": (float, _controller_field("sigma")),
    "adapt_gain": (float, _controller_field("adapt_gain")),
    "zeta0": (float, _controller_field("zeta0")),
    "nodes": (int, _layout_field("nodes")),
    "width": (float, _layout_field("width")),
    "gravity": (float, lambda cfg, v: replace(cfg, robot=replace(cfg.robot, gravity=v))),
    "dt": (float, lambda cfg, v: replace(cfg, dt=v)),
    "duration": (float, lambda cfg, v: replace(cfg, duration=v)),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nussbaum-pid", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON config file; missing keys come from the preset")
        sp.add_argument("--preset", choices=["paper", "flip", "skew"], default="paper")

    r = sub.add_parser("run", help="simulate one scenario and write a CSV")
    common(r)
    r.add_argument("--out", help=f"CSV path (default: config output.csv_path or {DEFAULT_CSV})")
    r.add_argument("--duration", type=float)
    r.add_argument("--dt", type=float)
    r.add_argument("--decimation", type=int)
    r.add_argument("--controller", choices=CONTROLLER_KINDS)
    r.add_argument("--kappa-scale", type=float)
    r.add_argument("--hold", action="store_true", help="zero-order-hold the controller over each step")

    s = sub.add_parser("sweep", help="run one scenario per parameter value")
    common(s)
    s.add_argument("--param", required=True, help=f"one of: {', '.join(SWEEPABLE)}")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--controller", choices=CONTROLLER_KINDS)
    s.add_argument("--jobs", type=int, default=0, help="worker processes (0: one per value, capped at CPUs)")

    sub.add_parser("verify", help="run the numerical property suite")
    return p


def _base_config(args) -> tuple[SimConfig, str | None]:
    base = preset(args.preset)
    if not args.config:
        return base, None
    doc = load_document(Path(args.config))
    return config_from_document(doc, base), csv_path_of(doc)


def _apply_run_flags(cfg: SimConfig, args) -> SimConfig:
    if args.duration is not None:
        cfg = replace(cfg, duration=args.duration)
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt)
    if args.decimation is not None:
        cfg = replace(cfg, decimation=args.decimation)
    if args.controller:
        cfg = replace(cfg, controller_kind=args.controller)
    if args.kappa_scale is not None:
        cfg = scale_kappa(cfg, args.kappa_scale)
    if args.hold:
        cfg = replace(cfg, hold=True)
    return cfg


def _validated(cfg: SimConfig) -> SimConfig:
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def cmd_run(args) -> int:
    cfg, doc_csv = _base_config(args)
    cfg = _validated(_apply_run_flags(cfg, args))
    out = args.out or doc_csv or DEFAULT_CSV
    log, metrics = run_scenario(cfg)
    write_csv(out, log)
    print(f"wrote {len(log)} rows to {out}")
    print(metrics.summary())
    return EXIT_OK


def _parse_values(param: str, text: str) -> list:
    if param not in SWEEPABLE:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEPABLE)}")
    cast = SWEEPABLE[param][0]
    items = [v.strip() for v in text.split(",") if v.strip()]
    if not items:
        raise UsageError("--values must list at least one value")
    try:
        return [cast(v) for v in items]
    except ValueError:
        raise UsageError(f"cannot parse values {text!r} for {param}") from None


def _sweep_one(job):
    cfg, csv_path = job
    log, metrics = run_scenario(cfg)
    write_csv(csv_path, log)
    return metrics


def cmd_sweep(args) -> int:
    values = _parse_values(args.param, args.values)
    cfg, _ = _base_config(args)
    if args.controller:
        cfg = replace(cfg, controller_kind=args.controller)
    apply = SWEEPABLE[args.param][1]
    out_dir = Path(args.out)
    jobs = [(_validated(apply(cfg, v)), out_dir / f"{args.param}={v}.csv") for v in values]
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = args.jobs or min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]

    header = f"{args.param:>12}  {'diverged':>8}  {'rms_tail':>10}  {'max_e1':>10}  {'max_e2':>10}  {'sup_psi':>10}  {'zeta_end':>10}"
    lines = [header]
    rows = ["value,diverged,diverged_time,rms_error_tail,max_abs_error_tail_1,max_abs_error_tail_2,sup_psi,sup_psi_hat,zeta_final,csv"]
    for v, m, (_, path) in zip(values, results, jobs):
        e1, e2 = m.max_abs_error_tail
        lines.append(
            f"{v!s:>12}  {str(m.diverged).lower():>8}  {m.rms_error_tail:10.4g}  {e1:10.4g}  {e2:10.4g}  "
            f"{m.sup_psi:10.4g}  {m.zeta_final:10.4g}"
        )
        rows.append(
            f"{v},{str(m.diverged).lower()},{m.diverged_time if m.diverged else ''},{m.rms_error_tail!r},"
            f"{e1!r},{e2!r},{m.sup_psi!r},{m.sup_psi_hat!r},{m.zeta_final!r},{path.name}"
        )
    (out_dir / "metrics.csv").write_text("\n".join(rows) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify.run_all()
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"failed: {', '.join(failed)}")
        return EXIT_VERIFY
    print("all properties hold")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"nussbaum-pid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"nussbaum-pid: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nussbaum-pid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
