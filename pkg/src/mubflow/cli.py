"""Command-line front end: simulate, classify, check-inverse, residual.

Configurations are JSON files (see ``SimulationConfig`` and the shipped
presets).  Simulation output is a fixed-schema diagnostics CSV plus
snapshot files and a JSON run summary; files are written to a temporary
name and renamed so aborted runs never leave partial CSVs.

Exit codes: 0 success / run completed, 1 invalid configuration or
arguments, 2 run flagged (blow-up suspected, diffeomorphism lost) or a
check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, inertia, spectral
from .analyzer import classify, euler_mub_residual, shift_limit_residual
from .dynamics import DIAGNOSTICS_COLUMNS, SimulationConfig

__all__ = ["main", "load_config"]

_CONFIG_KEYS = {"n", "dt", "t_end", "output_every", "form", "b", "inertia",
                "initial", "dealias", "blowup_threshold", "track_flow"}


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def load_config(path: str | Path) -> SimulationConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValueError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ValueError("config: top level must be an object")
    unknown = sorted(set(raw) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"config: unknown field {unknown[0]!r}")
    kwargs = dict(raw)
    if "inertia" in kwargs:
        kwargs["inertia"] = inertia.InertiaSpec.from_dict(kwargs["inertia"])
    try:
        config = SimulationConfig(**kwargs)
    except TypeError as exc:
        raise ValueError(f"config: {exc}") from None
    dynamics.validate_config(config)
    return config


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _diagnostics_csv(rows) -> str:
    lines = [",".join(DIAGNOSTICS_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in DIAGNOSTICS_COLUMNS))
    return "\n".join(lines) + "\n"


def _field_csv(x: np.ndarray, values: np.ndarray, name: str) -> str:
    lines = [f"x,{name}"]
    for xj, vj in zip(x, values):
        lines.append(f"{_fmt(xj)},{_fmt(vj)}")
    return "\n".join(lines) + "\n"


def _cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = dynamics.simulate(config)

    _write_atomic(out / "diagnostics.csv", _diagnostics_csv(result.rows))

    snapdir = out / "snapshots"
    snapdir.mkdir(exist_ok=True)
    x = spectral.grid(config.n)
    output_steps = sorted({0, len(result.times) - 1}
                          | {s for s in range(len(result.times)) if s % config.output_every == 0})
    for s in output_steps:
        _write_atomic(snapdir / f"u_{s:06d}.csv", _field_csv(x, result.u_history[s], "u"))
        if result.flow_history is not None:
            _write_atomic(snapdir / f"g_{s:06d}.csv", _field_csv(x, result.flow_history[s], "g"))

    summary = {
        "status": result.status,
        "t_final": result.rows[-1].t,
        "steps_completed": len(result.times) - 1,
        "rows": len(result.rows),
        "config": {**{k: getattr(config, k) for k in
                      ("n", "dt", "t_end", "output_every", "form", "b",
                       "dealias", "blowup_threshold", "track_flow")},
                   "inertia": config.inertia.to_dict(),
                   "initial": config.initial},
    }
    _write_atomic(out / "summary.json", json.dumps(summary, indent=2) + "\n")

    if not args.quiet:
        print(f"status: {result.status}")
        print(f"t_final: {result.rows[-1].t:.6g}  rows: {len(result.rows)}")
        print(f"wrote {out / 'diagnostics.csv'}")
    return 0 if result.status == dynamics.STATUS_COMPLETED else 2


def _cmd_classify(args) -> int:
    report = classify(args.b, max_k=args.max_k, trial_modes=args.modes)
    text = report.to_json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_atomic(out / "report.json", text + "\n")
        if not args.quiet:
            print(f"wrote {out / 'report.json'}")
    if not args.quiet:
        print(f"b = {report.b:g}: {report.verdict}"
              + (f" ({report.reason})" if report.reason else ""))
        for c in report.checks:
            state = {True: "pass", False: "FAIL", None: "n/a"}[c.passed]
            witness = "" if c.witness is None else f" witness={c.witness:.6g}"
            print(f"  {c.name}: {state}{witness}")
    return 0


def _cmd_check_inverse(args) -> int:
    rng = np.random.default_rng(args.seed)
    max_mode = min(32, args.n // 3)
    worst = 0.0
    for _ in range(args.trials):
        u = spectral.random_trig_field(args.n, max_mode, rng)
        direct = inertia.invert(inertia.MU_MINUS_DXX, u)
        nested = inertia.invert_mu_dxx_integral(u)
        worst = max(worst, float(np.max(np.abs(nested - direct))))
    ok = worst <= 1e-10
    if not args.quiet:
        print(f"max deviation over {args.trials} trials (n={args.n}, "
              f"modes<={max_mode}): {worst:.3e} -> {'ok' if ok else 'FAIL'}")
    return 0 if ok else 2


def _cmd_residual(args) -> int:
    if args.mode == 0:
        print("error: --mode must be a nonzero integer", file=sys.stderr)
        return 1
    n = args.n
    k = abs(args.mode)
    if k >= n // 6:
        print("error: --mode too large for the grid (need |k| < n/6)", file=sys.stderr)
        return 1
    u = spectral.trig_field(n, 0.0, [0.0] * (k - 1) + [1.0])
    r7 = euler_mub_residual(inertia.MU_MINUS_DXX, args.b, u)
    r8 = shift_limit_residual(inertia.MU_MINUS_DXX, args.b, u)
    print(f"rhs_residual: {_fmt(r7)}")
    print(f"shift_limit_residual: {_fmt(r8)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mubflow",
        description="Pseudospectral solver and metric-compatibility analyzer "
                    "for the mu-b family on the circle (period-1 convention).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured simulation")
    p.add_argument("config", help="JSON configuration file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("classify", help="metric-compatibility report for a parameter b")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--max-k", type=int, default=8, dest="max_k")
    p.add_argument("--modes", type=int, default=6)
    p.add_argument("--out", default=None, help="directory for report.json")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("check-inverse",
                       help="cross-validate the nested-integral inverse against spectral division")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_check_inverse)

    p = sub.add_parser("residual",
                       help="print both right-hand-side residuals on a single cosine mode")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--mode", type=int, required=True)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_residual)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
