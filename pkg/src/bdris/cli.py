"""Command-line front end: seeded experiment sweeps and verification suites.

Exit codes: 0 on success, 2 on configuration errors, 3 when a verification
check fails.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .channel import ScenarioConfig
from .errors import ConfigError
from .experiments import (
    SweepConfig,
    load_config_file,
    run_complexity_bench,
    run_constraint_suite,
    run_mimo_sweep,
    run_mu_sweep,
    run_oracle_suite,
    run_proposition_suite,
    run_siso_sweep,
)

_RUNNERS = {
    "siso": run_siso_sweep,
    "mimo": run_mimo_sweep,
    "mu": run_mu_sweep,
    "bench": run_complexity_bench,
}

_TABLE_COLUMNS = (
    ("experiment", 12),
    ("n_i", 5),
    ("n_g", 5),
    ("fading", 8),
    ("trials", 7),
    ("mean_achieved_w", 16),
    ("mean_bound_w", 16),
    ("max_rel_gap", 12),
    ("wall_median_s", 13),
)


def _default_config(verb: str) -> SweepConfig:
    if verb == "siso":
        return SweepConfig(experiment="siso")
    if verb == "mimo":
        return SweepConfig(
            scenario=ScenarioConfig(n_t=2, n_r=2, trials=1000),
            experiment="mimo",
            n_i_values=(16, 32),
            n_g_values=(1, 4, 16),
            nr_nt_pairs=((2, 2), (4, 4)),
        )
    if verb == "mu":
        return SweepConfig(
            scenario=ScenarioConfig(n_t=4, trials=1000),
            experiment="mu",
            n_i_values=(16, 32),
            n_g_values=(1, 4, 16),
            k_values=(1, 2, 4),
        )
    if verb == "bench":
        return SweepConfig(experiment="bench", fadings=("rayleigh",))
    raise ConfigError(f"no defaults for verb {verb!r}")


def _load_sweep(args, verb: str) -> SweepConfig:
    if args.config is not None:
        cfg = load_config_file(args.config)
    else:
        cfg = _default_config(verb)
    updates = {}
    if args.seed is not None:
        updates["scenario"] = cfg.scenario.with_updates(seed=args.seed)
    if args.threads is not None:
        updates["threads"] = args.threads
    if updates:
        cfg = replace(cfg, **updates)
    return cfg


def _print_table(result) -> None:
    header = "".join(name.ljust(width) for name, width in _TABLE_COLUMNS)
    print(header)
    print("-" * len(header))
    for row in result.rows:
        cells = []
        for name, width in _TABLE_COLUMNS:
            val = getattr(row, name)
            if isinstance(val, float):
                cells.append(f"{val:.4e}".ljust(width))
            else:
                cells.append(str(val).ljust(width))
        print("".join(cells))
    for key, val in result.meta.get("slopes", {}).items():
        print(f"log-log slope [{key}]: {val:.3f}")


def _run_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    checks = {
        "propositions": run_proposition_suite(draws=args.draws, seed=seed),
        "oracle": run_oracle_suite(instances=args.instances, seed=seed),
        "constraints": run_constraint_suite(seed=seed),
    }
    all_ok = True
    for name, report in checks.items():
        status = "PASS" if report["pass"] else "FAIL"
        all_ok = all_ok and report["pass"]
        print(f"[{status}] {name}")
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "verify_summary.json").write_text(
            json.dumps(checks, indent=2, sort_keys=True) + "\n"
        )
    return 0 if all_ok else 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdris",
        description="Seeded Monte-Carlo experiments for closed-form BD-RIS synthesis.",
    )
    parser.add_argument("--version", action="version", version=f"bdris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "siso": "single-antenna bound-achievement sweep",
        "mimo": "multi-antenna link design sweep",
        "mu": "multi-user weighted sum-power sweep",
        "bench": "synthesis wall-time scaling benchmark",
    }
    for verb, desc in descriptions.items():
        sp = sub.add_parser(verb, help=desc)
        sp.add_argument("--config", type=Path, help="flat key = value configuration file")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        sp.add_argument("--out", type=Path, help="directory for CSV/JSON output")
        sp.add_argument("--threads", type=int, help="worker threads for trial loops")
    vp = sub.add_parser("verify", help="run the proposition/oracle/constraint suites")
    vp.add_argument("--seed", type=int, help="seed for the verification draws")
    vp.add_argument("--draws", type=int, default=1000, help="channel draws per size")
    vp.add_argument("--instances", type=int, default=50, help="oracle instances per size")
    vp.add_argument("--out", type=Path, help="directory for the JSON report")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        cfg = _load_sweep(args, args.command)
        result = _RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    _print_table(result)
    if args.out is not None:
        csv_path, json_path = result.write(args.out)
        print(f"wrote {csv_path} and {json_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
