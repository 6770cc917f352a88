"""Command-line entry points: single runs, benchmark batteries, calibration, service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .bench import BatterySpec, PROGRAMS, SEEDS_30, SearchSpec, calibrate, run_battery
from .catalog import DOMAINS, load_default_scenarios
from .config import load_config
from .engine import RunConfig, run
from .errors import HaasError
from .learners import ALL_STRATEGIES
from .policy import LEVELS


def _parse_seeds(text: str | None, default=SEEDS_30) -> tuple[int, ...]:
    if not text:
        return tuple(default)
    return tuple(int(s) for s in text.replace(",", " ").split())


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", choices=DOMAINS, required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--strategy", choices=ALL_STRATEGIES, default="linucb")
    p.add_argument("--policies", choices=("on", "off"), default="on")
    p.add_argument("--gov-level", choices=LEVELS, default=None)
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--reward-profile", default="four_outcome")
    p.add_argument("--catalog", default=None, help="catalogue JSON overriding the shipped file")
    p.add_argument("--rules", default=None, help="rule catalogue JSON")
    p.add_argument("--context-fatigue", choices=("on", "off"), default="on")
    p.add_argument("--config", default=None, help="simulator config JSON (or HAAS_CONFIG)")


def _cmd_run(args: argparse.Namespace) -> int:
    sim_cfg = load_config(args.config)
    sim_cfg.bandit.context_fatigue = args.context_fatigue == "on"
    config = RunConfig(
        domain=args.domain, scenario=args.scenario, strategy=args.strategy,
        policies=args.policies == "on", governance_level=args.gov_level,
        seed=args.seed, cycles=args.cycles, reward_profile=args.reward_profile,
        catalog_path=args.catalog, rules_path=args.rules,
    )
    result = run(config, sim_cfg)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(result.to_json(), encoding="utf-8")
        ndjson = out.with_suffix(".records.ndjson")
        ndjson.write_text(result.records_ndjson() + "\n", encoding="utf-8")
        print(f"wrote {out} and {ndjson}")
    else:
        print(json.dumps({"aggregate": result.aggregate,
                          "screens": result.screen_flags}, indent=2, sort_keys=True))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    sim_cfg = load_config(args.config)
    strategies: tuple = ()
    if args.strategy:
        strategies = tuple(
            (s, p == "on") for s, p in
            (item.split("+") if "+" in item else (item, "off")
             for item in args.strategy))
    spec = BatterySpec(
        program=args.program,
        seeds=_parse_seeds(args.seeds),
        domains=tuple(args.domain) if args.domain else ("software", "manufacturing"),
        scenarios=tuple(args.scenario) if args.scenario else (),
        strategies=strategies,
        levels=tuple(args.gov_level) if args.gov_level else tuple(LEVELS),
        cycles=args.cycles,
        reward_profile=args.reward_profile,
        out=args.out,
        jobs=args.jobs,
    )
    result = run_battery(spec, sim_cfg)
    print(result.table.to_csv())
    if args.out:
        print(f"outputs under {args.out}", file=sys.stderr)
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    sim_cfg = load_config(args.config)
    spec = SearchSpec(
        candidates=args.candidates,
        rng_seed=args.rng_seed,
        seeds=_parse_seeds(args.seeds, bench_mod.PRIME_SEEDS[:5]),
        domain=args.domain, scenario=args.scenario,
    )
    report = calibrate(spec, sim_cfg)
    payload = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(payload)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(data_dir=args.data_dir, workers=args.jobs)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="haas",
                                     description="Human-AI allocation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded simulation run")
    _add_run_args(p_run)
    p_run.add_argument("--out", default=None, help="write RunResult JSON here")
    p_run.set_defaults(fn=_cmd_run)

    p_bench = sub.add_parser("bench", help="run a benchmark battery program")
    p_bench.add_argument("program", choices=PROGRAMS)
    p_bench.add_argument("--domain", action="append", choices=DOMAINS)
    p_bench.add_argument("--scenario", action="append")
    p_bench.add_argument("--strategy", action="append",
                         help="condition like linucb+off (repeatable)")
    p_bench.add_argument("--policies", choices=("on", "off"), default="on")
    p_bench.add_argument("--gov-level", action="append", choices=LEVELS)
    p_bench.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_bench.add_argument("--cycles", type=int, default=None)
    p_bench.add_argument("--reward-profile", default="four_outcome")
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out", default=None, help="output directory")
    p_bench.add_argument("--config", default=None)
    p_bench.set_defaults(fn=_cmd_bench)

    p_cal = sub.add_parser("calibrate", help="feasible-first calibration search")
    p_cal.add_argument("--candidates", type=int, default=20)
    p_cal.add_argument("--rng-seed", type=int, default=0)
    p_cal.add_argument("--seeds", default=None)
    p_cal.add_argument("--domain", choices=DOMAINS, default="manufacturing")
    p_cal.add_argument("--scenario", default="standard_production")
    p_cal.add_argument("--out", default=None)
    p_cal.add_argument("--config", default=None)
    p_cal.set_defaults(fn=_cmd_calibrate)

    p_serve = sub.add_parser("serve", help="start the workbench HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--data-dir", default=None)
    p_serve.add_argument("--jobs", type=int, default=2)
    p_serve.set_defaults(fn=_cmd_serve)

    p_ls = sub.add_parser("resources", help="list scenarios, strategies, and levels")
    p_ls.set_defaults(fn=_cmd_resources)
    return parser


def _cmd_resources(args: argparse.Namespace) -> int:
    scenarios = [{"domain": s.domain, "key": s.key, "name": s.name}
                 for s in load_default_scenarios()]
    print(json.dumps({"scenarios": scenarios, "strategies": list(ALL_STRATEGIES),
                      "levels": list(LEVELS)}, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except HaasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
