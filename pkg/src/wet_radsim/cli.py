"""Command line entry point ``wet-radsim``.

Exit codes: 0 success, 1 invalid input, 2 some experiment trials failed.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace

from .engine import simulate
from .harness import PLANNER_NAMES, load_config, plan, run_experiment
from .model import RadiusAssignment, ScenarioError, dump_scenario, fig1_scenario, load_scenario
from .planners import PlannerConfig

EXIT_OK, EXIT_INVALID, EXIT_TRIAL_FAILURES = 0, 1, 2

FIXTURES = {"fig1": fig1_scenario}


def _load_radii(path):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["radii"]
    return RadiusAssignment(tuple(float(r) for r in data))


def cmd_run(args):
    config = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out_dir is not None:
        changes["out_dir"] = args.out_dir
    if args.trials is not None:
        changes["trials"] = args.trials
    config = replace(config, **changes)
    if config.out_dir is None:
        config = replace(config, out_dir="results")
    record = run_experiment(config)
    print(json.dumps(record.summary(), indent=2, sort_keys=True))
    return EXIT_TRIAL_FAILURES if record.failures else EXIT_OK


def cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    radii = _load_radii(args.radii)
    radii.check_for(scenario)
    print(simulate(scenario, radii).to_json(indent=2))
    return EXIT_OK


def cmd_plan(args):
    scenario = load_scenario(args.scenario)
    config = PlannerConfig(l=args.l, K=args.K, K_prime=args.k_prime, seed=args.seed or 0)
    outcome = plan(args.planner, scenario, config)
    result = simulate(scenario, outcome.radii)
    out = {
        "planner": args.planner,
        "radii": list(outcome.radii.radii),
        "objective": result.objective,
        "trace": list(outcome.trace),
    }
    if outcome.proxy_objective is not None:
        out["proxy_objective"] = outcome.proxy_objective
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_fixture(args):
    print(dump_scenario(FIXTURES[args.name]()))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="wet-radsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="evaluate a scenario under given radii")
    p.add_argument("--scenario", required=True)
    p.add_argument("--radii", required=True, help="JSON list of radii or {\"radii\": [...]}")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="compute radii for a scenario with one planner")
    p.add_argument("--scenario", required=True)
    p.add_argument("--planner", choices=PLANNER_NAMES, default="iterative-lrec")
    p.add_argument("--l", type=int, default=PlannerConfig.l)
    p.add_argument("--K", type=int, default=PlannerConfig.K)
    p.add_argument("--k-prime", type=int, default=PlannerConfig.K_prime)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("fixture", help="print a built-in scenario as JSON")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        for problem in exc.violations:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
