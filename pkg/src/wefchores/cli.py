"""Command-line interface: ``wefchores <subcommand> ...``.

Exit codes: 0 success (or every audit passed), 1 a verdict failed, 2 bad input.
Budget defaults come from ``WEFCHORES_MAX_STATES`` / ``WEFCHORES_MAX_SUBSETS``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .audit import (
    check_goods_wef1,
    check_po_bruteforce,
    check_wef1,
    check_wef1t,
    check_wefxy,
    check_wprop1,
    check_wpropx,
    check_wwef1,
)
from .batch import run_batch
from .bivalued import certificate_to_dict, solve_wef1_po
from .budget import EnumerationBudget
from .core import (
    dump_allocation,
    dump_instance,
    format_rational,
    load_allocation,
    load_instance,
    normalize_costs,
    parse_rational,
    social_cost,
)
from .errors import WefChoresError
from .fixtures import FIXTURES, get_fixture
from .generators import KINDS, GeneratorSpec, generate
from .oracle import aps_exact, check_alpha_aps, opt_social_cost, price_of_fairness, wef1_exists
from .picking import (
    execute_picking,
    generate_rwps_sequence,
    generate_wefxy_sequence,
    goods_weighted_protocol,
)
from .two_agent import weighted_adjusted_winner, wef1_po_two_agents

NOTIONS = ("wef1", "wefxy", "wwef1", "wef1t", "wprop1", "wpropx", "po", "goods-wef1", "alpha-aps")
ALGOS = ("rwps", "wefxy", "bivalued", "waw", "two-po", "goods")


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _params(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise argparse.ArgumentTypeError(f"expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _fixture_params(name, raw):
    params = {}
    for key, value in raw.items():
        params[key] = int(value) if key == "n" else parse_rational(value)
    return get_fixture(name, **params)


def _instance(args):
    if getattr(args, "fixture", None):
        return _fixture_params(args.fixture, _params(args.param))
    return load_instance(_read(args.input))


def _budget(args):
    base = EnumerationBudget.from_env()
    return EnumerationBudget(
        max_states=args.max_states or base.max_states,
        max_subsets=args.max_subsets or base.max_subsets,
    )


def _add_input(p, required=False):
    p.add_argument("--input", "-i", help="instance file (JSON); '-' reads stdin")
    p.add_argument("--fixture", help=f"named fixture instead of a file ({', '.join(FIXTURES)})")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="fixture parameter, repeatable")


def _add_budget(p):
    p.add_argument("--max-states", type=int, default=None, help="cap on n**m for exhaustive search")
    p.add_argument("--max-subsets", type=int, default=None, help="cap on 2**m for APS")


def cmd_allocate(args):
    inst = _instance(args)
    state = None
    if args.algo in ("rwps", "wefxy"):
        if args.algo == "rwps":
            seq, _ = generate_rwps_sequence(inst)
        else:
            seq, _ = generate_wefxy_sequence(inst, args.x, args.y)
        alloc = execute_picking(inst, seq)
        if args.sequence:
            _write(args.sequence, seq.as_ids(inst.agent_ids) + "\n")
    elif args.algo == "bivalued":
        alloc, state = solve_wef1_po(inst)
    elif args.algo == "waw":
        alloc = weighted_adjusted_winner(inst)
    elif args.algo == "two-po":
        alloc = wef1_po_two_agents(inst)
    else:
        alloc = goods_weighted_protocol(inst)
    _write(args.output, dump_allocation(alloc, inst))
    if args.cert:
        if state is None:
            raise WefChoresError("--cert is only available with --algo bivalued")
        _write(args.cert, json.dumps(certificate_to_dict(state, inst), indent=2) + "\n")
    return 0


def cmd_verify(args):
    inst = _instance(args)
    alloc = load_allocation(_read(args.alloc), inst)
    n = args.notion
    if n == "wef1":
        report = check_wef1(inst, alloc)
    elif n == "wefxy":
        report = check_wefxy(inst, alloc, args.x, args.y)
    elif n == "wwef1":
        report = check_wwef1(inst, alloc)
    elif n == "wef1t":
        report = check_wef1t(inst, alloc)
    elif n == "wprop1":
        report = check_wprop1(inst, alloc)
    elif n == "wpropx":
        report = check_wpropx(inst, alloc)
    elif n == "po":
        report = check_po_bruteforce(inst, alloc, _budget(args))
    elif n == "goods-wef1":
        report = check_goods_wef1(inst, alloc)
    else:
        report = check_alpha_aps(inst, alloc, args.alpha, _budget(args))
    text = json.dumps(report.to_dict(inst), indent=2, sort_keys=True) + "\n"
    _write(args.report, text)
    if args.report not in (None, "-"):
        print(f"{report.notion}: {report.verdict}")
    return 0 if report.passed else 1


def cmd_oracle(args):
    inst = _instance(args)
    budget = _budget(args)
    if args.task == "opt":
        opt, alloc = opt_social_cost(inst)
        out = {"opt": format_rational(opt), "allocation": alloc.to_dict(inst)}
    elif args.task == "pof":
        out = {"pof": format_rational(price_of_fairness(inst, budget))}
    elif args.task == "wef1-exists":
        alloc = wef1_exists(inst, budget)
        out = {"exists": alloc is not None, "allocation": alloc.to_dict(inst) if alloc else None}
    else:
        agents = range(inst.n) if args.agent is None else [args.agent - 1]
        out = {"aps": {str(inst.agent_ids[i]): format_rational(aps_exact(inst, i, budget)) for i in agents}}
    print(json.dumps(out, indent=2))
    return 0


def cmd_pof(args):
    inst = _instance(args)
    norm = normalize_costs(inst)
    alloc = weighted_adjusted_winner(inst)
    sc = social_cost(norm, alloc)
    opt, _ = opt_social_cost(norm)
    alpha = max(norm.weights) / min(norm.weights)
    out = {
        "sc": format_rational(sc),
        "opt": format_rational(opt),
        "ratio": format_rational(sc / opt) if opt else None,
        "bound": format_rational((4 + alpha) / 4),
        "allocation": alloc.to_dict(inst),
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_generate(args):
    params = _params(args.param)
    if args.kind == "fixture":
        if not args.name:
            raise WefChoresError("--name is required for --kind fixture")
        inst = _fixture_params(args.name, params)
    else:
        if args.k is not None:
            params["k"] = args.k
        spec = GeneratorSpec(args.kind, args.n, args.m, args.seed, params)
        inst = generate(spec)
    _write(args.output, dump_instance(inst))
    return 0


def cmd_batch(args):
    config = json.loads(_read(args.config))
    if args.workers is not None:
        config["workers"] = args.workers
    report = run_batch(config)
    _write(args.report, report.to_json())
    print(report.human_summary(), file=sys.stderr)
    return 1 if report.failures else 0


def cmd_fixtures(args):
    if args.action == "list":
        for name, (builder, params) in FIXTURES.items():
            doc = (builder.__doc__ or "").strip().splitlines()[0]
            extra = f" [{', '.join(params)}]" if params else ""
            print(f"{name}{extra}: {doc}")
        return 0
    inst = _fixture_params(args.name, _params(args.param))
    _write(None, dump_instance(inst))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wefchores", description="Weighted fair division of chores.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="run an allocation algorithm")
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--x", type=parse_rational, default=1)
    p.add_argument("--y", type=parse_rational, default=0)
    _add_input(p)
    p.add_argument("--output", "-o", help="allocation file (default stdout)")
    p.add_argument("--cert", help="write the market certificate (bivalued only)")
    p.add_argument("--sequence", help="write the forward picking sequence as a line of agent ids")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("verify", help="audit an allocation")
    p.add_argument("--notion", choices=NOTIONS, required=True)
    p.add_argument("--x", type=parse_rational, default=1)
    p.add_argument("--y", type=parse_rational, default=0)
    p.add_argument("--alpha", type=parse_rational, default=1, help="factor for alpha-aps")
    _add_input(p)
    p.add_argument("--alloc", "-a", required=True, help="allocation file")
    p.add_argument("--report", "-r", help="report file (default stdout)")
    _add_budget(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    p.add_argument("--task", choices=("opt", "pof", "wef1-exists", "aps"), required=True)
    p.add_argument("--agent", type=int, help="1-based agent position for --task aps (default all)")
    _add_input(p)
    _add_budget(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("pof", help="social cost of weighted adjusted winner against opt")
    _add_input(p)
    p.set_defaults(func=cmd_pof)

    p = sub.add_parser("generate", help="generate an instance")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=parse_rational, default=None, help="high cost for --kind bivalued")
    p.add_argument("--name", help="fixture name for --kind fixture")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="run a batch experiment")
    p.add_argument("--config", "-c", required=True)
    p.add_argument("--report", "-r", help="report file (default stdout)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("fixtures", help="named instances")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "command", None) in ("allocate", "verify", "oracle", "pof"):
        if not args.input and not args.fixture:
            parser.error("one of --input or --fixture is required")
    if args.command == "fixtures" and args.action == "show" and not args.name:
        parser.error("fixtures show needs a name")
    try:
        return args.func(args)
    except (WefChoresError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
