"""Command-line front end.

Every subcommand prints a single JSON document on stdout; diagnostics go to
stderr. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .analytics import analytics_report, impact_by_region
from .conglomerates import conglomerate_indicators, conglomerates
from .control import controls, joint_controls
from .errors import OwnetError
from .generator import GeneratorConfig, generate
from .goldenpower import (
    Scenario,
    cautious_gp_check,
    collusion_gp_check,
    gp_check,
    gp_limit,
    gp_protection,
)
from .model import (
    DecreeConfig,
    Transaction,
    filter_by_decree,
    load_graph_from_paths,
    save_graph_to_paths,
)
from .ownership import (
    check_convergence,
    enumerate_baldone_paths,
    epsilon_baldone_ownership,
    integrated_ownership,
)

log = logging.getLogger("ownet")


def _round12(value):
    """Normalize floats to 12 significant digits for stable JSON output."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round12(v) for v in value]
    return value


def _emit(payload, output: str | None) -> None:
    text = json.dumps(_round12(payload), indent=2, sort_keys=False)
    if output and output != "-":
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load(args):
    return load_graph_from_paths(args.graph_nodes, args.graph_edges)


def _parse_tx(raw: str) -> Transaction:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) not in (3, 4):
        raise OwnetError(f"transaction must be 'buyer,target,share[,seller]', got {raw!r}")
    try:
        share = float(parts[2])
    except ValueError:
        raise OwnetError(f"unparseable transaction share {parts[2]!r}") from None
    seller = parts[3] if len(parts) == 4 and parts[3] else None
    return Transaction(buyer=parts[0], target=parts[1], share=share, seller=seller)


def _scenario(args, g) -> Scenario:
    if args.scenario:
        with open(args.scenario) as fh:
            return Scenario.from_json(fh.read())
    return Scenario.from_graph_flags(g)


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph-nodes", required=True, help="nodes CSV path")
    p.add_argument("--graph-edges", required=True, help="edges CSV path")
    p.add_argument("--output", default="-", help="output path or '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ownet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ownet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="descriptive network analytics")
    _add_graph_args(p)

    p = sub.add_parser("filter", help="decree subgraph by activity codes")
    _add_graph_args(p)
    p.add_argument("--decree", required=True, help="decree config JSON path")
    p.add_argument("--out-nodes", help="write filtered nodes CSV here")
    p.add_argument("--out-edges", help="write filtered edges CSV here")

    p = sub.add_parser("ownership", help="integrated ownership from one source")
    _add_graph_args(p)
    p.add_argument("--source", help="source entity id")
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="> 0 switches to exhaustive path enumeration at this threshold")
    p.add_argument("--target", help="with --epsilon, list individual paths to this target")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--convergence", action="store_true",
                   help="emit a graph-wide convergence report instead")

    p = sub.add_parser("control", help="control closure of an entity or coalition")
    _add_graph_args(p)
    p.add_argument("--controller", help="single controlling entity id")
    p.add_argument("--coalition", help="comma-separated coalition ids")

    p = sub.add_parser("conglomerates", help="conglomerate partition and indicators")
    _add_graph_args(p)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--indicators", action="store_true", help="include the indicator table")
    p.add_argument("--csv", help="also write company_id,conglomerate_id CSV here")

    gp = sub.add_parser("gp", help="golden-power screening tasks")
    gpsub = gp.add_subparsers(dest="gp_command", required=True)

    p = gpsub.add_parser("check", help="does the transaction enable a takeover?")
    _add_graph_args(p)
    p.add_argument("--scenario", help="scenario JSON path (default: node flags)")
    p.add_argument("--tx", required=True, help="buyer,target,share[,seller]")

    p = gpsub.add_parser("limit", help="maximum acquirable share without takeover")
    _add_graph_args(p)
    p.add_argument("--scenario", help="scenario JSON path (default: node flags)")
    p.add_argument("--buyer", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--quantum", type=float, default=1e-4)

    p = gpsub.add_parser("protect", help="public beef-up plan for strategic companies")
    _add_graph_args(p)
    p.add_argument("--scenario", help="scenario JSON path (default: node flags)")
    p.add_argument("--with-intermediaries", action="store_true")
    p.add_argument("--quantum", type=float, default=0.01)

    p = gpsub.add_parser("collude", help="check with the foreign set as one block")
    _add_graph_args(p)
    p.add_argument("--scenario", help="scenario JSON path (default: node flags)")
    p.add_argument("--tx", required=True, help="buyer,target,share[,seller]")

    p = gpsub.add_parser("cautious", help="check assuming missing shares belong to f")
    _add_graph_args(p)
    p.add_argument("--scenario", help="scenario JSON path (default: node flags)")
    p.add_argument("--tx", required=True, help="buyer,target,share[,seller]")
    p.add_argument("--foreign", required=True, help="the f under the worst-case assumption")

    p = sub.add_parser("generate", help="synthetic scale-free ownership graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--person-fraction", type=float, default=0.35)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--share-distribution", choices=["uniform", "dirichlet_per_company"],
                   default="dirichlet_per_company")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regions", type=int, default=20)
    p.add_argument("--out-nodes", required=True)
    p.add_argument("--out-edges", required=True)
    p.add_argument("--output", default="-")

    p = sub.add_parser("serve", help="run the what-if HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default="./ownet-data")

    return parser


def _cmd_analyze(args) -> None:
    _emit(analytics_report(_load(args)).to_dict(), args.output)


def _cmd_filter(args) -> None:
    g = _load(args)
    cfg = DecreeConfig.from_path(args.decree)
    filtered = filter_by_decree(g, cfg)
    if args.out_nodes and args.out_edges:
        save_graph_to_paths(filtered, args.out_nodes, args.out_edges)
    _emit(
        {
            "kept_entities": filtered.node_count,
            "kept_edges": filtered.edge_count,
            "impact_by_region": impact_by_region(g, filtered),
        },
        args.output,
    )


def _cmd_ownership(args) -> None:
    g = _load(args)
    if args.convergence:
        _emit(check_convergence(g).to_dict(), args.output)
        return
    if not args.source:
        raise OwnetError("--source is required (or use --convergence)")
    if args.epsilon > 0 and args.target:
        paths = enumerate_baldone_paths(g, args.source, args.target, args.epsilon)
        _emit(
            {
                "source": args.source,
                "target": args.target,
                "epsilon": args.epsilon,
                "paths": [{"nodes": list(p.nodes), "weight": p.weight} for p in paths],
            },
            args.output,
        )
        return
    if args.epsilon > 0:
        vec = epsilon_baldone_ownership(g, args.source, args.epsilon)
    else:
        vec = integrated_ownership(g, args.source, tol=args.tol, max_iter=args.max_iter)
    _emit(vec.to_dict(), args.output)


def _cmd_control(args) -> None:
    g = _load(args)
    if bool(args.controller) == bool(args.coalition):
        raise OwnetError("exactly one of --controller / --coalition is required")
    if args.controller:
        res = controls(g, args.controller)
    else:
        res = joint_controls(g, [c.strip() for c in args.coalition.split(",") if c.strip()])
    _emit(res.to_dict(), args.output)


def _cmd_conglomerates(args) -> None:
    g = _load(args)
    part = conglomerates(g, args.epsilon)
    payload = part.to_dict()
    if args.indicators:
        payload["indicators"] = conglomerate_indicators(part, g).to_dict()
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(part.to_csv())
    _emit(payload, args.output)


def _cmd_gp(args) -> None:
    g = _load(args)
    sc = _scenario(args, g)
    if args.gp_command == "check":
        _emit(gp_check(g, sc, _parse_tx(args.tx)).to_dict(), args.output)
    elif args.gp_command == "collude":
        _emit(collusion_gp_check(g, sc, _parse_tx(args.tx)).to_dict(), args.output)
    elif args.gp_command == "cautious":
        _emit(cautious_gp_check(g, sc, _parse_tx(args.tx), args.foreign).to_dict(), args.output)
    elif args.gp_command == "limit":
        _emit(gp_limit(g, sc, args.buyer, args.target, quantum=args.quantum).to_dict(), args.output)
    elif args.gp_command == "protect":
        plan = gp_protection(g, sc, with_intermediaries=args.with_intermediaries, quantum=args.quantum)
        _emit(plan.to_dict(), args.output)


def _cmd_generate(args) -> None:
    cfg = GeneratorConfig(
        node_count=args.nodes,
        person_fraction=args.person_fraction,
        attachment_exponent=args.exponent,
        share_distribution=args.share_distribution,
        seed=args.seed,
        region_count=args.regions,
    )
    g = generate(cfg)
    save_graph_to_paths(g, args.out_nodes, args.out_edges)
    _emit(
        {"nodes": g.node_count, "edges": g.edge_count, "seed": args.seed,
         "nodes_csv": args.out_nodes, "edges_csv": args.out_edges},
        args.output,
    )


def _cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


_COMMANDS = {
    "analyze": _cmd_analyze,
    "filter": _cmd_filter,
    "ownership": _cmd_ownership,
    "control": _cmd_control,
    "conglomerates": _cmd_conglomerates,
    "gp": _cmd_gp,
    "generate": _cmd_generate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except OwnetError as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
