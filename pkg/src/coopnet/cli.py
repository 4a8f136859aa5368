"""Command-line entry point: ``coopnet {analyze,lift,simulate,verify,paths}``.

Exit codes: 0 success, 1 a check failed, 2 usage/parse/validation error,
3 cut-enumeration ceiling exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cuts import (
    DEFAULT_REL_TOL,
    analyze_flow,
    brute_force_min_cut,
    edge_disjoint_paths,
    min_cut_value,
    multicast_dof,
)
from .errors import CeilingExceededError, LiftError, NetworkError, NetworkSyntaxError, NoCodeError
from .estimators import check_network, multicast_groups
from .galois import (
    certify,
    deterministic_min_cut_rank,
    lift_network,
    parse_deterministic_network,
    serialize_deterministic_network,
)
from .network import Network, sample_coefficients
from .outage import estimate_diversity, simulate_outage
from .relay import af_trial_ranks, default_horizon, extract_zero_error_code, random_relays, unfold, verify_zero_error

DEFAULT_SEED = 1

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_CEILING = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _subseed(seed: int, tag: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(tag,))


# tags keep the random streams of different stages independent
_COEFF, _LIFT, _AF, _FIELD_RELAYS = range(4)


def _load(args) -> Network:
    net = check_network(Path(args.network))
    return sample_coefficients(net, _subseed(args.seed, _COEFF), args.sampler)


def _label(net: Network, cut) -> str:
    return cut.label(net.node_ids)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ------------------------------------------------------------------ commands


def cmd_analyze(args) -> int:
    net = _load(args)
    out = [f"# coopnet analyze seed={args.seed} rel_tol={args.rel_tol:g}"]
    dump = {"seed": args.seed, "rel_tol": args.rel_tol, "flows": [], "multicast": []}
    for s, t in net.declared_flows:
        a = analyze_flow(net, s, t, args.rel_tol)
        out.append(
            f"flow {s}->{t}: min_cut={a.min_cut_value}, diversity={a.diversity}, dof={a.dof}, "
            f"argmin_cut_diversity={_label(net, a.argmin_cut_diversity)}, "
            f"argmin_cut_dof={_label(net, a.argmin_cut_dof)}"
        )
        dump["flows"].append(
            {
                "source": s,
                "sink": t,
                "min_cut": a.min_cut_value,
                "diversity": a.diversity,
                "dof": a.dof,
                "argmin_cut_diversity": [n for n in net.node_ids if n in a.argmin_cut_diversity.source_side],
                "argmin_cut_dof": [n for n in net.node_ids if n in a.argmin_cut_dof.source_side],
            }
        )
    for s, sinks in multicast_groups(net).items():
        value = multicast_dof(net, s, sinks, args.rel_tol)
        out.append(f"multicast {s}->{{{','.join(sinks)}}}: dof={value}")
        dump["multicast"].append({"source": s, "sinks": sinks, "dof": value})
    print("\n".join(out))
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(dump, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_lift(args) -> int:
    net = _load(args)
    try:
        dn, cert = lift_network(net, _subseed(args.seed, _LIFT), args.max_attempts, rel_tol=args.rel_tol, prime=args.prime)
    except LiftError as exc:
        print(f"lift failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    _emit(serialize_deterministic_network(dn), args.out)
    if args.cert:
        Path(args.cert).write_text(cert.to_csv(), encoding="utf-8")
    status = "valid" if cert.valid else "INVALID"
    print(
        f"# coopnet lift seed={args.seed} p={dn.p} q={dn.q} attempts={cert.attempts} "
        f"primes_tried={','.join(map(str, cert.primes_tried))} cuts={len(cert.per_cut)} certificate={status}",
        file=sys.stderr if args.out in (None, "-") else sys.stdout,
    )
    return EXIT_OK if cert.valid else EXIT_CHECK


def _snr_grid(args) -> list[float]:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.snr_step_db <= 0:
        raise UsageError("--snr-step-db must be > 0")
    if args.snr_min_db > args.snr_max_db:
        raise UsageError("--snr-min-db must not exceed --snr-max-db")
    if args.rate < 0:
        raise UsageError("--rate must be >= 0")
    n = int(np.floor((args.snr_max_db - args.snr_min_db) / args.snr_step_db + 1e-9)) + 1
    return [round(args.snr_min_db + k * args.snr_step_db, 10) for k in range(n)]


def cmd_simulate(args) -> int:
    grid = _snr_grid(args)
    net = _load(args)
    flows = net.declared_flows
    header = (
        f"# coopnet simulate seed={args.seed} rate={args.rate:g} trials={args.trials} "
        f"estimator={args.estimator}"
    )
    print(header)
    blocks = []
    for s, t in flows:
        curve = simulate_outage(net, s, t, args.rate, grid, args.trials, args.seed, args.estimator, args.threads)
        window = tuple(args.window_db) if args.window_db else None
        try:
            est = estimate_diversity(curve, window)
            line = est.describe()
        except ValueError as exc:
            est, line = None, f"diversity_estimate unavailable: {exc}"
        print(f"flow {s}->{t}: {line}")
        text = curve.to_csv(est)
        if est is None:
            text += f"# {line}\n"
        if len(flows) > 1:
            text = f"# flow {s}->{t}\n" + text
        blocks.append(text)
    if args.out:
        Path(args.out).write_text("".join(blocks), encoding="utf-8")
    return EXIT_OK


def _same_topology(a: Network, b: Network) -> bool:
    key = lambda n: (  # noqa: E731
        [(x.id, x.antennas) for x in n.nodes],
        [(e.tail_antenna, e.head_antenna) for e in n.edges],
    )
    return key(a) == key(b)


def cmd_verify(args) -> int:
    net = _load(args)
    lines = [f"# coopnet verify seed={args.seed} af_trials={args.af_trials} rel_tol={args.rel_tol:g}"]
    failures = 0
    trial_rows = []

    def report(name: str, flow: str, ok: bool, detail: str) -> None:
        nonlocal failures
        failures += not ok
        lines.append(f"check {name} {flow}: {'PASS' if ok else 'FAIL'} {detail}")

    if args.lift:
        dn = parse_deterministic_network(Path(args.lift).read_text(encoding="utf-8"))
        if not _same_topology(dn.network, net):
            raise UsageError("lift file topology does not match the network file")
        origin = f"file={args.lift}"
    else:
        dn, _ = lift_network(net, _subseed(args.seed, _LIFT), args.max_attempts, rel_tol=args.rel_tol)
        origin = "fresh"
    cert = certify(dn, net, rel_tol=args.rel_tol)

    dofs = {}
    for s, t in net.declared_flows:
        flow = f"{s}->{t}"
        mc = min_cut_value(net, s, t)
        bf, _ = brute_force_min_cut(net, s, t)
        report("a:max_flow_vs_cuts", flow, mc == bf, f"max_flow={mc} brute_force={bf}")

        a = analyze_flow(net, s, t, args.rel_tol)
        dofs[(s, t)] = a.dof
        lifted = deterministic_min_cut_rank(dn, s, t)
        bad = [row for row in cert.per_cut if row.cut.source == s and row.cut.sink == t and not row.ok]
        detail = f"dof={a.dof} lifted_min_cut_rank={lifted} p={dn.p} lift={origin}"
        if bad:
            row = bad[0]
            detail += (
                f" violating_cut={_label(net, row.cut)} mask={row.cut.mask} "
                f"rank_G={row.rank_g} < rank_H={row.rank_h}"
            )
        report("b:lift_sandwich", flow, not bad and lifted == a.dof, detail)

        T = args.T if args.T is not None else default_horizon(net, s, t)
        ranks = af_trial_ranks(net, args.af_trials, T, _subseed(args.seed, _AF), s, t, args.rel_tol, args.threads)
        achieved = max(r // T for r in ranks)
        trial_rows.extend((s, t, k, r, r // T) for k, r in enumerate(ranks))
        report("c:af_achievable", flow, achieved == a.dof, f"achieved={achieved} dof={a.dof} T={T}")

        relays = random_relays(dn, dn.p, _subseed(args.seed, _FIELD_RELAYS), terminals={s, t})
        g = unfold(dn, relays, T, s, t)
        try:
            code = extract_zero_error_code(g)
        except NoCodeError:
            report("d:zero_error_code", flow, False, "end-to-end rank is 0")
            continue
        check = verify_zero_error(code, g, seed=args.seed)
        mode = "exhaustive" if check.exhaustive else "sampled"
        detail = f"dimension={code.dimension} p={code.p} messages={check.messages_checked} {mode}"
        if check.counterexample is not None:
            detail += f" counterexample={list(check.counterexample)}"
        report("d:zero_error_code", flow, check.ok, detail)

    for s, sinks in multicast_groups(net).items():
        value = min(dofs[(s, t)] for t in sinks)
        lifted = deterministic_min_cut_rank(dn, s, sinks)
        report(
            "multicast",
            f"{s}->{{{','.join(sinks)}}}",
            value == lifted,
            f"dof={value} lifted_min_cut_rank={lifted}",
        )

    lines.append(f"result: {'PASS' if failures == 0 else 'FAIL'} ({failures} failed)")
    print("\n".join(lines))
    if args.csv_out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "sink", "trial", "rank", "rank_per_slot"])
        w.writerows(trial_rows)
        Path(args.csv_out).write_text(buf.getvalue(), encoding="utf-8")
    return EXIT_OK if failures == 0 else EXIT_CHECK


def cmd_paths(args) -> int:
    net = check_network(Path(args.network))
    out = []
    for s, t in net.declared_flows:
        paths = edge_disjoint_paths(net, s, t)
        out.append(f"# flow {s}->{t} paths={len(paths)}")
        for path in paths:
            hops = [net.edges[i] for i in path]
            out.append(", ".join(f"{e.tail}:{e.tail_ant}->{e.head}:{e.head_ant}" for e in hops))
    print("\n".join(out))
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopnet",
        description="Diversity and degrees of freedom of multi-antenna relay networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, randomized=True):
        p.add_argument("network", help="network JSON file")
        p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL, help="relative singular-value tolerance")
        p.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
        if randomized:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
            p.add_argument("--sampler", choices=("gaussian", "disc"), default="gaussian",
                           help="distribution for absent coefficients")

    p = sub.add_parser("analyze", help="min-cut, diversity and DOF per flow")
    common(p)
    p.add_argument("--json-out", help="write a JSON dump of the analysis")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lift", help="certified finite-field lift")
    common(p)
    p.add_argument("--out", help="lifted network file (default: stdout)")
    p.add_argument("--cert", help="certificate CSV")
    p.add_argument("--max-attempts", type=int, default=20)
    p.add_argument("--prime", type=int, help="start from this prime instead of the degree bound")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("simulate", help="Monte Carlo outage curve and diversity slope")
    common(p)
    p.add_argument("--rate", type=float, default=1.0, help="target rate in bits per block")
    p.add_argument("--snr-min-db", type=float, default=0.0)
    p.add_argument("--snr-max-db", type=float, default=30.0)
    p.add_argument("--snr-step-db", type=float, default=5.0)
    p.add_argument("--trials", type=int, default=10**5)
    p.add_argument("--estimator", choices=("plain", "importance"), default="importance")
    p.add_argument("--window-db", type=float, nargs=2, metavar=("LO", "HI"), help="fix the slope-fit window")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the cross-checks")
    common(p)
    p.add_argument("--af-trials", type=int, default=5)
    p.add_argument("--T", type=int, help="slot horizon for amplify-and-forward")
    p.add_argument("--lift", help="use this lifted network instead of a fresh lift")
    p.add_argument("--max-attempts", type=int, default=20)
    p.add_argument("--csv-out", help="per-trial AF ranks as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("paths", help="edge-disjoint path decomposition")
    common(p, randomized=False)
    p.set_defaults(func=cmd_paths)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        if not 0 < args.rel_tol < 1:
            raise UsageError("--rel-tol must lie in (0, 1)")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetworkSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CeilingExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CEILING


if __name__ == "__main__":
    raise SystemExit(main())
