"""Command line entry point: ``gwheavy <subcommand> ...``.

Exit codes: 0 success, 2 usage or configuration error, 3 domain error
(for example a size outside the support), 4 resource guard, 1 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .errors import ConfigurationError, DomainError, GWError, ResourceError

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2, 3, 4

CHECKS = {
    "sample": "exact conditional sampling: the cycle lemma turns an exchangeable degree sequence with total n-1 into a tree of size n with the conditional law",
    "heavy": "heavy path length L_n, 2-heavy tree size B_n, max distance to the k-heavy tree and index-pattern counts of one tree",
    "fringe": "fringe counts Z_k and their exact mean and second factorial moment from random-walk probabilities",
    "apollonian": "uniform Apollonian networks contain simple paths of linear length built from the 2-heavy dual tree",
    "oracle": "exact laws by enumeration; the total-size identity P(|T|=n) = P(S_n=-1)/n and the exact fringe moments",
    "limits": "the fragmentation exponent Phi, moments k!/(Phi(1/2)...Phi(k/2)) of the heavy-path limit, the theta height law and the superlevel-set heavy fragmentation",
    "experiment": "Monte Carlo scaling laws: heavy-path moments, 2-heavy fraction, distance and N_k exponents, root tail exponents, pattern growth, theta height law, local limit",
}


def _parser_with_checks(sub, name, help_text):
    return sub.add_parser(
        name,
        help=help_text,
        description=help_text,
        epilog=f"Checks: {CHECKS[name]}.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )


def _add_dist(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--dist", help="named law: catalan, full_binary, poisson1, apollonian_ternary")
    g.add_argument("--weights", help='custom weights "p0,p1,..." (fractions allowed)')


def _dist(args):
    from .offspring import parse_distribution

    if getattr(args, "weights", None):
        if "," not in args.weights:
            raise ConfigurationError("--weights needs a comma separated list")
        return parse_distribution(args.weights)
    return parse_distribution(args.dist)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gwheavy", description="Conditional Galton-Watson tree laboratory.")
    ap.add_argument("--version", action="version", version=f"gwheavy {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="{sample,heavy,fringe,apollonian,oracle,limits,experiment}")

    p = _parser_with_checks(sub, "sample", "Sample a conditional tree of size n.")
    _add_dist(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=["rejection", "multiset"])
    p.add_argument("--out", help="write a gwtree v1 file (default: stdout)")

    p = _parser_with_checks(sub, "heavy", "Heavy decomposition report for a gwtree file.")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--report", choices=["json"], default="json")

    p = _parser_with_checks(sub, "fringe", "Fringe counts of a tree, or exact fringe moments for a law.")
    p.add_argument("--in", dest="infile", help="gwtree file: print its Z_k counts")
    _add_dist(p, required=False)
    p.add_argument("--n", type=int, help="size for the exact moment table")
    p.add_argument("--kmax", type=int, default=10)

    p = _parser_with_checks(sub, "apollonian", "Random Apollonian network and its heavy simple path.")
    p.add_argument("--m", type=int, required=True, help="number of subdivisions")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--emit-path", nargs="?", const="-", metavar="FILE", help="vertex ids, whitespace separated")
    p.add_argument("--emit-edges", nargs="?", const="-", metavar="FILE", help="edge list as CSV pairs")

    p = _parser_with_checks(sub, "oracle", "Exact law of a statistic by enumeration (n <= 16).")
    _add_dist(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stat", default="heavy_path_length",
                   help="heavy_path_length, two_heavy_size, height, z_k(K), max_distance_k(K), n_k_root(K), pattern(P)")
    p.add_argument("--out", default="csv", help="'csv' or 'json' for stdout, or a file path")
    p.add_argument("--verify", action="store_true", help="also check the exact identities for all sizes up to min(n, 12)")

    p = _parser_with_checks(sub, "limits", "Limit-law numerics.")
    lsub = p.add_subparsers(dest="quantity", required=True)
    epilog = f"Checks: {CHECKS['limits']}."
    q = lsub.add_parser("phi", help="Phi(q)", epilog=epilog)
    q.add_argument("--q", type=float, required=True)
    q = lsub.add_parser("moment", help="E[T^k] of the heavy-path limit", epilog=epilog)
    q.add_argument("--k", type=int, required=True)
    q = lsub.add_parser("theta", help="theta distribution function", epilog=epilog)
    q.add_argument("--x", type=float, required=True)
    q = lsub.add_parser("frag", help="heavy fragmentation of a tabulated excursion", epilog=epilog)
    q.add_argument("--in", dest="infile", required=True, help="CSV or whitespace separated values (one column)")
    q.add_argument("--step", type=float, default=1.0)
    q.add_argument("--dx", type=float, default=1.0)

    from .montecarlo import CATALOG

    p = _parser_with_checks(sub, "experiment", "Run a named Monte Carlo experiment.")
    p.add_argument("name", choices=sorted(CATALOG))
    p.add_argument("--config", help="JSON config with experiment, dist, sizes, replications, seed, params")
    _add_dist(p, required=False)
    p.add_argument("--sizes", help="comma separated sizes")
    p.add_argument("--reps", help="replications: one integer or a comma separated list per size")
    p.add_argument("--seed", type=int, help="master seed (required unless the config has one)")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="override a parameter (JSON value)")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="write the JSON summary here (default: stdout)")
    p.add_argument("--raw", help="write per-replication values as CSV")
    return ap


# ---------------------------------------------------------------------------


def _emit(text, path=None, out=None):
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        (out or sys.stdout).write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_sample(args, out):
    from .sampler import ALGORITHM_ID, make_rng, sample_conditional
    from .tree import write_gwtree

    dist = _dist(args)
    tree = sample_conditional(dist, args.n, make_rng(args.seed), method=args.method)
    extra = {"rng": ALGORITHM_ID, "version": __version__}
    if args.method:
        extra["method"] = args.method
    if args.out:
        write_gwtree(args.out, tree, dist.name, args.seed, **extra)
    else:
        header = f"# gwtree v1 n={tree.n} dist={dist.name} seed={args.seed} " + " ".join(f"{k}={v}" for k, v in extra.items())
        out.write(header + "\n" + " ".join(map(str, tree.degrees.tolist())) + "\n")


def cmd_heavy(args, out):
    from . import heavy
    from .tree import read_gwtree

    if args.k < 1 or args.kmax < 1:
        raise DomainError("--k and --kmax must be >= 1")
    tree, header = read_gwtree(args.infile)
    rep = heavy.report(tree, k=args.k, kmax=args.kmax)
    rep["source"] = {k: v for k, v in header.items()}
    rep["version"] = __version__
    out.write(_json(rep))


def cmd_fringe(args, out):
    from .offspring import expected_zk
    from .tree import fringe_counts, read_gwtree

    if args.infile:
        tree, header = read_gwtree(args.infile)
        z = fringe_counts(tree)
        nz = {str(k + 1): int(c) for k, c in enumerate(z) if c}
        out.write(_json({"n": tree.n, "Z": nz, "source": header, "version": __version__}))
        return
    if not (args.dist or args.weights) or args.n is None:
        raise ConfigurationError("fringe needs --in FILE, or a law (--dist/--weights) and --n")
    dist = _dist(args)
    buf = io.StringIO()
    buf.write(f"# gwheavy {__version__} fringe dist={dist.name} n={args.n}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "mean", "second_factorial_moment"])
    for k in range(1, min(args.kmax, args.n) + 1):
        m, s = expected_zk(dist, args.n, k)
        w.writerow([k, repr(m), repr(s)])
    out.write(buf.getvalue())


def cmd_apollonian(args, out):
    from .apollonian import heavy_simple_path, sample_uniform, verify_simple_path
    from .sampler import ALGORITHM_ID, make_rng

    net = sample_uniform(args.m, make_rng(args.seed))
    path = heavy_simple_path(net)
    tag = f"# gwheavy {__version__} apollonian m={args.m} seed={args.seed} algorithm_id={ALGORITHM_ID}\n"
    if args.emit_edges:
        buf = io.StringIO()
        buf.write(tag)
        csv.writer(buf, lineterminator="\n").writerows(net.edges.tolist())
        _emit(buf.getvalue(), args.emit_edges, out)
    if args.emit_path:
        _emit(tag + " ".join(map(str, path.vertices.tolist())) + "\n", args.emit_path, out)
    if not (args.emit_edges == "-" or args.emit_path == "-"):
        out.write(_json({
            "m": args.m,
            "vertices": net.num_vertices,
            "edges": int(net.edges.shape[0]),
            "path_vertices": len(path),
            "selected_internal": path.selected_internal,
            "path_valid": verify_simple_path(net, path),
            "master_seed": args.seed,
            "algorithm_id": ALGORITHM_ID,
            "version": __version__,
        }))


def cmd_oracle(args, out):
    from .oracle import exact_statistic_distribution, verify_identities

    dist = _dist(args)
    res = exact_statistic_distribution(dist, args.n, args.stat)
    payload = {
        "dist": dist.name,
        "n": args.n,
        "stat": args.stat,
        "total": res.total,
        "law": [[s, p] for s, p in zip(res.support, res.probs)],
        "version": __version__,
    }
    if args.verify:
        rep = verify_identities(dist, min(args.n, 12))
        payload["identities"] = {"sizes": rep.sizes, "max_discrepancy": rep.max_discrepancy, "ok": rep.ok}
    fmt = args.out if args.out in ("csv", "json") else ("json" if args.out.endswith(".json") else "csv")
    if fmt == "json":
        text = _json(payload)
    else:
        buf = io.StringIO()
        buf.write(f"# gwheavy {__version__} oracle dist={dist.name} n={args.n} stat={args.stat} total={res.total!r}\n")
        if args.verify:
            buf.write(f"# identities max_discrepancy={payload['identities']['max_discrepancy']!r} ok={payload['identities']['ok']}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "probability"])
        for s, p in zip(res.support, res.probs):
            w.writerow([s, repr(p)])
        text = buf.getvalue()
    _emit(text, None if args.out in ("csv", "json") else args.out, out)


def _read_column(path):
    with open(path) as fh:
        text = fh.read()
    vals = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for tok in line.replace(",", " ").split():
            try:
                vals.append(float(tok))
            except ValueError:
                if vals:
                    raise DomainError(f"{path}: non-numeric value {tok!r}") from None
                # header row
    return np.array(vals)


def cmd_limits(args, out):
    from . import limits

    payload = {"quantity": args.quantity, "version": __version__}
    if args.quantity == "phi":
        payload.update(q=args.q, value=limits.phi(args.q))
    elif args.quantity == "moment":
        payload.update(k=args.k, value=limits.t_infinity_moment(args.k))
    elif args.quantity == "theta":
        payload.update(x=args.x, value=limits.theta_cdf(args.x))
    else:
        tr = limits.heavy_fragmentation(_read_column(args.infile), args.step, args.dx)
        payload.update(
            step=args.step,
            levels=tr.levels.tolist(),
            measures=tr.measures.tolist(),
            t_infinity=tr.t_infinity,
        )
    out.write(_json(payload))


def _parse_param(item):
    if "=" not in item:
        raise ConfigurationError(f"--param expects KEY=VALUE, got {item!r}")
    key, val = item.split("=", 1)
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def cmd_experiment(args, out):
    from .montecarlo import ExperimentConfig, run

    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if data.get("experiment", args.name) != args.name:
            raise ConfigurationError(f"config is for {data['experiment']!r}, not {args.name!r}")
    data["experiment"] = args.name
    if args.dist:
        data["dist"] = args.dist
    if args.weights:
        data["dist"] = args.weights
    if args.sizes:
        data["sizes"] = [int(x) for x in args.sizes.split(",")]
    if args.reps:
        reps = [int(x) for x in args.reps.split(",")]
        data["replications"] = reps[0] if len(reps) == 1 else reps
    if args.seed is not None:
        data["seed"] = args.seed
    if "seed" not in data and "master_seed" not in data:
        raise ConfigurationError("experiment needs --seed (or a seed in the config)")
    params = dict(data.get("params", {}))
    params.update(_parse_param(p) for p in args.param)
    data["params"] = params
    if args.workers is not None:
        data["workers"] = args.workers
    summary = run(ExperimentConfig.from_json(data))
    _emit(summary.to_json(), args.out, out)
    if args.raw:
        summary.write_raw_csv(args.raw)


COMMANDS = {
    "sample": cmd_sample,
    "heavy": cmd_heavy,
    "fringe": cmd_fringe,
    "apollonian": cmd_apollonian,
    "oracle": cmd_oracle,
    "limits": cmd_limits,
    "experiment": cmd_experiment,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except ConfigurationError as e:
        err.write(f"gwheavy: configuration error: {e}\n")
        return EXIT_USAGE
    except DomainError as e:
        err.write(f"gwheavy: domain error: {e}\n")
        return EXIT_DOMAIN
    except ResourceError as e:
        err.write(f"gwheavy: resource limit: {e}\n")
        return EXIT_RESOURCE
    except GWError as e:
        err.write(f"gwheavy: internal error: {e}\n")
        return EXIT_INTERNAL
    except OSError as e:
        err.write(f"gwheavy: {e}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
