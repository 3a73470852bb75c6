"""Command-line entry point: ``levelpoints <subcommand> ...``."""

import argparse
import logging
import sys
from pathlib import Path

from .enumeration import Window, enumerate_bruteforce, enumerate_points
from .errors import BudgetExceededError
from .harness import PointCache, load_config, write_report
from .lattice import enumerate_hnf, hecke_degree
from .measure import estimate_measure
from .orbits import fundamental_discriminants, orbit_histogram
from .varieties import PolynomialFamily


def _family(args):
    if args.family == "quad":
        if not args.signature or not args.qcoeffs:
            raise SystemExit("quad family needs --signature R,S and --qcoeffs FILE")
        r, s = (int(t) for t in args.signature.split(","))
        coeffs = [int(t) for t in Path(args.qcoeffs).read_text().replace(",", " ").split()]
        return PolynomialFamily.quadratic(r, s, coeffs)
    if args.n is None:
        raise SystemExit(f"{args.family} family needs --n")
    return PolynomialFamily(args.family, n=args.n)


def _add_family(p, choices=("det", "pff", "quad")):
    p.add_argument("--family", choices=choices, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--signature", help="R,S for quadratic forms")
    p.add_argument("--qcoeffs", help="file of integer coefficients q_ij, i <= j, row-major")


def cmd_enumerate(args):
    family = _family(args)
    window = Window.read(args.window)
    cache = PointCache(args.cache_dir) if args.cache_dir else None
    ps = None
    if cache and not args.brute_force:
        ps = cache.get(family, args.m, window)
    if ps is None:
        if args.brute_force:
            ps = enumerate_bruteforce(family, args.m, window)
        else:
            ps = enumerate_points(family, args.m, window, budget=args.budget, threads=args.threads)
        if cache and not args.brute_force:
            cache.put(ps)
    text = ps.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_hecke(args):
    if args.list:
        for H in enumerate_hnf(args.n, args.m):
            print(",".join(str(v) for row in H for v in row))
    else:
        print(hecke_degree(args.n, args.m))
    return 0


def cmd_measure(args):
    family = _family(args)
    window = Window.read(args.window)
    est = estimate_measure(family, window, args.epsilon, args.samples, args.seed, threads=args.threads)
    print(est.as_row())
    return 0


def cmd_orbits(args):
    family = _family(args)
    hist = orbit_histogram(family, args.m, Window.read(args.window))
    sys.stdout.write(hist.to_csv())
    if not hist.complete:
        print(f"# observed {len(hist.rows)} of {hist.possible_chains} divisor chains", file=sys.stderr)
    print(f"# {hist.caveat}", file=sys.stderr)
    return 0


def cmd_fundamental(args):
    for m in fundamental_discriminants(args.max):
        print(m)
    return 0


def cmd_report(args):
    config = load_config(args.config)
    report = write_report(config, args.out, threads=args.threads)
    if report["errors"]:
        for e in report["errors"]:
            print(f"level {e['m']}: {e['error']}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="levelpoints", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="integer points of f = m projecting into a window")
    _add_family(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--window", required=True, help="file with one 'lo hi' line per coordinate")
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--out")
    p.add_argument("--cache-dir")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", type=int, default=10**10)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("hecke", help="number of Hermite forms of determinant m")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--list", action="store_true", help="print the forms as row-major CSV rows")
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("measure", help="Monte Carlo shell measure of a window")
    _add_family(p)
    p.add_argument("--window", required=True)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("orbits", help="Smith-class histogram of a determinant level")
    _add_family(p, choices=("det",))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--window", required=True)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("fundamental", help="fundamental discriminants up to N")
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(func=cmd_fundamental)

    p = sub.add_parser("report", help="run an experiment config and write a JSON report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
