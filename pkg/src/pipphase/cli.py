"""Command-line driver.

Exit codes: 0 success, 1 a verification property failed, 2 usage or
configuration error. ``PIPPHASE_THREADS`` sets the trial-level thread count.
"""

import argparse
import logging
import math
import sys

from . import formulas as fb
from .dag import read_edge_list, rtc_sizes, sample_barak_erdos, transitive_closure, dumps_edge_list
from .errors import PipphaseError
from .experiments import ConfigError, SweepConfig, edge_probability, run_gamma_sweep, run_phase_sweep
from .suites import SUITES, run_verification_suite, suite_majority

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _cmd_gen_dag(args):
    if (args.c is None) == (args.p is None):
        raise ConfigError("give exactly one of --c and --p")
    if args.p is not None:
        p = args.p
    else:
        if args.c < 0:
            raise ConfigError("--c must be non-negative")
        p, clamped = edge_probability(args.n, args.c)
        if clamped:
            logging.warning("edge probability clamped to 1")
    text = dumps_edge_list(sample_barak_erdos(args.n, p, args.seed))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_closure(args):
    g = read_edge_list(args.input)
    c = transitive_closure(g)
    print(f"n {g.n}")
    print(f"gamma_star {c.gamma_star}")
    print(f"delta {c.delta}")
    print("rtc_sizes " + " ".join(str(s) for s in rtc_sizes(c)))
    return EXIT_OK


def _config(args):
    return SweepConfig(args.n, args.c, args.trials, args.seed, args.out)


def _cmd_phase(args):
    records = run_phase_sweep(_config(args))
    if not args.out:
        from .experiments import PHASE_HEADER, dumps_csv

        sys.stdout.write(dumps_csv(PHASE_HEADER, records))
    return EXIT_OK


def _cmd_gamma(args):
    records = run_gamma_sweep(_config(args), A=args.A, kappa=args.kappa)
    if not args.out:
        from .experiments import GAMMA_HEADER, dumps_csv

        sys.stdout.write(dumps_csv(GAMMA_HEADER, records))
    return EXIT_OK


def _cmd_verify(args):
    if args.cases < 1:
        raise ConfigError("--cases must be >= 1")
    if args.suite == "majority" and args.samples is not None:
        report = suite_majority(args.cases, args.seed, samples=args.samples)
    else:
        report = run_verification_suite(args.suite, args.cases, args.seed)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_FAIL


def _cmd_bounds(args):
    out = []
    d, eps, n, c = args.delta, args.eps, args.n, args.c
    if d is not None:
        out.append(("theta(delta+1)", fb.theta(d + 1)))
        if n is not None:
            out.append(("lll_lower_bound", fb.lll_lower_bound(d, n)))
            out.append(("f_g_exact", fb.f_g_exact(d, n)))
    if eps is not None and n is not None:
        out.append(("f_epsilon_exact", fb.f_epsilon_exact(n, eps)))
    if d is not None and d >= 1 and eps is not None and eps <= fb.theta(d + 1):
        r = fb.rho(d, eps)
        out += [("alpha", r.alpha), ("lambda", r.lam), ("rho", r.rho)]
    if eps is not None and eps <= 0.5:
        for a, dd in ((16, 3), (64, 3)):
            out.append((f"majority_bound(a={a},d={dd})", fb.majority_bound(1.0 - eps, a, dd)))
    if eps is not None and 0.0 < eps < 1.0:
        gp = fb.game_parameters(eps)
        out += [("game_n0", gp.n0), ("game_c", gp.c), ("game_delta_margin", gp.delta_margin)]
    if c is not None:
        out.append(("phase_limit", fb.phase_limit(c)))
        if n is not None and n >= 16:
            w = fb.pittel_tungol_window(n, c, args.A, args.kappa)
            out += [("window_lo", w.lo), ("window_hi", w.hi), ("window_center", w.center)]
            if c > 0:
                gamma_hat = max(1.0, w.center)
                out.append(("f_n_prediction", fb.f_epsilon_exact(n, fb.theta(gamma_hat))))
    if not out:
        raise ConfigError("nothing to compute: pass at least one of --delta --eps --n --c")
    width = max(len(k) for k, _ in out)
    for k, v in out:
        print(f"{k:<{width}}  {v:.17g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="pipphase", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dag", help="sample a Barak-Erdos DAG as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen_dag)

    p = sub.add_parser("closure", help="RTC sizes and gamma* of an edge-list file")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=_cmd_closure)

    for name, func, help_ in (
        ("phase", _cmd_phase, "failure-free probability sweep"),
        ("gamma", _cmd_gamma, "gamma* sweep against the whp windows"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=int, nargs="+", required=True)
        p.add_argument("--c", type=float, nargs="+", required=True)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        if name == "gamma":
            p.add_argument("--A", type=float, default=1.0)
            p.add_argument("--kappa", type=float, default=0.1)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run a randomised property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, help="Monte Carlo samples per instance (majority)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bounds", help="print closed-form quantities")
    p.add_argument("--delta", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=0.1)
    p.set_defaults(func=_cmd_bounds)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PipphaseError, ValueError, OSError) as exc:
        print(f"pipphase {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
