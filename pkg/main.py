import argparse
import logging
import sys
from typing import List, Optional, Tuple

from src.bounds import (
    SieveParams,
    cor1_thresholds,
    cor2_eta_floor,
    cor2_theta_threshold,
    cor4_case2_infimum,
    cor4_region,
    frange,
    lambda_s,
    min_r,
    scan_cor4,
    scan_min_r,
    scan_rhs,
)
from src.config.run_config import load_run_config
from src.config.settings import (
    FORMULA_MAP_REVISION,
    LOG_LEVEL,
    NU_KAPPA,
    P_MAX,
    PRIME_CACHE_DIR,
    S_MAX,
    USE_PRIME_CACHE,
    VERSION,
    WORKERS,
)
from src.errors import CacheCorruptionError, ConfigError, PreconditionError
from src.experiments import ExperimentRunner, GoldenStore, Kind, fetch_window
from src.finder import RepresentationQuery, cor2_exceptions, count_chen, find_ternary
from src.sieve import PrimeCache, divisor_sum, factorize, mertens_log_sum, prime_cache, voronoi_residual
from src.singular import (
    binary_sing,
    binary_sing_ap,
    binary_sing_series,
    condition_a_constant,
    condition_b_constant,
    hs_series,
    omega_d,
    omega_prime_case,
    printed_case_one,
    ternary_one_ap,
    ternary_one_ap_series,
    ternary_two_ap,
    ternary_two_ap_series,
)
from src.utils import FORMATS, emit

logger = logging.getLogger("main")

SERIES_KINDS = ("binary", "binary_ap", "ternary_one_ap", "ternary_two_ap")


class CliParser(argparse.ArgumentParser):
 # Argument parser whose usage errors exit with status 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def window_arg(text: str) -> Tuple[int, int]:
    """X:Y"""
    try:
        X, Y = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X:Y, got {text!r}")
    return X, Y


def scan_arg(text: str) -> List[float]:
    """start:stop:step"""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    return frange(start, stop, step)


def _cache(cache_dir: Optional[str], workers: int) -> Optional[PrimeCache]:
    """Explicit cache directory, else the global cache when PRIME_CACHE_DIR is set"""
    if cache_dir:
        return PrimeCache(cache_dir, workers)
    if USE_PRIME_CACHE:
        prime_cache.workers = workers
        return prime_cache
    return None


def _require(args, *names: str):
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise PreconditionError(f"{args.command} needs {', '.join(missing)}")


def cmd_series(args):
    # Singular series as Euler product, series, or both
    kind = args.kind
    if kind in ("binary", "binary_ap"):
        _require(args, "r")
    else:
        _require(args, "n")
    if kind == "ternary_two_ap":
        _require(args, "q1", "a1", "q2", "a2")

    rows = []
    if args.form in ("product", "both"):
        if kind == "binary":
            value = binary_sing(args.r, args.p_max)
        elif kind == "binary_ap":
            value = binary_sing_ap(args.r, args.q, args.a, args.p_max)
        elif kind == "ternary_one_ap":
            value = ternary_one_ap(args.n, args.q, args.a, args.p_max)
        else:
            value = ternary_two_ap(args.n, args.q1, args.a1, args.q2, args.a2, args.p_max,
                                   printed=not args.without_half)
        rows.append({"kind": kind, "form": "product", **value.to_dict()})

    if args.form in ("series", "both"):
        if kind == "binary":
            value = binary_sing_series(args.r, args.s_max)
        elif kind == "binary_ap":
            value = hs_series(args.r, args.q, args.a, args.s_max)
        elif kind == "ternary_one_ap":
            value = ternary_one_ap_series(args.n, args.q, args.a, args.s_max)
        else:
            value = ternary_two_ap_series(args.n, args.q1, args.a1, args.q2, args.a2, args.s_max)
        rows.append({"kind": kind, "form": "series", **value.to_dict()})

    emit(rows, args.format, args.output)


def cmd_omega(args):
    # Sieve densities omega(d) and the empirical constants A1, A2
    rows = []
    for d in args.d or []:
        value = omega_d(d, args.n)
        rows.append({"n": args.n, "d": d, "omega": str(value), "value": float(value),
                     "ratio": float(value / d)})
    for ell in args.ell or []:
        value = omega_prime_case(ell, args.n)
        rows.append({"n": args.n, "ell": ell, "omega": str(value), "value": float(value),
                     "divisor_sum": str(omega_d(ell, args.n)), "printed_case_one": str(printed_case_one(ell))})
    if args.condition_a is not None:
        rows.append({"n": args.n, "ell_max": args.condition_a,
                     "A1": condition_a_constant(args.n, args.condition_a)})
    if args.condition_b is not None:
        rows.append({"n": args.n, "w_max": args.condition_b,
                     "A2": condition_b_constant(args.n, args.condition_b, args.kappa)})
    if not rows:
        raise PreconditionError("omega needs at least one of --d, --ell, --condition-a, --condition-b")
    emit(rows, args.format, args.output)


def cmd_sieveparams(args):
    # Sieve-constant inequality and corollary thresholds
    action = args.action
    if action == "lambda":
        rows = [{"s": args.s, "lambda_s": lambda_s(args.s)}]
    elif action == "rhs":
        if args.scan:
            rows = scan_rhs(args.kappa, args.mu, args.nu, args.scan)
        else:
            params = SieveParams(kappa=args.kappa, zeta=args.zeta, mu=args.mu, nu_kappa=args.nu, s=args.s)
            rows = [params.to_dict()]
    elif action == "minr":
        if args.scan:
            rows = scan_min_r(args.kappa, args.scan, args.nu)
        else:
            best = min_r(args.kappa, args.mu, args.nu)
            rows = [{"kappa": args.kappa, "mu": args.mu, "nu_kappa": args.nu, **best._asdict()}]
    elif action == "cor1":
        thresholds = cor1_thresholds(args.kappa, args.nu)
        rows = [thresholds.to_dict()]
    elif action == "cor2":
        rows = [{"s": args.s, "theta_threshold": cor2_theta_threshold(args.s),
                 "eta_floor": cor2_eta_floor(args.s)}]
    elif args.scan:
        theta1s = args.scan_theta1 or [args.theta1 if args.theta1 is not None else 0.861]
        rows = scan_cor4(args.scan, theta1s, args.s)
    elif args.eta is not None and args.theta1 is not None:
        rows = [cor4_region(args.eta, args.theta1, args.s).to_dict()]
    else:
        rows = [cor4_case2_infimum(args.s).to_dict()]
    emit(rows, args.format, args.output)


def cmd_experiment(args) -> int:
    # Run one experiment or a decay ladder from a TOML config
    config = load_run_config(args.config).override(
        command=args.action,
        cache_dir=args.cache_dir,
        workers=args.workers,
        seed=args.seed,
        output_format=args.format,
        output_path=args.output,
        ladder=args.ladder,
    )
    if args.seed is not None:
        config.experiment = config.experiment.with_values(seed=args.seed)
    spec = config.experiment

    cache = _cache(config.cache_dir, config.workers)
    golden = GoldenStore(config.golden_dir) if config.golden_dir else None
    runner = ExperimentRunner(workers=config.workers, cache=cache, golden=golden)

    if config.command == "decay":
        rows = runner.decay_report(spec, config.ladder)
        emit(rows, config.output_format, config.output_path)
        return 0

    report = runner.run(spec)
    summary = {**report.summary(), "config": config.to_dict()}
    if config.output_path:
        runner.save(report, config.output_path, config.to_dict())
        runner.print_summary(report)
    elif config.output_format == "json":
        emit([summary], "json")
    else:
        emit(report.breakdown(), "csv")

    if args.golden and spec.kind in (Kind.LEMMA1, Kind.LEMMA2):
        check = runner.check_golden(spec, report)
        if not check.passed:
            print(f"Golden check failed: {check.name} = {check.value:.6g} > {check.golden:.6g} + 10%",
                  file=sys.stderr)
            return 1
    return 0


def cmd_find(args):
    # Constrained ternary Goldbach representations
    conditions = tuple((i, s) for i, s in ((1, args.ps1), (2, args.ps2), (3, args.ps3)) if s is not None)
    query = RepresentationQuery(args.n, (args.window1, args.window2), conditions, args.mode, args.joint_s)
    result = find_ternary(query, cache=_cache(args.cache_dir, args.workers), workers=args.workers)
    if not result.solutions and query.mode != "count":
        print(f"No representation of {args.n} found", file=sys.stderr)
    emit(result.rows(), args.format, args.output)


def cmd_chen_count(args):
    # Primes p in a window with p + 2 = P_2
    X, Y = args.window
    window = fetch_window(X, Y, _cache(args.cache_dir, args.workers), args.workers)
    emit([{"X": X, "Y": Y, "count": count_chen(window, args.workers)}], args.format, args.output)


def cmd_exceptions(args) -> int:
    # Exceptional even targets of the almost-twin binary problem
    result = cor2_exceptions(args.x1, args.x2, args.y, args.s, args.theta_report,
                             cache=_cache(args.cache_dir, args.workers), workers=args.workers)
    emit([result], args.format, args.output)
    if args.golden_dir:
        name = f"cor2_X1{args.x1}_X2{args.x2}_Y{args.y}_s{args.s}"
        check = GoldenStore(args.golden_dir).check(name, result["exceptional_fraction"])
        if not check.passed:
            print(f"Golden check failed: {name}", file=sys.stderr)
            return 1
    return 0


def cmd_cache(args):
    # Build, verify or purge PWIN cache files
    cache = PrimeCache(args.cache_dir, args.workers) if args.cache_dir else prime_cache
    cache.workers = args.workers
    if args.action == "purge":
        removed = cache.purge(args.X, args.Y)
        emit([{"action": "purge", "removed": removed}], args.format, args.output)
        return
    _require(args, "X", "Y")
    if args.action == "build":
        window = cache.build(args.X, args.Y)
        row = {"action": "build", "X": args.X, "Y": args.Y, "path": str(cache.path_for(args.X, args.Y)),
               "primes": window.count()}
    else:
        cache.verify(args.X, args.Y)
        row = {"action": "verify", "X": args.X, "Y": args.Y, "identical": True}
    emit([row], args.format, args.output)


def cmd_arith(args):
    # Factorization, divisor sums and the Mertens-type sum
    if args.action == "factor":
        _require(args, "n")
        sig = factorize(args.n)
        row = {"n": sig.n, "factors": [list(f) for f in sig.factors], "big_omega": sig.big_omega,
               "nu": sig.nu, "tau": sig.tau}
    elif args.action == "divisor-sum":
        _require(args, "x")
        row = {"x": args.x, "D": divisor_sum(args.x), "voronoi_residual": voronoi_residual(args.x)}
    else:
        _require(args, "v", "w")
        row = {"v": args.v, "w": args.w, "sum": mertens_log_sum(args.v, args.w)}
    emit([row], args.format, args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(description="Goldbach-type sums in short intervals and arithmetic progressions")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {VERSION} (formula map {FORMULA_MAP_REVISION})")
    parser.add_argument("--cache-dir", help=f"Prime window cache directory (default {PRIME_CACHE_DIR} "
                        "when PRIME_CACHE_DIR is set, else windows are sieved in memory)")
    parser.add_argument("--workers", type=int, default=None, help=f"Worker processes (default {WORKERS})")
    parser.add_argument("--seed", type=int, help="Seed for pseudo-random experiment vectors")
    parser.add_argument("--format", choices=FORMATS, help="Output format (default json)")
    parser.add_argument("--output", help="Write results to this path instead of stdout")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Series command
    series_parser = subparsers.add_parser("series", help="Evaluate a singular series")
    series_parser.add_argument("--kind", choices=SERIES_KINDS, default="binary")
    series_parser.add_argument("--form", choices=("product", "series", "both"), default="product")
    series_parser.add_argument("--r", type=int)
    series_parser.add_argument("--n", type=int)
    series_parser.add_argument("--q", type=int, default=1)
    series_parser.add_argument("--a", type=int, default=0)
    series_parser.add_argument("--q1", type=int)
    series_parser.add_argument("--a1", type=int)
    series_parser.add_argument("--q2", type=int)
    series_parser.add_argument("--a2", type=int)
    series_parser.add_argument("--p-max", type=int, default=P_MAX, help="Euler product prime cutoff")
    series_parser.add_argument("--s-max", type=int, default=S_MAX, help="Series cutoff")
    series_parser.add_argument("--without-half", action="store_true",
                               help="Drop the leading 1/2 of the two-AP product")

    # Omega command
    omega_parser = subparsers.add_parser("omega", help="Sieve density omega(d) for (n, n+2, n+4)")
    omega_parser.add_argument("--n", type=int, required=True)
    omega_parser.add_argument("--d", type=int, nargs="+", help="Odd squarefree d")
    omega_parser.add_argument("--ell", type=int, nargs="+", help="Odd primes, closed-form case")
    omega_parser.add_argument("--condition-a", type=int, metavar="ELL_MAX")
    omega_parser.add_argument("--condition-b", type=int, metavar="W_MAX")
    omega_parser.add_argument("--kappa", type=float, default=2.0)

    # Sieve parameters command
    sp_parser = subparsers.add_parser("sieveparams", help="Sieve-constant inequality and thresholds")
    sp_parser.add_argument("action", choices=("lambda", "rhs", "minr", "cor1", "cor2", "cor4"))
    sp_parser.add_argument("--kappa", type=float, default=2.0)
    sp_parser.add_argument("--zeta", type=float, default=0.360)
    sp_parser.add_argument("--mu", type=float, default=4.628)
    sp_parser.add_argument("--nu", type=float, default=NU_KAPPA)
    sp_parser.add_argument("--s", type=int, default=3)
    sp_parser.add_argument("--eta", type=float)
    sp_parser.add_argument("--theta1", type=float)
    sp_parser.add_argument("--scan", type=scan_arg, metavar="START:STOP:STEP",
                           help="zeta (rhs), mu (minr) or eta (cor4) grid")
    sp_parser.add_argument("--scan-theta1", type=scan_arg, metavar="START:STOP:STEP")

    # Experiment command
    exp_parser = subparsers.add_parser("experiment", help="Run a mean-value experiment")
    exp_parser.add_argument("action", choices=("run", "decay"))
    exp_parser.add_argument("config", help="TOML run configuration")
    exp_parser.add_argument("--ladder", type=int, nargs="+", help="Y values for decay")
    exp_parser.add_argument("--golden", action="store_true", help="Check lemma ratios against golden values")

    # Find command
    find_parser = subparsers.add_parser("find", help="Find n = p1 + p2 + p3 under almost-twin conditions")
    find_parser.add_argument("--n", type=int, required=True)
    find_parser.add_argument("--window1", type=window_arg, required=True, metavar="X:Y")
    find_parser.add_argument("--window2", type=window_arg, required=True, metavar="X:Y")
    find_parser.add_argument("--ps1", type=int, help="p1 + 2 must be a P_s")
    find_parser.add_argument("--ps2", type=int, help="p2 + 2 must be a P_s")
    find_parser.add_argument("--ps3", type=int, help="p3 + 2 must be a P_s")
    find_parser.add_argument("--joint-s", type=int, help="(p1 + 2)(p2 + 2) must be a P_s")
    find_parser.add_argument("--mode", choices=("first", "all", "count"), default="first")

    # Chen count command
    chen_parser = subparsers.add_parser("chen-count", help="Count Chen primes in a window")
    chen_parser.add_argument("--window", type=window_arg, required=True, metavar="X:Y")

    # Exceptions command
    exc_parser = subparsers.add_parser("exceptions", help="Exceptional set of the almost-twin binary problem")
    exc_parser.add_argument("--x1", type=int, required=True)
    exc_parser.add_argument("--x2", type=int, required=True)
    exc_parser.add_argument("--y", type=int, required=True)
    exc_parser.add_argument("--s", type=int, default=3)
    exc_parser.add_argument("--theta-report", type=float)
    exc_parser.add_argument("--golden-dir", help="Record or check the exceptional fraction here")

    # Cache command
    cache_parser = subparsers.add_parser("cache", help="Manage prime window cache files")
    cache_parser.add_argument("action", choices=("build", "verify", "purge"))
    cache_parser.add_argument("--X", type=int)
    cache_parser.add_argument("--Y", type=int)

    # Arith command
    arith_parser = subparsers.add_parser("arith", help="Elementary arithmetic functions")
    arith_parser.add_argument("action", choices=("factor", "divisor-sum", "mertens"))
    arith_parser.add_argument("--n", type=int)
    arith_parser.add_argument("--x", type=int)
    arith_parser.add_argument("--v", type=float)
    arith_parser.add_argument("--w", type=float)

    return parser


COMMANDS = {
    "series": cmd_series,
    "omega": cmd_omega,
    "sieveparams": cmd_sieveparams,
    "experiment": cmd_experiment,
    "find": cmd_find,
    "chen-count": cmd_chen_count,
    "exceptions": cmd_exceptions,
    "cache": cmd_cache,
    "arith": cmd_arith,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.getLevelName(args.log_level.upper())
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")

    if not args.command:
        parser.print_usage()
        return 1
    if args.workers is not None and args.workers < 1:
        print(f"Error: --workers must be >= 1, got {args.workers}", file=sys.stderr)
        return 1

    if args.command != "experiment":
        args.workers = args.workers or WORKERS
        args.format = args.format or "json"

    try:
        return COMMANDS[args.command](args) or 0
    except (PreconditionError, ConfigError, CacheCorruptionError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"Internal error in {args.command}")
        print(f"Internal error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
