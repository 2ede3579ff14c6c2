# cli/runner.py
"""Command-line front end: classify, exact, simulate and compare.

Exit codes: 0 ok, 2 invalid game or wrong kind, 3 numeric failure,
4 non-terminating simulation, 1 anything unexpected.
"""
import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from loguru import logger
from pydantic import ValidationError

from core import __version__
from core.asymptotics import (
    Quantity,
    clique_base,
    fluctuation_profile,
    limit_cdf_acyclic_clique,
    predict,
    semicircle_expected_rounds,
    tie_free_slope,
)
from core.errors import JankenError, NumericError, WrongKindError
from core.exact import ExactEngine, choose_mode
from core.export import (
    export_predictions,
    export_profile,
    export_simulation,
    export_tables,
)
from core.game import GameKind, GameSpec, classify
from core.metrics import write_metrics
from core.registry import is_semicircle, load_spec
from core.schemas import RunManifest, SimConfig, SimMode
from core.settings import get_settings
from core.simulation import semicircle_game, simulate


def configure_logging(verbose: bool = False) -> None:
    logger.remove()
    level = "DEBUG" if verbose else get_settings().log_level
    logger.add(
        sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <8} | {message}"
    )


def _fmt(value) -> str:
    return f"{float(value):.6g}"


def _parse_count(text: str) -> int:
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(float(text))


def parse_n(text: str) -> int:
    """A single player count: "20", "1e3" or "2^10"."""
    if ".." in text:
        raise argparse.ArgumentTypeError(
            f"simulate takes a single player count, not a range: {text!r}"
        )
    return parse_n_range(text)[0]


def parse_seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Bad seed: {text!r}")
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"Seed must be in [0, 2^64): {text!r}")
    return seed


def parse_n_range(text: str) -> Tuple[int, int]:
    """"25" -> (25, 25); "1024..4096" or "2^10..2^12" -> (1024, 4096)."""
    lo, sep, hi = text.partition("..")
    try:
        first = _parse_count(lo)
        last = _parse_count(hi) if sep else first
    except ValueError:
        raise argparse.ArgumentTypeError(f"Bad player count or range: {text!r}")
    if first < 1 or last < first:
        raise argparse.ArgumentTypeError(f"Bad player count or range: {text!r}")
    return first, last


def _manifest(
    args: argparse.Namespace, spec: Optional[GameSpec], **extra
) -> RunManifest:
    return RunManifest(
        tool_version=__version__,
        command=args.command,
        argv=list(args.argv),
        spec_name=spec.name if spec else args.spec,
        spec_digest=spec.digest() if spec else None,
        **extra,
    )


# -------------------------
# COMMANDS
# -------------------------
def cmd_classify(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec)
    cls = classify(spec)
    head = f"rho={cls.rho} nu={cls.nu} kind={cls.kind.value}"
    if cls.kind is GameKind.LOG:
        head += f" alpha={cls.alpha}"
    print(head)
    alphas = ",".join(str(a) for a in cls.alphas)
    slope = tie_free_slope(cls)
    ratio = "rational" if slope.all_rational else "irrational"
    print(f"alphas={alphas} h_nu={cls.h_nu:.6g} log-ratios={ratio}")
    for w in cls.max_wod_sets:
        support = ",".join(spec.label(h) for h in sorted(w.support))
        winners = ",".join(spec.label(h) for h in sorted(w.winners))
        print(f"  maximizing WOD set {{{support}}} winners {{{winners}}}")
    return 0


def cmd_exact(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec)
    horizon = args.N
    mode = choose_mode(horizon, args.mode)
    engine = ExactEngine(spec, mode)
    if args.L is None and engine.classification.kind is GameKind.EXP:
        logger.info(
            "Exp-game without --L: CDF levels run until the tail is below tolerance"
        )

    try:
        tables = engine.build_tables(horizon, levels=args.L, order=args.K)
    except NumericError as e:
        if mode.value == "float":
            logger.error(f"{e}; retry with --mode rational")
        raise

    out = Path(args.out)
    manifest = _manifest(
        args,
        spec,
        numeric_mode=mode.value,
        horizons={"N": horizon, "L": tables.levels, "K": args.K},
    )
    export_tables(tables, out, args.format, manifest)
    write_metrics(str(out / "metrics.prom"))

    print(f"{'n':>6} {'mu':>14} {'var':>14} {'y_mean':>14} {'z_mean':>14}")
    for row in tables.rows():
        print(
            f"{row['n']:6d} {_fmt(row['mu']):>14} {_fmt(row['var']):>14} "
            f"{_fmt(row['y_mean']):>14} {_fmt(row['z_mean']):>14}"
        )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    n = args.n
    out = Path(args.out)
    if is_semicircle(args.spec):
        summary = semicircle_game(n, args.trials, args.seed)
        exact = {"X": float(semicircle_expected_rounds(n))}
        spec = None
    else:
        spec = load_spec(args.spec)
        config = SimConfig(
            n=n, trials=args.trials, seed=args.seed, mode=SimMode(args.sim_mode)
        )
        summary = simulate(spec, config)
        exact = None
        if args.N is not None and args.N >= n:
            engine = ExactEngine(spec, choose_mode(n, args.mode))
            exact = {
                "X": float(engine.mean_rounds(n)[n]),
                "Y": float(engine.total_hands_mean(n)[n]),
                "Z": float(engine.tie_free_mean(n)[n]),
            }

    manifest = _manifest(args, spec, seed=args.seed, horizons={"n": n})
    export_simulation(summary, out, manifest, exact_mean=exact)
    write_metrics(str(out / "metrics.prom"))

    for name, stats in summary.stats.items():
        line = (
            f"{name}: mean={_fmt(stats.mean)} var={_fmt(stats.variance)} "
            f"se={_fmt(stats.stderr)}"
        )
        if exact and name in exact:
            z = (stats.mean - exact[name]) / stats.stderr if stats.stderr > 0 else 0.0
            line += f" exact={_fmt(exact[name])} z={z:+.2f}"
        print(line)
    for name, value in summary.ks.items():
        print(f"KS {name} = {value:.4f}")
    return 0


def _compare_quantities(
    engine: ExactEngine, spec: GameSpec, n: int
) -> List[Tuple[Quantity, float]]:
    """Exact values at n for every quantity with a closed-form prediction."""
    producers = {
        Quantity.X_MEAN: lambda: engine.mean_rounds(n)[n],
        Quantity.X_VAR: lambda: engine.variance_rounds(n)[n],
        Quantity.Y_MEAN: lambda: engine.total_hands_mean(n)[n],
        Quantity.Y_VAR: lambda: engine.total_hands_variance(n)[n],
        Quantity.Z_MEAN: lambda: engine.tie_free_mean(n)[n],
    }
    rows = []
    for quantity, produce in producers.items():
        try:
            prediction = predict(spec, quantity, n)
            exact = float(produce())
        except (WrongKindError, NumericError) as e:
            print(f"{quantity.value}: skipped ({e.code}: {e})")
            continue
        ratio = exact / prediction.leading if prediction.leading else math.nan
        print(
            f"{quantity.value}: exact={_fmt(exact)} "
            f"predicted={_fmt(prediction.leading)} "
            f"ratio={_fmt(ratio)}  [{prediction.validity}]"
        )
        rows.append((quantity, exact))
    return rows


def cmd_compare(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec)
    cls = classify(spec)
    lo, hi = args.n
    if hi < 2:
        raise WrongKindError("compare needs at least two players")
    mode = choose_mode(hi, args.mode)
    engine = ExactEngine(spec, mode)
    out = Path(args.out)
    print(f"{spec.name}: rho={cls.rho} nu={cls.nu} kind={cls.kind.value} n={lo}..{hi}")

    _compare_quantities(engine, spec, hi)
    extra = {}

    if cls.kind is GameKind.EXP:
        try:
            mu = engine.mean_rounds(hi)
            scaled = cls.nu * float(cls.rho) ** hi * float(mu[hi])
            print(f"nu*rho^n*mu_n = {scaled:.4f}")
            extra["scaled_mean"] = scaled
        except NumericError as e:
            print(f"nu*rho^n*mu_n: skipped ({e.code}: {e})")
    else:
        base = clique_base(spec)
        mu = engine.mean_rounds(hi)
        shift = 0.5 if base == 2 else 0.0
        alpha = cls.alpha
        log_base = math.log(1 / float(alpha))
        start = lo if lo < hi else max(2, hi // 2)
        profile = fluctuation_profile(
            mu,
            alpha,
            lambda k: math.log(k) / log_base + shift,
            n_range=(start, hi),
            center=shift == 0.0,
        )
        export_profile(profile, out / "fluctuation_profile.csv")
        print(
            f"residual amplitude over n in [{start}, {hi}] = {profile.amplitude:.3g} "
            f"(offset {profile.offset:.4g})"
        )
        extra["residual_amplitude"] = profile.amplitude

        if base is not None:
            cdf = engine.round_distribution(hi, args.L)
            floor_level = int(math.floor(math.log(hi) / math.log(base) + 1e-12))
            deviations = []
            for ell in range(-2, len(cdf) - floor_level):
                level = floor_level + ell
                if level < 0:
                    continue
                exact = float(cdf[level][hi])
                deviations.append(abs(exact - limit_cdf_acyclic_clique(base, hi, ell)))
            worst = max(deviations)
            print(f"limit-CDF max deviation at n={hi} = {worst:.4g}")
            extra["limit_cdf_max_deviation"] = worst
        else:
            print(
                "LimitCdf: skipped (WrongKind: no closed-form limit law for this game)"
            )

    predictions = []
    for quantity in (Quantity.X_MEAN, Quantity.Y_MEAN, Quantity.Z_MEAN):
        predictions.append(predict(spec, quantity, hi))
    manifest = _manifest(
        args, spec, numeric_mode=mode.value, horizons={"n_lo": lo, "n_hi": hi}
    )
    export_predictions(predictions, out / "predictions.json", manifest, extra)
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "exact": cmd_exact,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--spec", required=True, help="builtin:<name>[?k=v] or a JSON game file"
    )
    common.add_argument("--mode", choices=["rational", "float"], default=None)
    common.add_argument("--out", default="results", help="Output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="janken",
        description="Exact analysis and simulation of Janken leader selection",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="Print rho, nu, kind and alphas")

    exact = sub.add_parser("exact", parents=[common], help="Exact tables up to N")
    exact.add_argument("--N", type=int, default=8)
    exact.add_argument("--L", type=int, default=None, help="CDF levels")
    exact.add_argument("--K", type=int, default=2, help="Highest moment order")

    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo trials")
    sim.add_argument("--n", type=parse_n, required=True)
    sim.add_argument(
        "--N", type=int, default=None, help="Cross-check against exact values"
    )
    sim.add_argument("--trials", type=lambda s: int(float(s)), default=1000)
    sim.add_argument("--seed", type=parse_seed, default=0)
    sim.add_argument(
        "--sim-mode",
        choices=[m.value for m in SimMode],
        default=SimMode.PER_ROUND.value,
    )

    compare = sub.add_parser("compare", parents=[common], help="Exact vs predicted")
    compare.add_argument("--n", type=parse_n_range, required=True)
    compare.add_argument("--L", type=int, default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    get_settings(reset=True)
    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args)
    except JankenError as e:
        logger.error(f"{e.code}: {e}")
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"error: InvalidArgument: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"Unexpected failure in {args.command}: {e}")
        return 1
