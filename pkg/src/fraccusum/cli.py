"""Command-line front end.

    fraccusum generate   --hurst H --steps N --dt STEP [--seed S] [drift flags]
    fraccusum calibrate  --gamma G
    fraccusum detect     PATH_FILE --hurst H (--threshold C | --gamma G) [drift flags]
    fraccusum experiment CONFIG.toml [flag overrides] [--output DIR] [--strict Z]
    fraccusum validate   [--hurst-list 0.3,0.5,0.75] [--fast]

Exit codes: 0 success or alarm, 2 usage or config error, 3 no alarm on the
horizon, 4 strict z-score bound breached, 5 validation failure.
"""

import argparse
import csv
import enum
import logging
import math
import sys
import tomllib
from collections.abc import Sequence
from pathlib import Path

from fraccusum.config import settings
from fraccusum.engine.cusum import calibrate_threshold, cusum_run, theoretical_characteristics
from fraccusum.engine.fbm import apply_volatility, inject_drift, sample_fbm, sample_fbm_exact
from fraccusum.engine.likelihood import llr_from_path
from fraccusum.errors import ConfigError, FracCusumError, PathFileError
from fraccusum.harness.report import format_summary_table, write_report
from fraccusum.harness.runner import run_experiment
from fraccusum.harness.validation import DEFAULT_HURST_LIST, run_validation_suite
from fraccusum.models.drift import DriftSpec, VolatilitySpec
from fraccusum.models.enums import DriftFamily, Regime, ReportFormat, Sampler
from fraccusum.models.experiment import CONFIG_SECTIONS, ExperimentConfig
from fraccusum.models.grid import Grid, SamplePath, Seed
from fraccusum.utils import dumps_real, fmt_real

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_ALARM = 3
EXIT_STRICT = 4
EXIT_VALIDATION = 5

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

PATH_HEADER = ["time", "value"]

# CLI flag dest -> (config section, key)
OVERRIDES = {
    "hurst": ("experiment", "hurst"),
    "regime": ("experiment", "regime"),
    "replicates": ("experiment", "replicates"),
    "master_seed": ("experiment", "master_seed"),
    "workers": ("experiment", "workers"),
    "threshold": ("experiment", "threshold"),
    "gamma": ("experiment", "gamma"),
    "stream_steps": ("experiment", "stream_steps"),
    "monitor_every": ("experiment", "monitor_every"),
    "sampler": ("experiment", "sampler"),
    "step": ("grid", "step"),
    "count": ("grid", "count"),
    "horizon": ("grid", "horizon"),
    "drift_family": ("drift", "family"),
    "theta": ("drift", "theta"),
    "alpha": ("drift", "alpha"),
    "c0": ("drift", "c0"),
    "c1": ("drift", "c1"),
    "power": ("drift", "power"),
    "sigma": ("sigma", "value"),
}


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _values(choices: type[enum.Enum]) -> list[str]:
    return [member.value for member in choices]


def _hurst_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers like 0.3,0.5, got {text!r}") from None


# ---- path files ----


def write_path_file(path: SamplePath, handle) -> None:
    """CSV with header time,value and one row per grid time, reals at 17 digits."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(PATH_HEADER)
    for t, x in zip(path.grid.times().tolist(), path.values.tolist(), strict=True):
        writer.writerow([fmt_real(t), fmt_real(x)])


def read_path_file(source: str | Path) -> SamplePath:
    """Parse a path CSV; the grid is recovered from the time column.

    Raises:
        PathFileError: unreadable file, bad header, malformed row, or a time
            column that does not start at 0 or is not uniform.
    """
    try:
        with open(source, encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as e:
        raise PathFileError(f"cannot read {source}: {e}") from e

    if not rows or [cell.strip() for cell in rows[0]] != PATH_HEADER:
        raise PathFileError("header must be 'time,value'", line=1)

    times, values, lines = [], [], []
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise PathFileError(f"expected 2 fields, got {len(row)}", line=line)
        try:
            t, x = float(row[0]), float(row[1])
        except ValueError as e:
            raise PathFileError(str(e), line=line) from None
        times.append(t)
        values.append(x)
        lines.append(line)

    if len(times) < 3:
        raise PathFileError(f"need at least 3 rows, got {len(times)}")
    if times[0] != 0.0:
        raise PathFileError(f"time must start at 0, got {times[0]}", line=lines[0])
    step = times[1]
    if not step > 0.0:
        raise PathFileError(f"time step must be positive, got {step}", line=lines[1])
    for j, t in enumerate(times):
        if not math.isclose(t, j * step, rel_tol=1e-9, abs_tol=1e-12):
            raise PathFileError(f"non-uniform time grid at t={t}", line=lines[j])

    try:
        return SamplePath(grid=Grid(step=step, count=len(times) - 1), values=values)
    except ValueError as e:
        raise PathFileError(str(e)) from None


# ---- config ----


def load_experiment_config(
    config_file: str | Path | None,
    args: argparse.Namespace,
) -> ExperimentConfig:
    """TOML sections merged with flag overrides; flags win.

    A grid flag (--step / --count) without --horizon drops the file's horizon
    so the overridden grid stays consistent.

    Raises:
        ConfigError: unreadable or invalid file, or inconsistent values.
    """
    sections: dict[str, dict] = {name: {} for name in CONFIG_SECTIONS}
    if config_file is not None:
        try:
            with open(config_file, "rb") as handle:
                loaded = tomllib.load(handle)
        except OSError as e:
            raise ConfigError(f"cannot read config {config_file}: {e}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"invalid TOML in {config_file}: {e}") from e
        for name, body in loaded.items():
            if not isinstance(body, dict):
                raise ConfigError(f"top-level key {name!r} must be a [section]")
            sections.setdefault(name, {}).update(body)

    overrides = {
        dest: value for dest in OVERRIDES if (value := getattr(args, dest, None)) is not None
    }
    if ("step" in overrides or "count" in overrides) and "horizon" not in overrides:
        sections["grid"].pop("horizon", None)
    for chosen, other in (("threshold", "gamma"), ("gamma", "threshold")):
        if chosen in overrides:
            sections["experiment"].pop(other, None)
    for dest, value in overrides.items():
        section, key = OVERRIDES[dest]
        sections[section][key] = value

    sections["experiment"].setdefault("master_seed", settings.seed)
    sections["experiment"].setdefault("workers", settings.workers)
    return ExperimentConfig.from_sections(sections)


def _drift_from_args(args: argparse.Namespace) -> DriftSpec:
    family = args.drift_family or DriftFamily.POLYNOMIAL
    values = {
        key: getattr(args, key)
        for key in ("theta", "alpha", "c0", "c1", "power")
        if getattr(args, key) is not None
    }
    return DriftSpec(family=family, **values)


def _sigma_from_args(args: argparse.Namespace) -> VolatilitySpec:
    return VolatilitySpec.constant(args.sigma) if args.sigma is not None else VolatilitySpec()


# ---- commands ----


def cmd_generate(args: argparse.Namespace) -> int:
    """Sample a path (optionally with drift from t = 0) and write it as CSV."""
    grid = Grid(step=args.dt, count=args.steps)
    seed = Seed(master_seed=settings.seed if args.seed is None else args.seed)
    if args.sampler == Sampler.EXACT:
        path = sample_fbm_exact(args.hurst, grid, seed)
    else:
        path = sample_fbm(args.hurst, grid, seed)
    path = apply_volatility(path, _sigma_from_args(args))

    tau = 0.0 if args.regime == Regime.POST_CHANGE_AT_ZERO else math.inf
    path = inject_drift(path, _drift_from_args(args), tau)

    if args.output is None:
        write_path_file(path, sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            write_path_file(path, handle)
        logger.info("Wrote %d-step path to %s", grid.count, args.output)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    """Print c, g(c) and h(c) for the false-alarm budget gamma."""
    threshold = calibrate_threshold(args.gamma)
    g, h = theoretical_characteristics(threshold)
    print(dumps_real({"gamma": args.gamma, "c": threshold.c, "g": g, "h": h}))
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    """Run the CUSUM detector offline over a path file."""
    if (args.threshold is None) == (args.gamma is None):
        raise ConfigError("give exactly one of --threshold and --gamma")
    path = read_path_file(args.path_file)
    threshold = args.threshold if args.threshold is not None else calibrate_threshold(args.gamma).c

    drift, sigma = _drift_from_args(args), _sigma_from_args(args)
    llr = llr_from_path(path, args.hurst, drift, sigma)
    result = cusum_run(llr, threshold, monitor_every=args.monitor_every or 1)

    summary = {
        "hurst": args.hurst,
        "threshold": threshold,
        "drift": drift.model_dump(mode="json"),
        "sigma": sigma.model_dump(mode="json"),
        "grid": path.grid.model_dump(mode="json"),
        **result.summary(),
    }
    print(dumps_real(summary))
    return EXIT_OK if result.stopped else EXIT_NO_ALARM


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run a Monte Carlo batch, write report.json and report.csv, print the z table."""
    config = load_experiment_config(args.config_file, args)
    report = run_experiment(config)

    output = Path(args.output) if args.output is not None else settings.report_dir
    output.mkdir(parents=True, exist_ok=True)
    write_report(report, output / "report.json", ReportFormat.JSON)
    write_report(report, output / "report.csv", ReportFormat.CSV)

    print(format_summary_table(report))
    if args.strict is not None:
        breaches = [
            row.name for row in report.estimands
            if row.z_score is not None and abs(row.z_score) > args.strict
        ]
        if breaches:
            print(f"strict bound |z| <= {args.strict} breached by: {', '.join(breaches)}",
                  file=sys.stderr)
            return EXIT_STRICT
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Run the property suite; exit 5 if any property fails."""
    replicates = args.replicates or (1_000 if args.fast else 10_000)
    seed = settings.seed if args.seed is None else args.seed
    results = run_validation_suite(args.hurst_list, replicates, seed)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        hurst = "-" if result.hurst is None else f"{result.hurst:g}"
        print(f"{status}  {result.name:<24} H={hurst:<6} {result.detail}")
    return EXIT_OK if all(result.passed for result in results) else EXIT_VALIDATION


# ---- parser ----


def _add_model_flags(parser: argparse.ArgumentParser, hurst_required: bool) -> None:
    parser.add_argument("--hurst", type=float, required=hurst_required, help="Hurst index H")
    parser.add_argument("--drift-family", choices=_values(DriftFamily),
                        help="post-change drift family (default polynomial)")
    parser.add_argument("--theta", type=float, help="polynomial drift amplitude")
    parser.add_argument("--alpha", type=float, help="polynomial drift exponent")
    parser.add_argument("--c0", type=float, help="state drift intercept")
    parser.add_argument("--c1", type=float, help="state drift slope")
    parser.add_argument("--power", type=float, help="bounded_power exponent in [0, 1)")
    parser.add_argument("--sigma", type=_positive_float, help="constant volatility")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraccusum",
        description="CUSUM change detection for fractional Brownian motion observations.",
    )
    parser.add_argument("--log-level", default=None, type=str.upper, choices=LOG_LEVELS,
                        help=f"logging level (default {settings.log_level})")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="sample a path and write it as CSV")
    _add_model_flags(generate, hurst_required=True)
    generate.add_argument("--steps", type=int, required=True, help="number of increments")
    generate.add_argument("--dt", type=_positive_float, required=True, help="grid step")
    generate.add_argument("--seed", type=int, help="master seed (default FRACCUSUM_SEED)")
    generate.add_argument("--sampler", choices=_values(Sampler),
                          default=Sampler.CIRCULANT.value)
    generate.add_argument("--regime", choices=_values(Regime),
                          default=Regime.PRE_CHANGE.value,
                          help="post_change_at_zero adds the drift from t = 0")
    generate.add_argument("--output", "-o", help="output CSV (default stdout)")
    generate.set_defaults(handler=cmd_generate)

    calibrate = commands.add_parser("calibrate", help="solve h(c) = gamma")
    calibrate.add_argument("--gamma", type=_positive_float, required=True)
    calibrate.set_defaults(handler=cmd_calibrate)

    detect = commands.add_parser("detect", help="run CUSUM over a path file")
    detect.add_argument("path_file")
    _add_model_flags(detect, hurst_required=True)
    detect.add_argument("--threshold", type=_positive_float)
    detect.add_argument("--gamma", type=_positive_float)
    detect.add_argument("--monitor-every", type=int)
    detect.set_defaults(handler=cmd_detect)

    experiment = commands.add_parser("experiment", help="run a Monte Carlo batch")
    experiment.add_argument("config_file", nargs="?")
    _add_model_flags(experiment, hurst_required=False)
    experiment.add_argument("--regime", choices=_values(Regime))
    experiment.add_argument("--replicates", type=int)
    experiment.add_argument("--master-seed", type=int)
    experiment.add_argument("--workers", type=int)
    experiment.add_argument("--threshold", type=_positive_float)
    experiment.add_argument("--gamma", type=_positive_float)
    experiment.add_argument("--stream-steps", type=int)
    experiment.add_argument("--monitor-every", type=int)
    experiment.add_argument("--sampler", choices=_values(Sampler))
    experiment.add_argument("--step", type=_positive_float)
    experiment.add_argument("--count", type=int)
    experiment.add_argument("--horizon", type=_positive_float)
    experiment.add_argument("--output", "-o", help="report directory (default report_dir)")
    experiment.add_argument("--strict", type=_positive_float,
                            help="exit 4 if any |z| exceeds this bound")
    experiment.set_defaults(handler=cmd_experiment)

    validate = commands.add_parser("validate", help="run the built-in property suite")
    validate.add_argument("--hurst-list", type=_hurst_list, default=DEFAULT_HURST_LIST)
    validate.add_argument("--replicates", type=int)
    validate.add_argument("--fast", action="store_true", help="1e3 instead of 1e4 replicates")
    validate.add_argument("--seed", type=int)
    validate.set_defaults(handler=cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        level = args.log_level or settings.log_level.upper()
        if level not in LOG_LEVELS:
            raise ConfigError(f"unknown log level {level!r}, expected one of {LOG_LEVELS}")
        logging.basicConfig(
            level=level,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        return args.handler(args)
    except (FracCusumError, OSError, ValueError) as e:
        print(f"fraccusum {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
