"""Report persistence: estimand CSV, nested JSON and a console summary table."""

import csv
import logging
from pathlib import Path

from fraccusum.errors import ReportIOError
from fraccusum.models.enums import ReportFormat
from fraccusum.models.experiment import ExperimentReport
from fraccusum.utils import dumps_real, fmt_real

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("name", "estimate", "std_error", "theory", "z_score", "n", "censor_rate")


def canonical_json(report: ExperimentReport) -> str:
    """Stable JSON text of a report with reals at 17 significant digits.

    Equal reports give byte-identical text.
    """
    return dumps_real(report.model_dump(mode="json")) + "\n"


def _write_csv(report: ExperimentReport, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.estimands:
        writer.writerow([
            row.name,
            fmt_real(row.estimate),
            fmt_real(row.std_error),
            fmt_real(row.theory),
            fmt_real(row.z_score),
            row.n,
            fmt_real(row.censor_rate),
        ])


def write_report(
    report: ExperimentReport,
    destination: str | Path,
    format: ReportFormat = ReportFormat.JSON,
) -> None:
    """Write a report as CSV (one row per estimand) or JSON (full nested report).

    Raises:
        ReportIOError: the destination cannot be written.
    """
    destination = Path(destination)
    try:
        with destination.open("w", encoding="utf-8", newline="") as handle:
            if ReportFormat(format) == ReportFormat.CSV:
                _write_csv(report, handle)
            else:
                handle.write(canonical_json(report))
    except OSError as e:
        raise ReportIOError(f"cannot write report to {destination}: {e}") from e
    logger.info("Wrote %s report to %s", ReportFormat(format).value, destination)


def read_report(source: str | Path) -> ExperimentReport:
    """Parse a JSON report written by write_report."""
    return ExperimentReport.model_validate_json(Path(source).read_text(encoding="utf-8"))


def format_summary_table(report: ExperimentReport) -> str:
    """Fixed-width estimand table for the console."""
    header = f"{'estimand':<18}{'estimate':>14}{'std_error':>12}{'theory':>14}{'z':>9}{'n':>8}"
    lines = [header, "-" * len(header)]

    def cell(value: float | None, width: int, spec: str) -> str:
        return f"{'-':>{width}}" if value is None else f"{value:>{width}{spec}}"

    for row in report.estimands:
        lines.append(
            f"{row.name:<18}"
            + cell(row.estimate, 14, ".6g")
            + cell(row.std_error, 12, ".3g")
            + cell(row.theory, 14, ".6g")
            + cell(row.z_score, 9, ".2f")
            + f"{row.n:>8}"
        )
    lines.append(
        f"c = {report.threshold:.6g}  g(c) = {report.theory_g:.6g}  h(c) = {report.theory_h:.6g}"
        f"  stopped {report.n_stopped}/{report.n_replicates}"
        f"  censored {100 * report.censor_rate:.2f}%  failed {report.n_failed}"
    )
    return "\n".join(lines)
