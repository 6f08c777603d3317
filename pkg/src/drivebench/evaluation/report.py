"""Report files for suite runs: JSON and CSV, deterministic bytes.

CSV schema (one line per episode):
    scenario,seed,collision,or_m,dr_m,rc,termination
Error rows keep the scenario and seed, leave the metric cells empty,
and set termination to "error". The JSON format carries the same rows
plus per-scenario and overall aggregates recomputed from the rows, so
merging reports is just concatenating rows and re-aggregating.
"""

import csv
import io
import json

from .suite import aggregate_rows

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = ("scenario", "seed", "collision", "or_m", "dr_m", "rc", "termination")


def _row_cells(row: dict) -> list:
    if "error" in row:
        return [row["scenario"], str(row["seed"]), "", "", "", "", "error"]
    return [
        row["scenario"],
        str(row["seed"]),
        str(row["collision"]),
        repr(float(row["or_m"])),
        repr(float(row["dr_m"])),
        repr(float(row["rc"])),
        row["termination"],
    ]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(_row_cells(row))
    return buf.getvalue()


def csv_to_rows(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for cells in reader:
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"malformed CSV row {cells!r}")
        if cells[6] == "error" and cells[2] == "":
            rows.append({"scenario": cells[0], "seed": int(cells[1]), "error": "error"})
            continue
        rows.append(
            {
                "scenario": cells[0],
                "seed": int(cells[1]),
                "collision": int(cells[2]),
                "or_m": float(cells[3]),
                "dr_m": float(cells[4]),
                "rc": float(cells[5]),
                "termination": cells[6],
            }
        )
    return rows


def report_payload(rows) -> dict:
    rows = list(rows)
    by_scenario = {}
    for row in rows:
        by_scenario.setdefault(row["scenario"], []).append(row)
    per_scenario = {}
    for scenario_id, group in sorted(by_scenario.items()):
        agg = aggregate_rows(group)
        if agg is not None:
            per_scenario[scenario_id] = agg.to_json()
    aggregate = aggregate_rows(rows)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "rows": rows,
        "per_scenario": per_scenario,
        "aggregate": None if aggregate is None else aggregate.to_json(),
    }


def write_report(rows, path, fmt: str = "json") -> None:
    """Write rows (and, for JSON, recomputed aggregates) to `path`.

    Output bytes depend only on the rows, so identical runs produce
    identical files.
    """
    if fmt == "json":
        text = json.dumps(report_payload(rows), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = rows_to_csv(rows)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


def read_report_rows(path) -> list:
    """Load the episode rows back from a JSON or CSV report file."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        if payload.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError("unsupported report schema version")
        return payload["rows"]
    return csv_to_rows(text)


def merge_reports(paths, out_path, fmt: str = "json") -> list:
    """Concatenate rows from several reports and rewrite aggregates."""
    rows = []
    for path in paths:
        rows.extend(read_report_rows(path))
    write_report(rows, out_path, fmt=fmt)
    return rows
