import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


def _columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def _cell(value: Any) -> Any:
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value)
    return value


def format_rows(rows: Sequence[Dict[str, Any]], fmt: str = "json") -> str:
    """JSON lines, or CSV with a header built from every key seen"""
    if fmt == "json":
        return "\n".join(json.dumps(row) for row in rows)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=_columns(rows), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
        return buffer.getvalue().rstrip("\n")
    raise ValueError(f"Unknown output format: {fmt}")


def emit(rows: Sequence[Dict[str, Any]], fmt: str = "json", output: Optional[str] = None):
    """Print rows to stdout, or write them to output"""
    text = format_rows(rows, fmt) if rows else ""
    if output is None:
        if text:
            print(text)
        else:
            logger.info("Nothing to emit")
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n" if text else "")
    logger.info(f"Wrote {len(rows)} row(s) to {path}")


def save_report(summary: Dict[str, Any], breakdown: List[Dict[str, Any]], base_path: str) -> Tuple[Path, Path]:
    """Write <base>.json (summary) and <base>.csv (breakdown rows)"""
    base = Path(base_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = base.with_suffix(".json"), base.with_suffix(".csv")
    with open(json_path, "w") as f:
        json.dump(summary, f, indent=2)
    with open(csv_path, "w") as f:
        f.write(format_rows(breakdown, "csv") + "\n" if breakdown else "")
    print(f"Results saved to {json_path} and {csv_path}")
    return json_path, csv_path


def print_report_summary(summary: Dict[str, Any]):
    """Print an experiment summary"""
    print(f"\n{'='*60}")
    print(f"EXPERIMENT SUMMARY: {summary['kind']}")
    print(f"{'='*60}")
    print(f"LHS: {summary['lhs']:.6g}")
    print(f"Scale ({summary['scale_formula']}): {summary['main_scale']:.6g}")
    print(f"Normalized: {summary['normalized']:.6g}")
    print(f"L = log Y: {summary['L']:.4f}, normalized * L^{summary['A_display']:g}: {summary['normalized_LA']:.6g}")

    if summary.get("warnings"):
        print(f"\nWarnings ({len(summary['warnings'])}):")
        for warning in summary["warnings"]:
            print(f"  - {warning}")
