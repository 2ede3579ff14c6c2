# core/export.py
"""CSV and JSON writers for exact tables, simulation output and profiles.

Every CSV row carries a ``schema_version`` column and every JSON document a
``schema_version`` key; the run manifest is embedded in JSON documents and
written as ``manifest.json`` next to CSV files.
"""
import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from loguru import logger

from core.asymptotics import FluctuationProfile, Prediction
from core.exact import ExactTables
from core.schemas import SCHEMA_VERSION, RunManifest
from core.simulation import SimSummary

TABLE_COLUMNS = ("n", "mu", "var", "y_mean", "y_var", "z_mean")
CDF_COLUMNS = ("n", "ell", "cdf")
SAMPLE_COLUMNS = ("trial_index", "X", "Y", "Z")
PROFILE_COLUMNS = ("n", "phase", "residual")
# below the interpreter's 4300-digit int-to-str limit
MAX_EXACT_BITS = 14_000


def cell(value):
    """Exact fractions as "p/q", floats with full precision.

    Fractions with more than MAX_EXACT_BITS in numerator or denominator are
    written as their nearest float.
    """
    if isinstance(value, Fraction):
        bits = max(value.numerator.bit_length(), value.denominator.bit_length())
        if bits > MAX_EXACT_BITS:
            return repr(float(value))
        return str(value) if value.denominator != 1 else str(value.numerator)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _json_default(value):
    converted = cell(value)
    if converted is value:
        raise TypeError(f"Cannot serialize {type(value).__name__}")
    return converted


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"schema_version": SCHEMA_VERSION, **payload}
    path.write_text(json.dumps(body, indent=2, sort_keys=True, default=_json_default))
    logger.info(f"Wrote {path}")
    return path


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["schema_version", *columns])
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {"schema_version": SCHEMA_VERSION, **{c: cell(row[c]) for c in columns}}
            )
    logger.info(f"Wrote {path}")
    return path


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    payload = {"manifest": manifest.model_dump()}
    return write_json(Path(out_dir) / "manifest.json", payload)


def export_tables(
    tables: ExactTables, out_dir: Path, fmt: str, manifest: RunManifest
) -> List[Path]:
    """exact_tables.csv + exact_cdf.csv (csv) or exact_tables.json (json)."""
    out_dir = Path(out_dir)
    if fmt == "json":
        payload = {
            "manifest": manifest.model_dump(),
            "numeric_mode": tables.numeric_mode.value,
            "horizon": tables.horizon,
            "levels": tables.levels,
            "rows": tables.rows(),
            "moments": {
                str(n): tables.moments[n] for n in range(1, tables.horizon + 1)
            },
            "cdf": [row[1:] for row in tables.cdf],
        }
        return [write_json(out_dir / "exact_tables.json", payload)]

    return [
        write_csv(out_dir / "exact_tables.csv", TABLE_COLUMNS, tables.rows()),
        write_csv(out_dir / "exact_cdf.csv", CDF_COLUMNS, tables.cdf_rows()),
        write_manifest(out_dir, manifest),
    ]


def export_simulation(
    summary: SimSummary,
    out_dir: Path,
    manifest: RunManifest,
    exact_mean: Optional[Dict[str, float]] = None,
) -> List[Path]:
    """samples.csv (one record per trial) and summary.json."""
    out_dir = Path(out_dir)
    columns = [c for c in SAMPLE_COLUMNS if c == "trial_index" or c in summary.samples]
    payload = {"manifest": manifest.model_dump(), **summary.to_dict()}
    if exact_mean:
        payload["exact"] = exact_mean
    return [
        write_csv(out_dir / "samples.csv", columns, summary.sample_rows()),
        write_json(out_dir / "summary.json", payload),
    ]


def export_profile(profile: FluctuationProfile, path: Path) -> Path:
    return write_csv(path, PROFILE_COLUMNS, profile.rows())


def export_predictions(
    predictions: List[Prediction],
    path: Path,
    manifest: RunManifest,
    extra: Optional[dict] = None,
) -> Path:
    payload = {
        "manifest": manifest.model_dump(),
        "predictions": [p.to_dict() for p in predictions],
        **(extra or {}),
    }
    return write_json(path, payload)
