"""Result persistence (CSV tables, JSON summaries) and experiment config files."""
from __future__ import annotations

import csv
import json
import math
import os
import zlib
from pathlib import Path

from .errors import ConfigurationError
from .trainer import RunResult, SweepCell

SCHEMA_VERSION = 1
OUT_ENV = "PLATEAUNET_OUT"

RECORD_COLUMNS = [
    "schema_version", "experiment_id", "scheme", "n", "L", "eta", "target", "seed",
    "reached", "epochs", "epochs_run", "initial_cost", "final_cost",
]
AGGREGATE_COLUMNS = [
    "schema_version", "scheme", "n", "L", "reps", "failures", "mean_epochs", "min_epochs", "max_epochs",
]

CONFIG_KEYS = {
    "scheme", "schemes", "qubits", "depth", "eta", "target", "max_epochs", "seed", "seed_base",
    "reps", "qubits_range", "depth_rule", "samples", "param_index", "dim", "seeds", "out",
    "input", "workers", "entangler", "trajectories",
}


def default_out_dir(command: str) -> Path:
    return Path(os.environ.get(OUT_ENV, "results")) / command


def fmt(value) -> str:
    """Cell text: floats with 17 significant digits, ``None`` as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.17g}"
    return str(value)


def write_csv(path, columns, rows) -> Path:
    """UTF-8, LF line endings, header first; ``rows`` are dicts keyed by column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])
    return path


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"schema_version": SCHEMA_VERSION, **obj}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def experiment_id(kind: str, params: dict) -> str:
    """Stable id derived from the experiment parameters."""
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return f"{kind}-{zlib.crc32(blob):08x}"


def run_record(result: RunResult, exp_id: str) -> dict:
    c = result.config
    return {
        "schema_version": SCHEMA_VERSION, "experiment_id": exp_id, "scheme": c.scheme,
        "n": c.n_qubits, "L": c.depth_L, "eta": float(c.eta), "target": float(c.target_cost),
        "seed": c.seed, "reached": result.reached, "epochs": result.epochs_to_target,
        "epochs_run": len(result.trajectory) - 1, "initial_cost": float(result.trajectory[0][1]),
        "final_cost": float(result.final_cost),
    }


def aggregate_row(cell: SweepCell) -> dict:
    return {
        "schema_version": SCHEMA_VERSION, "scheme": cell.scheme, "n": cell.n_qubits, "L": cell.depth_L,
        "reps": cell.reps, "failures": cell.failures, "mean_epochs": cell.mean_epochs,
        "min_epochs": cell.min_epochs, "max_epochs": cell.max_epochs,
    }


def write_trajectory(path, result: RunResult) -> Path:
    return write_csv(path, ["epoch", "cost"], ({"epoch": e, "cost": float(c)} for e, c in result.trajectory))


def load_config(path) -> dict:
    """Flat JSON key/value config; unknown keys are rejected."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    for k, v in data.items():
        if isinstance(v, (dict, list)) and k not in ("schemes",):
            raise ConfigurationError(f"config value for {k!r} must be a scalar")
    return data
