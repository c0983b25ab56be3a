"""Run headers and CSV output shared by all experiments."""

from __future__ import annotations

import csv
import io
import json
import subprocess
from functools import lru_cache
from importlib import metadata
from pathlib import Path
from typing import Iterable, Sequence

TOOL = "silentqec"


@lru_cache(maxsize=1)
def version_string() -> str:
    """Package version with the short commit hash when run from a checkout."""
    try:
        base = metadata.version(TOOL)
    except metadata.PackageNotFoundError:
        base = "0.0.0"
    try:
        here = Path(__file__).resolve().parent
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=here, capture_output=True, text=True, timeout=5, check=True,
        ).stdout.strip()
        if rev:
            return f"{base}+g{rev}"
    except (OSError, subprocess.SubprocessError):
        pass
    return base


def fmt(v) -> str:
    """Stable text form: repr for floats so values round-trip exactly."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[dict]) -> Path:
    path.write_text(csv_text(columns, rows))
    return path


def header(config: dict, seed: int) -> dict:
    return {"tool": TOOL, "version": version_string(), "seed": int(seed), "config": config}


def write_json(path: Path, obj: dict) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
