"""Header blocks and JSON/CSV emission shared by the CLI and the acceptance runner."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Sequence

from . import __version__


def _plain(value: Any) -> Any:
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()  # numpy scalars
    return value


def config_hash(config: dict) -> str:
    blob = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def header(command: str, seed: int | None, config: dict) -> dict:
    return {
        "tool": "specroute",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config_hash": config_hash(config),
        "config": _plain(config),
    }


def render_json(head: dict, payload: dict) -> str:
    return json.dumps({"header": head, **_plain(payload)}, indent=2) + "\n"


def render_csv(head: dict, columns: Sequence[str], rows: Sequence[Sequence | dict]) -> str:
    buf = io.StringIO()
    for key in ("tool", "version", "command", "seed", "config_hash"):
        buf.write(f"# {key}: {head[key]}\n")
    buf.write(f"# config: {json.dumps(head['config'], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row[c] for c in columns] if isinstance(row, dict) else list(row)
        writer.writerow([_fmt(v) for v in values])
    return buf.getvalue()


def _fmt(v: Any) -> Any:
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    return v


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        print(text, end="")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
