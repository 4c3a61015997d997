"""Run manifests: one appended JSON line per CLI invocation."""
from __future__ import annotations

import json
import time
from pathlib import Path

MANIFEST_FILE = "run_manifests.jsonl"


def write_manifest(
    out_dir: str | Path,
    command: str,
    config: dict,
    registry_version: str,
    seed: int | None,
    inputs: list[str],
    outputs: list[str],
    metrics: dict | None = None,
    wall_clock_s: float | None = None,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_FILE
    record = {
        "ts": int(time.time()),
        "command": command,
        "config": config,
        "registry_version": registry_version,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "metrics": metrics or {},
        "wall_clock_s": wall_clock_s,
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, ensure_ascii=False))
        fh.write("\n")
    return path
