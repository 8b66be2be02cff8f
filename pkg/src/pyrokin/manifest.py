"""Reproducibility record written next to every output bundle."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path


@dataclass(frozen=True)
class RunManifest:
    command: str
    inputs: tuple[str, ...]
    config_digest: str
    seed: int | None
    version: str
    timestamp: str


def config_digest(config: dict) -> str:
    """Deterministic digest of an effective configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_manifest(command: str, inputs, config: dict, seed, version: str) -> RunManifest:
    return RunManifest(
        command=command,
        inputs=tuple(str(p) for p in inputs),
        config_digest=config_digest(config),
        seed=seed,
        version=version,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def write_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    path = Path(out_dir) / "manifest.json"
    doc = asdict(manifest)
    doc["inputs"] = list(doc["inputs"])
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
