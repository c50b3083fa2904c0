"""Run manifests: everything needed to reproduce a CLI run bit-exactly."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    tool_version: str
    verb: str
    command: list[str]
    config_text: str
    config_path: str | None
    seed: int | None
    n_trajectories: int | None
    options: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    started_at: str = ""
    finished_at: str = ""


def manifest_path(out_dir: str) -> str:
    return os.path.join(out_dir, MANIFEST_NAME)


def write_manifest(out_dir: str, manifest: RunManifest) -> str:
    path = manifest_path(out_dir)
    if os.path.exists(path):
        raise FileExistsError(f"{out_dir} already contains a manifest")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(asdict(manifest), f, indent=2)
        f.write("\n")
    return path


def load_manifest(path: str) -> RunManifest:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return RunManifest(**data)
