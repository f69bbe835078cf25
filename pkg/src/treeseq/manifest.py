"""Run manifests: enough provenance to rerun a CLI command byte-for-byte."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from pathlib import Path

FORMAT_VERSION = 1


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclasses.dataclass
class RunManifest:
    """Provenance record emitted once per CLI run.

    Two runs with equal ``command``, ``argv``, ``seed``, ``config`` and
    ``inputs`` produce identical outputs; ``started`` and ``duration_s``
    are informational and excluded from that contract.
    """

    command: str
    argv: list[str]
    seed: int | None
    config: dict
    inputs: dict[str, str] = dataclasses.field(default_factory=dict)
    outputs: list[str] = dataclasses.field(default_factory=list)
    started: str = ""
    duration_s: float = 0.0

    def __post_init__(self) -> None:
        if not self.started:
            self.started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        self._t0 = time.perf_counter()

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_sha256(path)

    def add_output(self, path: str | Path) -> None:
        p = str(path)
        if p not in self.outputs:
            self.outputs.append(p)

    def write(self, dest: str | Path | None = None) -> Path:
        """Finish timing and write the manifest next to the primary output.

        With no explicit ``dest`` the manifest lands at
        ``<first output>.manifest.json``.
        """
        self.duration_s = round(time.perf_counter() - self._t0, 3)
        if dest is None:
            if not self.outputs:
                raise ValueError("manifest has no outputs and no explicit destination")
            dest = self.outputs[0] + ".manifest.json"
        doc = {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started": self.started,
            "duration_s": self.duration_s,
        }
        dest = Path(dest)
        dest.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return dest
