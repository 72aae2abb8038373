"""
Result files: CSV tables, JSON reports and the run manifest.

Every file is written through a temp file and renamed into place, and the
manifest is written before any result so a directory never holds results
without the config and seed that produced them.
"""

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from decoupling_lab import config
from decoupling_lab.utils.file_utils import atomic_write_text, create_directories, get_file_size_mb


def format_float(value: float) -> str:
    """17 significant digits; non-finite values as 'inf', '-inf', 'nan'."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{config.FLOAT_DIGITS}g}"


def jsonable(value: Any) -> Any:
    """Convert numpy values and non-finite floats into strict JSON values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_float(value)
    if isinstance(value, Path):
        return str(value)
    return value


@dataclass
class RunManifest:
    command: str
    config_path: Optional[str]
    seed: int
    out_dir: str
    version: str
    threads: int
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec='seconds'))
    files: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ResultWriter:
    """Writes one run's files into ``out_dir``."""

    def __init__(self, out_dir: Union[str, Path], logger: logging.Logger):
        self.logger = logger
        self.out_dir = create_directories(out_dir)
        self.manifest: Optional[RunManifest] = None
        self.logger.info(f"Result writer initialized for {self.out_dir}")

    def write_manifest(self, manifest: RunManifest) -> Path:
        self.manifest = manifest
        return self._write(config.MANIFEST_FILE, json.dumps(jsonable(manifest.to_dict()), indent=2) + "\n")

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: self._cell(row[key]) for key in columns})
        return self._record(name, buffer.getvalue())

    def write_json(self, name: str, payload: Any) -> Path:
        return self._record(name, json.dumps(jsonable(payload), indent=2, allow_nan=False) + "\n")

    @staticmethod
    def _cell(value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return format_float(value)
        return str(value)

    def _record(self, name: str, text: str) -> Path:
        if self.manifest is None:
            raise RuntimeError("Manifest must be written before results")
        path = self._write(name, text)
        self.manifest.files.append(name)
        # Rewrite so the manifest lists every file that exists
        self._write(config.MANIFEST_FILE, json.dumps(jsonable(self.manifest.to_dict()), indent=2) + "\n")
        return path

    def _write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        atomic_write_text(path, text)
        self.logger.debug(f"Wrote {path} ({get_file_size_mb(path):.3f} MB)")
        return path
