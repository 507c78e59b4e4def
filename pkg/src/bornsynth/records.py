"""CSV/JSON writers and the run manifest.

Floats are written with ``repr`` so identical runs give byte-identical files.
"""

import csv
import json
import platform
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in _plain(list(row))])
    return path


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


class Manifest:
    """Written when a run starts and finalized when it ends."""

    FILENAME = "manifest.json"

    def __init__(self, out_dir, command, config, seed, workers):
        self.path = Path(out_dir) / self.FILENAME
        self.data = {
            "command": command,
            "config": config,
            "seed": seed,
            "workers": workers,
            "version": __version__,
            "kernel_backend": kernels.BACKEND,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "seed_scheme": "splitmix64 fold over (master seed, stream tag, task indices)",
            "started": datetime.now(timezone.utc).isoformat(),
            "status": "running",
        }
        self._t0 = time.perf_counter()
        write_json(self.path, self.data)

    def finalize(self, status="ok", **extra):
        self.data.update(extra)
        self.data["status"] = status
        self.data["finished"] = datetime.now(timezone.utc).isoformat()
        self.data["duration_s"] = time.perf_counter() - self._t0
        write_json(self.path, self.data)
