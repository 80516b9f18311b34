"""Deterministic JSON/CSV output, run configurations and the decomposition cache."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .pswf import FORMAT_VERSION, ProlateProblem, SpectralDecomposition, solve_eigensystem

__all__ = [
    "REPORT_VERSION",
    "RunConfig",
    "to_plain",
    "dumps",
    "write_json",
    "write_csv",
    "cache_dir",
    "cache_key",
    "cached_decomposition",
]

REPORT_VERSION = 1
CACHE_ENV = "PROLATE_CACHE_DIR"


def to_plain(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.generic):
        return to_plain(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def dumps(obj):
    """Canonical JSON text: sorted keys, fixed indent, trailing newline."""
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else to_plain(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    """CSV with a header row; floats as shortest round-trip decimal strings."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


@dataclass
class RunConfig:
    """Everything needed to rerun a command; round-trips through JSON."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    version: int = REPORT_VERSION

    def to_json(self):
        return dumps({"format": "prolate.runconfig", "command": self.command, "params": self.params,
                      "seed": self.seed, "version": self.version})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("format") != "prolate.runconfig":
            raise DomainError("not a run configuration")
        return cls(doc["command"], doc.get("params", {}), int(doc.get("seed", 0)), int(doc.get("version", REPORT_VERSION)))

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())


def cache_dir():
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else Path.home() / ".cache" / "prolate"


def cache_key(kind, N, c=0.0, alpha=0.0, beta=0.0, gamma=None, d=None, n_max=None):
    parts = [kind, f"c={float(c)!r}", f"a={float(alpha)!r}", f"b={float(beta)!r}", f"N={int(N)}"]
    if n_max is not None:
        parts.append(f"n={int(n_max)}")
    if gamma is not None:
        parts.append(f"g={float(gamma)!r}")
    if d is not None:
        parts.append(f"d={int(d)}")
    parts.append(f"v={FORMAT_VERSION}")
    return "_".join(parts).replace("/", "-")


def cached_decomposition(c, n_max, use_cache=True):
    """PSWF decomposition from the cache directory, computing and storing it when absent.

    Returns (decomposition, path or None, hit).
    """
    problem = ProlateProblem.for_n_max(float(c), int(n_max))
    path = cache_dir() / (cache_key("pswf", problem.truncation_N, c, n_max=n_max) + ".json")
    if use_cache and path.exists():
        return SpectralDecomposition.from_dict(json.loads(path.read_text())), path, True
    dec = solve_eigensystem(problem, int(n_max))
    if use_cache:
        try:
            write_json(path, dec.to_dict())
        except OSError:
            path = None
    return dec, (path if use_cache else None), False
