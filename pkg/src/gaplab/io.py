"""
Plain-text and CSV/JSON serialization.

Measures are stored one ``site mass`` pair per line and sequences one point
per line, with ``#`` comments. Floats use 17 significant digits so a
write/read round trip is exact.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .measures import DiscreteMeasure, RealSequence

FLOAT_FMT = "%.17g"


def _comment_block(comments) -> str:
    return "".join(f"# {c}\n" for c in (comments or []))


def format_measure(mu: DiscreteMeasure, comments=None) -> str:
    buf = io.StringIO()
    buf.write(_comment_block(comments))
    if mu.label:
        buf.write(f"# label: {mu.label}\n")
    for s, m in zip(mu.sites, mu.masses):
        buf.write(f"{FLOAT_FMT % s} {FLOAT_FMT % m}\n")
    return buf.getvalue()


def _data_lines(text: str):
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield ln, line


def parse_measure(text: str) -> DiscreteMeasure:
    sites, masses = [], []
    label = None
    for raw in text.splitlines():
        if raw.startswith("# label:"):
            label = raw[len("# label:"):].strip()
    for ln, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {ln}: expected 'site mass', got {line!r}")
        sites.append(float(parts[0]))
        masses.append(float(parts[1]))
    return DiscreteMeasure(np.array(sites), np.array(masses), label)


def format_sequence(seq: RealSequence, comments=None) -> str:
    return _comment_block(comments) + "".join(f"{FLOAT_FMT % p}\n" for p in seq.points)


def parse_sequence(text: str) -> RealSequence:
    pts = []
    for ln, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 1:
            raise ValueError(f"line {ln}: expected one number, got {line!r}")
        pts.append(float(parts[0]))
    return RealSequence(np.array(pts))


def read_measure(path) -> DiscreteMeasure:
    return parse_measure(Path(path).read_text())


def write_measure(path, mu: DiscreteMeasure, comments=None):
    Path(path).write_text(format_measure(mu, comments))


def read_sequence(path) -> RealSequence:
    return parse_sequence(Path(path).read_text())


def write_sequence(path, seq: RealSequence, comments=None):
    Path(path).write_text(format_sequence(seq, comments))


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


def format_csv(header, rows, comments=None) -> str:
    buf = io.StringIO()
    buf.write(_comment_block(comments))
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def format_json(obj) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, non-finite floats as strings."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def config_hash(config: dict) -> str:
    blob = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
