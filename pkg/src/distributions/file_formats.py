"""
Distribution File Formats

Two on-disk formats:

- JSON sparse:  {"n": int, "entries": [{"x": "0x1f", "p": 0.25}, ...]}
- binary dense: b"PEDL", version byte 0x01, uint32 little-endian n, then
                2^n little-endian IEEE-754 doubles
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from src.errors import ValidationError

from .distribution import MAX_BITS, Distribution

MAGIC = b"PEDL"
VERSION = 0x01
_HEADER = struct.Struct("<4sBI")


def dump_json(d: Distribution, output_path: Optional[Path] = None) -> str:
    """Serialize the support of d as sparse JSON. Optionally writes to file."""
    points, probs = d.support()
    document = {
        "n": d.n,
        "entries": [{"x": f"{int(x):#x}", "p": float(p)} for x, p in zip(points, probs)],
    }
    content = json.dumps(document, indent=2) + "\n"
    if output_path:
        Path(output_path).write_text(content, encoding="utf-8")
    return content


def load_json(source: str | Path) -> Distribution:
    """Parse sparse JSON from a path or a JSON string."""
    text = Path(source).read_text(encoding="utf-8") if _is_path(source) else str(source)
    try:
        document = json.loads(text)
        n = int(document["n"])
        entries = document["entries"]
        mapping: dict[int, float] = {}
        for entry in entries:
            x = int(entry["x"], 16)
            if x in mapping:
                raise ValidationError(f"Duplicate point {x:#x} in distribution file")
            mapping[x] = float(entry["p"])
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Malformed distribution JSON: {e}") from e
    return Distribution.from_mapping(n, mapping)


def dump_binary(d: Distribution, output_path: Optional[Path] = None) -> bytes:
    """Serialize d in the dense binary format. Optionally writes to file."""
    payload = _HEADER.pack(MAGIC, VERSION, d.n) + d.to_dense().probs.astype("<f8").tobytes()
    if output_path:
        Path(output_path).write_bytes(payload)
    return payload


def load_binary(source: bytes | str | Path) -> Distribution:
    """Parse the dense binary format from raw bytes or a path."""
    payload = source if isinstance(source, bytes) else Path(source).read_bytes()
    if len(payload) < _HEADER.size:
        raise ValidationError("Binary distribution truncated before header end")
    magic, version, n = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise ValidationError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ValidationError(f"Unsupported binary version {version}")
    if not 1 <= n <= MAX_BITS:
        raise ValidationError(f"Binary distribution declares unsupported n={n}")
    expected = _HEADER.size + 8 * (1 << n)
    if len(payload) != expected:
        raise ValidationError(f"Binary distribution has {len(payload)} bytes, expected {expected}")
    probs = np.frombuffer(payload, dtype="<f8", offset=_HEADER.size)
    return Distribution.dense(n, probs.astype(np.float64))


def load_distribution(path: str | Path) -> Distribution:
    """Load either format, chosen by file suffix (.json or anything else = binary)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return load_json(path)
    return load_binary(path)


def _is_path(source: str | Path) -> bool:
    if isinstance(source, Path):
        return True
    return not source.lstrip().startswith("{")
