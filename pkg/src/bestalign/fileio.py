"""On-disk formats: binary/CSV embedding files and JSON result documents.

Binary embedding layout (all little-endian)::

    0   4  b"MALN"
    4   2  uint16 version (1)
    6   4  uint32 n_frames
    10  4  uint32 dim
    14  .. n_frames * dim float32, frame-major
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ValidationError
from .seqcore import EmbeddingSequence

__all__ = [
    "MAGIC",
    "VERSION",
    "ParseError",
    "encode_embeddings",
    "decode_embeddings",
    "parse_csv",
    "read_embeddings",
    "write_embeddings",
    "atomic_write",
    "dump_document",
    "load_document",
    "write_document",
    "SCHEMA_VERSION",
]

MAGIC = b"MALN"
VERSION = 1
SCHEMA_VERSION = 1
_HEADER = struct.Struct("<4sHII")

PathLike = Union[str, os.PathLike]


class ParseError(ValidationError):
    """Malformed embedding file."""


def encode_embeddings(frames) -> bytes:
    arr = np.asarray(frames.frames if isinstance(frames, EmbeddingSequence) else frames)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"cannot encode array of shape {arr.shape}")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    return _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1]) + payload.tobytes()


def decode_embeddings(data: bytes) -> EmbeddingSequence:
    if len(data) < _HEADER.size:
        raise ParseError(f"truncated header: file ends at offset {len(data)}, header needs {_HEADER.size} bytes")
    magic, version, n, dim = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r} at offset 0")
    if version != VERSION:
        raise ParseError(f"unsupported version {version} at offset 4")
    if n < 1:
        raise ParseError("n_frames must be at least 1 (offset 6)")
    if dim < 1:
        raise ParseError("dim must be at least 1 (offset 10)")
    expected = _HEADER.size + 4 * n * dim
    if len(data) < expected:
        raise ParseError(
            f"truncated payload: expected {expected} bytes, data ends at offset {len(data)} "
            f"(inside frame {(len(data) - _HEADER.size) // (4 * dim)})"
        )
    if len(data) > expected:
        raise ParseError(f"{len(data) - expected} trailing bytes after offset {expected}")
    arr = np.frombuffer(data, dtype="<f4", count=n * dim, offset=_HEADER.size).reshape(n, dim)
    return EmbeddingSequence(arr.astype(np.float64))


def parse_csv(text: str) -> EmbeddingSequence:
    """One frame per line, comma-separated decimals. Values are rounded to float32 then widened."""
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"line {lineno}: expected {width} columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError("CSV file contains no frames")
    arr = np.asarray(rows, dtype=np.float64).astype(np.float32).astype(np.float64)
    return EmbeddingSequence(arr)


def read_embeddings(path: PathLike) -> EmbeddingSequence:
    """Load a binary or CSV embedding file, detected by the magic bytes."""
    data = Path(path).read_bytes()
    if data[:4] == MAGIC:
        return decode_embeddings(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path}: neither a MALN binary file nor UTF-8 CSV") from None
    return parse_csv(text)


def atomic_write(path: PathLike, data: Union[bytes, str]):
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_embeddings(path: PathLike, frames):
    atomic_write(path, encode_embeddings(frames))


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_document(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ValidationError("not a result document: missing schema_version")
    return doc


def write_document(path, doc: dict):
    text = dump_document(doc)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        atomic_write(path, text)
