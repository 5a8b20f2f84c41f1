"""Binary grid container with a bit-exact round trip.

Layout (all integers little-endian):

    magic      5 bytes  b"WGRD1"
    endianness 1 byte   b"<" (little-endian payload; nothing else accepted)
    rank       u32
    dims       rank x u64
    axes       dims[i] float64 values per axis, in order
    payload    prod(dims) float64 values, row-major
    metadata   u64 byte length, then UTF-8 JSON object mapping str -> str

Axis and payload floats are written verbatim from the arrays' bytes, and the
metadata JSON is canonical (sorted keys, no added whitespace, non-ASCII kept
as-is), so read(write(g)) reproduces g bit for bit.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"WGRD1"
ENDIAN_FLAG = b"<"
MAX_RANK = 8


@dataclass(frozen=True, eq=False)
class GridFile:
    """Axes, a row-major payload over their product, and string metadata."""

    axes: tuple[np.ndarray, ...]
    payload: np.ndarray
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dims = tuple(int(a.size) for a in self.axes)
        if self.payload.shape != dims:
            raise FormatError(
                f"payload shape {self.payload.shape} does not match axis sizes {dims}"
            )
        for key, value in self.meta.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise FormatError("metadata must map str to str")


def _meta_bytes(meta: dict[str, str]) -> bytes:
    return json.dumps(meta, ensure_ascii=False, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def file_size(dims: tuple[int, ...], meta: dict[str, str]) -> int:
    """Exact on-disk size in bytes for the given shape and metadata."""
    total = len(MAGIC) + 1 + 4 + 8 * len(dims)
    total += 8 * sum(dims) + 8 * int(np.prod(dims, dtype=np.int64))
    total += 8 + len(_meta_bytes(meta))
    return total


def write_grid(path: str | Path, grid: GridFile) -> None:
    dims = tuple(int(a.size) for a in grid.axes)
    blob = bytearray()
    blob += MAGIC
    blob += ENDIAN_FLAG
    blob += struct.pack("<I", len(dims))
    for d in dims:
        blob += struct.pack("<Q", d)
    for axis in grid.axes:
        blob += np.ascontiguousarray(axis, dtype="<f8").tobytes()
    blob += np.ascontiguousarray(grid.payload, dtype="<f8").tobytes()
    meta = _meta_bytes(grid.meta)
    blob += struct.pack("<Q", len(meta))
    blob += meta
    Path(path).write_bytes(bytes(blob))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated file while reading {what}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk


def read_grid(path: str | Path) -> GridFile:
    reader = _Reader(Path(path).read_bytes())
    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise FormatError(f"bad magic; not a {MAGIC.decode()} grid file")
    if reader.take(1, "endianness flag") != ENDIAN_FLAG:
        raise FormatError("unsupported endianness flag")
    rank = struct.unpack("<I", reader.take(4, "rank"))[0]
    if not 1 <= rank <= MAX_RANK:
        raise FormatError(f"rank {rank} out of range 1..{MAX_RANK}")
    dims = tuple(
        struct.unpack("<Q", reader.take(8, f"dims[{i}]"))[0] for i in range(rank)
    )
    axes = tuple(
        np.frombuffer(reader.take(8 * d, f"axis {i}"), dtype="<f8").copy()
        for i, d in enumerate(dims)
    )
    count = int(np.prod(dims, dtype=np.int64))
    payload = np.frombuffer(reader.take(8 * count, "payload"), dtype="<f8").copy()
    payload = payload.reshape(dims)
    meta_len = struct.unpack("<Q", reader.take(8, "metadata length"))[0]
    meta_raw = reader.take(meta_len, "metadata")
    if reader.pos != len(reader.data):
        raise FormatError(f"{len(reader.data) - reader.pos} trailing bytes after metadata")
    try:
        meta = json.loads(meta_raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"metadata is not UTF-8 JSON: {exc}") from exc
    if not isinstance(meta, dict) or any(
        not isinstance(k, str) or not isinstance(v, str) for k, v in meta.items()
    ):
        raise FormatError("metadata must be a JSON object mapping str to str")
    return GridFile(axes=axes, payload=payload, meta=meta)
