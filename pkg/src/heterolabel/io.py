"""File formats: binary matrices, encoding tables, manifests.

Matrix file layout (little-endian)::

    b"ALNF" | version u8 = 1 | rows u32 | cols u32 | rows*cols float32, row-major
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (BadMagic, BadVersion, DimMismatch, DuplicateSymbol,
                     ManifestError, MissingSymbol, NonFiniteValue,
                     TruncatedPayload)

MAGIC = b"ALNF"
VERSION = 1
_HEADER = struct.Struct("<4sBII")


def matrix_to_bytes(matrix) -> bytes:
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype="<f4")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("matrix contains non-finite values")
    rows, cols = arr.shape
    return _HEADER.pack(MAGIC, VERSION, rows, cols) + arr.tobytes()


def matrix_from_bytes(data: bytes, source="<bytes>") -> np.ndarray:
    if len(data) < _HEADER.size:
        if data[:4] != MAGIC[:len(data[:4])]:
            raise BadMagic(f"{source}: bad magic {data[:4]!r}")
        raise TruncatedPayload(f"{source}: truncated header ({len(data)} bytes)")
    magic, version, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"{source}: bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"{source}: unsupported version {version}")
    expected = rows * cols * 4
    payload = data[_HEADER.size:]
    if len(payload) != expected:
        raise TruncatedPayload(
            f"{source}: header declares {rows}x{cols} ({expected} bytes), "
            f"payload has {len(payload)} bytes")
    arr = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{source}: non-finite value in payload")
    return arr.astype(np.float32)


def write_matrix(path, matrix) -> None:
    Path(path).write_bytes(matrix_to_bytes(matrix))


def read_matrix(path) -> np.ndarray:
    """Read a matrix file as a float32 array (rows, cols)."""
    return matrix_from_bytes(Path(path).read_bytes(), source=str(path))


# --- encoding tables ------------------------------------------------------


@dataclass(frozen=True)
class EncodingTable:
    dim: int
    vectors: Mapping[str, np.ndarray]

    def __contains__(self, symbol):
        return symbol in self.vectors

    def __len__(self):
        return len(self.vectors)

    def encode(self, tokens) -> np.ndarray:
        out = np.empty((len(tokens), self.dim), dtype=np.float32)
        for i, tok in enumerate(tokens):
            try:
                out[i] = self.vectors[tok]
            except KeyError:
                raise MissingSymbol(tok) from None
        return out

    def scaled(self, c: float) -> "EncodingTable":
        return EncodingTable(self.dim, {s: (v * c).astype(np.float32)
                                        for s, v in self.vectors.items()})


def parse_encoding_table(text: str) -> EncodingTable:
    """Parse ``dim <d>`` followed by ``<symbol> <f1> ... <fd>`` lines."""
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise DimMismatch("empty encoding table", 1)
    line_no, first = lines[0]
    head = first.split()
    if len(head) != 2 or head[0] != "dim" or not head[1].isdigit() or int(head[1]) < 1:
        raise DimMismatch("first line must be 'dim <d>'", line_no)
    dim = int(head[1])
    vectors: dict[str, np.ndarray] = {}
    for line_no, line in lines[1:]:
        parts = line.split()
        symbol, values = parts[0], parts[1:]
        if len(values) != dim:
            raise DimMismatch(f"expected {dim} values, got {len(values)}", line_no)
        if symbol in vectors:
            raise DuplicateSymbol(symbol, line_no)
        try:
            vec = np.array([float(v) for v in values], dtype=np.float32)
        except ValueError:
            raise DimMismatch(f"non-numeric value in row for {symbol!r}", line_no) from None
        if not np.all(np.isfinite(vec)):
            raise NonFiniteValue(f"line {line_no}: non-finite value")
        vectors[symbol] = vec
    return EncodingTable(dim, vectors)


def format_encoding_table(table: EncodingTable) -> str:
    # shortest float32 repr round-trips through float() exactly
    out = [f"dim {table.dim}"]
    for symbol in sorted(table.vectors):
        vals = " ".join(np.format_float_scientific(np.float32(v), unique=True, trim="-")
                        for v in table.vectors[symbol])
        out.append(f"{symbol} {vals}")
    return "\n".join(out) + "\n"


def load_encoding_table(path) -> EncodingTable:
    return parse_encoding_table(Path(path).read_text(encoding="utf-8"))


# --- manifests ------------------------------------------------------------


@dataclass(frozen=True)
class ManifestRecord:
    """One utterance: either a frame-encoding file or precomputed
    per-candidate distance matrices (candidate id -> path)."""

    id: str
    text: str
    frames: Path | None = None
    candidates: Mapping[str, Path] = field(default_factory=dict)

    @property
    def precomputed(self) -> bool:
        return self.frames is None

    def to_json(self, base: Path | None = None) -> str:
        def rel(p):
            p = Path(p)
            if base is not None:
                try:
                    return p.relative_to(base).as_posix()
                except ValueError:
                    pass
            return p.as_posix()

        obj = {"id": self.id, "text": self.text}
        if self.frames is not None:
            obj["frames"] = rel(self.frames)
        else:
            obj["candidates"] = {k: rel(v) for k, v in self.candidates.items()}
        return json.dumps(obj, ensure_ascii=False, sort_keys=False)


def parse_manifest(text: str, base: Path | None = None, path=None) -> list[ManifestRecord]:
    """Parse JSON-lines manifest text; relative paths resolve against ``base``."""
    where = path or "<manifest>"
    records, seen = [], set()

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() or base is None else base / p

    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{where}:{line_no}: invalid JSON ({e.msg})") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) \
                or not isinstance(obj.get("text"), str):
            raise ManifestError(f"{where}:{line_no}: record needs string 'id' and 'text'")
        has_frames, has_cands = "frames" in obj, "candidates" in obj
        if has_frames == has_cands:
            raise ManifestError(
                f"{where}:{line_no}: exactly one of 'frames' or 'candidates' required")
        if obj["id"] in seen:
            raise ManifestError(f"{where}:{line_no}: duplicate id {obj['id']!r}")
        seen.add(obj["id"])
        if has_frames:
            records.append(ManifestRecord(obj["id"], obj["text"], frames=resolve(obj["frames"])))
        else:
            cands = obj["candidates"]
            if not isinstance(cands, dict) or not cands:
                raise ManifestError(f"{where}:{line_no}: 'candidates' must be a non-empty object")
            records.append(ManifestRecord(
                obj["id"], obj["text"], candidates={k: resolve(v) for k, v in cands.items()}))
    return records


def read_manifest(path) -> list[ManifestRecord]:
    path = Path(path)
    return parse_manifest(path.read_text(encoding="utf-8"), base=path.parent, path=str(path))


def write_manifest(path, records) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(rec.to_json(base=path.parent) + "\n")

