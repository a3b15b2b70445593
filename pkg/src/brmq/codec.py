"""Component layout shared by every stored structure, plus binary (de)serialization.

Each structure exposes its stored state as a tree of named parts.  Leaves are
``Field`` (fixed-width integer array) or ``Raw`` (a plain bit string); inner
nodes are nested structures or plain dicts grouping parts.  The same tree
drives serialization and space accounting, so the bits reported by the space
meter are exactly the payload bits written to disk.
"""
from __future__ import annotations

import io
import json
import struct
from typing import ClassVar, Union

import numpy as np

from .core import RmqError

MAGIC = b"BRMQ"

_REGISTRY: dict[int, type["Encoded"]] = {}


class CodecError(RmqError):
    pass


class Field:
    """Fixed-width unsigned integer array; occupies ``len(values) * width`` bits."""

    __slots__ = ("values", "width")

    def __init__(self, values, width: int):
        self.values = values
        self.width = int(width)

    @property
    def bits(self) -> int:
        return len(self.values) * self.width


class Raw:
    """A bit string of ``nbits`` bits held as little-endian 64-bit words."""

    __slots__ = ("words", "nbits")

    def __init__(self, words, nbits: int):
        self.words = words
        self.nbits = int(nbits)

    @property
    def bits(self) -> int:
        return self.nbits


Part = Union[Field, Raw, "Encoded", dict]


class Encoded:
    """Mixin for structures that serialize and report space.

    Subclasses set ``TAG`` and implement ``_header``, ``_parts`` and ``_restore``.
    """

    TAG: ClassVar[int] = 0
    NAME: ClassVar[str] = ""

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if cls.TAG:
            if cls.TAG in _REGISTRY and _REGISTRY[cls.TAG] is not cls:
                raise TypeError(f"duplicate structure tag {cls.TAG}")
            _REGISTRY[cls.TAG] = cls

    def _header(self) -> dict:
        return {}

    def _parts(self) -> dict[str, Part]:
        raise NotImplementedError

    @classmethod
    def _restore(cls, header: dict, parts: dict):
        raise NotImplementedError

    def context(self) -> dict:
        """Descriptive parameters echoed into space reports."""
        return self._header()

    def size_bits(self) -> int:
        return _part_bits(self)

    def to_bytes(self) -> bytes:
        return serialize(self)[0]


def _part_bits(part) -> int:
    if isinstance(part, (Field, Raw)):
        return part.bits
    if isinstance(part, Encoded):
        part = part._parts()
    return sum(_part_bits(p) for p in part.values())


# ---------------------------------------------------------------------------
# bit packing helpers


_CHUNK = 1 << 18  # values per packing round; a multiple of 8 keeps chunks byte-aligned


def pack_fixed(values, width: int) -> bytes:
    if width == 0 or len(values) == 0:
        return b""
    if width > 64:
        acc = 0
        for k, v in enumerate(values):
            acc |= int(v) << (k * width)
        return acc.to_bytes((len(values) * width + 7) // 8, "little")
    arr = np.asarray(values, dtype=np.uint64)
    out = []
    for lo in range(0, len(arr), _CHUNK):
        part = arr[lo : lo + _CHUNK]
        bits = np.unpackbits(part.view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")[:, :width]
        out.append(np.packbits(bits.ravel(), bitorder="little").tobytes())
    return b"".join(out)


def unpack_fixed(data: bytes, count: int, width: int) -> list[int]:
    if count == 0:
        return []
    if width == 0:
        return [0] * count
    if width > 64:
        acc = int.from_bytes(data, "little")
        mask = (1 << width) - 1
        return [(acc >> (k * width)) & mask for k in range(count)]
    buf = np.frombuffer(data, dtype=np.uint8)
    out: list[int] = []
    step = _CHUNK * width // 8
    for lo in range(0, count, _CHUNK):
        k = min(_CHUNK, count - lo)
        chunk = buf[(lo // _CHUNK) * step : (lo // _CHUNK) * step + (k * width + 7) // 8]
        bits = np.unpackbits(chunk, bitorder="little")[: k * width].reshape(k, width)
        full = np.zeros((k, 64), dtype=np.uint8)
        full[:, :width] = bits
        out.extend(np.packbits(full, axis=1, bitorder="little").view(np.uint64).ravel().tolist())
    return out


def words_to_bytes(words, nbits: int) -> bytes:
    if nbits == 0:
        return b""
    raw = np.asarray(words, dtype=np.uint64).tobytes()
    return raw[: (nbits + 7) // 8]


def bytes_to_words(data: bytes, nbits: int) -> list[int]:
    nwords = (nbits + 63) // 64
    buf = data + b"\0" * (nwords * 8 - len(data))
    return np.frombuffer(buf, dtype=np.uint64).tolist()


# ---------------------------------------------------------------------------
# serialization


def _w_u64(out: io.BytesIO, x: int) -> None:
    out.write(struct.pack("<Q", x))


def _w_str(out: io.BytesIO, s: str) -> None:
    b = s.encode()
    _w_u64(out, len(b))
    out.write(b)


def _write_obj(out: io.BytesIO, obj: Encoded, tally: list[int]) -> None:
    out.write(bytes([obj.TAG]))
    _w_str(out, json.dumps(obj._header(), sort_keys=True))
    _write_group(out, obj._parts(), tally)


def _write_group(out: io.BytesIO, parts: dict, tally: list[int]) -> None:
    _w_u64(out, len(parts))
    for name, part in parts.items():
        _w_str(out, name)
        if isinstance(part, Field):
            out.write(b"F")
            _w_u64(out, len(part.values))
            _w_u64(out, part.width)
            payload = pack_fixed(part.values, part.width)
            _w_u64(out, len(payload))
            out.write(payload)
            tally[0] += part.bits
        elif isinstance(part, Raw):
            out.write(b"R")
            _w_u64(out, part.nbits)
            payload = words_to_bytes(part.words, part.nbits)
            _w_u64(out, len(payload))
            out.write(payload)
            tally[0] += part.nbits
        elif isinstance(part, Encoded):
            out.write(b"E")
            _write_obj(out, part, tally)
        elif isinstance(part, dict):
            out.write(b"G")
            _write_group(out, part, tally)
        else:
            raise CodecError(f"cannot serialize part {name!r} of type {type(part).__name__}")


def serialize(obj: Encoded) -> tuple[bytes, int]:
    """Return the encoded bytes and the number of payload bits they carry."""
    out = io.BytesIO()
    out.write(MAGIC)
    tally = [0]
    _write_obj(out, obj, tally)
    return out.getvalue(), tally[0]


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise CodecError("truncated encoding")
        b = bytes(self.data[self.pos : self.pos + k])
        self.pos += k
        return b

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        return self.take(self.u64()).decode()


def _read_obj(rd: _Reader) -> Encoded:
    tag = rd.take(1)[0]
    cls = _REGISTRY.get(tag)
    if cls is None:
        raise CodecError(f"unknown structure tag {tag}")
    header = json.loads(rd.string())
    parts = _read_group(rd)
    return cls._restore(header, parts)


def _read_group(rd: _Reader) -> dict:
    parts = {}
    for _ in range(rd.u64()):
        name = rd.string()
        kind = rd.take(1)
        if kind == b"F":
            count, width = rd.u64(), rd.u64()
            parts[name] = Field(unpack_fixed(rd.take(rd.u64()), count, width), width)
        elif kind == b"R":
            nbits = rd.u64()
            parts[name] = Raw(bytes_to_words(rd.take(rd.u64()), nbits), nbits)
        elif kind == b"E":
            parts[name] = _read_obj(rd)
        elif kind == b"G":
            parts[name] = _read_group(rd)
        else:
            raise CodecError(f"bad part kind {kind!r}")
    return parts


def deserialize(data: bytes) -> Encoded:
    if data[:4] != MAGIC:
        raise CodecError("not an encoding file (bad magic)")
    rd = _Reader(data[4:])
    obj = _read_obj(rd)
    if rd.pos != len(rd.data):
        raise CodecError("trailing bytes after encoding")
    return obj


def registry() -> dict[int, type[Encoded]]:
    return dict(_REGISTRY)
