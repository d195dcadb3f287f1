"""PTAG binary time-tag files and k-way merging of sorted tag streams.

Layout (little-endian, no padding)::

    offset  size  field
    0       4     magic "PTAG"
    4       1     version = 1
    5       3     reserved, zero
    8       4     resolution_ps (uint32)
    12      1     channel_count (uint8)
    13      1     reserved, zero
    14      9*N   records: t (uint64 ps), channel (uint8)

Records are nondecreasing in t, equal times ordered by ascending channel.
A tag stream in memory is an iterable of TAG_DTYPE arrays ("chunks").
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .detection import TAG_DTYPE
from .errors import DataError, CorruptionError, FormatError, PreconditionError

MAGIC = b"PTAG"
VERSION = 1
HEADER = struct.Struct("<4sB3xIBx")
HEADER_SIZE = HEADER.size  # 14
RECORD_SIZE = TAG_DTYPE.itemsize  # 9
CHUNK_RECORDS = 1 << 20


@dataclass(frozen=True)
class TagFileHeader:
    resolution_ps: int = 50
    channel_count: int = 3
    version: int = VERSION

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, self.resolution_ps, self.channel_count)


def make_tags(t, channel):
    t = np.atleast_1d(np.asarray(t))
    out = np.empty(t.size, dtype=TAG_DTYPE)
    out["t"] = t
    out["channel"] = channel
    return out


def first_disorder(tags, prev=None):
    """Index of the first record breaking (t, channel) order, or -1.

    ``prev`` is the ``(t, channel)`` of the record preceding ``tags``.
    """
    t = tags["t"]
    ch = tags["channel"]
    if prev is not None and t.size:
        pt, pc = prev
        if t[0] < pt or (t[0] == pt and ch[0] < pc):
            return 0
    if t.size < 2:
        return -1
    bad = (t[1:] < t[:-1]) | ((t[1:] == t[:-1]) & (ch[1:] < ch[:-1]))
    idx = np.flatnonzero(bad)
    return int(idx[0]) + 1 if idx.size else -1


class OrderChecker:
    """Running sortedness check across consecutive chunks of one stream."""

    def __init__(self, what="tag stream"):
        self.prev = None
        self.offset = 0
        self.what = what

    def __call__(self, chunk):
        i = first_disorder(chunk, self.prev)
        if i >= 0:
            raise DataError(f"{self.what} not sorted by (t, channel)", offset=self.offset + i)
        if chunk.size:
            self.prev = (chunk["t"][-1], chunk["channel"][-1])
        self.offset += chunk.size
        return chunk


def iter_chunks(source, chunk_records=CHUNK_RECORDS):
    """Normalise a tag source into an iterator of TAG_DTYPE chunks.

    Accepts a TAG_DTYPE array, a path to a PTAG file, or an iterable of arrays.
    """
    if isinstance(source, np.ndarray):
        if source.dtype != TAG_DTYPE:
            raise TypeError(f"expected TAG_DTYPE array, got {source.dtype}")
        for i in range(0, max(source.size, 1), chunk_records):
            yield source[i:i + chunk_records]
        return
    if isinstance(source, (str, os.PathLike)):
        _, chunks = read_tags(source, chunk_records)
        yield from chunks
        return
    yield from source


def write_tags(path, header: TagFileHeader, tags) -> int:
    """Write header and records; ``tags`` may be an array or a chunk iterable."""
    check = OrderChecker()
    n = 0
    tmp = f"{os.fspath(path)}.partial"
    try:
        with open(tmp, "wb") as f:
            f.write(header.pack())
            for chunk in iter_chunks(tags):
                chunk = np.ascontiguousarray(chunk, dtype=TAG_DTYPE)
                try:
                    check(chunk)
                except DataError as exc:
                    raise PreconditionError(str(exc)) from None
                chunk.tofile(f)
                n += chunk.size
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)
    return n


def read_header(f) -> TagFileHeader:
    raw = f.read(HEADER_SIZE)
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file shorter than the {HEADER_SIZE}-byte header")
    magic, version, resolution, channels = HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    return TagFileHeader(resolution, channels, version)


def read_tags(path, chunk_records=CHUNK_RECORDS):
    """Open a PTAG file; returns ``(header, chunk iterator)``.

    The header is validated immediately. Records are streamed in chunks of
    ``chunk_records``; ordering and truncation are checked as they are read.
    """
    with open(path, "rb") as f:
        header = read_header(f)

    def chunks():
        check = OrderChecker(f"{os.fspath(path)}")
        with open(path, "rb") as f:
            size = os.fstat(f.fileno()).st_size
            n_full, rest = divmod(size - HEADER_SIZE, RECORD_SIZE)
            f.seek(HEADER_SIZE)
            done = 0
            while done < n_full:
                k = min(chunk_records, n_full - done)
                chunk = np.fromfile(f, dtype=TAG_DTYPE, count=k)
                if chunk.size != k:
                    raise CorruptionError("file shrank while reading", offset=done + chunk.size)
                yield check(chunk)
                done += k
            if rest:
                raise CorruptionError(f"truncated record ({rest} trailing bytes)", offset=n_full)

    return header, chunks()


def read_all(path):
    header, chunks = read_tags(path)
    parts = list(chunks)
    return header, (np.concatenate(parts) if parts else np.empty(0, TAG_DTYPE))


def merge_channels(streams):
    """Merge sorted in-memory tag arrays into one array sorted by (t, channel)."""
    arrays = [np.asarray(s, dtype=TAG_DTYPE) for s in streams]
    for k, a in enumerate(arrays):
        i = first_disorder(a)
        if i >= 0:
            raise DataError(f"input stream {k} not sorted", offset=i)
    if not arrays:
        return np.empty(0, TAG_DTYPE)
    if len(arrays) == 1:
        return arrays[0].copy()
    allt = np.concatenate(arrays)
    order = np.lexsort((allt["channel"], allt["t"]))
    return allt[order]


def merge_streams(sources, chunk_records=CHUNK_RECORDS):
    """Lazily k-way merge chunked tag streams.

    Only records strictly earlier than the smallest buffered tail among the
    live inputs are emitted, so equal timestamps arriving later in another
    input still get ordered by channel.
    """
    iters = [iter_chunks(s, chunk_records) for s in sources]
    checks = [OrderChecker(f"input stream {k}") for k in range(len(iters))]
    bufs = [np.empty(0, TAG_DTYPE) for _ in iters]
    live = [True] * len(iters)

    def pull(k):
        while live[k]:
            try:
                chunk = next(iters[k])
            except StopIteration:
                live[k] = False
                return
            if chunk.size:
                bufs[k] = np.concatenate([bufs[k], checks[k](chunk)])
                return

    for k in range(len(iters)):
        pull(k)
    while any(live):
        tails = [bufs[k]["t"][-1] for k in range(len(iters)) if live[k] and bufs[k].size]
        if not tails:
            for k in range(len(iters)):
                if live[k] and not bufs[k].size:
                    pull(k)
            continue
        bound = min(tails)
        out = []
        for k in range(len(iters)):
            cut = int(np.searchsorted(bufs[k]["t"], bound, "left"))
            if cut:
                out.append(bufs[k][:cut])
                bufs[k] = bufs[k][cut:]
        if out:
            yield merge_channels(out) if len(out) > 1 else out[0]
        for k in range(len(iters)):
            if live[k] and (not bufs[k].size or bufs[k]["t"][-1] == bound):
                pull(k)
    rest = [b for b in bufs if b.size]
    if rest:
        yield merge_channels(rest)


def write_text(path, tags) -> int:
    """Debug export: one ``t_ps,channel`` line per tag."""
    n = 0
    with open(path, "w") as f:
        for chunk in iter_chunks(tags):
            for t, ch in zip(chunk["t"].tolist(), chunk["channel"].tolist()):
                f.write(f"{t},{ch}\n")
            n += chunk.size
    return n


def read_text(path):
    data = np.loadtxt(path, delimiter=",", dtype=np.uint64, ndmin=2)
    out = np.empty(len(data), TAG_DTYPE)
    if len(data):
        out["t"] = data[:, 0]
        out["channel"] = data[:, 1]
    return out
