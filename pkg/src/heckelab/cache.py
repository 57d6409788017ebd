"""On-disk cache of enumerated submodule lists.

File layout (all integers big-endian)::

    magic      4 bytes   b"HKLC"
    version    u16       FORMAT_VERSION
    keylen     u32       length of the key JSON
    key        keylen    UTF-8 JSON {"g", "p", "hecke", "model"}
    count      u32       number of records
    records    count x   u16 length, then payload:
                           u8 p, u8 e, u8 n, u8 rows, rows*n u8 entries

Files are named by the SHA-256 of the key JSON.  A file whose header, key or
record count does not match is ignored and regenerated.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
from pathlib import Path

from .finmod import RingCtx, Submodule
from .lagrange import HeckeType, enumerate_hecke, predicted_count

log = logging.getLogger(__name__)

MAGIC = b"HKLC"
FORMAT_VERSION = 1
MODEL_VERSION = 1
ENV_VAR = "HECKELAB_CACHE"


class CacheError(OSError):
    pass


def default_cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR, Path.home() / ".cache" / "heckelab"))


def key_json(g: int, p: int, ht: HeckeType) -> str:
    return json.dumps({"g": g, "p": p, "hecke": ht.label(), "model": MODEL_VERSION}, sort_keys=True)


def encode(key: str, subs: list[Submodule]) -> bytes:
    kb = key.encode()
    out = [MAGIC, struct.pack(">HI", FORMAT_VERSION, len(kb)), kb, struct.pack(">I", len(subs))]
    for w in subs:
        flat = [x for r in w.gens for x in r]
        payload = bytes([w.ctx.p, w.ctx.e, w.n, len(w.gens)]) + bytes(flat)
        out.append(struct.pack(">H", len(payload)) + payload)
    return b"".join(out)


def decode(data: bytes, key: str | None = None) -> list[Submodule]:
    if data[:4] != MAGIC:
        raise ValueError("bad magic")
    version, klen = struct.unpack_from(">HI", data, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"format version {version} != {FORMAT_VERSION}")
    off = 10
    k = data[off : off + klen].decode()
    off += klen
    if key is not None and k != key:
        raise ValueError("key mismatch")
    (count,) = struct.unpack_from(">I", data, off)
    off += 4
    subs = []
    ctxs: dict[tuple[int, int], RingCtx] = {}
    for _ in range(count):
        (ln,) = struct.unpack_from(">H", data, off)
        off += 2
        payload = data[off : off + ln]
        if len(payload) != ln:
            raise ValueError("truncated record")
        off += ln
        p, e, n, rows = payload[:4]
        if len(payload) != 4 + rows * n:
            raise ValueError("record length mismatch")
        ctx = ctxs.setdefault((p, e), RingCtx(p, e))
        body = payload[4:]
        gens = tuple(tuple(body[r * n : (r + 1) * n]) for r in range(rows))
        subs.append(Submodule(ctx, n, gens))
    if off != len(data):
        raise ValueError("trailing bytes")
    return subs


class EnumerationCache:
    def __init__(self, directory: str | os.PathLike | None = None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def path_for(self, key: str) -> Path:
        return self.dir / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".hkc")

    def get(self, g: int, p: int, ht: HeckeType) -> list[Submodule] | None:
        key = key_json(g, p, ht)
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            subs = decode(path.read_bytes(), key)
        except (ValueError, struct.error, UnicodeDecodeError) as exc:
            log.warning("ignoring corrupt cache file %s: %s", path, exc)
            return None
        self.hits += 1
        return subs

    def put(self, g: int, p: int, ht: HeckeType, subs: list[Submodule]) -> Path:
        key = key_json(g, p, ht)
        path = self.path_for(key)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(encode(key, subs))
            tmp.replace(path)
        except OSError as exc:
            raise CacheError(f"cannot write cache file {path}: {exc}") from exc
        return path

    def load_or_enumerate(self, g: int, p: int, ht: HeckeType, workers: int = 1, budget: int | None = None) -> list[Submodule]:
        subs = self.get(g, p, ht)
        if subs is not None:
            return subs
        self.misses += 1
        subs = enumerate_hecke(g, p, ht, workers=workers, budget=budget)
        self.put(g, p, ht, subs)
        return subs

    def status(self) -> list[dict]:
        rows = []
        if not self.dir.exists():
            return rows
        for path in sorted(self.dir.glob("*.hkc")):
            try:
                data = path.read_bytes()
                subs = decode(data)
                klen = struct.unpack_from(">I", data, 6)[0]
                key = json.loads(data[10 : 10 + klen])
            except (ValueError, struct.error, UnicodeDecodeError, OSError) as exc:
                rows.append({"file": path.name, "error": str(exc)})
                continue
            ht = HeckeType("Tp") if key["hecke"] == "Tp" else HeckeType("Tpi", int(key["hecke"][2:]))
            pred = predicted_count(key["g"], key["p"], ht)
            rows.append({"file": path.name, "key": key, "records": len(subs), "predicted": pred, "ok": pred == len(subs)})
        return rows

    def purge(self) -> int:
        n = 0
        if not self.dir.exists():
            return 0
        for path in self.dir.glob("*.hkc"):
            try:
                path.unlink()
            except OSError as exc:
                raise CacheError(f"cannot remove {path}: {exc}") from exc
            n += 1
        return n


class NullCache:
    """Drop-in for EnumerationCache that never touches the disk."""

    def __init__(self):
        self.hits = 0
        self.misses = 0

    def load_or_enumerate(self, g, p, ht, workers=1, budget=None):
        self.misses += 1
        return enumerate_hecke(g, p, ht, workers=workers, budget=budget)


class MemoryCache(NullCache):
    """Process-local memo of enumerations, keyed like the disk cache."""

    def __init__(self):
        super().__init__()
        self._store: dict[str, list[Submodule]] = {}

    def load_or_enumerate(self, g, p, ht, workers=1, budget=None):
        key = key_json(g, p, ht)
        if key in self._store:
            self.hits += 1
            return self._store[key]
        subs = super().load_or_enumerate(g, p, ht, workers=workers, budget=budget)
        self._store[key] = subs
        return subs
