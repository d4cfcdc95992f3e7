"""Append-only hash-chained record store with content-addressed envelopes.

Each block binds (index, timestamp, previous block hash, record id, owner
id, envelope hash).  The block hash is SHA-256 over a fixed big-endian
canonical encoding that excludes the hash itself; the hash is stored next
to the block, never inside the hashed region.  Envelopes live as separate
files named by their own SHA-256, so the chain entry pins their content.

On disk a chain directory holds:

    chain.log       length-prefixed canonical blocks, append-only
    envelopes/<hex> one file per envelope, content-addressed
    index.txt       record id -> (block index, envelope hash); this file is
                    untrusted convenience output and is rebuilt from the log
                    on every open

Duplicate record ids are versioned: the second append of "visit" is stored
as "visit#2" and the bare id resolves to the newest version.
"""

from __future__ import annotations

import hashlib
import os
import re
import struct
import threading
from dataclasses import dataclass
from pathlib import Path

from . import rsa
from .errors import (
    IntegrityError,
    PermissionDenied,
    RecordNotFound,
    StorageError,
)

ZERO_HASH = bytes(32)
_MAX_ID_LEN = 65535
# index + timestamp + prev_hash + two length prefixes + ids + envelope_ref
_MAX_CANONICAL = 8 + 8 + 32 + 2 + _MAX_ID_LEN + 2 + _MAX_ID_LEN + 32
_VERSION_SUFFIX = re.compile(r"#(\d+)$")


def sha256(data: bytes) -> bytes:
    """SHA-256 digest (FIPS 180-4) of a byte string."""
    return hashlib.sha256(data).digest()


def base_record_id(record_id: str) -> str:
    """Strip the #N version suffix the chain adds to duplicate record ids."""
    return _VERSION_SUFFIX.sub("", record_id)


@dataclass(frozen=True)
class Block:
    index: int
    timestamp_ms: int
    prev_hash: bytes
    record_id: str
    owner_id: str
    envelope_ref: bytes
    block_hash: bytes

    @staticmethod
    def canonical_encode(
        index: int,
        timestamp_ms: int,
        prev_hash: bytes,
        record_id: str,
        owner_id: str,
        envelope_ref: bytes,
    ) -> bytes:
        rid = record_id.encode("utf-8")
        oid = owner_id.encode("utf-8")
        if len(rid) > _MAX_ID_LEN or len(oid) > _MAX_ID_LEN:
            raise ValueError("record or owner id exceeds 65535 encoded bytes")
        return b"".join((
            struct.pack(">QQ", index, timestamp_ms),
            prev_hash,
            struct.pack(">H", len(rid)), rid,
            struct.pack(">H", len(oid)), oid,
            envelope_ref,
        ))

    def canonical_bytes(self) -> bytes:
        return self.canonical_encode(
            self.index, self.timestamp_ms, self.prev_hash,
            self.record_id, self.owner_id, self.envelope_ref,
        )

    @classmethod
    def from_canonical(cls, data: bytes, block_hash: bytes) -> "Block":
        if len(data) < 8 + 8 + 32 + 2:
            raise ValueError("canonical block too short")
        index, timestamp_ms = struct.unpack_from(">QQ", data, 0)
        prev_hash = data[16:48]
        pos = 48
        (rid_len,) = struct.unpack_from(">H", data, pos)
        pos += 2
        rid = data[pos:pos + rid_len]
        if len(rid) != rid_len:
            raise ValueError("truncated record id")
        pos += rid_len
        if pos + 2 > len(data):
            raise ValueError("truncated owner id length")
        (oid_len,) = struct.unpack_from(">H", data, pos)
        pos += 2
        oid = data[pos:pos + oid_len]
        if len(oid) != oid_len:
            raise ValueError("truncated owner id")
        pos += oid_len
        envelope_ref = data[pos:pos + 32]
        if len(envelope_ref) != 32 or pos + 32 != len(data):
            raise ValueError("bad envelope reference")
        return cls(
            index=index,
            timestamp_ms=timestamp_ms,
            prev_hash=prev_hash,
            record_id=rid.decode("utf-8"),
            owner_id=oid.decode("utf-8"),
            envelope_ref=envelope_ref,
            block_hash=block_hash,
        )


@dataclass(frozen=True)
class ChainValidation:
    ok: bool
    bad_index: int | None = None
    block_count: int = 0


class Chain:
    """A chain bound to a directory; create or open with `Chain(root)`."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.envelope_dir = self.root / "envelopes"
        self.log_path = self.root / "chain.log"
        self._lock = threading.Lock()
        try:
            self.envelope_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create chain directory: {exc}") from exc
        self._blocks: list[Block] = []
        self._index: dict[str, Block] = {}
        self._version_count: dict[str, int] = {}
        # Index of the first damaged block found at open time, if any.  A
        # damaged chain can still be opened so it can be inspected and
        # validated, but reads and appends refuse to touch it.
        self._damaged: int | None = None
        self._load()

    # -- loading ------------------------------------------------------------

    def _load(self) -> None:
        if not self.log_path.exists():
            self._write_index_file()
            return
        data = self.log_path.read_bytes()
        blocks, bad = self._parse_log(data)
        self._blocks = blocks
        self._damaged = bad
        for block in blocks:
            self._register(block)
        if bad is None:
            self._write_index_file()

    def _require_intact(self) -> None:
        if self._damaged is not None:
            raise IntegrityError(f"chain.log is damaged at block {self._damaged}")

    @staticmethod
    def _parse_log(data: bytes) -> tuple[list[Block], int | None]:
        """Parse and verify the full log; returns (good blocks, first bad index)."""
        blocks: list[Block] = []
        pos = 0
        prev = ZERO_HASH
        while pos < len(data):
            k = len(blocks)
            if pos + 4 > len(data):
                return blocks, k
            (length,) = struct.unpack_from(">I", data, pos)
            if length > _MAX_CANONICAL or pos + 4 + length + 32 > len(data):
                return blocks, k
            canonical = data[pos + 4:pos + 4 + length]
            stored_hash = data[pos + 4 + length:pos + 4 + length + 32]
            if sha256(canonical) != stored_hash:
                return blocks, k
            try:
                block = Block.from_canonical(canonical, stored_hash)
            except (ValueError, UnicodeDecodeError):
                return blocks, k
            if block.index != k or block.prev_hash != prev:
                return blocks, k
            blocks.append(block)
            prev = stored_hash
            pos += 4 + length + 32
        return blocks, None

    def _register(self, block: Block) -> None:
        base = _VERSION_SUFFIX.sub("", block.record_id)
        m = _VERSION_SUFFIX.search(block.record_id)
        version = int(m.group(1)) if m else 1
        self._version_count[base] = max(self._version_count.get(base, 0), version)
        self._index[block.record_id] = block
        self._index[base] = block

    # -- public surface -----------------------------------------------------

    @property
    def blocks(self) -> tuple[Block, ...]:
        return tuple(self._blocks)

    def __len__(self) -> int:
        return len(self._blocks)

    def envelope_path(self, envelope_ref: bytes) -> Path:
        return self.envelope_dir / envelope_ref.hex()

    def append_record(
        self,
        envelope: rsa.Envelope,
        record_id: str,
        owner_id: str,
        now_ms: int,
    ) -> Block:
        """Append a new block; duplicate ids get a #N version suffix.

        The append is atomic with respect to the chain: the envelope file is
        written first, and any storage failure leaves the chain (in memory
        and in chain.log) exactly as it was.
        """
        if not record_id or not owner_id:
            raise ValueError("record id and owner id must be non-empty")
        with self._lock:
            self._require_intact()
            base = _VERSION_SUFFIX.sub("", record_id)
            if base != record_id:
                raise ValueError("record ids must not carry a #N version suffix")
            count = self._version_count.get(base, 0)
            stored_id = base if count == 0 else f"{base}#{count + 1}"

            env_bytes = envelope.to_bytes()
            env_ref = sha256(env_bytes)
            prev = self._blocks[-1].block_hash if self._blocks else ZERO_HASH
            canonical = Block.canonical_encode(
                len(self._blocks), now_ms, prev, stored_id, owner_id, env_ref
            )
            block_hash = sha256(canonical)
            block = Block.from_canonical(canonical, block_hash)

            try:
                tmp = self.envelope_path(env_ref).with_suffix(".tmp")
                tmp.write_bytes(env_bytes)
                os.replace(tmp, self.envelope_path(env_ref))
                with open(self.log_path, "ab") as fh:
                    fh.write(struct.pack(">I", len(canonical)) + canonical + block_hash)
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageError(f"chain append failed: {exc}") from exc

            self._blocks.append(block)
            self._register(block)
            self._write_index_file()
            return block

    def validate(self) -> ChainValidation:
        """Re-read chain.log from disk and verify every hash and link."""
        try:
            data = self.log_path.read_bytes() if self.log_path.exists() else b""
        except OSError as exc:
            raise StorageError(f"cannot read chain.log: {exc}") from exc
        blocks, bad = self._parse_log(data)
        if bad is not None:
            return ChainValidation(ok=False, bad_index=bad, block_count=len(blocks))
        return ChainValidation(ok=True, block_count=len(blocks))

    def resolve(self, record_id: str) -> Block:
        block = self._index.get(record_id)
        if block is None:
            raise RecordNotFound(f"no record {record_id!r} in chain")
        return block

    def fetch_record(
        self,
        record_id: str,
        requester,
        policy,
        *,
        emergency: bool = False,
        now_ms: int | None = None,
    ) -> rsa.Envelope:
        """Resolve, authorize, verify and return a stored envelope.

        The envelope bytes must hash to the value pinned in the block, and
        the parsed envelope must be well formed; either failure raises
        IntegrityError.  Authorization goes through `policy` and a denied
        read raises PermissionDenied.
        """
        self._require_intact()
        block = self.resolve(record_id)
        from .access import Action  # local import to keep module deps one-way

        decision = policy.check_permission(
            requester,
            Action.READ,
            block.owner_id,
            record_id=block.record_id,
            emergency=emergency,
            now_ms=now_ms,
        )
        if not decision.allowed:
            raise PermissionDenied(
                f"read of {record_id!r} denied for {requester.principal_id!r}: "
                f"{decision.reason}"
            )
        path = self.envelope_path(block.envelope_ref)
        try:
            env_bytes = path.read_bytes()
        except FileNotFoundError:
            raise IntegrityError(
                f"envelope for {record_id!r} is missing from storage"
            ) from None
        except OSError as exc:
            raise StorageError(f"cannot read envelope: {exc}") from exc
        if sha256(env_bytes) != block.envelope_ref:
            raise IntegrityError(f"envelope for {record_id!r} does not match its hash")
        return rsa.Envelope.from_bytes(env_bytes)

    # -- convenience index file --------------------------------------------

    def _write_index_file(self) -> None:
        lines = ["# record_id\tblock_index\tenvelope_sha256\n"]
        for rid, block in sorted(self._index.items()):
            lines.append(f"{rid}\t{block.index}\t{block.envelope_ref.hex()}\n")
        tmp = self.root / "index.txt.tmp"
        try:
            tmp.write_text("".join(lines), encoding="utf-8")
            os.replace(tmp, self.root / "index.txt")
        except OSError:
            pass  # the index is derived data; losing it never loses records
