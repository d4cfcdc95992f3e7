"""Benchmark harness: bulk encrypt/decrypt timing and fetch latency under load.

Two experiment shapes are supported.  The size benchmark times three
schemes over the same random payloads: Twofish-CBC alone, raw RSA applied
chunk-wise to the whole payload, and the hybrid envelope.  The load
benchmark replays closed-loop fetch-and-decrypt requests against a prepared
chain from N concurrent in-process users and reports mean request latency
per level.

All timings use the monotonic clock; each size cell reports the median of
`reps` runs taken after a small discarded warm-up round per scheme.  The
raw-RSA column exists for comparison shape only; chunking a whole file
through modular exponentiation is never a practical design, and reports
carry that caveat in their header.

Reports serialize to CSV with one fixed header and empty cells for
non-applicable columns:

    label,size_or_users,encrypt_s,decrypt_s,latency_s,reps
"""

from __future__ import annotations

import platform
import statistics
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import rsa, twofish
from .access import CertificateAuthority, PermissionPolicy, Role
from .ledger import Chain
from .mpa import Natural, Rng

SIZE_SCHEMES = ("twofish", "rsa", "hybrid")
CSV_HEADER = "label,size_or_users,encrypt_s,decrypt_s,latency_s,reps"
RSA_CAVEAT = (
    "rsa rows chunk the whole payload through raw modular exponentiation; "
    "impractical by design, included only for comparison shape"
)
_WARMUP_BYTES = 4 * 1024


@dataclass(frozen=True)
class BenchRow:
    label: str
    size_or_users: int
    encrypt_s: float | None
    decrypt_s: float | None
    latency_s: float | None
    reps: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    environment: str = ""
    notes: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["# medvault bench report"]
        if self.environment:
            lines.append(f"# environment: {self.environment}")
        for note in self.notes:
            lines.append(f"# note: {note}")
        lines.append(CSV_HEADER)
        for r in self.rows:
            lines.append(",".join((
                r.label,
                str(r.size_or_users),
                _fmt(r.encrypt_s),
                _fmt(r.decrypt_s),
                _fmt(r.latency_s),
                str(r.reps),
            )))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "BenchReport":
        report = cls()
        saw_header = False
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("environment:"):
                    report.environment = body[len("environment:"):].strip()
                elif body.startswith("note:"):
                    report.notes.append(body[len("note:"):].strip())
                continue
            if not saw_header:
                if line != CSV_HEADER:
                    raise ValueError(f"unexpected bench CSV header: {line!r}")
                saw_header = True
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise ValueError(f"malformed bench CSV row: {line!r}")
            report.rows.append(BenchRow(
                label=parts[0],
                size_or_users=int(parts[1]),
                encrypt_s=_parse(parts[2]),
                decrypt_s=_parse(parts[3]),
                latency_s=_parse(parts[4]),
                reps=int(parts[5]),
            ))
        if not saw_header:
            raise ValueError("bench CSV has no header line")
        return report

    def scheme_rows(self, label: str) -> list[BenchRow]:
        return [r for r in self.rows if r.label == label]


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def _parse(s: str) -> float | None:
    return None if s == "" else float(s)


def _round6(v: float) -> float:
    return round(v, 6)


def host_environment() -> str:
    return (
        f"{platform.python_implementation()} {platform.python_version()} "
        f"on {platform.platform()}"
    )


# ---------------------------------------------------------------------------
# Chunked raw RSA (bench-only comparison scheme)
# ---------------------------------------------------------------------------

def rsa_chunk_encrypt(data: bytes, pub: rsa.PublicKey) -> bytes:
    """Raw-RSA the payload in modulus-sized chunks (k-1 bytes in, k out)."""
    k = rsa.modulus_bytes(pub.n)
    step = k - 1
    out = bytearray()
    for i in range(0, len(data), step):
        c = rsa.rsa_encrypt_raw(Natural.from_bytes_be(data[i:i + step]), pub)
        out += c.to_bytes_be(k)
    return bytes(out)


def rsa_chunk_decrypt(blob: bytes, pri: rsa.PrivateKey, original_len: int) -> bytes:
    if len(blob) % rsa.modulus_bytes(pri.n):
        raise ValueError("ciphertext is not a whole number of modulus blocks")
    k = rsa.modulus_bytes(pri.n)
    step = k - 1
    nchunks = len(blob) // k
    out = bytearray()
    for idx in range(nchunks):
        m = rsa.rsa_decrypt_raw(Natural.from_bytes_be(blob[idx * k:(idx + 1) * k]), pri)
        width = (original_len - idx * step) if idx == nchunks - 1 else step
        out += m.to_bytes_be(width)
    return bytes(out)


# ---------------------------------------------------------------------------
# Size benchmark
# ---------------------------------------------------------------------------

def _timed(fn, reps: int):
    samples = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), result


def run_size_bench(
    sizes_kb,
    reps: int,
    rng: Rng,
    *,
    bits: int = 512,
    schemes=SIZE_SCHEMES,
    progress=None,
) -> BenchReport:
    """Time encrypt and decrypt per scheme per payload size.

    `bits` sizes the RSA key for the rsa and hybrid schemes; the default
    keeps the deliberately impractical chunked-RSA column down to minutes.
    One payload per size is shared by all schemes.
    """
    sizes_kb = [int(s) for s in sizes_kb]
    if not sizes_kb or any(s <= 0 for s in sizes_kb):
        raise ValueError("sizes must be positive")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    unknown = set(schemes) - set(SIZE_SCHEMES)
    if unknown:
        raise ValueError(f"unknown schemes: {sorted(unknown)}")

    report = BenchReport(environment=host_environment())
    report.notes.append(f"size bench: bits={bits} reps={reps} seed={rng.seed_id}")
    if "rsa" in schemes:
        report.notes.append(RSA_CAVEAT)
    if reps == 1:
        report.notes.append(
            "reps=1: each cell is a single sample, not a median of repeats"
        )

    pair = rsa.keygen(bits, rng)
    payloads = {s: rng.next_bytes(s * 1024) for s in sizes_kb}
    tf_key = rng.next_bytes(32)
    iv = rng.next_bytes(16)
    warm_data = rng.next_bytes(_WARMUP_BYTES)

    def _ops(scheme: str, data: bytes):
        if scheme == "twofish":
            enc = lambda: twofish.cbc_encrypt(tf_key, iv, data)  # noqa: E731
            dec = lambda ct: twofish.cbc_decrypt(tf_key, iv, ct)  # noqa: E731
        elif scheme == "rsa":
            enc = lambda: rsa_chunk_encrypt(data, pair.public)  # noqa: E731
            dec = lambda ct: rsa_chunk_decrypt(ct, pair.private, len(data))  # noqa: E731
        else:
            enc = lambda: rsa.hybrid_encrypt(data, pair.public, rng)  # noqa: E731
            dec = lambda env: rsa.hybrid_decrypt(env, pair.private)  # noqa: E731
        return enc, dec

    for scheme in schemes:
        enc, dec = _ops(scheme, warm_data)
        dec(enc())  # warm-up round, discarded
        for size in sizes_kb:
            if progress:
                progress(f"{scheme} {size}KB")
            data = payloads[size]
            enc, dec = _ops(scheme, data)
            enc_median, ct = _timed(enc, reps)
            dec_median, out = _timed(lambda: dec(ct), reps)
            if out != data:
                raise AssertionError(f"{scheme} round trip failed at {size}KB")
            report.rows.append(BenchRow(
                label=scheme,
                size_or_users=size,
                encrypt_s=_round6(enc_median),
                decrypt_s=_round6(dec_median),
                latency_s=None,
                reps=reps,
            ))
    return report


# ---------------------------------------------------------------------------
# Load benchmark
# ---------------------------------------------------------------------------

def run_load_bench(
    user_counts,
    duration_s: float,
    rng: Rng,
    *,
    bits: int = 512,
    records: int = 8,
    record_kb: int = 2,
    root: str | Path | None = None,
    progress=None,
) -> BenchReport:
    """Mean fetch+decrypt latency per concurrency level.

    Each simulated user is a thread in a closed loop: issue a fetch for the
    next record, decrypt it, record the wall latency, repeat until the
    level's deadline.  All crypto is CPU-bound Python, so the interpreter
    serializes the work and latency grows with the number of users.
    """
    user_counts = [int(n) for n in user_counts]
    if not user_counts or any(n <= 0 for n in user_counts):
        raise ValueError("user counts must be positive")
    if duration_s <= 0:
        raise ValueError("duration must be positive")

    report = BenchReport(environment=host_environment())
    report.notes.append(
        f"load bench: bits={bits} records={records} duration_s={duration_s} "
        f"seed={rng.seed_id}"
    )
    report.notes.append(
        "closed-loop in-process users; latency includes queueing for the "
        "interpreter, which is the saturation being measured"
    )

    with tempfile.TemporaryDirectory() as tmp:
        chain_root = Path(root) if root is not None else Path(tmp) / "chain"
        ca = CertificateAuthority()
        principal, pair = ca.issue_keypair("load-user", Role.PATIENT, bits, rng)
        policy = PermissionPolicy(ca)
        chain = Chain(chain_root)
        for i in range(records):
            env = rsa.hybrid_encrypt(rng.next_bytes(record_kb * 1024), pair.public, rng)
            chain.append_record(env, f"load-{i}", principal.principal_id, now_ms=i)

        for level in user_counts:
            if progress:
                progress(f"load level: {level} users")
            latencies = _run_load_level(
                chain, principal, policy, pair.private, level, duration_s, records
            )
            report.rows.append(BenchRow(
                label="load",
                size_or_users=level,
                encrypt_s=None,
                decrypt_s=None,
                latency_s=_round6(statistics.fmean(latencies)),
                reps=len(latencies),
            ))
    return report


def _run_load_level(
    chain, principal, policy, private_key, users: int, duration_s: float, records: int
) -> list[float]:
    deadline = [0.0]
    barrier = threading.Barrier(
        users, action=lambda: deadline.__setitem__(0, time.perf_counter() + duration_s)
    )
    buckets: list[list[float]] = [[] for _ in range(users)]

    def worker(wid: int) -> None:
        local = buckets[wid]
        i = wid
        barrier.wait()
        end = deadline[0]
        while True:
            t0 = time.perf_counter()
            if t0 >= end:
                break
            env = chain.fetch_record(f"load-{i % records}", principal, policy)
            data = rsa.hybrid_decrypt(env, private_key)
            if not data:
                raise AssertionError("empty record payload")
            local.append(time.perf_counter() - t0)
            i += 1

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(users)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    # Merge at a single collection point after all workers stop.
    merged = [x for bucket in buckets for x in bucket]
    if not merged:
        raise RuntimeError(
            "no request completed within the duration; increase --duration"
        )
    return merged
