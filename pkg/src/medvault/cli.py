"""Command-line interface.

Commands cover the whole flow: issue keys, encrypt/decrypt envelopes, store
and fetch records on a chain, verify chain integrity, manage grants, and
run the benchmark harness.  Every command is deterministic under --seed
except wall-clock fields (block timestamps and benchmark timings).

Exit codes:
    0  success
    1  other error
    2  usage error
    3  permission denied / unknown principal
    4  integrity or format failure (tampered data, wrong key)
    5  record or input file not found
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import bench, rsa
from .access import Action, CertificateAuthority, PermissionPolicy, Role
from .errors import (
    IntegrityError,
    MedvaultError,
    PermissionDenied,
    RecordNotFound,
    StorageError,
    UnknownPrincipalError,
    UnwrapError,
)
from .ledger import Chain
from .mpa import Rng

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PERMISSION = 3
EXIT_INTEGRITY = 4
EXIT_NOT_FOUND = 5

_EPILOG = """\
exit codes:
  0  success
  1  other error
  2  usage error
  3  permission denied / unknown principal
  4  integrity or format failure (tampered data, wrong key)
  5  record or input file not found
"""


class _UsageError(Exception):
    """Bad argument values detected after argparse; maps to exit code 2."""


def _make_rng(seed: int | None) -> Rng:
    if seed is None:
        return Rng(os.urandom(Rng.SEED_LEN))
    return Rng.from_int_seed(seed)


def _now_ms() -> int:
    return int(time.time() * 1000)


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _write_file(path: str, data: bytes) -> None:
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(data)


def _parse_users(spec: str, step: int) -> list[int]:
    if ".." in spec:
        lo_s, hi_s = spec.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if step <= 0:
            raise ValueError("step must be positive")
        counts = list(range(lo, hi + 1, step))
    else:
        counts = [int(x) for x in spec.split(",") if x]
    if not counts or any(n <= 0 for n in counts):
        raise ValueError("user counts must be positive integers")
    return counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medvault",
        description="Encrypted record vault with a tamper-evident chain.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="integer seed for deterministic key/nonce material")
    parser.add_argument("--verbose", action="store_true",
                        help="print progress details to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair for a principal")
    p.add_argument("--id", required=True, dest="principal_id")
    p.add_argument("--role", required=True, choices=[r.value for r in Role])
    p.add_argument("--bits", type=int, default=2048,
                   choices=list(rsa.ALLOWED_KEY_BITS))
    p.add_argument("--out", required=True, help="directory for the key files")
    p.add_argument("--chain", default=None,
                   help="chain directory whose registry records the principal")
    p.add_argument("--force", action="store_true",
                   help="overwrite existing key files")

    p = sub.add_parser("encrypt", help="encrypt a file into an envelope")
    p.add_argument("--in", required=True, dest="input")
    p.add_argument("--to", required=True, dest="pubkey",
                   help="receiver public key file (.mlpk)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("decrypt", help="open an envelope")
    p.add_argument("--in", required=True, dest="input")
    p.add_argument("--key", required=True, help="private key file (.mlsk)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("store", help="append an envelope to a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--record-id", required=True)
    p.add_argument("--owner", required=True)
    p.add_argument("--in", required=True, dest="input")

    p = sub.add_parser("fetch", help="fetch a stored envelope")
    p.add_argument("--chain", required=True)
    p.add_argument("--record-id", required=True)
    p.add_argument("--as", required=True, dest="requester")
    p.add_argument("--emergency", action="store_true")
    p.add_argument("--out", default=None,
                   help="output file (defaults to stdout)")

    p = sub.add_parser("verify", help="validate every hash and link of a chain")
    p.add_argument("--chain", required=True)

    p = sub.add_parser("grant", help="grant read or write on a record")
    p.add_argument("--chain", required=True)
    p.add_argument("--record-id", required=True)
    p.add_argument("--to", required=True, dest="grantee")
    p.add_argument("--action", required=True, choices=[a.value for a in Action])
    p.add_argument("--ttl", type=int, default=None, help="lifetime in seconds")
    p.add_argument("--by", default=None,
                   help="granting principal (defaults to the record owner)")

    p = sub.add_parser("revoke", help="revoke matching grants")
    p.add_argument("--chain", required=True)
    p.add_argument("--record-id", required=True)
    p.add_argument("--to", required=True, dest="grantee")
    p.add_argument("--action", required=True, choices=[a.value for a in Action])
    p.add_argument("--by", default=None)

    pb = sub.add_parser("bench", help="benchmark harness")
    bsub = pb.add_subparsers(dest="bench_command", required=True)

    p = bsub.add_parser("size", help="encrypt/decrypt timing per payload size")
    p.add_argument("--sizes", default="100,200,300,400,500",
                   help="comma-separated payload sizes in KB")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--bits", type=int, default=512,
                   choices=list(rsa.ALLOWED_KEY_BITS))
    p.add_argument("--schemes", default=",".join(bench.SIZE_SCHEMES))
    p.add_argument("--out", required=True, help="CSV report path")

    p = bsub.add_parser("load", help="fetch latency under concurrent users")
    p.add_argument("--users", default="10..100",
                   help="range like 10..100 (with --step) or a comma list")
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--duration", type=float, default=5.0,
                   help="seconds per concurrency level")
    p.add_argument("--bits", type=int, default=512,
                   choices=list(rsa.ALLOWED_KEY_BITS))
    p.add_argument("--out", required=True, help="CSV report path")

    return parser


# ---------------------------------------------------------------------------
# Command bodies
# ---------------------------------------------------------------------------

def _cmd_keygen(args, rng: Rng) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pub_path = out_dir / f"{args.principal_id}.mlpk"
    pri_path = out_dir / f"{args.principal_id}.mlsk"
    for path in (pub_path, pri_path):
        if path.exists() and not args.force:
            raise MedvaultError(f"{path} exists; pass --force to overwrite")

    if args.chain:
        ca = CertificateAuthority(args.chain)
        principal, pair = ca.issue_keypair(
            args.principal_id, Role(args.role), args.bits, rng
        )
        fingerprint = principal.fingerprint
    else:
        pair = rsa.keygen(args.bits, rng)
        fingerprint = rsa.key_fingerprint(pair.public)

    pub_path.write_bytes(rsa.encode_public_key(pair.public))
    pri_path.write_bytes(rsa.encode_private_key(pair.private))
    print(f"wrote {pub_path} and {pri_path}")
    print(f"fingerprint: {fingerprint.hex()}")
    return EXIT_OK


def _cmd_encrypt(args, rng: Rng) -> int:
    data = _read_file(args.input)
    pub = rsa.decode_public_key(_read_file(args.pubkey))
    env = rsa.hybrid_encrypt(data, pub, rng)
    _write_file(args.out, env.to_bytes())
    print(f"wrote {args.out} ({len(env.ciphertext)} ciphertext bytes)")
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    env = rsa.Envelope.from_bytes(_read_file(args.input))
    pri = rsa.decode_private_key(_read_file(args.key))
    data = rsa.hybrid_decrypt(env, pri)
    _write_file(args.out, data)
    print(f"wrote {args.out} ({len(data)} bytes)")
    return EXIT_OK


def _cmd_store(args) -> int:
    env = rsa.Envelope.from_bytes(_read_file(args.input))
    chain = Chain(args.chain)
    block = chain.append_record(env, args.record_id, args.owner, _now_ms())
    print(f"stored {block.record_id!r} as block {block.index} "
          f"({block.block_hash.hex()[:16]}…)")
    return EXIT_OK


def _cmd_fetch(args) -> int:
    chain = Chain(args.chain)
    ca = CertificateAuthority(args.chain)
    policy = PermissionPolicy(ca, args.chain)
    requester = ca.lookup(args.requester)
    env = chain.fetch_record(
        args.record_id, requester, policy, emergency=args.emergency
    )
    raw = env.to_bytes()
    if args.out:
        _write_file(args.out, raw)
        print(f"wrote {args.out} ({len(raw)} bytes)")
    else:
        sys.stdout.buffer.write(raw)
        sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_verify(args) -> int:
    result = Chain(args.chain).validate()
    if result.ok:
        print(f"Valid, {result.block_count} blocks")
        return EXIT_OK
    print(f"Invalid at block {result.bad_index}")
    return EXIT_INTEGRITY


def _cmd_grant(args) -> int:
    chain = Chain(args.chain)
    ca = CertificateAuthority(args.chain)
    policy = PermissionPolicy(ca, args.chain)
    block = chain.resolve(args.record_id)
    granter = ca.lookup(args.by or block.owner_id)
    ttl_ms = None if args.ttl is None else args.ttl * 1000
    g = policy.grant(
        granter,
        args.grantee,
        args.record_id,
        Action(args.action),
        record_owner_id=block.owner_id,
        ttl_ms=ttl_ms,
    )
    expiry = "never" if g.expires_at_ms is None else f"at {g.expires_at_ms}ms"
    print(f"granted {g.action.value} on {g.record_id!r} to {g.grantee_id!r}, "
          f"expires {expiry}")
    return EXIT_OK


def _cmd_revoke(args) -> int:
    chain = Chain(args.chain)
    ca = CertificateAuthority(args.chain)
    policy = PermissionPolicy(ca, args.chain)
    block = chain.resolve(args.record_id)
    granter = ca.lookup(args.by or block.owner_id)
    matches = [
        g for g in policy.grants
        if g.grantee_id == args.grantee and g.action is Action(args.action)
        and g.record_id == args.record_id
    ]
    if not matches:
        raise RecordNotFound(
            f"no {args.action} grant on {args.record_id!r} for {args.grantee!r}"
        )
    for g in matches:
        policy.revoke(granter, g)
    print(f"revoked {len(matches)} grant(s)")
    return EXIT_OK


def _cmd_bench_size(args, rng: Rng, verbose: bool) -> int:
    sizes = [int(x) for x in args.sizes.split(",") if x]
    schemes = tuple(x for x in args.schemes.split(",") if x)
    if args.reps == 1:
        print("warning: --reps 1 gives single-sample medians; "
              "expect noisy numbers", file=sys.stderr)
    progress = (lambda msg: print(f"bench: {msg}", file=sys.stderr)) if verbose else None
    report = bench.run_size_bench(
        sizes, args.reps, rng, bits=args.bits, schemes=schemes, progress=progress
    )
    _write_file(args.out, report.to_csv().encode("utf-8"))
    print(f"wrote {args.out} ({len(report.rows)} rows)")
    return EXIT_OK


def _cmd_bench_load(args, rng: Rng, verbose: bool) -> int:
    try:
        counts = _parse_users(args.users, args.step)
    except ValueError as exc:
        raise _UsageError(f"--users: {exc}") from None
    progress = (lambda msg: print(f"bench: {msg}", file=sys.stderr)) if verbose else None
    report = bench.run_load_bench(
        counts, args.duration, rng, bits=args.bits, progress=progress
    )
    _write_file(args.out, report.to_csv().encode("utf-8"))
    print(f"wrote {args.out} ({len(report.rows)} rows)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rng = _make_rng(args.seed)

    try:
        if args.command == "keygen":
            return _cmd_keygen(args, rng)
        if args.command == "encrypt":
            return _cmd_encrypt(args, rng)
        if args.command == "decrypt":
            return _cmd_decrypt(args)
        if args.command == "store":
            return _cmd_store(args)
        if args.command == "fetch":
            return _cmd_fetch(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "grant":
            return _cmd_grant(args)
        if args.command == "revoke":
            return _cmd_revoke(args)
        if args.command == "bench":
            if args.bench_command == "size":
                return _cmd_bench_size(args, rng, args.verbose)
            return _cmd_bench_load(args, rng, args.verbose)
        raise AssertionError(f"unhandled command {args.command}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PermissionDenied, UnknownPrincipalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PERMISSION
    except (IntegrityError, UnwrapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (RecordNotFound, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (MedvaultError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
