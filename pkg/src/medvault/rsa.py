"""RSA key generation, raw modular operations, session-key wrapping, and
the hybrid envelope that combines them with Twofish-CBC bulk encryption.

Key pairs are built entirely on the `mpa` kernel: two primes of bits/2 each
with the top two bits forced (so the modulus always reaches the requested
length), public exponent 65537, and the private exponent as its inverse mod
phi(n).  The primes are discarded after generation; the private key is just
(d, n), so decryption is a single modular exponentiation.

An envelope carries the Twofish ciphertext, the RSA-wrapped 32-byte session
key, the IV, a SHA-256 digest of the plaintext, and the fingerprint of the
receiver's public key.  Serialization is a fixed big-endian layout:

    "MLEN" | version(1) | fingerprint(32) | len(E2) u32 | E2
           | iv(16) | len(E1) u64 | E1 | digest(32)

Public and private keys serialize as "MLPK"/"MLSK" | bit length u32 |
length-prefixed big-endian exponent | length-prefixed big-endian modulus.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from . import mpa, twofish
from .errors import EnvelopeFormatError, IntegrityError, UnwrapError
from .mpa import Natural, Rng

ALLOWED_KEY_BITS = (512, 1024, 2048, 4096)
PUBLIC_EXPONENT = 65537
SESSION_KEY_LEN = 32
ENVELOPE_MAGIC = b"MLEN"
PUBLIC_KEY_MAGIC = b"MLPK"
PRIVATE_KEY_MAGIC = b"MLSK"
ENVELOPE_VERSION = 1

_MIN_WRAP_BITS = 512  # wrap padding needs the headroom of a >=64-byte modulus


@dataclass(frozen=True)
class PublicKey:
    e: Natural
    n: Natural


@dataclass(frozen=True)
class PrivateKey:
    d: Natural
    n: Natural


@dataclass(frozen=True)
class KeyPair:
    """Generated pair plus provenance: bit length and the seed tag used."""

    public: PublicKey
    private: PrivateKey
    bits: int
    seed_id: str


def modulus_bytes(n: Natural) -> int:
    return (n.bit_length() + 7) // 8


def _gen_prime_top2(bits: int, rng: Rng) -> Natural:
    # Top two bits set guarantees p*q reaches the full requested length.
    while True:
        x = int(rng.next_bits(bits))
        x |= (0b11 << (bits - 2)) | 1
        cand = Natural(x)
        if mpa.is_probable_prime(cand, 40, rng):
            return cand


def keygen(bits: int, rng: Rng) -> KeyPair:
    """Generate an RSA key pair of exactly `bits` modulus bits."""
    if bits not in ALLOWED_KEY_BITS:
        raise ValueError(f"key size must be one of {ALLOWED_KEY_BITS}, got {bits}")
    e = Natural(PUBLIC_EXPONENT)
    half = bits // 2
    # gcd(e, phi) = 1 iff e divides neither p-1 nor q-1, so retry each prime
    # on its own; retrying only q could never fix a bad p.
    p = _gen_prime_top2(half, rng)
    while mpa.gcd(e, p - 1) != mpa.ONE:
        p = _gen_prime_top2(half, rng)
    q = _gen_prime_top2(half, rng)
    while q == p or mpa.gcd(e, q - 1) != mpa.ONE:
        q = _gen_prime_top2(half, rng)
    phi = (p - 1) * (q - 1)
    n = p * q
    d = mpa.mod_inverse(e, phi)
    if (e * d) % phi != mpa.ONE:
        raise AssertionError("key generation self-check failed")
    if n.bit_length() != bits:
        raise AssertionError("modulus did not reach the requested length")
    return KeyPair(
        public=PublicKey(e=e, n=n),
        private=PrivateKey(d=d, n=n),
        bits=bits,
        seed_id=rng.seed_id,
    )


def rsa_encrypt_raw(p: Natural, pub: PublicKey) -> Natural:
    """c = p^e mod n; requires p < n."""
    p = Natural(p)
    if p >= pub.n:
        raise ValueError("plaintext value must be smaller than the modulus")
    return mpa.mod_pow(p, pub.e, pub.n)


def rsa_decrypt_raw(c: Natural, pri: PrivateKey) -> Natural:
    """p = c^d mod n; requires c < n."""
    c = Natural(c)
    if c >= pri.n:
        raise ValueError("ciphertext value must be smaller than the modulus")
    return mpa.mod_pow(c, pri.d, pri.n)


# ---------------------------------------------------------------------------
# Key serialization
# ---------------------------------------------------------------------------

def _encode_number(n: Natural) -> bytes:
    raw = n.to_bytes_be()
    return struct.pack(">I", len(raw)) + raw


def _decode_number(data: bytes, pos: int) -> tuple[Natural, int]:
    if pos + 4 > len(data):
        raise ValueError("truncated key encoding")
    (length,) = struct.unpack_from(">I", data, pos)
    pos += 4
    if pos + length > len(data):
        raise ValueError("truncated key encoding")
    return Natural.from_bytes_be(data[pos:pos + length]), pos + length


def encode_public_key(pub: PublicKey) -> bytes:
    return (
        PUBLIC_KEY_MAGIC
        + struct.pack(">I", pub.n.bit_length())
        + _encode_number(pub.e)
        + _encode_number(pub.n)
    )


def encode_private_key(pri: PrivateKey) -> bytes:
    return (
        PRIVATE_KEY_MAGIC
        + struct.pack(">I", pri.n.bit_length())
        + _encode_number(pri.d)
        + _encode_number(pri.n)
    )


def _decode_key(data: bytes, magic: bytes):
    if len(data) < 8 or data[:4] != magic:
        raise ValueError(f"not a {magic.decode()} key encoding")
    (bits,) = struct.unpack_from(">I", data, 4)
    x, pos = _decode_number(data, 8)
    n, pos = _decode_number(data, pos)
    if pos != len(data):
        raise ValueError("trailing bytes after key encoding")
    if n.bit_length() != bits:
        raise ValueError("key encoding bit length does not match modulus")
    return x, n


def decode_public_key(data: bytes) -> PublicKey:
    e, n = _decode_key(data, PUBLIC_KEY_MAGIC)
    return PublicKey(e=e, n=n)


def decode_private_key(data: bytes) -> PrivateKey:
    d, n = _decode_key(data, PRIVATE_KEY_MAGIC)
    return PrivateKey(d=d, n=n)


def key_fingerprint(pub: PublicKey) -> bytes:
    """SHA-256 of the public key's serialized form."""
    return hashlib.sha256(encode_public_key(pub)).digest()


# ---------------------------------------------------------------------------
# Session-key wrapping
# ---------------------------------------------------------------------------

def wrap_session_key(session_key: bytes, pub: PublicKey, rng: Rng) -> bytes:
    """RSA-encrypt a 32-byte session key into one modulus-sized block.

    The block is 0x00 | 0x02 | nonzero random filler | 0x00 | key, so the
    numeric value is always below the modulus and a decryption under the
    wrong key is detected by the structure check in unwrap.
    """
    if len(session_key) != SESSION_KEY_LEN:
        raise ValueError(f"session key must be {SESSION_KEY_LEN} bytes")
    if pub.n.bit_length() < _MIN_WRAP_BITS:
        raise ValueError(f"wrapping needs a modulus of at least {_MIN_WRAP_BITS} bits")
    k = modulus_bytes(pub.n)
    fill_len = k - 3 - SESSION_KEY_LEN
    filler = bytearray()
    while len(filler) < fill_len:
        filler += bytes(b for b in rng.next_bytes(fill_len - len(filler)) if b)
    block = b"\x00\x02" + bytes(filler) + b"\x00" + session_key
    c = rsa_encrypt_raw(Natural.from_bytes_be(block), pub)
    return c.to_bytes_be(k)


def unwrap_session_key(wrapped: bytes, pri: PrivateKey) -> bytes:
    """Recover the session key; any structural mismatch raises UnwrapError."""
    k = modulus_bytes(pri.n)
    if len(wrapped) != k:
        raise UnwrapError(f"wrapped key must be exactly {k} bytes")
    try:
        m = rsa_decrypt_raw(Natural.from_bytes_be(wrapped), pri)
    except ValueError as exc:
        raise UnwrapError(str(exc)) from None
    block = m.to_bytes_be(k)
    fill_end = k - 1 - SESSION_KEY_LEN
    if (
        block[0] != 0x00
        or block[1] != 0x02
        or block[fill_end] != 0x00
        or 0 in block[2:fill_end]
    ):
        raise UnwrapError("wrapped key block structure is invalid")
    return block[fill_end + 1:]


# ---------------------------------------------------------------------------
# Hybrid envelope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    version: int
    fingerprint: bytes     # receiver public key fingerprint, 32 bytes
    wrapped_key: bytes     # RSA-wrapped session key, one modulus block
    iv: bytes              # CBC initialization vector, 16 bytes
    ciphertext: bytes      # Twofish-CBC bulk ciphertext
    digest: bytes          # SHA-256 of the plaintext, 32 bytes

    def to_bytes(self) -> bytes:
        return b"".join((
            ENVELOPE_MAGIC,
            bytes([self.version]),
            self.fingerprint,
            struct.pack(">I", len(self.wrapped_key)),
            self.wrapped_key,
            self.iv,
            struct.pack(">Q", len(self.ciphertext)),
            self.ciphertext,
            self.digest,
        ))

    @classmethod
    def from_bytes(cls, data: bytes) -> "Envelope":
        """Strict parse; any structural problem raises EnvelopeFormatError."""
        try:
            if data[:4] != ENVELOPE_MAGIC:
                raise EnvelopeFormatError("bad envelope magic")
            version = data[4]
            if version != ENVELOPE_VERSION:
                raise EnvelopeFormatError(f"unsupported envelope version {version}")
            pos = 5
            fingerprint = data[pos:pos + 32]
            if len(fingerprint) != 32:
                raise EnvelopeFormatError("truncated fingerprint")
            pos += 32
            (e2_len,) = struct.unpack_from(">I", data, pos)
            pos += 4
            wrapped = data[pos:pos + e2_len]
            if len(wrapped) != e2_len:
                raise EnvelopeFormatError("truncated wrapped key")
            pos += e2_len
            iv = data[pos:pos + 16]
            if len(iv) != 16:
                raise EnvelopeFormatError("truncated iv")
            pos += 16
            (e1_len,) = struct.unpack_from(">Q", data, pos)
            pos += 8
            ciphertext = data[pos:pos + e1_len]
            if len(ciphertext) != e1_len:
                raise EnvelopeFormatError("truncated ciphertext")
            pos += e1_len
            digest = data[pos:pos + 32]
            if len(digest) != 32:
                raise EnvelopeFormatError("truncated digest")
            pos += 32
            if pos != len(data):
                raise EnvelopeFormatError("trailing bytes after envelope")
        except (struct.error, IndexError):
            raise EnvelopeFormatError("truncated envelope header") from None
        return cls(
            version=version,
            fingerprint=fingerprint,
            wrapped_key=wrapped,
            iv=iv,
            ciphertext=ciphertext,
            digest=digest,
        )


def hybrid_encrypt(data: bytes, receiver_pub: PublicKey, rng: Rng) -> Envelope:
    """Encrypt `data` for the holder of `receiver_pub`.

    A fresh 32-byte session key and IV are drawn per call, so encrypting the
    same plaintext twice never repeats ciphertext or wrapped-key bytes.
    """
    if not data:
        raise ValueError("refusing to encrypt empty data")
    session_key = rng.next_bytes(SESSION_KEY_LEN)
    iv = rng.next_bytes(twofish.BLOCK_SIZE)
    ciphertext = twofish.cbc_encrypt(session_key, iv, data)
    wrapped = wrap_session_key(session_key, receiver_pub, rng)
    return Envelope(
        version=ENVELOPE_VERSION,
        fingerprint=key_fingerprint(receiver_pub),
        wrapped_key=wrapped,
        iv=iv,
        ciphertext=ciphertext,
        digest=hashlib.sha256(data).digest(),
    )


def hybrid_decrypt(
    env: Envelope,
    receiver_pri: PrivateKey,
    expected_fingerprint: bytes | None = None,
) -> bytes:
    """Open an envelope; returns the plaintext or raises a typed error.

    Wrong key material surfaces as UnwrapError; damaged ciphertext, IV or
    digest as IntegrityError.  When the caller knows its own public-key
    fingerprint, passing it pins the envelope header too.
    """
    if expected_fingerprint is not None and env.fingerprint != expected_fingerprint:
        raise IntegrityError("envelope fingerprint does not match receiver key")
    session_key = unwrap_session_key(env.wrapped_key, receiver_pri)
    data = twofish.cbc_decrypt(session_key, env.iv, env.ciphertext)
    if hashlib.sha256(data).digest() != env.digest:
        raise IntegrityError("plaintext digest mismatch")
    return data
