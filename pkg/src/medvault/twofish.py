"""Twofish block cipher with a CBC/PKCS#7 file mode.

128-bit blocks, 16 Feistel-style rounds, key-dependent S-boxes and an MDS
diffusion matrix over GF(2^8).  Keys of 16, 24 or 32 bytes are accepted;
every other length is rejected.  Words are little-endian throughout, which
is what the published test vectors assume.

The key schedule precomputes four 256-entry tables that fuse the S-box
ladder with one MDS column each, so the round function is four table
lookups and a few adds per g() evaluation.
"""

from __future__ import annotations

import struct

from .errors import IntegrityError

BLOCK_SIZE = 16
KEY_SIZES = (16, 24, 32)

_M32 = 0xFFFFFFFF
_MDS_POLY = 0x169   # x^8 + x^6 + x^5 + x^3 + 1
_RS_POLY = 0x14D    # x^8 + x^6 + x^3 + x^2 + 1
_RHO = 0x01010101

# 4-bit permutation ladders that build the fixed permutations q0 and q1.
_Q0_NIBBLES = (
    (0x8, 0x1, 0x7, 0xD, 0x6, 0xF, 0x3, 0x2, 0x0, 0xB, 0x5, 0x9, 0xE, 0xC, 0xA, 0x4),
    (0xE, 0xC, 0xB, 0x8, 0x1, 0x2, 0x3, 0x5, 0xF, 0x4, 0xA, 0x6, 0x7, 0x0, 0x9, 0xD),
    (0xB, 0xA, 0x5, 0xE, 0x6, 0xD, 0x9, 0x0, 0xC, 0x8, 0xF, 0x3, 0x2, 0x4, 0x7, 0x1),
    (0xD, 0x7, 0xF, 0x4, 0x1, 0x2, 0x6, 0xE, 0x9, 0xB, 0x3, 0x0, 0x8, 0x5, 0xC, 0xA),
)
_Q1_NIBBLES = (
    (0x2, 0x8, 0xB, 0xD, 0xF, 0x7, 0x6, 0xE, 0x3, 0x1, 0x9, 0x4, 0x0, 0xA, 0xC, 0x5),
    (0x1, 0xE, 0x2, 0xB, 0x4, 0xC, 0x3, 0x7, 0x6, 0xD, 0xA, 0x5, 0xF, 0x9, 0x0, 0x8),
    (0x4, 0xC, 0x7, 0x5, 0x1, 0x6, 0x9, 0xA, 0x0, 0xE, 0xD, 0x8, 0x2, 0xB, 0x3, 0xF),
    (0xB, 0x9, 0x5, 0x1, 0xC, 0x3, 0xD, 0xE, 0x6, 0x4, 0x7, 0xF, 0x2, 0x0, 0x8, 0xA),
)

_MDS = (
    (0x01, 0xEF, 0x5B, 0x5B),
    (0x5B, 0xEF, 0xEF, 0x01),
    (0xEF, 0x5B, 0x01, 0xEF),
    (0xEF, 0x01, 0xEF, 0x5B),
)
_RS = (
    (0x01, 0xA4, 0x55, 0x87, 0x5A, 0x58, 0xDB, 0x9E),
    (0xA4, 0x56, 0x82, 0xF3, 0x1E, 0xC6, 0x68, 0xE5),
    (0x02, 0xA1, 0xFC, 0xC1, 0x47, 0xAE, 0x3D, 0x19),
    (0xA4, 0x55, 0x87, 0x5A, 0x58, 0xDB, 0x9E, 0x03),
)

# q-table selection per byte lane, in application order: the two optional
# long-key stages first, then the three fixed stages (innermost first).
_LANE_Q = (
    (1, 1, 0, 0, 1),
    (0, 1, 1, 0, 0),
    (0, 0, 0, 1, 1),
    (1, 0, 1, 1, 0),
)


def _gf_mul(a: int, b: int, poly: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= poly
    return r


def _build_q(tables) -> tuple[int, ...]:
    t0, t1, t2, t3 = tables
    q = []
    for x in range(256):
        a, b = x >> 4, x & 0xF
        a1 = a ^ b
        b1 = (a ^ ((b >> 1) | ((b & 1) << 3)) ^ (8 * a)) & 0xF
        a2, b2 = t0[a1], t1[b1]
        a3 = a2 ^ b2
        b3 = (a2 ^ ((b2 >> 1) | ((b2 & 1) << 3)) ^ (8 * a2)) & 0xF
        q.append((t3[b3] << 4) | t2[a3])
    return tuple(q)


_Q = (_build_q(_Q0_NIBBLES), _build_q(_Q1_NIBBLES))

# _MDS_COL[c][v] is the 32-bit contribution of byte value v in column c.
_MDS_COL = tuple(
    tuple(
        _gf_mul(_MDS[0][c], v, _MDS_POLY)
        | (_gf_mul(_MDS[1][c], v, _MDS_POLY) << 8)
        | (_gf_mul(_MDS[2][c], v, _MDS_POLY) << 16)
        | (_gf_mul(_MDS[3][c], v, _MDS_POLY) << 24)
        for v in range(256)
    )
    for c in range(4)
)


def pht(p: int, q: int) -> tuple[int, int]:
    """Pseudo-Hadamard transform on two 32-bit words, mod 2^32."""
    return (p + q) & _M32, (p + 2 * q) & _M32


def _rol32(x: int, r: int) -> int:
    return ((x << r) | (x >> (32 - r))) & _M32


def _ror32(x: int, r: int) -> int:
    return ((x >> r) | (x << (32 - r))) & _M32


def _lane_byte(lane: int, x: int, words) -> int:
    k = len(words)
    seq = _LANE_Q[lane]
    shift = 8 * lane
    v = x
    if k == 4:
        v = _Q[seq[0]][v] ^ ((words[3] >> shift) & 0xFF)
    if k >= 3:
        v = _Q[seq[1]][v] ^ ((words[2] >> shift) & 0xFF)
    v = _Q[seq[2]][v] ^ ((words[1] >> shift) & 0xFF)
    v = _Q[seq[3]][v] ^ ((words[0] >> shift) & 0xFF)
    return _Q[seq[4]][v]


def _h_word(x: int, words) -> int:
    y0 = _lane_byte(0, x & 0xFF, words)
    y1 = _lane_byte(1, (x >> 8) & 0xFF, words)
    y2 = _lane_byte(2, (x >> 16) & 0xFF, words)
    y3 = _lane_byte(3, (x >> 24) & 0xFF, words)
    return _MDS_COL[0][y0] ^ _MDS_COL[1][y1] ^ _MDS_COL[2][y2] ^ _MDS_COL[3][y3]


def g_function(x: int, sbox_words) -> int:
    """The key-dependent g permutation: S-box ladder plus MDS diffusion.

    `sbox_words` is the k-word S material derived from the key by the RS
    code; its length (2, 3 or 4) selects the ladder depth.
    """
    return _h_word(x & _M32, tuple(sbox_words))


class TwofishKeySchedule:
    """Expanded key: 40 round words plus fused S-box/MDS lookup tables."""

    __slots__ = ("round_keys", "sbox_words", "key_len", "_g0", "_g1", "_g2", "_g3")

    def __init__(self, round_keys, sbox_words, key_len):
        self.round_keys = tuple(round_keys)
        self.sbox_words = tuple(sbox_words)
        self.key_len = key_len
        tables = []
        for lane in range(4):
            col = _MDS_COL[lane]
            tables.append(tuple(
                col[_lane_byte(lane, v, self.sbox_words)] for v in range(256)
            ))
        self._g0, self._g1, self._g2, self._g3 = tables

    def g(self, x: int) -> int:
        return (
            self._g0[x & 0xFF]
            ^ self._g1[(x >> 8) & 0xFF]
            ^ self._g2[(x >> 16) & 0xFF]
            ^ self._g3[x >> 24]
        )


def key_schedule(key: bytes) -> TwofishKeySchedule:
    """Expand a 16/24/32-byte key; any other length raises ValueError."""
    if not isinstance(key, (bytes, bytearray)):
        raise TypeError("key must be bytes")
    if len(key) not in KEY_SIZES:
        raise ValueError(
            f"key must be {KEY_SIZES[0]}, {KEY_SIZES[1]} or {KEY_SIZES[2]} bytes, "
            f"got {len(key)}"
        )
    key = bytes(key)
    k = len(key) // 8
    words = struct.unpack(f"<{2 * k}I", key)
    even = words[0::2]
    odd = words[1::2]

    # One S word per 8-byte key chunk via the RS code; used in reverse order.
    sbox_words = []
    for j in range(k):
        chunk = key[8 * j: 8 * j + 8]
        word = 0
        for row in range(4):
            acc = 0
            for col in range(8):
                acc ^= _gf_mul(_RS[row][col], chunk[col], _RS_POLY)
            word |= acc << (8 * row)
        sbox_words.append(word)
    sbox_words.reverse()

    round_keys = []
    for i in range(20):
        a = _h_word((2 * i * _RHO) & _M32, even)
        b = _rol32(_h_word(((2 * i + 1) * _RHO) & _M32, odd), 8)
        s, t = pht(a, b)
        round_keys.append(s)
        round_keys.append(_rol32(t, 9))

    return TwofishKeySchedule(round_keys, sbox_words, len(key))


def encrypt_block(ks: TwofishKeySchedule, block: bytes) -> bytes:
    if len(block) != BLOCK_SIZE:
        raise ValueError("block must be 16 bytes")
    keys = ks.round_keys
    g = ks.g
    r0, r1, r2, r3 = struct.unpack("<4I", block)
    r0 ^= keys[0]
    r1 ^= keys[1]
    r2 ^= keys[2]
    r3 ^= keys[3]
    for r in range(16):
        t0 = g(r0)
        t1 = g(((r1 << 8) | (r1 >> 24)) & _M32)
        f0 = (t0 + t1 + keys[8 + 2 * r]) & _M32
        f1 = (t0 + 2 * t1 + keys[9 + 2 * r]) & _M32
        r2 ^= f0
        r2 = ((r2 >> 1) | (r2 << 31)) & _M32
        r3 = (((r3 << 1) | (r3 >> 31)) & _M32) ^ f1
        r0, r1, r2, r3 = r2, r3, r0, r1
    r0, r1, r2, r3 = r2, r3, r0, r1
    return struct.pack(
        "<4I", r0 ^ keys[4], r1 ^ keys[5], r2 ^ keys[6], r3 ^ keys[7]
    )


def decrypt_block(ks: TwofishKeySchedule, block: bytes) -> bytes:
    if len(block) != BLOCK_SIZE:
        raise ValueError("block must be 16 bytes")
    keys = ks.round_keys
    g = ks.g
    r0, r1, r2, r3 = struct.unpack("<4I", block)
    r0 ^= keys[4]
    r1 ^= keys[5]
    r2 ^= keys[6]
    r3 ^= keys[7]
    for r in range(15, -1, -1):
        t0 = g(r0)
        t1 = g(((r1 << 8) | (r1 >> 24)) & _M32)
        f0 = (t0 + t1 + keys[8 + 2 * r]) & _M32
        f1 = (t0 + 2 * t1 + keys[9 + 2 * r]) & _M32
        r2 = (((r2 << 1) | (r2 >> 31)) & _M32) ^ f0
        r3 ^= f1
        r3 = ((r3 >> 1) | (r3 << 31)) & _M32
        r0, r1, r2, r3 = r2, r3, r0, r1
    r0, r1, r2, r3 = r2, r3, r0, r1
    return struct.pack(
        "<4I", r0 ^ keys[0], r1 ^ keys[1], r2 ^ keys[2], r3 ^ keys[3]
    )


# ---------------------------------------------------------------------------
# CBC mode with PKCS#7 padding
# ---------------------------------------------------------------------------

def _pkcs7_pad(data: bytes) -> bytes:
    pad = BLOCK_SIZE - len(data) % BLOCK_SIZE
    return data + bytes([pad]) * pad


def _pkcs7_unpad(data: bytes) -> bytes:
    if not data:
        raise IntegrityError("empty plaintext after decryption")
    pad = data[-1]
    if not 1 <= pad <= BLOCK_SIZE or data[-pad:] != bytes([pad]) * pad:
        raise IntegrityError("invalid block padding")
    return data[:-pad]


def cbc_encrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    """CBC-encrypt `data` (PKCS#7 padded, so output grows by 1..16 bytes)."""
    if len(iv) != BLOCK_SIZE:
        raise ValueError("iv must be 16 bytes")
    ks = key_schedule(key)
    padded = _pkcs7_pad(data)
    out = bytearray()
    prev = int.from_bytes(iv, "big")
    for i in range(0, len(padded), BLOCK_SIZE):
        x = int.from_bytes(padded[i:i + BLOCK_SIZE], "big") ^ prev
        ct = encrypt_block(ks, x.to_bytes(BLOCK_SIZE, "big"))
        out += ct
        prev = int.from_bytes(ct, "big")
    return bytes(out)


def cbc_decrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    """Inverse of cbc_encrypt; bad length or padding raises IntegrityError."""
    if len(iv) != BLOCK_SIZE:
        raise ValueError("iv must be 16 bytes")
    if not data or len(data) % BLOCK_SIZE:
        raise IntegrityError("ciphertext length is not a positive block multiple")
    ks = key_schedule(key)
    out = bytearray()
    prev = int.from_bytes(iv, "big")
    for i in range(0, len(data), BLOCK_SIZE):
        block = data[i:i + BLOCK_SIZE]
        pt = int.from_bytes(decrypt_block(ks, block), "big") ^ prev
        out += pt.to_bytes(BLOCK_SIZE, "big")
        prev = int.from_bytes(block, "big")
    return _pkcs7_unpad(bytes(out))
