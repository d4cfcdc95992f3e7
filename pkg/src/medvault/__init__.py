"""medvault: encrypted record vault with a tamper-evident chain.

Layers, bottom up: `mpa` (multiple-precision arithmetic on 64-bit limbs),
`twofish` (block cipher + CBC), `rsa` (key pairs, session-key wrap, hybrid
envelopes), `ledger` (hash-chained append-only store), `access` (CA and
permission matrix), `bench` (timing harness) and `cli`.
"""

from .access import (
    Action,
    CertificateAuthority,
    Decision,
    Grant,
    PermissionPolicy,
    Principal,
    Relation,
    Requirement,
    Role,
    PERMISSION_MATRIX,
)
from .bench import BenchReport, BenchRow, run_load_bench, run_size_bench
from .errors import (
    EnvelopeFormatError,
    IntegrityError,
    MedvaultError,
    PermissionDenied,
    RecordNotFound,
    StorageError,
    UnknownPrincipalError,
    UnwrapError,
)
from .ledger import Block, Chain, ChainValidation, sha256
from .mpa import Natural, NoInverseError, Rng, gcd, gen_prime, is_probable_prime, \
    mod_inverse, mod_pow
from .rsa import (
    Envelope,
    KeyPair,
    PrivateKey,
    PublicKey,
    hybrid_decrypt,
    hybrid_encrypt,
    key_fingerprint,
    keygen,
    unwrap_session_key,
    wrap_session_key,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BenchReport",
    "BenchRow",
    "Block",
    "CertificateAuthority",
    "Chain",
    "ChainValidation",
    "Decision",
    "Envelope",
    "EnvelopeFormatError",
    "Grant",
    "IntegrityError",
    "KeyPair",
    "MedvaultError",
    "Natural",
    "NoInverseError",
    "PERMISSION_MATRIX",
    "PermissionDenied",
    "PermissionPolicy",
    "Principal",
    "PrivateKey",
    "PublicKey",
    "RecordNotFound",
    "Relation",
    "Requirement",
    "Rng",
    "Role",
    "StorageError",
    "UnknownPrincipalError",
    "UnwrapError",
    "gcd",
    "gen_prime",
    "hybrid_decrypt",
    "hybrid_encrypt",
    "is_probable_prime",
    "key_fingerprint",
    "keygen",
    "mod_inverse",
    "mod_pow",
    "run_load_bench",
    "run_size_bench",
    "sha256",
    "unwrap_session_key",
    "wrap_session_key",
    "__version__",
]
