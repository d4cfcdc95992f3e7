"""Certificate authority and role-based permission layer.

Principals are registered by the CA, which generates their RSA key pair,
hands the private half back exactly once, and keeps only the id, role and
public-key fingerprint.  Access decisions come from a total matrix over
(role, action, data relation): reading or writing your own records is
always free, touching someone else's records needs an unexpired grant, and
a medical institution reading third-party data may alternatively invoke
the emergency override.  Every decision is appended to an audit log.

State persists as human-readable text tables (one principal or grant per
line) plus an append-only audit file, all inside the directory the stores
are bound to; in-memory operation (root=None) is supported for tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import rsa
from .errors import PermissionDenied, StorageError, UnknownPrincipalError
from .ledger import base_record_id
from .mpa import Rng


class Role(str, Enum):
    PATIENT = "patient"
    MEDICAL_INSTITUTION = "medical-institution"
    THIRD_PARTY = "third-party"
    CA = "ca"


class Action(str, Enum):
    READ = "read"
    WRITE = "write"


class Relation(Enum):
    OWN = "own"
    THIRD_PARTY_DATA = "third-party-data"


class Requirement(Enum):
    NO_PERMISSION_NEEDED = "no-permission-needed"
    NEED_GRANT = "need-grant"
    NEED_GRANT_OR_EMERGENCY = "need-grant-or-emergency"


def _build_matrix() -> dict[tuple[Role, Action, Relation], Requirement]:
    matrix = {}
    for role in Role:
        for action in Action:
            # Everyone may read and write their own records.
            matrix[(role, action, Relation.OWN)] = Requirement.NO_PERMISSION_NEEDED
            # Third-party data always needs a grant...
            matrix[(role, action, Relation.THIRD_PARTY_DATA)] = Requirement.NEED_GRANT
    # ...except that a medical institution may read it in an emergency.
    matrix[(Role.MEDICAL_INSTITUTION, Action.READ, Relation.THIRD_PARTY_DATA)] = (
        Requirement.NEED_GRANT_OR_EMERGENCY
    )
    return matrix


#: Total over every (role, action, relation) combination.
PERMISSION_MATRIX = _build_matrix()


@dataclass(frozen=True)
class Principal:
    principal_id: str
    role: Role
    fingerprint: bytes


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str


@dataclass(frozen=True)
class Grant:
    grantee_id: str
    record_id: str
    action: Action
    expires_at_ms: int | None   # None = never expires
    granter_id: str


def _now_ms() -> int:
    return int(time.time() * 1000)


class CertificateAuthority:
    """Registry of principals; issues key pairs and remembers fingerprints.

    The private key is returned to the caller and never stored.
    """

    def __init__(self, root: str | Path | None = None):
        self._root = Path(root) if root is not None else None
        self._principals: dict[str, Principal] = {}
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
            self._load()

    @property
    def _principals_path(self) -> Path:
        assert self._root is not None
        return self._root / "principals.txt"

    def _load(self) -> None:
        if not self._principals_path.exists():
            return
        for line in self._principals_path.read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            pid, role, fp_hex = line.split("\t")
            self._principals[pid] = Principal(
                principal_id=pid, role=Role(role), fingerprint=bytes.fromhex(fp_hex)
            )

    def _save(self) -> None:
        if self._root is None:
            return
        lines = ["# principal_id\trole\tfingerprint\n"]
        for p in self._principals.values():
            lines.append(f"{p.principal_id}\t{p.role.value}\t{p.fingerprint.hex()}\n")
        try:
            self._principals_path.write_text("".join(lines), encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"cannot persist principals: {exc}") from exc

    def issue_keypair(
        self, principal_id: str, role: Role, bits: int, rng: Rng
    ) -> tuple[Principal, rsa.KeyPair]:
        """Register a new principal and generate their key pair."""
        if not principal_id or "\t" in principal_id or "\n" in principal_id:
            raise ValueError("principal id must be non-empty and tab/newline free")
        if principal_id in self._principals:
            raise ValueError(f"principal {principal_id!r} is already registered")
        pair = rsa.keygen(bits, rng)
        principal = Principal(
            principal_id=principal_id,
            role=Role(role),
            fingerprint=rsa.key_fingerprint(pair.public),
        )
        self._principals[principal_id] = principal
        self._save()
        return principal, pair

    def lookup(self, principal_id: str) -> Principal:
        try:
            return self._principals[principal_id]
        except KeyError:
            raise UnknownPrincipalError(
                f"principal {principal_id!r} is not registered"
            ) from None

    def is_registered(self, principal: Principal) -> bool:
        known = self._principals.get(principal.principal_id)
        return known is not None and known.fingerprint == principal.fingerprint

    @property
    def principals(self) -> tuple[Principal, ...]:
        return tuple(self._principals.values())


class PermissionPolicy:
    """Matrix evaluation plus grant bookkeeping and the audit trail."""

    def __init__(self, ca: CertificateAuthority, root: str | Path | None = None):
        self._ca = ca
        self._root = Path(root) if root is not None else None
        self._grants: list[Grant] = []
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
            self._load_grants()
        self._audit: list[str] = []

    # -- persistence --------------------------------------------------------

    @property
    def _grants_path(self) -> Path:
        assert self._root is not None
        return self._root / "grants.txt"

    @property
    def _audit_path(self) -> Path | None:
        return None if self._root is None else self._root / "audit.log"

    def _load_grants(self) -> None:
        if not self._grants_path.exists():
            return
        for line in self._grants_path.read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            grantee, record, action, expiry, granter = line.split("\t")
            self._grants.append(Grant(
                grantee_id=grantee,
                record_id=record,
                action=Action(action),
                expires_at_ms=None if expiry == "-" else int(expiry),
                granter_id=granter,
            ))

    def _save_grants(self) -> None:
        if self._root is None:
            return
        lines = ["# grantee\trecord\taction\texpires_at_ms\tgranter\n"]
        for g in self._grants:
            expiry = "-" if g.expires_at_ms is None else str(g.expires_at_ms)
            lines.append(
                f"{g.grantee_id}\t{g.record_id}\t{g.action.value}\t{expiry}"
                f"\t{g.granter_id}\n"
            )
        try:
            self._grants_path.write_text("".join(lines), encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"cannot persist grants: {exc}") from exc

    def _audit_append(self, line: str) -> None:
        self._audit.append(line)
        if self._audit_path is not None:
            try:
                with open(self._audit_path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
            except OSError:
                pass  # auditing must never block the decision itself

    @property
    def audit_entries(self) -> tuple[str, ...]:
        return tuple(self._audit)

    @property
    def grants(self) -> tuple[Grant, ...]:
        return tuple(self._grants)

    # -- decisions ----------------------------------------------------------

    def _has_grant(
        self, grantee_id: str, record_id: str | None, action: Action, now_ms: int
    ) -> bool:
        if record_id is None:
            return False
        # Grants cover the logical record: version suffixes added by the
        # chain do not require re-granting.
        base = base_record_id(record_id)
        for g in self._grants:
            if g.grantee_id != grantee_id or g.action != action:
                continue
            if base_record_id(g.record_id) != base:
                continue
            if g.expires_at_ms is not None and now_ms >= g.expires_at_ms:
                continue
            return True
        return False

    def check_permission(
        self,
        requester: Principal,
        action: Action,
        record_owner_id: str,
        *,
        record_id: str | None = None,
        emergency: bool = False,
        now_ms: int | None = None,
    ) -> Decision:
        """Evaluate the matrix for one request and audit the outcome.

        Grants are matched by (grantee, record id, action) and must be
        unexpired at `now_ms` (wall clock when omitted).
        """
        now = _now_ms() if now_ms is None else now_ms
        action = Action(action)
        if not self._ca.is_registered(requester):
            decision = Decision(False, "requester is not registered")
        else:
            relation = (
                Relation.OWN
                if requester.principal_id == record_owner_id
                else Relation.THIRD_PARTY_DATA
            )
            need = PERMISSION_MATRIX[(requester.role, action, relation)]
            if need is Requirement.NO_PERMISSION_NEEDED:
                decision = Decision(True, "own data")
            elif emergency and need is Requirement.NEED_GRANT_OR_EMERGENCY:
                decision = Decision(True, "emergency override")
            elif self._has_grant(requester.principal_id, record_id, action, now):
                decision = Decision(True, "grant")
            elif emergency:
                decision = Decision(
                    False, "emergency override does not apply to this request"
                )
            else:
                decision = Decision(False, "no unexpired grant")
        self._audit_append(
            f"{now}\t{requester.principal_id}\t{action.value}\t{record_owner_id}"
            f"\t{record_id or '-'}\t{'allow' if decision.allowed else 'deny'}"
            f"\t{decision.reason}"
        )
        return decision

    # -- grant lifecycle ----------------------------------------------------

    def grant(
        self,
        granter: Principal,
        grantee_id: str,
        record_id: str,
        action: Action,
        *,
        record_owner_id: str,
        ttl_ms: int | None = None,
        now_ms: int | None = None,
    ) -> Grant:
        """Record a grant; only the record owner or the CA may issue one."""
        if granter.principal_id != record_owner_id and granter.role is not Role.CA:
            raise PermissionDenied(
                f"{granter.principal_id!r} is neither the owner of {record_id!r} "
                "nor the CA"
            )
        now = _now_ms() if now_ms is None else now_ms
        expires = None if ttl_ms is None else now + ttl_ms
        g = Grant(
            grantee_id=grantee_id,
            record_id=record_id,
            action=Action(action),
            expires_at_ms=expires,
            granter_id=granter.principal_id,
        )
        self._grants.append(g)
        self._save_grants()
        self._audit_append(
            f"{now}\t{granter.principal_id}\tgrant\t{grantee_id}\t{record_id}"
            f"\t{g.action.value}\t{'-' if expires is None else expires}"
        )
        return g

    def revoke(self, granter: Principal, grant: Grant) -> None:
        """Remove a grant immediately; allowed to its issuer or the CA."""
        if granter.principal_id != grant.granter_id and granter.role is not Role.CA:
            raise PermissionDenied(
                f"{granter.principal_id!r} may not revoke a grant issued by "
                f"{grant.granter_id!r}"
            )
        try:
            self._grants.remove(grant)
        except ValueError:
            raise PermissionDenied("no such grant to revoke") from None
        self._save_grants()
        self._audit_append(
            f"{_now_ms()}\t{granter.principal_id}\trevoke\t{grant.grantee_id}"
            f"\t{grant.record_id}\t{grant.action.value}\t-"
        )
