"""Shared exception types.

Every failure that callers are expected to handle maps to one of these
classes so the CLI can translate them into stable exit codes.
"""


class MedvaultError(Exception):
    """Base class for all package-specific errors."""


class IntegrityError(MedvaultError):
    """Stored or transmitted data failed a cryptographic integrity check."""


class EnvelopeFormatError(IntegrityError):
    """An envelope byte string does not parse as a well-formed envelope."""


class UnwrapError(MedvaultError):
    """A wrapped session key could not be recovered (wrong key or damage)."""


class PermissionDenied(MedvaultError):
    """An access-control decision denied the requested operation."""


class RecordNotFound(MedvaultError):
    """No chain block matches the requested record id."""


class UnknownPrincipalError(MedvaultError):
    """A principal id is not present in the certificate authority registry."""


class StorageError(MedvaultError):
    """A persistence operation failed; in-memory state was left unchanged."""
