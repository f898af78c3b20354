"""Error taxonomy shared across the whole stack.

Every failure surfaced by this package is a CasError subclass so callers
(and the CLI exit-code mapping) can dispatch on type instead of message
text.
"""


class CasError(Exception):
    """Base class for all errors raised by this package."""


# --- credential layer -------------------------------------------------------

class InvalidInterval(CasError):
    """A validity interval with not_before > not_after."""


class EmptyIntersection(CasError):
    """The intersection of the chain's validity intervals is empty."""


class MalformedChain(CasError):
    """A certificate chain violating a structural invariant."""


class BadSignature(CasError):
    """A proxy certificate whose signature does not verify."""


class UntrustedRoot(CasError):
    """The first certificate is not signed by any trust-store key."""


class Expired(CasError):
    """The verification time lies outside the effective validity."""


class RestrictionRefused(CasError):
    """A restricted chain presented to an unwilling verifier."""


class UnknownPolicyLanguage(CasError):
    """A restriction in a language the verifier cannot evaluate."""


# --- encodings ---------------------------------------------------------------

class ParseError(CasError):
    """Malformed input to one of the canonical text decoders."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateField(ParseError):
    pass


class MissingField(ParseError):
    pass


class UnsupportedLanguage(ParseError):
    """A policy document in a language this build does not speak."""


# --- community database and administration -----------------------------------

class UnknownActor(CasError):
    """Admin request from an identity that is neither enrolled nor bootstrap."""


class NotAuthorized(CasError):
    pass


class DuplicateName(CasError):
    pass


class UnknownName(CasError):
    pass


class InvariantViolation(CasError):
    """A mutation or snapshot that would break a database invariant."""


# --- capability issuance -------------------------------------------------------

class Denied(CasError):
    """The request intersected with held rights grants nothing."""


class NotEnrolled(CasError):
    pass


class RestrictedAuthRefused(CasError):
    """Capability or admin requests must use an unrestricted credential."""


# --- file service ---------------------------------------------------------------

class NotFound(CasError):
    pass


class IsDirectory(CasError):
    pass


class NotDirectory(CasError):
    pass


class PathEscape(CasError):
    """Path normalization rejected an object name (traversal attempt)."""


class IoError(CasError):
    """Operating-system level failure while touching the virtual root."""


# --- transport -------------------------------------------------------------------

class TransportError(CasError):
    pass


class HandshakeError(CasError):
    pass


class ProtocolError(CasError):
    """A frame that does not parse or a reply of an unexpected type."""
