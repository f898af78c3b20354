"""Certificate model and its canonical text encoding.

A certificate is encoded as UTF-8 ``key: value`` lines in a fixed order,
one linefeed after each line:

    serial: 7
    kind: proxy
    subject: cas.esg
    issuer: cas.esg
    subject-pk: <lowercase hex>
    not-before: 1000
    not-after: 2000
    policy-lang: cas-simple-v1      (restricted proxies only)
    policy-body: <lowercase hex>
    policy-critical: true
    proxy-group: cas-session-3      (optional)
    sig: <lowercase hex>

Everything up to and including the line before ``sig`` is the body; the
signature is computed over exactly those bytes, final linefeed included.
A chain file is certificates joined by a separator line ``----``.

Decoding is strict: the only accepted input is the canonical encoding, so
``encode(decode(data)) == data`` holds whenever decode succeeds.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DuplicateField, MissingField, ParseError

KIND_TRUST_ANCHOR = "trust-anchor"
KIND_IDENTITY = "identity"
KIND_PROXY = "proxy"
KINDS = (KIND_TRUST_ANCHOR, KIND_IDENTITY, KIND_PROXY)

CHAIN_SEPARATOR = "----"

_REQUIRED_KEYS = ("serial", "kind", "subject", "issuer", "subject-pk",
                  "not-before", "not-after")
_POLICY_KEYS = ("policy-lang", "policy-body", "policy-critical")
_ALL_KEYS = frozenset(_REQUIRED_KEYS) | frozenset(_POLICY_KEYS) | {"proxy-group", "sig"}


def _check_name(value: str, what: str) -> None:
    if not value:
        raise ValueError(f"{what} must be nonempty")
    if "\n" in value or "\r" in value:
        raise ValueError(f"{what} must not contain line breaks")


@dataclass(frozen=True)
class ValidityInterval:
    """Closed interval of whole seconds, UTC."""

    not_before: int
    not_after: int

    @property
    def is_empty(self) -> bool:
        return self.not_before > self.not_after

    def contains(self, t: int) -> bool:
        return self.not_before <= t <= self.not_after

    def intersect(self, other: "ValidityInterval") -> "ValidityInterval":
        return ValidityInterval(max(self.not_before, other.not_before),
                                min(self.not_after, other.not_after))


@dataclass(frozen=True)
class RestrictionPolicy:
    """An opaque policy body plus the tag naming its language.

    Restrictions are always critical: a verifier that cannot evaluate the
    body must reject the whole chain.
    """

    language_tag: str
    body: bytes
    critical: bool = True

    def __post_init__(self):
        tag = self.language_tag
        if not tag or not tag.isascii() or any(c.isspace() for c in tag):
            raise ValueError("language tag must be nonempty ASCII without whitespace")
        if not self.critical:
            raise ValueError("restrictions are always critical")


@dataclass(frozen=True)
class Certificate:
    serial: int
    subject_name: str
    issuer_name: str
    subject_public_key: bytes
    validity: ValidityInterval
    kind: str
    restriction: RestrictionPolicy | None = None
    proxy_group: str | None = None
    signature: bytes = b""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.serial < 0:
            raise ValueError("serial must be nonnegative")
        _check_name(self.subject_name, "subject name")
        _check_name(self.issuer_name, "issuer name")
        if not self.subject_public_key:
            raise ValueError("subject public key must be nonempty")
        if self.proxy_group is not None:
            pg = self.proxy_group
            if not pg or any(c.isspace() for c in pg):
                raise ValueError("proxy group must be a nonempty token")


@dataclass(frozen=True)
class CertificateChain:
    """Ordered certificates: position 0 the identity, the rest proxies."""

    certs: tuple[Certificate, ...]

    def __post_init__(self):
        if not self.certs:
            raise ValueError("a chain holds at least one certificate")
        object.__setattr__(self, "certs", tuple(self.certs))

    @property
    def leaf(self) -> Certificate:
        return self.certs[-1]

    def extended(self, cert: Certificate) -> "CertificateChain":
        return CertificateChain(self.certs + (cert,))


# --- encoding ----------------------------------------------------------------

def certificate_body(cert: Certificate) -> bytes:
    """The canonical body bytes, i.e. what gets signed."""
    lines = [
        f"serial: {cert.serial}",
        f"kind: {cert.kind}",
        f"subject: {cert.subject_name}",
        f"issuer: {cert.issuer_name}",
        f"subject-pk: {cert.subject_public_key.hex()}",
        f"not-before: {cert.validity.not_before}",
        f"not-after: {cert.validity.not_after}",
    ]
    if cert.restriction is not None:
        lines.append(f"policy-lang: {cert.restriction.language_tag}")
        lines.append(f"policy-body: {cert.restriction.body.hex()}")
        lines.append("policy-critical: true")
    if cert.proxy_group is not None:
        lines.append(f"proxy-group: {cert.proxy_group}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def encode_certificate(cert: Certificate) -> bytes:
    return certificate_body(cert) + f"sig: {cert.signature.hex()}\n".encode("utf-8")


def _split_fields(lines: list[str], offset: int = 0) -> dict[str, str]:
    fields: dict[str, str] = {}
    for i, line in enumerate(lines, 1 + offset):
        key, sep, value = line.partition(": ")
        if not sep or not key:
            raise ParseError(f"expected 'key: value', got {line!r}", line=i)
        if key in fields:
            raise DuplicateField(f"duplicate field {key!r}", line=i)
        fields[key] = value
    return fields


def _int_field(fields: dict[str, str], key: str) -> int:
    try:
        return int(fields[key], 10)
    except ValueError:
        raise ParseError(f"field {key!r} is not a decimal integer") from None


def _hex_field(fields: dict[str, str], key: str) -> bytes:
    try:
        return bytes.fromhex(fields[key])
    except ValueError:
        raise ParseError(f"field {key!r} is not valid hex") from None


def _certificate_from_lines(lines: list[str], offset: int = 0) -> Certificate:
    fields = _split_fields(lines, offset)
    for key in fields:
        if key not in _ALL_KEYS:
            raise ParseError(f"unknown field {key!r}")
    for key in _REQUIRED_KEYS + ("sig",):
        if key not in fields:
            raise MissingField(f"missing field {key!r}")

    policy_present = [k for k in _POLICY_KEYS if k in fields]
    restriction = None
    if policy_present:
        for key in _POLICY_KEYS:
            if key not in fields:
                raise MissingField(f"missing field {key!r}")
        if fields["policy-critical"] != "true":
            raise ParseError("policy-critical must be 'true'")
        try:
            restriction = RestrictionPolicy(fields["policy-lang"],
                                            _hex_field(fields, "policy-body"))
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    kind = fields["kind"]
    if kind not in KINDS:
        raise ParseError(f"unknown certificate kind {kind!r}")
    serial = _int_field(fields, "serial")
    if serial < 0:
        raise ParseError("serial must be nonnegative")

    try:
        return Certificate(
            serial=serial,
            subject_name=fields["subject"],
            issuer_name=fields["issuer"],
            subject_public_key=_hex_field(fields, "subject-pk"),
            validity=ValidityInterval(_int_field(fields, "not-before"),
                                      _int_field(fields, "not-after")),
            kind=kind,
            restriction=restriction,
            proxy_group=fields.get("proxy-group"),
            signature=_hex_field(fields, "sig"),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def decode_certificate(data: bytes) -> Certificate:
    """Decode one canonically encoded certificate.

    Raises ParseError (or its DuplicateField/MissingField refinements) on
    anything that is not the exact canonical form.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    if not text.endswith("\n"):
        raise ParseError("missing final linefeed")
    cert = _certificate_from_lines(text.split("\n")[:-1])
    if encode_certificate(cert) != data:
        raise ParseError("input is not in canonical field order")
    return cert


def encode_certificates(certs) -> bytes:
    """Encode several certificates into one chain-format file."""
    parts = [encode_certificate(c) for c in certs]
    return (CHAIN_SEPARATOR + "\n").encode("utf-8").join(parts)


def decode_certificates(data: bytes) -> list[Certificate]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    if not text.endswith("\n"):
        raise ParseError("missing final linefeed")
    certs: list[Certificate] = []
    group: list[str] = []
    group_start = 0

    def finish() -> None:
        cert = _certificate_from_lines(group, group_start)
        if encode_certificate(cert) != ("\n".join(group) + "\n").encode("utf-8"):
            raise ParseError("certificate is not in canonical field order")
        certs.append(cert)

    lines = text.split("\n")[:-1]
    for i, line in enumerate(lines):
        if line == CHAIN_SEPARATOR:
            if not group:
                raise ParseError("empty certificate before separator", line=i + 1)
            finish()
            group = []
            group_start = i + 1
        else:
            group.append(line)
    if not group:
        raise ParseError("empty certificate file" if not certs else "trailing separator")
    finish()
    return certs


def encode_chain(chain: CertificateChain) -> bytes:
    return encode_certificates(chain.certs)


def decode_chain(data: bytes) -> CertificateChain:
    return CertificateChain(tuple(decode_certificates(data)))


# --- trust store files ---------------------------------------------------------

def save_trust_store(path, anchors) -> None:
    ordered = sorted(anchors, key=lambda c: (c.subject_name, c.serial))
    with open(path, "wb") as fh:
        fh.write(encode_certificates(ordered))


def load_trust_store(path) -> frozenset[Certificate]:
    with open(path, "rb") as fh:
        return frozenset(decode_certificates(fh.read()))
