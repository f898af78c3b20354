"""Grant table files: what this resource grants to which identities.

    grantor: cas.esg
    lang: cas-simple-v1
    right:
    object /esg/*
    action file:read
    action file:write
    ----
    grantor: CN=alice
    lang: cas-simple-v1
    ...

Blocks are separated by a ``----`` line; each block is a grantor line
followed by an embedded cas-simple-v1 policy text.
"""

from __future__ import annotations

from ..errors import IoError, ParseError
from ..policy.model import PolicyDocument
from ..policy.text import parse_policy, serialize_policy

_SEPARATOR = "----"
_GRANTOR_PREFIX = "grantor: "


def parse_grant_table(data: bytes) -> dict[str, PolicyDocument]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    if not text:
        return {}
    if not text.endswith("\n"):
        raise ParseError("missing final linefeed")
    table: dict[str, PolicyDocument] = {}
    block: list[str] = []
    block_start = 1

    def finish(end_line: int) -> None:
        if not block:
            raise ParseError("empty grant block", line=end_line)
        if not block[0].startswith(_GRANTOR_PREFIX):
            raise ParseError("block must start with 'grantor: <identity>'",
                             line=block_start)
        grantor = block[0][len(_GRANTOR_PREFIX):]
        if not grantor:
            raise ParseError("empty grantor identity", line=block_start)
        if grantor in table:
            raise ParseError(f"duplicate grantor {grantor!r}", line=block_start)
        try:
            table[grantor] = parse_policy(
                ("\n".join(block[1:]) + "\n").encode("utf-8"))
        except ParseError as exc:
            raise ParseError(f"grantor {grantor!r}: {exc}") from None

    lines = text.split("\n")[:-1]
    for i, line in enumerate(lines, 1):
        if line == _SEPARATOR:
            finish(i)
            block = []
            block_start = i + 1
        else:
            block.append(line)
    finish(len(lines))
    return table


def serialize_grant_table(table: dict[str, PolicyDocument]) -> bytes:
    parts = []
    for grantor in sorted(table):
        parts.append(f"{_GRANTOR_PREFIX}{grantor}\n".encode("utf-8")
                     + serialize_policy(table[grantor]))
    return (_SEPARATOR + "\n").encode("utf-8").join(parts)


def load_grant_table(path) -> dict[str, PolicyDocument]:
    try:
        with open(path, "rb") as fh:
            return parse_grant_table(fh.read())
    except OSError as exc:
        raise IoError(f"cannot read grant table {path}: {exc}") from None


def save_grant_table(path, table: dict[str, PolicyDocument]) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(serialize_grant_table(table))
    except OSError as exc:
        raise IoError(f"cannot write grant table {path}: {exc}") from None
