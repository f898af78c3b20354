"""Length-prefixed frames carrying ``key: value`` messages.

A frame is a 4-byte big-endian payload length followed by a UTF-8 payload
of ``key: value`` lines; the first line is always ``msg: <TYPE>``. Both
servers and the client library speak exactly this.
"""

from __future__ import annotations

import socket
import struct
from typing import Mapping

from ..errors import ProtocolError, TransportError

MAX_FRAME_BYTES = 16 * 1024 * 1024


def encode_message(fields: Mapping[str, str]) -> bytes:
    if "msg" not in fields or not fields["msg"]:
        raise ProtocolError("message needs a nonempty 'msg' field")
    lines = [f"msg: {fields['msg']}"]
    for key, value in fields.items():
        if key == "msg":
            continue
        if not key or any(c.isspace() for c in key) or ":" in key:
            raise ProtocolError(f"bad message key {key!r}")
        if "\n" in value or "\r" in value:
            raise ProtocolError(f"message value for {key!r} contains a line break")
        lines.append(f"{key}: {value}")
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    if len(payload) > MAX_FRAME_BYTES:
        raise ProtocolError("frame too large")
    return struct.pack(">I", len(payload)) + payload


def decode_payload(payload: bytes) -> dict[str, str]:
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError:
        raise ProtocolError("payload is not UTF-8") from None
    if not text.endswith("\n"):
        raise ProtocolError("payload missing final linefeed")
    fields: dict[str, str] = {}
    for line in text.split("\n")[:-1]:
        key, sep, value = line.partition(": ")
        if not sep or not key:
            raise ProtocolError(f"expected 'key: value', got {line!r}")
        if key in fields:
            raise ProtocolError(f"duplicate key {key!r}")
        fields[key] = value
    if not fields or next(iter(fields)) != "msg" or not fields["msg"]:
        raise ProtocolError("first line must be 'msg: <TYPE>'")
    return fields


def send_message(sock: socket.socket, fields: Mapping[str, str]) -> None:
    try:
        sock.sendall(encode_message(fields))
    except OSError as exc:
        raise TransportError(f"send failed: {exc}") from None


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    """Read n bytes; None on EOF before the first byte."""
    chunks: list[bytes] = []
    remaining = n
    while remaining:
        try:
            chunk = sock.recv(remaining)
        except socket.timeout:
            raise TransportError("read timed out") from None
        except OSError as exc:
            raise TransportError(f"read failed: {exc}") from None
        if not chunk:
            if not chunks:
                return None
            raise TransportError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_message(sock: socket.socket) -> dict[str, str] | None:
    """Read one message; None on orderly EOF between frames.

    Raises TransportError for connection problems (including oversized
    frames, which cannot be resynchronized) and ProtocolError for payloads
    that do not parse (the connection stays usable).
    """
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length == 0 or length > MAX_FRAME_BYTES:
        raise TransportError(f"unacceptable frame length {length}")
    payload = _read_exact(sock, length)
    if payload is None:
        raise TransportError("connection closed mid-frame")
    return decode_payload(payload)


def serve_messages(sock: socket.socket, dispatch) -> None:
    """Server-side request/response loop over one authenticated connection.

    A payload that does not parse earns ERROR/parse and the loop continues;
    EOF and transport failures end it.
    """
    while True:
        try:
            message = read_message(sock)
        except ProtocolError:
            try:
                send_message(sock, {"msg": "ERROR", "reason": "parse"})
            except TransportError:
                return
            continue
        except TransportError:
            return
        if message is None:
            return
        try:
            send_message(sock, dispatch(message))
        except TransportError:
            return
