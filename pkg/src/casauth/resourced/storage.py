"""Virtual filesystem root with traversal-proof object resolution."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ..errors import IoError, IsDirectory, NotDirectory, NotFound, PathEscape
from ..policy.model import Request


@dataclass(frozen=True)
class VirtualRoot:
    """Object names are absolute "/"-separated paths interpreted under root."""

    root: Path

    def resolve(self, object_path: str) -> Path:
        """Map an object name to a real path, never outside the root.

        Normalization happens before any filesystem access: ".." segments
        pop, and popping past the root (or a relative name) is rejected.
        """
        if not object_path.startswith("/"):
            raise PathEscape(f"object names are absolute, got {object_path!r}")
        parts: list[str] = []
        for segment in object_path.split("/"):
            if segment in ("", "."):
                continue
            if segment == "..":
                if not parts:
                    raise PathEscape(f"{object_path!r} climbs out of the root")
                parts.pop()
            else:
                parts.append(segment)
        return Path(self.root).joinpath(*parts)


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise NotFound(str(path.name)) from None
    except IsADirectoryError:
        raise IsDirectory(str(path.name)) from None
    except OSError as exc:
        raise IoError(str(exc)) from None


def _write(path: Path, payload: bytes) -> None:
    # temp-then-rename so a crashed or concurrent write is never half-visible
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except IsADirectoryError:
        raise IsDirectory(str(path.name)) from None
    except OSError as exc:
        raise IoError(str(exc)) from None


def _list(path: Path) -> list[str]:
    try:
        return sorted(p.name for p in path.iterdir())
    except FileNotFoundError:
        raise NotFound(str(path.name)) from None
    except NotADirectoryError:
        raise NotDirectory(str(path.name)) from None
    except OSError as exc:
        raise IoError(str(exc)) from None


def handle_file_op(root: VirtualRoot, req: Request,
                   payload: bytes | None = None):
    """Execute an already-authorized file request.

    read returns bytes, list returns sorted child names, write stores the
    payload atomically and returns None.
    """
    path = root.resolve(req.object)
    if req.action_name == "read":
        return _read(path)
    if req.action_name == "write":
        if payload is None:
            raise IoError("write needs a payload")
        _write(path, payload)
        return None
    if req.action_name == "list":
        return _list(path)
    raise ValueError(f"no handler for action {req.action_name!r}")
