"""Data model of the cas-simple-v1 policy language.

A document is a list of rights; each right grants a list of actions on a
list of object patterns. There are no negative rights and no priorities:
anything not granted is denied.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

LANGUAGE = "cas-simple-v1"


class Decision(enum.Enum):
    PERMIT = "permit"
    DENY = "deny"

    @property
    def is_permit(self) -> bool:
        return self is Decision.PERMIT


def _token_ok(value: str) -> bool:
    return bool(value) and value.isascii() and not any(c.isspace() for c in value)


@dataclass(frozen=True)
class Action:
    """An action name qualified by the service type that defines it."""

    service_type: str
    action_name: str

    def __post_init__(self):
        for part, what in ((self.service_type, "service type"),
                           (self.action_name, "action name")):
            if not _token_ok(part) or ":" in part or part != part.lower():
                raise ValueError(f"{what} must be a lowercase ASCII token "
                                 f"without whitespace or colons: {part!r}")


@dataclass(frozen=True)
class ObjectPattern:
    """Exact object name, a path prefix ``X/*``, or the universal ``*``.

    ``X/*`` matches ``X`` itself and every descendant ``X/...``.
    """

    pattern: str

    def __post_init__(self):
        p = self.pattern
        if not _token_ok(p):
            raise ValueError(f"pattern must be a nonempty whitespace-free token: {p!r}")
        if "*" in p and p != "*" and not (p.endswith("/*") and p.count("*") == 1):
            raise ValueError(f"'*' may appear only as trailing '/*' or alone: {p!r}")


def _coerce_patterns(values) -> tuple[ObjectPattern, ...]:
    return tuple(v if isinstance(v, ObjectPattern) else ObjectPattern(v) for v in values)


def _coerce_actions(values) -> tuple[Action, ...]:
    return tuple(v if isinstance(v, Action) else Action(*v) for v in values)


@dataclass(frozen=True)
class Right:
    objects: tuple[ObjectPattern, ...]
    actions: tuple[Action, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", _coerce_patterns(self.objects))
        object.__setattr__(self, "actions", _coerce_actions(self.actions))
        if not self.objects or not self.actions:
            raise ValueError("a right needs at least one object and one action")


@dataclass(frozen=True)
class PolicyDocument:
    rights: tuple[Right, ...] = ()
    language: str = LANGUAGE

    def __post_init__(self):
        object.__setattr__(self, "rights", tuple(self.rights))
        if not _token_ok(self.language):
            raise ValueError(f"language must be a nonempty token: {self.language!r}")


@dataclass(frozen=True)
class Request:
    """One concrete thing somebody wants to do: (service, action, object)."""

    service_type: str
    action_name: str
    object: str

    def __post_init__(self):
        if not self.service_type or not self.action_name or not self.object:
            raise ValueError("request fields must be nonempty")
        if "*" in self.object:
            raise ValueError("request objects are concrete names, no wildcards")
        if "\n" in self.object:
            raise ValueError("request objects must not contain line breaks")


class _AllRights:
    """Sentinel for capability requests: grant everything the user holds."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ALL"


ALL = _AllRights()
