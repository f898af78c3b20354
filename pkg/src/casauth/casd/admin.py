"""Delegated administration.

Admin rights are ordinary policy statements under the reserved service
type ``cas``: the action is the verb name and the object names what the
verb touches ("users", "resources", "statements", or a group name). That
lets a community grant, say, enroll-user without group-add, or group
editing limited to one project group, through the same policy engine that
governs everything else. A configured bootstrap identity bypasses the
check so a fresh server can be set up at all.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    DuplicateName,
    InvariantViolation,
    NotAuthorized,
    UnknownActor,
    UnknownName,
)
from ..policy.engine import evaluate
from ..policy.model import Action, Decision, ObjectPattern, Request
from .db import (
    CommunityDB,
    GRANTEE_GROUP,
    GRANTEE_USER,
    OBJECT_PATTERN,
    OBJECT_RESOURCE,
    OBJECT_RGROUP,
    PolicyStatement,
    UserEntry,
    valid_name,
    validate_db,
)
from .rights import compute_user_rights, find_user

ADMIN_SERVICE = "cas"

VERBS = ("enroll-user", "unenroll-user", "enroll-resource", "create-group",
         "group-add", "group-remove", "grant", "revoke")

_ARITY = {
    "enroll-user": 2,       # <name> <identity>, identity may contain spaces
    "unenroll-user": 1,     # <name>
    "enroll-resource": 2,   # <name> <object pattern>
    "create-group": 2,      # user|resource <name>
    "group-add": 2,         # <group> <member>
    "group-remove": 2,      # <group> <member>
    "grant": 4,             # user:N|group:N resource:N|rgroup:N|pattern:P <svc> <act>
    "revoke": 1,            # <statement id>
}


@dataclass(frozen=True)
class AdminCommand:
    verb: str
    args: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


def check_command(cmd: AdminCommand) -> None:
    if cmd.verb not in VERBS:
        raise InvariantViolation(f"unknown admin verb {cmd.verb!r}")
    want = _ARITY[cmd.verb]
    if cmd.verb == "enroll-user":
        # last argument is the identity and may itself contain spaces
        if len(cmd.args) < want:
            raise InvariantViolation(f"{cmd.verb} takes {want} arguments")
    elif len(cmd.args) != want:
        raise InvariantViolation(f"{cmd.verb} takes {want} arguments")


def admin_target(cmd: AdminCommand) -> str:
    """The policy object an actor must hold rights on for this command."""
    verb = cmd.verb
    if verb in ("enroll-user", "unenroll-user"):
        return "users"
    if verb == "enroll-resource":
        return "resources"
    if verb == "create-group":
        return cmd.args[1]
    if verb in ("group-add", "group-remove"):
        return cmd.args[0]
    return "statements"  # grant, revoke


def authorize_admin(db: CommunityDB, actor_identity: str, cmd: AdminCommand,
                    bootstrap_admin: str | None = None) -> Decision:
    """Decide whether the actor may run the command.

    Raises UnknownActor for identities that are neither enrolled nor the
    configured bootstrap administrator.
    """
    check_command(cmd)
    if bootstrap_admin is not None and actor_identity == bootstrap_admin:
        return Decision.PERMIT
    if find_user(db, actor_identity) is None:
        raise UnknownActor(f"identity {actor_identity!r} is not enrolled")
    target = admin_target(cmd)
    request = Request(ADMIN_SERVICE, cmd.verb, target)
    return evaluate(compute_user_rights(db, actor_identity), request)


def _parse_tag(token: str, kinds: tuple[str, ...]) -> tuple[str, str]:
    kind, sep, value = token.partition(":")
    if not sep or kind not in kinds or not value:
        raise InvariantViolation(f"expected one of {kinds} tagged value, got {token!r}")
    return kind, value


def _require_new_group_name(db: CommunityDB, name: str) -> None:
    if name in db.user_groups or name in db.resource_groups:
        raise DuplicateName(f"group {name!r} already exists")


def _mutate(db: CommunityDB, cmd: AdminCommand) -> None:
    verb, args = cmd.verb, cmd.args

    if verb == "enroll-user":
        name, identity = args[0], " ".join(args[1:])
        if not valid_name(name):
            raise InvariantViolation(f"bad user name {name!r}")
        entry = db.users.get(name)
        if entry is not None and entry.enrolled:
            raise DuplicateName(f"user {name!r} already enrolled")
        for other, e in db.users.items():
            if other != name and e.enrolled and e.identity == identity:
                raise DuplicateName(f"identity {identity!r} already enrolled as {other!r}")
        db.users[name] = UserEntry(identity, True)

    elif verb == "unenroll-user":
        entry = db.users.get(args[0])
        if entry is None:
            raise UnknownName(f"no user {args[0]!r}")
        entry.enrolled = False
        for members in db.user_groups.values():
            members.discard(args[0])

    elif verb == "enroll-resource":
        name, pattern = args
        if not valid_name(name):
            raise InvariantViolation(f"bad resource name {name!r}")
        if name in db.resources:
            raise DuplicateName(f"resource {name!r} already enrolled")
        try:
            ObjectPattern(pattern)
        except ValueError as exc:
            raise InvariantViolation(str(exc)) from None
        db.resources[name] = pattern

    elif verb == "create-group":
        kind, name = args
        if kind not in ("user", "resource"):
            raise InvariantViolation("group kind must be 'user' or 'resource'")
        if not valid_name(name):
            raise InvariantViolation(f"bad group name {name!r}")
        _require_new_group_name(db, name)
        (db.user_groups if kind == "user" else db.resource_groups)[name] = set()

    elif verb in ("group-add", "group-remove"):
        group, member = args
        if group in db.user_groups:
            members, known = db.user_groups[group], db.users
            enrolled = member in known and known[member].enrolled
        elif group in db.resource_groups:
            members, enrolled = db.resource_groups[group], member in db.resources
        else:
            raise UnknownName(f"no group {group!r}")
        if verb == "group-add":
            if not enrolled:
                raise InvariantViolation(
                    f"{member!r} is not an enrolled member candidate for {group!r}")
            members.add(member)
        else:
            if member not in members:
                raise UnknownName(f"{member!r} not in group {group!r}")
            members.discard(member)

    elif verb == "grant":
        gk, gv = _parse_tag(args[0], (GRANTEE_USER, GRANTEE_GROUP))
        ok, ov = _parse_tag(args[1], (OBJECT_RESOURCE, OBJECT_RGROUP, OBJECT_PATTERN))
        if gk == GRANTEE_USER and gv not in db.users:
            raise UnknownName(f"no user {gv!r}")
        if gk == GRANTEE_GROUP and gv not in db.user_groups:
            raise UnknownName(f"no user group {gv!r}")
        if ok == OBJECT_RESOURCE and ov not in db.resources:
            raise UnknownName(f"no resource {ov!r}")
        if ok == OBJECT_RGROUP and ov not in db.resource_groups:
            raise UnknownName(f"no resource group {ov!r}")
        if ok == OBJECT_PATTERN:
            try:
                ObjectPattern(ov)
            except ValueError as exc:
                raise InvariantViolation(str(exc)) from None
        try:
            Action(args[2], args[3])
        except ValueError as exc:
            raise InvariantViolation(str(exc)) from None
        db.statements.append(PolicyStatement(db.next_statement_id, gk, gv, ok, ov,
                                             args[2], args[3]))
        db.next_statement_id += 1

    elif verb == "revoke":
        try:
            stmt_id = int(args[0], 10)
        except ValueError:
            raise InvariantViolation(f"revoke takes a statement id, got {args[0]!r}") from None
        for i, stmt in enumerate(db.statements):
            if stmt.id == stmt_id:
                del db.statements[i]
                return
        raise UnknownName(f"no statement {stmt_id}")


def apply_admin(db: CommunityDB, actor_identity: str, cmd: AdminCommand,
                bootstrap_admin: str | None = None) -> CommunityDB:
    """Authorize, then apply the command to a copy of the database.

    The input database is never mutated: a failed command leaves caller
    state untouched, which is what makes persistence atomic.
    """
    if not authorize_admin(db, actor_identity, cmd, bootstrap_admin).is_permit:
        raise NotAuthorized(f"{actor_identity!r} may not {cmd.verb}")
    new_db = db.clone()
    _mutate(new_db, cmd)
    validate_db(new_db)
    return new_db
