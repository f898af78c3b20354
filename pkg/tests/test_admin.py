"""Delegated administration: who may run which verb, and what it does."""

import pytest

from casauth.casd.admin import AdminCommand, apply_admin, authorize_admin
from casauth.casd.db import CommunityDB, serialize_db
from casauth.errors import (
    DuplicateName,
    InvariantViolation,
    NotAuthorized,
    UnknownActor,
    UnknownName,
)

BOOTSTRAP = "CN=root-admin"


def cmd(verb, *args) -> AdminCommand:
    return AdminCommand(verb, tuple(args))


def bootstrap_apply(db, *commands):
    for c in commands:
        db = apply_admin(db, BOOTSTRAP, c, BOOTSTRAP)
    return db


@pytest.fixture
def db():
    return bootstrap_apply(
        CommunityDB(),
        cmd("enroll-user", "alice", "CN=alice"),
        cmd("enroll-user", "pi", "CN=pi"),
        cmd("enroll-user", "geo", "CN=geo"),
        cmd("create-group", "user", "proj-climate"),
        cmd("create-group", "user", "proj-ocean"),
        cmd("enroll-resource", "esg-data", "/esg/data/*"),
    )


def test_bootstrap_admin_passes_every_verb(db):
    for c in (cmd("enroll-user", "x", "CN=x"), cmd("create-group", "user", "g"),
              cmd("grant", "user:alice", "resource:esg-data", "file", "read")):
        assert authorize_admin(db, BOOTSTRAP, c, BOOTSTRAP).is_permit


def test_unknown_actor(db):
    with pytest.raises(UnknownActor):
        authorize_admin(db, "CN=stranger", cmd("enroll-user", "x", "CN=x"), BOOTSTRAP)


def test_enrollment_only_admin_cannot_edit_groups(db):
    # geographically distributed admins: may enroll users, nothing else
    db = bootstrap_apply(
        db, cmd("grant", "user:geo", "pattern:users", "cas", "enroll-user"))
    assert authorize_admin(db, "CN=geo", cmd("enroll-user", "x", "CN=x"),
                           BOOTSTRAP).is_permit
    assert not authorize_admin(db, "CN=geo", cmd("group-add", "proj-climate", "alice"),
                               BOOTSTRAP).is_permit
    with pytest.raises(NotAuthorized):
        apply_admin(db, "CN=geo", cmd("group-add", "proj-climate", "alice"), BOOTSTRAP)


def test_pi_can_edit_only_their_project_group(db):
    db = bootstrap_apply(
        db,
        cmd("grant", "user:pi", "pattern:proj-climate", "cas", "group-add"),
        cmd("grant", "user:pi", "pattern:proj-climate", "cas", "group-remove"),
    )
    assert authorize_admin(db, "CN=pi", cmd("group-add", "proj-climate", "alice"),
                           BOOTSTRAP).is_permit
    assert authorize_admin(db, "CN=pi", cmd("group-remove", "proj-climate", "alice"),
                           BOOTSTRAP).is_permit
    assert not authorize_admin(db, "CN=pi", cmd("group-add", "proj-ocean", "alice"),
                               BOOTSTRAP).is_permit
    assert not authorize_admin(db, "CN=pi", cmd("enroll-user", "x", "CN=x"),
                               BOOTSTRAP).is_permit


def test_wildcard_grant_covers_all_groups(db):
    db = bootstrap_apply(db, cmd("grant", "user:pi", "pattern:*", "cas", "group-add"))
    assert authorize_admin(db, "CN=pi", cmd("group-add", "proj-ocean", "alice"),
                           BOOTSTRAP).is_permit


def test_enroll_then_group_add(db):
    db = bootstrap_apply(db, cmd("group-add", "proj-climate", "alice"))
    assert "alice" in db.user_groups["proj-climate"]


def test_group_add_unenrolled_member_rejected(db):
    with pytest.raises(InvariantViolation):
        bootstrap_apply(db, cmd("group-add", "proj-climate", "mallory"))


def test_unenroll_removes_group_memberships(db):
    db = bootstrap_apply(db, cmd("group-add", "proj-climate", "alice"),
                         cmd("unenroll-user", "alice"))
    assert not db.users["alice"].enrolled
    assert "alice" not in db.user_groups["proj-climate"]
    # the user row survives so statements stay referentially valid
    assert "alice" in db.users


def test_duplicate_enrollment_rejected(db):
    with pytest.raises(DuplicateName):
        bootstrap_apply(db, cmd("enroll-user", "alice", "CN=alice2"))
    with pytest.raises(DuplicateName):
        bootstrap_apply(db, cmd("enroll-user", "alice2", "CN=alice"))


def test_reenrollment_after_unenroll(db):
    db = bootstrap_apply(db, cmd("unenroll-user", "alice"),
                         cmd("enroll-user", "alice", "CN=alice"))
    assert db.users["alice"].enrolled


def test_group_names_unique_across_kinds(db):
    with pytest.raises(DuplicateName):
        bootstrap_apply(db, cmd("create-group", "resource", "proj-climate"))


def test_grant_and_revoke(db):
    db = bootstrap_apply(
        db, cmd("grant", "user:alice", "resource:esg-data", "file", "read"))
    granted = [s for s in db.statements if s.grantee == "alice"]
    assert len(granted) == 1
    db = bootstrap_apply(db, cmd("revoke", str(granted[0].id)))
    assert all(s.grantee != "alice" for s in db.statements)
    with pytest.raises(UnknownName):
        bootstrap_apply(db, cmd("revoke", str(granted[0].id)))


def test_grant_to_unknown_referents_rejected(db):
    with pytest.raises(UnknownName):
        bootstrap_apply(db, cmd("grant", "user:ghost", "resource:esg-data",
                                "file", "read"))
    with pytest.raises(UnknownName):
        bootstrap_apply(db, cmd("grant", "user:alice", "resource:ghost",
                                "file", "read"))


def test_failed_command_leaves_db_unchanged(db):
    before = serialize_db(db)
    with pytest.raises(UnknownName):
        apply_admin(db, BOOTSTRAP, cmd("revoke", "999"), BOOTSTRAP)
    with pytest.raises(InvariantViolation):
        apply_admin(db, BOOTSTRAP, cmd("group-add", "proj-climate", "mallory"),
                    BOOTSTRAP)
    assert serialize_db(db) == before


def test_unknown_verb_rejected(db):
    with pytest.raises(InvariantViolation):
        authorize_admin(db, BOOTSTRAP, cmd("drop-table"), BOOTSTRAP)


def test_arity_validated(db):
    with pytest.raises(InvariantViolation):
        authorize_admin(db, BOOTSTRAP, cmd("group-add", "proj-climate"), BOOTSTRAP)


def test_spaced_identity_enrollment(db):
    db = bootstrap_apply(db, cmd("enroll-user", "ann", "CN=Ann", "Example"))
    assert db.users["ann"].identity == "CN=Ann Example"
