import random

import pytest

from casauth.credential.certs import ValidityInterval
from casauth.credential.issue import CertificateAuthority

WIDE = ValidityInterval(0, 4_000_000_000)


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def ca(rng):
    return CertificateAuthority.create("AlphaCA", WIDE, rng=rng)


@pytest.fixture
def user_credential(ca, rng):
    """An identity chain plus its private key for a plain user."""
    return ca.issue_credential("CN=alice", WIDE, rng=rng)
