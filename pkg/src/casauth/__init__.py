"""casauth: community-managed authorization with capability credentials.

Resource providers grant blocks of access to a community identity; the
community's authorization server hands out short-lived restricted proxy
credentials (capabilities) reflecting its own fine-grained policy; and
resources enforce the intersection of both sides.
"""

__version__ = "0.1.0"
