"""Trust-relationship accounting for brokered versus direct communities."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TrustTopology:
    """A community of resource consumers and producers.

    With no broker every consumer-producer pair needs its own trust
    relationship; with a community authorization server in the middle each
    party needs exactly one.
    """

    consumers: int
    producers: int
    brokered: bool = False

    def __post_init__(self):
        if self.consumers < 0 or self.producers < 0:
            raise ValueError("counts must be nonnegative")


def trust_edges(topology: TrustTopology) -> int:
    if topology.brokered:
        return topology.consumers + topology.producers
    return topology.consumers * topology.producers
