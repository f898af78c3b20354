"""Clock sources.

Everything that compares timestamps takes an injectable zero-argument
callable returning whole seconds. Production code defaults to
``system_clock``; the scenario harness injects a ManualClock so validity
checks are deterministic and expiry can be forced without sleeping.
"""

from __future__ import annotations

import threading
import time


def system_clock() -> int:
    return int(time.time())


class ManualClock:
    """A clock that only moves when told to."""

    def __init__(self, start: int = 1_000_000_000):
        self._now = int(start)
        self._lock = threading.Lock()

    def now(self) -> int:
        with self._lock:
            return self._now

    def advance(self, seconds: int) -> int:
        if seconds < 0:
            raise ValueError("clock only advances")
        with self._lock:
            self._now += int(seconds)
            return self._now

    def __call__(self) -> int:
        return self.now()
