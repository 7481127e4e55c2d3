from __future__ import annotations

import threading
import time
from datetime import datetime, timedelta, timezone

import pytest

from kumpul.coordinator import Clock
from kumpul.store import Store

T0 = datetime(2022, 9, 1, 12, 0, 0, tzinfo=timezone.utc)


class FakeClock(Clock):
    """Deterministic clock; sleep advances virtual time and yields the GIL."""

    def __init__(self, start: datetime = T0):
        self._now = start
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def sleep(self, seconds: float) -> None:
        self.advance(seconds)
        time.sleep(0)

    def advance(self, seconds: float) -> datetime:
        with self._lock:
            self._now += timedelta(seconds=seconds)
            return self._now


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "test.db")


@pytest.fixture
def clock():
    return FakeClock()
