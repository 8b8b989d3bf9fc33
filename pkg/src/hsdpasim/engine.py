"""Deterministic discrete-event core: virtual clock, event queue, seeded RNG streams."""

from __future__ import annotations

import hashlib
import heapq
import random

# All model time is integer microseconds.
TTI_US = 2_000
FRAME_US = 10_000

US_PER_S = 1_000_000
US_PER_MS = 1_000


class SimulationError(Exception):
    """Raised on programming errors that must halt the run (e.g. scheduling in the past)."""


class EventHandle:
    """A scheduled event; cancel() suppresses dispatch if it has not fired yet."""

    __slots__ = ("fire_time", "seq", "kind", "target", "fn", "args", "state")

    PENDING, DISPATCHED, CANCELLED = 0, 1, 2

    def __init__(self, fire_time, seq, kind, target, fn, args):
        self.fire_time = fire_time
        self.seq = seq
        self.kind = kind
        self.target = target
        self.fn = fn
        self.args = args
        self.state = EventHandle.PENDING


def derive_seed(*parts) -> int:
    """Stable integer seed from arbitrary parts (platform independent)."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


class RngStreams:
    """Named independent pseudo-random streams, each seeded from (master_seed, name)."""

    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        self._streams: dict[str, random.Random] = {}

    def get(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            rng = random.Random(derive_seed(self.master_seed, name))
            self._streams[name] = rng
        return rng


class Simulator:
    """Single-run event loop.

    Events at equal timestamps dispatch in FIFO scheduling order.  run_until(t)
    dispatches all events strictly before t and leaves the clock at t, so a
    self-rescheduling 2 ms tick started at time 0 fires exactly t/2ms times.
    """

    def __init__(self, master_seed: int = 0):
        self.now = 0
        self.rng = RngStreams(master_seed)
        self._heap: list[tuple[int, int, EventHandle]] = []
        self._seq = 0
        self.scheduled_count = 0
        self.dispatched_count = 0
        self.cancelled_count = 0

    def schedule(self, fire_time: int, kind: str, target, fn, *args) -> EventHandle:
        if fire_time < self.now:
            raise SimulationError(
                f"schedule in the past: {fire_time} < now {self.now} (kind={kind})"
            )
        ev = EventHandle(fire_time, self._seq, kind, target, fn, args)
        self._seq += 1
        self.scheduled_count += 1
        heapq.heappush(self._heap, (fire_time, ev.seq, ev))
        return ev

    def schedule_after(self, delay: int, kind: str, target, fn, *args) -> EventHandle:
        return self.schedule(self.now + delay, kind, target, fn, *args)

    def cancel(self, handle: EventHandle) -> bool:
        if handle.state != EventHandle.PENDING:
            return False
        handle.state = EventHandle.CANCELLED
        self.cancelled_count += 1
        return True

    def pending_count(self) -> int:
        return self.scheduled_count - self.dispatched_count - self.cancelled_count

    def run_until(self, t_end: int) -> None:
        heap = self._heap
        while heap:
            fire_time, _, ev = heap[0]
            if fire_time >= t_end:
                break
            heapq.heappop(heap)
            if ev.state != EventHandle.PENDING:
                continue
            ev.state = EventHandle.DISPATCHED
            self.dispatched_count += 1
            self.now = fire_time
            ev.fn(*ev.args)
        self.now = t_end

    def run_all(self) -> None:
        """Drain every pending event (used by small tests; clock ends at last event)."""
        heap = self._heap
        while heap:
            fire_time, _, ev = heapq.heappop(heap)
            if ev.state != EventHandle.PENDING:
                continue
            ev.state = EventHandle.DISPATCHED
            self.dispatched_count += 1
            self.now = fire_time
            ev.fn(*ev.args)
