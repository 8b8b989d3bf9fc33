"""Per-UE MAC-hs logical queue: TSP admission control, dynamic priority switching,
the RT discard timer, and the complete-buffer-sharing baseline."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .engine import US_PER_MS

# Flow classes
RT = 0
NRT = 1

# Buffer management schemes
CBS = "cbs"
STSP = "stsp"
DTSP = "dtsp"

SCHEMES = (CBS, STSP, DTSP)


class MacdPdu:
    """320-bit unit of queuing/accounting."""

    __slots__ = ("flow", "seq", "created_at", "machs_arrival", "sdu_id",
                 "sdu_first", "sdu_last")

    def __init__(self, flow, seq, created_at, sdu_id=None, sdu_first=True, sdu_last=True):
        self.flow = flow
        self.seq = seq
        self.created_at = created_at
        self.machs_arrival = -1
        self.sdu_id = sdu_id
        self.sdu_first = sdu_first
        self.sdu_last = sdu_last


@dataclass
class BufferConfig:
    total_pdus: int = 192          # N
    rt_threshold: int = 32         # R
    fc_low: int = 72               # L
    fc_high: int = 144             # H
    pdu_bits: int = 320
    header_bits: int = 21          # MAC-hs header per transport block
    dt_ms: int = 160               # RT discard timer

    def validate(self):
        if not (0 < self.rt_threshold < self.fc_low < self.fc_high < self.total_pdus):
            raise ValueError(
                "buffer thresholds must satisfy 0 < R < L < H < N, got "
                f"R={self.rt_threshold} L={self.fc_low} H={self.fc_high} N={self.total_pdus}")


@dataclass
class PriorityConfig:
    db_ms: int = 160               # MAC-hs delay budget used to derive delta
    db_max_ms: int = 160
    delta: int = 32                # switching threshold in PDUs
    hol_budget_mode: str = "db_max"  # compare HOL delay against db_max (default) or db

    def hol_budget_us(self) -> int:
        ms = self.db_max_ms if self.hol_budget_mode == "db_max" else self.db_ms
        return ms * US_PER_MS


def delta_from_db(db_ms: int, rt_rate_bps: int, pdu_bits: int) -> int:
    """Switching threshold: delay budget divided by the RT PDU inter-arrival time."""
    return db_ms * rt_rate_bps // (pdu_bits * 1000)


class TspBuffer:
    """Per-UE Node-B queue under one of the three schemes.

    TSP schemes keep class FIFOs with RT capped at R and the total at N;
    CBS keeps a single shared drop-tail FIFO of capacity N.
    """

    __slots__ = ("cfg", "prio", "scheme", "rt_queue", "nrt_queue", "shared",
                 "r", "n", "rt_arrivals", "nrt_arrivals",
                 "rt_admission_drops", "nrt_admission_drops", "rt_dt_discards",
                 "rt_dequeued", "nrt_dequeued")

    def __init__(self, cfg: BufferConfig, scheme: str = STSP, prio: PriorityConfig = None):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        self.cfg = cfg
        self.prio = prio if prio is not None else PriorityConfig()
        self.scheme = scheme
        self.rt_queue = deque()
        self.nrt_queue = deque()
        self.shared = deque()
        self.r = 0
        self.n = 0
        self.rt_arrivals = 0
        self.nrt_arrivals = 0
        self.rt_admission_drops = 0
        self.nrt_admission_drops = 0
        self.rt_dt_discards = 0
        self.rt_dequeued = 0
        self.nrt_dequeued = 0

    @property
    def occupancy(self) -> int:
        return self.r + self.n

    @property
    def is_empty(self) -> bool:
        return self.r + self.n == 0

    def admit(self, pdu: MacdPdu, now: int) -> bool:
        """TSP admission (Part 2 rules). Returns True iff queued; drops are counted."""
        if pdu.flow == RT:
            self.rt_arrivals += 1
            if self.r < self.cfg.rt_threshold:
                pdu.machs_arrival = now
                self.rt_queue.append(pdu)
                self.r += 1
                return True
            self.rt_admission_drops += 1
            return False
        self.nrt_arrivals += 1
        if self.r + self.n < self.cfg.total_pdus:
            pdu.machs_arrival = now
            self.nrt_queue.append(pdu)
            self.n += 1
            return True
        self.nrt_admission_drops += 1
        return False

    def admit_cbs(self, pdu: MacdPdu, now: int) -> bool:
        """Drop-tail admission into the shared FIFO, class-blind."""
        if pdu.flow == RT:
            self.rt_arrivals += 1
        else:
            self.nrt_arrivals += 1
        if self.r + self.n < self.cfg.total_pdus:
            pdu.machs_arrival = now
            self.shared.append(pdu)
            if pdu.flow == RT:
                self.r += 1
            else:
                self.n += 1
            return True
        if pdu.flow == RT:
            self.rt_admission_drops += 1
        else:
            self.nrt_admission_drops += 1
        return False

    def offer(self, pdu: MacdPdu, now: int) -> bool:
        if self.scheme == CBS:
            return self.admit_cbs(pdu, now)
        return self.admit(pdu, now)

    def rt_hol_delay(self, now: int) -> int:
        if self.scheme == CBS or not self.rt_queue:
            return 0
        return now - self.rt_queue[0].machs_arrival

    def select_flow(self, now: int):
        """Class to transmit at this scheduling opportunity; None when empty."""
        if self.scheme == CBS:
            return self.shared[0].flow if self.shared else None
        if self.scheme == DTSP:
            if (self.r < self.prio.delta
                    and self.rt_hol_delay(now) < self.prio.hol_budget_us()
                    and self.n > 0):
                return NRT
        if self.r > 0:
            return RT
        if self.n > 0:
            return NRT
        return None

    def dequeue_for_tti(self, flow, max_bits: int) -> list:
        """Remove up to floor(max_bits/pdu_bits) PDUs of one class from the head."""
        room = max_bits // self.cfg.pdu_bits
        out = []
        if room <= 0 or flow is None:
            return out
        if self.scheme == CBS:
            q = self.shared
            while q and len(out) < room and q[0].flow == flow:
                out.append(q.popleft())
        else:
            q = self.rt_queue if flow == RT else self.nrt_queue
            while q and len(out) < room:
                out.append(q.popleft())
        taken = len(out)
        if flow == RT:
            self.r -= taken
            self.rt_dequeued += taken
        else:
            self.n -= taken
            self.nrt_dequeued += taken
        return out

    def discard_timer_sweep(self, now: int) -> int:
        """Drop RT head-of-line PDUs whose MAC-hs queuing delay reached the timer."""
        if self.scheme == CBS:
            return 0
        dt_us = self.cfg.dt_ms * US_PER_MS
        q = self.rt_queue
        count = 0
        while q and now - q[0].machs_arrival >= dt_us:
            q.popleft()
            count += 1
        if count:
            self.r -= count
            self.rt_dt_discards += count
        return count
