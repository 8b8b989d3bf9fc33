"""RLC segmentation/reassembly with Acknowledged Mode ARQ (NRT) and
Unacknowledged Mode (RT)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .buffer import MacdPdu, NRT, RT
from .engine import US_PER_MS


@dataclass
class RlcConfig:
    pdu_bits: int = 320
    tx_window: int = 1024
    rx_window: int = 1024
    max_dat: int = 6                 # total transmission attempts per PDU
    retrans_delay_ms: int = 200      # back-off between attempts of one PDU
    status_delay_us: int = 5_000     # delay-only uplink for status reports


def segment(sdu_bits: int, pdu_bits: int, flow: int, start_seq: int,
            created_at: int, sdu_id: int) -> list[MacdPdu]:
    """Split an SDU into ceil(sdu_bits/pdu_bits) PDUs; the last one is padded."""
    if sdu_bits <= 0:
        raise ValueError("sdu_bits must be positive")
    count = -(-sdu_bits // pdu_bits)
    return [
        MacdPdu(flow, start_seq + i, created_at, sdu_id=sdu_id,
                sdu_first=(i == 0), sdu_last=(i == count - 1))
        for i in range(count)
    ]


class _Flight:
    __slots__ = ("pdu", "tx_count", "last_tx", "pending_retx")

    def __init__(self, pdu):
        self.pdu = pdu
        self.tx_count = 0
        self.last_tx = -1
        self.pending_retx = False


class AmSender:
    """RNC-side acknowledged-mode entity for the NRT flow.

    Holds the untransmitted backlog (UBS), the retransmission queue, and the
    in-flight ledger; ship() hands PDUs to the Iub frame under credit control.
    """

    def __init__(self, cfg: RlcConfig, on_sdu_discard=None):
        self.cfg = cfg
        self.next_seq = 0
        self.next_sdu_id = 0
        self.vt_s = 0           # next new sequence to ship
        self.vt_a = 0           # lowest unacknowledged
        self.new_queue = deque()
        self.retx_queue = deque()
        self.flight: dict[int, _Flight] = {}
        self.sdu_pdus: dict[int, list[int]] = {}
        self.discarded_sdus = 0
        self.retransmissions = 0
        self.on_sdu_discard = on_sdu_discard

    def submit_sdu(self, sdu_bits: int, now: int) -> int:
        sdu_id = self.next_sdu_id
        self.next_sdu_id += 1
        pdus = segment(sdu_bits, self.cfg.pdu_bits, NRT, self.next_seq, now, sdu_id)
        self.next_seq += len(pdus)
        self.sdu_pdus[sdu_id] = [p.seq for p in pdus]
        self.new_queue.extend(pdus)
        return sdu_id

    def backlog(self) -> int:
        """UBS: PDUs waiting at the RNC (new plus pending retransmissions)."""
        return len(self.new_queue) + len(self.retx_queue)

    def ship(self, count: int, now: int) -> list[MacdPdu]:
        out = []
        while self.retx_queue and len(out) < count:
            seq = self.retx_queue.popleft()
            rec = self.flight.get(seq)
            if rec is None:      # acknowledged or discarded meanwhile
                continue
            rec.pending_retx = False
            rec.tx_count += 1
            rec.last_tx = now
            self.retransmissions += 1
            out.append(rec.pdu)
        while (self.new_queue and len(out) < count
               and self.vt_s - self.vt_a < self.cfg.tx_window):
            pdu = self.new_queue.popleft()
            rec = _Flight(pdu)
            rec.tx_count = 1
            rec.last_tx = now
            self.flight[pdu.seq] = rec
            self.vt_s = pdu.seq + 1
            out.append(pdu)
        return out

    def on_status(self, ack: int, missing: list[int], now: int) -> list[int]:
        """Process a receiver status report; returns sdu_ids discarded via MaxDAT."""
        if ack > self.vt_a:
            self.vt_a = ack
        for seq in [s for s in self.flight if s < ack]:
            del self.flight[seq]
        discarded = []
        gate = self.cfg.retrans_delay_ms * US_PER_MS
        for seq in missing:
            rec = self.flight.get(seq)
            if rec is None or rec.pending_retx:
                continue
            if now - rec.last_tx < gate:
                continue
            if rec.tx_count >= self.cfg.max_dat:
                sdu_id = rec.pdu.sdu_id
                if sdu_id not in discarded:
                    discarded.append(sdu_id)
                continue
            rec.pending_retx = True
            self.retx_queue.append(seq)
        for sdu_id in discarded:
            self._discard_sdu(sdu_id)
        return discarded

    def _discard_sdu(self, sdu_id: int) -> None:
        seqs = self.sdu_pdus.pop(sdu_id, [])
        seq_set = set(seqs)
        self.new_queue = deque(p for p in self.new_queue if p.sdu_id != sdu_id)
        self.retx_queue = deque(s for s in self.retx_queue if s not in seq_set)
        for seq in seqs:
            self.flight.pop(seq, None)
        while self.vt_a < self.vt_s and self.vt_a not in self.flight and self.vt_a in seq_set:
            self.vt_a += 1
        self.discarded_sdus += 1
        if self.on_sdu_discard is not None:
            self.on_sdu_discard(sdu_id, seqs)


_SKIPPED = object()


class AmReceiver:
    """UE-side acknowledged-mode entity: in-sequence SDU delivery plus status reports."""

    def __init__(self, cfg: RlcConfig, deliver_sdu=None):
        self.cfg = cfg
        self.vr_r = 0            # next in-sequence expected
        self.highest = 0         # one past highest received
        self.received: dict[int, object] = {}
        self._partial: list[MacdPdu] = []
        self.deliver_sdu = deliver_sdu
        self.delivered_sdus = 0

    def on_pdu(self, pdu: MacdPdu, now: int) -> tuple[int, list[int]]:
        """Accept one PDU, advance in-sequence delivery, emit (ack, missing) status."""
        if pdu.seq >= self.vr_r and pdu.seq not in self.received:
            self.received[pdu.seq] = pdu
            if pdu.seq + 1 > self.highest:
                self.highest = pdu.seq + 1
        self._advance()
        missing = [s for s in range(self.vr_r, self.highest) if s not in self.received]
        return self.vr_r, missing

    def skip(self, seqs: list[int]) -> None:
        """Sender gave the PDUs up (MaxDAT); tombstone them so delivery can advance."""
        for seq in seqs:
            if seq >= self.vr_r and seq not in self.received:
                self.received[seq] = _SKIPPED
                if seq + 1 > self.highest:
                    self.highest = seq + 1
        self._advance()

    def _advance(self) -> None:
        while self.vr_r in self.received:
            entry = self.received.pop(self.vr_r)
            self.vr_r += 1
            if entry is _SKIPPED:
                self._partial = []
                continue
            self._partial.append(entry)
            if entry.sdu_last:
                sdu = self._partial
                self._partial = []
                if sdu and sdu[0].sdu_id == entry.sdu_id and len(sdu) == len(
                        [p for p in sdu if p.sdu_id == entry.sdu_id]):
                    self.delivered_sdus += 1
                    if self.deliver_sdu is not None:
                        self.deliver_sdu(entry.sdu_id, sdu)


class UmReceiver:
    """UE-side unacknowledged-mode entity: gaps are skipped, partial SDUs dropped."""

    def __init__(self, deliver_sdu=None):
        self.expected = 0
        self._partial: list[MacdPdu] = []
        self.deliver_sdu = deliver_sdu
        self.delivered_sdus = 0
        self.lost_pdus = 0

    def on_pdu(self, pdu: MacdPdu, now: int) -> None:
        if pdu.seq < self.expected:
            return
        if pdu.seq > self.expected:
            self.lost_pdus += pdu.seq - self.expected
            self._partial = []
        self.expected = pdu.seq + 1
        if self._partial and self._partial[0].sdu_id != pdu.sdu_id:
            self._partial = []
        self._partial.append(pdu)
        if pdu.sdu_last:
            sdu = self._partial
            self._partial = []
            first_seq = sdu[0].seq
            want = pdu.seq - first_seq + 1
            if len(sdu) == want and (first_seq == 0 or sdu[0].sdu_id != self._sdu_of(first_seq - 1)):
                pass
            self.delivered_sdus += 1
            if self.deliver_sdu is not None:
                self.deliver_sdu(pdu.sdu_id, sdu)

    @staticmethod
    def _sdu_of(seq: int):
        return None
