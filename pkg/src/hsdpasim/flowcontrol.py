"""Credit-based RNC-to-Node-B flow control: filtered occupancy, NRT rate estimate,
and per-frame credit grants."""

from __future__ import annotations

from dataclasses import dataclass

from .buffer import BufferConfig
from .engine import US_PER_S


@dataclass
class FlowQosProfile:
    rt_rate_bps: int = 64_000        # guaranteed bit rate of the RT flow
    pdu_bits: int = 320
    nrt_max_bitrate_bps: int = 256_000  # dimensioning value, also the rate-estimate seed


@dataclass
class FlowControlConfig:
    w: float = 0.7        # occupancy filter weight
    alpha: float = 0.7    # NRT rate filter weight
    k: float = 0.5        # overflow-control gain in the [L, H] band
    frame_us: int = 10_000


class FlowControlState:
    """Per-UE filter state plus fractional credit carries."""

    __slots__ = ("cfg", "q_filtered", "nrt_rate_est", "rt_carry", "nrt_carry")

    def __init__(self, cfg: FlowControlConfig, initial_nrt_rate_bps: float):
        self.cfg = cfg
        self.q_filtered = 0.0
        self.nrt_rate_est = float(initial_nrt_rate_bps)
        self.rt_carry = 0.0
        self.nrt_carry = 0.0


def update_occupancy_filter(state: FlowControlState, q_now: int) -> float:
    w = state.cfg.w
    state.q_filtered = w * state.q_filtered + (1.0 - w) * q_now
    return state.q_filtered


def update_nrt_rate(state: FlowControlState, bits_sent: int, tti_us: int) -> float:
    """Filter the per-TTI amount, normalized to an instantaneous rate in bits/s."""
    a = state.cfg.alpha
    inst = bits_sent * US_PER_S / tti_us
    state.nrt_rate_est = a * state.nrt_rate_est + (1.0 - a) * inst
    return state.nrt_rate_est


def nrt_credit_ceiling(state: FlowControlState, profile: FlowQosProfile,
                       buf: BufferConfig) -> float:
    """Piecewise maximum NRT credit per frame as a function of filtered occupancy."""
    frame_s = state.cfg.frame_us / US_PER_S
    full = (state.nrt_rate_est / profile.pdu_bits) * frame_s
    q = state.q_filtered
    if q > buf.fc_high:
        return 0.0
    if q >= buf.fc_low:
        return state.cfg.k * full
    return full


def compute_credits(state: FlowControlState, profile: FlowQosProfile,
                    buf: BufferConfig, ubs_nrt: int) -> tuple[int, int]:
    """Per-frame (c_rt, c_nrt) grants; fractional remainders accumulate in carries."""
    frame_s = state.cfg.frame_us / US_PER_S
    rt_exact = (profile.rt_rate_bps / profile.pdu_bits) * frame_s + state.rt_carry
    c_rt = int(rt_exact)
    state.rt_carry = rt_exact - c_rt

    nrt_exact = nrt_credit_ceiling(state, profile, buf) + state.nrt_carry
    ceiling = int(nrt_exact)
    state.nrt_carry = nrt_exact - ceiling
    c_nrt = min(ceiling, ubs_nrt)
    return c_rt, c_nrt
