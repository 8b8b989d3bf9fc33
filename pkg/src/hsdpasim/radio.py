"""Per-UE radio abstraction: path loss, shadowing, SINR, CQI reporting, AMC and HARQ decode."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import TTI_US, US_PER_S

# Six AMC schemes in fixed CQI order (index 1..6); CQI 0 means nothing decodable.
# tbs = 480 symbols/TTI/code * bits_per_symbol * code_rate * num_codes
SYMBOLS_PER_TTI_PER_CODE = 480  # 3.84 Mcps * 2 ms / SF 16

AMC_SCHEMES = (
    ("QPSK1/4", 2, 0.25),
    ("QPSK1/2", 2, 0.5),
    ("QPSK3/4", 2, 0.75),
    ("16QAM1/4", 4, 0.25),
    ("16QAM1/2", 4, 0.5),
    ("16QAM3/4", 4, 0.75),
)


@dataclass
class RadioConfig:
    total_power_w: float = 15.0
    hs_power_fraction: float = 0.5
    noise_w: float = 1.214e-13
    pl_intercept_db: float = 148.0
    pl_slope_db: float = 40.0
    sigma_db: float = 8.0
    test_ue_sigma_db: float = 0.0
    decorrelation_m: float = 20.0
    static_resample_s: float = 1.0
    num_codes: int = 5
    cqi_latency_us: int = 6_000
    harq_feedback_us: int = 5_000
    harq_processes: int = 4
    harq_max_tx: int = 4
    cqi_thresholds_db: tuple = (-2.0, 1.0, 4.0, 7.0, 10.0, 13.0)
    cqi_backoff_db: float = 5.0
    bler_at_threshold: float = 0.1
    bler_decade_db: float = 2.0
    combining_gain_db: float = 3.0
    test_ue_distance_km: float = 0.2
    test_ue_speed_kmh: float = 3.0
    inner_ring_users: int = 4
    inner_r_min_km: float = 0.15
    inner_r_max_km: float = 0.35
    outer_r_min_km: float = 0.5
    outer_r_max_km: float = 1.0
    reorder_timeout_ms: int = 100

    def hs_power_w(self) -> float:
        return self.total_power_w * self.hs_power_fraction

    def tbs_bits(self, cqi: int) -> int:
        if cqi < 1 or cqi > len(AMC_SCHEMES):
            raise ValueError(f"no AMC scheme for cqi {cqi}")
        _, bps, rate = AMC_SCHEMES[cqi - 1]
        return round(SYMBOLS_PER_TTI_PER_CODE * bps * rate * self.num_codes)


def path_loss_db(cfg: RadioConfig, distance_km: float) -> float:
    if distance_km <= 0:
        raise ValueError(f"distance must be positive, got {distance_km}")
    return cfg.pl_intercept_db + cfg.pl_slope_db * math.log10(distance_km)


def sinr_db(cfg: RadioConfig, distance_km: float, shadowing_db: float) -> float:
    budget = 10.0 * math.log10(cfg.hs_power_w() / cfg.noise_w)
    return budget - path_loss_db(cfg, distance_km) - shadowing_db


def cqi_from_sinr(cfg: RadioConfig, sinr: float) -> int:
    cqi = 0
    for i, th in enumerate(cfg.cqi_thresholds_db):
        if sinr >= th:
            cqi = i + 1
        else:
            break
    return cqi


def decode_success_prob(cfg: RadioConfig, cqi: int, sinr: float, tx_count: int) -> float:
    """First-transmission BLER hits bler_at_threshold exactly at the scheme threshold;
    each retransmission adds Chase-combining gain."""
    effective = sinr + cfg.combining_gain_db * (tx_count - 1)
    theta = cfg.cqi_thresholds_db[cqi - 1]
    bler = cfg.bler_at_threshold * 10.0 ** (-(effective - theta) / cfg.bler_decade_db)
    return 1.0 - min(1.0, bler)


def advance_shadowing(rng, prev_db: float, moved_m: float, sigma_db: float,
                      decorrelation_m: float) -> float:
    """Gudmundson-style spatially correlated sample; moved_m == 0 keeps the value."""
    if sigma_db <= 0.0:
        return 0.0
    if moved_m <= 0.0:
        return prev_db
    rho = math.exp(-moved_m / decorrelation_m)
    return rho * prev_db + sigma_db * math.sqrt(1.0 - rho * rho) * rng.gauss(0.0, 1.0)


class UeChannel:
    """Channel state for one UE; keeps the short CQI history needed for delayed reports."""

    __slots__ = ("cfg", "ue_id", "distance0_km", "speed_kmh", "sigma_db",
                 "shadowing_db", "_updated_at", "_cqi_changes")

    def __init__(self, cfg: RadioConfig, ue_id: int, distance_km: float,
                 speed_kmh: float, sigma_db: float, initial_shadow_db: float = 0.0):
        self.cfg = cfg
        self.ue_id = ue_id
        self.distance0_km = distance_km
        self.speed_kmh = speed_kmh
        self.sigma_db = sigma_db if sigma_db > 0 else 0.0
        self.shadowing_db = initial_shadow_db if self.sigma_db > 0 else 0.0
        self._updated_at = 0
        # (time_us, cqi) change points; reported CQI lags by cqi_latency_us
        self._cqi_changes = [(0, self._compute_cqi(0))]

    def distance_km(self, now: int) -> float:
        return self.distance0_km + self.speed_kmh / 3600.0 * (now / US_PER_S)

    def sinr(self, now: int) -> float:
        return sinr_db(self.cfg, self.distance_km(now), self.shadowing_db)

    def _compute_cqi(self, now: int) -> int:
        return cqi_from_sinr(self.cfg, self.sinr(now) - self.cfg.cqi_backoff_db)

    def _record_cqi(self, now: int) -> None:
        cqi = self._compute_cqi(now)
        changes = self._cqi_changes
        if changes[-1][1] != cqi:
            changes.append((now, cqi))
            horizon = now - 4 * self.cfg.cqi_latency_us
            if len(changes) > 8 and changes[1][0] < horizon:
                while len(changes) > 2 and changes[1][0] < horizon:
                    changes.pop(0)

    def advance(self, now: int, rng) -> None:
        """Move the UE and evolve correlated shadowing up to `now` (moving UEs)."""
        moved_m = self.speed_kmh / 3.6 * ((now - self._updated_at) / US_PER_S)
        self.shadowing_db = advance_shadowing(
            rng, self.shadowing_db, moved_m, self.sigma_db, self.cfg.decorrelation_m)
        self._updated_at = now
        self._record_cqi(now)

    def resample_shadowing(self, now: int, rng) -> None:
        """Independent redraw (static UEs, decorrelated once per resample period)."""
        if self.sigma_db > 0:
            self.shadowing_db = rng.gauss(0.0, self.sigma_db)
        self._updated_at = now
        self._record_cqi(now)

    def reported_cqi(self, now: int) -> int:
        """CQI as the Node B sees it: the value computed cqi_latency_us ago."""
        t = now - self.cfg.cqi_latency_us
        changes = self._cqi_changes
        for i in range(len(changes) - 1, -1, -1):
            if changes[i][0] <= t:
                return changes[i][1]
        return changes[0][1]


class HarqProcess:
    """One stop-and-wait HARQ process: carries a transport block until ACK or abandon."""

    __slots__ = ("pid", "block", "tx_count", "awaiting_feedback", "needs_retx")

    def __init__(self, pid: int):
        self.pid = pid
        self.block = None
        self.tx_count = 0
        self.awaiting_feedback = False
        self.needs_retx = False

    @property
    def idle(self) -> bool:
        return self.block is None

    def load(self, block) -> None:
        if self.block is not None:
            raise RuntimeError(f"HARQ process {self.pid} busy")
        self.block = block
        self.tx_count = 0
        self.needs_retx = False

    def release(self):
        block = self.block
        self.block = None
        self.tx_count = 0
        self.awaiting_feedback = False
        self.needs_retx = False
        return block
