"""High-speed-train scenario: speed-dependent receive beam width.

The train runs along a straight track (the x axis) served by trackside
base stations at ``(along, lateral)``. The receive beam narrows as the
train speeds up so that ``f_dmax * theta_rx`` stays roughly constant.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .approx import approx_shift_spread
from .core import (
    BeamdopplerWarning,
    classify_region,
    kmh_to_mps,
    max_doppler,
    support_bounds,
)

TRACE_SCHEMA = "beamdoppler-trace/1"
TRACE_COLUMNS = (
    "t_s",
    "position_m",
    "speed_mps",
    "serving_bs",
    "theta_v_rad",
    "theta_rx_rad",
    "f_dmax_hz",
    "shift_hz",
    "spread_hz",
    "handover",
)


class ConfigError(ValueError):
    """Scenario configuration violates its schema; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class BeamPolicy:
    """Receive beam width ``coefficient / (f_c[GHz] * v[km/h])`` degrees, clamped.

    Below ``v_low_kmh`` the widest beam is used.
    """

    coefficient: float = 1.4e4
    theta_max_deg: float = 10.0
    theta_min_deg: float = 1.0
    v_low_kmh: float = 50.0

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ConfigError("policy.coefficient", "must be > 0")
        if not 0 < self.theta_min_deg <= self.theta_max_deg:
            raise ConfigError("policy.theta_min_deg", "need 0 < theta_min_deg <= theta_max_deg")
        if not self.v_low_kmh >= 0:
            raise ConfigError("policy.v_low_kmh", "must be >= 0")

    @classmethod
    def fixed(cls, theta_deg: float) -> "BeamPolicy":
        return cls(theta_max_deg=theta_deg, theta_min_deg=theta_deg)


def beamwidth_for(speed_kmh: float, carrier_ghz: float, policy: BeamPolicy = BeamPolicy()) -> float:
    """Receive half-power beam width in degrees."""
    if not carrier_ghz > 0:
        raise ValueError("carrier must be > 0 GHz")
    if not speed_kmh >= 0:
        raise ValueError("speed must be >= 0 km/h")
    if speed_kmh <= policy.v_low_kmh:
        return policy.theta_max_deg
    raw = policy.coefficient / (carrier_ghz * speed_kmh)
    return min(policy.theta_max_deg, max(policy.theta_min_deg, raw))


def theta_v_of(position: float, bs: Sequence[float], heading: float = 1.0) -> float:
    """Angle between the velocity vector and the line of sight to ``bs``.

    0 when the station is straight ahead, pi/2 abeam, pi behind.
    """
    along, lateral = bs
    if not lateral > 0:
        raise ValueError("base-station lateral offset must be > 0")
    return math.atan2(lateral, (along - position) * math.copysign(1.0, heading))


def select_bs(position: float, stations: Sequence[Sequence[float]], current: int | None = None, hysteresis: float = 0.0) -> int:
    """Nearest station (ties to the lower index).

    With ``current`` and ``hysteresis`` a switch needs the new station to be
    closer by more than ``hysteresis`` metres.
    """
    if not stations:
        raise ValueError("no base stations")
    dists = [math.hypot(along - position, lateral) for along, lateral in stations]
    best = min(range(len(dists)), key=lambda i: (dists[i], i))
    if current is not None and best != current and dists[current] - dists[best] <= hysteresis:
        return current
    return best


@dataclass
class ScenarioConfig:
    track_length: float
    bs_positions: list[tuple[float, float]]
    speed_profile: list[tuple[float, float]]
    carrier: float
    policy: BeamPolicy = field(default_factory=BeamPolicy)
    time_step: float = 0.01
    mode: str = "approx"
    hysteresis: float = 0.0
    start_position: float = 0.0

    def __post_init__(self):
        if not self.track_length > 0:
            raise ConfigError("track_length_m", "must be > 0")
        if not self.bs_positions:
            raise ConfigError("base_stations", "need at least one base station")
        for i, (along, lateral) in enumerate(self.bs_positions):
            if not lateral > 0:
                raise ConfigError(f"base_stations[{i}]", "lateral offset must be > 0")
        if not self.speed_profile:
            raise ConfigError("speed_profile_kmh", "need at least one (t, speed) point")
        times = [t for t, _ in self.speed_profile]
        if times[0] != 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("speed_profile_kmh", "times must start at 0 and strictly increase")
        if any(not v >= 0 for _, v in self.speed_profile):
            raise ConfigError("speed_profile_kmh", "speeds must be >= 0")
        if not self.carrier > 0:
            raise ConfigError("carrier_hz", "must be > 0")
        if not self.time_step > 0:
            raise ConfigError("time_step_s", "must be > 0")
        if self.mode not in ("approx", "exact"):
            raise ConfigError("mode", "must be 'approx' or 'exact'")
        if not self.hysteresis >= 0:
            raise ConfigError("hysteresis_m", "must be >= 0")

    @property
    def duration(self) -> float:
        return self.speed_profile[-1][0]

    def speed_at(self, t):
        """Speed in m/s (profile is stored in m/s, held after the last point)."""
        times = [p[0] for p in self.speed_profile]
        speeds = [p[1] for p in self.speed_profile]
        return np.interp(t, times, speeds)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        """Build from the JSON schema (speeds in km/h, angles in degrees)."""
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected a JSON object")
        known = {
            "track_length_m", "base_stations", "speed_profile_kmh", "carrier_hz",
            "time_step_s", "policy", "mode", "hysteresis_m", "start_position_m", "schema",
        }
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        for key in ("track_length_m", "base_stations", "speed_profile_kmh", "carrier_hz"):
            if key not in data:
                raise ConfigError(key, "required field missing")

        def number(key, value):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(key, f"expected a number, got {value!r}")
            return float(value)

        def pairs(key, value):
            if not isinstance(value, list):
                raise ConfigError(key, "expected a list of [a, b] pairs")
            out = []
            for i, item in enumerate(value):
                if isinstance(item, dict) and key == "base_stations":
                    item = [item.get("along_m"), item.get("lateral_m")]
                if not isinstance(item, (list, tuple)) or len(item) != 2:
                    raise ConfigError(f"{key}[{i}]", "expected a pair")
                out.append((number(f"{key}[{i}]", item[0]), number(f"{key}[{i}]", item[1])))
            return out

        policy_data = data.get("policy", {})
        if not isinstance(policy_data, dict):
            raise ConfigError("policy", "expected an object")
        policy_keys = {"coefficient": "coefficient", "theta_max_deg": "theta_max_deg",
                       "theta_min_deg": "theta_min_deg", "v_low_kmh": "v_low_kmh"}
        kwargs = {}
        for key, value in policy_data.items():
            if key not in policy_keys:
                raise ConfigError(f"policy.{key}", "unknown field")
            kwargs[policy_keys[key]] = number(f"policy.{key}", value)
        mode = data.get("mode", "approx")
        if not isinstance(mode, str):
            raise ConfigError("mode", "expected a string")
        profile = [(t, kmh_to_mps(v)) for t, v in pairs("speed_profile_kmh", data["speed_profile_kmh"])]
        for t, v in profile:
            if v < 0:
                raise ConfigError("speed_profile_kmh", "speeds must be >= 0")
        return cls(
            track_length=number("track_length_m", data["track_length_m"]),
            bs_positions=pairs("base_stations", data["base_stations"]),
            speed_profile=profile,
            carrier=number("carrier_hz", data["carrier_hz"]),
            policy=BeamPolicy(**kwargs),
            time_step=number("time_step_s", data.get("time_step_s", 0.01)),
            mode=mode,
            hysteresis=number("hysteresis_m", data.get("hysteresis_m", 0.0)),
            start_position=number("start_position_m", data.get("start_position_m", 0.0)),
        )

    def to_dict(self) -> dict:
        return {
            "schema": "beamdoppler-scenario/1",
            "track_length_m": self.track_length,
            "base_stations": [list(p) for p in self.bs_positions],
            "speed_profile_kmh": [[t, v * 3.6] for t, v in self.speed_profile],
            "carrier_hz": self.carrier,
            "time_step_s": self.time_step,
            "policy": asdict(self.policy),
            "mode": self.mode,
            "hysteresis_m": self.hysteresis,
            "start_position_m": self.start_position,
        }

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass
class ScenarioTrace:
    t: np.ndarray
    position: np.ndarray
    speed: np.ndarray
    serving_bs: np.ndarray
    theta_v: np.ndarray
    theta_rx: np.ndarray
    f_dmax: np.ndarray
    shift: np.ndarray
    spread: np.ndarray
    handover: np.ndarray

    def __len__(self):
        return self.t.size

    @property
    def handover_count(self) -> int:
        return int(self.handover.sum())

    def abeam_rows(self, stations) -> list[int]:
        """Row closest to each station it serves while passing abeam."""
        rows = []
        for k, (along, _) in enumerate(stations):
            served = np.flatnonzero(self.serving_bs == k)
            if served.size == 0:
                continue
            gap = np.abs(self.position[served] - along)
            best = served[np.argmin(gap)]
            # station passed within the trace, not just approached
            if self.position[0] <= along <= self.position[-1]:
                rows.append(int(best))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {TRACE_SCHEMA}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for i in range(len(self)):
            writer.writerow(
                [
                    repr(float(self.t[i])),
                    repr(float(self.position[i])),
                    repr(float(self.speed[i])),
                    int(self.serving_bs[i]),
                    repr(float(self.theta_v[i])),
                    repr(float(self.theta_rx[i])),
                    repr(float(self.f_dmax[i])),
                    repr(float(self.shift[i])),
                    repr(float(self.spread[i])),
                    int(self.handover[i]),
                ]
            )
        return buf.getvalue()


def simulate(config: ScenarioConfig) -> ScenarioTrace:
    """Step the train along the track and record per-step Doppler figures.

    Position is integrated from the speed profile with the trapezoidal rule.
    The run ends at the last speed-profile time or at the end of the track.
    """
    steps = int(math.floor(config.duration / config.time_step + 1e-9)) + 1
    times = np.arange(steps) * config.time_step
    speeds = config.speed_at(times)
    increments = 0.5 * (speeds[1:] + speeds[:-1]) * config.time_step
    positions = config.start_position + np.concatenate(([0.0], np.cumsum(increments)))
    beyond = np.flatnonzero(positions > config.track_length)
    if beyond.size:
        stop = beyond[0]
        times, speeds, positions = times[:stop], speeds[:stop], positions[:stop]

    n = times.size
    serving = np.zeros(n, dtype=np.int64)
    theta_v = np.zeros(n)
    theta_rx = np.zeros(n)
    f_dmax = np.zeros(n)
    shift = np.zeros(n)
    spread = np.zeros(n)
    handover = np.zeros(n, dtype=np.int64)
    carrier_ghz = config.carrier / 1e9
    current = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BeamdopplerWarning)
        for i in range(n):
            pos = float(positions[i])
            chosen = select_bs(pos, config.bs_positions, current, config.hysteresis)
            handover[i] = int(current is not None and chosen != current)
            current = chosen
            serving[i] = chosen
            tv = theta_v_of(pos, config.bs_positions[chosen])
            width = math.radians(beamwidth_for(speeds[i] * 3.6, carrier_ghz, config.policy))
            fd = max_doppler(float(speeds[i]), config.carrier)
            if config.mode == "exact":
                region = classify_region(tv, width)
                lo, hi = support_bounds(region, tv, width, fd)
                sh, sp = 0.5 * (lo + hi), hi - lo
            else:
                est = approx_shift_spread(tv, width, fd)
                sh, sp = est.shift, est.spread
            theta_v[i], theta_rx[i], f_dmax[i], shift[i], spread[i] = tv, width, fd, sh, sp
    return ScenarioTrace(times, positions, speeds, serving, theta_v, theta_rx, f_dmax, shift, spread, handover)


def demo_config(policy: BeamPolicy | None = None, mode: str = "approx") -> ScenarioConfig:
    """Reference run: 28 GHz, 50 -> 500 km/h at 0.5 m/s^2, then cruising.

    Stations sit every 2 km at 10 m from the track, the first one abeam of
    the start point.
    """
    accel_time = (kmh_to_mps(500.0) - kmh_to_mps(50.0)) / 0.5
    return ScenarioConfig(
        track_length=25_000.0,
        bs_positions=[(2000.0 * k, 10.0) for k in range(12)],
        speed_profile=[(0.0, kmh_to_mps(50.0)), (accel_time, kmh_to_mps(500.0)), (accel_time + 60.0, kmh_to_mps(500.0))],
        carrier=28e9,
        policy=policy or BeamPolicy(),
        time_step=0.01,
        mode=mode,
    )
