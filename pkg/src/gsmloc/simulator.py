"""Deterministic discrete-event execution of the ranging protocol.

One exchange: the mobile broadcasts a timestamped request; every tower that
receives it answers with an acknowledgment carrying its own coordinates and
the request's original timestamp, so only the mobile's clock ever matters.
The mobile timestamps each ack on arrival (through its finite-resolution
clock), converts the first three turn-around times to ranges, and solves
for its position.

Propagation is straight-line at the timing model's speed with no fading or
multipath. The event queue is strictly single-threaded; ties are broken by
(time, kind, tower id) so traces are byte-reproducible. Randomness enters
only through the optional packet-loss knob, drawn from a PRNG seeded by
(rng_seed, trial_index), making every trial a pure function of its config.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ConfigError, InsufficientMeasurementsError
from .geometry import Point3, TowerSite, distance
from .timing import TimingModel, distance_from_turnaround, percent_error, quantize
from .trilateration import NONNEGATIVE, LocationFix, RangeMeasurement, solve_position


class EventKind(IntEnum):
    """Event ordering for equal times: requests land before acks."""

    REQUEST_ARRIVES = 0
    ACK_ARRIVES = 1


@dataclass(frozen=True)
class RequestPacket:
    """Mobile's broadcast: the send timestamp plus its own identifier."""

    timestamp: float  # seconds
    mob_id: str

    def __post_init__(self):
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.timestamp}")


@dataclass(frozen=True)
class AckPacket:
    """Tower's unicast reply echoing the request's original timestamp."""

    destination: str
    tower: int
    tower_coord: Point3
    timestamp: float  # the echoed request timestamp, unmodified


@dataclass(frozen=True)
class Event:
    """One arrival in the exchange, as recorded in the trace."""

    time: float
    kind: EventKind
    tower_id: int
    payload: RequestPacket | AckPacket


@dataclass(frozen=True)
class Trace:
    """Ordered event log of one exchange plus the context to re-derive ranges."""

    events: tuple[Event, ...]
    timing: TimingModel
    towers: tuple[TowerSite, ...]
    mobile_id: str


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated exchange: geometry, timing, and reproducibility knobs.

    tower_processing_delay is the fixed per-tower turnaround applied before
    the ack leaves; at the mobile it is indistinguishable from any other
    constant delay, so recovery is exact when timing.alpha equals it.
    packet_loss is an extension beyond the basic protocol and defaults off.
    """

    towers: tuple[TowerSite, ...]
    mobile_true_position: Point3
    timing: TimingModel = field(default_factory=TimingModel)
    tower_processing_delay: float = 0.0
    rng_seed: int = 0
    trials: int = 1
    request_time: float = 0.0
    packet_loss: float = 0.0
    mobile_id: str = "mobile-0"

    def __post_init__(self):
        if len(self.towers) < 3:
            raise ConfigError(f"need at least 3 towers, got {len(self.towers)}")
        ids = [t.id for t in self.towers]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"tower ids must be unique, got {sorted(ids)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.tower_processing_delay < 0:
            raise ConfigError("tower_processing_delay must be non-negative")
        if not 0.0 <= self.packet_loss <= 1.0:
            raise ConfigError(f"packet_loss must be in [0, 1], got {self.packet_loss}")
        if self.request_time < 0:
            raise ConfigError("request_time must be non-negative")


def run_scenario(
    config: ScenarioConfig, trial_index: int = 0
) -> tuple[Trace, list[RangeMeasurement], LocationFix]:
    """Execute one exchange and localize from the first three acks.

    For tower i at distance d_i the request arrives at t0 + d_i/c and the
    ack returns at t0 + 2*d_i/c + tower_processing_delay. Ack arrival
    timestamps pass through the mobile clock's quantization before the
    turn-around time is formed, so a coarse clock degrades the ranges
    exactly as a real kernel timestamp would.

    Returns:
        (trace, measurements, fix) where measurements are the first three
        acks by arrival time (ties by tower id) converted to ranges, and
        fix is the three-tower solve over them.

    Raises:
        InsufficientMeasurementsError: fewer than 3 acks arrived (reachable
            only with packet_loss > 0).
    """
    rng = np.random.default_rng([config.rng_seed, trial_index])
    c = config.timing.c
    t0 = config.request_time
    request = RequestPacket(timestamp=t0, mob_id=config.mobile_id)

    heap: list[tuple[float, int, int, Event]] = []
    # Broadcast: one request per tower, each possibly lost in flight.
    # Draws happen in tower order so loss patterns are reproducible.
    for tower in config.towers:
        if config.packet_loss > 0.0 and rng.random() < config.packet_loss:
            continue
        d = distance(config.mobile_true_position, tower.position)
        arrival = t0 + d / c
        event = Event(arrival, EventKind.REQUEST_ARRIVES, tower.id, request)
        heapq.heappush(heap, (arrival, int(event.kind), tower.id, event))

    site_by_id = {t.id: t for t in config.towers}
    events: list[Event] = []
    while heap:
        _, _, tower_id, event = heapq.heappop(heap)
        events.append(event)
        if event.kind is not EventKind.REQUEST_ARRIVES:
            continue
        # Tower handler: echo the original timestamp after the fixed
        # processing delay; the ack may itself be lost.
        if config.packet_loss > 0.0 and rng.random() < config.packet_loss:
            continue
        tower = site_by_id[tower_id]
        ack = AckPacket(
            destination=event.payload.mob_id,
            tower=tower_id,
            tower_coord=tower.position,
            timestamp=event.payload.timestamp,
        )
        d = distance(config.mobile_true_position, tower.position)
        arrival = event.time + config.tower_processing_delay + d / c
        ack_event = Event(arrival, EventKind.ACK_ARRIVES, tower_id, ack)
        heapq.heappush(heap, (arrival, int(ack_event.kind), tower_id, ack_event))

    trace = Trace(
        events=tuple(events),
        timing=config.timing,
        towers=config.towers,
        mobile_id=config.mobile_id,
    )
    measurements = first_k_acks(trace, 3)
    fix = solve_position(
        [m.tower for m in measurements],
        [m.range_m for m in measurements],
        z_convention=NONNEGATIVE,
    )
    return trace, measurements, fix


def run_trials(config: ScenarioConfig) -> list[tuple[Trace, list[RangeMeasurement], LocationFix]]:
    """Run config.trials independent trials.

    Each trial is a pure function of (config, rng_seed, trial index), so
    results do not depend on execution order and trials may be distributed
    across workers freely.
    """
    return [run_scenario(config, trial_index=i) for i in range(config.trials)]


def first_k_acks(trace: Trace, k: int) -> list[RangeMeasurement]:
    """The first k acknowledgments by arrival time, converted to ranges.

    Arrival order is the trace's event order (ties already broken by tower
    id). Each ack's arrival timestamp is quantized by the trace's clock
    resolution before the turn-around time is formed against the echoed
    send timestamp.

    Raises:
        InsufficientMeasurementsError: if the trace holds fewer than k acks.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    acks = [e for e in trace.events if e.kind is EventKind.ACK_ARRIVES]
    if len(acks) < k:
        raise InsufficientMeasurementsError(f"trace has {len(acks)} acks, need {k}")
    measurements = []
    for event in acks[:k]:
        ack = event.payload
        measured_arrival = quantize(event.time, trace.timing.clock_resolution)
        turnaround = measured_arrival - ack.timestamp
        range_m = distance_from_turnaround(turnaround, trace.timing)
        measurements.append(
            RangeMeasurement(
                tower=TowerSite(ack.tower, ack.tower_coord),
                turnaround=turnaround,
                range_m=range_m,
            )
        )
    return measurements


def format_trace(trace: Trace) -> str:
    """Render a trace as tab-separated lines: time, kind, tower id, detail.

    Times carry 9 decimal digits; lines appear in event (time) order. The
    output is a pure function of the trace, so identical configs produce
    byte-identical files.
    """
    lines = []
    for event in trace.events:
        if event.kind is EventKind.REQUEST_ARRIVES:
            kind = "request_arrives"
            detail = f"mob={event.payload.mob_id} sent={event.payload.timestamp:.9f}"
        else:
            kind = "ack_arrives"
            pos = event.payload.tower_coord
            detail = (
                f"echo={event.payload.timestamp:.9f}"
                f" tower_pos={pos.x:.3f},{pos.y:.3f},{pos.z:.3f}"
            )
        lines.append(f"{event.time:.9f}\t{kind}\t{event.tower_id}\t{detail}")
    return "\n".join(lines) + "\n"


def measurement_csv(measurements: list[RangeMeasurement], true_position: Point3) -> str:
    """Render measurements as CSV mirroring a calibration table's columns.

    Columns: tower_id, turnaround_s, distance_m, actual_m, pct_error. Rows
    keep the measurement order (ascending turn-around time). The percent
    error column is left empty when the actual distance is zero.
    """
    lines = ["tower_id,turnaround_s,distance_m,actual_m,pct_error"]
    for m in measurements:
        actual = distance(true_position, m.tower.position)
        if actual == 0:
            pct = ""
        else:
            pct = f"{percent_error(actual, m.range_m):.2f}"
        lines.append(f"{m.tower.id},{m.turnaround:.9e},{m.range_m:.3f},{actual:.3f},{pct}")
    return "\n".join(lines) + "\n"
