"""
Topology builder - the N-source, two-switch satellite configuration and the
quantities derived from a scenario (RTT, delay-bandwidth product, buffer grids)
"""
import logging
from typing import Dict, List

import numpy as np

from core.errors import ConfigError
from core.simulator import CELL_BITS, Simulator, to_ticks
from engines.atm_adaptation import cells_for_payload, efficiency_ceiling
from engines.network_elements import (
    EVENT_START, EVENT_WARMUP, Link, OutputPort, SinkHost, SourceHost, Switch
)
from engines.tcp_endpoint import TcpSender
from engines.traffic_contract import Policer
from engines.ubr_switch import SwitchBuffer
from models.cell import Cell
from models.scenario import ScenarioConfig, SweepSpec
from models.tcp_state import TcpConnState
from models.traffic import TrafficDescriptor

logger = logging.getLogger(__name__)

# Buffer sizes quoted for each latency class, in cells
STUDY_BUFFER_LISTS: Dict[str, List[int]] = {
    ScenarioConfig.CLASS_LEO: [375, 750, 1500, 3000, 6000, 12000, 24000, 36000],
    ScenarioConfig.CLASS_MLEO: [780, 1560, 3125, 6250, 12500, 50000, 100000],
    ScenarioConfig.CLASS_GEO: [3375, 6750, 12500, 25000, 50000, 100000, 200000, 400000],
}

# Switch output ports a cell crosses between two end systems
SWITCH_HOPS = 2

# Tolerance absorbing the half-tick rounding of cell departures
DEFAULT_POLICER_CDVT = 1e-6


class LinkSpec:
    """Rate and propagation delay of one link"""

    def __init__(self, rate: float, prop_delay: float):
        """
        Initialize LinkSpec

        Args:
            rate: Cell-layer rate in bits per second
            prop_delay: One-way propagation delay in seconds
        """
        errors = []
        if rate is None or rate <= 0:
            errors.append("rate must be > 0")
        if prop_delay is None or prop_delay < 0:
            errors.append("prop_delay must be >= 0")
        if errors:
            raise ConfigError(f"Link validation failed: {'; '.join(errors)}", field='link')
        self.rate = rate
        self.prop_delay = prop_delay

    @property
    def cell_time(self) -> float:
        """Seconds to serialize one cell"""
        return CELL_BITS / self.rate

    def __repr__(self) -> str:
        return f"LinkSpec(rate={self.rate}, prop_delay={self.prop_delay})"


def round_trip_time(cfg: ScenarioConfig) -> float:
    """
    Round-trip propagation time of the path, queueing and serialization excluded

    Args:
        cfg: Scenario

    Returns:
        2 * (2 * access_delay + interswitch_delay) seconds
    """
    return 2 * (2 * cfg.access_delay + cfg.interswitch_delay)


def bdp_cells(cfg: ScenarioConfig) -> float:
    """Delay-bandwidth product of the unscaled link, in cells"""
    return round_trip_time(cfg) * cfg.link_rate / CELL_BITS


def buffer_for_fraction(cfg: ScenarioConfig, fraction: float) -> int:
    """fraction * RTT at the cell-layer rate, rounded to the nearest cell"""
    return int(round(fraction * bdp_cells(cfg)))


def buffer_grid(cfg: ScenarioConfig) -> List[int]:
    """
    Buffer sizes at 2, 1, 0.5, ... 0.016 times the delay-bandwidth product

    Args:
        cfg: Scenario

    Returns:
        Buffer capacities in cells, largest first
    """
    return [buffer_for_fraction(cfg, fraction) for fraction in SweepSpec.DEFAULT_FRACTIONS]


def window_bound_efficiency(cfg: ScenarioConfig) -> float:
    """
    Efficiency a single lossless connection reaches when only its window limits it

    Only whole segments fit in the window, and each one completes a round trip
    of RTT plus the time to clock its frame and ACK through the path: the
    frame serialized at the source, the ACK at the sink, and one cell time per
    switch port in each direction.

    Args:
        cfg: Scenario

    Returns:
        min(1, floor(wnd / mss) * mss / cycle / (ceiling * link_rate)) with scaled rate, window and mss
    """
    mss = cfg.scaled_mss
    rate = cfg.scaled_link_rate
    segments = cfg.scaled_rcv_wnd // mss
    serialization_cells = cells_for_payload(mss) + cells_for_payload(0) + 2 * SWITCH_HOPS
    cycle = round_trip_time(cfg) + serialization_cells * CELL_BITS / rate
    window_rate = segments * mss * 8 / cycle
    return min(1.0, window_rate / (efficiency_ceiling(mss) * rate))


class Network:
    """A wired simulation ready to run"""

    def __init__(self, cfg: ScenarioConfig, sim: Simulator):
        self.cfg = cfg
        self.sim = sim
        self.sources: List[SourceHost] = []
        self.sinks: List[SinkHost] = []
        self.switches: List[Switch] = []
        self.ports: List[OutputPort] = []
        self.links: List[Link] = []
        self.policers: List[Policer] = []
        self.bottleneck: SwitchBuffer = None
        self.satellite_links: List[Link] = []
        self.start_times: List[int] = []
        self.access_spec: LinkSpec = None
        self.satellite_spec: LinkSpec = None

    @property
    def buffers(self) -> List[SwitchBuffer]:
        return [port.buffer for port in self.ports if port.buffer is not None]

    @property
    def host_cells_emitted(self) -> int:
        return sum(h.cells_emitted for h in self.sources) + sum(h.cells_emitted for h in self.sinks)

    def audit(self):
        """Accounting and work-conservation checks over every element"""
        for buffer in self.buffers:
            buffer.check_accounting()
        for port in self.ports:
            port.check_work_conserving()

    def run(self) -> int:
        """
        Simulate cfg.duration seconds

        Returns:
            Number of events processed
        """
        return self.sim.run_until(to_ticks(self.cfg.duration))


def _policer_descriptor(cfg: ScenarioConfig) -> TrafficDescriptor:
    if cfg.contract is not None:
        return cfg.contract
    return TrafficDescriptor(pcr=cfg.scaled_link_rate / CELL_BITS, cdvt=DEFAULT_POLICER_CDVT)


def build(cfg: ScenarioConfig, record_trace: bool = False) -> Network:
    """
    Wire N sources, two switches, the satellite link and N sinks

    Forward path: source NIC -> switch-1 -> satellite -> switch-2 -> sink.
    ACKs return through switch-2 and switch-1 on reverse ports with buffers of
    the same capacity.

    Args:
        cfg: Validated scenario
        record_trace: Hash every processed event

    Returns:
        Network with every component registered and start events queued
    """
    audit_interval = Simulator.DEFAULT_AUDIT_INTERVAL if cfg.debug else 0
    sim = Simulator(record_trace=record_trace, audit_interval=audit_interval)
    net = Network(cfg, sim)

    rate = cfg.scaled_link_rate
    capacity = cfg.scaled_buffer_cells
    net.access_spec = LinkSpec(rate, cfg.access_delay)
    net.satellite_spec = LinkSpec(rate, cfg.interswitch_delay)
    access_ticks = to_ticks(net.access_spec.prop_delay)
    satellite_ticks = to_ticks(net.satellite_spec.prop_delay)
    descriptor = _policer_descriptor(cfg)

    def make_buffer(name: str) -> SwitchBuffer:
        return SwitchBuffer(capacity, cfg.policy, cfg.threshold_r, cfg.threshold_z, name=name)

    def make_port(name: str, prop_ticks: int, egress: str, buffered: bool, egress_filter=None) -> OutputPort:
        link = Link(sim, f"{name}-link", prop_ticks, egress)
        port = OutputPort(sim, name, rate, link, make_buffer(name) if buffered else None, egress_filter)
        net.links.append(link)
        net.ports.append(port)
        return port

    switch_1 = Switch(sim, 'switch-1')
    switch_2 = Switch(sim, 'switch-2')
    net.switches = [switch_1, switch_2]

    uplink = make_port('switch-1.sat', satellite_ticks, switch_2.name, buffered=True)
    downlink = make_port('switch-2.sat', satellite_ticks, switch_1.name, buffered=True)
    net.bottleneck = uplink.buffer
    net.satellite_links = [uplink.link, downlink.link]

    rng = np.random.default_rng(cfg.seed)
    jitter = rng.uniform(0.0, cfg.start_jitter, size=cfg.n_sources)

    for vc_id in range(cfg.n_sources):
        state = TcpConnState(
            rcv_wnd=cfg.scaled_rcv_wnd,
            mss=cfg.scaled_mss,
            initial_rto=cfg.initial_rto,
            min_rto=cfg.min_rto,
            max_rto=cfg.max_rto,
            granularity=cfg.timer_granularity
        )
        policer = Policer(descriptor, enforce=cfg.police)
        source = SourceHost(sim, f"source-{vc_id}", vc_id, TcpSender(state, f"tcp-{vc_id}"), policer)
        sink = SinkHost(sim, f"sink-{vc_id}", vc_id)

        source.attach(make_port(f"{source.name}.nic", access_ticks, switch_1.name, False, source.police))
        sink.attach(make_port(f"{sink.name}.nic", access_ticks, switch_2.name, buffered=False))

        switch_1.add_route(Cell.DIRECTION_FORWARD, vc_id, uplink)
        switch_1.add_route(Cell.DIRECTION_REVERSE, vc_id,
                           make_port(f"switch-1.vc{vc_id}", access_ticks, source.name, buffered=True))
        switch_2.add_route(Cell.DIRECTION_FORWARD, vc_id,
                           make_port(f"switch-2.vc{vc_id}", access_ticks, sink.name, buffered=True))
        switch_2.add_route(Cell.DIRECTION_REVERSE, vc_id, downlink)

        start_at = to_ticks(float(jitter[vc_id]))
        sim.schedule_at(start_at, source.name, EVENT_START)
        if cfg.warmup > 0:
            sim.schedule_at(to_ticks(cfg.warmup), sink.name, EVENT_WARMUP)

        net.sources.append(source)
        net.sinks.append(sink)
        net.policers.append(policer)
        net.start_times.append(start_at)

    if cfg.debug:
        sim.add_audit(net.audit)

    logger.info(
        f"Built {cfg.scenario_class} network: N={cfg.n_sources}, K={capacity} cells, mss={cfg.scaled_mss}, "
        f"rate={rate / 1e6:.3f} Mbps, RTT={round_trip_time(cfg) * 1000:.1f} ms"
    )
    return net
