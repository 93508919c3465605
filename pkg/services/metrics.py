"""
Metrics service

Efficiency, fairness index and cell loss ratio, and the assembly of a
RunResult from the counters of a finished simulation.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from core.errors import AccountingError
from core.simulator import to_seconds
from core.topology import Network, bdp_cells
from engines.atm_adaptation import efficiency_ceiling
from models.run_result import RunResult
from models.tcp_state import DEFAULT_MSS

logger = logging.getLogger(__name__)

BITS_PER_MEGABIT = 1e6
EFFICIENCY_SLACK = 1e-9


def efficiency(goodputs: Sequence[float], link_rate: float, mss: int = DEFAULT_MSS) -> float:
    """
    Sum of TCP goodputs over the maximum TCP-attainable throughput

    Args:
        goodputs: Per-VC goodput in Mbps
        link_rate: Cell-layer link rate in Mbps
        mss: Segment size the ceiling is computed for

    Returns:
        sum(goodputs) / (efficiency_ceiling(mss) * link_rate)

    Raises:
        AccountingError: If any goodput is negative
    """
    values = np.asarray(goodputs, dtype=float)
    if values.size and values.min() < 0:
        raise AccountingError(f"Negative goodput in {list(goodputs)}")
    return float(math.fsum(values)) / (efficiency_ceiling(mss) * link_rate)


def fairness_index(goodputs: Sequence[float]) -> Optional[float]:
    """
    (sum x)^2 / (N * sum x^2)

    Args:
        goodputs: Per-VC goodputs (any consistent unit)

    Returns:
        Index in [1/N, 1], or None when every goodput is zero
    """
    values = np.asarray(goodputs, dtype=float)
    if values.size == 0:
        raise ValueError("fairness_index needs at least one value")
    if values.min() < 0:
        raise AccountingError(f"Negative goodput in {list(goodputs)}")
    total = math.fsum(values)
    if total == 0:
        return None
    return total * total / (values.size * math.fsum(values * values))


def cell_loss_ratio(dropped: int, offered: int) -> float:
    """
    Cells discarded over cells transmitted

    Raises:
        AccountingError: If dropped exceeds offered or either is negative
    """
    if dropped < 0 or offered < 0 or dropped > offered:
        raise AccountingError(f"Cannot have {dropped} cells dropped out of {offered} offered")
    if offered == 0:
        return 0.0
    return dropped / offered


def audit_conservation(net: Network):
    """
    End-of-run conservation checks

    Raises:
        AccountingError: If a buffer's books do not balance or a receiver got
            more bytes than its sender ever sent
    """
    for buffer in net.buffers:
        buffer.check_accounting()
    for source, sink in zip(net.sources, net.sinks):
        sent = source.sender.state.snd_nxt
        if sink.bytes_delivered > sent:
            raise AccountingError(
                f"{sink.name} delivered {sink.bytes_delivered} bytes but {source.name} sent {sent}"
            )


def build_run_result(net: Network, events_processed: int = 0) -> RunResult:
    """
    Compute the metrics of a finished run

    Args:
        net: Network after Network.run()
        events_processed: Event count returned by the run

    Returns:
        RunResult for the scenario
    """
    cfg = net.cfg
    audit_conservation(net)

    window = cfg.duration - cfg.warmup
    goodput_bytes = [sink.goodput_bytes for sink in net.sinks]
    goodput_mbps = [b * 8 / window / BITS_PER_MEGABIT for b in goodput_bytes]
    link_mbps = cfg.scaled_link_rate / BITS_PER_MEGABIT

    eff = efficiency(goodput_mbps, link_mbps, cfg.scaled_mss)
    if eff > 1 + EFFICIENCY_SLACK:
        raise AccountingError(f"Efficiency {eff:.6f} exceeds the AAL5 ceiling")
    fairness = fairness_index(goodput_mbps)
    if fairness is None:
        logger.warning(f"No goodput at all for {cfg!r}")

    buffers = net.buffers
    selective = sum(b.cells_dropped_selective for b in buffers)
    overflow = sum(b.cells_dropped_overflow for b in buffers)
    policed = sum(port.cells_filtered for port in net.ports)
    offered = net.host_cells_emitted
    clr = cell_loss_ratio(selective + overflow + policed, offered)

    now = net.sim.now
    switch_stats = net.bottleneck.get_stats(now)
    switch_stats['max_queueing_delay_s'] = switch_stats['max_occupancy'] * net.satellite_spec.cell_time
    switch_stats['cells_non_conforming'] = sum(p.cells_non_conforming for p in net.policers)

    tcp_stats = {}
    for source in net.sources:
        st = source.sender.state
        for key in ('segments_sent', 'segments_retransmitted', 'fast_retransmits', 'timeouts'):
            tcp_stats[key] = tcp_stats.get(key, 0) + getattr(st, key)

    result = RunResult(
        scenario=cfg.scenario_class,
        n_sources=cfg.n_sources,
        buffer_cells=cfg.buffer_cells,
        buffer_rtt_fraction=cfg.buffer_cells / bdp_cells(cfg) if bdp_cells(cfg) > 0 else 0.0,
        seed=cfg.seed,
        duration_s=cfg.duration,
        per_vc_goodput_bytes=goodput_bytes,
        per_vc_goodput_mbps=goodput_mbps,
        efficiency=min(eff, 1.0),
        fairness=fairness,
        clr=clr,
        cells_dropped_selective=selective,
        cells_dropped_overflow=overflow,
        cells_dropped_policer=policed,
        cells_offered=offered,
        policy=cfg.policy,
        scale=cfg.scale,
        switch_stats=switch_stats,
        tcp_stats=tcp_stats,
        events_processed=events_processed,
        trace_digest=net.sim.trace_digest
    )
    logger.debug(
        f"Run finished at {to_seconds(now):.3f}s: eff={eff:.4f}, clr={clr:.6f}, "
        f"max queueing delay {switch_stats['max_queueing_delay_s'] * 1000:.2f} ms"
    )
    return result
