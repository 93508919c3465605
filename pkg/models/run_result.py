"""
Run result data model - measured outcome of one scenario point
"""
from typing import Any, Dict, List, Optional

# Fixed CSV column order
CSV_COLUMNS = [
    'scenario',
    'n_sources',
    'buffer_cells',
    'buffer_rtt_fraction',
    'seed',
    'duration_s',
    'efficiency',
    'fairness',
    'clr',
    'cells_dropped_selective',
    'cells_dropped_overflow',
    'per_vc_goodput_mbps',
]

# Placeholder written when no VC delivered any data
NO_TRAFFIC = 'no-traffic'

GOODPUT_SEPARATOR = ';'


class RunResult:
    """Efficiency, fairness and loss of one run, with the config it came from"""

    def __init__(
        self,
        scenario: str,
        n_sources: int,
        buffer_cells: int,
        buffer_rtt_fraction: float,
        seed: int,
        duration_s: float,
        per_vc_goodput_bytes: List[int],
        per_vc_goodput_mbps: List[float],
        efficiency: float,
        fairness: Optional[float],
        clr: float,
        cells_dropped_selective: int = 0,
        cells_dropped_overflow: int = 0,
        cells_dropped_policer: int = 0,
        cells_offered: int = 0,
        policy: str = 'selective_drop',
        scale: float = 1.0,
        switch_stats: Optional[Dict[str, Any]] = None,
        tcp_stats: Optional[Dict[str, int]] = None,
        events_processed: int = 0,
        trace_digest: Optional[str] = None
    ):
        """
        Initialize a RunResult

        Args:
            scenario: Latency class of the run
            n_sources: Number of TCP sources
            buffer_cells: Configured switch buffer size, before scaling
            buffer_rtt_fraction: buffer_cells over the delay-bandwidth product
            seed: Jitter seed
            duration_s: Simulated seconds
            per_vc_goodput_bytes: Bytes delivered to each destination application
            per_vc_goodput_mbps: The same as Mbps over the measurement window
            efficiency: Sum of goodputs over the maximum TCP throughput
            fairness: Fairness index, None when no VC delivered data
            clr: Cells dropped anywhere over cells sent by end systems
            cells_dropped_selective: Cells discarded by Selective Drop
            cells_dropped_overflow: Cells discarded because a buffer was full
            cells_dropped_policer: Cells discarded by enforcing policers
            cells_offered: Cells sent by all end systems
            policy: Switch drop policy
            scale: Bandwidth scaling factor
            switch_stats: Forward bottleneck statistics
            tcp_stats: Summed sender counters
            events_processed: Simulator events in the run
            trace_digest: Event trace hash, when recorded
        """
        self.scenario = scenario
        self.n_sources = n_sources
        self.buffer_cells = buffer_cells
        self.buffer_rtt_fraction = buffer_rtt_fraction
        self.seed = seed
        self.duration_s = duration_s
        self.per_vc_goodput_bytes = list(per_vc_goodput_bytes)
        self.per_vc_goodput_mbps = list(per_vc_goodput_mbps)
        self.efficiency = efficiency
        self.fairness = fairness
        self.clr = clr
        self.cells_dropped_selective = cells_dropped_selective
        self.cells_dropped_overflow = cells_dropped_overflow
        self.cells_dropped_policer = cells_dropped_policer
        self.cells_offered = cells_offered
        self.policy = policy
        self.scale = scale
        self.switch_stats = switch_stats or {}
        self.tcp_stats = tcp_stats or {}
        self.events_processed = events_processed
        self.trace_digest = trace_digest

        self._validate()

    def _validate(self):
        errors = []
        if len(self.per_vc_goodput_mbps) != self.n_sources:
            errors.append("one goodput value per source is required")
        if not 0 <= self.efficiency <= 1 + 1e-9:
            errors.append(f"efficiency {self.efficiency} outside [0, 1]")
        if self.fairness is not None and not 1 / self.n_sources - 1e-12 <= self.fairness <= 1 + 1e-12:
            errors.append(f"fairness {self.fairness} outside [1/N, 1]")
        if not 0 <= self.clr <= 1:
            errors.append(f"clr {self.clr} outside [0, 1]")
        if errors:
            raise ValueError(f"RunResult validation failed: {'; '.join(errors)}")

    @property
    def cells_dropped(self) -> int:
        return self.cells_dropped_selective + self.cells_dropped_overflow + self.cells_dropped_policer

    def to_row(self) -> Dict[str, Any]:
        """
        CSV row in CSV_COLUMNS order

        Returns:
            Dictionary keyed by column name; fairness is None for no traffic
        """
        return {
            'scenario': self.scenario,
            'n_sources': self.n_sources,
            'buffer_cells': self.buffer_cells,
            'buffer_rtt_fraction': self.buffer_rtt_fraction,
            'seed': self.seed,
            'duration_s': self.duration_s,
            'efficiency': self.efficiency,
            'fairness': self.fairness,
            'clr': self.clr,
            'cells_dropped_selective': self.cells_dropped_selective,
            'cells_dropped_overflow': self.cells_dropped_overflow,
            'per_vc_goodput_mbps': GOODPUT_SEPARATOR.join(f"{g:.6f}" for g in self.per_vc_goodput_mbps),
        }

    def to_dict(self) -> Dict[str, Any]:
        """Full serialization, including the statistics not written to CSV"""
        return {
            **self.to_row(),
            'per_vc_goodput_mbps': list(self.per_vc_goodput_mbps),
            'per_vc_goodput_bytes': list(self.per_vc_goodput_bytes),
            'cells_dropped_policer': self.cells_dropped_policer,
            'cells_offered': self.cells_offered,
            'policy': self.policy,
            'scale': self.scale,
            'switch_stats': dict(self.switch_stats),
            'tcp_stats': dict(self.tcp_stats),
            'events_processed': self.events_processed,
            'trace_digest': self.trace_digest
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> 'RunResult':
        """Create RunResult from the output of to_dict"""
        return RunResult(
            scenario=data['scenario'],
            n_sources=data['n_sources'],
            buffer_cells=data['buffer_cells'],
            buffer_rtt_fraction=data['buffer_rtt_fraction'],
            seed=data['seed'],
            duration_s=data['duration_s'],
            per_vc_goodput_bytes=data.get('per_vc_goodput_bytes', [0] * data['n_sources']),
            per_vc_goodput_mbps=data['per_vc_goodput_mbps'],
            efficiency=data['efficiency'],
            fairness=data['fairness'],
            clr=data['clr'],
            cells_dropped_selective=data.get('cells_dropped_selective', 0),
            cells_dropped_overflow=data.get('cells_dropped_overflow', 0),
            cells_dropped_policer=data.get('cells_dropped_policer', 0),
            cells_offered=data.get('cells_offered', 0),
            policy=data.get('policy', 'selective_drop'),
            scale=data.get('scale', 1.0),
            switch_stats=data.get('switch_stats'),
            tcp_stats=data.get('tcp_stats'),
            events_processed=data.get('events_processed', 0),
            trace_digest=data.get('trace_digest')
        )

    def __repr__(self) -> str:
        fairness = NO_TRAFFIC if self.fairness is None else f"{self.fairness:.4f}"
        return (f"RunResult({self.scenario}, n={self.n_sources}, K={self.buffer_cells}, seed={self.seed}, "
                f"eff={self.efficiency:.4f}, fair={fairness})")
