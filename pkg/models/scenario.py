"""
Scenario data model - one experiment point and a sweep over many
"""
from typing import Any, Dict, List, Optional

from core.errors import ConfigError
from models.tcp_state import DEFAULT_MSS
from models.traffic import TrafficDescriptor

LINK_CELL_RATE = 149.7e6
LINE_RATE = 155.52e6


class ScenarioConfig:
    """Parameters of a single simulated configuration (N sources, two earth stations)"""

    # Latency classes
    CLASS_LEO = 'LEO'
    CLASS_MLEO = 'MLEO'
    CLASS_GEO = 'GEO'
    CLASS_CUSTOM = 'custom'
    VALID_CLASSES = [CLASS_LEO, CLASS_MLEO, CLASS_GEO, CLASS_CUSTOM]

    # interswitch_delay (s), rcv_wnd (bytes), duration (s)
    CLASS_DEFAULTS = {
        CLASS_LEO: {'interswitch_delay': 0.005, 'rcv_wnd': 600000, 'duration': 20.0},
        CLASS_MLEO: {'interswitch_delay': 0.100, 'rcv_wnd': 2500000, 'duration': 100.0},
        CLASS_GEO: {'interswitch_delay': 0.275, 'rcv_wnd': 8704000, 'duration': 100.0},
    }

    POLICY_SELECTIVE_DROP = 'selective_drop'
    POLICY_TAIL_DROP = 'tail_drop'
    VALID_POLICIES = [POLICY_SELECTIVE_DROP, POLICY_TAIL_DROP]

    def __init__(
        self,
        scenario_class: str = CLASS_LEO,
        n_sources: int = 5,
        buffer_cells: int = 1000,
        access_delay: float = 0.005,
        interswitch_delay: Optional[float] = None,
        rcv_wnd: Optional[int] = None,
        duration: Optional[float] = None,
        seed: int = 1,
        policy: str = POLICY_SELECTIVE_DROP,
        threshold_r: float = 0.9,
        threshold_z: float = 0.8,
        mss: int = DEFAULT_MSS,
        link_rate: float = LINK_CELL_RATE,
        line_rate: float = LINE_RATE,
        scale: float = 1.0,
        start_jitter: float = 0.1,
        warmup: float = 0.0,
        initial_rto: float = 3.0,
        min_rto: float = 0.2,
        max_rto: float = 64.0,
        timer_granularity: float = 0.1,
        contract: Optional[TrafficDescriptor] = None,
        police: bool = False,
        debug: bool = False,
        buffer_rtt_fraction: Optional[float] = None
    ):
        """
        Initialize a ScenarioConfig

        Args:
            scenario_class: LEO, MLEO, GEO or custom
            n_sources: Number of TCP sources (one VC each)
            buffer_cells: Switch buffer capacity K in cells, before scaling
            access_delay: One-way delay between an end system and its switch (s)
            interswitch_delay: One-way satellite link delay (s); class default when None
            rcv_wnd: Receiver window in bytes, before scaling; class default when None
            duration: Simulated time (s); class default when None
            seed: Seed for start-time jitter
            policy: Switch drop policy
            threshold_r: Selective Drop occupancy threshold R
            threshold_z: Selective Drop fair-share threshold Z
            mss: TCP maximum segment size (bytes) at full rate
            link_rate: Cell-layer rate of every link (bits/s), before scaling
            line_rate: SONET line rate, descriptive only
            scale: Bandwidth scaling factor applied to rates, buffers, windows and the segment size
            start_jitter: Sources start uniformly in [0, start_jitter] seconds
            warmup: Goodput measurement starts after this many seconds
            initial_rto: RTO before the first RTT sample (s)
            min_rto: Lower RTO bound (s)
            max_rto: Upper RTO bound (s)
            timer_granularity: TCP timer tick (s)
            contract: Traffic descriptor for the ingress policers (PCR = link cell rate when None)
            police: Drop non-conforming cells instead of only counting them
            debug: Run accounting audits during the simulation
            buffer_rtt_fraction: Fraction of RTT the buffer was derived from, if any
        """
        self.scenario_class = scenario_class
        defaults = self.CLASS_DEFAULTS.get(scenario_class, {})
        self.n_sources = n_sources
        self.buffer_cells = buffer_cells
        self.access_delay = access_delay
        self.interswitch_delay = interswitch_delay if interswitch_delay is not None \
            else defaults.get('interswitch_delay')
        self.rcv_wnd = rcv_wnd if rcv_wnd is not None else defaults.get('rcv_wnd')
        self.duration = duration if duration is not None else defaults.get('duration')
        self.seed = seed
        self.policy = policy
        self.threshold_r = threshold_r
        self.threshold_z = threshold_z
        self.mss = mss
        self.link_rate = link_rate
        self.line_rate = line_rate
        self.scale = scale
        self.start_jitter = start_jitter
        self.warmup = warmup
        self.initial_rto = initial_rto
        self.min_rto = min_rto
        self.max_rto = max_rto
        self.timer_granularity = timer_granularity
        self.contract = contract
        self.police = police
        self.debug = debug
        self.buffer_rtt_fraction = buffer_rtt_fraction

        self._validate()

    def _validate(self):
        """Validate scenario parameters"""
        errors = []

        if self.scenario_class not in self.VALID_CLASSES:
            errors.append((
                'scenario_class',
                f"Invalid scenario class '{self.scenario_class}'. Must be one of: {', '.join(self.VALID_CLASSES)}"
            ))
        if self.policy not in self.VALID_POLICIES:
            errors.append(('policy', f"Invalid policy '{self.policy}'. Must be one of: {', '.join(self.VALID_POLICIES)}"))

        for name in ('interswitch_delay', 'rcv_wnd', 'duration'):
            if getattr(self, name) is None:
                errors.append((name, f"{name} is required for the custom scenario class"))

        if self.n_sources is None or self.n_sources < 1:
            errors.append(('n_sources', "n_sources must be >= 1"))
        if self.buffer_cells is None or self.buffer_cells < 1:
            errors.append(('buffer_cells', "buffer_cells must be >= 1"))
        if self.duration is not None and self.duration <= 0:
            errors.append(('duration', "duration must be > 0"))
        if self.access_delay < 0:
            errors.append(('access_delay', "access_delay must be >= 0"))
        if self.interswitch_delay is not None and self.interswitch_delay < 0:
            errors.append(('interswitch_delay', "interswitch_delay must be >= 0"))
        if self.link_rate <= 0:
            errors.append(('link_rate', "link_rate must be > 0"))
        if self.scale <= 0:
            errors.append(('scale', "scale must be > 0"))
        if self.mss <= 0:
            errors.append(('mss', "mss must be > 0"))
        if self.rcv_wnd is not None and self.rcv_wnd < self.mss:
            errors.append(('rcv_wnd', "rcv_wnd must be at least one mss"))
        if self.start_jitter < 0:
            errors.append(('start_jitter', "start_jitter must be >= 0"))
        if self.duration is not None and not 0 <= self.warmup < self.duration:
            errors.append(('warmup', "warmup must be in [0, duration)"))
        if not 0 <= self.threshold_r <= 1:
            errors.append(('threshold_r', "threshold_r must be in [0, 1]"))
        if not 0 < self.threshold_z <= 1:
            errors.append(('threshold_z', "threshold_z must be in (0, 1]"))

        if errors:
            fields = ', '.join(dict.fromkeys(name for name, _ in errors))
            raise ConfigError(
                f"Scenario validation failed: {'; '.join(message for _, message in errors)}", field=fields
            )

    # Scaled quantities

    @property
    def scaled_link_rate(self) -> int:
        """Cell-layer rate used for timing, in whole bits per second"""
        return max(1, round(self.link_rate * self.scale))

    @property
    def scaled_buffer_cells(self) -> int:
        return max(1, round(self.buffer_cells * self.scale))

    @property
    def scaled_mss(self) -> int:
        """
        Segment size used in the simulation

        Shrinks with the rates so that a scaled buffer holds as many frames,
        and a scaled window as many segments, as at full rate.
        """
        return max(1, round(self.mss * self.scale))

    @property
    def scaled_rcv_wnd(self) -> int:
        return max(self.scaled_mss, round(self.rcv_wnd * self.scale))

    def copy_with(self, **overrides) -> 'ScenarioConfig':
        """New config with some fields replaced (validated again)"""
        data = self.to_dict()
        data.update(overrides)
        return ScenarioConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert ScenarioConfig to dictionary for serialization

        Returns:
            Dictionary representation of the scenario
        """
        return {
            'scenario_class': self.scenario_class,
            'n_sources': self.n_sources,
            'buffer_cells': self.buffer_cells,
            'access_delay': self.access_delay,
            'interswitch_delay': self.interswitch_delay,
            'rcv_wnd': self.rcv_wnd,
            'duration': self.duration,
            'seed': self.seed,
            'policy': self.policy,
            'threshold_r': self.threshold_r,
            'threshold_z': self.threshold_z,
            'mss': self.mss,
            'link_rate': self.link_rate,
            'line_rate': self.line_rate,
            'scale': self.scale,
            'start_jitter': self.start_jitter,
            'warmup': self.warmup,
            'initial_rto': self.initial_rto,
            'min_rto': self.min_rto,
            'max_rto': self.max_rto,
            'timer_granularity': self.timer_granularity,
            'contract': self.contract.to_dict() if self.contract else None,
            'police': self.police,
            'debug': self.debug,
            'buffer_rtt_fraction': self.buffer_rtt_fraction
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> 'ScenarioConfig':
        """
        Create ScenarioConfig from dictionary

        Args:
            data: Dictionary with scenario fields

        Returns:
            ScenarioConfig instance
        """
        fields = dict(data)
        contract = fields.pop('contract', None)
        if isinstance(contract, dict):
            contract = TrafficDescriptor.from_dict(contract)
        return ScenarioConfig(contract=contract, **fields)

    def __repr__(self) -> str:
        return (f"ScenarioConfig({self.scenario_class}, n={self.n_sources}, K={self.buffer_cells}, "
                f"seed={self.seed}, scale={self.scale})")


class SweepSpec:
    """A grid of scenario points with repetitions"""

    AXIS_FRACTION = 'buffer_rtt_fraction'
    AXIS_CELLS = 'buffer_cells'
    VALID_AXES = [AXIS_FRACTION, AXIS_CELLS]

    DEFAULT_FRACTIONS = [2, 1, 0.5, 0.25, 0.125, 0.0625, 0.031, 0.016]

    def __init__(
        self,
        base: ScenarioConfig,
        axis: str = AXIS_FRACTION,
        values: Optional[List[float]] = None,
        n_sources: Optional[List[int]] = None,
        seeds: Optional[List[int]] = None
    ):
        """
        Initialize a SweepSpec

        Args:
            base: Scenario every point derives from
            axis: AXIS_FRACTION or AXIS_CELLS
            values: Buffer sizes along the axis (RTT fractions or cells)
            n_sources: Source counts to sweep; defaults to the base value
            seeds: One repetition per seed; defaults to the base seed
        """
        self.base = base
        self.axis = axis
        self.values = list(values) if values is not None else list(self.DEFAULT_FRACTIONS)
        self.n_sources = list(n_sources) if n_sources else [base.n_sources]
        self.seeds = list(seeds) if seeds else [base.seed]

        errors = []
        if axis not in self.VALID_AXES:
            errors.append(f"Invalid sweep axis '{axis}'. Must be one of: {', '.join(self.VALID_AXES)}")
        if not self.values:
            errors.append("at least one buffer value is required")
        if any(v <= 0 for v in self.values):
            errors.append("buffer values must be > 0")
        if any(n < 1 for n in self.n_sources):
            errors.append("n_sources values must be >= 1")
        if len(set(self.seeds)) != len(self.seeds):
            errors.append("seeds must be distinct")
        if errors:
            raise ConfigError(f"Sweep validation failed: {'; '.join(errors)}", field='sweep')

    @property
    def point_count(self) -> int:
        """Number of (N, buffer) points, repetitions excluded"""
        return len(self.n_sources) * len(self.values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'base': self.base.to_dict(),
            'axis': self.axis,
            'values': list(self.values),
            'n_sources': list(self.n_sources),
            'seeds': list(self.seeds)
        }

    def __repr__(self) -> str:
        return (f"SweepSpec(axis={self.axis}, values={len(self.values)}, n={self.n_sources}, "
                f"seeds={self.seeds})")
