"""
Traffic contract data model - source traffic descriptors, QoS parameters and
GCRA (virtual scheduling) state
"""
from typing import Any, Dict, Optional

from core.errors import ConfigError
from core.simulator import to_seconds, to_ticks


class TrafficDescriptor:
    """Source traffic descriptor of one ATM connection"""

    # Service categories
    CATEGORY_CBR = 'CBR'
    CATEGORY_VBR_RT = 'VBR-rt'
    CATEGORY_VBR_NRT = 'VBR-nrt'
    CATEGORY_ABR = 'ABR'
    CATEGORY_UBR = 'UBR'
    VALID_CATEGORIES = [CATEGORY_CBR, CATEGORY_VBR_RT, CATEGORY_VBR_NRT, CATEGORY_ABR, CATEGORY_UBR]

    def __init__(
        self,
        pcr: float,
        scr: Optional[float] = None,
        mbs: Optional[int] = None,
        cdvt: float = 0.0,
        service_category: str = CATEGORY_UBR,
        mcr: Optional[float] = None
    ):
        """
        Initialize a TrafficDescriptor

        Args:
            pcr: Peak Cell Rate (cells/second)
            scr: Sustained Cell Rate (cells/second), VBR only
            mbs: Maximum Burst Size (cells), VBR only
            cdvt: Cell Delay Variation Tolerance (seconds)
            service_category: One of VALID_CATEGORIES
            mcr: Minimum Cell Rate (cells/second), ABR only
        """
        self.pcr = pcr
        self.scr = scr
        self.mbs = mbs
        self.cdvt = cdvt
        self.service_category = service_category
        self.mcr = mcr

        self._validate()

    def _validate(self):
        """Validate descriptor parameters"""
        errors = []

        if self.service_category not in self.VALID_CATEGORIES:
            errors.append(
                f"Invalid service category '{self.service_category}'. "
                f"Must be one of: {', '.join(self.VALID_CATEGORIES)}"
            )

        if self.pcr is None or self.pcr <= 0:
            errors.append("pcr must be > 0")

        if self.scr is not None and self.pcr is not None:
            if not 0 < self.scr <= self.pcr:
                errors.append("scr must satisfy 0 < scr <= pcr")

        if self.mbs is not None and self.mbs < 1:
            errors.append("mbs must be >= 1")

        if self.cdvt is None or self.cdvt < 0:
            errors.append("cdvt must be >= 0")

        if self.service_category == self.CATEGORY_UBR and (self.scr is not None or self.mbs is not None):
            errors.append("UBR descriptors carry only pcr and cdvt")

        if self.mcr is not None:
            if self.service_category != self.CATEGORY_ABR:
                errors.append("mcr is only meaningful for ABR")
            elif self.mcr < 0 or (self.pcr and self.mcr > self.pcr):
                errors.append("mcr must satisfy 0 <= mcr <= pcr")

        if errors:
            raise ConfigError(f"Traffic descriptor validation failed: {'; '.join(errors)}", field='contract')

    def to_dict(self) -> Dict[str, Any]:
        """Convert descriptor to a dictionary"""
        return {
            'pcr': self.pcr,
            'scr': self.scr,
            'mbs': self.mbs,
            'cdvt': self.cdvt,
            'service_category': self.service_category,
            'mcr': self.mcr
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> 'TrafficDescriptor':
        """Create a descriptor from a dictionary"""
        return TrafficDescriptor(
            pcr=data['pcr'],
            scr=data.get('scr'),
            mbs=data.get('mbs'),
            cdvt=data.get('cdvt', 0.0),
            service_category=data.get('service_category', TrafficDescriptor.CATEGORY_UBR),
            mcr=data.get('mcr')
        )

    def __repr__(self) -> str:
        return (f"TrafficDescriptor({self.service_category}, pcr={self.pcr}, scr={self.scr}, "
                f"mbs={self.mbs}, cdvt={self.cdvt})")


class QosParams:
    """Negotiated QoS objectives of a connection"""

    def __init__(self, max_ctd: float, peak_to_peak_cdv: float, clr: float):
        """
        Initialize QosParams

        Args:
            max_ctd: Maximum Cell Transfer Delay (seconds)
            peak_to_peak_cdv: Peak-to-peak Cell Delay Variation (seconds)
            clr: Cell Loss Ratio objective in [0, 1]
        """
        self.max_ctd = max_ctd
        self.peak_to_peak_cdv = peak_to_peak_cdv
        self.clr = clr

        errors = []
        if max_ctd < 0:
            errors.append("max_ctd must be >= 0")
        if peak_to_peak_cdv < 0:
            errors.append("peak_to_peak_cdv must be >= 0")
        if not 0 <= clr <= 1:
            errors.append("clr must be in [0, 1]")
        if errors:
            raise ConfigError(f"QoS parameter validation failed: {'; '.join(errors)}", field='qos')

    def admits(self, ctd: float, cdv: float, clr: float) -> bool:
        """
        Check measured values against these objectives

        Args:
            ctd: Measured maximum cell transfer delay (seconds)
            cdv: Measured peak-to-peak delay variation (seconds)
            clr: Measured cell loss ratio

        Returns:
            True if every measurement is within its objective
        """
        return ctd <= self.max_ctd and cdv <= self.peak_to_peak_cdv and clr <= self.clr

    def __repr__(self) -> str:
        return f"QosParams(max_ctd={self.max_ctd}, cdv={self.peak_to_peak_cdv}, clr={self.clr})"


class GcraState:
    """
    Virtual-scheduling GCRA state, all times in simulator ticks

    A cell arriving at t conforms iff t >= tat - limit. Conforming cells move
    tat to max(t, tat) + increment; non-conforming cells leave it unchanged.
    """

    __slots__ = ('increment', 'limit', 'tat', 'last_arrival')

    def __init__(self, increment: int, limit: int, tat: int = 0):
        """
        Initialize GcraState

        Args:
            increment: Increment T in ticks (1/rate)
            limit: Limit tau in ticks (tolerance)
            tat: Theoretical arrival time of the next cell
        """
        if increment <= 0:
            raise ValueError("GCRA increment must be > 0")
        if limit < 0:
            raise ValueError("GCRA limit must be >= 0")
        self.increment = increment
        self.limit = limit
        self.tat = tat
        self.last_arrival: Optional[int] = None

    @classmethod
    def from_rate(cls, rate: float, tolerance: float) -> 'GcraState':
        """
        Build a bucket from a cell rate and a tolerance in seconds

        Args:
            rate: Cells per second
            tolerance: Tolerance tau in seconds

        Returns:
            GcraState with ticks rounded half up
        """
        return cls(to_ticks(1.0 / rate), to_ticks(tolerance))

    @property
    def increment_t(self) -> float:
        """Increment in seconds"""
        return to_seconds(self.increment)

    @property
    def limit_tau(self) -> float:
        """Limit in seconds"""
        return to_seconds(self.limit)

    def conforms(self, arrival: int) -> bool:
        """Conformance test without updating state"""
        return arrival >= self.tat - self.limit

    def commit(self, arrival: int):
        """Account a conforming cell"""
        self.tat = max(arrival, self.tat) + self.increment

    def __repr__(self) -> str:
        return f"GcraState(T={self.increment}, tau={self.limit}, tat={self.tat})"
