"""
Media access protocol comparison record
"""
from typing import Any, Dict, Tuple


class MacProtocolRecord:
    """One row of the satellite media access protocol comparison"""

    # Ordinal labels
    LABEL_LOW = 'Low'
    LABEL_MEDIUM = 'Medium'
    LABEL_HIGH = 'High'
    LABEL_POOR = 'Poor'
    LABEL_VARIABLE = 'Variable'
    VALID_LABELS = [LABEL_LOW, LABEL_MEDIUM, LABEL_HIGH, LABEL_POOR, LABEL_VARIABLE]

    def __init__(
        self,
        name: str,
        efficiency_range: Tuple[float, float],
        delay_class: str,
        stability_class: str,
        robustness_class: str,
        complexity_class: str
    ):
        """
        Initialize a MacProtocolRecord

        Args:
            name: Protocol name
            efficiency_range: (lo, hi) channel efficiency
            delay_class: Access delay label
            stability_class: Stability label
            robustness_class: Robustness label
            complexity_class: Implementation complexity label
        """
        self.name = name
        self.efficiency_range = (float(efficiency_range[0]), float(efficiency_range[1]))
        self.delay_class = delay_class
        self.stability_class = stability_class
        self.robustness_class = robustness_class
        self.complexity_class = complexity_class

        self._validate()

    def _validate(self):
        errors = []
        lo, hi = self.efficiency_range
        if not 0 < lo <= hi <= 1:
            errors.append(f"efficiency range {self.efficiency_range} must satisfy 0 < lo <= hi <= 1")
        for field in ('delay_class', 'stability_class', 'robustness_class', 'complexity_class'):
            label = getattr(self, field)
            if label not in self.VALID_LABELS:
                errors.append(f"Invalid {field} '{label}'. Must be one of: {', '.join(self.VALID_LABELS)}")
        if errors:
            raise ValueError(f"MAC record validation failed: {'; '.join(errors)}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'efficiency_lo': self.efficiency_range[0],
            'efficiency_hi': self.efficiency_range[1],
            'delay': self.delay_class,
            'stability': self.stability_class,
            'robustness': self.robustness_class,
            'complexity': self.complexity_class
        }

    def __repr__(self) -> str:
        return f"MacProtocolRecord({self.name}, efficiency={self.efficiency_range})"
