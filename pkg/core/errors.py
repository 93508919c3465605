"""
Error types shared by the simulator, protocol engines and experiment harness
"""
from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator packages"""

    # Process exit status used by the CLI when this error aborts a command
    EXIT_CODE = 3


class SchedulingError(SimulationError):
    """An event or arrival was presented out of time order"""


class ConfigError(SimulationError, ValueError):
    """Invalid scenario or sweep configuration"""

    EXIT_CODE = 2

    def __init__(self, message: str, field: Optional[str] = None):
        """
        Initialize a ConfigError

        Args:
            message: Human-readable description of the problem
            field: Dotted name of the offending configuration field
        """
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ContractError(SimulationError, ValueError):
    """Traffic descriptor lacks the parameters an operation needs"""


class ReassemblyError(SimulationError):
    """Cells of different AAL5 frames were interleaved on one VC"""


class AccountingError(SimulationError):
    """A conservation or bound check failed during or after a run"""


class NotFoundError(SimulationError, KeyError):
    """Lookup of an unknown record"""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep plain text for CLI output
        return str(self.args[0]) if self.args else ''


class SweepPointError(SimulationError):
    """A sweep point failed with an error the simulator does not raise itself"""
