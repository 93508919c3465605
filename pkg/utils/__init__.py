"""
Utilities package for the satellite TCP/ATM simulator
"""
from .trace_reader import read_arrival_trace
from .validation import (
    validate_config_readable,
    validate_output_writable,
    validate_run_flags
)

__all__ = [
    'read_arrival_trace',
    'validate_config_readable',
    'validate_output_writable',
    'validate_run_flags'
]
