"""
Validation utilities for command-line inputs
"""
import os
from pathlib import Path
from typing import Optional, Tuple

from models.scenario import ScenarioConfig


def validate_config_readable(path: Optional[str]) -> Tuple[bool, str]:
    """
    Validate that a config file exists and is readable

    Args:
        path: Config path, or None for built-in defaults

    Returns:
        Tuple of (is_valid, message)
    """
    if path is None:
        return True, "Using built-in defaults"
    path_obj = Path(path)
    if not path_obj.exists():
        return False, f"Config file does not exist: {path}"
    if not path_obj.is_file():
        return False, f"Config path is not a file: {path}"
    if not os.access(path, os.R_OK):
        return False, f"Config file is not readable: {path}"
    return True, "Config file is readable"


def validate_output_writable(path: Optional[str]) -> Tuple[bool, str]:
    """
    Validate that results can be written to a path

    Args:
        path: Output CSV path, or None for standard output

    Returns:
        Tuple of (is_valid, message)
    """
    if path is None:
        return True, "Writing to standard output"
    path_obj = Path(path)
    if path_obj.is_dir():
        return False, f"Output path is a directory: {path}"
    if path_obj.exists():
        if not os.access(path, os.W_OK):
            return False, f"Output file is not writable: {path}"
        return True, "Output file is writable"
    parent = path_obj.parent if str(path_obj.parent) else Path('.')
    if not parent.exists():
        return False, f"Output parent directory does not exist: {parent}"
    if not os.access(str(parent), os.W_OK):
        return False, f"Output parent directory is not writable: {parent}"
    return True, "Output location is writable"


def validate_run_flags(jobs: Optional[int], scale: Optional[float], warmup: Optional[float],
                       policy: Optional[str]) -> Tuple[bool, str]:
    """
    Check the global CLI flags before any settings are touched

    Returns:
        Tuple of (is_valid, message); every problem is listed
    """
    errors = []
    if jobs is not None and jobs < 1:
        errors.append("--jobs must be >= 1")
    if scale is not None and scale <= 0:
        errors.append("--scale must be > 0")
    if warmup is not None and warmup < 0:
        errors.append("--warmup must be >= 0")
    if policy is not None and policy not in ScenarioConfig.VALID_POLICIES:
        errors.append(f"--policy must be one of: {', '.join(ScenarioConfig.VALID_POLICIES)}")

    if errors:
        return False, "; ".join(errors)
    return True, "All flags valid"
