"""
Media access models

Closed-form slotted ALOHA throughput and the protocol comparison table.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from core.errors import NotFoundError
from models.mac_protocol import MacProtocolRecord

logger = logging.getLogger(__name__)

L = MacProtocolRecord

PROTOCOL_TABLE: List[MacProtocolRecord] = [
    MacProtocolRecord('S-ALOHA', (0.37, 0.37), L.LABEL_LOW, L.LABEL_LOW, L.LABEL_HIGH, L.LABEL_LOW),
    MacProtocolRecord('Tree CRA', (0.43, 0.49), L.LABEL_MEDIUM, L.LABEL_MEDIUM, L.LABEL_POOR, L.LABEL_MEDIUM),
    MacProtocolRecord('DAMA', (0.6, 0.8), L.LABEL_HIGH, L.LABEL_HIGH, L.LABEL_HIGH, L.LABEL_MEDIUM),
    MacProtocolRecord('Hybrid', (0.6, 0.8), L.LABEL_VARIABLE, L.LABEL_MEDIUM, L.LABEL_HIGH, L.LABEL_MEDIUM),
]

DEFAULT_CURVE_GRID = np.round(np.arange(0.0, 5.0001, 0.1), 10)


def slotted_aloha_throughput(offered_load_g):
    """
    S = G * exp(-G)

    Args:
        offered_load_g: Offered load in packets per slot (scalar or array, >= 0)

    Returns:
        Throughput in successful packets per slot, same shape as the input
    """
    g = np.asarray(offered_load_g, dtype=float)
    if np.any(g < 0):
        raise ValueError("offered load must be >= 0")
    s = g * np.exp(-g)
    return float(s) if s.ndim == 0 else s


def peak_throughput(bounds: Tuple[float, float] = (0.0, 5.0)) -> Tuple[float, float]:
    """
    Locate the maximum of the slotted ALOHA curve numerically

    Args:
        bounds: Search interval for G

    Returns:
        Tuple of (g_at_peak, peak_throughput)
    """
    lo, hi = bounds
    found = minimize_scalar(
        lambda g: -slotted_aloha_throughput(g),
        bracket=(lo, (lo + hi) / 4, hi),
        method='golden',
        tol=1e-10
    )
    return float(found.x), float(-found.fun)


def table_lookup(name: str) -> MacProtocolRecord:
    """
    Fetch one protocol row by name (case-insensitive)

    Raises:
        NotFoundError: If the protocol is not in the table
    """
    for record in PROTOCOL_TABLE:
        if record.name.lower() == name.strip().lower():
            return record
    raise NotFoundError(
        f"Unknown access protocol '{name}'. Known: {', '.join(r.name for r in PROTOCOL_TABLE)}"
    )


def protocol_table_frame() -> pd.DataFrame:
    """The comparison table as a DataFrame, one row per protocol"""
    return pd.DataFrame([record.to_dict() for record in PROTOCOL_TABLE])


def aloha_curve_frame(grid: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """
    Throughput over a grid of offered loads

    Args:
        grid: Offered loads G; 0 to 5 in steps of 0.1 by default

    Returns:
        DataFrame with columns offered_load_g, throughput
    """
    g = np.asarray(grid if grid is not None else DEFAULT_CURVE_GRID, dtype=float)
    return pd.DataFrame({'offered_load_g': g, 'throughput': slotted_aloha_throughput(g)})
