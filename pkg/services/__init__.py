"""
Service layer

Experiment runs and sweeps, metrics, media access models and contract
checks, kept separate from the command-line surface.
"""

from .experiment_service import (
    run_point,
    run_sweep,
    expand_sweep,
    results_frame,
    summarize
)

from .contract_service import check_arrivals

__all__ = [
    # Experiment services
    'run_point',
    'run_sweep',
    'expand_sweep',
    'results_frame',
    'summarize',

    # Contract services
    'check_arrivals',
]
