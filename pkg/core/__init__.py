"""
Core package for the satellite TCP/ATM simulator
"""
from .errors import SimulationError
from .simulator import Simulator

__all__ = ['SimulationError', 'Simulator']
