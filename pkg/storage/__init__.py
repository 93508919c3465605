"""
Storage package for simulation results
"""
from .result_writer import ResultWriter

__all__ = ['ResultWriter']
