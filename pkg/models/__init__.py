"""
Models package for the satellite TCP/ATM simulator
"""
from .run_result import RunResult
from .scenario import ScenarioConfig, SweepSpec
from .traffic import TrafficDescriptor

__all__ = ['RunResult', 'ScenarioConfig', 'SweepSpec', 'TrafficDescriptor']
