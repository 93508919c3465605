"""Pytest configuration and fixtures."""
import pytest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from models.scenario import ScenarioConfig


@pytest.fixture
def small_leo():
    """LEO scenario small enough to simulate in a couple of seconds."""
    return ScenarioConfig(
        scenario_class=ScenarioConfig.CLASS_LEO,
        n_sources=2,
        buffer_cells=2000,
        duration=0.5,
        scale=0.05,
        seed=7
    )


@pytest.fixture
def config_file(tmp_path):
    """Write a YAML scenario file and return its path."""
    def _write(text: str) -> str:
        path = tmp_path / "scenario.yaml"
        path.write_text(text)
        return str(path)
    return _write
