"""
Scenario settings - YAML or sectioned key = value files merged over built-in defaults
"""
import configparser
import copy
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from core.errors import ConfigError
from core.topology import STUDY_BUFFER_LISTS, buffer_for_fraction
from models.scenario import ScenarioConfig, SweepSpec
from models.traffic import TrafficDescriptor

logger = logging.getLogger(__name__)

# Keys whose values must be numbers (None allowed where the default is None)
NUMERIC_KEYS = {
    'scenario': {'n_sources', 'access_delay', 'interswitch_delay', 'rcv_wnd', 'duration', 'mss',
                 'link_rate', 'line_rate', 'scale', 'start_jitter'},
    'tcp': {'initial_rto', 'min_rto', 'max_rto', 'timer_granularity'},
    'switch': {'threshold_r', 'threshold_z', 'buffer_cells', 'buffer_rtt_fraction'},
    'contract': {'pcr', 'scr', 'mbs', 'cdvt', 'mcr'},
    'sweep': {'repetitions'},
    'run': {'seed', 'warmup', 'jobs'},
}

LIST_KEYS = {'sweep': {'values', 'n_sources', 'seeds'}}

# File suffixes read as `key = value` lines under [section] headers
INI_SUFFIXES = ('.ini', '.cfg', '.conf')

SECTION_HEADER = re.compile(r'^\[[A-Za-z_]\w*\]$')


def _looks_sectioned(text: str) -> bool:
    """True when the first significant line is a [section] header"""
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(('#', ';')):
            continue
        return bool(SECTION_HEADER.match(line))
    return False


def _coerce(text: str) -> Any:
    """
    Typed value of one `key = value` entry

    Empty means unset; comma-separated values become a list; everything
    else is read as a YAML scalar or flow list.
    """
    text = text.strip()
    if not text:
        return None
    if ',' in text and not text.startswith('['):
        return [_coerce(item) for item in text.split(',')]
    for number in (int, float):
        try:
            return number(text)
        except ValueError:
            pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def _parse_sectioned(path: Path, text: str) -> Dict[str, Any]:
    """Parse `key = value` lines under [section] headers"""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'),
                                       default_section='__none__')
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse {path}: {e}", field='config') from e
    data = {}
    for section in parser.sections():
        values = {}
        for key, raw in parser.items(section, raw=True):
            value = _coerce(raw)
            if key in LIST_KEYS.get(section, set()) and value is not None and not isinstance(value, list):
                value = [value]
            values[key] = value
        data[section] = values
    return data


class Settings:
    """Scenario, sweep and run settings loaded from a config file"""

    DEFAULT_SETTINGS = {
        'scenario': {
            'class': ScenarioConfig.CLASS_LEO,
            'n_sources': 5,
            'access_delay': 0.005,
            'interswitch_delay': None,  # class default
            'rcv_wnd': None,  # class default
            'duration': None,  # class default
            'mss': 9180,
            'link_rate': 149.7e6,
            'line_rate': 155.52e6,
            'scale': 1.0,
            'start_jitter': 0.1,
        },
        'tcp': {
            'initial_rto': 3.0,
            'min_rto': 0.2,
            'max_rto': 64.0,
            'timer_granularity': 0.1,
        },
        'switch': {
            'policy': ScenarioConfig.POLICY_SELECTIVE_DROP,
            'threshold_r': 0.9,
            'threshold_z': 0.8,
            'buffer_cells': None,  # derived from buffer_rtt_fraction when unset
            'buffer_rtt_fraction': 1.0,
        },
        'contract': {
            'service_category': TrafficDescriptor.CATEGORY_UBR,
            'pcr': None,  # link cell rate
            'scr': None,
            'mbs': None,
            'cdvt': 1e-6,
            'mcr': None,
        },
        'sweep': {
            'axis': SweepSpec.AXIS_FRACTION,
            'values': None,
            'n_sources': None,
            'seeds': None,
            'repetitions': 1,
            'use_study_buffers': False,
        },
        'run': {
            'seed': 1,
            'warmup': 0.0,
            'police': False,
            'debug': False,
            'jobs': 1,
        },
    }

    def __init__(self, settings_path: Optional[str] = None, data: Optional[Dict[str, Any]] = None):
        """
        Initialize Settings

        Args:
            settings_path: YAML or [section] key = value file; defaults only when None
            data: Already-parsed mapping, used instead of a file
        """
        self.settings_path = Path(settings_path) if settings_path else None
        if data is None and self.settings_path is not None:
            data = self._read(self.settings_path)
        self._settings = self._merge(data or {})

    @staticmethod
    def _read(path: Path) -> Dict[str, Any]:
        """Parse a YAML or sectioned key = value file into a mapping"""
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}", field='config')
        text = path.read_text()
        if path.suffix.lower() in INI_SUFFIXES or _looks_sectioned(text):
            return _parse_sectioned(path, text)
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse {path}: {e}", field='config') from e
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"Invalid YAML structure: expected mapping, got {type(data).__name__}",
                              field='config')
        return data

    def _merge(self, data: Dict[str, Any]) -> Dict[str, Dict[str, Any]]:
        """Merge sections over the defaults, rejecting unknown names and mistyped values"""
        merged = copy.deepcopy(self.DEFAULT_SETTINGS)
        for section, values in data.items():
            if section not in merged:
                raise ConfigError(
                    f"Unknown section. Must be one of: {', '.join(merged)}", field=str(section)
                )
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ConfigError("Section must be a mapping", field=section)
            for key, value in values.items():
                self._check(section, key, value)
                merged[section][key] = value
        return merged

    def _check(self, section: str, key: str, value: Any):
        field = f"{section}.{key}"
        if key not in self.DEFAULT_SETTINGS[section]:
            raise ConfigError("Unknown key", field=field)
        if value is None:
            return
        if key in NUMERIC_KEYS.get(section, set()):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"Expected a number, got {value!r}", field=field)
        elif key in LIST_KEYS.get(section, set()):
            if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, (int, float))
                                                  for v in value):
                raise ConfigError(f"Expected a list of numbers, got {value!r}", field=field)
        elif isinstance(self.DEFAULT_SETTINGS[section][key], bool) and not isinstance(value, bool):
            raise ConfigError(f"Expected true or false, got {value!r}", field=field)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """
        Get a setting value

        Args:
            section: Section name
            key: Key within the section
            default: Returned when the value is None

        Returns:
            Setting value or default
        """
        value = self._settings.get(section, {}).get(key)
        return default if value is None else value

    def set(self, field: str, value: Any):
        """
        Override one value, e.g. set('run.seed', 7)

        Args:
            field: Dotted section.key
            value: New value; None leaves the current value untouched
        """
        if value is None:
            return
        section, _, key = field.partition('.')
        if section not in self._settings:
            raise ConfigError("Unknown section", field=section)
        self._check(section, key, value)
        self._settings[section][key] = value

    # Builders

    def contract(self) -> Optional[TrafficDescriptor]:
        """Descriptor from the contract section; None means UBR at the link cell rate"""
        contract = self._settings['contract']
        if contract['pcr'] is None:
            if contract['scr'] is not None or contract['mbs'] is not None:
                raise ConfigError("scr/mbs given without pcr", field='contract.pcr')
            return None
        return TrafficDescriptor.from_dict(contract)

    def scenario_config(self, **overrides) -> ScenarioConfig:
        """
        Build the ScenarioConfig described by the settings

        Args:
            **overrides: ScenarioConfig fields replacing the settings values

        Returns:
            Validated scenario with buffer_cells resolved
        """
        s = self._settings
        fields = {
            'scenario_class': s['scenario']['class'],
            'n_sources': s['scenario']['n_sources'],
            'access_delay': s['scenario']['access_delay'],
            'interswitch_delay': s['scenario']['interswitch_delay'],
            'rcv_wnd': s['scenario']['rcv_wnd'],
            'duration': s['scenario']['duration'],
            'mss': s['scenario']['mss'],
            'link_rate': s['scenario']['link_rate'],
            'line_rate': s['scenario']['line_rate'],
            'scale': s['scenario']['scale'],
            'start_jitter': s['scenario']['start_jitter'],
            'initial_rto': s['tcp']['initial_rto'],
            'min_rto': s['tcp']['min_rto'],
            'max_rto': s['tcp']['max_rto'],
            'timer_granularity': s['tcp']['timer_granularity'],
            'policy': s['switch']['policy'],
            'threshold_r': s['switch']['threshold_r'],
            'threshold_z': s['switch']['threshold_z'],
            'seed': s['run']['seed'],
            'warmup': s['run']['warmup'],
            'police': s['run']['police'],
            'debug': s['run']['debug'],
            'contract': self.contract(),
            'buffer_cells': 1,
        }
        fields.update(overrides)
        cfg = ScenarioConfig(**fields)

        if 'buffer_cells' in overrides:
            return cfg
        if s['switch']['buffer_cells'] is not None:
            return cfg.copy_with(buffer_cells=int(s['switch']['buffer_cells']))
        fraction = s['switch']['buffer_rtt_fraction']
        cells = buffer_for_fraction(cfg, fraction)
        if cells < 1:
            raise ConfigError(f"buffer_rtt_fraction {fraction} gives {cells} cells",
                              field='switch.buffer_rtt_fraction')
        return cfg.copy_with(buffer_cells=cells, buffer_rtt_fraction=fraction)

    def sweep_spec(self) -> SweepSpec:
        """Build the SweepSpec described by the sweep section"""
        sweep = self._settings['sweep']
        base = self.scenario_config()
        axis = sweep['axis']
        values: Optional[List[float]] = sweep['values']

        if sweep['use_study_buffers']:
            if base.scenario_class not in STUDY_BUFFER_LISTS:
                raise ConfigError(f"No study buffer list for class '{base.scenario_class}'",
                                  field='sweep.use_study_buffers')
            axis = SweepSpec.AXIS_CELLS
            values = STUDY_BUFFER_LISTS[base.scenario_class]

        seeds = sweep['seeds']
        if seeds is None:
            repetitions = int(sweep['repetitions'])
            if repetitions < 1:
                raise ConfigError("repetitions must be >= 1", field='sweep.repetitions')
            seeds = [base.seed + i for i in range(repetitions)]

        return SweepSpec(base, axis=axis, values=values, n_sources=sweep['n_sources'], seeds=seeds)
