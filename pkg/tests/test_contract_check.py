"""
Tests for arrival traces, the contract service and input validation
"""
import pytest

from core.errors import ConfigError, SchedulingError
from engines.traffic_contract import CONFORMING, NON_CONFORMING
from models.traffic import TrafficDescriptor
from services.contract_service import check_arrivals
from utils.trace_reader import parse_arrival_trace, read_arrival_trace
from utils.validation import validate_config_readable, validate_output_writable, validate_run_flags


@pytest.mark.unit
class TestTraceReader:
    """Test arrival-trace parsing"""

    def test_comments_and_blanks(self):
        """Test that comments and blank lines are skipped"""
        lines = ["# arrivals\n", "0\n", "\n", "  0.1 \n", "0.1\n", "2.5e-1\n"]
        assert parse_arrival_trace(lines) == [0.0, 0.1, 0.1, 0.25]

    def test_not_a_number(self):
        """Test that a bad line is reported with its number"""
        with pytest.raises(ConfigError) as exc_info:
            parse_arrival_trace(["0\n", "soon\n"])
        assert 'line 2' in str(exc_info.value)

    def test_negative(self):
        """Test that negative timestamps are rejected"""
        with pytest.raises(ConfigError):
            parse_arrival_trace(["-1\n"])

    def test_decreasing(self):
        """Test that time going backwards is a scheduling error"""
        with pytest.raises(SchedulingError):
            parse_arrival_trace(["0.2\n", "0.1\n"])

    def test_read_file(self, tmp_path):
        """Test reading from disk"""
        path = tmp_path / "trace.txt"
        path.write_text("0\n0.5\n")
        assert read_arrival_trace(str(path)) == [0.0, 0.5]
        with pytest.raises(ConfigError):
            read_arrival_trace(str(tmp_path / "missing.txt"))


@pytest.mark.unit
class TestCheckArrivals:
    """Test check_arrivals()"""

    def test_ubr_trace(self):
        """Test verdicts and counters against PCR = 10 cells/s"""
        frame, summary = check_arrivals(TrafficDescriptor(pcr=10), [0, 0.1, 0.15])
        assert list(frame.columns) == ['cell', 'arrival_s', 'verdict']
        assert list(frame['verdict']) == [CONFORMING, CONFORMING, NON_CONFORMING]
        assert summary == {'cells': 3, 'non_conforming': 1, 'burst_tolerance_s': 0.0}

    def test_vbr_trace(self):
        """Test that a VBR contract reports its burst tolerance"""
        d = TrafficDescriptor(pcr=10, scr=2, mbs=5, service_category=TrafficDescriptor.CATEGORY_VBR_NRT)
        _, summary = check_arrivals(d, [0, 0.1, 0.2, 0.3, 0.4, 0.5])
        assert summary['burst_tolerance_s'] == pytest.approx(1.6)
        assert summary['non_conforming'] == 1

    def test_requires_descriptor(self):
        """Test that a missing contract is a configuration error"""
        with pytest.raises(ConfigError):
            check_arrivals(None, [0])


@pytest.mark.unit
class TestValidation:
    """Test command-line input validation"""

    def test_config_readable(self, tmp_path):
        """Test config path checks"""
        assert validate_config_readable(None)[0]
        assert not validate_config_readable(str(tmp_path / "nope.yaml"))[0]
        assert not validate_config_readable(str(tmp_path))[0]
        path = tmp_path / "ok.yaml"
        path.write_text("")
        assert validate_config_readable(str(path))[0]

    def test_output_writable(self, tmp_path):
        """Test output path checks"""
        assert validate_output_writable(None)[0]
        assert validate_output_writable(str(tmp_path / "out.csv"))[0]
        assert not validate_output_writable(str(tmp_path))[0]
        assert not validate_output_writable(str(tmp_path / "missing" / "out.csv"))[0]

    def test_run_flags(self):
        """Test that every bad flag is listed"""
        ok, message = validate_run_flags(0, -1.0, -2.0, 'red')
        assert not ok
        for flag in ('--jobs', '--scale', '--warmup', '--policy'):
            assert flag in message
        assert validate_run_flags(None, None, None, None)[0]
        assert validate_run_flags(4, 0.1, 1.0, 'tail_drop')[0]
