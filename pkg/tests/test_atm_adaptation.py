"""
Unit tests for AAL5 segmentation, reassembly and the efficiency ceiling
"""
import pytest

from core.errors import ReassemblyError
from engines.atm_adaptation import (
    Reassembler, cells_for_payload, efficiency_ceiling, reassemble, segment
)
from models.cell import Aal5Frame, Cell


@pytest.mark.unit
class TestSegment:
    """Test segment()"""

    def test_full_mss_frame(self):
        """Test that 9180 payload bytes become 193 cells and 10229 wire bytes"""
        frame, cells = segment(9180, vc_id=3)
        assert frame.cell_count == 193
        assert len(cells) == 193
        assert frame.wire_bytes == 10229
        assert frame.total_encapsulated_len == 9236

    def test_pure_ack(self):
        """Test that a zero-length payload needs two cells"""
        frame, cells = segment(0, vc_id=0)
        assert frame.total_encapsulated_len == 56
        assert frame.cell_count == 2
        assert frame.wire_bytes == 106

    def test_exact_multiple_of_cell_payload(self):
        """Test 40 bytes -> 96 encapsulated bytes -> 2 cells, no padding cell"""
        frame, _ = segment(40, vc_id=0)
        assert frame.total_encapsulated_len == 96
        assert frame.cell_count == 2

    def test_only_last_cell_has_eom(self):
        """Test end-of-message marking and consecutive indices"""
        _, cells = segment(1000, vc_id=1, frame_id=9)
        assert [c.eom for c in cells] == [False] * (len(cells) - 1) + [True]
        assert [c.index for c in cells] == list(range(len(cells)))
        assert {c.frame_id for c in cells} == {9}
        assert cells[0].is_first

    def test_negative_payload_rejected(self):
        """Test that a negative payload length is invalid"""
        with pytest.raises(ValueError):
            Aal5Frame(0, 0, -1)

    def test_wire_accounting(self):
        """Test wire bytes = 53 x cells for a range of payloads"""
        total_cells = 0
        expected_bytes = 0
        for length in range(0, 20000, 37):
            frame, cells = segment(length, vc_id=0)
            total_cells += len(cells)
            expected_bytes += 53 * -(-(length + 56) // 48)
        assert 53 * total_cells == expected_bytes


@pytest.mark.unit
class TestEfficiencyCeiling:
    """Test efficiency_ceiling()"""

    def test_default_mss(self):
        """Test 9180/10229"""
        assert efficiency_ceiling(9180) == pytest.approx(0.89745, abs=1e-5)
        assert efficiency_ceiling(9180) * 149.7 == pytest.approx(134.35, abs=0.01)

    def test_small_mss(self):
        """Test 40/106"""
        assert efficiency_ceiling(40) == pytest.approx(0.3774, abs=1e-4)

    def test_local_maximum_without_padding(self):
        """Test that 9160 bytes fill 192 cells exactly"""
        assert cells_for_payload(9160) == 192
        assert efficiency_ceiling(9160) == pytest.approx(0.90016, abs=1e-5)
        assert efficiency_ceiling(9160) > efficiency_ceiling(9180)

    def test_non_positive_mss(self):
        """Test that mss must be positive"""
        with pytest.raises(ValueError):
            efficiency_ceiling(0)


@pytest.mark.unit
class TestReassembly:
    """Test Reassembler and reassemble()"""

    def test_intact_frame_delivered(self):
        """Test that all 193 cells yield one 9180-byte segment"""
        _, cells = segment(9180, vc_id=0)
        frames, discarded = reassemble(cells)
        assert len(frames) == 1
        assert frames[0].tcp_payload_len == 9180
        assert discarded == []

    def test_frame_missing_one_cell(self):
        """Test all-or-nothing delivery when a middle cell is lost"""
        _, cells = segment(9180, vc_id=0)
        del cells[100]
        reassembler = Reassembler()
        delivered = [f for f in (reassembler.receive(c) for c in cells) if f is not None]
        assert delivered == []
        assert reassembler.frames_discarded == 1
        assert reassembler.cells_wasted == 192

    def test_damaged_frame_followed_by_intact_frame(self):
        """Test that only the complete second frame is delivered"""
        _, first = segment(9180, vc_id=0, frame_id=0)
        _, second = segment(9180, vc_id=0, frame_id=1)
        frames, discarded = reassemble(first[:-1] + second)
        assert [f.frame_id for f in frames] == [1]
        assert discarded == [0]

    def test_missing_eom_detected_at_next_frame(self):
        """Test that a lost eom cell is proven by the next frame's first cell"""
        _, first = segment(100, vc_id=2, frame_id=0)
        _, second = segment(100, vc_id=2, frame_id=1)
        reassembler = Reassembler()
        for cell in first[:-1]:
            assert reassembler.receive(cell) is None
        assert reassembler.frames_discarded == 0
        reassembler.receive(second[0])
        assert reassembler.frames_discarded == 1

    def test_interleaved_frames_rejected(self):
        """Test that an older frame's cell after a newer frame is fatal"""
        _, first = segment(100, vc_id=0, frame_id=0)
        _, second = segment(100, vc_id=0, frame_id=1)
        reassembler = Reassembler()
        reassembler.receive(first[0])
        reassembler.receive(second[0])
        with pytest.raises(ReassemblyError):
            reassembler.receive(first[1])

    def test_vcs_reassemble_independently(self):
        """Test that frames on different VCs may interleave"""
        _, a = segment(100, vc_id=0)
        _, b = segment(100, vc_id=1)
        reassembler = Reassembler()
        out = []
        for x, y in zip(a, b):
            out.extend(f for f in (reassembler.receive(x), reassembler.receive(y)) if f is not None)
        assert sorted(f.vc_id for f in out) == [0, 1]

    def test_round_trip_identity(self):
        """Test reassemble(segment(x)) over payload sizes 0..20000"""
        for length in range(0, 20001, 7):
            frame, cells = segment(length, vc_id=0, direction=Cell.DIRECTION_REVERSE)
            frames, discarded = reassemble(cells)
            assert len(frames) == 1 and not discarded
            assert frames[0].tcp_payload_len == length
