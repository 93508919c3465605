"""
Unit tests for the UBR switch buffer and the Selective Drop policy
"""
import pytest

from core.errors import AccountingError, ConfigError
from engines.atm_adaptation import segment
from engines.ubr_switch import (
    DROPPED, POLICY_TAIL_DROP, QUEUED, SwitchBuffer, selective_drop_predicate
)


def frame_cells(vc_id, frame_id, n_cells):
    """Cells of a frame exactly n_cells long (n_cells >= 2)"""
    _, cells = segment(48 * n_cells - 56, vc_id, frame_id)
    assert len(cells) == n_cells
    return cells


def offer_all(buf, cells, now=None):
    return [buf.enqueue_cell(c, now) for c in cells]


@pytest.mark.unit
class TestSelectiveDropPredicate:
    """Test drop_test and the predicate"""

    def setup_method(self):
        self.buf = SwitchBuffer(1000, threshold_r=0.9, threshold_z=0.8)

    def _load(self, per_vc):
        # Direct state injection; drop_test reads only X, Y_i and N_a
        self.buf.per_vc_y = dict(per_vc)
        self.buf.occupancy_x = sum(per_vc.values())

    def test_over_fair_share_drops(self):
        """Test X=950, N_a=5, Y_i=200 -> 1.053 > 0.8 -> drop"""
        self._load({0: 200, 1: 250, 2: 250, 3: 150, 4: 100})
        assert self.buf.occupancy_x == 950
        assert self.buf.drop_test(0) is True

    def test_under_fair_share_accepts(self):
        """Test X=950, N_a=5, Y_i=100 -> 0.526 -> accept"""
        self._load({0: 200, 1: 250, 2: 250, 3: 150, 4: 100})
        assert self.buf.drop_test(4) is False

    def test_below_threshold_accepts(self):
        """Test X=800 <= R*K accepts regardless of Y_i"""
        self._load({0: 790, 1: 10})
        assert self.buf.drop_test(0) is False

    def test_vc_without_cells_never_dropped(self):
        """Test that Y_i = 0 makes the second conjunct false"""
        self._load({0: 990})
        assert self.buf.drop_test(7) is False

    def test_predicate_grid(self):
        """Test the predicate over a 50x50x10 grid of (X, Y_i, N_a)"""
        capacity = 40
        for x in range(1, 51):
            for y in range(50):
                for n_a in range(1, 11):
                    expected = 10 * x > 9 * capacity and 5 * y * n_a > 4 * x
                    assert selective_drop_predicate(x, y, n_a, capacity, 0.9, 0.8) == expected, (x, y, n_a)

    def test_fair_pressure_two_vcs(self):
        """Test that the VC above its fair share loses its next frame and the other does not"""
        buf = SwitchBuffer(100)
        assert offer_all(buf, frame_cells(0, 0, 60)) == [QUEUED] * 60
        assert offer_all(buf, frame_cells(1, 0, 35)) == [QUEUED] * 35
        assert buf.occupancy_x == 95 and buf.active_n_a == 2

        heavy = frame_cells(0, 1, 3)
        light = frame_cells(1, 1, 3)
        assert buf.enqueue_cell(heavy[0]) == DROPPED
        assert buf.enqueue_cell(light[0]) == QUEUED


@pytest.mark.unit
class TestEnqueue:
    """Test enqueue_cell"""

    def test_first_cell_into_empty_buffer(self):
        """Test that an empty buffer accepts"""
        buf = SwitchBuffer(10)
        assert buf.enqueue_cell(frame_cells(0, 0, 2)[0]) == QUEUED
        assert buf.occupancy_x == 1
        assert buf.per_vc_y == {0: 1}

    def test_selective_drop_discards_whole_frame(self):
        """Test that a dropped first cell takes all 192 remaining cells with it"""
        buf = SwitchBuffer(100)
        offer_all(buf, frame_cells(0, 0, 95))
        _, big = segment(9180, 0, 1)
        results = offer_all(buf, big)
        assert results == [DROPPED] * 193
        assert buf.cells_dropped_selective == 193
        assert buf.frames_dropped_selective == 1
        assert buf.occupancy_x == 95
        assert buf.discard_state == {}, "discard state ends with the eom cell"

        # the next frame is judged afresh
        assert buf.drop_test(0) is True

    def test_overflow_mid_frame_poisons_tail(self):
        """Test forced drop at a full buffer and partial packet discard of the rest"""
        buf = SwitchBuffer(10)
        results = offer_all(buf, frame_cells(0, 0, 12))
        assert results == [QUEUED] * 10 + [DROPPED, DROPPED]
        assert buf.cells_dropped_overflow == 2
        assert buf.frames_dropped_overflow == 1

        # the queued head of the frame still drains
        drained = [buf.dequeue_cell().index for _ in range(10)]
        assert drained == list(range(10))

    def test_overflow_tail_dropped_even_after_space_frees(self):
        """Test that a poisoned frame stays discarded under selective drop"""
        buf = SwitchBuffer(3)
        cells = frame_cells(0, 0, 6)
        offer_all(buf, cells[:4])
        buf.dequeue_cell()
        assert offer_all(buf, cells[4:]) == [DROPPED, DROPPED]

    def test_tail_drop_is_cell_granular(self):
        """Test that tail_drop drops only cells that find the buffer full"""
        buf = SwitchBuffer(3, policy=POLICY_TAIL_DROP)
        cells = frame_cells(0, 0, 6)
        assert offer_all(buf, cells[:4]) == [QUEUED] * 3 + [DROPPED]
        buf.dequeue_cell()
        assert offer_all(buf, cells[4:]) == [QUEUED, DROPPED]
        assert buf.frames_dropped_overflow == 1, "a damaged frame is counted once"
        assert buf.cells_dropped_selective == 0

    def test_tail_drop_never_selects(self):
        """Test that tail_drop ignores the Selective Drop predicate"""
        buf = SwitchBuffer(100, policy=POLICY_TAIL_DROP)
        offer_all(buf, frame_cells(0, 0, 95))
        assert buf.enqueue_cell(frame_cells(0, 1, 2)[0]) == QUEUED

    def test_capacity_never_exceeded(self):
        """Test occupancy stays within K under heavy offered load"""
        buf = SwitchBuffer(50)
        for frame_id in range(20):
            for vc in range(3):
                offer_all(buf, frame_cells(vc, frame_id, 7))
                assert len(buf) <= 50
            buf.dequeue_cell()
            buf.check_accounting()


@pytest.mark.unit
class TestDequeue:
    """Test dequeue_cell and accounting"""

    def test_single_cell(self):
        """Test that dequeuing the only cell empties the buffer"""
        buf = SwitchBuffer(10)
        buf.enqueue_cell(frame_cells(4, 0, 2)[0])
        cell = buf.dequeue_cell()
        assert cell.vc_id == 4
        assert buf.occupancy_x == 0
        assert buf.active_n_a == 0

    def test_strict_fifo_across_vcs(self):
        """Test that cells leave in arrival order regardless of VC"""
        buf = SwitchBuffer(10)
        for vc, frame in ((1, 0), (2, 0), (1, 1)):
            buf.enqueue_cell(frame_cells(vc, frame, 2)[0])
        assert [buf.dequeue_cell().vc_id for _ in range(3)] == [1, 2, 1]
        assert buf.dequeue_cell() is None

    def test_mean_occupancy_time_weighted(self):
        """Test the time-weighted mean occupancy"""
        buf = SwitchBuffer(10)
        cells = frame_cells(0, 0, 2)
        buf.enqueue_cell(cells[0], now=0)
        buf.enqueue_cell(cells[1], now=0)
        buf.dequeue_cell(now=10)
        assert buf.mean_occupancy(20) == pytest.approx(1.5)
        assert buf.max_occupancy == 2

    def test_accounting_violation_detected(self):
        """Test that corrupted counters raise AccountingError"""
        buf = SwitchBuffer(10)
        buf.enqueue_cell(frame_cells(0, 0, 2)[0])
        buf.check_accounting()
        buf.occupancy_x = 2
        with pytest.raises(AccountingError):
            buf.check_accounting()

    def test_stats(self):
        """Test exported per-run statistics"""
        buf = SwitchBuffer(3, name='port')
        offer_all(buf, frame_cells(2, 0, 5))
        stats = buf.get_stats(now=0)
        assert stats['name'] == 'port'
        assert stats['cells_received'] == 5
        assert stats['cells_queued'] == 3
        assert stats['cells_dropped'] == 2
        assert stats['per_vc_dropped'] == {2: 2}

    def test_invalid_configuration(self):
        """Test that bad capacity and policy are reported together"""
        with pytest.raises(ConfigError) as exc_info:
            SwitchBuffer(0, policy='red')
        assert 'capacity' in str(exc_info.value)
        assert 'policy' in str(exc_info.value)
