"""
Unit tests for the SACK TCP sender and receiver state machines
"""
import pytest

from core.errors import ConfigError
from core.simulator import to_ticks
from engines.tcp_endpoint import TcpReceiver, TcpSender
from models.segment import Segment
from models.tcp_state import DEFAULT_MSS, TcpConnState, merge_ranges

MSS = DEFAULT_MSS


def make_sender(cwnd_segments=1, rcv_wnd_segments=20, **kwargs):
    state = TcpConnState(rcv_wnd=rcv_wnd_segments * MSS, mss=MSS, **kwargs)
    state.cwnd = cwnd_segments * MSS
    return TcpSender(state)


def ack(number, *blocks):
    return Segment(ack=number, sack_blocks=tuple(blocks))


@pytest.mark.unit
class TestConnState:
    """Test TcpConnState construction and views"""

    def test_defaults(self):
        """Test initial cwnd of one MSS and ssthresh equal to the receiver window"""
        state = TcpConnState(rcv_wnd=600000)
        assert state.cwnd == MSS
        assert state.ssthresh == 600000
        assert state.rto == 3.0
        assert state.timer is None

    def test_invalid_parameters(self):
        """Test that bad TCP parameters are rejected together"""
        with pytest.raises(ConfigError) as exc_info:
            TcpConnState(rcv_wnd=100, mss=9180, min_rto=5, max_rto=1)
        assert 'rcv_wnd' in str(exc_info.value)
        assert 'rto bounds' in str(exc_info.value)

    def test_merge_ranges(self):
        """Test collapsing segment starts into disjoint ranges"""
        assert merge_ranges([30, 0, 10, 50], 10) == [(0, 20), (30, 40), (50, 60)]


@pytest.mark.unit
class TestMaybeSend:
    """Test TcpSender.maybe_send"""

    def test_window_of_two_segments(self):
        """Test cwnd=2 MSS with nothing in flight sends exactly two segments"""
        sender = make_sender(cwnd_segments=2)
        segments = sender.maybe_send(0)
        assert [s.seq for s in segments] == [0, MSS]
        assert all(s.length == MSS for s in segments)
        assert sender.state.timer == to_ticks(3.0), "sending arms the retransmission timer"

    def test_receiver_window_bounds_flight(self):
        """Test cwnd=10 MSS with rcv_wnd=5 MSS keeps 5 MSS in flight"""
        sender = make_sender(cwnd_segments=10, rcv_wnd_segments=5)
        assert len(sender.maybe_send(0)) == 5
        assert sender.state.flight_size == 5 * MSS
        assert sender.maybe_send(1) == []

    def test_retransmission_before_new_data(self):
        """Test that a hole in the scoreboard is resent before new data"""
        sender = make_sender(cwnd_segments=2)
        st = sender.state
        st.snd_nxt = 4 * MSS
        st.sacked = {MSS, 2 * MSS, 3 * MSS}
        st.lost = {0}
        segments = sender.maybe_send(0)
        assert [(s.seq, s.is_retransmission) for s in segments] == [(0, True), (4 * MSS, False)]
        assert st.retransmit_queue == []


@pytest.mark.unit
class TestOnAck:
    """Test TcpSender.on_ack"""

    def test_slow_start_step(self):
        """Test cwnd grows by one MSS per new ACK in slow start"""
        sender = make_sender(cwnd_segments=2)
        sender.maybe_send(0)
        sender.on_ack(ack(MSS), to_ticks(0.03))
        assert sender.state.cwnd == 3 * MSS

    def test_congestion_avoidance_step(self):
        """Test cwnd grows by MSS*MSS/cwnd per ACK above ssthresh"""
        sender = make_sender(cwnd_segments=10)
        sender.state.ssthresh = 5 * MSS
        sender.maybe_send(0)
        sender.on_ack(ack(MSS), to_ticks(0.03))
        assert sender.state.cwnd == 10 * MSS + MSS // 10

    def test_stale_ack_ignored(self):
        """Test that an ACK below snd_una changes nothing"""
        sender = make_sender(cwnd_segments=4)
        sender.maybe_send(0)
        sender.on_ack(ack(2 * MSS), 10)
        before = sender.state.to_dict()
        assert sender.on_ack(ack(MSS), 20) == []
        assert sender.state.to_dict() == before

    def test_fast_retransmit_with_sack(self):
        """Test three duplicate ACKs SACKing all but the first segment"""
        sender = make_sender(cwnd_segments=10, rcv_wnd_segments=10)
        sender.maybe_send(0)
        st = sender.state

        assert sender.on_ack(ack(0, (MSS, 10 * MSS)), 100) == []
        assert sender.on_ack(ack(0, (MSS, 10 * MSS)), 200) == []
        out = sender.on_ack(ack(0, (MSS, 10 * MSS)), 300)

        assert [(s.seq, s.is_retransmission) for s in out] == [(0, True)]
        assert st.ssthresh == 5 * MSS, "ssthresh is half of the 10-segment flight"
        assert st.cwnd == 5 * MSS
        assert st.in_recovery
        assert st.sack_scoreboard == [(MSS, 10 * MSS)]
        assert st.fast_retransmits == 1

    def test_recovery_ends_at_recover_point(self):
        """Test that a full ACK ends recovery with cwnd = ssthresh"""
        sender = make_sender(cwnd_segments=10, rcv_wnd_segments=10)
        sender.maybe_send(0)
        for t in (100, 200, 300):
            sender.on_ack(ack(0, (MSS, 10 * MSS)), t)
        out = sender.on_ack(ack(10 * MSS), 400)
        st = sender.state
        assert not st.in_recovery
        assert st.snd_una == 10 * MSS
        assert st.sacked == set()
        assert len(out) == 5, "a 5-segment window reopens after recovery"

    def test_karn_rule_skips_retransmitted_samples(self):
        """Test that an ACK for retransmitted data gives no RTT sample"""
        sender = make_sender(cwnd_segments=1)
        sender.maybe_send(0)
        sender.on_timeout(to_ticks(3.0))
        sender.on_ack(ack(MSS), to_ticks(3.5))
        assert sender.state.rtt_srtt is None

    def test_rtt_sample_sets_rto(self):
        """Test srtt, rttvar and the granularity-rounded RTO after one sample"""
        sender = make_sender(cwnd_segments=1)
        sender.maybe_send(0)
        sender.on_ack(ack(MSS), to_ticks(0.5))
        st = sender.state
        assert st.rtt_srtt == pytest.approx(0.5)
        assert st.rtt_var == pytest.approx(0.25)
        assert st.rto == pytest.approx(1.5)

    def test_rto_floor(self):
        """Test that a short RTT is clamped to the minimum RTO"""
        sender = make_sender(cwnd_segments=1)
        sender.maybe_send(0)
        sender.on_ack(ack(MSS), to_ticks(0.001))
        assert sender.state.rto == pytest.approx(0.2)


@pytest.mark.unit
class TestOnTimeout:
    """Test TcpSender.on_timeout"""

    def test_timeout_reaction(self):
        """Test flight of 8 MSS -> ssthresh 4 MSS, cwnd 1 MSS, oldest resent"""
        sender = make_sender(cwnd_segments=8)
        sender.maybe_send(0)
        out = sender.on_timeout(to_ticks(3.0))
        st = sender.state
        assert st.ssthresh == 4 * MSS
        assert st.cwnd == MSS
        assert [(s.seq, s.is_retransmission) for s in out] == [(0, True)]
        assert st.timer == to_ticks(3.0) + to_ticks(6.0)

    def test_exponential_backoff(self):
        """Test rto doubling over consecutive timeouts"""
        sender = make_sender(cwnd_segments=1, initial_rto=1.0)
        sender.maybe_send(0)
        rtos = []
        for t in (1.0, 3.0, 7.0):
            sender.on_timeout(to_ticks(t))
            rtos.append(sender.state.rto)
        assert rtos == [2.0, 4.0, 8.0]

    def test_backoff_capped(self):
        """Test that backoff stops at max_rto"""
        sender = make_sender(cwnd_segments=1, initial_rto=48.0)
        sender.maybe_send(0)
        sender.on_timeout(to_ticks(48.0))
        assert sender.state.rto == 64.0

    def test_timeout_with_nothing_outstanding(self):
        """Test that an idle connection only clears its timer"""
        sender = make_sender(cwnd_segments=3)
        st = sender.state
        st.timer = 123
        assert sender.on_timeout(200) == []
        assert st.timer is None
        assert st.cwnd == 3 * MSS
        assert st.timeouts == 0

    def test_sack_information_retained(self):
        """Test that SACKed segments are not resent after a timeout"""
        sender = make_sender(cwnd_segments=4, rcv_wnd_segments=4)
        sender.maybe_send(0)
        sender.on_ack(ack(0, (MSS, 2 * MSS)), 100)
        sender.on_timeout(to_ticks(3.0))
        st = sender.state
        assert MSS in st.sacked
        assert [seq for seq, _ in st.retransmit_queue] == [2 * MSS, 3 * MSS]


@pytest.mark.unit
class TestReceiver:
    """Test TcpReceiver.on_data"""

    def setup_method(self):
        self.receiver = TcpReceiver()

    def test_in_order_segment(self):
        """Test an in-order segment advances the cumulative ACK"""
        reply = self.receiver.on_data(Segment(seq=0, length=MSS), 0)
        assert reply.ack == MSS
        assert reply.sack_blocks == ()
        assert self.receiver.state.bytes_delivered == MSS

    def test_hole_reported_with_sack(self):
        """Test segments 0 and 2 received, 1 missing"""
        self.receiver.on_data(Segment(seq=0, length=MSS), 0)
        reply = self.receiver.on_data(Segment(seq=2 * MSS, length=MSS), 1)
        assert reply.ack == MSS
        assert reply.sack_blocks == ((2 * MSS, 3 * MSS),)
        assert self.receiver.state.bytes_delivered == MSS

    def test_segment_fields(self):
        """Test the end sequence number and the ACK marker of data and ACK segments"""
        data = Segment(seq=2 * MSS, length=MSS)
        assert data.end == 3 * MSS
        assert not data.is_pure_ack
        reply = self.receiver.on_data(data, 0)
        assert reply.is_pure_ack
        assert repr(reply) == f"Segment(ACK 0, sack={[(2 * MSS, 3 * MSS)]})"

    def test_duplicate_segment(self):
        """Test that a duplicate re-emits the same ACK and leaves the scoreboard alone"""
        self.receiver.on_data(Segment(seq=0, length=MSS), 0)
        self.receiver.on_data(Segment(seq=2 * MSS, length=MSS), 1)
        board = [list(b) for b in self.receiver.state.scoreboard]
        reply = self.receiver.on_data(Segment(seq=0, length=MSS), 2)
        assert reply.ack == MSS
        assert reply.sack_blocks == ((2 * MSS, 3 * MSS),)
        assert self.receiver.state.scoreboard == board
        assert self.receiver.state.duplicates == 1

    def test_hole_filled_delivers_everything(self):
        """Test that filling the hole advances past buffered data"""
        for seq in (0, 2 * MSS, 3 * MSS):
            self.receiver.on_data(Segment(seq=seq, length=MSS), 0)
        reply = self.receiver.on_data(Segment(seq=MSS, length=MSS), 1)
        assert reply.ack == 4 * MSS
        assert reply.sack_blocks == ()
        assert self.receiver.state.bytes_delivered == 4 * MSS

    def test_most_recent_block_first(self):
        """Test SACK block order and the three-block limit"""
        for k in (2, 4, 6, 8):
            reply = self.receiver.on_data(Segment(seq=k * MSS, length=MSS), k)
        assert reply.ack == 0
        assert reply.sack_blocks == ((8 * MSS, 9 * MSS), (6 * MSS, 7 * MSS), (4 * MSS, 5 * MSS))


@pytest.mark.unit
class TestLossRecoveryLoop:
    """Drive a sender and receiver against each other with one lost segment"""

    def test_lost_segment_eventually_acknowledged(self):
        """Test that a dropped segment is retransmitted and cumulatively ACKed"""
        sender = make_sender(cwnd_segments=8, rcv_wnd_segments=8)
        receiver = TcpReceiver()
        in_flight = sender.maybe_send(0)
        now = 0
        dropped_once = False
        delivered_total = 0
        for _ in range(200):
            if not in_flight:
                break
            now += 1000
            seg = in_flight.pop(0)
            if seg.seq == 2 * MSS and not dropped_once:
                dropped_once = True
                continue
            reply = receiver.on_data(seg, now)
            in_flight.extend(sender.on_ack(reply, now))
            delivered_total = receiver.state.bytes_delivered
            if sender.state.snd_una >= 40 * MSS:
                break
        assert dropped_once
        assert sender.state.fast_retransmits == 1
        assert sender.state.segments_retransmitted == 1
        assert delivered_total >= 40 * MSS
        assert delivered_total <= sender.state.snd_nxt
