"""
SACK TCP endpoint - greedy bulk sender and acknowledging receiver

Sender: slow start, congestion avoidance, fast retransmit with SACK-based
(pipe-style) recovery, retransmission timeout with exponential backoff.
Receiver: cumulative ACK plus up to three SACK blocks per ACK, one ACK for
every data segment.
"""
import bisect
import logging
import math
from typing import List, Optional

from core.errors import AccountingError
from core.simulator import to_seconds, to_ticks
from models.segment import Segment
from models.tcp_state import ReceiverState, TcpConnState

logger = logging.getLogger(__name__)

DUP_THRESHOLD = 3


class TcpSender:
    """Infinite, unidirectional TCP source"""

    def __init__(self, state: TcpConnState, name: str = 'tcp'):
        """
        Initialize TcpSender

        Args:
            state: Connection state (owned by this sender)
            name: Label used in log messages
        """
        self.state = state
        self.name = name

    # Sending

    def maybe_send(self, now: int) -> List[Segment]:
        """
        Emit every segment the windows allow, retransmissions first

        Args:
            now: Current tick

        Returns:
            Segments to transmit, in order
        """
        st = self.state
        mss = st.mss
        limit = min(st.cwnd, st.rcv_wnd)
        out: List[Segment] = []

        while st.pipe + mss <= limit:
            if st.lost:
                seq = min(st.lost)
                st.lost.discard(seq)
                st.retransmitted.add(seq)
                st.send_times.pop(seq, None)
                st.segments_retransmitted += 1
                out.append(Segment(seq=seq, length=mss, is_retransmission=True))
            elif st.snd_nxt + mss <= st.snd_una + st.rcv_wnd:
                seq = st.snd_nxt
                st.send_times[seq] = now
                st.snd_nxt += mss
                st.bytes_sent_new += mss
                out.append(Segment(seq=seq, length=mss))
            else:
                break

            st.segments_sent += 1
            if st.pipe > limit:
                raise AccountingError(
                    f"{self.name}: {st.pipe} bytes in flight exceed min(cwnd, rcv_wnd)={limit}"
                )

        if out and st.timer is None:
            st.timer = now + to_ticks(st.rto)
        return out

    # Acknowledgments

    def on_ack(self, ack_seg: Segment, now: int) -> List[Segment]:
        """
        Process an incoming ACK

        Args:
            ack_seg: Pure ACK segment from the receiver
            now: Current tick

        Returns:
            Segments released by the ACK
        """
        st = self.state
        mss = st.mss
        if ack_seg.ack < st.snd_una:
            logger.debug(f"{self.name}: stale ACK {ack_seg.ack} below snd_una {st.snd_una}")
            return []

        # an ACK that fills a hole is delayed by the loss; no RTT sample from it
        clean_sample = not st.sacked and not st.retransmitted and not st.in_recovery
        self._record_sacks(ack_seg)

        if ack_seg.ack > st.snd_una:
            if clean_sample:
                self._sample_rtt(ack_seg.ack, now)
            self._advance_una(ack_seg.ack)
            st.dupacks = 0

            if st.in_recovery:
                if st.snd_una >= st.recover:
                    st.in_recovery = False
                    st.cwnd = st.ssthresh
                else:
                    # partial ACK: the new first hole is lost if data above it arrived
                    if st.sacked and st.snd_una not in st.retransmitted and st.snd_una not in st.sacked:
                        st.lost.add(st.snd_una)
                    self._mark_losses()
            elif st.cwnd < st.ssthresh:
                st.cwnd += mss
            else:
                st.cwnd += max(1, mss * mss // st.cwnd)

            st.timer = now + to_ticks(st.rto) if st.snd_nxt > st.snd_una else None

        elif st.snd_nxt > st.snd_una:
            st.dupacks += 1
            if st.in_recovery:
                self._mark_losses()
            elif st.dupacks >= DUP_THRESHOLD and st.snd_una >= st.recover:
                self._enter_recovery()

        return self.maybe_send(now)

    def _record_sacks(self, ack_seg: Segment):
        st = self.state
        mss = st.mss
        floor = max(st.snd_una, ack_seg.ack)
        for start, end in ack_seg.sack_blocks:
            seq = max(start, floor)
            seq += (-seq) % mss
            while seq + mss <= min(end, st.snd_nxt):
                if seq not in st.sacked:
                    st.sacked.add(seq)
                    st.lost.discard(seq)
                    st.retransmitted.discard(seq)
                seq += mss

    def _advance_una(self, ack: int):
        st = self.state
        mss = st.mss
        seq = st.snd_una - st.snd_una % mss
        while seq < ack:
            st.sacked.discard(seq)
            st.lost.discard(seq)
            st.retransmitted.discard(seq)
            st.send_times.pop(seq, None)
            seq += mss
        st.snd_una = ack

    def _sample_rtt(self, ack: int, now: int):
        """Take an RTT sample from the newest fully acknowledged, never retransmitted segment"""
        st = self.state
        sent_at = st.send_times.get(ack - st.mss)
        if sent_at is None:
            return
        sample = to_seconds(now - sent_at)
        if st.rtt_srtt is None:
            st.rtt_srtt = sample
            st.rtt_var = sample / 2
        else:
            st.rtt_var = 0.75 * st.rtt_var + 0.25 * abs(st.rtt_srtt - sample)
            st.rtt_srtt = 0.875 * st.rtt_srtt + 0.125 * sample
        st.rto = self._bounded_rto(st.rtt_srtt + max(st.granularity, 4 * st.rtt_var))

    def _bounded_rto(self, rto: float) -> float:
        st = self.state
        ticks = math.ceil(round(rto / st.granularity, 9))
        return min(max(ticks * st.granularity, st.min_rto), st.max_rto)

    def _enter_recovery(self):
        st = self.state
        st.ssthresh = max(st.flight_size // 2, 2 * st.mss)
        st.cwnd = st.ssthresh
        st.in_recovery = True
        st.recover = st.snd_nxt
        st.fast_retransmits += 1
        if st.snd_una not in st.sacked and st.snd_una not in st.retransmitted:
            st.lost.add(st.snd_una)
        self._mark_losses()
        logger.debug(f"{self.name}: fast retransmit at una={st.snd_una}, ssthresh={st.ssthresh}")

    def _mark_losses(self):
        """Deem lost every hole with at least DUP_THRESHOLD segments SACKed above it"""
        st = self.state
        if not st.sacked:
            return
        mss = st.mss
        above = 0
        seq = max(st.sacked)
        while seq >= st.snd_una:
            if seq in st.sacked:
                above += 1
            elif above >= DUP_THRESHOLD and seq not in st.retransmitted:
                st.lost.add(seq)
            seq -= mss

    # Timer

    def on_timeout(self, now: int) -> List[Segment]:
        """
        Retransmission timer expiry

        Args:
            now: Current tick

        Returns:
            Segments to send (the oldest unacknowledged one first)
        """
        st = self.state
        if st.snd_nxt == st.snd_una:
            st.timer = None
            return []

        st.timeouts += 1
        st.ssthresh = max(st.flight_size // 2, 2 * st.mss)
        st.cwnd = st.mss
        st.rto = min(st.rto * 2, st.max_rto)
        st.dupacks = 0
        st.in_recovery = False
        st.recover = st.snd_nxt

        # Everything outstanding and not SACKed is presumed lost
        st.retransmitted.clear()
        st.send_times.clear()
        seq = st.snd_una
        while seq < st.snd_nxt:
            if seq not in st.sacked:
                st.lost.add(seq)
            seq += st.mss

        logger.debug(f"{self.name}: RTO at {now}, rto now {st.rto:.1f}s, ssthresh={st.ssthresh}")
        st.timer = None
        return self.maybe_send(now)


class TcpReceiver:
    """Acknowledging receiver with SACK generation"""

    def __init__(self, state: Optional[ReceiverState] = None, name: str = 'tcp-rx'):
        self.state = state or ReceiverState()
        self.name = name

    def on_data(self, seg: Segment, now: int) -> Segment:
        """
        Accept a data segment and build the ACK for it

        Args:
            seg: Data segment (length > 0)
            now: Current tick

        Returns:
            ACK segment with cumulative ack and SACK blocks
        """
        st = self.state
        st.segments_received += 1
        start, end = seg.seq, seg.end

        if end <= st.rcv_nxt or self._covered(start, end):
            st.duplicates += 1
        elif start <= st.rcv_nxt:
            advanced = end - st.rcv_nxt
            st.rcv_nxt = end
            while st.scoreboard and st.scoreboard[0][0] <= st.rcv_nxt:
                block = st.scoreboard.pop(0)
                if block[1] > st.rcv_nxt:
                    advanced += block[1] - st.rcv_nxt
                    st.rcv_nxt = block[1]
            st.bytes_delivered += advanced
            st.recent = [s for s in st.recent if s >= st.rcv_nxt]
        else:
            self._insert(start, end)
            if start in st.recent:
                st.recent.remove(start)
            st.recent.insert(0, start)
            del st.recent[ReceiverState.RECENT_LIMIT:]

        return Segment(ack=st.rcv_nxt, sack_blocks=self._sack_blocks(start if start > st.rcv_nxt else None))

    def _covered(self, start: int, end: int) -> bool:
        for block in self.state.scoreboard:
            if block[0] <= start and end <= block[1]:
                return True
        return False

    def _insert(self, start: int, end: int):
        board = self.state.scoreboard
        index = bisect.bisect_left(board, [start, end])
        board.insert(index, [start, end])
        # merge with neighbours
        merged: List[List[int]] = []
        for block in board:
            if merged and block[0] <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], block[1])
            else:
                merged.append(block)
        self.state.scoreboard = merged

    def _sack_blocks(self, newest: Optional[int]):
        st = self.state
        blocks = []
        order = ([newest] if newest is not None else []) + st.recent
        for seq in order:
            for block in st.scoreboard:
                if block[0] <= seq < block[1]:
                    candidate = (block[0], block[1])
                    if candidate not in blocks:
                        blocks.append(candidate)
                    break
            if len(blocks) == Segment.MAX_SACK_BLOCKS:
                break
        return tuple(blocks)
