"""GOOSE publication semantics: numbering, burst schedule, heartbeat."""

import pytest

from vied.codec import decode_goose
from vied.runtime import GoosePublication, GoosePublisher

IDLE = (False,) * 13
TRIPPED = (True,) * 13


def make_pub():
    return GoosePublisher(GoosePublication())


def decode_all(frames):
    return [decode_goose(f) for f in frames]


def test_first_update_publishes_state_1():
    pub = make_pub()
    frames = decode_all(pub.update(IDLE, 0.0))
    assert len(frames) == 1
    assert frames[0].st_num == 1
    assert frames[0].sq_num == 0


def test_change_increments_st_and_resets_sq():
    pub = make_pub()
    pub.update(IDLE, 0.0)
    frames = decode_all(pub.update(TRIPPED, 0.5))
    assert frames[0].st_num == 2
    assert frames[0].sq_num == 0
    assert frames[0].entry("TRIP") is True


def test_burst_schedule_2_4_8_16_ms():
    pub = make_pub()
    pub.update(IDLE, 0.0)
    got = []
    t = 0.0
    dt = 1 / 4800.0
    while t < 0.03:
        for f in decode_all(pub.update(IDLE, t)):
            got.append((t, f.sq_num))
        t += dt
    # retransmissions land at the first sample instant >= each offset
    times = [round(t * 1000, 3) for t, _ in got]
    for expect in (2.0, 4.0, 8.0, 16.0):
        assert any(expect <= ms < expect + 1000 / 4800 + 1e-6 for ms in times), times
    assert [sq for _, sq in got] == [1, 2, 3, 4]


def test_stable_heartbeat_increments_sq():
    pub = make_pub()
    pub.update(IDLE, 0.0)
    seen = []
    t = 0.0
    while t < 3.2:
        for f in decode_all(pub.update(IDLE, t)):
            seen.append((round(t, 3), f.st_num, f.sq_num))
        t += 1 / 480.0
    heartbeats = [s for s in seen if s[0] > 0.05]
    assert len(heartbeats) == 3  # ~1.016, ~2.016, ~3.016 s
    assert all(st == 1 for _, st, _ in heartbeats)
    sqs = [sq for _, _, sq in heartbeats]
    assert sqs == [5, 6, 7]  # burst consumed 1..4


def test_st_num_non_decreasing_and_sq_zero_on_changes():
    pub = make_pub()
    stream = []
    t = 0.0
    values = IDLE
    for k in range(5000):
        if k in (100, 2000, 2100):
            values = TRIPPED if values == IDLE else IDLE
        for f in decode_all(pub.update(values, t)):
            stream.append(f)
        t += 1 / 4800.0
    st_nums = [f.st_num for f in stream]
    assert st_nums == sorted(st_nums)
    for prev, cur in zip(stream, stream[1:]):
        if cur.st_num != prev.st_num:
            assert cur.st_num == prev.st_num + 1
            assert cur.sq_num == 0
        else:
            assert cur.sq_num == prev.sq_num + 1


def test_ttl_covers_next_transmission():
    pub = make_pub()
    frames = decode_all(pub.update(IDLE, 0.0))
    assert frames[0].ttl_ms >= 4  # next retransmission at 2 ms
    # after the burst, ttl spans the stable interval
    later = []
    t = 0.0
    while t < 1.2:
        later.extend(decode_all(pub.update(IDLE, t)))
        t += 0.01
    assert later[-1].ttl_ms == pytest.approx(2000, abs=50)
