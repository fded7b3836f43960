import numpy as np
import pytest

from ndncache.engine import SchedulingError, Simulator, make_rng, replication_seeds, spawn_rngs, to_ns


def test_schedule_now_runs_next():
    sim = Simulator()
    log = []
    sim.schedule_at(0.0, log.append, "a")
    sim.run_until(0.0)
    assert log == ["a"]


def test_equal_times_run_fifo():
    sim = Simulator()
    log = []
    sim.schedule_at(1.0, log.append, "A")
    sim.schedule_at(1.0, log.append, "B")
    sim.schedule_at(0.5, log.append, "first")
    sim.run_until(2.0)
    assert log == ["first", "A", "B"]


def test_schedule_into_past_aborts():
    sim = Simulator()
    sim.run_until(1.0)
    with pytest.raises(SchedulingError):
        sim.schedule_at(0.5, lambda: None)
    with pytest.raises(SchedulingError):
        sim.schedule(-0.1, lambda: None)


def test_run_until_empty_advances_clock():
    sim = Simulator()
    sim.run_until(500)
    assert sim.now == 500
    assert sim.executed == 0


def test_run_until_boundary():
    sim = Simulator()
    log = []
    sim.schedule_at(499.99, log.append, 1)
    sim.schedule_at(500.01, log.append, 2)
    sim.run_until(500)
    assert log == [1]
    assert len(sim) == 1
    sim.run_until(501)
    assert log == [1, 2]


def test_events_can_schedule_same_instant():
    sim = Simulator()
    log = []

    def first():
        log.append("first")
        sim.schedule(0.0, log.append, "chained")

    sim.schedule_at(1.0, first)
    sim.schedule_at(1.0, log.append, "second")
    sim.run_until(1.0)
    assert log == ["first", "second", "chained"]


def test_integer_time_has_no_drift():
    sim = Simulator()
    ticks = []

    def tick():
        ticks.append(sim.now_ns)
        if len(ticks) < 1000:
            sim.schedule(0.01, tick)

    sim.schedule_at(0.0, tick)
    sim.run_until(100)
    assert ticks[-1] == to_ns(9.99)


def test_run_drains():
    sim = Simulator()
    log = []
    for t in (3.0, 1.0, 2.0):
        sim.schedule_at(t, log.append, t)
    sim.run()
    assert log == [1.0, 2.0, 3.0]
    assert sim.now == 3.0


def test_seeds_are_reproducible():
    a = replication_seeds(42, 10)
    assert a == replication_seeds(42, 10)
    assert len(set(a)) == 10
    assert replication_seeds(42, 3) == a[:3]
    assert all(0 <= s < 2**64 for s in a)


def test_streams_reproducible_and_independent():
    x = make_rng(7).random(5)
    assert np.array_equal(x, make_rng(7).random(5))
    r1, r2 = spawn_rngs(7, 2)
    assert not np.array_equal(r1.random(5), r2.random(5))


def test_streams_are_pinned():
    # recorded once; a change means results are no longer comparable across versions
    assert make_rng(12345).integers(0, 2**32, size=3).tolist() == [3003105693, 976400781, 3387213022]
    assert replication_seeds(1, 2) == [8431846347943309920, 4042681867674859579]
