"""Deterministic discrete-event kernel and seeded random streams."""

from __future__ import annotations

import heapq
import itertools

import numpy as np

__all__ = [
    "NS_PER_S",
    "SchedulingError",
    "Simulator",
    "to_ns",
    "to_seconds",
    "replication_seeds",
    "make_rng",
    "spawn_rngs",
]

NS_PER_S = 1_000_000_000


class SchedulingError(RuntimeError):
    """An event was scheduled before the current clock."""


def to_ns(seconds):
    return int(round(seconds * NS_PER_S))


def to_seconds(ns):
    return ns / NS_PER_S


class Simulator:
    """Event queue with a virtual clock kept in integer nanoseconds.

    Events with the same firing time run in the order they were scheduled.
    Callbacks receive the positional arguments given at scheduling time.
    """

    def __init__(self):
        self._queue = []
        self._seq = itertools.count()
        self.now_ns = 0
        self.executed = 0

    @property
    def now(self):
        return self.now_ns / NS_PER_S

    def __len__(self):
        return len(self._queue)

    def schedule_at_ns(self, t_ns, fn, *args):
        if t_ns < self.now_ns:
            raise SchedulingError(
                f"event at {t_ns} ns scheduled from {self.now_ns} ns (in the past)"
            )
        heapq.heappush(self._queue, (t_ns, next(self._seq), fn, args))

    def schedule_at(self, t, fn, *args):
        """Schedule ``fn(*args)`` at absolute time ``t`` seconds."""
        self.schedule_at_ns(to_ns(t), fn, *args)

    def schedule(self, delay, fn, *args):
        """Schedule ``fn(*args)`` ``delay`` seconds from now."""
        if delay < 0:
            raise SchedulingError(f"negative delay {delay}")
        self.schedule_at_ns(self.now_ns + to_ns(delay), fn, *args)

    def schedule_ns(self, delay_ns, fn, *args):
        self.schedule_at_ns(self.now_ns + delay_ns, fn, *args)

    def run_until(self, t_end):
        """Execute every event with firing time <= ``t_end``; leave the clock at ``t_end``."""
        end_ns = to_ns(t_end)
        queue = self._queue
        pop = heapq.heappop
        last = (self.now_ns, -1)
        while queue and queue[0][0] <= end_ns:
            t_ns, seq, fn, args = pop(queue)
            assert (t_ns, seq) > last, "event executed out of order"
            last = (t_ns, seq)
            self.now_ns = t_ns
            fn(*args)
            self.executed += 1
        if end_ns > self.now_ns:
            self.now_ns = end_ns

    def run(self):
        """Drain the queue completely."""
        while self._queue:
            self.run_until(to_seconds(self._queue[0][0]))


# Random streams: numpy's PCG64 seeded through SeedSequence. Both are
# specified bit-for-bit by numpy, so streams match across platforms.

def replication_seeds(master_seed, count):
    """Derive ``count`` independent 64-bit replication seeds from a master seed.

    Replication ``r`` takes the first 64-bit word of
    ``SeedSequence(master_seed, spawn_key=(r,))``.
    """
    return [
        int(np.random.SeedSequence(master_seed, spawn_key=(r,)).generate_state(1, np.uint64)[0])
        for r in range(count)
    ]


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed, count):
    """``count`` independent generators derived from one seed."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]
