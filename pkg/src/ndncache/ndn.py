"""NDN forwarding semantics: Content Store, PIT and FIB, plus applications.

Interests climb toward the producer of their application along static
minimum-hop routes. Each router checks its Content Store, then its PIT, then
forwards via the FIB. Data retraces the PIT breadcrumbs and is cached at
every router it crosses (cache-everything, LRU replacement).

A router that cannot forward an Interest answers with a Nack so that every
issued Interest is accounted for as satisfied, expired or dropped.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import OrderedDict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import NS_PER_S, Simulator, spawn_rngs, to_ns
from .topology import next_hops

__all__ = [
    "CHUNK_SIZE",
    "INTEREST_SIZE",
    "ContentName",
    "Interest",
    "DataChunk",
    "ContentStore",
    "PitEntry",
    "Router",
    "Consumer",
    "Producer",
    "CatalogModel",
    "mzipf_pmf",
    "mzipf_sample",
    "zipf_pmf",
    "Network",
]

CHUNK_SIZE = 10_240  # bytes
INTEREST_SIZE = 50  # bytes; only affects serialization delay


class ContentName(NamedTuple):
    app: int
    file_rank: int
    chunk_seq: int

    def __str__(self):
        return f"/app{self.app}/file{self.file_rank}/{self.chunk_seq}"


class Interest(NamedTuple):
    name: ContentName
    issued_at: float
    origin: int


class DataChunk(NamedTuple):
    name: ContentName
    size: int = CHUNK_SIZE


class ContentStore:
    """LRU chunk cache with cumulative hit and miss counters.

    ``lookup`` counts hits only; callers record misses explicitly because a
    router does not count a miss for an Interest that is aggregated in its PIT.
    """

    def __init__(self, capacity):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = int(capacity)
        self._entries = OrderedDict()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name):
        return name in self._entries

    def __iter__(self):
        """Names from least to most recently used."""
        return iter(self._entries)

    def lookup(self, name):
        if name in self._entries:
            self._entries.move_to_end(name)
            self.hits += 1
            return True
        return False

    def record_miss(self):
        self.misses += 1

    def insert(self, name):
        if self.capacity == 0:
            return
        entries = self._entries
        if name in entries:
            entries.move_to_end(name)
            return
        if len(entries) >= self.capacity:
            entries.popitem(last=False)
            self.evictions += 1
        entries[name] = None

    def resize(self, capacity):
        """Change capacity, evicting least-recently-used entries if shrinking."""
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = int(capacity)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)
            self.evictions += 1

    def reset_counters(self):
        self.hits = 0
        self.misses = 0


@dataclass(slots=True)
class PitEntry:
    name: ContentName
    faces: set
    created_at_ns: int
    expires_at_ns: int


# --- popularity model -------------------------------------------------------

class CatalogModel:
    """Mandelbrot-Zipf popularity over the ``file_count`` files of one application.

    Parameters
    ----------
    q : float
        Plateau factor (>= 0). ``q = 0`` gives plain Zipf.
    s : float
        Shaping factor.
    file_count : int
        Number of files ranked 1..file_count.
    chunks_per_file : int
    """

    def __init__(self, q, s, file_count, chunks_per_file=1):
        if q < 0:
            raise ValueError("plateau factor q must be >= 0")
        if s < 0:
            raise ValueError("shaping factor s must be >= 0")
        if file_count < 1:
            raise ValueError("file_count must be >= 1")
        if chunks_per_file < 1:
            raise ValueError("chunks_per_file must be >= 1")
        self.q = float(q)
        self.s = float(s)
        self.file_count = int(file_count)
        self.chunks_per_file = int(chunks_per_file)
        ranks = np.arange(1, self.file_count + 1, dtype=np.float64)
        weights = (ranks + self.q) ** -self.s
        self._norm = _fsum(weights)
        self.pmf = weights / self._norm
        cdf = np.cumsum(self.pmf)
        cdf[-1] = 1.0
        self.cdf = cdf
        self._cdf_list = cdf.tolist() if self.file_count <= 1_000_000 else None

    def __repr__(self):
        return f"CatalogModel(q={self.q}, s={self.s}, file_count={self.file_count}, chunks_per_file={self.chunks_per_file})"

    def probability(self, rank):
        if not 1 <= rank <= self.file_count:
            raise ValueError(f"rank {rank} outside [1, {self.file_count}]")
        return float(self.pmf[rank - 1])

    def sample(self, rng):
        """Inverse-CDF draw of a rank in ``1..file_count``."""
        u = rng.random()
        if self._cdf_list is not None:
            i = bisect_right(self._cdf_list, u)
        else:
            i = int(np.searchsorted(self.cdf, u, side="right"))
        return min(i, self.file_count - 1) + 1

    def head_mass(self, k):
        """Probability mass of the ``k`` most popular ranks."""
        if not 0 <= k <= self.file_count:
            raise ValueError("k out of range")
        if k == 0:
            return 0.0
        return _fsum(self.pmf[:k])


def _fsum(a):
    return math.fsum(np.asarray(a, dtype=np.float64).tolist())


def mzipf_pmf(catalog, i):
    """Probability of rank ``i`` under ``catalog``'s Mandelbrot-Zipf law."""
    return catalog.probability(i)


def mzipf_sample(catalog, rng):
    return catalog.sample(rng)


def zipf_pmf(s, file_count):
    """Plain Zipf pmf over ranks 1..file_count, computed independently of CatalogModel."""
    w = [1.0 / (i ** s) for i in range(1, file_count + 1)]
    total = sum(w)
    return [x / total for x in w]


# --- nodes ------------------------------------------------------------------

class Router:
    """One NDN forwarder: Content Store, Pending Interest Table and FIB."""

    def __init__(self, net, node_id, cs_capacity):
        self.net = net
        self.id = node_id
        self.cs = ContentStore(cs_capacity)
        self.pit = OrderedDict()
        self.fib = {}
        self.window_hits = 0
        self.drops = 0
        self.unsolicited = 0
        self.expired = 0
        self.forwarded = 0

    # PIT entries share one lifetime, so insertion order is expiry order.
    def purge_expired(self):
        pit = self.pit
        now = self.net.sim.now_ns
        while pit:
            entry = next(iter(pit.values()))
            if entry.expires_at_ns > now:
                break
            pit.popitem(last=False)
            self.expired += 1
            self.net._trace("pit_expire", self.id, entry.name)

    def pending_count(self):
        self.purge_expired()
        return len(self.pit)

    def handle_interest(self, interest, from_):
        net = self.net
        self.purge_expired()
        name = interest.name
        if self.cs.lookup(name):
            self.window_hits += 1
            net._trace("hit", self.id, name)
            net.send_data(self.id, from_, DataChunk(name, net.chunk_size))
            return
        entry = self.pit.get(name)
        if entry is not None:
            entry.faces.add(from_)
            return
        self.cs.record_miss()
        nh = self.fib.get(name.app)
        if nh is None:
            self.drops += 1
            net.send_nack(self.id, from_, name)
            return
        now = net.sim.now_ns
        self.pit[name] = PitEntry(name, {from_}, now, now + net.pit_lifetime_ns)
        self.forwarded += 1
        net._trace("forward", self.id, name)
        net.send_interest(self.id, nh, interest)

    def handle_data(self, data, from_):
        self.purge_expired()
        entry = self.pit.pop(data.name, None)
        if entry is None:
            self.unsolicited += 1
            return
        net = self.net
        net._trace("satisfy", self.id, data.name)
        self.cs.insert(data.name)
        for face in sorted(entry.faces):
            net.send_data(self.id, face, data)

    def handle_nack(self, name, from_):
        entry = self.pit.pop(name, None)
        if entry is None:
            return
        self.net._trace("nack", self.id, name)
        for face in sorted(entry.faces):
            self.net.send_nack(self.id, face, name)


class Consumer:
    """Poisson Interest source walking sequential chunks of Mzipf-drawn files."""

    def __init__(self, net, node_id, rng, rate_hz, catalog, n_apps):
        self.net = net
        self.id = node_id
        self.router = net.topology.neighbors(node_id)[0]
        self.rng = rng
        self.rate_hz = rate_hz
        self.catalog = catalog
        self.n_apps = n_apps
        self.cursor = {}
        self.outstanding = {}
        self.active = True
        self.issued = 0
        self.satisfied = 0
        self.expired = 0
        self.dropped = 0
        self.late = 0
        self.rtts = []  # (satisfied_at_ns, rtt_s)

    def start(self, at=0.0):
        if self.rate_hz > 0:  # a silent consumer issues nothing
            self.net.sim.schedule_at(at, self.tick)

    def next_name(self):
        app = int(self.rng.integers(1, self.n_apps + 1))
        rank = self.catalog.sample(self.rng)
        key = (app, rank)
        k = self.cursor.get(key, 0)
        self.cursor[key] = k + 1
        return ContentName(app, rank, k % self.catalog.chunks_per_file)

    def tick(self):
        if not self.active:
            return
        net = self.net
        name = self.next_name()
        now = net.sim.now_ns
        self.issued += 1
        self.outstanding.setdefault(name, []).append(now)
        net.send_interest(self.id, self.router, Interest(name, now / NS_PER_S, self.id))
        if self.rate_hz > 0:
            gap = self.rng.exponential(1.0 / self.rate_hz)
            net.sim.schedule_ns(to_ns(gap), self.tick)

    def handle_data(self, data, from_):
        issued = self.outstanding.pop(data.name, None)
        if issued is None:
            self.late += 1
            return
        now = self.net.sim.now_ns
        life = self.net.pit_lifetime_ns
        for t in issued:
            if now - t <= life:
                self.satisfied += 1
                self.rtts.append((now, (now - t) / NS_PER_S))
            else:
                self.expired += 1

    def handle_nack(self, name, from_):
        issued = self.outstanding.pop(name, None)
        if issued is not None:
            self.dropped += len(issued)

    def expire_all(self):
        """Account every still-outstanding Interest as expired."""
        for issued in self.outstanding.values():
            self.expired += len(issued)
        self.outstanding.clear()


class Producer:
    """Serves one application; its own Content Store fronts an unbounded repository."""

    def __init__(self, net, node_id, app, cs_capacity):
        self.net = net
        self.id = node_id
        self.app = app
        self.cs = ContentStore(cs_capacity)
        self.drops = 0
        self.served = 0

    def handle_interest(self, interest, from_):
        name = interest.name
        if name.app != self.app:
            self.drops += 1
            self.net.send_nack(self.id, from_, name)
            return
        if not self.cs.lookup(name):
            self.cs.record_miss()
            self.cs.insert(name)
        self.served += 1
        self.net.send_data(self.id, from_, DataChunk(name, self.net.chunk_size))

    def handle_data(self, data, from_):
        pass

    def handle_nack(self, name, from_):
        pass


# --- network ----------------------------------------------------------------

class Network:
    """All nodes of one simulated NDN wired to one :class:`Simulator`.

    Producers are assigned applications ``1..P`` in ascending node-id order.

    Parameters
    ----------
    topology : Topology
    catalog : CatalogModel
        Per-application catalog; every application has the same model.
    router_capacity : int or dict
        Initial Content Store size of every router, or a per-router mapping.
    producer_capacity : int
    rate_hz : float
        Interest rate of each consumer.
    pit_lifetime : float
        Seconds.
    seed : int
        Consumers draw from independent streams spawned from this seed.
    chunk_size : int
        Bytes per Data chunk.
    trace : list, optional
        When given, forwarding events are appended as ``(t_ns, event, node, name)``.
    """

    def __init__(self, topology, catalog, router_capacity, producer_capacity=0,
                 rate_hz=20.0, pit_lifetime=2.0, seed=0, sim=None, trace=None,
                 chunk_size=CHUNK_SIZE):
        self.topology = topology
        self.catalog = catalog
        self.sim = sim if sim is not None else Simulator()
        self.pit_lifetime_ns = to_ns(pit_lifetime)
        self.trace = trace
        self.chunk_size = int(chunk_size)
        self.data_sent = 0
        self.interests_sent = 0

        self._link_ns = {}
        for link in topology.links:
            prop = to_ns(link.delay)
            i_ns = prop + to_ns(INTEREST_SIZE * 8 / link.bandwidth)
            d_ns = prop + to_ns(self.chunk_size * 8 / link.bandwidth)
            for a, b in ((link.u, link.v), (link.v, link.u)):
                self._link_ns[(a, b)] = (i_ns, d_ns)

        self.nodes = {}
        self.routers = {}
        for r in topology.routers:
            cap = router_capacity[r] if isinstance(router_capacity, dict) else router_capacity
            self.routers[r] = self.nodes[r] = Router(self, r, cap)
        self.producers = {}
        self.app_producer = {}
        for app, p in enumerate(topology.producers, start=1):
            self.producers[p] = self.nodes[p] = Producer(self, p, app, producer_capacity)
            self.app_producer[app] = p
        self.n_apps = len(self.producers)

        table = next_hops(topology)
        for r, router in self.routers.items():
            for app, p in self.app_producer.items():
                router.fib[app] = table[(r, p)]

        consumer_ids = topology.consumers
        rngs = spawn_rngs(seed, len(consumer_ids))
        self.consumers = {}
        for c, rng in zip(consumer_ids, rngs):
            self.consumers[c] = self.nodes[c] = Consumer(self, c, rng, rate_hz, catalog, self.n_apps)

    def _trace(self, event, node, name):
        if self.trace is not None:
            self.trace.append((self.sim.now_ns, event, node, name))

    def send_interest(self, src, dst, interest):
        self.interests_sent += 1
        self.sim.schedule_ns(self._link_ns[(src, dst)][0], self.nodes[dst].handle_interest, interest, src)

    def send_data(self, src, dst, data):
        self.data_sent += 1
        self._trace("data_out", src, data.name)
        self.sim.schedule_ns(self._link_ns[(src, dst)][1], self.nodes[dst].handle_data, data, src)

    def send_nack(self, src, dst, name):
        self.sim.schedule_ns(self._link_ns[(src, dst)][0], self.nodes[dst].handle_nack, name, src)

    def start_consumers(self, at=0.0):
        for c in self.consumers.values():
            c.start(at)

    def stop_consumers(self):
        for c in self.consumers.values():
            c.active = False

    def drain(self):
        """Stop consumers, let in-flight traffic and PIT lifetimes run out, then settle accounting."""
        self.stop_consumers()
        self.sim.run_until(self.sim.now + self.pit_lifetime_ns / NS_PER_S + 1.0)
        self.sim.run()
        for r in self.routers.values():
            r.purge_expired()
        for c in self.consumers.values():
            c.expire_all()

    def totals(self):
        cs = self.consumers.values()
        return {
            "issued": sum(c.issued for c in cs),
            "satisfied": sum(c.satisfied for c in cs),
            "expired": sum(c.expired for c in cs),
            "dropped": sum(c.dropped for c in cs),
        }
