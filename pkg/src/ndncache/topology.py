"""Network topology: file parsing, centrality metrics and next-hop tables.

Topology files are UTF-8 and line oriented::

    # comment
    node <id> <router|consumer|producer>
    ...
    edge <id> <id> <bandwidth_bps> <delay_s>

All ``node`` lines come before the first ``edge`` line. Node ids must be
dense and zero based.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = [
    "KINDS",
    "Link",
    "Topology",
    "TopologyError",
    "parse_topology",
    "load_topology",
    "shipped_topology_path",
    "betweenness",
    "degree_centrality",
    "next_hops",
]

KINDS = ("router", "consumer", "producer")


class TopologyError(ValueError):
    """Raised for malformed or invalid topology descriptions."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Link:
    u: int
    v: int
    bandwidth: float  # bits per second
    delay: float  # seconds


@dataclass(frozen=True)
class Topology:
    """Undirected, connected graph of NDN nodes.

    Construct through :func:`parse_topology` or :meth:`Topology.build`, both of
    which validate the invariants.
    """

    kinds: tuple[str, ...]
    links: tuple[Link, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def build(cls, kinds, edges):
        """Validate and build a topology.

        Parameters
        ----------
        kinds : sequence of str
            Kind of node ``i`` at position ``i``.
        edges : iterable of tuple
            ``(u, v)`` or ``(u, v, bandwidth, delay)``. Missing link
            parameters default to 10 Gb/s and zero delay.
        """
        kinds = tuple(kinds)
        for k in kinds:
            if k not in KINDS:
                raise TopologyError(f"unknown node kind {k!r}")
        n = len(kinds)
        adj = [set() for _ in range(n)]
        links = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            bw = float(e[2]) if len(e) > 2 else 10e9
            delay = float(e[3]) if len(e) > 3 else 0.0
            _check_edge(u, v, bw, delay, n, adj)
            adj[u].add(v)
            adj[v].add(u)
            links.append(Link(u, v, bw, delay))
        topo = cls(kinds, tuple(links), tuple(tuple(sorted(a)) for a in adj))
        topo._validate()
        return topo

    @property
    def n(self):
        return len(self.kinds)

    def nodes_of(self, kind):
        return [i for i, k in enumerate(self.kinds) if k == kind]

    @property
    def routers(self):
        return self.nodes_of("router")

    @property
    def consumers(self):
        return self.nodes_of("consumer")

    @property
    def producers(self):
        return self.nodes_of("producer")

    def neighbors(self, v):
        return self.adjacency[v]

    def link(self, u, v):
        """Return the :class:`Link` joining ``u`` and ``v``."""
        return self._link_index[(min(u, v), max(u, v))]

    @property
    def _link_index(self):
        idx = self.__dict__.get("_link_cache")
        if idx is None:
            idx = {(min(l.u, l.v), max(l.u, l.v)): l for l in self.links}
            object.__setattr__(self, "_link_cache", idx)
        return idx

    def _validate(self):
        if self.n == 0:
            raise TopologyError("topology has no nodes")
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != self.n:
            missing = sorted(set(range(self.n)) - seen)
            raise TopologyError(f"graph is disconnected; unreachable nodes {missing}")
        for v, kind in enumerate(self.kinds):
            if kind == "router":
                continue
            nbrs = self.adjacency[v]
            if len(nbrs) != 1:
                raise TopologyError(f"{kind} {v} has degree {len(nbrs)}, expected 1")
            if self.kinds[nbrs[0]] != "router":
                raise TopologyError(f"{kind} {v} must attach to a router")


def _check_edge(u, v, bw, delay, n, adj, line=None):
    for x in (u, v):
        if not 0 <= x < n:
            raise TopologyError(f"edge references nonexistent node {x}", line)
    if u == v:
        raise TopologyError(f"self-loop on node {u}", line)
    if v in adj[u]:
        raise TopologyError(f"duplicate edge {u}-{v}", line)
    if bw <= 0:
        raise TopologyError("bandwidth must be positive", line)
    if delay < 0:
        raise TopologyError("delay must be non-negative", line)


def parse_topology(text):
    """Parse topology-file content into a validated :class:`Topology`.

    Raises
    ------
    TopologyError
        On syntax errors (with the offending line number), references to
        unknown nodes, duplicate edges, disconnected graphs, or consumers and
        producers that are not leaves attached to a router.
    """
    kinds = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if edges:
                raise TopologyError("node declared after edges", lineno)
            if len(parts) != 3:
                raise TopologyError("expected 'node <id> <kind>'", lineno)
            nid = _parse_int(parts[1], lineno)
            if nid in kinds:
                raise TopologyError(f"duplicate node {nid}", lineno)
            if parts[2] not in KINDS:
                raise TopologyError(f"unknown node kind {parts[2]!r}", lineno)
            kinds[nid] = parts[2]
        elif parts[0] == "edge":
            if len(parts) != 5:
                raise TopologyError("expected 'edge <id> <id> <bandwidth_bps> <delay_s>'", lineno)
            u, v = _parse_int(parts[1], lineno), _parse_int(parts[2], lineno)
            try:
                bw, delay = float(parts[3]), float(parts[4])
            except ValueError:
                raise TopologyError("bandwidth and delay must be numbers", lineno) from None
            edges.append((lineno, u, v, bw, delay))
        else:
            raise TopologyError(f"unknown directive {parts[0]!r}", lineno)

    n = len(kinds)
    if sorted(kinds) != list(range(n)):
        raise TopologyError("node ids must be dense and zero based")
    adj = [set() for _ in range(n)]
    for lineno, u, v, bw, delay in edges:
        _check_edge(u, v, bw, delay, n, adj, lineno)
        adj[u].add(v)
        adj[v].add(u)
    return Topology.build([kinds[i] for i in range(n)], [e[1:] for e in edges])


def _parse_int(tok, lineno):
    try:
        value = int(tok)
    except ValueError:
        raise TopologyError(f"expected integer node id, got {tok!r}", lineno) from None
    if value < 0:
        raise TopologyError("node ids must be non-negative", lineno)
    return value


def load_topology(path):
    return parse_topology(Path(path).read_text(encoding="utf-8"))


def shipped_topology_path():
    """Path of the bundled 27-node Abilene topology."""
    return Path(str(resources.files("ndncache") / "data" / "abilene27.topo"))


def _bfs_counts(topology, s):
    """Single-source BFS returning visit order, distances, path counts, predecessors."""
    n = topology.n
    dist = [-1] * n
    sigma = [0] * n
    preds = [[] for _ in range(n)]
    dist[s] = 0
    sigma[s] = 1
    order = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in topology.adjacency[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, dist, sigma, preds


def betweenness(topology, nodes=None):
    """Raw betweenness centrality by Brandes dependency accumulation.

    Shortest paths are hop counts over the whole graph (consumers and
    producers included); each unordered pair ``{s, t}`` is counted once and
    endpoints are excluded.

    Parameters
    ----------
    topology : Topology
    nodes : iterable of int, optional
        Restrict the returned mapping to these nodes. Defaults to routers.

    Returns
    -------
    dict
        Node id to un-normalized betweenness.
    """
    n = topology.n
    bc = [0.0] * n
    for s in range(n):
        order, _, sigma, preds = _bfs_counts(topology, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    if nodes is None:
        nodes = topology.routers
    # every unordered pair was visited from both ends
    return {v: bc[v] / 2.0 for v in nodes}


def degree_centrality(topology, nodes=None):
    """Number of incident links per node (routers by default)."""
    if nodes is None:
        nodes = topology.routers
    return {v: float(len(topology.adjacency[v])) for v in nodes}


def next_hops(topology):
    """Minimum-hop next-hop table for every ordered pair of distinct nodes.

    Ties are broken toward the smallest neighbour id. Returns a dict keyed by
    ``(source, destination)``; ``(v, v)`` entries are absent.
    """
    n = topology.n
    table = {}
    for t in range(n):
        # distances to t; a neighbour is a valid next hop iff it is one step closer
        dist = [-1] * n
        dist[t] = 0
        queue = deque([t])
        while queue:
            v = queue.popleft()
            for w in topology.adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        for s in range(n):
            if s == t:
                continue
            for w in topology.adjacency[s]:  # sorted ascending
                if dist[w] == dist[s] - 1:
                    table[(s, t)] = w
                    break
    return table
