import itertools

import pytest

from ndncache.ndn import CatalogModel, Network
from ndncache.topology import Topology, load_topology, shipped_topology_path


def star(leaves):
    return Topology.build(["router"] * (leaves + 1), [(0, i) for i in range(1, leaves + 1)])


def path(n):
    return Topology.build(["router"] * n, [(i, i + 1) for i in range(n - 1)])


def line_network(routers=3, consumers=2, capacity=4, producer_capacity=4, seed=0,
                 rate_hz=20.0, file_count=50, chunks_per_file=5, trace=None, delay=0.001):
    """consumers -- r0 -- r1 -- ... -- r_{k-1} -- producer"""
    kinds = ["router"] * routers + ["consumer"] * consumers + ["producer"]
    edges = [(i, i + 1, 1e9, delay) for i in range(routers - 1)]
    edges += [(0, routers + c, 1e9, delay) for c in range(consumers)]
    edges.append((routers - 1, routers + consumers, 1e9, delay))
    topo = Topology.build(kinds, edges)
    catalog = CatalogModel(0.0, 1.0, file_count, chunks_per_file)
    return Network(topo, catalog, capacity, producer_capacity, rate_hz=rate_hz,
                   pit_lifetime=2.0, seed=seed, trace=trace)


@pytest.fixture(scope="session")
def abilene():
    return load_topology(shipped_topology_path())


def connected_graphs(n, rng):
    """Random connected simple graph on n nodes: a random tree plus extra edges."""
    order = list(rng.permutation(n))
    edges = set()
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        edges.add((min(u, v), max(u, v)))
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in edges and rng.random() < 0.3:
            edges.add((u, v))
    return sorted(edges)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(LINES, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
            terminalreporter.write_line(LINES[key])
