import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import line_network
from oracles import ewma_reference
from ndncache.metrics import (
    EwmaEstimator,
    RouterFeatureRecord,
    collect_features,
    features_from_csv,
    features_to_csv,
    sample_router,
)
from ndncache.ndn import ContentName, Interest


def seeded(avg=0.0, dev=0.0):
    est = EwmaEstimator()
    est.avg, est.dev, est.initialized = avg, dev, True
    return est


def test_constant_series_fixed_point():
    est = EwmaEstimator()
    for _ in range(1000):
        est.update(7)
    assert est.avg == 7 and est.dev == 0
    assert est.estimate() == 7


def test_single_update_by_hand():
    est = seeded().update(16)
    assert est.avg == 2.0
    assert est.dev == 3.5
    assert est.estimate() == pytest.approx(2.35, abs=1e-15)


def test_first_sample_seeds():
    est = EwmaEstimator().update(5)
    assert (est.avg, est.dev) == (5.0, 0.0)


def test_alternating_series():
    est = EwmaEstimator()
    for k in range(1000):
        est.update(k % 2)
    assert 0 < est.avg < 1
    assert est.dev > 0
    ref = ewma_reference([k % 2 for k in range(1000)])[-1]
    assert (est.avg, est.dev) == pytest.approx(ref[:2], abs=1e-12)


def test_estimate_cases():
    assert seeded(2, 3.5).estimate() == pytest.approx(2.35)
    assert seeded(4, 0).estimate() == 4
    assert seeded(0, 0).estimate() == 0


def test_rejects_negative_and_uninitialized():
    with pytest.raises(ValueError):
        EwmaEstimator().update(-1)
    with pytest.raises(ValueError):
        EwmaEstimator().estimate()
    with pytest.raises(ValueError):
        EwmaEstimator(g=1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=1, max_size=300))
def test_matches_reference_and_bounds(samples):
    est = EwmaEstimator()
    for x, (avg, dev, estimate) in zip(samples, ewma_reference(samples)):
        est.update(x)
        assert est.avg == pytest.approx(avg, abs=1e-12)
        assert est.dev == pytest.approx(dev, abs=1e-12)
        assert est.dev >= 0
        assert est.estimate() >= est.avg
        assert est.estimate() == pytest.approx(estimate, abs=1e-12)


def test_sample_router_reads_pit_and_hit_delta():
    net = line_network(routers=1, consumers=2)
    r = net.routers[0]
    net.producers[3].handle_interest = lambda interest, from_: None
    pi, hi = EwmaEstimator(), EwmaEstimator()
    assert sample_router(r, pi, hi) == (0, 0)

    for k in range(3):
        r.handle_interest(Interest(ContentName(1, k + 1, 0), 0.0, 1), 1)
    cached = ContentName(1, 99, 0)
    r.cs.insert(cached)
    for _ in range(5):
        r.handle_interest(Interest(cached, 0.0, 1), 1)
    assert sample_router(r, pi, hi) == (3, 5)
    assert sample_router(r, pi, hi) == (3, 0)
    assert hi.count == 3


def test_hit_deltas_sum_to_counter_increase():
    net = line_network(routers=1, consumers=2, capacity=50, file_count=5, chunks_per_file=2)
    r = net.routers[0]
    pi, hi = EwmaEstimator(), EwmaEstimator()
    fed = []
    net.start_consumers()
    for k in range(1, 301):
        net.sim.run_until(k * 0.01)
        fed.append(sample_router(r, pi, hi)[1])
    assert sum(fed) == r.cs.hits > 0


def test_cumulative_hit_mode():
    net = line_network(routers=1, consumers=1)
    r = net.routers[0]
    r.cs.hits = 9
    r.window_hits = 2
    pi, hi = EwmaEstimator(), EwmaEstimator()
    assert sample_router(r, pi, hi, hit_mode="cumulative") == (0, 9)
    with pytest.raises(ValueError):
        sample_router(r, pi, hi, hit_mode="bogus")


def test_collect_features():
    ests = {0: (EwmaEstimator(), EwmaEstimator())}
    assert collect_features([0], {0: 3.0}, ests) == [RouterFeatureRecord(0, 3.0, 0.0, 0.0)]
    ests = {r: (EwmaEstimator().update(r), EwmaEstimator().update(2 * r)) for r in range(11)}
    recs = collect_features(reversed(range(11)), {r: 1.0 for r in range(11)}, ests)
    assert [rec.router for rec in recs] == list(range(11))
    assert recs[4].estimated_pi == 4 and recs[4].estimated_hi == 8


def test_symmetric_routers_share_bc():
    from ndncache.topology import Topology, betweenness

    # two consumer-facing routers mirrored around a core router
    topo = Topology.build(
        ["router", "router", "router", "consumer", "consumer", "producer"],
        [(0, 1), (1, 2), (0, 3), (2, 4), (1, 5)],
    )
    bc = betweenness(topo)
    ests = {r: (EwmaEstimator(), EwmaEstimator()) for r in topo.routers}
    recs = collect_features(topo.routers, bc, ests)
    assert recs[0].bc == recs[2].bc


def test_feature_csv_roundtrip():
    recs = [RouterFeatureRecord(0, 58.0, 0.859350299, 1e-9), RouterFeatureRecord(1, 77.5, 1.5, 0.0)]
    text = features_to_csv(recs)
    assert text.splitlines()[0] == "router_id,bc,ewma_pi,ewma_hi"
    assert features_from_csv(text) == recs
    with pytest.raises(ValueError):
        features_from_csv("a,b\n1,2\n")


def test_reference_agrees_over_long_random_sequence():
    rng = np.random.default_rng(11)
    samples = rng.integers(0, 50, size=10_000).tolist()
    est = EwmaEstimator()
    worst = 0.0
    for x, (avg, dev, e) in zip(samples, ewma_reference(samples)):
        est.update(x)
        worst = max(worst, abs(est.avg - avg), abs(est.dev - dev), abs(est.estimate() - e))
    assert worst <= 1e-12
