"""Experiment orchestration: warm-up, reallocation, evaluation and reporting.

Each replication runs in two phases on one network:

1. every router starts with an equal share of the cache budget; for the
   ``proposed`` scheme PIT occupancy and Content Store hits are sampled on
   a fixed interval and smoothed;
2. weights are computed for the chosen scheme, every Content Store is
   resized, counters are reset, and the remaining time is measured.

Only phase 2 appears in the report.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fusion
from .engine import NS_PER_S, Simulator, replication_seeds, to_ns
from .metrics import EwmaEstimator, collect_features, sample_router
from .ndn import CatalogModel, Network
from .topology import betweenness, degree_centrality, load_topology, shipped_topology_path

__all__ = [
    "SCHEMES",
    "ConfigError",
    "ExperimentConfig",
    "MetricsReport",
    "Summary",
    "load_config",
    "parse_config",
    "hit_ratio",
    "run_experiment",
    "run_replications",
    "aggregate_replications",
    "emit_report",
    "measure_features",
]

SCHEMES = ("uniform", "degree", "proposed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    topology_path: str = ""
    scheme: str = "proposed"
    chunk_size: int = 10_240
    total_router_cache_chunks: int = 1_100
    file_count: int = 10_000
    chunks_per_file: int = 10
    q: float = 5.0
    s: float = 0.7
    interest_rate_hz: float = 20.0
    sim_time_s: float = 100.0
    warmup_fraction: float = 0.4
    sample_interval_s: float = 0.01
    pit_lifetime_s: float = 2.0
    master_seed: int = 1
    replications: int = 10
    producer_cs_chunks: int = 100
    bucket_s: float = 10.0
    normalization: str = "minmax"
    hit_mode: str = "delta"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.sim_time_s <= 0:
            raise ConfigError("sim_time_s must be positive")
        if not 0 < self.warmup_fraction < 1:
            raise ConfigError("warmup_fraction must lie in (0, 1)")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.sample_interval_s <= 0 or self.bucket_s <= 0:
            raise ConfigError("sample_interval_s and bucket_s must be positive")
        if self.interest_rate_hz < 0:
            raise ConfigError("interest_rate_hz must be non-negative")
        if self.normalization not in ("minmax", "zscore"):
            raise ConfigError("normalization must be minmax or zscore")
        if self.hit_mode not in ("delta", "cumulative"):
            raise ConfigError("hit_mode must be delta or cumulative")

    @property
    def warmup_s(self):
        return self.sim_time_s * self.warmup_fraction

    def topology(self):
        return load_topology(self.topology_path or shipped_topology_path())

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def parse_config(text, base=None):
    """Parse ``key = value`` lines into an :class:`ExperimentConfig`.

    Unknown keys are rejected. ``#`` starts a comment.
    """
    base = base or ExperimentConfig()
    types = {f.name: type(getattr(base, f.name)) for f in dataclasses.fields(ExperimentConfig)}
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if types[key] is int:
                changes[key] = int(float(value)) if "e" in value.lower() else int(value)
            elif types[key] is float:
                changes[key] = float(value)
            else:
                changes[key] = value
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return dataclasses.replace(base, **changes)


def load_config(path, base=None):
    return parse_config(Path(path).read_text(encoding="utf-8"), base)


def hit_ratio(hits, misses):
    """``hits / (hits + misses)``, or 0 when there were no requests."""
    if hits < 0 or misses < 0:
        raise ValueError("counts must be non-negative")
    total = hits + misses
    return hits / total if total else 0.0


@dataclass
class MetricsReport:
    """Phase-2 measurements of one replication of one scheme.

    Series are indexed by bucket; ``router_hit_ratio`` and
    ``producer_hit_ratio`` are per-bucket (windowed) averages of per-node hit
    ratios. ``cumulative`` holds whole-phase aggregates.
    """

    scheme: str
    seed: int
    bucket_starts: list = field(default_factory=list)
    router_hit_ratio: list = field(default_factory=list)
    producer_hit_ratio: list = field(default_factory=list)
    rtt: list = field(default_factory=list)
    pit_occupancy: list = field(default_factory=list)
    router_counts: dict = field(default_factory=dict)  # router -> [(hits, misses)] per bucket
    producer_counts: dict = field(default_factory=dict)
    per_app_hits: dict = field(default_factory=dict)  # (producer, app) -> hits
    totals: dict = field(default_factory=dict)
    cumulative: dict = field(default_factory=dict)
    allocation: dict = field(default_factory=dict)  # router -> capacity
    weights: dict = field(default_factory=dict)
    features: list = field(default_factory=list)
    ewma_samples: int = 0
    fusion_calls: int = 0
    pit_histogram: dict = field(default_factory=dict)


class _Sampler:
    """Repeating event at multiples of ``interval_ns`` in ``(start, end]``."""

    def __init__(self, sim, interval_ns, start_ns, end_ns, fn):
        self.sim = sim
        self.interval_ns = interval_ns
        self.end_ns = end_ns
        self.fn = fn
        self.k = start_ns // interval_ns + 1
        self._arm()

    def _arm(self):
        t = self.k * self.interval_ns
        if t <= self.end_ns:
            self.sim.schedule_at_ns(t, self._fire)

    def _fire(self):
        self.fn()
        self.k += 1
        self._arm()


def _scheme_weights(config, topology, routers, estimators, report):
    if config.scheme == "uniform":
        return fusion.uniform_weights(len(routers))
    if config.scheme == "degree":
        deg = degree_centrality(topology, routers)
        return fusion.degree_weights([deg[r] for r in routers])
    bc = betweenness(topology, routers)
    records = collect_features(routers, bc, estimators)
    report.features = records
    report.fusion_calls += 1
    result = fusion.proposed_weights(records, mode=config.normalization)
    return result.weights


def run_experiment(config, seed=None, topology=None):
    """Run one replication of ``config.scheme`` and return its phase-2 report.

    ``seed`` defaults to the first replication seed derived from
    ``config.master_seed``. The workload depends only on the seed, so the
    three schemes see identical Interest sequences for a given seed.
    """
    if seed is None:
        seed = replication_seeds(config.master_seed, 1)[0]
    topology = topology or config.topology()
    routers = topology.routers
    if config.total_router_cache_chunks < len(routers):
        raise ConfigError("total_router_cache_chunks is smaller than the router count")
    n_apps = len(topology.producers)
    if n_apps == 0 or config.file_count < n_apps:
        raise ConfigError("need at least one producer and one file per application")
    catalog = CatalogModel(config.q, config.s, config.file_count // n_apps, config.chunks_per_file)

    sim = Simulator()
    initial = fusion.allocate(fusion.uniform_weights(len(routers)), config.total_router_cache_chunks)
    net = Network(
        topology,
        catalog,
        {r: int(c) for r, c in zip(routers, initial)},
        producer_capacity=config.producer_cs_chunks,
        rate_hz=config.interest_rate_hz,
        pit_lifetime=config.pit_lifetime_s,
        seed=seed,
        sim=sim,
        chunk_size=config.chunk_size,
    )
    report = MetricsReport(config.scheme, seed)

    interval_ns = to_ns(config.sample_interval_s)
    warm_ns = to_ns(config.warmup_s)
    end_ns = to_ns(config.sim_time_s)

    # phase 1
    estimators = {r: (EwmaEstimator(), EwmaEstimator()) for r in routers}
    if config.scheme == "proposed":
        def sample_all():
            for r in routers:
                pi_est, hi_est = estimators[r]
                sample_router(net.routers[r], pi_est, hi_est, config.hit_mode)
            report.ewma_samples += 1

        _Sampler(sim, interval_ns, 0, warm_ns, sample_all)
    net.start_consumers(0.0)
    sim.run_until(config.warmup_s)

    # reallocation
    w = _scheme_weights(config, topology, routers, estimators, report)
    caps = fusion.allocate(w, config.total_router_cache_chunks)
    report.weights = {r: float(x) for r, x in zip(routers, w)}
    report.allocation = {r: int(c) for r, c in zip(routers, caps)}
    for r, c in report.allocation.items():
        router = net.routers[r]
        router.cs.resize(c)
        router.cs.reset_counters()
        router.window_hits = 0
    for p in net.producers.values():
        p.cs.reset_counters()

    # phase 2
    bucket_ns = to_ns(config.bucket_s)
    starts = list(range(warm_ns, end_ns, bucket_ns))
    report.bucket_starts = [t / NS_PER_S for t in starts]
    pit_sum = [0.0] * len(starts)
    pit_n = [0] * len(starts)
    hist = {}
    snaps = []

    def snapshot():
        snaps.append((
            {r: (x.cs.hits, x.cs.misses) for r, x in net.routers.items()},
            {p: (x.cs.hits, x.cs.misses) for p, x in net.producers.items()},
        ))

    def sample_pit():
        b = min((sim.now_ns - warm_ns - 1) // bucket_ns, len(starts) - 1)
        counts = [net.routers[r].pending_count() for r in routers]
        pit_sum[b] += sum(counts) / len(counts)
        pit_n[b] += 1
        for c in counts:
            hist[c] = hist.get(c, 0) + 1

    snapshot()
    for t in starts[1:]:
        sim.schedule_at_ns(t, snapshot)
    if starts:
        _Sampler(sim, interval_ns, warm_ns, end_ns, sample_pit)
    sim.run_until(config.sim_time_s)
    snapshot()

    for p in net.producers.values():
        report.per_app_hits[(p.id, p.app)] = p.cs.hits

    net.drain()
    report.totals = net.totals()

    for r in routers:
        report.router_counts[r] = [
            (b[0][r][0] - a[0][r][0], b[0][r][1] - a[0][r][1]) for a, b in zip(snaps, snaps[1:])
        ]
    for p in net.producers:
        report.producer_counts[p] = [
            (b[1][p][0] - a[1][p][0], b[1][p][1] - a[1][p][1]) for a, b in zip(snaps, snaps[1:])
        ]
    for i in range(len(starts)):
        report.router_hit_ratio.append(
            float(np.mean([hit_ratio(*report.router_counts[r][i]) for r in routers]))
        )
        report.producer_hit_ratio.append(
            float(np.mean([hit_ratio(*report.producer_counts[p][i]) for p in net.producers]))
        )
        report.pit_occupancy.append(pit_sum[i] / pit_n[i] if pit_n[i] else 0.0)

    rtt_sum = [0.0] * len(starts)
    rtt_n = [0] * len(starts)
    all_rtt = []
    for c in net.consumers.values():
        for t_ns, rtt in c.rtts:
            if warm_ns < t_ns <= end_ns:
                b = min((t_ns - warm_ns - 1) // bucket_ns, len(starts) - 1)
                rtt_sum[b] += rtt
                rtt_n[b] += 1
                all_rtt.append(rtt)
    report.rtt = [s / n if n else 0.0 for s, n in zip(rtt_sum, rtt_n)]
    report.pit_histogram = dict(sorted(hist.items()))

    rh = sum(h for r in routers for h, _ in report.router_counts[r])
    rm = sum(m for r in routers for _, m in report.router_counts[r])
    ph = sum(h for p in net.producers for h, _ in report.producer_counts[p])
    pm = sum(m for p in net.producers for _, m in report.producer_counts[p])
    report.cumulative = {
        "router_hit_ratio_mean": float(np.mean(report.router_hit_ratio)) if starts else 0.0,
        "router_hit_ratio_aggregate": hit_ratio(rh, rm),
        "producer_hit_ratio_mean": float(np.mean(report.producer_hit_ratio)) if starts else 0.0,
        "producer_hit_ratio_aggregate": hit_ratio(ph, pm),
        "rtt_mean": float(np.mean(all_rtt)) if all_rtt else 0.0,
        "pit_occupancy_mean": float(sum(pit_sum) / sum(pit_n)) if sum(pit_n) else 0.0,
    }
    return report


def measure_features(config, seed=None, topology=None):
    """Raw feature records gathered during the warm-up of a proposed-scheme run."""
    report = run_experiment(config.replace(scheme="proposed"), seed=seed, topology=topology)
    return report.features


def _run_one(args):
    config, seed = args
    return run_experiment(config, seed)


def run_replications(config, jobs=1):
    """Run ``config.replications`` independent replications, in seed order."""
    seeds = replication_seeds(config.master_seed, config.replications)
    if jobs <= 1:
        topology = config.topology()
        return [run_experiment(config, s, topology) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [(config, s) for s in seeds]))


@dataclass
class Summary:
    """Across-replication mean and sample standard deviation per bucket."""

    scheme: str
    replications: int
    bucket_starts: list
    series: dict  # name -> (means, stds)
    per_app_hits: dict  # (producer, app) -> (mean, std)
    totals: dict  # name -> summed count over replications
    cumulative: dict  # name -> (mean, std)
    allocation: dict  # router -> capacity of the first replication
    weights: dict


SERIES = ("router_hit_ratio", "producer_hit_ratio", "rtt", "pit_occupancy")


def _mean_std(values):
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        return 0.0, 0.0
    std = float(a.std(ddof=1)) if a.size > 1 else 0.0
    return float(a.mean()), std


def aggregate_replications(reports):
    """Per-bucket mean and sample standard deviation across replications."""
    if not reports:
        raise ValueError("need at least one report")
    grid = reports[0].bucket_starts
    for r in reports[1:]:
        if r.bucket_starts != grid:
            raise ValueError("reports have mismatched bucket grids")
    series = {}
    for name in SERIES:
        cols = list(zip(*(getattr(r, name) for r in reports)))
        stats = [_mean_std(c) for c in cols]
        series[name] = ([m for m, _ in stats], [s for _, s in stats])
    keys = sorted(reports[0].per_app_hits)
    per_app = {k: _mean_std([r.per_app_hits[k] for r in reports]) for k in keys}
    totals = {}
    for r in reports:
        for k, v in r.totals.items():
            totals[k] = totals.get(k, 0) + v
    cumulative = {k: _mean_std([r.cumulative[k] for r in reports]) for k in reports[0].cumulative}
    return Summary(
        reports[0].scheme,
        len(reports),
        list(grid),
        series,
        per_app,
        totals,
        cumulative,
        dict(reports[0].allocation),
        dict(reports[0].weights),
    )


def _g(x):
    return format(float(x), ".9g")


def _csv(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_files(summary):
    """Map of output file name to CSV text."""
    files = {}
    for name in SERIES:
        means, stds = summary.series.get(name, ([], []))
        rows = [(_g(t), _g(m), _g(s)) for t, m, s in zip(summary.bucket_starts, means, stds)]
        files[f"{name}.csv"] = _csv(rows, ("bucket_start_s", "mean", "std"))
    files["per_app_hits.csv"] = _csv(
        [(p, a, _g(m)) for (p, a), (m, _) in sorted(summary.per_app_hits.items())],
        ("producer", "application", "hits"),
    )
    routers = sorted(summary.allocation)
    files["allocation.csv"] = fusion.allocation_to_csv(
        routers, [summary.weights[r] for r in routers], [summary.allocation[r] for r in routers]
    )
    files["totals.csv"] = _csv(
        [(k, v) for k, v in sorted(summary.totals.items())]
        + [(k, _g(m)) for k, (m, _) in sorted(summary.cumulative.items())],
        ("metric", "value"),
    )
    return files


def emit_report(summary, path):
    """Write the report CSVs into directory ``path``; output bytes depend only on ``summary``."""
    if isinstance(summary, MetricsReport):
        summary = aggregate_replications([summary])
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in report_files(summary).items():
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def empty_summary(scheme="proposed"):
    return Summary(scheme, 0, [], {n: ([], []) for n in SERIES}, {}, {}, {}, {}, {})


def default_jobs():
    return max(1, min(os.cpu_count() or 1, 8))
