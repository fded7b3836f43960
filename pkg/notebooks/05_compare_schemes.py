"""
Uniform, degree and fused allocation side by side
=================================================

A short version of the full comparison: a few replications of each scheme
on the Abilene topology. Raise ``sim_time_s`` and ``replications`` for the
desk-scale run used by the acceptance suite.
"""

from ndncache.harness import ExperimentConfig, aggregate_replications, run_replications

cfg = ExperimentConfig(sim_time_s=50.0, replications=3)

for scheme in ("uniform", "degree", "proposed"):
    summary = aggregate_replications(run_replications(cfg.replace(scheme=scheme)))
    c = summary.cumulative
    print(f"{scheme:9s} router HR {c['router_hit_ratio_mean'][0]:.5f}"
          f"  producer HR {c['producer_hit_ratio_mean'][0]:.5f}"
          f"  PIT {c['pit_occupancy_mean'][0]:.4f}"
          f"  RTT {c['rtt_mean'][0] * 1e3:.2f} ms")
    print("          capacities", summary.allocation)
