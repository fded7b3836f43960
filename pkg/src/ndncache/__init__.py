"""Non-uniform NDN cache sizing from betweenness, EWMA traffic metrics and PCA fusion."""

from .engine import Simulator
from .fusion import allocate, first_eigenvector, proposed_weights
from .harness import ExperimentConfig, aggregate_replications, emit_report, run_experiment
from .metrics import EwmaEstimator
from .ndn import CatalogModel, ContentStore, Network
from .topology import Topology, betweenness, load_topology, parse_topology, shipped_topology_path

__version__ = "0.1.0"
