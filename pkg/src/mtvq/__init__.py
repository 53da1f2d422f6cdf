"""Design of multivariate framework linker arrangements as ground states of a
diagonal penalty Hamiltonian, solved by enumeration or a simulated sampling VQE."""

from .errors import (
    EnumerationBoundError,
    MtvqError,
    ParseError,
    SchemaError,
    SimulationError,
    ValidationError,
)
from .exact import SpectrumEntry, count_configs, enumerate_valid, ground_state, spectrum
from .hamiltonian import (
    EdgeForm,
    ProblemSpec,
    balance_cost,
    cost_terms,
    edge_length,
    edge_lengths,
    mean_edge_length,
    occupancy_cost,
    qubit_index,
    ratio_cost,
    total_cost,
)
from .topology import (
    ConnectionKind,
    Edge,
    LinkerCatalog,
    LinkerType,
    RatioSpec,
    SiteGraph,
    build_graph,
    edge_weight,
    load_graph_file,
    preset,
)
from .vqe import Distribution, RunResult, VqeSettings, aggregate, alpha_sweep, expectation, run_vqe, spsa_minimize

__version__ = "0.1.0"
