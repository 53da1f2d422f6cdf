"""Diagonal penalty Hamiltonian over linker-placement bitstrings.

Bit layout: the bit for linker type ``t`` at site ``i`` sits at position
``i * n_types + t`` (site-major, type-minor). In text form position 0 is the
leftmost character.

All cost functions accept a single configuration (bitstring, sequence or 1-D
array) or a 2-D array of configurations, one per row, and broadcast over the
leading axis.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ParseError, ValidationError
from .topology import (
    DEFAULT_C_OCC,
    DEFAULT_C_RATIO,
    Edge,
    LinkerCatalog,
    ProblemInputs,
    RatioSpec,
    SiteGraph,
)

Config = Union[str, Sequence[int], np.ndarray]


class EdgeForm(str, enum.Enum):
    """How an edge length is built from its two endpoint linkers.

    ``ENDPOINT`` sums the characteristic lengths at the two ends.
    ``LITERAL`` multiplies that sum by the number of linker types, which is
    what the double sum over type pairs expands to; the mean edge length is
    scaled the same way so the balance target stays consistent.
    """

    ENDPOINT = "endpoint"
    LITERAL = "literal-eq5"


@dataclass(frozen=True)
class ProblemSpec:
    graph: SiteGraph
    catalog: LinkerCatalog
    ratio: RatioSpec
    c_ratio: float = DEFAULT_C_RATIO
    c_occ: float = DEFAULT_C_OCC
    edge_form: EdgeForm = EdgeForm.ENDPOINT
    mean_edge_length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "edge_form", EdgeForm(self.edge_form))
        self.ratio.check(self.graph.n_sites, len(self.catalog))
        if not (self.c_ratio > 0 and self.c_occ > 0):
            raise ValidationError("penalty constants c_ratio and c_occ must be positive")
        object.__setattr__(self, "mean_edge_length", mean_edge_length(self))

    @classmethod
    def from_inputs(cls, inputs: ProblemInputs, edge_form: EdgeForm | str = EdgeForm.ENDPOINT) -> ProblemSpec:
        return cls(inputs.graph, inputs.catalog, inputs.ratio, inputs.c_ratio, inputs.c_occ, edge_form)

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @property
    def n_types(self) -> int:
        return len(self.catalog)

    @property
    def n_qubits(self) -> int:
        return self.n_sites * self.n_types

    def with_graph(self, graph: SiteGraph) -> ProblemSpec:
        return ProblemSpec(graph, self.catalog, self.ratio, self.c_ratio, self.c_occ, self.edge_form)

    def with_alpha(self, alpha: float) -> ProblemSpec:
        return self.with_graph(self.graph.with_alpha(alpha))

    # cached array views used by the vectorised cost functions
    @property
    def _lengths(self) -> np.ndarray:
        return np.asarray(self.catalog.lengths, dtype=float)

    @property
    def _edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g = self.graph
        return (np.fromiter((e.i for e in g.edges), int, g.n_edges),
                np.fromiter((e.j for e in g.edges), int, g.n_edges),
                np.asarray(g.weights, dtype=float))


def qubit_index(site: int, type_index: int, n_types: int, n_sites: int | None = None) -> int:
    if n_types < 1 or not 0 <= type_index < n_types:
        raise ValidationError(f"type index {type_index} out of range for {n_types} types")
    if site < 0 or (n_sites is not None and site >= n_sites):
        raise ValidationError(f"site {site} out of range")
    return site * n_types + type_index


def parse_bitstring(text: str, n_bits: int | None = None) -> np.ndarray:
    if not text or any(ch not in "01" for ch in text):
        raise ParseError(f"bitstring must contain only '0'/'1' characters, got {text!r}")
    if n_bits is not None and len(text) != n_bits:
        raise ValidationError(f"bitstring has {len(text)} bits, expected {n_bits}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def format_bitstring(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def index_to_bits(index, n_bits: int) -> np.ndarray:
    """Integer basis index -> bit array; bit 0 is the most significant."""
    idx = np.asarray(index, dtype=np.int64)
    shifts = np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    return ((idx[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_index(bits) -> int:
    out = 0
    for b in np.asarray(bits).ravel():
        out = (out << 1) | int(b)
    return out


def as_bits(config: Config, spec: ProblemSpec) -> np.ndarray:
    if isinstance(config, str):
        return parse_bitstring(config, spec.n_qubits)
    bits = np.asarray(config)
    if bits.shape[-1:] != (spec.n_qubits,):
        raise ValidationError(f"configuration has shape {bits.shape}, expected (..., {spec.n_qubits})")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValidationError("configuration entries must be 0 or 1")
    return bits


def _occupancy(bits: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    return bits.reshape(bits.shape[:-1] + (spec.n_sites, spec.n_types)).astype(float)


def ratio_cost(config: Config, spec: ProblemSpec):
    """Unweighted sum over types of (sites holding the type - target)^2."""
    q = _occupancy(as_bits(config, spec), spec)
    dev = q.sum(axis=-2) - np.asarray(spec.ratio.counts, dtype=float)
    return (dev ** 2).sum(axis=-1)


def occupancy_cost(config: Config, spec: ProblemSpec):
    """Unweighted sum over sites of (linkers at the site - 1)^2."""
    q = _occupancy(as_bits(config, spec), spec)
    return ((q.sum(axis=-1) - 1.0) ** 2).sum(axis=-1)


def _site_lengths(bits: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    return _occupancy(bits, spec) @ spec._lengths


def _form_factor(spec: ProblemSpec) -> float:
    return float(spec.n_types) if spec.edge_form is EdgeForm.LITERAL else 1.0


def edge_length(config: Config, edge: Edge, spec: ProblemSpec):
    if edge.j >= spec.n_sites:
        raise ValidationError(f"edge ({edge.i},{edge.j}) out of range")
    s = _site_lengths(as_bits(config, spec), spec)
    return _form_factor(spec) * (s[..., edge.i] + s[..., edge.j])


def edge_lengths(config: Config, spec: ProblemSpec) -> np.ndarray:
    """Lengths of every graph edge, in graph edge order (edge-length histogram input)."""
    ei, ej, _ = spec._edge_arrays
    s = _site_lengths(as_bits(config, spec), spec)
    return _form_factor(spec) * (s[..., ei] + s[..., ej])


def mean_edge_length(spec: ProblemSpec) -> float:
    """Target edge length: twice the ratio-weighted mean linker length.

    Equals the edge-averaged length of any ratio- and occupancy-satisfying
    configuration on a degree-regular graph, independent of the arrangement.
    """
    counts = np.asarray(spec.ratio.counts, dtype=float)
    return _form_factor(spec) * 2.0 * float(counts @ spec._lengths) / spec.n_sites


def balance_cost(config: Config, spec: ProblemSpec):
    _, _, w = spec._edge_arrays
    dev = edge_lengths(config, spec) - spec.mean_edge_length
    return (dev ** 2) @ w


def cost_terms(config: Config, spec: ProblemSpec) -> dict:
    """Unweighted ratio/occupancy terms, balance term, and weighted total."""
    bits = as_bits(config, spec)
    r, o, b = ratio_cost(bits, spec), occupancy_cost(bits, spec), balance_cost(bits, spec)
    return {"ratio": r, "occupancy": o, "balance": b,
            "total": spec.c_ratio * r + spec.c_occ * o + b}


def total_cost(config: Config, spec: ProblemSpec):
    return cost_terms(config, spec)["total"]


def cost_table(spec: ProblemSpec, start: int = 0, stop: int | None = None) -> np.ndarray:
    """total_cost for basis indices ``start..stop`` (default: all 2**n)."""
    stop = 1 << spec.n_qubits if stop is None else stop
    bits = index_to_bits(np.arange(start, stop, dtype=np.int64), spec.n_qubits)
    return np.asarray(total_cost(bits, spec), dtype=float)
