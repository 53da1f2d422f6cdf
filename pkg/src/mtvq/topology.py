"""Weighted site graphs for reticular frameworks, linker catalogs and presets.

A framework unit cell is abstracted as ``n_sites`` linker sites joined by
edges.  Each edge is either a direct topological connection or a spatial
(next-nearest) adjacency; its weight is ``d`` for topological edges and
``d ** alpha`` for spatial ones.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, NamedTuple, Sequence

from .errors import InvalidEdgeError, ParseError, SchemaError, ValidationError

PRESET_NAMES = ("cu-thq-hhtp", "py-mv-dba-cof", "muf-7", "sioc-cof2")

DEFAULT_C_RATIO = 200.0
DEFAULT_C_OCC = 300.0


class ConnectionKind(str, enum.Enum):
    TOPOLOGICAL = "topological"
    SPATIAL = "spatial"


@dataclass(frozen=True)
class LinkerType:
    label: str
    characteristic_length: float

    def __post_init__(self):
        if not self.label:
            raise ValidationError("linker label must be non-empty")
        if not (self.characteristic_length > 0 and math.isfinite(self.characteristic_length)):
            raise ValidationError(
                f"linker {self.label!r}: characteristic length must be positive, "
                f"got {self.characteristic_length}"
            )


@dataclass(frozen=True)
class LinkerCatalog:
    """Ordered linker types. The order fixes the qubit layout."""

    linkers: tuple[LinkerType, ...]

    def __post_init__(self):
        object.__setattr__(self, "linkers", tuple(self.linkers))
        if not self.linkers:
            raise ValidationError("catalog needs at least one linker type")
        labels = [lk.label for lk in self.linkers]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate linker labels in {labels}")

    def __len__(self) -> int:
        return len(self.linkers)

    def __iter__(self):
        return iter(self.linkers)

    def __getitem__(self, k: int) -> LinkerType:
        return self.linkers[k]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lk.label for lk in self.linkers)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(lk.characteristic_length for lk in self.linkers)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class RatioSpec:
    """Target number of sites per linker type, in catalog order."""

    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 0 for c in self.counts):
            raise ValidationError(f"ratio counts must be non-negative, got {self.counts}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def check(self, n_sites: int, n_types: int) -> None:
        if len(self.counts) != n_types:
            raise ValidationError(
                f"ratio has {len(self.counts)} entries but catalog has {n_types} linker types"
            )
        if self.total != n_sites:
            raise ValidationError(f"ratio counts sum to {self.total}, expected n_sites={n_sites}")


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    distance: float
    kind: ConnectionKind = ConnectionKind.TOPOLOGICAL

    def __post_init__(self):
        kind = ConnectionKind(self.kind)
        i, j = int(self.i), int(self.j)
        if i == j:
            raise InvalidEdgeError(f"self-loop on site {i}")
        if i > j:
            i, j = j, i
        if not (self.distance > 0 and math.isfinite(self.distance)):
            raise InvalidEdgeError(f"edge ({i},{j}): distance must be positive, got {self.distance}")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "kind", kind)


def edge_weight(edge: Edge, alpha: float) -> float:
    """Connection weight ``d`` (topological) or ``d**alpha`` (spatial)."""
    if not edge.distance > 0:
        raise InvalidEdgeError(f"distance must be positive, got {edge.distance}")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    if edge.kind is ConnectionKind.TOPOLOGICAL:
        return float(edge.distance)
    return float(edge.distance) ** alpha


@dataclass(frozen=True)
class SiteGraph:
    """Validated graph with per-edge weights precomputed.

    ``weight_decimals`` rounds the stored weights (e.g. 2 reproduces the
    rounded values of a printed parameter table); ``None`` keeps full precision.
    """

    n_sites: int
    edges: tuple[Edge, ...]
    alpha: float
    weight_decimals: int | None = None
    weights: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n_sites < 1:
            raise ValidationError(f"n_sites must be >= 1, got {self.n_sites}")
        if not self.edges:
            raise ValidationError("graph needs at least one edge")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        seen = set()
        for e in self.edges:
            if e.j >= self.n_sites or e.i < 0:
                raise ValidationError(f"edge ({e.i},{e.j}) out of range for {self.n_sites} sites")
            if (e.i, e.j) in seen:
                raise ValidationError(f"duplicate edge ({e.i},{e.j})")
            seen.add((e.i, e.j))
        w = [edge_weight(e, self.alpha) for e in self.edges]
        if self.weight_decimals is not None:
            w = [round(x, self.weight_decimals) for x in w]
        object.__setattr__(self, "weights", tuple(w))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_sites
        for e in self.edges:
            deg[e.i] += 1
            deg[e.j] += 1
        return deg

    def with_alpha(self, alpha: float) -> SiteGraph:
        return replace(self, alpha=alpha)

    def with_weight_decimals(self, decimals: int | None) -> SiteGraph:
        return replace(self, weight_decimals=decimals)


def build_graph(n_sites: int, edges: Sequence[Edge | tuple], alpha: float,
                weight_decimals: int | None = None) -> SiteGraph:
    """Build a graph from ``Edge`` objects or ``(i, j, d, kind)`` tuples."""
    parsed = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
    return SiteGraph(n_sites, tuple(parsed), alpha, weight_decimals)


class ProblemInputs(NamedTuple):
    graph: SiteGraph
    catalog: LinkerCatalog
    ratio: RatioSpec
    c_ratio: float
    c_occ: float
    reconstructed: bool = False


# -- JSON problem files ------------------------------------------------------

_REQUIRED = {
    "n_sites": int,
    "alpha": (int, float),
    "edges": list,
    "linkers": list,
    "ratio": dict,
    "c_ratio": (int, float),
    "c_occ": (int, float),
}


def _require(obj: dict, key: str, types, where: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise SchemaError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def inputs_from_dict(data: Any) -> ProblemInputs:
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")
    for key, types in _REQUIRED.items():
        _require(data, key, types, "problem")
    reconstructed = data.get("reconstructed", False)
    if not isinstance(reconstructed, bool):
        raise SchemaError("problem: field 'reconstructed' must be a boolean")

    edges = []
    for k, raw in enumerate(data["edges"]):
        where = f"edges[{k}]"
        if not isinstance(raw, dict):
            raise SchemaError(f"{where}: must be an object")
        i = _require(raw, "i", int, where)
        j = _require(raw, "j", int, where)
        d = _require(raw, "d", (int, float), where)
        kind = _require(raw, "kind", str, where)
        if kind not in ("topological", "spatial"):
            raise SchemaError(f"{where}: kind must be 'topological' or 'spatial', got {kind!r}")
        edges.append(Edge(i, j, float(d), ConnectionKind(kind)))

    linkers = []
    for k, raw in enumerate(data["linkers"]):
        where = f"linkers[{k}]"
        if not isinstance(raw, dict):
            raise SchemaError(f"{where}: must be an object")
        linkers.append(LinkerType(_require(raw, "label", str, where),
                                  float(_require(raw, "length", (int, float), where))))
    catalog = LinkerCatalog(tuple(linkers))

    ratio_raw = data["ratio"]
    unknown = set(ratio_raw) - set(catalog.labels)
    if unknown:
        raise ValidationError(f"ratio names unknown linkers {sorted(unknown)}")
    counts = []
    for label in catalog.labels:
        n = ratio_raw.get(label, 0)
        if isinstance(n, bool) or not isinstance(n, int):
            raise SchemaError(f"ratio[{label!r}] must be an integer")
        counts.append(n)
    ratio = RatioSpec(tuple(counts))

    graph = build_graph(data["n_sites"], edges, float(data["alpha"]))
    ratio.check(graph.n_sites, len(catalog))
    c_ratio, c_occ = float(data["c_ratio"]), float(data["c_occ"])
    if not (c_ratio > 0 and c_occ > 0):
        raise ValidationError("c_ratio and c_occ must be positive")
    return ProblemInputs(graph, catalog, ratio, c_ratio, c_occ, reconstructed)


def inputs_to_dict(inputs: ProblemInputs) -> dict:
    graph, catalog = inputs.graph, inputs.catalog
    return {
        "n_sites": graph.n_sites,
        "alpha": graph.alpha,
        "edges": [{"i": e.i, "j": e.j, "d": e.distance, "kind": e.kind.value} for e in graph.edges],
        "linkers": [{"label": lk.label, "length": lk.characteristic_length} for lk in catalog],
        "ratio": dict(zip(catalog.labels, inputs.ratio.counts)),
        "c_ratio": inputs.c_ratio,
        "c_occ": inputs.c_occ,
        "reconstructed": inputs.reconstructed,
    }


def loads_graph(text: str) -> ProblemInputs:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return inputs_from_dict(data)


def load_graph_file(path: str | Path) -> ProblemInputs:
    """Read a problem file (graph, linkers, ratio, penalty constants)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not valid UTF-8") from exc
    return loads_graph(text)


def save_graph_file(inputs: ProblemInputs, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inputs_to_dict(inputs), indent=2) + "\n", encoding="utf-8")


def preset(name: str) -> ProblemInputs:
    """Load one of the bundled framework presets.

    The edge lists are reconstructions of the unit cells (flagged
    ``reconstructed``); the linker lengths, distances and alpha are the
    published values.
    """
    if name not in PRESET_NAMES:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    text = resources.files("mtvq.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return loads_graph(text)
