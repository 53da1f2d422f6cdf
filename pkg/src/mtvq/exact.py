"""Exhaustive ground-truth solver and configuration counting."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import EnumerationBoundError, ValidationError
from .hamiltonian import ProblemSpec, cost_table, format_bitstring, index_to_bits

MAX_ENUMERATION_QUBITS = 24
VALUE_TOL = 1e-9
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SpectrumEntry:
    hamiltonian_value: float
    configurations: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"h": self.hamiltonian_value, "configs": list(self.configurations)}


def _check_bound(spec: ProblemSpec, max_qubits: int) -> None:
    if spec.n_qubits > max_qubits:
        raise EnumerationBoundError(
            f"{spec.n_qubits} qubits exceeds the enumeration bound of {max_qubits}"
        )


def spectrum(spec: ProblemSpec, k: int, max_qubits: int = MAX_ENUMERATION_QUBITS) -> list[SpectrumEntry]:
    """The ``k`` lowest distinct values of H over all 2**n bitstrings.

    Values closer than 1e-9 are grouped as one level; every bitstring in a
    level is listed, in ascending lexicographic order.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    _check_bound(spec, max_qubits)
    n_states = 1 << spec.n_qubits
    # Keep a running pool of the lowest candidates; chunking bounds memory.
    pool_idx = np.empty(0, dtype=np.int64)
    pool_val = np.empty(0)
    for start in range(0, n_states, _CHUNK):
        stop = min(start + _CHUNK, n_states)
        vals = cost_table(spec, start, stop)
        idx = np.arange(start, stop, dtype=np.int64)
        pool_idx = np.concatenate([pool_idx, idx])
        pool_val = np.concatenate([pool_val, vals])
        pool_idx, pool_val = _prune(pool_idx, pool_val, k)
    return _group(pool_idx, pool_val, k, spec.n_qubits)


def _prune(idx: np.ndarray, val: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((idx, val))
    idx, val = idx[order], val[order]
    # keep everything up to (and tied with) the k-th distinct level
    levels = 0
    last = None
    cut = len(val)
    for pos, v in enumerate(val):
        if last is None or v - last > VALUE_TOL:
            levels += 1
            if levels > k:
                cut = pos
                break
            last = v
    return idx[:cut], val[:cut]


def _group(idx: np.ndarray, val: np.ndarray, k: int, n_bits: int) -> list[SpectrumEntry]:
    entries: list[SpectrumEntry] = []
    current: list[int] = []
    anchor = None
    for i, v in zip(idx.tolist(), val.tolist()):
        if anchor is None or v - anchor > VALUE_TOL:
            if current:
                entries.append(_entry(anchor, current, n_bits))
            current, anchor = [], v
        current.append(i)
    if current:
        entries.append(_entry(anchor, current, n_bits))
    return entries[:k]


def _entry(value: float, indices: list[int], n_bits: int) -> SpectrumEntry:
    configs = tuple(sorted(format_bitstring(b) for b in index_to_bits(np.asarray(indices), n_bits)))
    return SpectrumEntry(float(value), configs)


def ground_state(spec: ProblemSpec, max_qubits: int = MAX_ENUMERATION_QUBITS) -> SpectrumEntry:
    return spectrum(spec, 1, max_qubits)[0]


def count_configs(n_sites: int, ratio: Sequence[int]) -> int:
    """Multinomial coefficient n_sites! / prod(n_t!)."""
    counts = [int(c) for c in getattr(ratio, "counts", ratio)]
    if any(c < 0 for c in counts) or sum(counts) != n_sites:
        raise ValidationError(f"ratio {counts} does not sum to {n_sites}")
    out = math.factorial(n_sites)
    for c in counts:
        out //= math.factorial(c)
    return out


def _assignments(counts: list[int], n_sites: int) -> Iterator[tuple[int, ...]]:
    """Distinct site->type assignments with exactly ``counts[t]`` sites of type t."""
    if len(counts) == 1:
        yield (0,) * n_sites
        return
    free = list(range(n_sites))
    for chosen in itertools.combinations(free, counts[0]):
        rest = [s for s in free if s not in chosen]
        for sub in _assignments(counts[1:], len(rest)):
            out = [0] * n_sites
            for s, t in zip(rest, sub):
                out[s] = t + 1
            yield tuple(out)


def enumerate_valid(spec: ProblemSpec) -> Iterator[str]:
    """Bitstrings with one linker per site and the exact target ratio."""
    n_types = spec.n_types
    for assign in _assignments(list(spec.ratio.counts), spec.n_sites):
        bits = ["0"] * spec.n_qubits
        for site, t in enumerate(assign):
            bits[site * n_types + t] = "1"
        yield "".join(bits)


def write_spectrum_json(entries: Sequence[SpectrumEntry], path: str | Path) -> None:
    payload = [e.to_dict() for e in entries]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
