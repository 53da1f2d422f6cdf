import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtvq.errors import EnumerationBoundError, ValidationError
from mtvq.exact import count_configs, enumerate_valid, ground_state, spectrum, write_spectrum_json
from mtvq.hamiltonian import ProblemSpec, cost_table, occupancy_cost, ratio_cost, total_cost
from mtvq.topology import (
    PRESET_NAMES,
    ConnectionKind,
    LinkerCatalog,
    LinkerType,
    RatioSpec,
    build_graph,
    preset,
)

TOPO = ConnectionKind.TOPOLOGICAL


def spec_of(name, **kw):
    inputs = preset(name)
    return ProblemSpec(inputs.graph, inputs.catalog, inputs.ratio, inputs.c_ratio, inputs.c_occ, **kw)


def brute_force_levels(spec):
    """Sorted distinct values via a plain Python loop over every bitstring."""
    n = spec.n_qubits
    values = {}
    for bits in itertools.product("01", repeat=n):
        b = "".join(bits)
        values.setdefault(round(float(total_cost(b, spec)), 7), []).append(b)
    return sorted(values.items())


def test_counts_from_multinomial():
    assert count_configs(8, (4, 4)) == 70
    assert count_configs(6, (3, 3)) == 20
    assert count_configs(2, (1, 1)) == 2
    assert count_configs(12, (3, 3, 3, 3)) == 369600
    assert count_configs(5, RatioSpec((5, 0))) == 1
    with pytest.raises(ValidationError):
        count_configs(8, (4, 3))


@pytest.mark.parametrize("n, counts", [
    (2, (1, 1)), (4, (2, 2)), (5, (2, 1, 2)), (6, (3, 3)), (8, (4, 4)), (7, (1, 2, 4)),
    (9, (3, 3, 3)), (10, (5, 5)), (12, (6, 6)), (12, (4, 4, 4)),
])
def test_count_matches_enumeration(n, counts):
    g = build_graph(n, [(i, i + 1, 1.0, TOPO) for i in range(n - 1)], 1.0)
    cat = LinkerCatalog(tuple(LinkerType(f"L{t}", 1.0 + t) for t in range(len(counts))))
    spec = ProblemSpec(g, cat, RatioSpec(counts))
    configs = list(enumerate_valid(spec))
    assert len(configs) == count_configs(n, counts)
    assert len(set(configs)) == len(configs)
    for cfg in configs:
        assert ratio_cost(cfg, spec) == 0 and occupancy_cost(cfg, spec) == 0


def test_enumerate_valid_eight_sites():
    assert len(list(enumerate_valid(spec_of("cu-thq-hhtp")))) == 70


def test_minimal_two_site_spectrum():
    g = build_graph(2, [(0, 1, 3.0, TOPO)], 1.0)
    cat = LinkerCatalog((LinkerType("THQ", 2.42), LinkerType("HHTP", 4.87)))
    spec = ProblemSpec(g, cat, RatioSpec((1, 1)))
    gs = ground_state(spec)
    assert gs.hamiltonian_value == pytest.approx(0.0, abs=1e-12)
    assert gs.configurations == ("0110", "1001")


@pytest.mark.parametrize("name", ["muf-7", "sioc-cof2"])
def test_spectrum_matches_brute_force(name):
    spec = spec_of(name)
    expected = brute_force_levels(spec)[:6]
    got = spectrum(spec, 6)
    assert [e.hamiltonian_value for e in got] == pytest.approx([v for v, _ in expected], abs=1e-6)
    assert [e.configurations for e in got] == [tuple(sorted(c)) for _, c in expected]


def test_spectrum_tiny_spec_against_brute_force():
    g = build_graph(3, [(0, 1, 2.0, TOPO), (1, 2, 1.0, TOPO), (0, 2, 4.0, "spatial")], 0.4)
    cat = LinkerCatalog((LinkerType("a", 1.0), LinkerType("b", 2.0), LinkerType("c", 4.0)))
    spec = ProblemSpec(g, cat, RatioSpec((1, 1, 1)), 3.0, 5.0)
    expected = brute_force_levels(spec)[:10]
    got = spectrum(spec, 10)
    assert [e.hamiltonian_value for e in got] == pytest.approx([v for v, _ in expected], abs=1e-6)
    assert [set(e.configurations) for e in got] == [set(c) for _, c in expected]


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_spectrum_properties(name):
    spec = spec_of(name)
    levels = spectrum(spec, 6)
    values = [e.hamiltonian_value for e in levels]
    assert len(values) == 6
    assert all(b - a > 1e-9 for a, b in zip(values, values[1:]))
    assert levels[0] == ground_state(spec)
    for entry in levels:
        for cfg in entry.configurations:
            assert float(total_cost(cfg, spec)) == pytest.approx(entry.hamiltonian_value, abs=1e-9)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_ground_value_is_min_over_valid_configs(name):
    spec = spec_of(name)
    gs = ground_state(spec)
    best = min(float(total_cost(c, spec)) for c in enumerate_valid(spec))
    assert gs.hamiltonian_value == pytest.approx(best, abs=1e-9)
    assert set(gs.configurations) <= set(enumerate_valid(spec))


def test_equal_lengths_make_every_valid_config_optimal():
    # identical linker lengths give L = L-bar on every edge of every valid config
    base = preset("muf-7")
    cat = LinkerCatalog((LinkerType("x", 3.3), LinkerType("y", 3.3)))
    spec = ProblemSpec(base.graph, cat, base.ratio)
    gs = ground_state(spec)
    assert gs.hamiltonian_value == pytest.approx(0.0, abs=1e-9)
    assert set(gs.configurations) == set(enumerate_valid(spec))


@settings(max_examples=15, deadline=None)
@given(scale=st.floats(0.1, 20.0))
def test_argmin_invariant_under_positive_scaling(scale):
    base = spec_of("muf-7")
    scaled = ProblemSpec(base.graph, base.catalog, base.ratio, base.c_ratio * scale, base.c_occ * scale)
    # scaling the penalties alone keeps valid-config minimisers when they are already feasible
    assert ground_state(scaled).configurations == ground_state(base).configurations
    table = cost_table(base)
    assert np.argmin(table * scale) == np.argmin(table)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_type_swap_symmetry_on_balanced_presets(name):
    # swapping the two types maps a minimiser to a minimiser when n_0 = n_1
    spec = spec_of(name)
    gs = ground_state(spec)
    swapped = {"".join(c[i + 1] + c[i] for i in range(0, len(c), 2)) for c in gs.configurations}
    assert swapped == set(gs.configurations)


# literal-form spectra with 2-decimal weights; ground values as published
@pytest.mark.parametrize("name, ground", [
    ("cu-thq-hhtp", 293.88), ("py-mv-dba-cof", 350.89), ("muf-7", 0.00), ("sioc-cof2", 188.79),
])
def test_published_ground_values_in_literal_form(name, ground):
    inputs = preset(name)
    spec = ProblemSpec(inputs.graph.with_weight_decimals(2), inputs.catalog, inputs.ratio,
                       inputs.c_ratio, inputs.c_occ, "literal-eq5")
    assert round(ground_state(spec).hamiltonian_value, 2) == pytest.approx(ground, abs=1e-9)


def test_alternating_ground_states_on_honeycomb():
    for name in ("cu-thq-hhtp", "py-mv-dba-cof"):
        gs = ground_state(spec_of(name))
        assert gs.configurations == ("0110011001100110", "1001100110011001")


def test_enumeration_bound():
    spec = spec_of("cu-thq-hhtp")
    with pytest.raises(EnumerationBoundError):
        spectrum(spec, 1, max_qubits=12)
    with pytest.raises(ValidationError):
        spectrum(spec, 0)


def test_write_spectrum_json(tmp_path):
    path = tmp_path / "s.json"
    write_spectrum_json(spectrum(spec_of("muf-7"), 3), path)
    data = json.loads(path.read_text())
    assert [len(d["configs"]) for d in data] == [2, 12, 6]
    assert data[0]["h"] == pytest.approx(0.0, abs=1e-9)
    assert math.isclose(data[1]["h"], 47.1005, abs_tol=1e-3)
