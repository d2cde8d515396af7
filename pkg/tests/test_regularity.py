import itertools
import time

import numpy as np
import pytest

from conftest import columns, pattern
from models.count_models import CountModel
from services.error_handler import SizeCapError, ValidationError
from services.regularity import boundary_probe, check_uniform_regularity, covering_graph


def test_example_kernel_is_regular(regular_kernel):
    verdict = check_uniform_regularity(regular_kernel)
    assert verdict.is_regular
    assert verdict.negative_terms == 2
    assert verdict.unions_checked == 3
    assert verdict.witness is None


def test_heavier_denominator_is_irregular(irregular_kernel):
    verdict = check_uniform_regularity(irregular_kernel)
    assert verdict.status == "irregular"
    assert verdict.witness == pattern("11110")
    assert verdict.covered_sum == pytest.approx(-1.0)
    assert verdict.witness_count == pytest.approx(-422.0)
    assert verdict.violations == 1


def test_exhaustive_union_is_not_enumerated(exhaustive_kernel):
    verdict = check_uniform_regularity(exhaustive_kernel)
    assert verdict.is_regular
    assert verdict.unions_checked == 2


def test_multinomial_is_trivially_regular(multinomial_model):
    verdict = check_uniform_regularity(multinomial_model)
    assert verdict.is_regular
    assert verdict.negative_terms == 0


def test_positive_counts_are_regular(playboard_model):
    positive = CountModel.from_arrays(playboard_model.a, np.abs(playboard_model.b_vec), playboard_model.delta)
    assert check_uniform_regularity(positive).is_regular


def test_cap_reports_size_cap(irregular_kernel):
    verdict = check_uniform_regularity(irregular_kernel, cap=1)
    assert verdict.status == "size_cap"
    assert verdict.negative_terms == 2


def test_cap_reads_the_environment(irregular_kernel, monkeypatch):
    monkeypatch.setenv("WEAVER_MAX_REG_N", "1")
    assert check_uniform_regularity(irregular_kernel).status == "size_cap"


def test_verdict_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(3, 6))
        q = int(rng.integers(1, 5))
        delta = rng.integers(0, 2, size=(n, q))
        delta[:2, :] = 1
        delta[-1, :] = 0
        b = rng.integers(-30, 30, size=q).astype(float)
        b[b == 0] = 1.0
        model = CountModel.from_arrays(rng.integers(1, 20, size=n), b, delta)

        terms = list(model.kernel_terms())
        negatives = [p for p, c in terms if c < 0]
        expected = True
        for size in range(1, len(negatives) + 1):
            for chosen in itertools.combinations(negatives, size):
                union = np.max(np.asarray(chosen), axis=0)
                if union.all():
                    continue
                covered = sum(c for p, c in terms if np.all(np.asarray(p) <= union))
                expected &= covered >= 0
        assert check_uniform_regularity(model).is_regular == expected


def test_regularity_matches_boundary_behaviour(regular_kernel, irregular_kernel):
    face = pattern("11110")
    regular = boundary_probe(regular_kernel, face)
    irregular = boundary_probe(irregular_kernel, face)
    assert np.all(np.diff(regular) < 0)
    assert np.all(np.diff(irregular) > 0)


def test_boundary_probe_rejects_exhaustive_face(regular_kernel):
    with pytest.raises(ValidationError):
        boundary_probe(regular_kernel, pattern("11111"))


def test_too_many_ions_for_masks():
    n = 63
    model = CountModel.from_arrays(np.ones(n), [], np.zeros((n, 0), dtype=int))
    with pytest.raises(SizeCapError):
        check_uniform_regularity(model)


# ---------------- covering graph ----------------
def test_covering_graph_of_the_irregular_kernel(irregular_kernel):
    graph = covering_graph(irregular_kernel)
    assert len(graph.nodes) == 9
    assert graph.weight(pattern("11100")) == -202
    assert graph.weight(pattern("01110")) == -220

    expected = {
        ("10000", "11000"), ("01000", "11000"),
        ("00100", "00110"), ("00010", "00110"),
        ("11000", "11100"), ("00110", "01110"),
        ("00100", "11100"), ("01000", "01110"),
    }
    assert {(pattern(a), pattern(b)) for a, b in expected} == set(graph.edges)
    for ion in ("10000", "01000", "00100", "00010", "00001"):
        assert graph.in_degree(pattern(ion)) == 0


def test_covering_graph_of_multinomial_has_isolated_nodes(multinomial_model):
    graph = covering_graph(multinomial_model)
    assert len(graph.nodes) == 2
    assert graph.edges == ()


def test_covering_graph_edges_are_immediate_covers(playboard_model):
    graph = covering_graph(playboard_model)
    patterns = [p for p, _ in graph.nodes]
    assert len(patterns) == 11

    def below(low, high):
        return low != high and all(u <= v for u, v in zip(low, high))

    immediate = {
        (low, high)
        for low in patterns
        for high in patterns
        if below(low, high) and not any(below(low, mid) and below(mid, high) for mid in patterns)
    }
    assert set(graph.edges) == immediate


def test_dot_export(irregular_kernel):
    dot = covering_graph(irregular_kernel).to_dot()
    assert dot.startswith("digraph {\n")
    assert '  "11100" [w=-202];' in dot
    assert '  "10000" -> "11000";' in dot
    assert dot.endswith("}\n")


def test_example_kernels_classify_quickly(regular_kernel, irregular_kernel, exhaustive_kernel):
    for kernel, expected in ((regular_kernel, True), (irregular_kernel, False), (exhaustive_kernel, True)):
        start = time.perf_counter()
        assert check_uniform_regularity(kernel).is_regular is expected
        assert time.perf_counter() - start < 1.0
