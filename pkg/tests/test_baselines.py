import logging

import numpy as np
import pytest

from conftest import PING_PONG, columns
from models.count_models import CountModel
from models.solver_models import SolverOptions
from services.baseline_solvers import baseline_solvers, grid_oracle, mm_solve, newton_solve
from services.error_handler import DivergenceError, SingularHessianError, SizeCapError, ValidationError
from services.match_ingest import from_matches, read_matches
from services.synthetic_data import random_regular_model
from services.weaver_service import alliance, greedy_weaver, weaver


def test_mm_multinomial_is_one_step(multinomial_model):
    solution = mm_solve(multinomial_model)
    assert solution.converged
    assert solution.iterations == 1
    np.testing.assert_allclose(solution.p.x, [0.3, 0.7])


def test_mm_normalizer_without_subtraction():
    a = np.array([3.0, 7.0])
    assert baseline_solvers._normalizer(a, np.zeros(2)) == pytest.approx(10.0)


def test_mm_matches_weaver_on_ping_pong(tight_options):
    model = from_matches(read_matches(PING_PONG))
    expected = weaver(model, tight_options)
    solution = mm_solve(model, tight_options)
    np.testing.assert_allclose(solution.p.x, expected.p.x, atol=1e-8)


def test_mm_matches_weaver_on_playboard(playboard_model, tight_options):
    expected = weaver(playboard_model, tight_options)
    solution = mm_solve(playboard_model, tight_options)
    np.testing.assert_allclose(solution.p.x, expected.p.x, atol=1e-6)


def test_mm_requires_positive_ionic_counts():
    model = CountModel.from_arrays([1, 0], [-1], columns("11"))
    with pytest.raises(ValidationError):
        mm_solve(model)


def test_newton_intro(intro_model, tight_options):
    solution = newton_solve(intro_model, tight_options)
    np.testing.assert_allclose(solution.p.x, [0.4, 0.4, 0.2], atol=1e-10)
    assert solution.hessian is not None
    assert np.all(solution.hessian.eigenvalues() < 0)


def test_newton_matches_weaver_on_playboard(playboard_model, tight_options):
    expected = weaver(playboard_model, tight_options)
    solution = newton_solve(playboard_model, tight_options)
    np.testing.assert_allclose(solution.p.x, expected.p.x, atol=1e-8)


def test_newton_multinomial_fixed_point(multinomial_model):
    solution = newton_solve(multinomial_model)
    assert solution.iterations == 1
    np.testing.assert_allclose(solution.p.x, [0.3, 0.7])


def test_newton_singular_hessian(monkeypatch, playboard_model):
    from services import baseline_solvers as module
    from models.count_models import HessianBlock

    def flat(model, x):
        size = model.n - 1
        return HessianBlock.from_arrays(np.zeros((size, size)), np.zeros((size, size)))

    monkeypatch.setattr(module, "hessian", flat)
    with pytest.raises(SingularHessianError):
        newton_solve(playboard_model, SolverOptions(sse_tolerance=1e-20))


def test_grid_oracle_intro(intro_model):
    point = grid_oracle(intro_model, 200)
    np.testing.assert_allclose(point.x, [0.4, 0.4, 0.2], atol=1 / 200)


def test_grid_oracle_multinomial(multinomial_model):
    np.testing.assert_allclose(grid_oracle(multinomial_model, 10).x, [0.3, 0.7])


def test_grid_oracle_agrees_with_alliance(tight_options):
    rng = np.random.default_rng(9)
    model = CountModel.from_arrays(rng.integers(1, 30, 3), rng.integers(1, 30, 2), columns("110", "011"))
    expected = alliance(model, tight_options)
    point = grid_oracle(model, 200)
    np.testing.assert_allclose(point.x, expected.p.x, atol=0.01)


def test_grid_oracle_caps(playboard_model):
    with pytest.raises(SizeCapError):
        grid_oracle(playboard_model, 500)
    wide = CountModel.from_arrays(np.ones(5), [], np.zeros((5, 0), dtype=int))
    with pytest.raises(SizeCapError):
        grid_oracle(wide, 50)


def test_mm_step_stall_is_reported_not_converged(playboard_model, caplog):
    opts = SolverOptions(sse_tolerance=1e-30, step_tolerance=1.0)
    with caplog.at_level(logging.INFO):
        solution = mm_solve(playboard_model, opts)
    assert solution.status == "diverged_with_best"
    assert solution.iterations == 2
    assert not any(record.levelno >= logging.WARNING for record in caplog.records)


def test_solvers_agree_on_random_regular_models():
    rng = np.random.default_rng(4)
    opts = SolverOptions(sse_tolerance=1e-16, max_iterations=20000)
    for _ in range(50):
        model = random_regular_model(rng)
        reference = alliance(model, opts)
        assert reference.converged
        for solve in (weaver, greedy_weaver, mm_solve, newton_solve):
            try:
                solution = solve(model, opts)
            except (DivergenceError, SingularHessianError):
                continue
            if solution.converged:
                np.testing.assert_allclose(solution.p.x, reference.p.x, atol=1e-4, err_msg=solution.solver)
