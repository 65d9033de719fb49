import numpy as np
import pytest

from ckptmerge import BaselineConfig, SearchBounds, greedy_search, grid_search, random_search

B = SearchBounds(0.5)
quad = lambda peak: (lambda lam: -((lam - peak) ** 2))


class TestGrid:
    def test_contains_optimum(self):
        res = grid_search(quad(0.8), B, BaselineConfig(budget=6))
        assert res.best_lambda == pytest.approx(0.8)
        assert res.best_value == pytest.approx(0.0, abs=1e-24)

    def test_budget_two(self):
        res = grid_search(quad(0.8), B, BaselineConfig(budget=2))
        assert [o.lam for o in res.trace] == [0.5, 1.0]

    def test_increasing(self):
        assert grid_search(lambda x: x, B).best_lambda == 1.0


class TestRandom:
    def test_deterministic(self):
        a = random_search(quad(0.9), B, BaselineConfig(budget=10, seed=4))
        b = random_search(quad(0.9), B, BaselineConfig(budget=10, seed=4))
        c = random_search(quad(0.9), B, BaselineConfig(budget=10, seed=5))
        assert a.trace == b.trace
        assert a.trace != c.trace

    def test_budget_one(self):
        res = random_search(quad(0.9), B, BaselineConfig(budget=1))
        assert res.n_evals == 1
        assert 0.5 <= res.trace[0].lam <= 1.0

    def test_large_budget_finds_peak(self):
        # P(no draw within 0.01 of 0.9) = (1 - 0.02/0.5)^(10^4), about 1e-177
        hits = sum(
            abs(random_search(quad(0.9), B, BaselineConfig(budget=10**4, seed=s)).best_lambda - 0.9) <= 0.01
            for s in range(100)
        )
        assert hits >= 99


class TestGreedy:
    def test_increasing_stays_at_one(self):
        res = greedy_search(lambda x: x, B, BaselineConfig(budget=10))
        assert res.best_lambda == 1.0
        assert res.trace[0].lam == 1.0

    def test_budget_three(self):
        assert greedy_search(quad(0.7), B, BaselineConfig(budget=3)).n_evals == 3

    def test_hand_schedule_peak_09(self):
        res = greedy_search(quad(0.9), B, BaselineConfig(budget=20, greedy_step=0.1, greedy_shrink=0.5))
        # 1 -> 0.9 accepted; every later probe pair brackets 0.9 and loses, halving the step
        want = [1.0, 0.9, 0.8, 0.85, 0.95]
        step = 0.025
        while len(want) < 20:
            want += [0.9 - step, 0.9 + step]
            step /= 2
        np.testing.assert_allclose([o.lam for o in res.trace], want[:20], atol=1e-12)
        assert abs(res.best_lambda - 0.9) <= 0.0125

    def test_clamps_to_bounds(self):
        res = greedy_search(lambda x: -x, B, BaselineConfig(budget=12, greedy_step=0.3))
        assert all(0.5 <= o.lam <= 1.0 for o in res.trace)
        assert res.best_lambda == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            greedy_search(quad(0.9), B, BaselineConfig(budget=2))
        with pytest.raises(ValueError):
            BaselineConfig(greedy_shrink=1.0)
        with pytest.raises(ValueError):
            grid_search(quad(0.9), B, BaselineConfig(budget=1))
