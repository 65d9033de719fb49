import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckptmerge import Checkpoint, greedy_soup, pairwise_merge, soup, uniform_soup
from ckptmerge.errors import CompatError, EmptyInputError, WeightError

from conftest import random_ckpt

SHAPES = {"a": (3, 5), "b": (7,), "c": (2, 2, 2)}


def test_endpoints_bitwise(bound_backend, rng):
    prev, curr = random_ckpt(rng, SHAPES), random_ckpt(rng, SHAPES)
    assert pairwise_merge(prev, curr, 1.0) == curr
    assert pairwise_merge(prev, curr, 0.0) == prev


def test_midpoint():
    out = pairwise_merge(Checkpoint({"w": [0.0]}), Checkpoint({"w": [2.0]}), 0.5)
    assert out["w"].tolist() == [1.0]


def test_scalar_loop_oracle(bound_backend, rng):
    prev, curr = random_ckpt(rng, SHAPES), random_ckpt(rng, SHAPES)
    lam = 0.87
    out = pairwise_merge(prev, curr, lam)
    for name in SHAPES:
        p, c = prev[name].reshape(-1), curr[name].reshape(-1)
        want = [np.float32(lam * float(ci) + (1.0 - lam) * float(pi)) for pi, ci in zip(p, c)]
        assert out[name].reshape(-1).tolist() == [float(x) for x in want]


def test_weight_out_of_range(rng):
    a = random_ckpt(rng, SHAPES)
    with pytest.raises(WeightError):
        pairwise_merge(a, a, 1.5)
    with pytest.raises(WeightError):
        pairwise_merge(a, a, -0.1)


def test_incompatible_carries_report():
    with pytest.raises(CompatError) as info:
        pairwise_merge(Checkpoint({"w": np.zeros(2)}), Checkpoint({"w": np.zeros(3)}), 0.5)
    assert info.value.report.mismatches[0][:2] == ("w", "shape-mismatch")


class TestSoup:
    def test_identity(self, rng):
        a = random_ckpt(rng, SHAPES)
        assert soup([a], [1.0]) == a

    def test_three_way_oracle(self, bound_backend, rng):
        cks = [random_ckpt(rng, SHAPES) for _ in range(3)]
        w = [0.2, 0.3, 0.5]
        out = soup(cks, w)
        for name in SHAPES:
            flat = [c[name].reshape(-1) for c in cks]
            want = []
            for i in range(flat[0].size):
                acc = 0.0
                for wi, f in zip(w, flat):
                    acc += wi * float(f[i])
                want.append(float(np.float32(acc)))
            assert out[name].reshape(-1).tolist() == want

    def test_weight_sum_violation(self, rng):
        a = random_ckpt(rng, SHAPES)
        with pytest.raises(WeightError):
            soup([a, a], [0.5, 0.6])
        with pytest.raises(WeightError):
            soup([a, a], [1.5, -0.5])
        with pytest.raises(WeightError):
            soup([a, a], [1.0])

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            soup([], [])
        with pytest.raises(EmptyInputError):
            uniform_soup([])

    def test_uniform_cases(self, rng):
        cks = [random_ckpt(rng, SHAPES) for _ in range(4)]
        assert uniform_soup(cks[:1]) == cks[0]
        assert uniform_soup(cks[:2]) == pairwise_merge(cks[0], cks[1], 0.5)
        assert uniform_soup(cks) == soup(cks, [0.25] * 4)

    def test_incompatible(self):
        with pytest.raises(CompatError):
            soup([Checkpoint({"w": [1.0]}), Checkpoint({"v": [1.0]})], [0.5, 0.5])

    def test_two_way_equals_pairwise(self, rng):
        a, b = random_ckpt(rng, SHAPES), random_ckpt(rng, SHAPES)
        for lam in (0.1, 0.37, 0.9):
            assert soup([a, b], [1 - lam, lam]) == pairwise_merge(a, b, lam)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_convexity_bounds(seed, lam):
    rng = np.random.default_rng(seed)
    a, b = random_ckpt(rng, {"w": (64,)}, 10.0), random_ckpt(rng, {"w": (64,)}, 10.0)
    m = pairwise_merge(a, b, lam)["w"]
    assert np.all(m >= np.minimum(a["w"], b["w"]))
    assert np.all(m <= np.maximum(a["w"], b["w"]))


class TestGreedySoup:
    def test_single(self, rng):
        a = random_ckpt(rng, SHAPES)
        out, trace = greedy_soup([a], lambda c: 1.0)
        assert out == a
        assert trace.considered == [(0, 1.0, True)]

    def test_constant_evaluator_keeps_first(self, rng):
        cks = [random_ckpt(rng, SHAPES) for _ in range(3)]
        out, trace = greedy_soup(cks, lambda c: 0.5)
        assert out == cks[0]
        assert trace.final_members == [0]
        assert [c[2] for c in trace.considered] == [True, False, False]

    def test_worsening_second_is_rejected(self):
        # score = -|w - 1|; averaging in w=5 moves the soup away from 1
        a, b = Checkpoint({"w": [1.0]}), Checkpoint({"w": [5.0]})
        out, trace = greedy_soup([a, b], lambda c: -abs(float(c["w"][0]) - 1.0))
        assert out == a
        assert trace.considered[1] == (1, -2.0, False)

    def test_improving_members_are_averaged(self):
        cks = [Checkpoint({"w": [v]}) for v in (0.0, 2.0, 10.0, 1.0)]
        out, trace = greedy_soup(cks, lambda c: -abs(float(c["w"][0]) - 1.0), ids="abcd")
        # 0 -> avg(0,2)=1 accepted; avg(0,2,10)=4 rejected; avg(0,2,1)=1 ties, rejected
        assert trace.final_members == ["a", "b"]
        assert out["w"].tolist() == [1.0]
        assert trace.running_scores() == [-1.0, 0.0, 0.0, 0.0]
