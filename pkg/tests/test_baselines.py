import numpy as np
import pytest

from fairspread.agm import agm_us
from fairspread.baselines import GREEDY, IMM, MYOPIC, global_imm, myopic, naive_greedy
from fairspread.errors import BudgetError, DataError
from fairspread.graph import GroupStructure
from fairspread.igm import SeedMatrix
from fairspread.ris import ImmParams, build_group_pool, greedy_max_cover

from helpers import chain, graph, pairs, random_tiny

FIXED = ImmParams(theta_override=10_000)


def star(hub, leaves):
    return [(hub, v) for v in leaves]


class TestGlobalImm:
    def test_chain(self):
        assert global_imm(chain(1.0), 1, FIXED, seed=0).seeds == (0,)

    def test_two_stars(self):
        g = graph(star(0, [1, 2, 3]) + star(4, [5, 6, 7]), n=8, p=1.0)
        assert sorted(global_imm(g, 2, FIXED, seed=0).seeds) == [0, 4]

    def test_full_budget(self):
        res = global_imm(chain(1.0), 3, FIXED, seed=0)
        assert res.seeds == (0, 1, 2) and res.method == IMM
        gains = [s for _, s in res.trace]
        assert gains == [10_000.0, 0.0, 0.0]

    def test_default_params_gains_non_increasing(self):
        rng = np.random.default_rng(3)
        g, _ = random_tiny(rng)
        res = global_imm(g, g.n, ImmParams(), seed=1)
        gains = [s for _, s in res.trace]
        assert all(a >= b for a, b in zip(gains, gains[1:]))

    def test_budget(self):
        with pytest.raises(BudgetError):
            global_imm(chain(), 4, FIXED, seed=0)


class TestMyopic:
    def test_first_pick_is_node_zero(self):
        rng = np.random.default_rng(0)
        g, _ = random_tiny(rng)
        assert myopic(g, 1, 10, seed=0).seeds == (0,)

    def test_chain(self):
        res = myopic(chain(1.0), 2, 50, seed=0)
        assert res.seeds == (0, 1) and res.method == MYOPIC
        assert res.trace[1] == (1, 1.0)

    def test_star_leaves(self):
        g = graph(star(0, [1, 2, 3, 4]), n=5, p=1.0)
        assert myopic(g, 2, 50, seed=0).seeds == (0, 1)

    def test_prefers_unreached_node(self):
        g = graph([(0, 1), (0, 2)], n=4, p=1.0)
        assert myopic(g, 2, 50, seed=0).seeds == (0, 3)

    def test_zero_samples(self):
        with pytest.raises(DataError):
            myopic(chain(), 2, 0, seed=0)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        g, _ = random_tiny(rng)
        assert myopic(g, 3, 200, seed=9, threads=1) == myopic(g, 3, 200, seed=9, threads=2)


class TestNaiveGreedy:
    def test_single_group_matches_imm_on_same_pool(self):
        rng = np.random.default_rng(6)
        g, _ = random_tiny(rng)
        c = GroupStructure.single(g.n)
        pool = build_group_pool(g, c, 0, 5000, seed=2)
        k = g.n - 1
        assert naive_greedy(g, c, k, [pool]).seeds == global_imm(g, k, pool=pool).seeds == greedy_max_cover(pool, k).seeds

    def test_pairs(self):
        g, c = pairs(1.0)
        res = naive_greedy(g, c, 2, params=FIXED, seed=0)
        assert res.seeds == (0, 2) and res.phi_hat == 1.0 and res.method == GREEDY

    def test_single_pick_all_zero(self):
        g, c = pairs(1.0)
        res = naive_greedy(g, c, 1, params=FIXED, seed=0)
        assert res.seeds == (0,) and res.trace == ((0, 0.0),)

    def test_phi_trace_non_decreasing(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            g, c = random_tiny(rng)
            res = naive_greedy(g, c, g.n, params=ImmParams(theta_override=2000), seed=int(rng.integers(1 << 30)))
            scores = [s for _, s in res.trace]
            assert all(a <= b for a, b in zip(scores, scores[1:]))
            assert len(set(res.seeds)) == g.n

    def test_pool_count_checked(self):
        g, c = pairs(1.0)
        pool = build_group_pool(g, c, 0, 10, seed=0)
        with pytest.raises(DataError):
            naive_greedy(g, c, 1, [pool])


def test_json_schema_matches_agm():
    g, c = pairs(1.0)
    base = naive_greedy(g, c, 2, params=FIXED, seed=0).to_json(g, c)
    rows = SeedMatrix(((0, 1), (2, 3)), ((1, 0), (1, 0)), 2)
    pools = [build_group_pool(g, c, gi, 100, seed=0) for gi in range(2)]
    agm = agm_us(rows, pools, 2).to_json(g, c)
    assert set(base) == set(agm)
    assert set(agm["diagnostics"]) == set(base["diagnostics"])
    assert base["seeds"] == ["0", "2"]
