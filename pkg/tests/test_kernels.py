"""Backend parity: the compiled kernels must match the pure fallback
bit for bit (same outputs, same bitstream consumption)."""

import numpy as np
import pytest

from spechit import lazy_path, lazy_rw_graph
from spechit._kernels import backends
from spechit.chain import support_neighbor_masks
from spechit.generators import random_connected_graph

BACKENDS = backends()
PAIRED = len(BACKENDS) == 2


def _rng(seed):
    key = np.array([np.uint64(seed), np.uint64(1)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class TestEnumeration:
    @pytest.mark.parametrize("n,seed", [(5, 0), (8, 1), (11, 2)])
    def test_backends_agree(self, n, seed):
        if not PAIRED:
            pytest.skip("compiled backend not built")
        c = lazy_rw_graph(random_connected_graph(n, seed), 0.5)
        nbr = support_neighbor_masks(c)
        outs = {}
        for name, mod in BACKENDS.items():
            outs[name] = mod.connected_masks(nbr, c.pi, 0.6, False)
        assert np.array_equal(outs["pure"][0], outs["cython"][0])
        assert np.array_equal(outs["pure"][1], outs["cython"][1])

    def test_include_full(self):
        c = lazy_path(3)
        nbr = support_neighbor_masks(c)
        for mod in BACKENDS.values():
            masks, _ = mod.connected_masks(nbr, c.pi, 1.0, True)
            assert 0b111 in masks.tolist()
            masks2, _ = mod.connected_masks(nbr, c.pi, 1.0, False)
            assert 0b111 not in masks2.tolist()

    def test_reference_counts(self):
        # path of 5: connected subsets are the 15 intervals
        c = lazy_path(5)
        nbr = support_neighbor_masks(c)
        for mod in BACKENDS.values():
            masks, _ = mod.connected_masks(nbr, c.pi, 1.0, True)
            assert len(masks) == 15


class TestWalks:
    def test_backends_bit_identical(self):
        if not PAIRED:
            pytest.skip("compiled backend not built")
        c = lazy_path(3)
        cum_rows = np.cumsum(c.P, axis=1)
        cum_start = np.cumsum([1.0, 0.0, 0.0])
        tgt = np.array([0, 0, 1], dtype=np.uint8)
        outs = {}
        for name, mod in BACKENDS.items():
            steps, capped = mod.walk_hitting_times(
                cum_rows, cum_start, tgt, 4000, 10_000, _rng(7))
            outs[name] = (steps, capped)
        assert np.array_equal(outs["pure"][0], outs["cython"][0])
        assert outs["pure"][1] == outs["cython"][1]

    def test_cap_counts(self):
        # from state 0 the target {2} is reachable in 2 steps with
        # probability 1/8, so nearly all trajectories hit the cap
        c = lazy_path(3)
        cum_rows = np.cumsum(c.P, axis=1)
        cum_start = np.cumsum([1.0, 0.0, 0.0])
        tgt = np.array([0, 0, 1], dtype=np.uint8)
        for mod in BACKENDS.values():
            steps, capped = mod.walk_hitting_times(
                cum_rows, cum_start, tgt, 500, 2, _rng(3))
            assert steps.max() <= 2
            assert capped >= 350
            assert capped <= int((steps == 2).sum())
