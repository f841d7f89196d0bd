import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spechit import (build_chain, conditioned_distribution, connected_subsets,
                     continuize, lazy_path, load_chain, make_subset, restrict,
                     save_chain, time_reversal)
from spechit.chain import subset_from_bitmask
from spechit.errors import (DimensionTooSmall, EmptySubset, EnumerationTooLarge,
                            FullSubset, InvalidChainFile, NegativeTime,
                            NotIrreducible, NotStochastic)


def lazy_path_3():
    return lazy_path(3)


class TestBuildChain:
    def test_symmetric_two_state(self):
        c = build_chain([[0.5, 0.5], [0.5, 0.5]])
        assert np.allclose(c.pi, [0.5, 0.5])
        assert c.reversible

    def test_two_state_closed_form(self):
        # p = 1/3, q = 1/6 -> pi = (q, p) / (p + q)
        c = build_chain([[2 / 3, 1 / 3], [1 / 6, 5 / 6]])
        assert np.allclose(c.pi, [1 / 3, 2 / 3], atol=1e-12)

    def test_identity_not_irreducible(self):
        with pytest.raises(NotIrreducible):
            build_chain(np.eye(3))

    def test_row_sum_violation(self):
        with pytest.raises(NotStochastic):
            build_chain([[0.5, 0.4], [0.5, 0.5]])

    def test_negative_entry(self):
        with pytest.raises(NotStochastic):
            build_chain([[1.1, -0.1], [0.5, 0.5]])

    def test_single_state(self):
        with pytest.raises(DimensionTooSmall):
            build_chain([[1.0]])

    def test_stationarity_residual(self):
        c = lazy_path_3()
        assert np.max(np.abs(c.pi @ c.P - c.pi)) < 1e-10
        assert abs(c.pi.sum() - 1) < 1e-14

    def test_immutability(self):
        c = lazy_path_3()
        with pytest.raises(ValueError):
            c.P[0, 0] = 0.0


class TestTimeReversal:
    def test_reversible_fixed_point(self):
        c = lazy_path_3()
        assert np.max(np.abs(time_reversal(c).P - c.P)) < 1e-12

    def test_biased_cycle_reverses(self):
        from spechit import biased_cycle
        c = biased_cycle(4)
        r = time_reversal(c)
        assert not c.reversible
        for i in range(4):
            assert r.P[i, (i + 1) % 4] == pytest.approx(1 / 6, abs=1e-14)
            assert r.P[i, (i - 1) % 4] == pytest.approx(1 / 3, abs=1e-14)

    def test_stationarity_preserved(self):
        c = lazy_path_3()
        r = time_reversal(c)
        assert np.max(np.abs(r.pi @ r.P - r.pi)) < 1e-10

    def test_involution(self):
        from spechit import biased_cycle
        c = biased_cycle(5)
        rr = time_reversal(time_reversal(c))
        assert np.max(np.abs(rr.P - c.P)) < 1e-14


class TestRestrictCondition:
    def test_restrict_entries(self):
        c = lazy_path_3()
        B = make_subset(c, [0, 1])
        ker = restrict(c, B)
        assert np.array_equal(ker.entries, [[0.5, 0.5], [0.25, 0.5]])

    def test_restrict_singleton(self):
        c = lazy_path_3()
        ker = restrict(c, make_subset(c, [1]))
        assert ker.entries.shape == (1, 1)
        assert ker.entries[0, 0] == 0.5

    def test_restrict_full_raises(self):
        c = lazy_path_3()
        with pytest.raises(FullSubset):
            restrict(c, make_subset(c, [0, 1, 2]))

    def test_empty_subset(self):
        c = lazy_path_3()
        with pytest.raises(EmptySubset):
            make_subset(c, [])

    def test_conditioned_distribution(self):
        c = lazy_path_3()
        out = conditioned_distribution(c, make_subset(c, [0, 1]))
        assert np.allclose(out, [1 / 3, 2 / 3, 0.0])

    def test_conditioned_full_is_pi(self):
        c = lazy_path_3()
        out = conditioned_distribution(c, make_subset(c, [0, 1, 2]))
        assert np.allclose(out, c.pi)

    def test_conditioned_singleton(self):
        c = lazy_path_3()
        out = conditioned_distribution(c, make_subset(c, [2]))
        assert np.allclose(out, [0, 0, 1])


@st.composite
def small_reversible_chain(draw):
    n = draw(st.integers(min_value=5, max_value=8))
    seed = draw(st.integers(min_value=0, max_value=2 ** 31))
    rng = np.random.default_rng(seed)
    # random connected weighted graph -> reversible walk
    W = rng.uniform(0.1, 1.0, size=(n, n))
    W = (W + W.T) / 2
    keep = rng.random((n, n)) < 0.5
    keep = keep | keep.T
    np.fill_diagonal(keep, True)
    for i in range(n - 1):
        keep[i, i + 1] = keep[i + 1, i] = True
    W = W * keep
    P = W / W.sum(axis=1, keepdims=True)
    return build_chain(P)


class TestReversalRestrictionCommute:
    @settings(max_examples=200, deadline=None)
    @given(small_reversible_chain(), st.data())
    def test_commutation(self, c, data):
        members = data.draw(st.sets(st.integers(0, c.n - 1), min_size=1,
                                    max_size=c.n - 1))
        B = make_subset(c, sorted(members))
        left = restrict(time_reversal(c), B).entries
        idx = B.indices
        right = restrict(c, B).entries
        # adjoint of the restriction under the pi weights
        expected = (right.T * c.pi[idx][None, :]) / c.pi[idx][:, None]
        assert np.max(np.abs(left - expected)) < 1e-12


class TestConnectedSubsets:
    def test_lazy_path_half_mass(self):
        c = lazy_path_3()
        subs = list(connected_subsets(c, max_mass=0.5))
        assert [s.members for s in subs] == [(0,), (1,), (2,)]

    def test_all_proper_connected(self):
        c = lazy_path_3()
        subs = list(connected_subsets(c, max_mass=1.0))
        # {0,2} is disconnected, V excluded: 5 proper connected subsets
        assert len(subs) == 5

    def test_complete_graph_counts(self):
        from spechit import complete
        c = complete(4)
        subs = list(connected_subsets(c, max_mass=1.0))
        assert len(subs) == 2 ** 4 - 2

    def test_cap(self):
        from spechit.config import with_enum_cap
        c = lazy_path(5)
        with pytest.raises(EnumerationTooLarge):
            list(connected_subsets(c, config=with_enum_cap(4)))

    def test_deterministic_order(self):
        c = lazy_path(5)
        masks = [s.bitmask for s in connected_subsets(c)]
        assert masks == sorted(masks)

    def test_bitmask_roundtrip(self):
        c = lazy_path_3()
        m = subset_from_bitmask(c, 0b011)
        assert m.members == (0, 1)
        assert m.bitmask == 3


class TestContinuize:
    def test_zero_time_identity(self):
        c = lazy_path_3()
        assert np.array_equal(continuize(c, 1.0, 0.0), np.eye(3))

    def test_two_state_closed_form(self):
        from spechit import two_state
        c = two_state(0.5, 0.5)
        for t in (0.1, 1.0, 3.0):
            M = continuize(c, 1.0, t)
            expect = 0.5 + 0.5 * np.exp(-t) * np.array([[1, -1], [-1, 1]])
            assert np.max(np.abs(M - expect)) < 1e-12

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_rows_stochastic(self, t):
        from spechit import biased_cycle
        c = biased_cycle(5)
        M = continuize(c, 2.0, t)
        assert np.max(np.abs(M.sum(axis=1) - 1)) < 1e-10

    def test_negative_time(self):
        with pytest.raises(NegativeTime):
            continuize(lazy_path_3(), 1.0, -0.5)


class TestChainFiles:
    def test_roundtrip(self, tmp_path):
        c = lazy_path_3()
        path = tmp_path / "chain.json"
        save_chain(c, path)
        c2 = load_chain(path)
        assert np.max(np.abs(c2.P - c.P)) == 0.0
        assert np.max(np.abs(c2.pi - c.pi)) < 1e-12

    def test_bad_pi_rejected(self, tmp_path):
        path = tmp_path / "chain.json"
        doc = {"n": 2, "P": [[0.5, 0.5], [0.5, 0.5]], "pi": [0.9, 0.1]}
        path.write_text(json.dumps(doc))
        with pytest.raises(InvalidChainFile):
            load_chain(path)

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "chain.json"
        path.write_text(json.dumps({"n": 3, "P": [[0.5, 0.5], [0.5, 0.5]]}))
        with pytest.raises(InvalidChainFile):
            load_chain(path)
