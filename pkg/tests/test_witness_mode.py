"""Beyond the enumeration cap: candidate-set profiles are certified
upper bounds, and the witness-mode hitting maximum is a lower bound."""

import numpy as np
import pytest

from spechit import (lazy_rw_graph, spectral_profile, t_H_pi)
from spechit.config import with_enum_cap
from spechit.errors import EnumerationTooLarge
from spechit.generators import random_connected_graph


@pytest.fixture(scope="module")
def chain():
    return lazy_rw_graph(random_connected_graph(9, seed=17), 0.5)


def test_refuses_without_flag(chain):
    small = with_enum_cap(6)
    with pytest.raises(EnumerationTooLarge):
        spectral_profile(chain, config=small)


def test_profile_upper_bounds_exact(chain):
    small = with_enum_cap(6)
    exact = spectral_profile(chain)                       # full enumeration
    witness = spectral_profile(chain, witness_mode=True, config=small)
    assert witness.upper_bound_only
    assert not exact.upper_bound_only
    for bp, val in zip(witness.breakpoints, witness.values):
        assert val >= exact.value_at(bp) - 1e-10


def test_witness_hitting_lower_bounds_exact(chain):
    small = with_enum_cap(6)
    exact = t_H_pi(chain)
    approx = t_H_pi(chain, method="witness", config=small)
    assert not approx.exact
    assert approx.value <= exact.value + 1e-10
    # the eigenfunction candidates find a decent set on graph walks
    assert approx.value >= 0.25 * exact.value


def test_profile_query_below_support(chain):
    from spechit.errors import BadParameter
    prof = spectral_profile(chain)
    with pytest.raises(BadParameter):
        prof.value_at(prof.breakpoints[0] / 2)
