import numpy as np
import pytest

from spechit import (connected_subsets, lazy_path, lazy_rw_graph, make_subset,
                     quasi_stationary, random_birth_death, two_state)
from spechit.errors import EmptyLevelSet
from spechit.generators import random_connected_graph
from spechit.levelset import find_L, qs_density, u_functional


def roster():
    out = [lazy_path(3), lazy_path(5), two_state(0.25, 0.7)]
    out += [random_birth_death(n, seed=40 + n) for n in (5, 7)]
    out += [lazy_rw_graph(random_connected_graph(n, seed=50 + n), 0.5)
            for n in (5, 7)]
    return out


def test_density_normalization():
    c = lazy_path(3)
    B = make_subset(c, [0, 1])
    f = qs_density(c, B)
    w = c.pi[B.indices] / B.pi_mass
    assert float(np.dot(w, f)) == pytest.approx(1.0, abs=1e-12)


def test_density_max_dominates_second_moment():
    for c in roster():
        for B in connected_subsets(c, max_mass=0.9):
            f = qs_density(c, B)
            w = c.pi[B.indices] / B.pi_mass
            assert f.max() >= float(np.dot(w, f * f)) - 1e-12


def test_u_functional_routes_agree():
    c = random_birth_death(6, seed=13)
    B = make_subset(c, [0, 1, 2, 3])
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    f = qs.alpha / w
    for level in np.linspace(1e-6, f.max(), 17):
        u_functional(f, w, qs.alpha, float(level))  # raises if routes split


def test_u_functional_empty_level():
    c = lazy_path(3)
    B = make_subset(c, [0, 1])
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    f = qs.alpha / w
    with pytest.raises(EmptyLevelSet):
        u_functional(f, w, qs.alpha, float(f.max()) * 1.5)


def test_piecewise_constant_numerator():
    # within an atom interval, U * level is the constant alpha-mean
    c = random_birth_death(7, seed=8)
    B = make_subset(c, range(5))
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    f = qs.alpha / w
    levels = np.sort(np.unique(f))
    lo, hi = (levels[0], levels[1]) if len(levels) > 1 else (0, levels[0])
    for level in np.linspace(lo + 1e-9, hi, 7):
        k = u_functional(f, w, qs.alpha, float(level)) * level
        k0 = u_functional(f, w, qs.alpha, float(hi)) * hi
        assert k == pytest.approx(k0, abs=1e-10)


def test_u_shape_within_and_across_atoms():
    c = lazy_rw_graph(random_connected_graph(7, 99), 0.5)
    B = max(connected_subsets(c, max_mass=0.9), key=lambda m: len(m.members))
    qs = quasi_stationary(c, B)
    w = c.pi[B.indices] / B.pi_mass
    f = qs.alpha / w
    levels = np.sort(np.unique(f))
    # decreasing within intervals
    for a, b in zip(levels, levels[1:]):
        grid = np.linspace(a + 1e-9, b, 5)
        us = [u_functional(f, w, qs.alpha, float(x)) for x in grid]
        assert all(x >= y - 1e-12 for x, y in zip(us, us[1:]))
    # upward jump across an atom, moving right
    for a in levels[:-1]:
        at = u_functional(f, w, qs.alpha, float(a))
        just_right = u_functional(f, w, qs.alpha, float(a) * (1 + 1e-9))
        assert just_right >= at - 1e-9


def test_threshold_fact_u_above_two():
    # U > 2 for all levels up to a third of the second moment
    for c in roster():
        for B in connected_subsets(c, max_mass=0.9):
            qs = quasi_stationary(c, B)
            w = c.pi[B.indices] / B.pi_mass
            f = qs.alpha / w
            r = float(np.dot(w, f * f)) / 3.0
            for level in np.linspace(r / 10, r, 5):
                assert u_functional(f, w, qs.alpha, float(level)) > 2 - 1e-12


class TestFindL:
    def test_hand_fixture(self):
        c = lazy_path(3)
        scan = find_L(c, make_subset(c, [0, 1]))
        assert scan.U_at_L == pytest.approx(2.0, abs=1e-12)
        assert scan.level_set.members == (0, 1)
        assert scan.m1 == pytest.approx(1.0, abs=1e-12)

    def test_invariants_everywhere(self):
        for c in roster():
            for B in connected_subsets(c, max_mass=0.95):
                qs = quasi_stationary(c, B)
                scan = find_L(c, B)
                tol = 1e-9 if qs.lam >= 1e-12 else 1e-7
                assert abs(scan.U_at_L - 2.0) <= tol
                assert scan.m1 > (20 / 17) * scan.L - 1e-9
                assert abs(scan.m2 - 2 * scan.L * scan.m1) <= tol
                assert scan.m2 <= 4 * scan.L ** 2 + 1e-9

    def test_two_atom_closed_form(self):
        # |B| = 2 with distinct density values: the root solves the
        # two-atom algebra directly
        c = lazy_path(3)
        B = make_subset(c, [0, 1])
        qs = quasi_stationary(c, B)
        w = c.pi[B.indices] / B.pi_mass
        f = qs.alpha / w
        scan = find_L(c, B)
        a = np.argsort(f)
        hi_i, lo_i = a[-1], a[0]
        k_top = f[hi_i]                      # alpha-mean over the top atom
        root_top = k_top / 2
        if f[lo_i] < root_top <= f[hi_i]:
            expect = root_top
        else:
            expect = float(np.dot(qs.alpha, f)) / 2
        assert scan.L == pytest.approx(expect, abs=1e-12)

    def test_moment_translation_random_levels(self):
        c = random_birth_death(8, seed=77)
        B = make_subset(c, range(6))
        qs = quasi_stationary(c, B)
        w = c.pi[B.indices] / B.pi_mass
        f = qs.alpha / w
        rng = np.random.default_rng(3)
        for level in rng.uniform(f.min() / 2, f.max(), 20):
            sel = f >= level
            if not sel.any():
                continue
            m1 = float(np.dot(w[sel] / w[sel].sum(), f[sel]))
            m2 = float(np.dot(w[sel] / w[sel].sum(), f[sel] ** 2))
            alpha_mean = float(np.dot(qs.alpha[sel] / qs.alpha[sel].sum(),
                                      f[sel]))
            assert m1 == pytest.approx(qs.alpha[sel].sum() /
                                       (w[sel].sum()), abs=1e-10)
            assert m2 == pytest.approx(m1 * alpha_mean, abs=1e-10)

    def test_uniform_density_half_level(self):
        # symmetric complete-graph block: density constant 1, L = 1/2
        from spechit import complete
        c = complete(4)
        scan = find_L(c, make_subset(c, [0, 1]))
        assert scan.L == pytest.approx(0.5, abs=1e-12)
        assert scan.U_at_L == pytest.approx(2.0, abs=1e-12)
