import itertools
import math

import numpy as np
import pytest

from conftest import random_tree
from ibntrees import generators as gen
from ibntrees import percolation as pc
from ibntrees.flowcut import DepthSchedule
from ibntrees.trees import Tree


def test_survival_path_closed_form():
    t = gen.spherically_symmetric(lambda n: 1, 6)
    lam = 0.4
    s = pc.exact_survival(t, pc.PercolationLaw(lam), 6)
    expect = math.exp(-sum(n ** (lam - 1.0) for n in range(1, 7)))
    assert math.isclose(s, expect, rel_tol=1e-12)


def test_survival_star_path_enumeration():
    t = Tree()
    c1, c2 = t.add_child(0), t.add_child(0)
    t.add_child(c1), t.add_child(c2)
    lam = 0.35
    law = pc.PercolationLaw(lam)
    p1, p2 = math.exp(-1.0), math.exp(-(2.0 ** (lam - 1.0)))
    closed = 1.0 - (1.0 - p1 * p2) ** 2
    total = 0.0
    for bits in itertools.product([0, 1], repeat=4):
        pr = 1.0
        for bit, p in zip(bits, [p1, p1, p2, p2]):
            pr *= p if bit else 1.0 - p
        if (bits[0] and bits[2]) or (bits[1] and bits[3]):
            total += pr
    s = pc.exact_survival(t, law, 2)
    assert math.isclose(s, closed, rel_tol=1e-12)
    assert math.isclose(s, total, rel_tol=1e-12)


def test_survival_depth_one_edge_is_exp_minus_one():
    t = Tree()
    t.add_child(0)
    s = pc.exact_survival(t, pc.PercolationLaw(0.5), 1)
    assert math.isclose(s, math.exp(-1.0), rel_tol=1e-12)


def test_survival_symmetric_matches_generic():
    fam = gen.sequence_family()
    t = fam.build(16)
    for lam in (0.3, 0.7):
        a = pc.exact_survival(t, pc.PercolationLaw(lam), 16)
        b = pc.survival_symmetric(fam.degree, pc.PercolationLaw(lam), 16)
        assert math.isclose(a, b, rel_tol=1e-12)


def test_survival_monotone():
    t = random_tree(9, 6)
    vals = [pc.exact_survival(t, pc.PercolationLaw(0.5), N) for N in range(1, 7)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
    # p(e) = exp(-|e|**(lam-1)) falls with lam at depth >= 2, so deeper
    # survival does too (the supercritical side is the small-lam side)
    by_lam = [pc.exact_survival(t, pc.PercolationLaw(lam), 6) for lam in (0.2, 0.5, 0.8)]
    assert all(b <= a + 1e-15 for a, b in zip(by_lam, by_lam[1:]))


def test_mc_always_open_and_single_edge():
    t = random_tree(4, 4)
    est, err = pc.mc_survival(t, pc.PercolationLaw.always_open(), 4, 500, seed=0)
    assert est == 1.0
    t1 = Tree()
    t1.add_child(0)
    est, err = pc.mc_survival(t1, pc.PercolationLaw(0.5), 1, 50_000, seed=1)
    assert abs(est - math.exp(-1.0)) < 3 * err


def test_mc_matches_exact():
    for seed in (0, 1, 2):
        t = random_tree(seed + 40, 6)
        law = pc.PercolationLaw(0.45)
        exact = pc.exact_survival(t, law, 6)
        est, err = pc.mc_survival(t, law, 6, 20_000, seed=seed)
        assert abs(est - exact) < 3 * max(err, 1e-4)


def test_theta_sequence_trajectories():
    fam = gen.sequence_family()
    vals3 = [pc.survival_symmetric(fam.degree, pc.PercolationLaw(0.3), N)
             for N in (16, 64, 256, 1024)]
    assert all(v >= 1e-6 for v in vals3)
    vals7 = [pc.survival_symmetric(fam.degree, pc.PercolationLaw(0.7), N)
             for N in (16, 64, 256, 1024)]
    assert all(b < a for a, b in zip(vals7, vals7[1:]))
    assert vals7[-1] < 1e-20


def test_theta_bracket_overlaps_ibn():
    from ibntrees.flowcut import ibn_estimate
    fam = gen.sequence_family()
    grid = tuple(round(0.05 * k, 2) for k in range(1, 20))
    theta = pc.theta_estimate(fam, DepthSchedule((16, 32, 64, 128)), grid)
    ibn = ibn_estimate(fam, DepthSchedule.doubling(16, 1024))
    t_lo, t_hi = theta.interval()
    i_lo, i_hi = ibn.interval()
    assert max(t_lo, i_lo) <= min(t_hi, i_hi)


def test_theta_path_all_above():
    # the survival product decays like exp(-N**lam / lam): slowly for small
    # lam, so the small-lam classifications need a deep schedule
    res = pc.theta_estimate(gen.path_family(), DepthSchedule((4096, 16384, 65536)),
                            tuple(round(0.05 * k, 2) for k in range(1, 20)))
    assert all(v == "above" for v in res.classifications.values())


def test_theta_binary_all_below():
    grid = tuple(round(0.05 * k, 2) for k in range(1, 17))  # 0.05 .. 0.80
    res = pc.theta_estimate(gen.binary_family(), DepthSchedule((16, 32, 64)), grid)
    assert all(v == "below" for v in res.classifications.values())


def test_conductance_bound_below_exact():
    for seed in range(100):
        t = random_tree(seed, 5)
        lam = 0.25 + 0.5 * (seed / 100)
        law = pc.PercolationLaw(lam)
        b = pc.conductance_bound(t, law, 5)
        e = pc.exact_survival(t, law, 5)
        assert b <= e + 1e-12


def test_conductance_bound_single_edge_equality():
    t = Tree()
    t.add_child(0)
    law = pc.PercolationLaw(0.5)
    b = pc.conductance_bound(t, law, 1)
    assert math.isclose(b, math.exp(-1.0), rel_tol=1e-12)


def test_conductance_bound_symmetric_matches_generic():
    fam = gen.sequence_family()
    t = fam.build(20)
    for lam in (0.3, 0.6):
        a = pc.conductance_bound(t, pc.PercolationLaw(lam), 20)
        b = pc.conductance_bound_symmetric(fam, lam, 20)
        assert math.isclose(a, b, rel_tol=1e-9)


def test_conductance_bound_sequence_floor():
    fam = gen.sequence_family()
    for N in (16, 64, 256, 512):
        assert pc.conductance_bound_symmetric(fam, 0.3, N) >= 1e-6


def test_law_validation():
    with pytest.raises(ValueError):
        pc.PercolationLaw(1.5)
    law = pc.PercolationLaw(0.5)
    p = law.p(np.arange(1, 5, dtype=float))
    assert (np.diff(p) > 0).all()
    assert math.isclose(p[0], math.exp(-1.0))
