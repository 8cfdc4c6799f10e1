import math

import numpy as np
import pytest

from conftest import brute_force_fire, random_tree
from ibntrees import firefighter as ff
from ibntrees import generators as gen
from ibntrees.flowcut import DepthSchedule
from ibntrees.rng import stream_rng


def unit_budget(n=1):
    return ff.BudgetSchedule(lambda r: n)


def test_new_game_ball_sizes():
    t = gen.binary_family().build(4)
    assert ff.new_game(t, 0, unit_budget()).fire_size == 1
    assert ff.new_game(t, 2, unit_budget()).fire_size == 7
    seq = gen.sequence_family().build(6)
    assert ff.new_game(seq, 1, unit_budget()).fire_size == 2


def test_new_game_radius_error():
    t = gen.path_family().build(3)
    with pytest.raises(ValueError):
        ff.new_game(t, 3, unit_budget())


def test_step_spread_and_freeze():
    t = gen.path_family().build(6)
    g = ff.new_game(t, 1, unit_budget())
    g2 = ff.step(g, [])  # no protection: fire advances one level
    assert g2.fire_size == 3
    g3 = ff.step(g2, [t.level_set(4)[0]])
    g4 = ff.step(g3, [])
    assert g3.fire_size == g4.fire_size == 4  # frozen behind the protected vertex


def test_step_rejects_illegal_protection():
    t = gen.path_family().build(6)
    g = ff.new_game(t, 1, unit_budget(1))
    with pytest.raises(ValueError):
        ff.step(g, t.level_set(3) + t.level_set(4))  # budget exceeded
    with pytest.raises(ValueError):
        ff.step(g, [t.level_set(1)[0]])  # already burning


def test_budget_schedule_family():
    b = ff.BudgetSchedule.exponential(1.0, 0.8)
    assert b(1) == int(math.exp(1.0))
    assert b(3) == int(math.exp(3.0 ** 0.8))
    with pytest.raises(ValueError):
        ff.BudgetSchedule.exponential(0.0, 0.5)


def test_surrounding_set_from_level_cut():
    t = gen.binary_family().build(5)
    k = 1
    level = t.level_set(k + 1)
    s = ff.surrounding_set_from_cutset(t, level, k)
    assert set(s.vertices) == set(level)
    with pytest.raises(ValueError):
        ff.surrounding_set_from_cutset(t, t.level_set(k), k)


def test_greedy_play_path_contained():
    t = gen.path_family().build(8)
    s = ff.SurroundingSet((t.level_set(3)[0],), 2)
    res = ff.greedy_play(t, 2, unit_budget(1), s, horizon=10)
    assert res.contained and res.reason == "fire frozen"


def test_greedy_play_respects_budget_accounting():
    # on every contained run the cumulative budget covers the protected set
    fam = gen.sequence_family()
    sched = DepthSchedule((8, 16, 32))
    att = ff.attempt_containment(fam, 2, 0.8, 1.0, sched)
    assert att.contained
    t = fam.build(att.cut_depth)
    budgets = ff.BudgetSchedule.exponential(1.0, 0.8)
    cut = t.level_set(att.cut_depth) if fam.degree else None
    s = ff.surrounding_set_from_cutset(t, t.level_set(8), 2)
    res = ff.greedy_play(t, 2, budgets, s, horizon=20)
    depths = t.depth_array()
    for rnd, fire, prot in res.history[1:]:
        cumulative = sum(budgets(i) for i in range(1, rnd + 1))
        inside = sum(1 for v in s.vertices if depths[v] <= 2 + rnd)
        if res.contained:
            assert prot <= cumulative


def test_fire_spread_matches_brute_force():
    for seed in range(40):
        t = random_tree(seed, 6, extra=14)
        gen_rng = stream_rng(seed, 11)
        protections: dict[int, list[int]] = {}
        state = ff.new_game(t, 1, ff.BudgetSchedule(lambda n: 2))
        for rnd in range(1, 5):
            free = [v for v in range(t.n_vertices)
                    if not state.burning[v] and not state.protected[v]]
            take = [int(v) for v in gen_rng.choice(len(free), size=min(2, len(free)),
                                                   replace=False)] if free else []
            chosen = [free[i] for i in take]
            protections[rnd] = chosen
            state = ff.step(state, chosen)
            burning, _ = brute_force_fire(t, 1, protections, rnd)
            assert burning == set(np.flatnonzero(state.burning)), (seed, rnd)


def test_containment_monotone_in_initial_fire():
    # same protection sequence contains every subset of the initial ball
    t = gen.sequence_family().build(10)
    budgets = ff.BudgetSchedule.exponential(1.0, 0.8)
    surrounding = ff.surrounding_set_from_cutset(t, t.level_set(5), 2)
    full = ff.greedy_play(t, 2, budgets, surrounding, horizon=12)
    assert full.contained
    order = sorted(surrounding.vertices, key=lambda v: (t.depth(v), v))
    state = ff.new_game_from(t, [0], budgets)  # only the root burns
    pos = 0
    for rnd in range(1, 12):
        budget = budgets(rnd)
        chosen = []
        while pos < len(order) and len(chosen) < budget:
            if not state.burning[order[pos]]:
                chosen.append(order[pos])
            pos += 1
        before = state.fire_size
        state = ff.step(state, chosen)
        if state.fire_size == before:
            break
    assert state.fire_size == before  # frozen for the smaller fire too


def test_lambda_c_sequence_bracket():
    fam = gen.sequence_family()
    sched = DepthSchedule((8, 16, 32, 64, 128, 200))
    res = ff.lambda_c_estimate(fam, 2, (0.2, 0.4, 0.6, 0.8), 1.0, sched)
    assert not res.attempts[0.2].contained
    assert res.attempts[0.8].contained
    lo, hi = res.interval()
    assert max(lo, 0.3) <= min(hi, 0.7)


def test_lambda_c_path_contained_everywhere():
    res = ff.lambda_c_estimate(gen.path_family(), 2, (0.2, 0.5, 0.8), 1.0,
                               DepthSchedule((64, 256, 1024)))
    assert all(a.contained for a in res.attempts.values())


def test_lambda_c_binary_fails_everywhere():
    res = ff.lambda_c_estimate(gen.binary_family(), 2, (0.3, 0.6, 0.9), 1.0,
                               DepthSchedule((8, 16, 24)))
    assert not any(a.contained for a in res.attempts.values())
