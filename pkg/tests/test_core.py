import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iacopt.catalog import Catalog, CatalogElement, ElementType
from iacopt.core import (
    Individual,
    VariationConfig,
    binary_tournament,
    constrained_dominates,
    crowding_distance,
    crowding_distance_array,
    dominance_matrix,
    init_population,
    make_rng,
    nondominated_sort,
    pareto_dominates,
    polynomial_mutation_integer,
    sbx_integer,
    sort_arrays,
)
from iacopt.problem import Evaluation, ProblemInstance
from iacopt.doml import ObjectiveSpec


def ind(objectives, violation=0.0, genotype=(0,)):
    objectives = tuple(float(v) for v in objectives)
    return Individual(genotype, Evaluation(objectives, objectives, float(violation)))


# --------------------------------------------------------------------------- dominance


def test_feasible_beats_infeasible():
    assert constrained_dominates(ind((5, 5)), ind((0, 0), 0.3))
    assert not constrained_dominates(ind((0, 0), 0.3), ind((5, 5)))


def test_incomparable_feasible_pair():
    a, b = ind((1, 2)), ind((2, 1))
    assert not constrained_dominates(a, b)
    assert not constrained_dominates(b, a)


def test_infeasible_compare_by_violation():
    assert constrained_dominates(ind((9, 9), 0.2), ind((0, 0), 0.5))
    assert not constrained_dominates(ind((0, 0), 0.5), ind((9, 9), 0.2))


def test_mismatched_objective_counts():
    with pytest.raises(ValueError):
        constrained_dominates(ind((1, 2)), ind((1, 2, 3)))


def brute_dominates(fa, ca, fb, cb):
    if (ca == 0) != (cb == 0):
        return ca == 0
    if ca > 0:
        return ca < cb
    return all(x <= y for x, y in zip(fa, fb)) and any(x < y for x, y in zip(fa, fb))


def brute_fronts(F, cv):
    remaining = set(range(len(F)))
    fronts = []
    while remaining:
        front = sorted(
            i for i in remaining
            if not any(brute_dominates(F[j], cv[j], F[i], cv[i]) for j in remaining if j != i)
        )
        fronts.append(front)
        remaining -= set(front)
    return fronts


def test_sort_example_grid():
    pop = [ind(p) for p in [(1, 1), (1, 2), (2, 1), (2, 2)]]
    assert nondominated_sort(pop) == [[0], [1, 2], [3]]


def test_identical_points_single_front():
    assert nondominated_sort([ind((3, 3))] * 5) == [[0, 1, 2, 3, 4]]


def test_single_feasible_leads():
    pop = [ind((9, 9), 0.5), ind((9, 9)), ind((0, 0), 0.1), ind((1, 1), 0.7)]
    fronts = nondominated_sort(pop)
    assert fronts[0] == [1]
    assert fronts[1:] == [[2], [0], [3]]


def test_empty_population_sorts_to_nothing():
    assert nondominated_sort([]) == []


@st.composite
def populations(draw):
    n = draw(st.integers(1, 50))
    m = draw(st.sampled_from([2, 3]))
    # small integer grid forces many ties and duplicates
    F = draw(st.lists(st.lists(st.integers(0, 6), min_size=m, max_size=m), min_size=n, max_size=n))
    cv = draw(st.lists(st.sampled_from([0.0, 0.0, 0.0, 0.1, 0.5, 1.0]), min_size=n, max_size=n))
    return np.array(F, dtype=float), np.array(cv)


@given(populations())
def test_sort_matches_brute_force(pop):
    F, cv = pop
    assert sort_arrays(F, cv) == brute_fronts(F, cv)


@given(populations())
def test_dominance_matrix_matches_pairwise(pop):
    F, cv = pop
    D = dominance_matrix(F, cv)
    for i, j in itertools.product(range(len(F)), repeat=2):
        assert D[i, j] == brute_dominates(F[i], cv[i], F[j], cv[j])


@given(populations(), st.integers(-1000, 1000), st.data())
def test_dominance_properties(pop, shift, data):
    F, cv = pop
    D = dominance_matrix(F, cv)
    assert not D.diagonal().any()
    assert not (D & D.T).any()
    # integer shifts of an integer grid are exact, so every comparison is preserved
    column = data.draw(st.integers(0, F.shape[1] - 1))
    shifted = F.copy()
    shifted[:, column] += shift
    assert np.array_equal(dominance_matrix(shifted, cv), D)


def test_pareto_dominates_basic():
    assert pareto_dominates((1, 1), (1, 2))
    assert not pareto_dominates((1, 1), (1, 1))


# --------------------------------------------------------------------------- crowding


def test_crowding_three_point_example():
    d = crowding_distance([ind(p) for p in [(0, 1), (0.4, 0.6), (1, 0)]])
    assert np.isinf(d[0]) and np.isinf(d[2])
    assert d[1] == pytest.approx(2.0)


@pytest.mark.parametrize("n", [1, 2])
def test_crowding_small_fronts_infinite(n):
    assert np.all(np.isinf(crowding_distance([ind((i, -i)) for i in range(n)])))


def test_crowding_zero_range_objective_contributes_nothing():
    F = np.array([[0.0, 5.0], [0.5, 5.0], [1.0, 5.0], [0.7, 5.0]])
    d = crowding_distance_array(F)
    assert np.isinf(d[0]) and np.isinf(d[2])
    assert d[1] == pytest.approx(0.7)
    assert d[3] == pytest.approx(0.5)


# --------------------------------------------------------------------------- variation

CFG = VariationConfig()


def test_variation_config_validation():
    with pytest.raises(ValueError):
        VariationConfig(crossover_probability=1.5)
    with pytest.raises(ValueError):
        VariationConfig(mutation_distribution_index=0)
    assert VariationConfig.for_length(5).mutation_probability == pytest.approx(0.2)


@given(st.lists(st.integers(0, 9), min_size=1, max_size=8), st.integers(0, 2**32))
def test_sbx_identical_parents_fixed_point(parent, seed):
    upper = [9] * len(parent)
    c1, c2 = sbx_integer(parent, parent, upper, VariationConfig(crossover_probability=1.0), make_rng(seed))
    assert c1 == c2 == tuple(parent)


def test_sbx_disabled_copies_parents():
    rng = make_rng(3)
    cfg = VariationConfig(crossover_probability=0.0)
    for _ in range(100):
        assert sbx_integer((0, 3, 1), (4, 0, 2), (4, 4, 4), cfg, rng) == ((0, 3, 1), (4, 0, 2))


def test_sbx_children_stay_in_bounds_over_1000_seeds():
    cfg = VariationConfig(crossover_probability=1.0)
    seen = set()
    for seed in range(1000):
        for child in sbx_integer((0, 0, 0), (4, 4, 4), (4, 4, 4), cfg, make_rng(seed)):
            assert len(child) == 3
            assert all(0 <= g <= 4 for g in child)
            seen.update(child)
    assert seen <= {0, 1, 2, 3, 4} and {0, 4} < seen


def test_sbx_length_mismatch():
    with pytest.raises(ValueError):
        sbx_integer((0, 1), (0, 1, 2), (3, 3), CFG, make_rng(0))


def test_mutation_disabled_is_identity():
    cfg = VariationConfig(mutation_probability=0.0)
    rng = make_rng(0)
    for _ in range(100):
        assert polynomial_mutation_integer((3, 0, 7), (9, 9, 9), cfg, rng) == (3, 0, 7)


def test_single_candidate_slot_stays_zero():
    cfg = VariationConfig(mutation_probability=1.0)
    rng = make_rng(0)
    for _ in range(500):
        assert polynomial_mutation_integer((0,), (0,), cfg, rng) == (0,)


def test_mutation_rate_on_mid_range_gene():
    probability = 0.3
    cfg = VariationConfig(mutation_probability=probability)
    rng = make_rng(11)
    trials = 10_000
    changed = sum(polynomial_mutation_integer((49,), (98,), cfg, rng) != (49,) for _ in range(trials))
    rate = changed / trials
    assert abs(rate - probability) <= 0.2 * probability


@given(st.lists(st.integers(0, 30), min_size=1, max_size=10), st.integers(0, 2**32))
def test_variation_outputs_respect_bounds(bounds, seed):
    rng = make_rng(seed)
    p1 = tuple(int(rng.integers(0, b + 1)) for b in bounds)
    p2 = tuple(int(rng.integers(0, b + 1)) for b in bounds)
    cfg = VariationConfig(crossover_probability=1.0, mutation_probability=0.5)
    for child in sbx_integer(p1, p2, bounds, cfg, rng):
        mutated = polynomial_mutation_integer(child, bounds, cfg, rng)
        for g, b in zip(child + mutated, tuple(bounds) * 2):
            assert 0 <= g <= b and isinstance(g, int)


def test_operators_reproducible():
    def draw(seed):
        rng = make_rng(seed)
        c = sbx_integer((0, 5, 9), (9, 2, 0), (9, 9, 9), VariationConfig(crossover_probability=1.0), rng)
        return c, polynomial_mutation_integer(c[0], (9, 9, 9), VariationConfig(mutation_probability=0.5), rng)

    assert draw(5) == draw(5)
    assert make_rng(7).random(5).tolist() == make_rng(7).random(5).tolist()


# --------------------------------------------------------------------------- selection


def test_tournament_single_member():
    only = ind((1, 1))
    assert binary_tournament([only], constrained_dominates, make_rng(0)) is only


def test_tournament_dominator_wins_mixed_pair():
    better, worse = ind((0, 0)), ind((1, 1))
    pop = [better, worse]
    mixed = 0
    for seed in range(200):
        draws = make_rng(seed).integers(2, size=2)
        if draws[0] != draws[1]:
            mixed += 1
            assert binary_tournament(pop, constrained_dominates, make_rng(seed)) is better
    assert mixed > 50


def test_tournament_win_rate_75_percent():
    better, worse = ind((0, 0)), ind((1, 1))
    rng = make_rng(2024)
    wins = sum(binary_tournament([better, worse], constrained_dominates, rng) is better for _ in range(10_000))
    assert abs(wins / 10_000 - 0.75) <= 0.03


def test_tournament_tie_returns_first_drawn():
    a, b = ind((1, 2)), ind((2, 1))
    pop = [a, b]
    for seed in range(50):
        rng_copy = make_rng(seed)
        first = pop[int(rng_copy.integers(2))]
        assert binary_tournament(pop, constrained_dominates, make_rng(seed)) is first


def test_tournament_empty():
    with pytest.raises(ValueError):
        binary_tournament([], constrained_dominates, make_rng(0))


# --------------------------------------------------------------------------- initialization


def small_problem(sizes):
    slots = tuple(ElementType.VM for _ in sizes)
    cands = tuple(
        tuple(CatalogElement(f"v{k}-{i}", ElementType.VM, "amazon", "00EU", 1.0 + i, 99.0, 1.0) for i in range(n))
        for k, n in enumerate(sizes)
    )
    return ProblemInstance(slots, cands, (ObjectiveSpec("cost", "min"), ObjectiveSpec("performance", "max")))


def test_init_population_size_and_determinism():
    problem = small_problem([5, 3, 9])
    pop = init_population(problem, 50, make_rng(1))
    assert len(pop) == 50
    assert all(0 <= g < n for p in pop for g, n in zip(p.genotype, [5, 3, 9]))
    assert pop == init_population(problem, 50, make_rng(1))


def test_init_single_candidates_identical():
    pop = init_population(small_problem([1, 1, 1]), 10, make_rng(0))
    assert {p.genotype for p in pop} == {(0, 0, 0)}


def test_init_requires_positive_size():
    with pytest.raises(ValueError):
        init_population(small_problem([2]), 0, make_rng(0))
