"""Budget planning and selector behavior against independent oracles.

Oracles used here:
- plain (distance, index) sorts for MIN / MDS,
- exhaustive subset enumeration for the k-center optimum,
- from-scratch cut-objective evaluation for graph-cut greedy steps,
- hypergeometric inclusion frequency for the seeded random selector.
"""

import itertools

import numpy as np
import pytest

from conftest import random_bundle
from fselect import (
    BudgetPlan,
    FeatureBundle,
    FeatureMatrix,
    LabelVector,
    SelectorConfig,
    ValidationError,
    ZeroVectorError,
    own_centroid_distances,
    plan_budget,
    run_selector,
    select_graph_cut,
    select_herding,
    select_kcg,
    select_mds,
    select_min,
    select_ram_apl,
    select_random,
)
from fselect.selectors import _graph_cut_greedy_naive


def single_class(values) -> tuple[FeatureMatrix, LabelVector]:
    data = np.asarray(values, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    return FeatureMatrix("x", data), LabelVector([0] * len(data), c=1)


def plan_for(y: LabelVector, budgets: dict[int, int]) -> BudgetPlan:
    per_class = tuple(budgets.get(c, 0) for c in range(y.c))
    return BudgetPlan(p=sum(per_class) / y.n, total=sum(per_class), per_class=per_class)


class TestPlanBudget:
    def test_exact_floors(self):
        y = LabelVector([0] * 6 + [1] * 4, c=2)
        plan = plan_budget(y, 0.5)
        assert plan.total == 5
        assert plan.per_class == (3, 2)

    def test_remainder_tie_goes_to_lower_class(self):
        y = LabelVector([0] * 5 + [1] * 5, c=2)
        plan = plan_budget(y, 0.3)
        assert plan.total == 3
        assert plan.per_class == (2, 1)

    def test_full_rate_selects_everything(self):
        y = LabelVector([0] * 3 + [1] * 7 + [2] * 2, c=3)
        plan = plan_budget(y, 1.0)
        assert plan.total == 12
        assert plan.per_class == (3, 7, 2)

    def test_largest_fraction_first(self):
        # sizes 7 and 3 at p = 0.45: floors (3, 1), fractions (0.15, 0.35).
        y = LabelVector([0] * 7 + [1] * 3, c=2)
        plan = plan_budget(y, 0.45)
        assert plan.total == 5  # round(4.5) half-up
        assert plan.per_class == (3, 2)

    def test_counts_within_class_sizes(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            c = int(rng.integers(2, 6))
            sizes = rng.integers(1, 30, size=c)
            labels = np.repeat(np.arange(c), sizes)
            y = LabelVector(labels, c=c)
            p = float(rng.uniform(0.01, 1.0))
            plan = plan_budget(y, p)
            assert sum(plan.per_class) == plan.total
            assert all(
                0 <= m <= s for m, s in zip(plan.per_class, y.class_sizes())
            )

    def test_rejects_bad_rate(self):
        y = LabelVector([0, 1], c=2)
        with pytest.raises(ValidationError):
            plan_budget(y, 0.0)
        with pytest.raises(ValidationError):
            plan_budget(y, 1.2)


class TestSelectMin:
    def test_smallest_distance_wins(self):
        f, y = single_class([0.0, 1.0, 5.0])  # centroid 2: d = 2, 1, 3
        sel = select_min(f, y, plan_for(y, {0: 1}))
        assert sel.selected.tolist() == [1]

    def test_full_budget_is_whole_class(self):
        f, y = single_class([3.0, 1.0, 2.0])
        sel = select_min(f, y, plan_for(y, {0: 3}))
        assert sel.selected.tolist() == [0, 1, 2]

    def test_matches_sort_oracle_three_classes(self):
        rng = np.random.default_rng(32)
        bundle = random_bundle(rng, n=60, c=3, dims=(4,))
        f, y = bundle.matrices[0], bundle.labels
        plan = plan_budget(y, 0.4)
        sel = select_min(f, y, plan)
        d = own_centroid_distances(f, y)
        expected = []
        for c in range(y.c):
            members = y.class_indices(c)
            ordered = sorted(members, key=lambda j: (d[j], j))
            expected.extend(ordered[: plan.budget_of(c)])
        assert sel.selected.tolist() == sorted(expected)

    def test_nested_budgets(self):
        rng = np.random.default_rng(33)
        bundle = random_bundle(rng, n=40, c=2, dims=(3,))
        f, y = bundle.matrices[0], bundle.labels
        prev: set[int] = set()
        sizes = y.class_sizes()
        for m in range(1, int(sizes.min()) + 1):
            sel = select_min(f, y, plan_for(y, {0: m, 1: m}))
            current = set(sel.selected.tolist())
            assert prev <= current
            prev = current


class TestSelectMds:
    def test_median_sample_itself(self):
        f, y = single_class([0.0, 1.0, 5.0])  # d = 2, 1, 3: median 2
        sel = select_mds(f, y, plan_for(y, {0: 1}))
        assert sel.selected.tolist() == [0]

    def test_even_size_median_between_middles(self):
        # d = 2.5, 1.5, 0.5, 4.5: median 2.0, |d - med| = 0.5, 0.5, 1.5, 2.5
        f, y = single_class([0.0, 1.0, 2.0, 7.0])
        sel = select_mds(f, y, plan_for(y, {0: 2}))
        assert sel.selected.tolist() == [0, 1]

    def test_all_equal_distances_take_lowest_indices(self):
        f, y = single_class([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        sel = select_mds(f, y, plan_for(y, {0: 2}))
        assert sel.selected.tolist() == [0, 1]

    def test_matches_absolute_deviation_oracle(self):
        rng = np.random.default_rng(34)
        bundle = random_bundle(rng, n=50, c=2, dims=(5,))
        f, y = bundle.matrices[0], bundle.labels
        plan = plan_budget(y, 0.5)
        sel = select_mds(f, y, plan)
        d = own_centroid_distances(f, y)
        expected = []
        for c in range(y.c):
            members = y.class_indices(c)
            med = float(np.median(d[members]))
            ordered = sorted(members, key=lambda j: (abs(d[j] - med), j))
            expected.extend(ordered[: plan.budget_of(c)])
        assert sel.selected.tolist() == sorted(expected)


def covering_radius(points: np.ndarray, centers: list[int]) -> float:
    dists = np.linalg.norm(points[:, None, :] - points[centers][None, :, :], axis=2)
    return float(dists.min(axis=1).max())


class TestSelectKcg:
    def test_line_class_covers_extremes(self):
        f, y = single_class([0.0, 1.0, 10.0])
        sel = select_kcg(f, y, plan_for(y, {0: 2}))
        assert set(sel.selected.tolist()) == {0, 2}
        assert covering_radius(f.data.astype(float), [0, 2]) == 1.0

    def test_budget_one_takes_farthest_from_centroid(self):
        f, y = single_class([0.0, 1.0, 10.0])  # centroid 11/3
        sel = select_kcg(f, y, plan_for(y, {0: 1}))
        assert sel.selected.tolist() == [2]

    def test_two_approximation_on_random_class(self):
        rng = np.random.default_rng(35)
        for _ in range(10):
            pts = rng.normal(size=(8, 2))
            f, y = single_class(pts)
            sel = select_kcg(f, y, plan_for(y, {0: 3}))
            greedy_r = covering_radius(pts, sel.selected.tolist())
            best = min(
                covering_radius(pts, list(subset))
                for subset in itertools.combinations(range(8), 3)
            )
            assert greedy_r <= 2.0 * best + 1e-12


class TestSelectHerding:
    def test_first_pick_maximizes_inner_product(self):
        f, y = single_class([0.0, 1.0, 5.0])  # mu = 2: scores 0, 2, 10
        sel = select_herding(f, y, plan_for(y, {0: 1}))
        assert sel.selected.tolist() == [2]

    def test_identical_samples_take_lowest_indices(self):
        f, y = single_class([[2.0, 2.0]] * 4)
        sel = select_herding(f, y, plan_for(y, {0: 2}))
        assert sel.selected.tolist() == [0, 1]

    def test_exhaustive_budget_recovers_class_mean(self):
        rng = np.random.default_rng(36)
        pts = rng.normal(size=(7, 3))
        f, y = single_class(pts)
        sel = select_herding(f, y, plan_for(y, {0: 7}))
        assert sel.selected.tolist() == list(range(7))
        assert np.allclose(pts[sel.selected].mean(axis=0), pts.mean(axis=0))

    def test_matches_manual_update_simulation(self):
        rng = np.random.default_rng(37)
        pts = rng.normal(size=(9, 4))
        f, y = single_class(pts)
        sel = select_herding(f, y, plan_for(y, {0: 4}))
        mu = pts.mean(axis=0)
        w = mu.copy()
        taken: list[int] = []
        for _ in range(4):
            scores = [
                (-np.inf if j in taken else float(pts[j] @ w), -j)
                for j in range(9)
            ]
            best = max(range(9), key=lambda j: scores[j])
            taken.append(best)
            w = w + mu - pts[best]
        assert sorted(taken) == sel.selected.tolist()


def cut_objective(w: np.ndarray, sel: list[int], lam: float) -> float:
    """From-scratch cut objective; independent of the marginal-gain algebra."""
    inside = set(sel)
    cross = sum(
        w[i][j] for i in range(len(w)) if i not in inside for j in inside
    )
    pen = sum(w[a][b] for a in inside for b in inside if a < b)
    return cross - lam * pen


def greedy_cut_oracle(w: np.ndarray, m: int, lam: float) -> list[int]:
    chosen: list[int] = []
    for _ in range(m):
        best, best_gain = -1, -np.inf
        for v in range(len(w)):
            if v in chosen:
                continue
            gain = cut_objective(w, chosen + [v], lam) - cut_objective(
                w, chosen, lam
            )
            if gain > best_gain:
                best, best_gain = v, gain
        chosen.append(best)
    return chosen


def cosine_cut_weights(pts: np.ndarray) -> np.ndarray:
    unit = pts / np.linalg.norm(pts, axis=1)[:, None]
    w = (1.0 + unit @ unit.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return w


class TestSelectGraphCut:
    def test_identical_pair_takes_index_zero(self):
        f, y = single_class([[1.0, 1.0], [1.0, 1.0]])
        sel = select_graph_cut(f, y, plan_for(y, {0: 1}))
        assert sel.selected.tolist() == [0]

    def test_zero_vector_rejected(self):
        f, y = single_class([[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ZeroVectorError):
            select_graph_cut(f, y, plan_for(y, {0: 1}))

    def test_lambda_zero_budget_one_is_row_sum_argmax(self):
        rng = np.random.default_rng(38)
        pts = rng.normal(size=(6, 3))
        f, y = single_class(pts)
        sel = select_graph_cut(f, y, plan_for(y, {0: 1}), lambda_=0.0)
        w = cosine_cut_weights(pts)
        assert sel.selected.tolist() == [int(np.argmax(w.sum(axis=1)))]

    def test_greedy_matches_objective_oracle(self):
        rng = np.random.default_rng(39)
        for lam in (0.0, 0.5, 1.0, 2.0):
            pts = rng.normal(size=(7, 3))
            f, y = single_class(pts)
            sel = select_graph_cut(f, y, plan_for(y, {0: 3}), lambda_=lam)
            oracle = greedy_cut_oracle(cosine_cut_weights(pts), 3, lam)
            assert sel.selected.tolist() == sorted(oracle)

    def test_lazy_equals_naive(self):
        rng = np.random.default_rng(40)
        for _ in range(20):
            s = int(rng.integers(2, 11))
            m = int(rng.integers(1, s + 1))
            lam = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
            pts = rng.normal(size=(s, 3))
            f, y = single_class(pts)
            lazy = select_graph_cut(
                f, y, plan_for(y, {0: m}), lambda_=lam, accelerated=True
            )
            naive = select_graph_cut(
                f, y, plan_for(y, {0: m}), lambda_=lam, accelerated=False
            )
            assert lazy.selected.tolist() == naive.selected.tolist()

    def test_lazy_equals_naive_with_exact_ties(self):
        # Duplicated rows force exact gain ties; both paths must agree.
        pts = np.array(
            [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 1.0]]
        )
        f, y = single_class(pts)
        w = cosine_cut_weights(pts)
        for m in (1, 2, 3, 4):
            lazy = select_graph_cut(f, y, plan_for(y, {0: m}), lambda_=1.0)
            naive_order = _graph_cut_greedy_naive(w, m, 1.0)
            assert lazy.selected.tolist() == sorted(naive_order)


class TestSelectRandom:
    def test_deterministic_per_seed(self):
        y = LabelVector([0] * 20 + [1] * 10, c=2)
        plan = plan_budget(y, 0.5)
        a = select_random(y, plan, seed=99)
        b = select_random(y, plan, seed=99)
        assert a.selected.tolist() == b.selected.tolist()
        c = select_random(y, plan, seed=100)
        assert a.selected.tolist() != c.selected.tolist()

    def test_full_budget_is_whole_population(self):
        y = LabelVector([0] * 4 + [1] * 4, c=2)
        sel = select_random(y, plan_budget(y, 1.0), seed=1)
        assert sel.selected.tolist() == list(range(8))

    def test_inclusion_frequency_matches_hypergeometric(self):
        y = LabelVector([0] * 10 + [1], c=2)
        plan = plan_for(y, {0: 5, 1: 0})
        counts = np.zeros(10)
        trials = 10_000
        for t in range(trials):
            sel = select_random(y, plan, seed=t)
            counts[sel.selected] += 1
        freq = counts / trials
        assert np.all(np.abs(freq - 0.5) < 0.02)


class TestSelectRamApl:
    def test_chain_fixture_selection(self, chain_bundle):
        plan = plan_budget(chain_bundle.labels, 0.5)
        cfg = SelectorConfig(method="ram_apl")
        sel = select_ram_apl(chain_bundle, plan, cfg)
        assert sel.selected.tolist() == [0, 1, 3]
        assert sel.per_class_budget == {0: 2, 1: 1}

    def test_tied_scores_take_lower_index(self, chain_bundle):
        # Class 1 of the fixture has three identical fused scores.
        plan = plan_for(chain_bundle.labels, {0: 0, 1: 2})
        sel = select_ram_apl(chain_bundle, plan, SelectorConfig(method="ram_apl"))
        assert sel.selected.tolist() == [3, 4]

    def test_reduces_to_min_when_apl_saturated(self):
        # Separable blobs: every pseudo-label is correct, so the fused score
        # is a positive multiple of the rank mean and the ordering matches
        # plain own-centroid distances.
        rng = np.random.default_rng(41)
        shift = np.array([[0.0] * 4, [50.0] * 4])
        labels = np.array([0] * 15 + [1] * 15)
        data = shift[labels] + rng.normal(scale=0.5, size=(30, 4))
        f = FeatureMatrix("a", data)
        y = LabelVector(labels, c=2)
        bundle = FeatureBundle((f,), y)
        plan = plan_budget(y, 0.4)
        ours = select_ram_apl(bundle, plan, SelectorConfig(method="ram_apl"))
        base = select_min(f, y, plan)
        assert ours.selected.tolist() == base.selected.tolist()


class TestRunSelector:
    def test_dispatches_each_method(self):
        rng = np.random.default_rng(42)
        bundle = random_bundle(rng, n=40, c=2, dims=(4, 6))
        plan = plan_budget(bundle.labels, 0.3)
        for method in ("ram_apl", "min", "mds", "kcg", "herding", "graph_cut"):
            sel = run_selector(bundle, plan, SelectorConfig(method=method))
            assert sel.method == method
            assert sel.selected.size == plan.total
        sel = run_selector(bundle, plan, SelectorConfig(method="random", seed=3))
        assert sel.selected.size == plan.total

    def test_primary_matrix_designation(self):
        rng = np.random.default_rng(43)
        bundle = random_bundle(rng, n=30, c=2, dims=(4, 4))
        plan = plan_budget(bundle.labels, 0.5)
        by_id = run_selector(
            bundle, plan, SelectorConfig(method="min", primary_matrix="m1")
        )
        direct = select_min(bundle.matrices[1], bundle.labels, plan)
        assert by_id.selected.tolist() == direct.selected.tolist()

    def test_thread_count_does_not_change_result(self):
        rng = np.random.default_rng(44)
        bundle = random_bundle(rng, n=60, c=4, dims=(5, 3))
        plan = plan_budget(bundle.labels, 0.4)
        for method in ("ram_apl", "min", "mds", "kcg", "herding", "graph_cut"):
            one = run_selector(bundle, plan, SelectorConfig(method=method, threads=1))
            four = run_selector(bundle, plan, SelectorConfig(method=method, threads=4))
            assert one.selected.tolist() == four.selected.tolist()

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SelectorConfig(method="nope")
        with pytest.raises(ValidationError):
            SelectorConfig(method="random")  # seed required
        with pytest.raises(ValidationError):
            SelectorConfig(method="graph_cut", lambda_=-1.0)
