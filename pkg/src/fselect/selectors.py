"""Budget planning and the selection strategies.

Every selector works class by class against a :class:`BudgetPlan`: the
global budget is apportioned to classes first, then each class is selected
independently.  All tie-breaking is by ascending sample index, so results
are deterministic across runs and across thread counts (per-class tasks
are independent; the merge is ordered by class id).

Strategies:

* ``ram_apl``   - fused rank-mean / pseudo-label score over all extractors
* ``min``       - smallest own-centroid distance
* ``mds``       - own-centroid distance nearest the class median
* ``kcg``       - greedy k-center (max-min distance coverage)
* ``herding``   - greedy mean matching via the classic weight update
* ``graph_cut`` - greedy maximization of a cut-style submodular objective
* ``random``    - seeded uniform sampling without replacement

The baselines consume exactly one designated feature matrix; ``ram_apl``
consumes the whole bundle.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError, ZeroVectorError
from .geometry import class_centroids, own_centroid_distances
from .io import FeatureBundle, FeatureMatrix, LabelVector, SelectionResult
from .scoring import FusionWeights, apl, ram, ram_apl_score

METHODS = ("ram_apl", "random", "min", "mds", "kcg", "herding", "graph_cut")


@dataclass(frozen=True)
class BudgetPlan:
    """Global budget round(p * n) apportioned per class."""

    p: float
    total: int
    per_class: tuple[int, ...]

    def budget_of(self, class_id: int) -> int:
        return self.per_class[class_id]


@dataclass
class SelectorConfig:
    """Parameters for one selection run; unused fields are ignored."""

    method: str
    seed: int | None = None
    lambda_: float = 1.0
    alpha: float = 0.2
    beta: float = 1.0
    equal_weights: bool = False
    primary_matrix: str | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )
        if self.lambda_ < 0:
            raise ValidationError(f"lambda must be >= 0, got {self.lambda_}")
        if self.method == "random" and self.seed is None:
            raise ValidationError("method 'random' requires a seed")
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")


def plan_budget(y: LabelVector, p: float) -> BudgetPlan:
    """Class-balanced budget: floors plus largest-fractional-part remainders.

    The global budget is round(p * n), half-up.  Each class gets
    floor(p * size) immediately; the remainder is handed out one unit at a
    time to the classes with the largest fractional part p * size - floor,
    ties by smaller class id, skipping classes already exhausted.
    """
    if not (0.0 < p <= 1.0):
        raise ValidationError(f"sampling rate must be in (0, 1], got {p}")
    sizes = y.class_sizes()
    total = math.floor(p * y.n + 0.5)
    floors = [math.floor(p * int(s)) for s in sizes]
    fracs = [p * int(s) - f for s, f in zip(sizes, floors)]
    counts = list(floors)
    remainder = total - sum(floors)
    if remainder < 0:
        raise ValidationError(f"budget {total} below per-class floors")
    order = sorted(range(y.c), key=lambda cid: (-fracs[cid], cid))
    for cid in order:
        if remainder == 0:
            break
        if counts[cid] < sizes[cid]:
            counts[cid] += 1
            remainder -= 1
    if remainder != 0:
        raise ValidationError(f"budget {total} exceeds population {y.n}")
    return BudgetPlan(p=p, total=total, per_class=tuple(counts))


def _smallest_by_key(members: np.ndarray, key: np.ndarray, m: int) -> np.ndarray:
    """First m members by ascending key, ties by ascending index."""
    order = members[np.argsort(key, kind="stable")]
    return order[:m]


def _run_per_class(
    pick: Callable[[int], np.ndarray],
    y: LabelVector,
    threads: int = 1,
) -> np.ndarray:
    """Evaluate a per-class picker over all classes and merge deterministically."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_class = list(pool.map(pick, range(y.c)))
    else:
        per_class = [pick(c) for c in range(y.c)]
    if per_class:
        merged = np.concatenate(per_class)
    else:
        merged = np.empty(0, dtype=np.int64)
    return np.sort(merged.astype(np.int64))


def _result(
    method: str,
    selected: np.ndarray,
    plan: BudgetPlan,
    y: LabelVector,
    scores: np.ndarray | None = None,
) -> SelectionResult:
    per_class = {cid: int(m) for cid, m in enumerate(plan.per_class)}
    sizes = y.class_sizes()
    for cid, m in per_class.items():
        if m > sizes[cid]:
            raise ValidationError(
                f"budget {m} exceeds size {sizes[cid]} of class {cid}"
            )
    return SelectionResult(
        selected=selected,
        per_class_budget=per_class,
        p=plan.p,
        method=method,
        n=y.n,
        scores=scores,
    )


def _select_by_scores(
    method: str,
    scores: np.ndarray,
    y: LabelVector,
    plan: BudgetPlan,
    threads: int = 1,
) -> SelectionResult:
    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        return _smallest_by_key(members, scores[members], plan.budget_of(c))

    selected = _run_per_class(pick, y, threads)
    return _result(method, selected, plan, y, scores=scores)


def select_ram_apl(
    bundle: FeatureBundle, plan: BudgetPlan, cfg: SelectorConfig
) -> SelectionResult:
    """Fused-score selection over all extractors; smallest scores win."""
    if cfg.equal_weights:
        w = FusionWeights.equal()
    else:
        w = FusionWeights.schedule(cfg.alpha, cfg.beta, plan.p)
    scores = ram_apl_score(ram(bundle), apl(bundle), w)
    return _select_by_scores(
        "ram_apl", scores, bundle.labels, plan, threads=cfg.threads
    )


def select_min(
    f: FeatureMatrix, y: LabelVector, plan: BudgetPlan, threads: int = 1
) -> SelectionResult:
    """Per class, the samples closest to their class centroid."""
    d_own = own_centroid_distances(f, y)
    return _select_by_scores("min", d_own, y, plan, threads=threads)


def select_mds(
    f: FeatureMatrix, y: LabelVector, plan: BudgetPlan, threads: int = 1
) -> SelectionResult:
    """Per class, the samples whose centroid distance is nearest the class median."""
    d_own = own_centroid_distances(f, y)

    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        med = np.median(d_own[members])
        return _smallest_by_key(
            members, np.abs(d_own[members] - med), plan.budget_of(c)
        )

    selected = _run_per_class(pick, y, threads)
    return _result("mds", selected, plan, y, scores=d_own)


def select_kcg(
    f: FeatureMatrix, y: LabelVector, plan: BudgetPlan, threads: int = 1
) -> SelectionResult:
    """Greedy k-center per class.

    The first center is the sample farthest from the class centroid; each
    following center is the sample farthest from its nearest chosen center.
    Ties go to the smaller sample index.
    """
    data = f.data.astype(np.float64, copy=False)
    cs = class_centroids(f, y)

    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        m = plan.budget_of(c)
        if m == 0:
            return np.empty(0, dtype=np.int64)
        x = data[members]
        d0 = np.linalg.norm(x - cs.centroids[c], axis=1)
        chosen = [int(np.argmax(d0))]
        mind = np.linalg.norm(x - x[chosen[0]], axis=1)
        while len(chosen) < m:
            gaps = mind.copy()
            gaps[chosen] = -np.inf
            nxt = int(np.argmax(gaps))
            chosen.append(nxt)
            mind = np.minimum(mind, np.linalg.norm(x - x[nxt], axis=1))
        return members[np.asarray(chosen, dtype=np.int64)]

    selected = _run_per_class(pick, y, threads)
    return _result("kcg", selected, plan, y)


def select_herding(
    f: FeatureMatrix, y: LabelVector, plan: BudgetPlan, threads: int = 1
) -> SelectionResult:
    """Classic herding per class.

    Starting from w = class mean, repeatedly pick the unselected sample
    maximizing <w, x> (ties by index) and update w <- w + mean - x, driving
    the selected subset's mean toward the class mean.
    """
    data = f.data.astype(np.float64, copy=False)
    cs = class_centroids(f, y)

    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        m = plan.budget_of(c)
        x = data[members]
        mu = cs.centroids[c]
        w = mu.copy()
        taken = np.zeros(members.size, dtype=bool)
        chosen = []
        for _ in range(m):
            scores = x @ w
            scores[taken] = -np.inf
            nxt = int(np.argmax(scores))
            chosen.append(nxt)
            taken[nxt] = True
            w = w + mu - x[nxt]
        return members[np.asarray(chosen, dtype=np.int64)]

    selected = _run_per_class(pick, y, threads)
    return _result("herding", selected, plan, y)


def _cosine_similarity_matrix(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        bad = np.flatnonzero(norms == 0.0).tolist()
        raise ZeroVectorError(f"zero-norm feature rows {bad}: cosine undefined")
    unit = x / norms[:, None]
    sim = unit @ unit.T
    return np.clip(sim, -1.0, 1.0)


def _graph_cut_weights(x: np.ndarray) -> np.ndarray:
    """Nonnegative similarity (1 + cos)/2 with a zeroed diagonal."""
    w = (1.0 + _cosine_similarity_matrix(x)) / 2.0
    np.fill_diagonal(w, 0.0)
    return w


def _graph_cut_greedy_naive(
    w: np.ndarray, m: int, lam: float
) -> list[int]:
    """Per-step argmax of the marginal gain total[v] - (2 + lam) * cut[v]."""
    s = w.shape[0]
    total = w.sum(axis=1)
    cut = np.zeros(s, dtype=np.float64)
    taken = np.zeros(s, dtype=bool)
    chosen: list[int] = []
    for _ in range(m):
        gains = total - (2.0 + lam) * cut
        gains[taken] = -np.inf
        nxt = int(np.argmax(gains))
        chosen.append(nxt)
        taken[nxt] = True
        cut += w[:, nxt]
    return chosen


def _graph_cut_greedy_lazy(w: np.ndarray, m: int, lam: float) -> list[int]:
    """Lazy-evaluation greedy; returns the identical set to the naive loop.

    Valid because marginal gains only shrink as the cut term grows, so a
    popped entry whose recomputed gain still beats the heap top is a true
    argmax.  Heap entries carry the index so exact ties pop in ascending
    index order, matching the naive tie rule.
    """
    s = w.shape[0]
    total = w.sum(axis=1)
    cut = np.zeros(s, dtype=np.float64)
    chosen: list[int] = []
    step = 0
    heap = [(-total[v], v, step) for v in range(s)]
    heapq.heapify(heap)
    while len(chosen) < m:
        neg_gain, v, stamp = heapq.heappop(heap)
        if stamp == step:
            chosen.append(v)
            cut += w[:, v]
            step += 1
        else:
            gain = total[v] - (2.0 + lam) * cut[v]
            heapq.heappush(heap, (-gain, v, step))
    return chosen


def select_graph_cut(
    f: FeatureMatrix,
    y: LabelVector,
    plan: BudgetPlan,
    lambda_: float = 1.0,
    threads: int = 1,
    accelerated: bool = True,
) -> SelectionResult:
    """Greedy cut-objective maximization per class.

    Pairwise similarity is (1 + cos)/2 in [0, 1].  The objective rewards
    similarity between selected and unselected samples and penalizes
    within-selection similarity with weight ``lambda_``.
    """
    if lambda_ < 0:
        raise ValidationError(f"lambda must be >= 0, got {lambda_}")
    data = f.data.astype(np.float64, copy=False)
    greedy = _graph_cut_greedy_lazy if accelerated else _graph_cut_greedy_naive

    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        w = _graph_cut_weights(data[members])
        chosen = greedy(w, plan.budget_of(c), lambda_)
        return members[np.asarray(chosen, dtype=np.int64)]

    selected = _run_per_class(pick, y, threads)
    return _result("graph_cut", selected, plan, y)


def select_random(
    y: LabelVector, plan: BudgetPlan, seed: int, threads: int = 1
) -> SelectionResult:
    """Uniform sampling without replacement, seeded per (seed, class id)."""

    def pick(c: int) -> np.ndarray:
        members = y.class_indices(c)
        rng = np.random.default_rng([seed, c])
        return rng.choice(members, size=plan.budget_of(c), replace=False)

    selected = _run_per_class(pick, y, threads)
    return _result("random", selected, plan, y)


def run_selector(
    bundle: FeatureBundle, plan: BudgetPlan, cfg: SelectorConfig
) -> SelectionResult:
    """Dispatch a configured selection over a bundle.

    Baselines run on the matrix named by ``cfg.primary_matrix`` (the
    bundle's first matrix when unset); ``ram_apl`` uses all matrices.
    """
    if cfg.method == "ram_apl":
        return select_ram_apl(bundle, plan, cfg)
    y = bundle.labels
    if cfg.primary_matrix is None:
        f = bundle.matrices[0]
    else:
        f = bundle.matrix(cfg.primary_matrix)
    if cfg.method == "random":
        assert cfg.seed is not None
        return select_random(y, plan, cfg.seed, threads=cfg.threads)
    if cfg.method == "min":
        return select_min(f, y, plan, threads=cfg.threads)
    if cfg.method == "mds":
        return select_mds(f, y, plan, threads=cfg.threads)
    if cfg.method == "kcg":
        return select_kcg(f, y, plan, threads=cfg.threads)
    if cfg.method == "herding":
        return select_herding(f, y, plan, threads=cfg.threads)
    if cfg.method == "graph_cut":
        return select_graph_cut(
            f, y, plan, lambda_=cfg.lambda_, threads=cfg.threads
        )
    raise ValidationError(f"unknown method {cfg.method!r}")
