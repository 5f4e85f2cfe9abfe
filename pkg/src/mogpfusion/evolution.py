"""Multi-objective multigene GP: operators, Pareto sorting and the main loop.

Both objectives are minimised: training fitness ``1 - R^2`` and model
expressional complexity.  Survivors are chosen NSGA-II style, by
non-dominated rank with crowding distance as tie-break, from the union of
parents and offspring.  A separate archive keeps every non-dominated model
seen during the run.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dataset import Dataset
from .expr import FunctionSet, Node, eval_tree, nodes_with_depth, random_tree, replace_node
from .multigene import (
    MultiGeneModel,
    ObjectivePair,
    _fit_columns,
    _gene_sum,
    _objectives_from_prediction,
    predict,
    r_squared,
)

__all__ = [
    "EvolutionConfig",
    "Individual",
    "ParetoArchive",
    "EvolutionResult",
    "dominates",
    "non_dominated_sort",
    "crowding_distance",
    "assign_ranks",
    "tournament_select",
    "low_level_crossover",
    "high_level_crossover",
    "mutate",
    "init_population",
    "evolve",
    "select_final",
    "merge_archives",
]


@dataclass(frozen=True)
class EvolutionConfig:
    """Run parameters; defaults are the standard settings for these operators."""

    population_size: int = 100
    generations: int = 100
    gmax: int = 3
    dmax: int = 5
    tournament_size: int = 2
    elite_fraction: float = 0.05
    crossover_prob: float = 0.85
    mutation_prob: float = 0.30
    high_level_crossover_fraction: float = 0.20
    function_set: FunctionSet = field(default_factory=FunctionSet)
    seed: int = 0
    holdout_fraction: float = 0.0

    def __post_init__(self):
        if isinstance(self.function_set, str):
            object.__setattr__(self, "function_set", FunctionSet.parse(self.function_set))
        elif not isinstance(self.function_set, FunctionSet):
            object.__setattr__(self, "function_set", FunctionSet(tuple(self.function_set)))
        for name in ("elite_fraction", "crossover_prob", "mutation_prob",
                     "high_level_crossover_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.holdout_fraction < 1.0:
            raise ValueError(f"holdout_fraction must lie in [0, 1), got {self.holdout_fraction}")
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.gmax < 1 or self.dmax < 1:
            raise ValueError("gmax and dmax must be >= 1")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    def event_probabilities(self) -> np.ndarray:
        """Normalised (crossover, mutation, reproduction) event weights."""
        w = np.array([self.crossover_prob, self.mutation_prob,
                      max(0.0, 1.0 - self.crossover_prob - self.mutation_prob)])
        return w / w.sum()


@dataclass(eq=False)
class Individual:
    model: MultiGeneModel
    objectives: ObjectivePair
    pareto_rank: int = 0
    crowding: float = 0.0

    @property
    def genes(self) -> tuple:
        return self.model.genes


# ---------------------------------------------------------------------------
# Pareto machinery


def _as_points(objectives) -> np.ndarray:
    pts = [o.as_tuple() if isinstance(o, ObjectivePair) else tuple(o) for o in objectives]
    return np.asarray(pts, dtype=float).reshape(len(pts), 2)


def dominates(a, b) -> bool:
    """True when ``a`` is no worse than ``b`` in both objectives and better in one."""
    a = a.as_tuple() if isinstance(a, ObjectivePair) else a
    b = b.as_tuple() if isinstance(b, ObjectivePair) else b
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def non_dominated_sort(objectives) -> list:
    """Partition points into successive non-dominated fronts.

    Specialised to two objectives: after a lexicographic sort every
    dominator of a point precedes it, and each front is summarised by its
    best second objective, so a point's front is found by bisection.
    ``O(n log n)``.

    Returns
    -------
    list of list of int
        Fronts in order; indices ascending within each front.
    """
    pts = _as_points(objectives)
    n = len(pts)
    if n == 0:
        return []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    fronts = []
    best = []  # per front: (lowest 2nd objective, 1st objective where first reached)
    for i in order:
        f, c = pts[i]
        lo, hi = 0, len(fronts)
        while lo < hi:
            mid = (lo + hi) // 2
            bc, bf = best[mid]
            if bc < c or (bc == c and bf < f):
                lo = mid + 1
            else:
                hi = mid
        if lo == len(fronts):
            fronts.append([])
            best.append((c, f))
        elif c < best[lo][0]:
            best[lo] = (c, f)
        fronts[lo].append(int(i))
    return [sorted(fr) for fr in fronts]


def crowding_distance(front_objectives) -> np.ndarray:
    """NSGA-II crowding distance within one front.

    Boundary points of each objective get ``inf``; objectives with zero
    range contribute nothing.
    """
    pts = _as_points(front_objectives)
    n = len(pts)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for m in range(pts.shape[1]):
        order = np.argsort(pts[:, m], kind="stable")
        v = pts[order, m]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = v[-1] - v[0]
        if not (span > 0 and np.isfinite(span)):
            continue
        dist[order[1:-1]] += (v[2:] - v[:-2]) / span
    return np.nan_to_num(dist, nan=0.0, posinf=np.inf)


def assign_ranks(population: Sequence[Individual]) -> list:
    """Set ``pareto_rank`` (1 = non-dominated) and ``crowding`` in place."""
    fronts = non_dominated_sort([ind.objectives for ind in population])
    for k, fr in enumerate(fronts, 1):
        cd = crowding_distance([population[i].objectives for i in fr])
        for i, d in zip(fr, cd):
            population[i].pareto_rank = k
            population[i].crowding = float(d)
    return fronts


def _survivors(merged: list, size: int) -> list:
    fronts = assign_ranks(merged)
    out = []
    for fr in fronts:
        if len(out) + len(fr) <= size:
            out.extend(merged[i] for i in fr)
            continue
        rest = sorted(fr, key=lambda i: -merged[i].crowding)
        out.extend(merged[i] for i in rest[: size - len(out)])
        break
    return out


def tournament_select(population: Sequence[Individual], rng: np.random.Generator,
                      tournament_size: int = 2) -> Individual:
    """Draw contestants with replacement; lowest rank, then widest crowding wins.

    Remaining ties are broken uniformly at random.
    """
    picks = rng.integers(len(population), size=tournament_size)
    key = [(population[i].pareto_rank, -population[i].crowding) for i in picks]
    best = min(key)
    tied = [i for i, k in zip(picks, key) if k == best]
    if len(tied) == 1:
        return population[tied[0]]
    return population[tied[int(rng.integers(len(tied)))]]


# ---------------------------------------------------------------------------
# Genetic operators on gene tuples.  Refitting happens in the caller so all
# random choices of a generation are made before any evaluation.


def _genes(x):
    return tuple(x.genes) if hasattr(x, "genes") else tuple(x)


def low_level_crossover(p1, p2, rng: np.random.Generator, dmax: int, max_tries: int = 10):
    """Subtree crossover between one randomly chosen gene of each parent.

    Offspring breaking the depth limit are rejected and the choice redrawn;
    after ``max_tries`` failures the parents are returned unchanged.
    """
    g1, g2 = _genes(p1), _genes(p2)
    for _ in range(max_tries):
        i = int(rng.integers(len(g1)))
        j = int(rng.integers(len(g2)))
        a, b = g1[i], g2[j]
        na, nb = nodes_with_depth(a), nodes_with_depth(b)
        pa = int(rng.integers(len(na)))
        pb = int(rng.integers(len(nb)))
        new_a = replace_node(a, pa, nb[pb][0])
        new_b = replace_node(b, pb, na[pa][0])
        if new_a.depth <= dmax and new_b.depth <= dmax:
            return g1[:i] + (new_a,) + g1[i + 1:], g2[:j] + (new_b,) + g2[j + 1:]
    return g1, g2


def _nonempty_mask(rng, n):
    while True:
        mask = rng.random(n) < 0.5
        if mask.any():
            return mask


def _trim(genes, rng, gmax):
    if len(genes) <= gmax:
        return tuple(genes)
    drop = set(rng.choice(len(genes), size=len(genes) - gmax, replace=False).tolist())
    return tuple(g for k, g in enumerate(genes) if k not in drop)


def high_level_crossover(p1, p2, rng: np.random.Generator, gmax: int):
    """Swap random non-empty subsets of whole genes between two parents.

    Each gene joins the exchanged subset with probability 1/2.  Children
    longer than ``gmax`` lose randomly chosen genes until exactly ``gmax``
    remain.
    """
    g1, g2 = _genes(p1), _genes(p2)
    m1 = _nonempty_mask(rng, len(g1))
    m2 = _nonempty_mask(rng, len(g2))
    keep1 = [g for g, m in zip(g1, m1) if not m]
    keep2 = [g for g, m in zip(g2, m2) if not m]
    give1 = [g for g, m in zip(g1, m1) if m]
    give2 = [g for g, m in zip(g2, m2) if m]
    c1 = _trim(keep1 + give2, rng, gmax)
    c2 = _trim(keep2 + give1, rng, gmax)
    return c1, c2


def mutate(p, rng: np.random.Generator, config: EvolutionConfig, n_features: int):
    """Replace a random node of one random gene by a freshly grown subtree.

    The new subtree's depth budget is whatever keeps the gene within
    ``config.dmax``.
    """
    genes = _genes(p)
    i = int(rng.integers(len(genes)))
    nodes = nodes_with_depth(genes[i])
    pos = int(rng.integers(len(nodes)))
    budget = config.dmax - nodes[pos][1] + 1
    sub = random_tree(rng, n_features, config.function_set, max(budget, 1), "grow")
    new = replace_node(genes[i], pos, sub)
    if new.depth > config.dmax:
        return genes
    return genes[:i] + (new,) + genes[i + 1:]


# ---------------------------------------------------------------------------
# Evaluation


class _Evaluator:
    """Fits and scores gene tuples on a fixed dataset, memoising gene outputs."""

    def __init__(self, data: Dataset, cache_limit: int = 50_000):
        if data.y is None:
            raise ValueError("dataset has no target column")
        self.data = data
        self.cache = {}
        self.cache_limit = cache_limit

    def column(self, gene: Node) -> np.ndarray:
        col = self.cache.get(gene)
        if col is None:
            if len(self.cache) >= self.cache_limit:
                self.cache.clear()
            col = eval_tree(gene, self.data)
            col.setflags(write=False)
            self.cache[gene] = col
        return col

    def __call__(self, genes) -> Individual:
        genes = tuple(genes)
        cols = [self.column(g) for g in genes]
        data = self.data
        model = _fit_columns(genes, cols, data.y, data.schema)
        with np.errstate(over="ignore", invalid="ignore"):
            pred = _gene_sum(model, cols, data.n_samples)
        return Individual(model, _objectives_from_prediction(model, pred, data.y))


def init_population(config: EvolutionConfig, data: Dataset, rng: np.random.Generator,
                    evaluator: Optional[_Evaluator] = None) -> list:
    """Random initial population, ramped half-and-half over depths 2..dmax.

    Each individual gets a uniformly drawn gene count in ``1..gmax``; each
    gene a uniformly drawn depth limit and a random grow/full method.
    """
    evaluator = evaluator or _Evaluator(data)
    lo = min(2, config.dmax)
    population = []
    gene_sets = []
    for _ in range(config.population_size):
        n_genes = int(rng.integers(1, config.gmax + 1))
        genes = []
        for _ in range(n_genes):
            d = int(rng.integers(lo, config.dmax + 1))
            method = "full" if rng.random() < 0.5 else "grow"
            genes.append(random_tree(rng, data.n_features, config.function_set, d, method))
        gene_sets.append(tuple(genes))
    for genes in gene_sets:
        population.append(evaluator(genes))
    return population


# ---------------------------------------------------------------------------
# Archive and main loop


@dataclass
class ParetoArchive:
    """Non-dominated models seen so far, one per distinct objective pair.

    ``history`` holds ``(generation, best_fitness, front_size)`` rows.
    """

    members: list = field(default_factory=list)
    history: list = field(default_factory=list)

    def update(self, individuals) -> None:
        pool = list(self.members)
        seen = {m.objectives.as_tuple() for m in pool}
        for ind in individuals:
            key = ind.objectives.as_tuple()
            if not math.isfinite(key[0]) or key in seen:
                continue
            seen.add(key)
            pool.append(dataclasses.replace(ind, pareto_rank=1, crowding=0.0))
        if not pool:
            return
        front = non_dominated_sort([m.objectives for m in pool])[0]
        members = [pool[i] for i in front]
        members.sort(key=lambda m: (m.objectives.complexity, m.objectives.fitness))
        cd = crowding_distance([m.objectives for m in members])
        for m, d in zip(members, cd):
            m.crowding = float(d)
        self.members = members

    def record(self, generation: int) -> None:
        best = min((m.objectives.fitness for m in self.members), default=math.inf)
        self.history.append((generation, best, len(self.members)))

    @property
    def best_fitness(self) -> float:
        return min((m.objectives.fitness for m in self.members), default=math.inf)


def merge_archives(archives: Sequence[ParetoArchive]) -> ParetoArchive:
    merged = ParetoArchive()
    for a in archives:
        merged.update(a.members)
    return merged


@dataclass
class EvolutionResult:
    archive: ParetoArchive
    population: list
    history: list
    train: Dataset
    holdout: Optional[Dataset] = None


def _split(data, fraction, rng, min_train):
    n = data.n_samples
    n_hold = int(round(fraction * n))
    if n_hold == 0:
        return data, None
    if n_hold < 2 or n - n_hold < min_train:
        raise ValueError(f"holdout_fraction={fraction} leaves too few samples on one side")
    perm = rng.permutation(n)
    return data.subset(np.sort(perm[n_hold:])), data.subset(np.sort(perm[:n_hold]))


def _check_data(data, config):
    if data.y is None:
        raise ValueError("dataset has no target column")
    if data.n_samples < config.gmax + 2:
        raise ValueError(f"need at least gmax + 2 = {config.gmax + 2} samples, got {data.n_samples}")
    if not np.ptp(data.y) > 0:
        raise ValueError("target has zero variance")


def evolve(data: Dataset, config: EvolutionConfig = EvolutionConfig(),
           callback: Optional[Callable] = None) -> EvolutionResult:
    """Run the multi-objective multigene GP.

    Parameters
    ----------
    data : Dataset
        Training table with a target column.
    config : EvolutionConfig
    callback : callable, optional
        Called as ``callback(generation, population, offspring)`` after the
        initial population (generation 0, offspring = population) and after
        every generation.

    Returns
    -------
    EvolutionResult
        Archive of non-dominated models, final population, per-generation
        history, and the train/holdout datasets actually used.
    """
    _check_data(data, config)
    rng = np.random.default_rng(config.seed)
    train, holdout = _split(data, config.holdout_fraction, rng, config.gmax + 2)
    _check_data(train, config)
    evaluate = _Evaluator(train)
    N = config.population_size

    population = init_population(config, train, rng, evaluate)
    assign_ranks(population)
    archive = ParetoArchive()
    archive.update(population)
    archive.record(0)
    if callback is not None:
        callback(0, population, population)

    n_elite = min(N, math.ceil(config.elite_fraction * N))
    cum = np.cumsum(config.event_probabilities())
    for gen in range(1, config.generations + 1):
        ranked = sorted(population, key=lambda ind: (ind.pareto_rank, -ind.crowding))
        elites = [dataclasses.replace(ind) for ind in ranked[:n_elite]]

        children = []
        need = N - n_elite
        while len(children) < need:
            u = rng.random()
            if u < cum[0]:
                p1 = tournament_select(population, rng, config.tournament_size)
                p2 = tournament_select(population, rng, config.tournament_size)
                if rng.random() < config.high_level_crossover_fraction:
                    children.extend(high_level_crossover(p1, p2, rng, config.gmax))
                else:
                    children.extend(low_level_crossover(p1, p2, rng, config.dmax))
            elif u < cum[1]:
                p = tournament_select(population, rng, config.tournament_size)
                children.append(mutate(p, rng, config, train.n_features))
            else:
                children.append(tournament_select(population, rng, config.tournament_size).genes)
        offspring = [evaluate(g) for g in children[:need]]

        population = _survivors(population + elites + offspring, N)
        archive.update(offspring)
        archive.record(gen)
        if callback is not None:
            callback(gen, population, offspring)

    return EvolutionResult(archive, population, archive.history, train, holdout)


# ---------------------------------------------------------------------------
# Final model choice


def _knee_index(members):
    f = np.array([m.objectives.fitness for m in members], dtype=float)
    c = np.array([m.objectives.complexity for m in members], dtype=float)

    def norm(v):
        span = v.max() - v.min()
        return (v - v.min()) / span if span > 0 else np.zeros_like(v)

    fn, cn = norm(f), norm(c)
    a = int(np.lexsort((f, c))[0])  # simplest
    b = int(np.lexsort((c, f))[0])  # most accurate
    dx, dy = cn[b] - cn[a], fn[b] - fn[a]
    length = math.hypot(dx, dy)
    if length == 0:
        dist = np.zeros(len(members))
    else:
        dist = np.abs(dx * (fn - fn[a]) - dy * (cn - cn[a])) / length
    return min(range(len(members)), key=lambda i: (-dist[i], c[i], f[i]))


def select_final(archive, validation: Optional[Dataset] = None, policy: str = "best_r2") -> Individual:
    """Pick one model from the archive.

    ``best_r2`` takes the highest R^2 on ``validation`` (ties go to the
    lower complexity).  ``knee`` takes the member farthest from the line
    joining the simplest and the most accurate members, in objective space
    normalised to the unit square.
    """
    members = list(archive.members if isinstance(archive, ParetoArchive) else archive)
    if not members:
        raise ValueError("archive is empty")
    if policy == "best_r2":
        if validation is None:
            raise ValueError("best_r2 selection needs validation data")
        scores = [r_squared(predict(m.model, validation), validation.y) for m in members]
        scores = [s if math.isfinite(s) else -math.inf for s in scores]
        i = min(range(len(members)),
                key=lambda k: (-scores[k], members[k].objectives.complexity, members[k].objectives.fitness))
        return members[i]
    if policy == "knee":
        return members[_knee_index(members)]
    raise ValueError(f"unknown selection policy {policy!r}")
