"""Species bookkeeping keyed by hidden-neuron count, fitness adjustment,
quota distribution, reproduction, elimination, and the generation loop.

Individuals with the same number of hidden neurons form a species. Species
compete through per-generation offspring quotas (driven by adjusted species
fitness) and parenting quotas (driven by within-species fitness diversity),
with a weighted-roulette elimination pass enforcing the fixed ecosystem size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import genotype as gt
from . import mutation as mut
from .genotype import Genotype

E = math.e
DIVERSITY_SCALE = 10.0  # maps span-normalized diversities (<< 1) into log range
ELIMINATION_EPS = 1e-6


@dataclass
class EvolutionConfig:
    max_size: int = 150
    quota_fraction: float = 0.25
    g_max: int = 15
    elite_per_species: int = 1
    crossover_probability: float = 0.75
    mutation_weights: mut.MutationWeights = field(default_factory=mut.MutationWeights)
    seed: int = 0

    def validate(self) -> None:
        if not 0 < self.quota_fraction <= 1:
            raise ValueError("quota_fraction must be in (0, 1]")
        if self.elite_per_species < 0:
            raise ValueError("elite_per_species must be >= 0")
        if self.max_size < 1:
            raise ValueError("max_size must be >= 1")
        self.mutation_weights.validate()


@dataclass
class Individual:
    genotype: Genotype
    fitness: float | None = None
    solved: bool = False
    adjusted_fitness: float = 0.0
    stagnancy: int = 0
    best_fitness_seen: float = float("-inf")
    weight_state: mut.WeightMutationState = field(default_factory=mut.WeightMutationState)
    is_elite: bool = False


@dataclass
class Species:
    key: int
    members: list[Individual] = field(default_factory=list)
    fitness: float = 0.0  # mean member fitness
    adjusted_fitness: float = 0.0  # sum of member adjusted fitnesses
    diversity: float = 0.0
    stagnancy: int = 0
    best_fitness_seen: float = float("-inf")
    parents: list[Individual] = field(default_factory=list)


@dataclass
class GenerationReport:
    generation: int
    best_fitness: float
    evaluations: int
    species_count: int
    total_individuals: int
    best_hidden_count: int
    solved: bool

    CSV_HEADER = "generation,best_fitness,evaluations,species_count,total_individuals,best_hidden_count"

    def csv_row(self) -> str:
        return (
            f"{self.generation},{self.best_fitness:.17g},{self.evaluations},"
            f"{self.species_count},{self.total_individuals},{self.best_hidden_count}"
        )


class Ecosystem:
    def __init__(self, config: EvolutionConfig):
        config.validate()
        self.config = config
        self.species: dict[int, Species] = {}
        self.generation = 0
        self.evaluation_count = 0
        self.f_max_global = 0.0

    # -- iteration helpers (fixed order for determinism) ---------------------

    def sorted_species(self) -> list[Species]:
        return [self.species[k] for k in sorted(self.species)]

    def individuals(self) -> list[Individual]:
        out = []
        for sp in self.sorted_species():
            out.extend(sp.members)
        return out

    @property
    def size(self) -> int:
        return sum(len(sp.members) for sp in self.species.values())

    def add_individual(self, ind: Individual) -> None:
        key = ind.genotype.n_hidden
        sp = self.species.get(key)
        if sp is None:
            sp = Species(key)
            self.species[key] = sp
        sp.members.append(ind)


def initial_ecosystem(
    config: EvolutionConfig,
    n_input: int,
    n_output: int,
    initial_species: int,
    rng: random.Random,
    n_bias: int = 1,
) -> Ecosystem:
    """Populate the ecosystem evenly over hidden counts 0..initial_species-1,
    remainder round-robin to the smallest keys."""
    if initial_species < 1:
        raise ValueError("initial_species must be >= 1")
    eco = Ecosystem(config)
    keys = list(range(initial_species))
    base, extra = divmod(config.max_size, initial_species)
    for i, key in enumerate(keys):
        count = base + (1 if i < extra else 0)
        for _ in range(count):
            g = gt.minimal_genotype(n_bias, n_input, n_output, key, rng)
            eco.add_individual(Individual(genotype=g))
    return eco


# -- fitness adjustment ------------------------------------------------------


def stagnancy_coefficient(g: int, g_max: int) -> float:
    if g <= g_max:
        return 1.0
    return 1.0 - math.exp(-((1.0 + 1.0 / g) ** 2))


def update_adjusted_fitness(eco: Ecosystem) -> None:
    individuals = eco.individuals()
    fitnesses = [ind.fitness for ind in individuals if ind.fitness is not None]
    eco.f_max_global = max(fitnesses) if fitnesses else 0.0
    for ind in individuals:
        if ind.fitness is None or eco.f_max_global == 0.0:
            ind.adjusted_fitness = 0.0
        else:
            c_d = stagnancy_coefficient(ind.stagnancy, eco.config.g_max)
            ind.adjusted_fitness = c_d * ind.fitness / eco.f_max_global


def species_statistics(sp: Species) -> tuple[float, float, float]:
    """(mean fitness, summed adjusted fitness, normalized fitness variance)."""
    if not sp.members:
        raise ValueError("species has no members")
    fs = [ind.fitness or 0.0 for ind in sp.members]
    mean = sum(fs) / len(fs)
    adj = sum(ind.adjusted_fitness for ind in sp.members)
    f_max, f_min = max(fs), min(fs)
    if f_max == f_min:
        diversity = 0.0
    else:
        span = f_max - f_min
        diversity = sum(((f - mean) / span) ** 2 for f in fs) / len(fs)
    sp.fitness, sp.adjusted_fitness, sp.diversity = mean, adj, diversity
    return mean, adj, diversity


# -- quotas ------------------------------------------------------------------


def _log_quota(values: dict[int, float], q: int) -> dict[int, int]:
    """Distribute q over species proportionally to ln of guarded values."""
    if not values:
        return {}
    guarded = {k: max(v, E) for k, v in values.items()}
    denom = sum(1.0 + math.log(v) for v in guarded.values())
    c_q = q / denom
    return {k: int(c_q * math.log(v)) for k, v in sorted(guarded.items())}


def offspring_quota(eco: Ecosystem, q: int) -> dict[int, int]:
    return _log_quota({sp.key: sp.adjusted_fitness for sp in eco.sorted_species()}, q)


def parenting_quota(eco: Ecosystem, q: int) -> dict[int, int]:
    """Parent counts proportional to the log of scaled diversity.

    Low-diversity (converged) species earn no diversity share, which
    throttles offspring production and shields mid-climb lineages from being
    flooded out by copies of the current best. The one species holding the
    best individual keeps a minimal parent pool (two when it has two
    members) even when converged, so crossover — the only operator that
    changes several weights in one coordinated move — never switches off
    for the champion lineage.
    """
    species = eco.sorted_species()
    lns = {
        sp.key: max(0.0, math.log(DIVERSITY_SCALE * sp.diversity)) if sp.diversity > 0 else 0.0
        for sp in species
    }
    denom = sum(1.0 + v for v in lns.values())
    if denom <= 0:
        quotas = {k: 0 for k in lns}
    else:
        c_q = q / denom
        quotas = {k: int(c_q * v) for k, v in sorted(lns.items())}
    if species:
        champ = max(
            species, key=lambda sp: max((i.fitness or 0.0) for i in sp.members)
        )
        quotas[champ.key] = max(quotas.get(champ.key, 0), min(2, len(champ.members)))
    return quotas


# -- elimination -------------------------------------------------------------


def elimination_weight(sp: Species) -> float:
    return (sp.stagnancy + 1) * len(sp.members) / (sp.diversity + ELIMINATION_EPS)


def _removable(sp: Species) -> list[Individual]:
    non_elite = [ind for ind in sp.members if not ind.is_elite]
    return non_elite if non_elite else list(sp.members)


def eliminate_to_limit(eco: Ecosystem, rng: random.Random) -> None:
    while eco.size > eco.config.max_size:
        candidates = [sp for sp in eco.sorted_species() if sp.members]
        weights = [elimination_weight(sp) for sp in candidates]
        total = sum(weights)
        if total <= 0:
            chosen = candidates[rng.randrange(len(candidates))]
        else:
            r = rng.random() * total
            acc = 0.0
            chosen = candidates[-1]
            for sp, w in zip(candidates, weights):
                acc += w
                if r < acc:
                    chosen = sp
                    break
        pool = _removable(chosen)
        victim = min(pool, key=lambda ind: ind.adjusted_fitness)
        chosen.members.remove(victim)
        if not chosen.members:
            del eco.species[chosen.key]


# -- generation loop ---------------------------------------------------------


def _evaluate(eco: Ecosystem, ind: Individual, task) -> None:
    fitness, solved = task.evaluate(ind.genotype)
    ind.fitness = fitness
    ind.solved = solved
    eco.evaluation_count += 1


def _update_stagnancy(eco: Ecosystem) -> None:
    for sp in eco.sorted_species():
        improved = False
        for ind in sp.members:
            if ind.fitness is not None and ind.fitness > ind.best_fitness_seen:
                ind.best_fitness_seen = ind.fitness
                ind.stagnancy = 0
            else:
                ind.stagnancy += 1
            if ind.fitness is not None and ind.fitness > sp.best_fitness_seen:
                sp.best_fitness_seen = ind.fitness
                improved = True
        sp.stagnancy = 0 if improved else sp.stagnancy + 1


def _pick_parents(eco: Ecosystem, sp: Species, rng: random.Random):
    """Two distinct crossover parents; falls back to the nearest-key species
    when this one has a single parent."""
    if len(sp.parents) >= 2:
        i = rng.randrange(len(sp.parents))
        j = rng.randrange(len(sp.parents) - 1)
        if j >= i:
            j += 1
        return sp.parents[i], sp.parents[j]
    first = sp.parents[0]
    others = [
        s
        for s in eco.sorted_species()
        if s.key != sp.key and s.parents
    ]
    if not others:
        return first, None
    nearest = min(others, key=lambda s: (abs(s.key - sp.key), s.key))
    return first, nearest.parents[rng.randrange(len(nearest.parents))]


def _mutate_once(eco: Ecosystem, ind: Individual, task, rng: random.Random) -> None:
    """Apply one mutation drawn by kind weighting, with PS/LJ bookkeeping and
    immediate re-evaluation."""
    kind = mut.select_mutation_kind(eco.config.mutation_weights, rng)
    if kind == mut.WEIGHT_MUTATION:
        keys = ind.genotype.connection_keys()
        if not keys:
            return
        key = keys[rng.randrange(len(keys))]
        old_fitness = ind.fitness if ind.fitness is not None else 0.0
        rec = ind.weight_state.record(key)
        mut.mutate_weight(ind.genotype, ind.weight_state, key, rec.last_delta, rng)
        _evaluate(eco, ind, task)
        ind.weight_state.note_outcome(key, ind.fitness - old_fitness)
    else:
        outcome = mut.apply_structural_mutation(ind.genotype, kind, rng)
        if outcome.applied:
            # connection keys may have been renumbered; restart the search state
            ind.weight_state.clear()
            _evaluate(eco, ind, task)


def _rehome(eco: Ecosystem) -> None:
    moved = []
    for sp in eco.sorted_species():
        keep = []
        for ind in sp.members:
            if ind.genotype.n_hidden != sp.key:
                moved.append(ind)
            else:
                keep.append(ind)
        sp.members = keep
    for key in [sp.key for sp in eco.sorted_species() if not sp.members]:
        del eco.species[key]
    for ind in moved:
        eco.add_individual(ind)


def epoch(eco: Ecosystem, task, rng: random.Random) -> GenerationReport:
    """Run one full generation and return its report."""
    cfg = eco.config
    # 1. evaluate newcomers
    for ind in eco.individuals():
        if ind.fitness is None:
            _evaluate(eco, ind, task)
    # 2. stagnancy + statistics
    _update_stagnancy(eco)
    update_adjusted_fitness(eco)
    for sp in eco.sorted_species():
        species_statistics(sp)
    # 3. quotas
    q = int(cfg.quota_fraction * cfg.max_size)
    off_quota = offspring_quota(eco, q)
    par_quota = parenting_quota(eco, q)
    # 4. elites and parents
    for sp in eco.sorted_species():
        # rank by raw fitness: elitism must keep the best solution found even
        # when the stagnancy discount has eroded its adjusted fitness
        ranked = sorted(
            sp.members, key=lambda ind: -(ind.fitness if ind.fitness is not None else 0.0)
        )
        for ind in sp.members:
            ind.is_elite = False
        for ind in ranked[: cfg.elite_per_species]:
            ind.is_elite = True
        sp.parents = ranked[: par_quota.get(sp.key, 0)]
    # 5. offspring
    children: list[Individual] = []
    for sp in eco.sorted_species():
        if not sp.parents:
            continue
        # offspring are capped by the parent count so a single converged
        # lineage cannot flood the ecosystem with near-identical copies
        for _ in range(min(off_quota.get(sp.key, 0), len(sp.parents))):
            if rng.random() < cfg.crossover_probability:
                pa, pb = _pick_parents(eco, sp, rng)
                if pb is not None:
                    child_g = gt.crossover(pa.genotype, pb.genotype, rng)
                else:
                    child_g = pa.genotype.copy()
                child = Individual(genotype=child_g)
            else:
                parent = sp.parents[rng.randrange(len(sp.parents))]
                child = Individual(genotype=parent.genotype.copy())
                # evaluate the clone first so the weight-mutation bookkeeping
                # sees the true pre-mutation fitness as its baseline
                _evaluate(eco, child, task)
                _mutate_once(eco, child, task, rng)
            if child.fitness is None:
                _evaluate(eco, child, task)
            children.append(child)
    # 6. mutate non-elite incumbents
    for sp in eco.sorted_species():
        for ind in list(sp.members):
            if not ind.is_elite:
                _mutate_once(eco, ind, task, rng)
    # 7. re-home structurally mutated individuals, then add offspring
    _rehome(eco)
    for child in children:
        eco.add_individual(child)
    # 8. enforce the size limit (with refreshed statistics)
    update_adjusted_fitness(eco)
    for sp in eco.sorted_species():
        species_statistics(sp)
    eliminate_to_limit(eco, rng)
    # 9. report
    eco.generation += 1
    best = max(eco.individuals(), key=lambda ind: ind.fitness or 0.0)
    return GenerationReport(
        generation=eco.generation,
        best_fitness=best.fitness or 0.0,
        evaluations=eco.evaluation_count,
        species_count=len(eco.species),
        total_individuals=eco.size,
        best_hidden_count=best.genotype.n_hidden,
        solved=any(ind.solved for ind in eco.individuals()),
    )
