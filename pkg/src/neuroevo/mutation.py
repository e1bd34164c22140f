"""Mutation operators: weighted kind selection, structural dispatch, and the
pattern-search / Luus-Jaakola hybrid weight update.

A weight's first mutation steps in a random direction. The direction is kept
while mutations keep improving fitness; on a failed mutation it is reversed
and the sampling deviation shrinks geometrically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import genotype as gt
from .genotype import Genotype, GenotypeError, NeuronRole

SIGMA_INITIAL = 1.5  # 15% of the allowable weight range [-5, 5]
SIGMA_DECAY = 0.95

WEIGHT_MUTATION = "weight_mutation"
ADD_CONNECTION = "add_connection"
DELETE_CONNECTION = "delete_connection"
ADD_NEURON = "add_neuron"
DELETE_NEURON = "delete_neuron"

STRUCTURAL_KINDS = (ADD_CONNECTION, DELETE_CONNECTION, ADD_NEURON, DELETE_NEURON)


@dataclass
class MutationWeights:
    weight_mutation: float = 1000.0
    add_connection: float = 50.0
    delete_connection: float = 5.0
    add_neuron: float = 30.0
    delete_neuron: float = 5.0

    def as_items(self):
        return [
            (WEIGHT_MUTATION, self.weight_mutation),
            (ADD_CONNECTION, self.add_connection),
            (DELETE_CONNECTION, self.delete_connection),
            (ADD_NEURON, self.add_neuron),
            (DELETE_NEURON, self.delete_neuron),
        ]

    def validate(self) -> None:
        items = self.as_items()
        if any(w < 0 for _, w in items):
            raise ValueError("mutation weightings must be non-negative")
        if all(w == 0 for _, w in items):
            raise ValueError("at least one mutation weighting must be positive")


@dataclass
class WeightRecord:
    direction: int | None = None  # +1, -1, or None before the first mutation
    sigma: float = SIGMA_INITIAL
    last_delta: float | None = None  # fitness change from this weight's previous mutation


class WeightMutationState:
    """Per-individual search state, keyed by ('ff'|'rec', source, target)."""

    def __init__(self):
        self.records: dict[tuple[str, int, int], WeightRecord] = {}

    def record(self, key) -> WeightRecord:
        rec = self.records.get(key)
        if rec is None:
            rec = WeightRecord()
            self.records[key] = rec
        return rec

    def note_outcome(self, key, fitness_delta: float) -> None:
        self.record(key).last_delta = fitness_delta

    def clear(self) -> None:
        # structural edits renumber connections, invalidating the keys
        self.records.clear()


def select_mutation_kind(weights: MutationWeights, rng: random.Random) -> str:
    weights.validate()
    items = weights.as_items()
    total = sum(w for _, w in items)
    r = rng.random() * total
    acc = 0.0
    for kind, w in items:
        acc += w
        if r < acc:
            return kind
    return items[-1][0]


def mutate_weight(
    g: Genotype,
    state: WeightMutationState,
    connection: tuple[str, int, int],
    fitness_delta_from_previous: float | None,
    rng: random.Random,
) -> float:
    """Mutate one connection weight in place and return the new value."""
    kind, source, target = connection
    old = g.get_weight(kind, source, target)
    rec = state.record(connection)
    if rec.direction is None:
        rec.direction = 1 if rng.random() < 0.5 else -1
    elif fitness_delta_from_previous is not None and fitness_delta_from_previous <= 0:
        rec.direction = -rec.direction
        rec.sigma *= SIGMA_DECAY
    delta = abs(rng.gauss(0.0, rec.sigma)) * rec.direction
    new = gt.clamp_weight(old + delta)
    g.set_weight(kind, source, target, new)
    return new


@dataclass
class MutationOutcome:
    kind: str
    applied: bool
    detail: str = ""


def _legal_addition_pairs(g: Genotype) -> list[tuple[int, int, bool]]:
    """(source, target, is_feedforward) for every pair that could be added.

    Candidates are the missing edges: target not a bias/input, pair absent
    from both chromosomes. A candidate that cannot be expressed as a
    feedforward edge (it would close a cycle, or its source is an output
    neuron) lands in the recurrent chromosome instead. Self-loops are offered
    only for hidden neurons, as recurrent edges; output self-loops are never
    generated, so a fully connected hidden-free genotype has an empty pool
    and stays memoryless.
    """
    pairs = []
    targets = list(g.output_ids()) + list(g.hidden_ids())
    hidden = set(g.hidden_ids())
    for s in g.neuron_ids():
        s_role = g.role(s)
        for t in targets:
            if s == t and s not in hidden:
                continue
            if g.has_feedforward(s, t) or g.has_recurrent(s, t):
                continue
            ff_ok = (
                s != t
                and s_role != NeuronRole.OUTPUT
                and not gt.would_create_cycle(g, s, t)
            )
            pairs.append((s, t, ff_ok))
    return pairs


def apply_structural_mutation(g: Genotype, kind: str, rng: random.Random) -> MutationOutcome:
    """Apply one structural mutation; impossible mutations report as skipped."""
    if kind == ADD_CONNECTION:
        pairs = _legal_addition_pairs(g)
        if not pairs:
            return MutationOutcome(kind, False, "no legal connection to add")
        s, t, is_ff = pairs[rng.randrange(len(pairs))]
        w = rng.uniform(-gt.INIT_WEIGHT_RANGE, gt.INIT_WEIGHT_RANGE)
        if is_ff:
            gt.add_feedforward_connection(g, s, t, w)
            return MutationOutcome(kind, True, f"ff {s}->{t}")
        gt.add_recurrent_connection(g, s, t, w)
        return MutationOutcome(kind, True, f"rec {s}->{t}")
    if kind == DELETE_CONNECTION:
        keys = g.connection_keys()
        if not keys:
            return MutationOutcome(kind, False, "no connection to delete")
        chrom, s, t = keys[rng.randrange(len(keys))]
        gt.delete_connection(g, s, t, chrom)
        return MutationOutcome(kind, True, f"{chrom} {s}->{t}")
    if kind == ADD_NEURON:
        gt.add_neuron(g, rng)
        return MutationOutcome(kind, True, f"neuron {g.n_neurons}")
    if kind == DELETE_NEURON:
        hidden = list(g.hidden_ids())
        if not hidden:
            return MutationOutcome(kind, False, "no hidden neuron to delete")
        victim = hidden[rng.randrange(len(hidden))]
        gt.delete_neuron(g, victim, rng)
        return MutationOutcome(kind, True, f"neuron {victim}")
    raise GenotypeError(f"unknown structural mutation kind {kind!r}")
