import random

import pytest

from neuroevo.genotype import (
    Genotype,
    add_feedforward_connection,
    add_recurrent_connection,
)

# Reference topology used throughout: 4 inputs (1-4), 2 outputs (5, 6),
# 3 hidden (7-9), with one recurrent edge from output 6 to hidden 9.
REFERENCE_FF_EDGES = [
    (1, 6), (1, 7), (1, 8),
    (2, 7), (2, 9),
    (3, 6), (3, 7),
    (4, 7), (4, 9),
    (7, 5),
    (8, 5), (8, 6),
    (9, 6),
]
REFERENCE_REC_EDGES = [(6, 9)]


def build_reference_genotype(with_recurrent=True, weight=0.5):
    g = Genotype(0, 4, 2, 3)
    for s, t in REFERENCE_FF_EDGES:
        add_feedforward_connection(g, s, t, weight)
    if with_recurrent:
        for s, t in REFERENCE_REC_EDGES:
            add_recurrent_connection(g, s, t, weight)
    return g


@pytest.fixture
def reference_genotype():
    return build_reference_genotype()


@pytest.fixture
def rng():
    return random.Random(12345)


def random_genotype(rng, max_hidden=5, n_edits=15):
    """A random valid genotype built from a minimal one by structural edits."""
    from neuroevo.mutation import STRUCTURAL_KINDS, apply_structural_mutation
    from neuroevo.genotype import minimal_genotype

    g = minimal_genotype(
        rng.randint(0, 1),
        rng.randint(1, 4),
        rng.randint(1, 3),
        rng.randint(0, max_hidden),
        rng,
    )
    for _ in range(rng.randint(0, n_edits)):
        kind = STRUCTURAL_KINDS[rng.randrange(len(STRUCTURAL_KINDS))]
        apply_structural_mutation(g, kind, rng)
    return g
