"""Neuroevolution with complexity-based speciation.

Networks evolve both topology and weights under a redundancy-free
three-chromosome encoding; individuals are grouped into species by their
hidden-neuron count and compete through fitness- and diversity-driven quotas.
"""

from .genotype import (
    Genotype,
    GenotypeError,
    NeuronRole,
    add_feedforward_connection,
    add_neuron,
    add_recurrent_connection,
    crossover,
    delete_connection,
    delete_neuron,
    minimal_genotype,
    validate,
    would_create_cycle,
)
from .network import ActivationState, CompiledNetwork, evaluate_step, evaluation_order, new_state, reset_state
from .mutation import MutationWeights, WeightMutationState, apply_structural_mutation, mutate_weight, select_mutation_kind
from .ecosystem import (
    Ecosystem,
    EvolutionConfig,
    Individual,
    Species,
    epoch,
    initial_ecosystem,
    stagnancy_coefficient,
)

__version__ = "0.1.0"
