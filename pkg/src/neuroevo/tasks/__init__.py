from .xor import XOR_CASES, XorTask, xor_fitness
from .cartpole import (
    CartPoleState,
    DpbFixedTask,
    DpbGeneralizationTask,
    DpbParams,
    dpb_derivatives,
    dpb_episode,
    generalization_conditions,
    generalization_test,
    mechanical_energy,
    recoverability_scan,
    rk4_step,
)

__all__ = [
    "XOR_CASES",
    "XorTask",
    "xor_fitness",
    "CartPoleState",
    "DpbFixedTask",
    "DpbGeneralizationTask",
    "DpbParams",
    "dpb_derivatives",
    "dpb_episode",
    "generalization_conditions",
    "generalization_test",
    "mechanical_energy",
    "recoverability_scan",
    "rk4_step",
]
