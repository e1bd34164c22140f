"""XOR benchmark fitness."""

from __future__ import annotations

from ..genotype import Genotype, GenotypeError
from ..network import CompiledNetwork

XOR_CASES = (((0.0, 0.0), 0.0), ((0.0, 1.0), 1.0), ((1.0, 0.0), 1.0), ((1.0, 1.0), 0.0))


def xor_fitness(g: Genotype) -> tuple[float, bool]:
    """Fitness 4 - sum of absolute errors; solved iff the sign rule classifies
    every case (output > 0 means 1)."""
    if (g.n_bias, g.n_input, g.n_output) != (1, 2, 1):
        raise GenotypeError("XOR genotype must have 1 bias, 2 inputs, 1 output")
    net = CompiledNetwork(g)
    net.reset()  # state carries across the four cases within one sweep
    error = 0.0
    solved = True
    for inputs, target in XOR_CASES:
        out = net.step(inputs)[0]
        error += abs(target - (out + 1.0) / 2.0)
        predicted = 1.0 if out > 0.0 else 0.0
        if predicted != target:
            solved = False
    return 4.0 - error, solved


class XorTask:
    """Task adapter for the generation loop."""

    def evaluate(self, g: Genotype) -> tuple[float, bool]:
        return xor_fitness(g)
