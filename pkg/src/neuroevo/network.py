"""Deterministic stack-based evaluation of a genotype as a neural network.

The whole network is evaluated once per external input. Signals travelling
along recurrent connections are buffered and delivered at the next step, so
repeated presentation of the same input from the same buffer state always
produces the same output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .genotype import Genotype, GenotypeError, NeuronRole


@dataclass
class ActivationState:
    activations: dict[int, float] = field(default_factory=dict)
    recurrent_buffer: dict[int, float] = field(default_factory=dict)
    evaluated: set[int] = field(default_factory=set)


def new_state(g: Genotype) -> ActivationState:
    state = ActivationState()
    reset_state(state)
    return state


def reset_state(state: ActivationState) -> ActivationState:
    """Zero everything; used between independent episodes. Idempotent."""
    state.activations.clear()
    state.recurrent_buffer.clear()
    state.evaluated.clear()
    return state


def evaluation_order(g: Genotype, output: int) -> list[int]:
    """Order in which neurons are evaluated for one output neuron.

    Pushes the output, then recursively pushes unevaluated feedforward
    prerequisites (smallest ID ends up on top), popping a neuron once all of
    its prerequisites are done.
    """
    if g.role(output) != NeuronRole.OUTPUT:
        raise GenotypeError(f"neuron {output} is not an output neuron")
    if not _acyclic(g):
        raise GenotypeError("cannot order a cyclic feedforward graph")
    return _stack_order_any(g, output)


def _recurrent_inward(g: Genotype) -> dict[int, list[tuple[int, float]]]:
    """target -> [(source, weight)] sorted by source."""
    rec_in: dict[int, list[tuple[int, float]]] = {n: [] for n in g.neuron_ids()}
    for src in g.neuron_ids():
        for tgt, w in g.recurrent[src]:
            rec_in[tgt].append((src, w))
    for row in rec_in.values():
        row.sort()
    return rec_in


def _neuron_value(g: Genotype, state: ActivationState, rec_in, n: int) -> float:
    total = 0.0
    for s in g.inward[n]:  # ascending source id
        total += g.get_weight("ff", s, n) * state.activations[s]
    for s, w in rec_in[n]:
        total += w * state.recurrent_buffer.get(s, 0.0)
    return math.tanh(total)


def evaluate_step(g: Genotype, state: ActivationState, inputs: list[float]) -> list[float]:
    """Evaluate the entire network for one timestep and return the outputs."""
    if len(inputs) != g.n_input:
        raise GenotypeError(f"expected {g.n_input} inputs, got {len(inputs)}")
    state.activations.clear()
    state.evaluated.clear()
    for b in g.bias_ids():
        state.activations[b] = 1.0
        state.evaluated.add(b)
    for j, i in enumerate(g.input_ids()):
        state.activations[i] = float(inputs[j])
        state.evaluated.add(i)
    rec_in = _recurrent_inward(g)
    outputs = []
    for out in g.output_ids():
        for n in evaluation_order(g, out):
            if n in state.evaluated:
                continue
            state.activations[n] = _neuron_value(g, state, rec_in, n)
            state.evaluated.add(n)
        outputs.append(state.activations[out])
    # neurons feeding no output still need activations (recurrent sources)
    for n in g.neuron_ids():
        if n not in state.evaluated:
            for m in _stack_order_any(g, n):
                if m in state.evaluated:
                    continue
                state.activations[m] = _neuron_value(g, state, rec_in, m)
                state.evaluated.add(m)
    # propagate along recurrent connections for the next step
    for src in g.neuron_ids():
        if g.recurrent[src]:
            state.recurrent_buffer[src] = state.activations[src]
    return outputs


def _acyclic(g: Genotype) -> bool:
    indeg = {n: len(g.inward[n]) for n in g.neuron_ids()}
    ready = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        n = ready.pop()
        seen += 1
        for t, _ in g.outward[n]:
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return seen == g.n_neurons


def _stack_order_any(g: Genotype, root: int) -> list[int]:
    """Stack procedure: push a neuron, push its unevaluated prerequisites
    (smallest ID on top), pop and record once all prerequisites are done.
    Assumes the feedforward graph is acyclic."""
    order: list[int] = []
    done: set[int] = set()
    stack = [root]
    while stack:
        n = stack[-1]
        if n in done:
            stack.pop()
            continue
        pending = [s for s in g.inward[n] if s not in done]
        if not pending:
            stack.pop()
            done.add(n)
            order.append(n)
        else:
            stack.extend(reversed(pending))
    return order


class CompiledNetwork:
    """Flat, allocation-free evaluator for tight simulation loops.

    Produces bit-identical results to evaluate_step (same ascending-source
    summation order); verified by tests.
    """

    def __init__(self, g: Genotype):
        self.n_input = g.n_input
        n = g.n_neurons
        self.n_neurons = n
        order: list[int] = []
        done: set[int] = set()
        for out in g.output_ids():
            for m in evaluation_order(g, out):
                if m not in done:
                    done.add(m)
                    order.append(m)
        for m in g.neuron_ids():
            if m not in done:
                for k in _stack_order_any(g, m):
                    if k not in done:
                        done.add(k)
                        order.append(k)
        rec_in = _recurrent_inward(g)
        self._bias = list(g.bias_ids())
        self._inputs = list(g.input_ids())
        self._outputs = list(g.output_ids())
        self._computed = [
            (
                n,
                [(s, g.get_weight("ff", s, n)) for s in g.inward[n]],
                rec_in[n],
            )
            for n in order
            if n not in set(self._bias) | set(self._inputs)
        ]
        self._rec_sources = [s for s in g.neuron_ids() if g.recurrent[s]]
        self.act = [0.0] * (n + 1)  # 1-based
        self.buf = [0.0] * (n + 1)

    def reset(self) -> None:
        for i in range(len(self.act)):
            self.act[i] = 0.0
            self.buf[i] = 0.0

    def step(self, inputs) -> list[float]:
        act = self.act
        buf = self.buf
        tanh = math.tanh
        for b in self._bias:
            act[b] = 1.0
        for j, i in enumerate(self._inputs):
            act[i] = inputs[j]
        for n, ff, rec in self._computed:
            total = 0.0
            for s, w in ff:
                total += w * act[s]
            for s, w in rec:
                total += w * buf[s]
            act[n] = tanh(total)
        for s in self._rec_sources:
            buf[s] = act[s]
        return [act[o] for o in self._outputs]
