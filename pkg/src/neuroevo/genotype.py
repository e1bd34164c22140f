"""Redundancy-free direct encoding for networks with evolvable topology.

A genotype stores three connectivity chromosomes: outward feedforward
connections (with weights), inward feedforward connections (kept as the exact
transpose of the outward table), and recurrent connections (with weights).
Neurons are numbered 1..N in the strict order bias, input, output, hidden,
and the numbering is kept consecutive across all structural edits.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

WEIGHT_MIN = -5.0
WEIGHT_MAX = 5.0
INIT_WEIGHT_RANGE = 1.0


class GenotypeError(ValueError):
    """Raised when an operation would violate a genotype invariant."""


class NeuronRole(enum.Enum):
    BIAS = "bias"
    INPUT = "input"
    OUTPUT = "output"
    HIDDEN = "hidden"


def clamp_weight(w: float) -> float:
    return max(WEIGHT_MIN, min(WEIGHT_MAX, w))


@dataclass
class Genotype:
    n_bias: int
    n_input: int
    n_output: int
    n_hidden: int
    # source -> [(target, weight)] sorted by target
    outward: dict[int, list[tuple[int, float]]] = field(default_factory=dict)
    # target -> [source] sorted
    inward: dict[int, list[int]] = field(default_factory=dict)
    # source -> [(target, weight)] sorted by target
    recurrent: dict[int, list[tuple[int, float]]] = field(default_factory=dict)

    def __post_init__(self):
        for nid in self.neuron_ids():
            self.outward.setdefault(nid, [])
            self.inward.setdefault(nid, [])
            self.recurrent.setdefault(nid, [])

    # -- structure queries ---------------------------------------------------

    @property
    def n_neurons(self) -> int:
        return self.n_bias + self.n_input + self.n_output + self.n_hidden

    def neuron_ids(self) -> range:
        return range(1, self.n_neurons + 1)

    def bias_ids(self) -> range:
        return range(1, self.n_bias + 1)

    def input_ids(self) -> range:
        return range(self.n_bias + 1, self.n_bias + self.n_input + 1)

    def output_ids(self) -> range:
        lo = self.n_bias + self.n_input + 1
        return range(lo, lo + self.n_output)

    def hidden_ids(self) -> range:
        lo = self.n_bias + self.n_input + self.n_output + 1
        return range(lo, lo + self.n_hidden)

    def role(self, nid: int) -> NeuronRole:
        if not 1 <= nid <= self.n_neurons:
            raise GenotypeError(f"neuron id {nid} out of range 1..{self.n_neurons}")
        if nid <= self.n_bias:
            return NeuronRole.BIAS
        if nid <= self.n_bias + self.n_input:
            return NeuronRole.INPUT
        if nid <= self.n_bias + self.n_input + self.n_output:
            return NeuronRole.OUTPUT
        return NeuronRole.HIDDEN

    @property
    def species_key(self) -> int:
        return self.n_hidden

    def feedforward_edges(self):
        """Yield (source, target, weight) in ascending (source, target) order."""
        for src in self.neuron_ids():
            for tgt, w in self.outward[src]:
                yield src, tgt, w

    def recurrent_edges(self):
        for src in self.neuron_ids():
            for tgt, w in self.recurrent[src]:
                yield src, tgt, w

    def connection_keys(self) -> list[tuple[str, int, int]]:
        """All connections as ('ff'|'rec', source, target) in a fixed order."""
        keys = [("ff", s, t) for s, t, _ in self.feedforward_edges()]
        keys += [("rec", s, t) for s, t, _ in self.recurrent_edges()]
        return keys

    def has_feedforward(self, source: int, target: int) -> bool:
        return any(t == target for t, _ in self.outward.get(source, ()))

    def has_recurrent(self, source: int, target: int) -> bool:
        return any(t == target for t, _ in self.recurrent.get(source, ()))

    def get_weight(self, kind: str, source: int, target: int) -> float:
        table = self.outward if kind == "ff" else self.recurrent
        for t, w in table[source]:
            if t == target:
                return w
        raise GenotypeError(f"no {kind} connection {source}->{target}")

    def set_weight(self, kind: str, source: int, target: int, weight: float) -> None:
        table = self.outward if kind == "ff" else self.recurrent
        row = table[source]
        for i, (t, _) in enumerate(row):
            if t == target:
                row[i] = (t, weight)
                return
        raise GenotypeError(f"no {kind} connection {source}->{target}")

    def copy(self) -> "Genotype":
        return Genotype(
            self.n_bias,
            self.n_input,
            self.n_output,
            self.n_hidden,
            {k: list(v) for k, v in self.outward.items()},
            {k: list(v) for k, v in self.inward.items()},
            {k: list(v) for k, v in self.recurrent.items()},
        )

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"counts {self.n_bias} {self.n_input} {self.n_output} {self.n_hidden}"]
        for s, t, w in self.feedforward_edges():
            lines.append(f"ff {s} {t} {w:.17g}")
        for s, t, w in self.recurrent_edges():
            lines.append(f"rec {s} {t} {w:.17g}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Genotype":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("counts "):
            raise GenotypeError("genotype text must start with a counts line")
        counts = lines[0].split()[1:]
        if len(counts) != 4:
            raise GenotypeError("counts line must have four fields")
        g = Genotype(*(int(c) for c in counts))
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 4 or parts[0] not in ("ff", "rec"):
                raise GenotypeError(f"bad connection line: {ln!r}")
            kind, s, t, w = parts[0], int(parts[1]), int(parts[2]), float(parts[3])
            if kind == "ff":
                add_feedforward_connection(g, s, t, w)
            else:
                add_recurrent_connection(g, s, t, w)
        return g


# -- construction ------------------------------------------------------------


def minimal_genotype(
    n_bias: int, n_input: int, n_output: int, n_hidden: int, rng: random.Random
) -> Genotype:
    """Fully connected feedforward genotype with uniform random weights."""
    if n_input < 1 or n_output < 1:
        raise GenotypeError("a genotype needs at least one input and one output")
    if n_bias not in (0, 1):
        raise GenotypeError("bias count must be 0 or 1")
    g = Genotype(n_bias, n_input, n_output, n_hidden)
    sources = list(g.bias_ids()) + list(g.input_ids())
    for src in sources:
        for tgt in list(g.hidden_ids()) + list(g.output_ids()):
            add_feedforward_connection(g, src, tgt, rng.uniform(-INIT_WEIGHT_RANGE, INIT_WEIGHT_RANGE))
    for src in g.hidden_ids():
        for tgt in g.output_ids():
            add_feedforward_connection(g, src, tgt, rng.uniform(-INIT_WEIGHT_RANGE, INIT_WEIGHT_RANGE))
    return g


# -- validation --------------------------------------------------------------


def _toposort_ok(g: Genotype) -> bool:
    """True if the outward feedforward graph is acyclic (Kahn's algorithm)."""
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


def validate(g: Genotype) -> list[str]:
    """Return a description of every invariant violation (empty if valid)."""
    problems = []
    n = g.n_neurons
    ids = set(g.neuron_ids())
    for table_name, table in (("outward", g.outward), ("inward", g.inward), ("recurrent", g.recurrent)):
        if set(table.keys()) != ids:
            problems.append(f"{table_name} rows do not cover ids 1..{n}")
    for src in g.neuron_ids():
        targets = [t for t, _ in g.outward[src]]
        if len(set(targets)) != len(targets):
            problems.append(f"duplicate outward edge from {src}")
        rec_targets = [t for t, _ in g.recurrent[src]]
        if len(set(rec_targets)) != len(rec_targets):
            problems.append(f"duplicate recurrent edge from {src}")
        for t in targets + rec_targets:
            if t not in ids:
                problems.append(f"edge {src}->{t} targets unknown neuron")
        for t in targets:
            if t == src:
                problems.append(f"feedforward self-connection on {src}")
        srcs = g.inward[src]
        if len(set(srcs)) != len(srcs):
            problems.append(f"duplicate inward entry at {src}")
    # transpose check
    expected_inward = {t: [] for t in g.neuron_ids()}
    for src, tgt, _ in g.feedforward_edges():
        if tgt in expected_inward:
            expected_inward[tgt].append(src)
    for t in g.neuron_ids():
        if sorted(g.inward[t]) != sorted(expected_inward[t]):
            problems.append(f"inward row {t} is not the transpose of outward")
    # role constraints
    for src, tgt, _ in g.feedforward_edges():
        if tgt in ids and g.role(tgt) in (NeuronRole.BIAS, NeuronRole.INPUT):
            problems.append(f"feedforward edge {src}->{tgt} targets a {g.role(tgt).value} neuron")
        if src in ids and g.role(src) == NeuronRole.OUTPUT:
            problems.append(f"feedforward edge {src}->{tgt} originates at an output neuron")
    for src, tgt, _ in g.recurrent_edges():
        if tgt in ids and g.role(tgt) in (NeuronRole.BIAS, NeuronRole.INPUT):
            problems.append(f"recurrent edge {src}->{tgt} targets a {g.role(tgt).value} neuron")
    for src, _, w in list(g.feedforward_edges()) + list(g.recurrent_edges()):
        if not WEIGHT_MIN <= w <= WEIGHT_MAX:
            problems.append(f"weight {w} out of [{WEIGHT_MIN}, {WEIGHT_MAX}] on edge from {src}")
    if not problems and not _toposort_ok(g):
        problems.append("outward feedforward graph contains a cycle")
    elif problems and not _toposort_ok(g):
        problems.append("outward feedforward graph contains a cycle")
    return problems


def would_create_cycle(g: Genotype, source: int, target: int) -> bool:
    """True iff adding source->target to the feedforward chromosome closes a loop."""
    for nid in (source, target):
        if not 1 <= nid <= g.n_neurons:
            raise GenotypeError(f"neuron id {nid} out of range")
    if source == target:
        return True
    # a cycle appears iff source is reachable from target
    stack = [target]
    seen = set()
    while stack:
        n = stack.pop()
        if n == source:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(t for t, _ in g.outward[n])
    return False


# -- connection edits --------------------------------------------------------


def _insert_sorted_pair(row: list[tuple[int, float]], target: int, weight: float) -> None:
    i = 0
    while i < len(row) and row[i][0] < target:
        i += 1
    row.insert(i, (target, weight))


def _insert_sorted(row: list[int], value: int) -> None:
    i = 0
    while i < len(row) and row[i] < value:
        i += 1
    row.insert(i, value)


def add_feedforward_connection(g: Genotype, source: int, target: int, weight: float) -> Genotype:
    if g.has_feedforward(source, target):
        raise GenotypeError(f"duplicate feedforward connection {source}->{target}")
    if would_create_cycle(g, source, target):
        raise GenotypeError(f"feedforward connection {source}->{target} would create a cycle")
    if g.role(target) in (NeuronRole.BIAS, NeuronRole.INPUT):
        raise GenotypeError(f"cannot feed a {g.role(target).value} neuron ({source}->{target})")
    if g.role(source) == NeuronRole.OUTPUT:
        raise GenotypeError(f"feedforward connection cannot originate at output {source}")
    _insert_sorted_pair(g.outward[source], target, weight)
    _insert_sorted(g.inward[target], source)
    return g


def add_recurrent_connection(g: Genotype, source: int, target: int, weight: float) -> Genotype:
    if g.has_recurrent(source, target):
        raise GenotypeError(f"duplicate recurrent connection {source}->{target}")
    if g.role(target) in (NeuronRole.BIAS, NeuronRole.INPUT):
        raise GenotypeError(f"cannot feed a {g.role(target).value} neuron ({source}->{target})")
    _insert_sorted_pair(g.recurrent[source], target, weight)
    return g


def delete_connection(g: Genotype, source: int, target: int, chromosome: str) -> Genotype:
    if chromosome == "feedforward" or chromosome == "ff":
        if not g.has_feedforward(source, target):
            raise GenotypeError(f"no feedforward connection {source}->{target}")
        g.outward[source] = [(t, w) for t, w in g.outward[source] if t != target]
        g.inward[target] = [s for s in g.inward[target] if s != source]
    elif chromosome == "recurrent" or chromosome == "rec":
        if not g.has_recurrent(source, target):
            raise GenotypeError(f"no recurrent connection {source}->{target}")
        g.recurrent[source] = [(t, w) for t, w in g.recurrent[source] if t != target]
    else:
        raise GenotypeError(f"unknown chromosome {chromosome!r}")
    return g


# -- neuron edits ------------------------------------------------------------


def add_neuron_between(g: Genotype, source: int, target: int, w_in: float, w_out: float) -> Genotype:
    """Deterministic core of add_neuron: append a hidden neuron fed by `source`
    (bias/input) and feeding `target` (output)."""
    if g.role(source) not in (NeuronRole.BIAS, NeuronRole.INPUT):
        raise GenotypeError(f"new neuron must be fed by a bias or input neuron, got {source}")
    if g.role(target) != NeuronRole.OUTPUT:
        raise GenotypeError(f"new neuron must feed an output neuron, got {target}")
    new_id = g.n_neurons + 1
    g.n_hidden += 1
    g.outward[new_id] = []
    g.inward[new_id] = []
    g.recurrent[new_id] = []
    add_feedforward_connection(g, source, new_id, w_in)
    add_feedforward_connection(g, new_id, target, w_out)
    return g


def add_neuron(g: Genotype, rng: random.Random) -> Genotype:
    sources = list(g.bias_ids()) + list(g.input_ids())
    targets = list(g.output_ids())
    source = sources[rng.randrange(len(sources))]
    target = targets[rng.randrange(len(targets))]
    w_in = rng.uniform(-INIT_WEIGHT_RANGE, INIT_WEIGHT_RANGE)
    w_out = rng.uniform(-INIT_WEIGHT_RANGE, INIT_WEIGHT_RANGE)
    return add_neuron_between(g, source, target, w_in, w_out)


def _renumber(table_pairs: dict[int, list[tuple[int, float]]], victim: int) -> dict[int, list[tuple[int, float]]]:
    out = {}
    for src, row in table_pairs.items():
        if src == victim:
            continue
        new_src = src - 1 if src > victim else src
        out[new_src] = [((t - 1 if t > victim else t), w) for t, w in row if t != victim]
    return out


def delete_neuron(g: Genotype, victim: int, rng: random.Random | None = None) -> Genotype:
    """Remove a hidden neuron, transferring its through-connections, and shift
    all higher IDs down by one."""
    if g.role(victim) != NeuronRole.HIDDEN:
        raise GenotypeError(f"neuron {victim} is not hidden")
    sources = list(g.inward[victim])
    targets = list(g.outward[victim])  # [(target, weight)]
    # detach the victim so transfers are checked against the remaining graph
    for s in sources:
        delete_connection(g, s, victim, "ff")
    for t, _ in targets:
        delete_connection(g, victim, t, "ff")
    for p in sources:
        for q, w in targets:
            if g.has_feedforward(p, q) or would_create_cycle(g, p, q):
                continue
            if g.role(q) in (NeuronRole.BIAS, NeuronRole.INPUT) or g.role(p) == NeuronRole.OUTPUT:
                continue
            add_feedforward_connection(g, p, q, w)
    g.outward = _renumber(g.outward, victim)
    g.recurrent = _renumber(g.recurrent, victim)
    new_inward = {}
    for tgt, row in g.inward.items():
        if tgt == victim:
            continue
        new_tgt = tgt - 1 if tgt > victim else tgt
        new_inward[new_tgt] = [(s - 1 if s > victim else s) for s in row if s != victim]
    g.inward = new_inward
    g.n_hidden -= 1
    return g


# -- crossover ---------------------------------------------------------------


def crossover(a: Genotype, b: Genotype, rng: random.Random) -> Genotype:
    """Edge-union crossover over the shared neuron range, with excess neurons
    and their connections inherited from the longer genotype."""
    if (a.n_bias, a.n_input, a.n_output) != (b.n_bias, b.n_input, b.n_output):
        raise GenotypeError("parents must share bias/input/output counts")
    longer, shorter = (a, b) if a.n_hidden >= b.n_hidden else (b, a)
    n_shared = shorter.n_neurons

    def gather(edges_a, edges_b):
        """(source, target) -> list of candidate weights, excess edges from `longer` only."""
        cands: dict[tuple[int, int], list[float]] = {}
        for parent, edges in ((a, edges_a), (b, edges_b)):
            for s, t, w in edges:
                if (s > n_shared or t > n_shared) and parent is not longer:
                    continue  # unreachable: ids beyond n_shared exist only in the longer parent
                cands.setdefault((s, t), []).append(w)
        return cands

    child = Genotype(a.n_bias, a.n_input, a.n_output, longer.n_hidden)
    ff = gather(a.feedforward_edges(), b.feedforward_edges())
    for (s, t) in sorted(ff):
        weights = ff[(s, t)]
        w = weights[0] if len(weights) == 1 else weights[rng.randrange(2)]
        if would_create_cycle(child, s, t):
            continue
        add_feedforward_connection(child, s, t, w)
    rec = gather(a.recurrent_edges(), b.recurrent_edges())
    for (s, t) in sorted(rec):
        weights = rec[(s, t)]
        w = weights[0] if len(weights) == 1 else weights[rng.randrange(2)]
        add_recurrent_connection(child, s, t, w)
    return child
