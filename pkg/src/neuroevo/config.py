"""Experiment configuration: line-oriented `key = value` files with defaults
matching the benchmark parameter set."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ecosystem import EvolutionConfig
from .mutation import MutationWeights

EXPERIMENTS = ("xor_evolving", "xor_fixed", "dpb_fixed", "dpb_generalize", "recoverability")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    runs: int = 1
    initial_species: int = 1
    generation_cap: int = 100
    output_dir: str = "results"
    generalization_steps: int = 200_000
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.generation_cap < 1:
            raise ConfigError("generation_cap must be >= 1")
        if self.initial_species < 1:
            raise ConfigError("initial_species must be >= 1")
        try:
            self.evolution.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_INT_KEYS = {
    "seed",
    "runs",
    "initial_species",
    "generation_cap",
    "generalization_steps",
    "max_size",
    "g_max",
    "elite_per_species",
}
_FLOAT_KEYS = {
    "quota_fraction",
    "crossover_probability",
    "weight_mutation",
    "add_connection",
    "delete_connection",
    "add_neuron",
    "delete_neuron",
}
_STR_KEYS = {"experiment", "output_dir"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def parse_config(text: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    for required in ("experiment", "seed"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")

    weights = MutationWeights(
        weight_mutation=float(values.pop("weight_mutation", 1000.0)),
        add_connection=float(values.pop("add_connection", 50.0)),
        delete_connection=float(values.pop("delete_connection", 5.0)),
        add_neuron=float(values.pop("add_neuron", 30.0)),
        delete_neuron=float(values.pop("delete_neuron", 5.0)),
    )
    seed = int(values.pop("seed"))
    evolution = EvolutionConfig(
        max_size=int(values.pop("max_size", 150)),
        quota_fraction=float(values.pop("quota_fraction", 0.25)),
        g_max=int(values.pop("g_max", 15)),
        elite_per_species=int(values.pop("elite_per_species", 1)),
        crossover_probability=float(values.pop("crossover_probability", 0.75)),
        mutation_weights=weights,
        seed=seed,
    )
    cfg = ExperimentConfig(
        experiment=str(values.pop("experiment")),
        seed=seed,
        runs=int(values.pop("runs", 1)),
        initial_species=int(values.pop("initial_species", 1)),
        generation_cap=int(values.pop("generation_cap", 100)),
        output_dir=str(values.pop("output_dir", "results")),
        generalization_steps=int(values.pop("generalization_steps", 200_000)),
        evolution=evolution,
    )
    cfg.validate()
    return cfg


def emit_config(cfg: ExperimentConfig) -> str:
    ev = cfg.evolution
    w = ev.mutation_weights
    lines = [
        f"experiment = {cfg.experiment}",
        f"seed = {cfg.seed}",
        f"runs = {cfg.runs}",
        f"initial_species = {cfg.initial_species}",
        f"generation_cap = {cfg.generation_cap}",
        f"output_dir = {cfg.output_dir}",
        f"generalization_steps = {cfg.generalization_steps}",
        f"max_size = {ev.max_size}",
        f"quota_fraction = {ev.quota_fraction:g}",
        f"g_max = {ev.g_max}",
        f"elite_per_species = {ev.elite_per_species}",
        f"crossover_probability = {ev.crossover_probability:g}",
        f"weight_mutation = {w.weight_mutation:g}",
        f"add_connection = {w.add_connection:g}",
        f"delete_connection = {w.delete_connection:g}",
        f"add_neuron = {w.add_neuron:g}",
        f"delete_neuron = {w.delete_neuron:g}",
    ]
    return "\n".join(lines) + "\n"
