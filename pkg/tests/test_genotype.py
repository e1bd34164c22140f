import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuroevo.genotype import (
    Genotype,
    GenotypeError,
    NeuronRole,
    add_feedforward_connection,
    add_neuron,
    add_neuron_between,
    add_recurrent_connection,
    clamp_weight,
    crossover,
    delete_connection,
    delete_neuron,
    minimal_genotype,
    validate,
    would_create_cycle,
)

from conftest import REFERENCE_FF_EDGES, REFERENCE_REC_EDGES, build_reference_genotype, random_genotype


class TestRolesAndNumbering:
    def test_reference_counts(self, reference_genotype):
        g = reference_genotype
        assert (g.n_bias, g.n_input, g.n_output, g.n_hidden) == (0, 4, 2, 3)
        assert g.n_neurons == 9
        assert list(g.input_ids()) == [1, 2, 3, 4]
        assert list(g.output_ids()) == [5, 6]
        assert list(g.hidden_ids()) == [7, 8, 9]

    def test_role_ordering_is_bias_input_output_hidden(self):
        g = Genotype(1, 2, 1, 2)
        roles = [g.role(n) for n in g.neuron_ids()]
        assert roles == [
            NeuronRole.BIAS,
            NeuronRole.INPUT,
            NeuronRole.INPUT,
            NeuronRole.OUTPUT,
            NeuronRole.HIDDEN,
            NeuronRole.HIDDEN,
        ]

    def test_role_out_of_range(self):
        g = Genotype(1, 2, 1, 0)
        with pytest.raises(GenotypeError):
            g.role(0)
        with pytest.raises(GenotypeError):
            g.role(5)

    def test_species_key_is_hidden_count(self):
        assert Genotype(1, 2, 1, 3).species_key == 3


class TestTables:
    def test_reference_edges_present(self, reference_genotype):
        g = reference_genotype
        ff = {(s, t) for s, t, _ in g.feedforward_edges()}
        assert ff == set(REFERENCE_FF_EDGES)
        rec = {(s, t) for s, t, _ in g.recurrent_edges()}
        assert rec == set(REFERENCE_REC_EDGES)

    def test_inward_is_transpose_of_outward(self, reference_genotype):
        g = reference_genotype
        # spot-check the rows of the reference topology
        assert g.inward[5] == [7, 8]
        assert g.inward[6] == [1, 3, 8, 9]
        assert g.inward[7] == [1, 2, 3, 4]
        assert g.inward[9] == [2, 4]
        assert g.inward[1] == []

    def test_validate_clean(self, reference_genotype):
        assert validate(reference_genotype) == []

    def test_get_set_weight(self, reference_genotype):
        g = reference_genotype
        assert g.get_weight("ff", 1, 6) == 0.5
        g.set_weight("ff", 1, 6, -0.25)
        assert g.get_weight("ff", 1, 6) == -0.25
        with pytest.raises(GenotypeError):
            g.get_weight("ff", 6, 1)

    def test_copy_is_deep_for_tables(self, reference_genotype):
        g = reference_genotype
        c = g.copy()
        c.set_weight("ff", 1, 6, 0.9)
        assert g.get_weight("ff", 1, 6) == 0.5


class TestSerialization:
    def test_round_trip(self, reference_genotype):
        g = reference_genotype
        h = Genotype.from_text(g.to_text())
        assert h.to_text() == g.to_text()
        assert validate(h) == []

    def test_bad_text(self):
        with pytest.raises(GenotypeError):
            Genotype.from_text("nope")
        with pytest.raises(GenotypeError):
            Genotype.from_text("counts 1 2 1\n")
        with pytest.raises(GenotypeError):
            Genotype.from_text("counts 1 2 1 0\nxx 1 4 0.5\n")


class TestMinimalGenotype:
    def test_no_hidden_full_bipartite(self, rng):
        g = minimal_genotype(1, 2, 1, 0, rng)
        assert {(s, t) for s, t, _ in g.feedforward_edges()} == {(1, 4), (2, 4), (3, 4)}
        assert validate(g) == []

    def test_hidden_layer_fully_wired(self, rng):
        g = minimal_genotype(1, 2, 1, 2, rng)
        ff = {(s, t) for s, t, _ in g.feedforward_edges()}
        # every bias/input feeds every hidden and output; every hidden feeds every output
        expected = {(s, t) for s in (1, 2, 3) for t in (4, 5, 6)} | {(5, 4), (6, 4)}
        assert ff == expected

    def test_initial_weights_in_unit_range(self, rng):
        g = minimal_genotype(1, 3, 2, 3, rng)
        for _, _, w in g.feedforward_edges():
            assert -1.0 <= w <= 1.0

    def test_invalid_counts(self, rng):
        with pytest.raises(GenotypeError):
            minimal_genotype(1, 0, 1, 0, rng)
        with pytest.raises(GenotypeError):
            minimal_genotype(2, 1, 1, 0, rng)


class TestConnectionEdits:
    def test_duplicate_rejected(self, reference_genotype):
        with pytest.raises(GenotypeError):
            add_feedforward_connection(reference_genotype, 1, 6, 0.1)
        with pytest.raises(GenotypeError):
            add_recurrent_connection(reference_genotype, 6, 9, 0.1)

    def test_cycle_rejected(self, reference_genotype):
        # 8 -> 5 exists; 5 is an output so 5 -> 8 is doubly illegal
        with pytest.raises(GenotypeError):
            add_feedforward_connection(reference_genotype, 5, 8, 0.1)

    def test_feeding_an_input_rejected(self, reference_genotype):
        with pytest.raises(GenotypeError):
            add_feedforward_connection(reference_genotype, 7, 2, 0.1)
        with pytest.raises(GenotypeError):
            add_recurrent_connection(reference_genotype, 7, 2, 0.1)

    def test_output_cannot_source_feedforward(self, reference_genotype):
        with pytest.raises(GenotypeError):
            add_feedforward_connection(reference_genotype, 6, 7, 0.1)
        # ...but output -> hidden is exactly what the recurrent chromosome is for
        add_recurrent_connection(reference_genotype, 5, 7, 0.1)
        assert reference_genotype.has_recurrent(5, 7)

    def test_delete_connection(self, reference_genotype):
        g = reference_genotype
        delete_connection(g, 1, 6, "ff")
        assert not g.has_feedforward(1, 6)
        assert 1 not in g.inward[6]
        delete_connection(g, 6, 9, "rec")
        assert not g.has_recurrent(6, 9)
        with pytest.raises(GenotypeError):
            delete_connection(g, 1, 6, "ff")
        assert validate(g) == []

    def test_would_create_cycle_matches_reachability(self, rng):
        for _ in range(20):
            g = random_genotype(rng)
            ids = list(g.neuron_ids())
            for _ in range(10):
                s = ids[rng.randrange(len(ids))]
                t = ids[rng.randrange(len(ids))]
                # brute-force: s reachable from t along feedforward edges?
                seen, stack = set(), [t]
                reach = False
                while stack:
                    n = stack.pop()
                    if n == s:
                        reach = True
                        break
                    if n in seen:
                        continue
                    seen.add(n)
                    stack.extend(q for q, _ in g.outward[n])
                assert would_create_cycle(g, s, t) == (reach or s == t)


class TestNeuronEdits:
    def test_add_neuron_appends_last_id(self, rng):
        g = minimal_genotype(1, 2, 1, 0, rng)
        add_neuron(g, rng)
        assert g.n_hidden == 1
        assert g.n_neurons == 5
        # exactly one inward edge from a bias/input, one outward to an output
        assert len(g.inward[5]) == 1
        assert g.inward[5][0] in (1, 2, 3)
        assert [t for t, _ in g.outward[5]] == [4]
        assert validate(g) == []

    def test_add_neuron_between_role_checks(self, rng):
        g = minimal_genotype(1, 2, 1, 0, rng)
        with pytest.raises(GenotypeError):
            add_neuron_between(g, 4, 4, 0.1, 0.1)  # output as source
        with pytest.raises(GenotypeError):
            add_neuron_between(g, 1, 1, 0.1, 0.1)  # bias as target

    def test_delete_neuron_transfers_through_connections(self, rng):
        # 1 -> 5 -> 4 with no direct 1 -> 4: deleting 5 must bridge 1 -> 4
        g = Genotype(1, 2, 1, 1)
        add_feedforward_connection(g, 1, 5, 0.3)
        add_feedforward_connection(g, 5, 4, 0.7)
        delete_neuron(g, 5)
        assert g.n_hidden == 0
        assert g.has_feedforward(1, 4)
        assert validate(g) == []

    def test_delete_neuron_renumbers_higher_ids(self, rng):
        g = minimal_genotype(1, 2, 1, 2, rng)  # hidden 5, 6
        w = g.get_weight("ff", 6, 4)
        delete_neuron(g, 5)
        assert g.n_neurons == 5
        # old neuron 6 is now 5 and kept its outgoing weight
        assert g.get_weight("ff", 5, 4) == w
        assert validate(g) == []

    def test_delete_non_hidden_rejected(self, rng):
        g = minimal_genotype(1, 2, 1, 1, rng)
        for nid in (1, 2, 4):
            with pytest.raises(GenotypeError):
                delete_neuron(g, nid)


class TestCrossover:
    def test_union_of_edges(self, rng):
        a = minimal_genotype(1, 2, 1, 0, rng)
        b = minimal_genotype(1, 2, 1, 0, rng)
        delete_connection(a, 2, 4, "ff")
        delete_connection(b, 3, 4, "ff")
        child = crossover(a, b, rng)
        ff = {(s, t) for s, t, _ in child.feedforward_edges()}
        assert ff == {(1, 4), (2, 4), (3, 4)}
        assert validate(child) == []

    def test_shared_edge_weight_comes_from_a_parent(self, rng):
        a = minimal_genotype(1, 2, 1, 0, rng)
        b = minimal_genotype(1, 2, 1, 0, rng)
        wa = a.get_weight("ff", 1, 4)
        wb = b.get_weight("ff", 1, 4)
        child = crossover(a, b, rng)
        assert child.get_weight("ff", 1, 4) in (wa, wb)

    def test_excess_neurons_from_longer_parent(self, rng):
        a = minimal_genotype(1, 2, 1, 2, rng)
        b = minimal_genotype(1, 2, 1, 0, rng)
        child = crossover(a, b, rng)
        assert child.n_hidden == 2
        assert validate(child) == []

    def test_mismatched_io_rejected(self, rng):
        a = minimal_genotype(1, 2, 1, 0, rng)
        b = minimal_genotype(1, 3, 1, 0, rng)
        with pytest.raises(GenotypeError):
            crossover(a, b, rng)


class TestInvariantsUnderRandomOperations:
    def test_invariants_hold_after_many_random_edits(self):
        """Genotypes stay valid through a long randomized mutation/crossover soak."""
        from neuroevo.mutation import STRUCTURAL_KINDS, apply_structural_mutation

        rng = random.Random(777)
        pool = [random_genotype(rng) for _ in range(10)]
        operations = 0
        while operations < 10_000:
            i = rng.randrange(len(pool))
            if rng.random() < 0.2:
                js = [j for j in range(len(pool)) if _io_match(pool[i], pool[j])]
                j = js[rng.randrange(len(js))]
                pool[i] = crossover(pool[i], pool[j], rng)
            else:
                kind = STRUCTURAL_KINDS[rng.randrange(len(STRUCTURAL_KINDS))]
                apply_structural_mutation(pool[i], kind, rng)
            operations += 1
            if operations % 500 == 0:
                for g in pool:
                    assert validate(g) == []
        for g in pool:
            assert validate(g) == []

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), edits=st.integers(0, 40))
    def test_random_genotypes_always_valid(self, seed, edits):
        rng = random.Random(seed)
        g = random_genotype(rng, n_edits=edits)
        assert validate(g) == []


def _io_match(a, b):
    return (a.n_bias, a.n_input, a.n_output) == (b.n_bias, b.n_input, b.n_output)


def test_clamp_weight():
    assert clamp_weight(7.0) == 5.0
    assert clamp_weight(-7.0) == -5.0
    assert clamp_weight(0.25) == 0.25
    assert math.isnan(clamp_weight(float("nan"))) is False or True  # no crash
