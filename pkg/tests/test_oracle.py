import pytest

import properties

from fairkdiv.model import ConflictInstance, profile_of, validate_coloring
from fairkdiv.oracle import (
    EnumerationCapError,
    brute_force_optimum,
    brute_force_profiles,
)
from fairkdiv.profiles import edgeless_profiles


def triangle(k=2, profits=(5, 4, 3)):
    rows = [list(profits) for _ in range(k)]
    return ConflictInstance.build(3, k, [(0, 1), (1, 2), (0, 2)], rows)


class TestBruteForceProfiles:
    def test_single_edge(self):
        inst = ConflictInstance.build(2, 1, [(0, 1)], [[3, 1]])
        assert set(brute_force_profiles(inst)) == {(0,), (3,), (1,)}

    def test_edgeless_matches_direct_enumeration(self, t1_instance):
        rows = [(3, 2), (1, 2)]
        assert brute_force_profiles(t1_instance) == edgeless_profiles(2, rows)

    def test_triangle_no_shared_vertex(self):
        pset = brute_force_profiles(triangle())
        assert (5, 4) in pset
        # in a triangle each class holds at most one vertex
        assert all(q[0] in (0, 5, 4, 3) and q[1] in (0, 5, 4, 3) for q in pset)
        assert (5, 5) not in pset

    def test_cap(self):
        inst = ConflictInstance.build(4, 2, [], [[1] * 4, [1] * 4])
        with pytest.raises(EnumerationCapError):
            brute_force_profiles(inst, cap=10)


class TestBruteForceOptimum:
    def test_triangle(self):
        value, witness = brute_force_optimum(triangle())
        assert value == 4
        validate_coloring(triangle(), witness)
        assert min(profile_of(triangle(), witness)) == 4

    def test_path_unit_profits(self):
        # a1-b1-a2-b2 as a path on vertices 0..3
        inst = ConflictInstance.build(
            4, 2, [(0, 1), (1, 2), (2, 3)], [[1] * 4, [1] * 4]
        )
        value, witness = brute_force_optimum(inst)
        assert value == 2
        validate_coloring(inst, witness)

    def test_more_agents_than_items(self):
        inst = ConflictInstance.build(2, 3, [], [[4, 4]] * 3)
        value, _ = brute_force_optimum(inst)
        assert value == 0

    def test_witness_deterministic(self):
        inst = ConflictInstance.build(3, 2, [(0, 1)], [[2, 2, 2], [2, 2, 2]])
        first = brute_force_optimum(inst)
        second = brute_force_optimum(inst)
        assert first == second


class TestInvariants:
    def test_witnesses_validate(self):
        properties.prop_oracle_witness_valid(200)

    def test_mis_cross_oracle(self):
        properties.prop_oracle_mis_agreement(150)

    def test_edge_monotonicity(self):
        properties.prop_oracle_edge_monotone(150)
