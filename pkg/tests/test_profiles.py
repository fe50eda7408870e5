import pytest

import properties

from fairkdiv.oracle import brute_force_profiles
from fairkdiv.profiles import (
    ProfileCapError,
    ProfileSet,
    best_profile,
    best_satisfaction,
    dominance_prune,
    edgeless_assignment,
    edgeless_profiles,
    merge_profile_sets,
    shift,
)

T1_ROWS = [(3, 2), (1, 2)]
T1_SET = {(0, 0), (1, 0), (3, 0), (4, 0), (0, 2), (0, 4), (1, 2), (3, 2)}


class TestEdgeless:
    def test_single_vertex(self):
        assert set(edgeless_profiles(2, [(5, 3)])) == {(0, 0), (5, 0), (0, 3)}

    def test_empty_list(self):
        assert set(edgeless_profiles(3, [])) == {(0, 0, 0)}

    def test_t1(self, t1_instance):
        # frozen from enumerating all 3^2 assignments of the two vertices
        got = edgeless_profiles(2, T1_ROWS)
        assert set(got) == T1_SET
        assert got == brute_force_profiles(t1_instance)

    def test_cap(self):
        with pytest.raises(ProfileCapError):
            edgeless_profiles(1, [(1,), (2,), (4,), (8,)], cap=3)


class TestMerge:
    def test_identity(self):
        s = ProfileSet(2, {(1, 2), (0, 0), (5, 1)})
        assert merge_profile_sets(ProfileSet.zero(2), s) == s

    def test_hand_enumeration(self):
        s = ProfileSet(2, {(1, 0), (0, 1)})
        assert set(merge_profile_sets(s, s)) == {(2, 0), (1, 1), (0, 2)}

    def test_edgeless_components_merge(self):
        left = edgeless_profiles(2, [(3, 2)])
        right = edgeless_profiles(2, [(1, 2)])
        assert set(merge_profile_sets(left, right)) == T1_SET

    def test_arity_mismatch(self):
        with pytest.raises(ValueError, match="arity"):
            merge_profile_sets(ProfileSet.zero(1), ProfileSet.zero(2))


class TestShift:
    def test_examples(self):
        assert set(shift(ProfileSet.zero(2), (2, 3))) == {(2, 3)}
        s = ProfileSet(2, {(1, 0), (0, 1)})
        assert shift(s, (0, 0)) == s
        assert set(shift(s, (1, 1))) == {(2, 1), (1, 2)}


class TestBestSatisfaction:
    def test_examples(self):
        assert best_satisfaction(ProfileSet.zero(2)) == 0
        assert best_satisfaction(ProfileSet(2, T1_SET)) == 2
        assert best_satisfaction(ProfileSet(2, {(5, 1), (3, 3), (1, 5)})) == 3

    def test_empty_raises(self):
        with pytest.raises(ValueError, match="empty"):
            best_satisfaction(ProfileSet(2, []))

    def test_best_profile_is_pareto_maximal(self):
        value, profile = best_profile(ProfileSet(2, T1_SET))
        assert value == 2 and profile == (3, 2)


class TestDominancePrune:
    def test_dominated_pair(self):
        assert set(dominance_prune(ProfileSet(2, {(1, 1), (2, 2)}))) == {(2, 2)}

    def test_antichain_unchanged(self):
        anti = ProfileSet(2, {(5, 1), (3, 3), (1, 5)})
        assert dominance_prune(anti) == anti

    def test_t1_frontier(self):
        pruned = dominance_prune(ProfileSet(2, T1_SET))
        assert set(pruned) == {(4, 0), (3, 2), (0, 4)}


class TestDumpFormat:
    def test_sorted_lines(self):
        s = ProfileSet(2, {(3, 2), (0, 4), (1, 0)})
        assert s.dump() == "0 4\n1 0\n3 2"

    def test_componentwise_max(self):
        s = ProfileSet(2, T1_SET)
        assert s.componentwise_max() == (4, 4)


class TestEdgelessAssignment:
    def test_recovers_target(self):
        rows = [(3, 2), (1, 2), (0, 5)]
        pset = edgeless_profiles(2, rows)
        for target in pset:
            assignment = edgeless_assignment(2, rows, target)
            got = [0, 0]
            for row, agent in zip(rows, assignment):
                if agent:
                    got[agent - 1] += row[agent - 1]
            assert tuple(got) == target

    def test_prefers_unassigned(self):
        assignment = edgeless_assignment(1, [(0,), (3,)], (3,))
        assert assignment == [0, 1]


class TestInvariants:
    def test_edgeless_oracle_equivalence(self):
        properties.prop_edgeless_oracle(150)

    def test_merge_algebra(self):
        properties.prop_merge_algebra(200)

    def test_merge_monotone(self):
        properties.prop_merge_monotone(200)

    def test_prune_preserves_best(self):
        properties.prop_prune_preserves_best(200)

    def test_profiles_bounded(self):
        properties.prop_profiles_bounded(150)
