import pytest

import properties

from fairkdiv.cliquewidth import (
    EtaNode,
    ExpressionError,
    RhoNode,
    UnionNode,
    VertexNode,
    check_expression_matches,
    dp_node,
    evaluate_expression,
    parse_k_expression,
    solve_cliquewidth,
)
from fairkdiv.model import ConflictInstance, profile_of, validate_coloring
from fairkdiv.oracle import brute_force_optimum
from fairkdiv.profiles import ProfileSet

K3_TEXT = "(eta 1 2 (u (rho 2 1 (eta 1 2 (u (v 1 1) (v 2 2)))) (v 2 3)))"


class TestParse:
    def test_single_leaf(self):
        expr = parse_k_expression("(v 1 1)")
        assert isinstance(expr.root, VertexNode)
        assert expr.num_labels == 1

    def test_k2(self):
        expr = parse_k_expression("(eta 1 2 (u (v 1 1) (v 2 2)))")
        graph = evaluate_expression(expr)
        assert graph.edges == frozenset({(1, 2)})

    def test_eta_equal_labels_rejected(self):
        with pytest.raises(ExpressionError, match="distinct"):
            parse_k_expression("(eta 1 1 (v 1 1))")

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(ExpressionError, match="duplicate vertex"):
            parse_k_expression("(u (v 1 1) (v 2 1))")

    def test_budget_line(self):
        expr = parse_k_expression("cw 4\n(v 2 1)")
        assert expr.num_labels == 4
        with pytest.raises(ExpressionError, match="exceeds"):
            parse_k_expression("cw 1\n(v 2 1)")

    def test_syntax_errors(self):
        with pytest.raises(ExpressionError):
            parse_k_expression("(v 1)")
        with pytest.raises(ExpressionError):
            parse_k_expression("(w 1 2)")
        with pytest.raises(ExpressionError, match="trailing"):
            parse_k_expression("(v 1 1) junk")


class TestEvaluate:
    def test_k3(self):
        graph = evaluate_expression(parse_k_expression(K3_TEXT))
        assert graph.edges == frozenset({(1, 2), (1, 3), (2, 3)})

    def test_two_isolated_same_label(self):
        graph = evaluate_expression(parse_k_expression("(u (v 1 1) (v 1 2))"))
        assert graph.edges == frozenset()
        assert graph.labels == {1: 1, 2: 1}

    def test_relabel_single_vertex(self):
        graph = evaluate_expression(parse_k_expression("(rho 1 2 (v 1 1))"))
        assert graph.labels == {1: 2}

    def test_idempotent(self):
        expr = parse_k_expression(K3_TEXT)
        assert evaluate_expression(expr) == evaluate_expression(expr)


class TestCheckMatches:
    def test_k3_ok(self):
        expr = parse_k_expression(K3_TEXT)
        tri = ConflictInstance.build(3, 1, [(0, 1), (1, 2), (0, 2)], [[1] * 3])
        assert check_expression_matches(expr, tri) is None

    def test_k3_vs_path_reports_extra_edge(self):
        expr = parse_k_expression(K3_TEXT)
        path = ConflictInstance.build(3, 1, [(0, 1), (1, 2)], [[1] * 3])
        report = check_expression_matches(expr, path)
        assert report is not None and "adds edge" in report

    def test_unknown_vertex(self):
        expr = parse_k_expression("(u (v 1 1) (u (v 1 2) (u (v 1 3) (v 1 4))))")
        inst = ConflictInstance.build(3, 1, [], [[1] * 3])
        report = check_expression_matches(expr, inst)
        assert report is not None and "unknown vertex 4" in report


class TestSolve:
    def test_k3_two_agents(self):
        expr = parse_k_expression(K3_TEXT)
        inst = ConflictInstance.build(
            3, 2, [(0, 1), (1, 2), (0, 2)], [[5, 4, 3], [5, 4, 3]]
        )
        opt, profile, witness = solve_cliquewidth(inst, expr)
        assert opt == 4
        validate_coloring(inst, witness)
        assert profile_of(inst, witness) == profile

    def test_single_leaf(self):
        expr = parse_k_expression("(v 1 1)")
        inst = ConflictInstance.build(1, 1, [], [[9]])
        opt, _, witness = solve_cliquewidth(inst, expr)
        assert opt == 9
        assert witness == (frozenset({0}),)

    def test_cograph_two_cliques(self):
        text = "(u (eta 1 2 (u (v 1 1) (v 2 2))) (eta 1 2 (u (v 1 3) (v 2 4))))"
        expr = parse_k_expression(text)
        inst = ConflictInstance.build(4, 2, [(0, 1), (2, 3)], [[1] * 4] * 2)
        opt, _, witness = solve_cliquewidth(inst, expr)
        want, _ = brute_force_optimum(inst)
        assert opt == want == 2
        validate_coloring(inst, witness)

    def test_mismatch_raises(self):
        expr = parse_k_expression(K3_TEXT)
        path = ConflictInstance.build(3, 1, [(0, 1), (1, 2)], [[1] * 3])
        with pytest.raises(ExpressionError):
            solve_cliquewidth(path, expr)


class TestDpNode:
    def test_vertex_cells(self):
        inst = ConflictInstance.build(1, 1, [], [[7]])
        table = dp_node(VertexNode(label=1, vertex=1), [], inst)
        assert table == {
            (0,): ProfileSet(1, {(0,)}),
            (1,): ProfileSet(1, {(7,)}),
        }

    def test_eta_filters_conflicting_keys(self):
        inst = ConflictInstance.build(2, 1, [(0, 1)], [[2, 3]])
        child = {
            (0,): ProfileSet(1, {(0,)}),
            (0b11,): ProfileSet(1, {(5,)}),
        }
        table = dp_node(EtaNode(1, 2, VertexNode(1, 1)), [child], inst)
        assert table == {(0,): ProfileSet(1, {(0,)})}

    def test_rho_moves_cells(self):
        inst = ConflictInstance.build(1, 1, [], [[7]])
        child = dp_node(VertexNode(label=1, vertex=1), [], inst)
        table = dp_node(RhoNode(1, 2, VertexNode(1, 1)), [child], inst)
        assert table == {
            (0,): ProfileSet(1, {(0,)}),
            (0b10,): ProfileSet(1, {(7,)}),
        }

    def test_union_adds_profiles(self):
        inst = ConflictInstance.build(2, 1, [], [[2, 3]])
        left = dp_node(VertexNode(1, 1), [], inst)
        right = dp_node(VertexNode(1, 2), [], inst)
        table = dp_node(UnionNode(VertexNode(1, 1), VertexNode(1, 2)), [left, right], inst)
        assert set(table[(1,)]) == {(2,), (3,), (5,)}
        assert set(table[(0,)]) == {(0,)}


class TestInvariants:
    def test_node_soundness(self):
        properties.prop_cw_node_soundness(80)

    def test_root_completeness(self):
        properties.prop_cw_root_completeness(120)

    def test_eta_postcondition(self):
        properties.prop_cw_eta_filter(120)

    def test_rho_postcondition(self):
        properties.prop_cw_rho_filter(120)

    def test_union_symmetric(self):
        properties.prop_cw_union_symmetric(100)
