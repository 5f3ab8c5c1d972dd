import pytest

from src.core import EdgeKind, NodeKind, build_facts, build_vpg, check_well_formed, parse
from src.core.property_graph import guarded_statements, writing_statements

from .conftest import FIXED, RISKY


def graph_of(ast):
    return build_vpg(ast, build_facts(ast))


def edge_kinds(graph, source, target):
    return set(graph.get_edge_data(source, target, default={}))


@pytest.mark.parametrize("name", RISKY + FIXED)
def test_corpus_graphs_are_well_formed(load, name):
    assert check_well_formed(graph_of(load(name))) == []


def test_node_kinds(load):
    graph = graph_of(load("transfer"))
    assert graph.nodes["state:balances"]["kind"] == NodeKind.STATE.value
    assert graph.nodes["local:transfer._to"]["kind"] == NodeKind.LOCAL.value
    assert graph.nodes["local:transfer._to"]["param"]
    assert graph.nodes["local:msg.sender"]["builtin"]
    statement = graph.nodes["stmt:transfer#1"]
    assert statement["kind"] == NodeKind.STATEMENT.value
    assert statement["target"] == "balances"
    assert statement["delta"] == "-"
    assert graph.graph["contract"] == "Example"


def test_data_flow_edges_connect_statements_and_variables(load):
    graph = graph_of(load("transfer"))
    assert EdgeKind.DFE.value in edge_kinds(graph, "stmt:transfer#1", "state:balances")
    assert EdgeKind.DFE.value in edge_kinds(graph, "state:balances", "stmt:transfer#0")
    assert EdgeKind.CFE.value in edge_kinds(graph, "stmt:transfer#0", "stmt:transfer#1")
    assert "stmt:owner_transfer#1" in writing_statements(graph, "balances")


def test_modifier_placeholder_flows_into_function_body(load):
    graph = graph_of(load("transfer"))
    assert EdgeKind.FCE.value in edge_kinds(graph, "stmt:onlyOwner#1", "stmt:owner_transfer#0")
    assert guarded_statements(graph, "owner")


def test_internal_call_edges():
    ast = parse(
        """
        contract Ledger {
            uint256 total;
            function credit(uint256 amount) internal {
                total += amount;
            }
            function deposit(uint256 value) public {
                credit(value);
            }
        }
        """
    )
    graph = graph_of(ast)
    assert EdgeKind.FCE.value in edge_kinds(graph, "stmt:deposit#0", "stmt:credit#0")
    assert EdgeKind.RFE.value in edge_kinds(graph, "local:credit.amount", "local:deposit.value")
    assert check_well_formed(graph) == []


def test_ill_typed_edge_is_reported(load):
    graph = graph_of(load("mint"))
    graph.add_edge("state:owner", "state:totalSupply", key=EdgeKind.CFE.value, kind=EdgeKind.CFE.value)
    assert check_well_formed(graph) == ["CFE state:owner -> state:totalSupply"]
