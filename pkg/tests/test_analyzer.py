import pytest

from src.core import (
    EXEC_STATE,
    ExecState,
    IterativeAnalyzer,
    UniverseMismatchError,
    analyze,
    diff,
    full_traverse,
    lattice_bound,
    replay_chain,
)
from src.core.summaries import BooleanSummary, ExecStateSummary, MappingSummary, NumericSummary

from .conftest import RISKY


# ======= Summaries =======
def test_equal_summaries_give_no_difference():
    phi = {"x": NumericSummary(True, False, ("_v",)), EXEC_STATE: ExecStateSummary()}
    assert diff(phi, dict(phi), ()) is None


def test_difference_lists_only_differing_variables():
    phi_p = {"x": NumericSummary(True, False, ("_v",)), "y": NumericSummary(), EXEC_STATE: ExecStateSummary()}
    phi_o = {"x": NumericSummary(), "y": NumericSummary(), EXEC_STATE: ExecStateSummary.of(ExecState.REVERT)}
    difference = diff(phi_p, phi_o, ())
    assert difference.variables == ("x", EXEC_STATE)
    assert difference.entry("x").privileged.is_increased
    assert difference.entry("y") is None


def test_labeled_variables_join_the_difference():
    phi = {"x": NumericSummary(), "flag": BooleanSummary("false", "true")}
    difference = diff(phi, dict(phi), {"flag"})
    assert difference.variables == ("flag",)
    assert difference.entries[0].labeled
    assert diff(phi, dict(phi), {"flag"}, include_labels=False) is None


def test_labels_do_not_change_difference_identity():
    phi_p = {"m": MappingSummary((("msg.sender", NumericSummary(False, True, ("_v",))),))}
    phi_o = {"m": MappingSummary()}
    assert diff(phi_p, phi_o, ()) == diff(phi_p, phi_o, {"m"})


def test_summary_universes_must_match():
    with pytest.raises(UniverseMismatchError):
        diff({"x": NumericSummary()}, {"y": NumericSummary()}, ())


# ======= Analysis =======
@pytest.mark.parametrize("name", RISKY)
def test_analysis_converges_within_bound(load, name):
    ast = load(name)
    dset = analyze(ast)
    assert not dset.partial
    assert dset.rounds <= len(dset.D) + 1
    assert dset.bound == lattice_bound(ast)
    assert len(dset.D) == len(dset.S_next) == len(set(dset.D))
    assert dset.D


def test_mint_privileged_run_increases_supply(load):
    dset = analyze(load("mint"))
    first = next(difference for difference in dset.D if difference.trail == (("mint", "privileged"),))
    supply = first.entry("totalSupply")
    assert supply.privileged.is_increased
    assert {"totalSupply", "_value"} <= set(supply.privileged.related_const_var)
    assert supply.ordinary == NumericSummary()


def test_admitted_successors_carry_labels(load):
    dset = analyze(load("mint"))
    for difference in dset.D:
        state = dset.state_of(difference)
        assert {var for var in difference.variables if var in state.sigma} <= state.theta


def test_symmetric_contract_has_no_differences(load):
    dset = analyze(load("safe_token"))
    assert dset.privileged == ("owner",)
    assert dset.D == []
    assert dset.rounds == 1


def test_contract_without_privileged_variables_is_skipped(load):
    dset = analyze(load("r13_auction"))
    assert dset.privileged == ()
    assert dset.rounds == 0
    assert dset.executions == 0


def test_round_budget_marks_result_partial(load):
    dset = analyze(load("mint"), max_rounds=1)
    assert dset.partial
    assert dset.budget_reason == "max_rounds"
    assert dset.rounds == 1


def test_convergence_log_receives_each_round(load):
    records = []
    dset = IterativeAnalyzer(load("pause"), convergence_log=records.append).analyze()
    assert [record["round"] for record in records] == list(range(1, dset.rounds + 1))
    assert records[-1]["differences"] == len(dset.D)
    assert records[-1]["new_differences"] == 0


def test_executions_grow_with_differences_not_sequences(load):
    ast = load("mint")
    functions = len(ast.entry_points)
    analyzer_counts = [analyze(ast, max_rounds=depth).executions for depth in range(1, 5)]
    oracle_counts = [full_traverse(ast, depth).executions for depth in range(1, 4)]

    assert analyzer_counts[0] == 2 * functions
    final = analyze(ast)
    for before, after in zip(analyzer_counts, analyzer_counts[1:]):
        assert 0 <= after - before <= 2 * functions * len(final.D)
    for before, after in zip(oracle_counts, oracle_counts[1:]):
        assert after >= 2 * functions * before
    assert analyzer_counts[2] < oracle_counts[2]


def test_replay_chain_reaches_second_step(load):
    analyzer = IterativeAnalyzer(load("pause"))
    chains = replay_chain(analyzer, ["setPaused", "transfer"])
    assert chains
    for state, examined in chains:
        assert state.trail and state.trail[-1][0] == "setPaused"
        assert all(item.pair.function == "transfer" for item in examined)
