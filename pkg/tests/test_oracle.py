import pytest

from src.core import (
    EXEC_STATE,
    ConcreteInterpreter,
    ConstructorRevertError,
    DomainTooLargeError,
    Oracle,
    Role,
    check_theorems,
    full_traverse,
    parse,
)
from src.config import settings

from .conftest import FIXED, RISKY


# ======= Interpreter =======
def test_deploy_runs_constructor(load):
    state = ConcreteInterpreter(load("mint")).deploy()
    assert state.sigma == {"owner": "P", "totalSupply": 100, "balances": {"P": 100}}
    assert not state.destroyed


def test_call_commits_on_success_and_rolls_back_on_revert(load):
    ast = load("mint")
    interpreter = ConcreteInterpreter(ast)
    state = interpreter.deploy()

    minted, outcome = interpreter.call(state, ast.function("mint"), "P", {"_value": 2})
    assert outcome == "success"
    assert minted.sigma["totalSupply"] == 102
    assert minted.sigma["balances"]["P"] == 102
    assert state.sigma["totalSupply"] == 100

    rejected, outcome = interpreter.call(state, ast.function("mint"), "O", {"_value": 2})
    assert outcome == "revert"
    assert rejected is state
    assert interpreter.executions == 2


def test_unwritten_numeric_entries_start_at_seed(load):
    ast = load("transfer")
    interpreter = ConcreteInterpreter(ast)
    state = interpreter.deploy()
    moved, outcome = interpreter.call(state, ast.function("transfer"), "O", {"_to": "Q", "_value": 2})
    assert outcome == "success"
    assert moved.sigma["balances"] == {"P": 100, "O": 0, "Q": 4}


def test_run_records_changes_per_key_expression(load):
    ast = load("param")
    interpreter = ConcreteInterpreter(ast)
    state = interpreter.deploy()
    moved, outcome, effects = interpreter.run(state, ast.function("transfer"), "P", {"_to": "P", "_value": 2})
    assert outcome == "success"
    assert effects == {"balances": {"msg.sender": -3, "_to": 2, "owner": 1}}
    assert moved.sigma["balances"]["P"] == 100

    _, outcome, effects = interpreter.run(state, ast.function("updateFee"), "O", {"_fee": 2})
    assert outcome == "revert"
    assert effects == {}


def test_selfdestruct_is_terminal(load):
    ast = load("tokeer_fn")
    interpreter = ConcreteInterpreter(ast)
    state = interpreter.deploy()
    destroyed, outcome = interpreter.call(state, ast.function("destroy"), "P", {})
    assert outcome == "selfdestruct"
    assert destroyed.destroyed
    assert destroyed.ether["contract"] == 0

    again, outcome = interpreter.call(destroyed, ast.function("withdraw"), "P", {"_value": 1})
    assert outcome == "selfdestruct"
    assert again is destroyed
    assert interpreter.executions == 1


def test_reverting_constructor():
    ast = parse("contract C { uint x; constructor() { require(x == 0); } }")
    with pytest.raises(ConstructorRevertError):
        ConcreteInterpreter(ast).deploy()


# ======= Traversal =======
def test_mint_witness_at_depth_one(load):
    traversal = full_traverse(load("mint"), 1)
    assert traversal.witnesses
    assert all(witness.functions == ("mint",) for witness in traversal.witnesses)
    assert any({"totalSupply", EXEC_STATE} <= witness.branch_vars for witness in traversal.witnesses)


def test_view_only_contract_has_no_witnesses():
    ast = parse(
        """
        contract Reader {
            address owner;
            uint256 total;
            constructor() { owner = msg.sender; }
            function get() public view returns (uint256) { return total; }
        }
        """
    )
    traversal = full_traverse(ast, 2)
    assert traversal.witnesses == []
    assert traversal.runs == 2 + 4


def test_pause_then_transfer_witness(load):
    traversal = full_traverse(load("pause"), 2)
    chained = traversal.by_functions()[("setPaused", "transfer")]
    assert any(witness.divergence == 0 and EXEC_STATE in witness.branch_vars for witness in chained)
    record = chained[0].to_dict()
    assert record["roles_a"][record["divergence"]] == "privileged"
    assert record["roles_b"][record["divergence"]] == "ordinary"


def test_oracle_executions_count_every_sequence(load):
    ast = load("mint")
    width = len(Oracle(ast).choices())
    traversal = full_traverse(ast, 2)
    assert traversal.executions == 2 * width + (2 * width) ** 2


def test_oracle_rejects_too_deep_traversal(load):
    with pytest.raises(DomainTooLargeError):
        full_traverse(load("mint"), settings.oracle_max_depth + 1)


# ======= Theorems =======
@pytest.mark.parametrize("name", RISKY + FIXED)
def test_corpus_satisfies_theorems(load, name):
    report = check_theorems(load(name), 3)
    assert report.violations == [], [violation.to_dict() for violation in report.violations]
    assert report.analyzer_executions <= report.oracle_executions


@pytest.mark.parametrize("name", ["pied_fp", "pied_fn", "safe_token"])
def test_regression_contracts_satisfy_theorems(load, name):
    assert check_theorems(load(name), 2).ok


def test_dropping_label_propagation_breaks_completeness(load):
    report = check_theorems(load("pause"), 2, propagate_labels=False)
    assert report.of("T1")
    assert ("setPaused", "transfer") in {violation.functions for violation in report.of("T1")}


def test_ignoring_labels_in_difference_breaks_branch_summaries(load):
    report = check_theorems(load("pause"), 2, include_labels=False)
    assert report.of("T3")


def test_report_serialization(load):
    record = check_theorems(load("mint"), 1).to_dict()
    assert record["contract"] == "Mintable"
    assert record["violations"] == []
    assert record["ok"]
    assert record["oracle_executions"] > 0 and record["analyzer_executions"] > 0


# ======= Mirrored ordinary steps =======
def test_ordinary_step_runs_from_privileged_position(load):
    oracle = Oracle(load("transfer"))
    state = oracle.interpreter.deploy()
    call = next(choice for choice in oracle.choices() if choice.function == "transfer" and choice.args == ("other", 2))
    as_privileged, privileged_view = oracle.step(state, call, Role.PRIVILEGED)
    as_ordinary, ordinary_view = oracle.step(state, call, Role.ORDINARY)
    assert privileged_view == ordinary_view
    assert privileged_view["balances"] == frozenset({("msg.sender", -2), ("_to", 2)})
    assert as_privileged.sigma["balances"] == {"P": 98, "O": 4}
    assert as_ordinary.sigma["balances"] == {"P": 98, "O": 4}
    assert as_ordinary.sigma["owner"] == "P"


def test_balance_asymmetry_alone_is_not_a_witness(load):
    traversal = full_traverse(load("transfer"), 2)
    chained = traversal.by_functions().get(("transfer", "transfer"), [])
    assert not [
        witness for witness in chained
        if witness.roles_a == (Role.ORDINARY, Role.PRIVILEGED) and witness.roles_b == (Role.ORDINARY, Role.ORDINARY)
    ]


def test_symmetric_transfer_has_no_witnesses(load):
    assert full_traverse(load("fixed_transfer"), 2).witnesses == []


def test_fee_to_owner_contract_satisfies_theorems(load):
    report = check_theorems(load("fixed_param"), 1)
    assert report.ok, [violation.to_dict() for violation in report.violations]
    assert report.witnesses == 0
