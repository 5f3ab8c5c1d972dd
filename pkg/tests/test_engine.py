import pytest

from src.core import (
    ETHER,
    EXEC_STATE,
    ExecState,
    IterativeAnalyzer,
    SymbolicEngine,
    UnknownVariableError,
    build_facts,
    exec_constructor,
    identify_privileged,
    parse,
    related_funcs_search,
)


# ======= Facts =======
def test_dependence_facts_of_transfer_contract(load):
    ast = load("transfer")
    facts = build_facts(ast)
    assert facts.writes["owner_transfer"] == frozenset({"balances"})
    assert {"balances", "owner"} <= facts.reads["owner_transfer"]
    assert "owner" in facts.caller_guards["owner_transfer"]
    assert not facts.caller_guards.get("transfer")


def test_related_functions_read_or_write_the_variables(load):
    ast = load("mint")
    facts = build_facts(ast)
    related = related_funcs_search(ast, facts, ["totalSupply"])
    assert "mint" in related
    assert "transfer" not in related
    assert set(related_funcs_search(ast, facts, ["balances"])) == {"mint", "transfer"}


def test_related_functions_of_guard_variable(load):
    ast = load("pause")
    facts = build_facts(ast)
    assert set(related_funcs_search(ast, facts, ["paused"])) == {"setPaused", "transfer"}
    assert related_funcs_search(ast, facts, []) == ()
    assert related_funcs_search(ast, facts, [EXEC_STATE]) == ()
    with pytest.raises(UnknownVariableError):
        related_funcs_search(ast, facts, ["missing"])


def test_facts_dump_is_serializable(load):
    dump = build_facts(load("pause")).to_dict()
    assert set(dump) == {"reads", "writes", "data_dep", "ctrl_dep", "caller_guards"}
    assert "paused" in dump["writes"]["setPaused"]


# ======= Privileged variables =======
def test_owner_is_privileged(load):
    for name in ("transfer", "mint", "pause", "tokeer_fn", "safe_token"):
        ast = load(name)
        assert identify_privileged(ast, build_facts(ast)) == ("owner",)


def test_publicly_writable_address_is_not_privileged(load):
    ast = load("r13_auction")
    assert identify_privileged(ast, build_facts(ast)) == ()


def test_transferable_ownership_stays_privileged():
    ast = parse(
        """
        contract Owned {
            address owner;
            address admin;
            constructor() { owner = msg.sender; }
            function setAdmin(address a) public {
                require(msg.sender == owner);
                admin = a;
            }
            function transferOwnership(address a) public {
                require(msg.sender == owner);
                owner = a;
            }
        }
        """
    )
    assert identify_privileged(ast, build_facts(ast)) == ("owner", "admin")


# ======= Execution =======
def test_only_owner_function_reverts_for_ordinary_caller(load):
    ast = load("transfer")
    engine = SymbolicEngine(ast)
    state = engine.initial_state()
    pairs = engine.execute_pair(ast.function("owner_transfer"), state)
    assert pairs
    assert all(pair.ordinary.exec_state is ExecState.REVERT for pair in pairs)
    assert any(pair.privileged.exec_state is ExecState.SUCCESS for pair in pairs)
    assert engine.executions == 2


def test_transfer_succeeds_for_both_callers(load):
    ast = load("transfer")
    engine = SymbolicEngine(ast)
    pairs = engine.execute_pair(ast.function("transfer"), engine.initial_state())
    assert any(
        pair.privileged.exec_state is ExecState.SUCCESS and pair.ordinary.exec_state is ExecState.SUCCESS
        for pair in pairs
    )


def test_trail_records_function_and_role(load):
    ast = load("mint")
    engine = SymbolicEngine(ast)
    pair = engine.execute_pair(ast.function("mint"), engine.initial_state())[0]
    assert pair.privileged.trail == (("mint", "privileged"),)
    assert pair.ordinary.trail == (("mint", "ordinary"),)


def test_selfdestruct_state_is_terminal(load):
    ast = load("tokeer_fn")
    engine = SymbolicEngine(ast)
    pairs = engine.execute_pair(ast.function("destroy"), engine.initial_state())
    destroyed = [pair.privileged for pair in pairs if pair.privileged.exec_state is ExecState.SELFDESTRUCT]
    assert destroyed
    state = destroyed[0]
    assert set(ast.state_var_names) | {ETHER, EXEC_STATE} <= state.theta

    again = engine.execute_pair(ast.function("withdraw"), state)
    assert all(pair.privileged is state and pair.ordinary is state for pair in again)


def test_constructor_state(load):
    state = exec_constructor(load("mint"))
    assert state.exec_state is ExecState.SUCCESS
    assert not state.theta
    assert set(state.sigma) == {"owner", "totalSupply", "balances"}


def test_revert_keeps_source_labels(load):
    ast = load("pause")
    engine = SymbolicEngine(ast)
    state = engine.initial_state().with_labels({"balances"})
    pairs = engine.execute_pair(ast.function("transfer"), state)
    reverted = [
        successor
        for pair in pairs
        for successor in (pair.privileged, pair.ordinary)
        if successor.exec_state is ExecState.REVERT
    ]
    assert reverted
    for successor in reverted:
        assert successor.sigma == state.sigma
        assert successor.theta - {EXEC_STATE} == state.theta - {EXEC_STATE}
        assert EXEC_STATE in successor.theta


# ======= Key aliasing =======
def test_key_aliasing_is_part_of_pairing(load):
    ast = load("fixed_param")
    engine = SymbolicEngine(ast)
    pairs = engine.execute_pair(ast.function("transfer"), engine.initial_state())
    succeeded = [pair for pair in pairs if pair.privileged.exec_state is ExecState.SUCCESS]
    aliased = ("alias", "_to", "msg.sender")
    assert {pair.privileged.facts[aliased] for pair in succeeded} == {True, False}
    for pair in succeeded:
        assert pair.ordinary.exec_state is ExecState.SUCCESS
        assert pair.ordinary.facts[aliased] == pair.privileged.facts[aliased]
        assert not pair.ordinary.facts.get(("alias", "_to", "owner"), False)


def test_two_address_params_aliasing_privileged_variable():
    ast = parse(
        """
        contract Ledger {
            address owner;
            mapping(address => uint256) balances;
            constructor() { owner = msg.sender; balances[msg.sender] = 10; }
            function move(address _from, address _to, uint256 _value) public {
                require(msg.sender == _from);
                require(balances[_from] >= _value);
                balances[_from] -= _value;
                balances[_to] += _value;
            }
        }
        """
    )
    engine = SymbolicEngine(ast)
    pairs = engine.execute_pair(ast.function("move"), engine.initial_state())
    succeeded = [pair for pair in pairs if pair.privileged.exec_state is ExecState.SUCCESS]
    assert succeeded
    for pair in succeeded:
        shared = pair.privileged.facts.keys() & pair.ordinary.facts.keys()
        alias_keys = [key for key in shared if key[0] == "alias"]
        assert all(pair.privileged.facts[key] == pair.ordinary.facts[key] for key in alias_keys)


@pytest.mark.parametrize("name", ["fixed_transfer", "fixed_param"])
def test_symmetric_transfers_give_no_differences(load, name):
    assert IterativeAnalyzer(load(name)).analyze().D == []
