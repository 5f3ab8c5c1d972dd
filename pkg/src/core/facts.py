"""
Модуль фактов зависимостей.

Строит по дереву контракта множества читаемых и записываемых переменных
состояния, отношения зависимости по данным и по управлению, а также
ищет функции, связанные с разностью.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, TypedDict, Union

from .abstractions import UnknownVariableError
from .syntax import (
    Assign,
    Binary,
    Builtin,
    Call,
    ContractAST,
    EtherTransfer,
    Expression,
    FunctionDecl,
    Identifier,
    If,
    Index,
    Placeholder,
    Require,
    Return,
    Revert,
    SelfDestruct,
    Statement,
    StatementId,
    VarDecl,
    iter_expressions,
    iter_statements,
    statement_expressions,
)


# Настройка логирования
logger = logging.getLogger(__name__)

ETHER = "ether"
EXEC_STATE = "exec_state"
SYNTHETIC_VARS = (ETHER, EXEC_STATE)


# ======= TypedDicts =======
class DependenceFactsTypeDict(TypedDict):
    reads: Dict[str, List[str]]
    writes: Dict[str, List[str]]
    data_dep: List[List[str]]
    ctrl_dep: List[List[str]]
    caller_guards: Dict[str, List[str]]


# ======= DataClasses =======
@dataclass(frozen=True)
class DependenceFacts:
    """
    Факты зависимостей контракта.

    Атрибуты:
        reads: Функция -> читаемые переменные состояния (с модификаторами и вызовами)
        writes: Функция -> записываемые переменные состояния
        data_dep: Пары (цель, источник) зависимости по данным
        ctrl_dep: Пары (оператор, переменная условия)
        caller_guards: Функция -> переменные, с которыми безусловно сравнивается msg.sender
        guard_reads: Функция -> переменные, читаемые её условиями
        calls: Функция -> непосредственно вызываемые функции
    """
    reads: Dict[str, FrozenSet[str]]
    writes: Dict[str, FrozenSet[str]]
    data_dep: FrozenSet[Tuple[str, str]]
    ctrl_dep: FrozenSet[Tuple[StatementId, str]]
    caller_guards: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    guard_reads: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    calls: Dict[str, FrozenSet[str]] = field(default_factory=dict)

    def guarded_by(self, statement: StatementId) -> FrozenSet[str]:
        """Переменные условий, от которых зависит оператор."""
        return frozenset(var for sid, var in self.ctrl_dep if sid == statement)

    def to_dict(self) -> DependenceFactsTypeDict:
        return {
            "reads": {name: sorted(vars_) for name, vars_ in sorted(self.reads.items())},
            "writes": {name: sorted(vars_) for name, vars_ in sorted(self.writes.items())},
            "data_dep": sorted([target, source] for target, source in self.data_dep),
            "ctrl_dep": sorted([str(sid), var] for sid, var in self.ctrl_dep),
            "caller_guards": {name: sorted(vars_) for name, vars_ in sorted(self.caller_guards.items())},
        }


# ======= Helpers =======
def qualify(owner: str, name: str) -> str:
    """Полное имя параметра или локальной переменной."""
    return f"{owner}.{name}"


def sender_comparisons(expression: Expression) -> Set[str]:
    """Переменные, с которыми условие сравнивает msg.sender в конъюнкции."""
    if isinstance(expression, Binary) and expression.op == "&&":
        return sender_comparisons(expression.left) | sender_comparisons(expression.right)
    if isinstance(expression, Binary) and expression.op == "==":
        left, right = expression.left, expression.right
        if isinstance(left, Builtin) and left.name == "msg.sender" and isinstance(right, Identifier):
            return {right.name}
        if isinstance(right, Builtin) and right.name == "msg.sender" and isinstance(left, Identifier):
            return {left.name}
    return set()


def terminates(body: Tuple[Statement, ...]) -> bool:
    """Заканчивается ли ветвь откатом или возвратом."""
    return bool(body) and isinstance(body[-1], (Revert, Return))


# ======= MainClass =======
class FactsBuilder:
    """
    Построитель фактов зависимостей.

    Атрибуты:
        ast: Проверенное дерево контракта
    """

    def __init__(self, ast: ContractAST) -> None:
        self.ast = ast
        self.state_vars: Set[str] = set(ast.state_var_names)
        self.data_dep: Set[Tuple[str, str]] = set()
        self.ctrl_dep: Set[Tuple[StatementId, str]] = set()
        self.placeholder_guards: Dict[str, FrozenSet[str]] = {}

    # ------- Имена -------
    def resolve(self, owner: str, name: str, locals_: Set[str]) -> str:
        if name in locals_:
            return qualify(owner, name)
        return name

    def expression_vars(self, owner: str, expression: Optional[Expression], locals_: Set[str]) -> Set[str]:
        """Все имена, читаемые выражением (переменные состояния, локальные, встроенные)."""
        names: Set[str] = set()
        for node in iter_expressions(expression):
            if isinstance(node, Identifier):
                names.add(self.resolve(owner, node.name, locals_))
            elif isinstance(node, Index):
                names.add(node.base)
            elif isinstance(node, Builtin):
                names.add(node.name)
        return names

    def owner_locals(self, owner: str) -> Set[str]:
        function = self.ast.function(owner)
        names: Set[str] = set()
        body: Tuple[Statement, ...] = ()
        if function is not None:
            names |= {param.name for param in function.params}
            body = function.body
        else:
            modifier = self.ast.modifier(owner)
            if modifier is not None:
                body = modifier.body
        names |= {s.name for s in iter_statements(body) if isinstance(s, VarDecl)}
        return names

    # ------- Локальные факты -------
    def local_reads_writes(self, owner: str, body: Tuple[Statement, ...]) -> Tuple[Set[str], Set[str], Set[str]]:
        """Чтения, записи и прямые вызовы одного тела (без раскрытия)."""
        locals_ = self.owner_locals(owner)
        reads: Set[str] = set()
        writes: Set[str] = set()
        calls: Set[str] = set()

        for statement in iter_statements(body):
            for expression in statement_expressions(statement):
                reads |= {
                    name for name in self.expression_vars(owner, expression, locals_) if name in self.state_vars
                }

            if isinstance(statement, Assign):
                target = statement.target
                name = target.base if isinstance(target, Index) else target.name
                if name in self.state_vars and name not in locals_:
                    writes.add(name)
                    if statement.op != "=":
                        reads.add(name)
            elif isinstance(statement, Call):
                calls.add(statement.name)
            elif isinstance(statement, (EtherTransfer, SelfDestruct)):
                reads.add(ETHER)
                writes.add(ETHER)

        return reads, writes, calls

    def record_data_dep(self, owner: str, body: Tuple[Statement, ...]) -> None:
        locals_ = self.owner_locals(owner)
        for statement in iter_statements(body):
            if isinstance(statement, VarDecl) and statement.value is not None:
                target = qualify(owner, statement.name)
                for source in self.expression_vars(owner, statement.value, locals_):
                    self.data_dep.add((target, source))
            elif isinstance(statement, Assign):
                if isinstance(statement.target, Index):
                    target = statement.target.base
                    sources = self.expression_vars(owner, statement.value, locals_)
                    sources |= self.expression_vars(owner, statement.target.key, locals_)
                else:
                    target = self.resolve(owner, statement.target.name, locals_)
                    sources = self.expression_vars(owner, statement.value, locals_)
                if statement.op != "=":
                    sources.add(target)
                for source in sources:
                    self.data_dep.add((target, source))
            elif isinstance(statement, Call):
                callee = self.ast.function(statement.name)
                for param, arg in zip(callee.params, statement.args):
                    for source in self.expression_vars(owner, arg, locals_):
                        self.data_dep.add((qualify(callee.name, param.name), source))

    # ------- Зависимости по управлению -------
    def walk_control(self, owner: str, body: Tuple[Statement, ...], active: FrozenSet[str]) -> FrozenSet[str]:
        """
        Обходит тело, отмечая зависимость операторов от активных условий.

        Returns:
            Активные условия после тела
        """
        locals_ = self.owner_locals(owner)
        for statement in body:
            sid = StatementId(owner, statement.index)
            for var in active:
                self.ctrl_dep.add((sid, var))

            if isinstance(statement, Require):
                active = active | frozenset(self.expression_vars(owner, statement.condition, locals_))
            elif isinstance(statement, If):
                condition = frozenset(self.expression_vars(owner, statement.condition, locals_))
                self.walk_control(owner, statement.then_body, active | condition)
                self.walk_control(owner, statement.else_body, active | condition)
                if terminates(statement.then_body) or terminates(statement.else_body):
                    active = active | condition
            elif isinstance(statement, Placeholder):
                self.placeholder_guards[owner] = active
            elif isinstance(statement, Call):
                callee = self.ast.function(statement.name)
                self.walk_function(callee, active)
        return active

    def walk_function(self, function: FunctionDecl, active: FrozenSet[str]) -> None:
        for ref in function.modifiers:
            modifier = self.ast.modifier(ref)
            self.placeholder_guards.pop(modifier.name, None)
            self.walk_control(modifier.name, modifier.body, active)
            active = active | self.placeholder_guards.get(modifier.name, frozenset())
        self.walk_control(function.name, function.body, active)

    def local_guard_vars(self, owner: str) -> Set[str]:
        """Переменные состояния, читаемые условиями require/if одного тела."""
        function = self.ast.function(owner)
        body = function.body if function is not None else self.ast.modifier(owner).body
        locals_ = self.owner_locals(owner)
        collected: Set[str] = set()
        for statement in iter_statements(body):
            if isinstance(statement, (Require, If)):
                collected |= self.expression_vars(owner, statement.condition, locals_)
        return {name for name in collected if name in self.state_vars}

    # ------- Ограничение вызывающего -------
    def caller_guards_of(self, function: FunctionDecl) -> FrozenSet[str]:
        guarded: Set[str] = set()
        bodies: List[Tuple[Statement, ...]] = []
        for ref in function.modifiers:
            modifier = self.ast.modifier(ref)
            prefix: List[Statement] = []
            for statement in modifier.body:
                if isinstance(statement, Placeholder):
                    break
                prefix.append(statement)
            bodies.append(tuple(prefix))
        bodies.append(function.body)

        for body in bodies:
            for statement in body:
                if isinstance(statement, Require):
                    guarded |= sender_comparisons(statement.condition)
                elif isinstance(statement, If) and terminates(statement.then_body) and not statement.else_body:
                    condition = statement.condition
                    if isinstance(condition, Binary) and condition.op == "!=":
                        guarded |= sender_comparisons(Binary("==", condition.left, condition.right))
        return frozenset(name for name in guarded if name in self.state_vars)

    # ------- Сборка -------
    def build(self) -> DependenceFacts:
        owners: List[FunctionDecl] = list(self.ast.functions)
        if self.ast.constructor is not None:
            owners.append(self.ast.constructor)

        local: Dict[str, Tuple[Set[str], Set[str], Set[str]]] = {}
        for function in owners:
            local[function.name] = self.local_reads_writes(function.name, function.body)
            self.record_data_dep(function.name, function.body)
        for modifier in self.ast.modifiers:
            local[modifier.name] = self.local_reads_writes(modifier.name, modifier.body)
            self.record_data_dep(modifier.name, modifier.body)

        for modifier in self.ast.modifiers:
            self.walk_control(modifier.name, modifier.body, frozenset())
        for function in owners:
            self.walk_function(function, frozenset())

        reads: Dict[str, FrozenSet[str]] = {}
        writes: Dict[str, FrozenSet[str]] = {}
        calls: Dict[str, FrozenSet[str]] = {}
        guard_reads: Dict[str, FrozenSet[str]] = {}

        def expand(name: str, seen: Set[str]) -> Tuple[Set[str], Set[str]]:
            own_reads, own_writes, own_calls = local[name]
            total_reads, total_writes = set(own_reads), set(own_writes)
            function = self.ast.function(name)
            refs = function.modifiers if function is not None else ()
            for child in tuple(refs) + tuple(sorted(own_calls)):
                if child in seen:
                    continue
                child_reads, child_writes = expand(child, seen | {child})
                total_reads |= child_reads
                total_writes |= child_writes
            if function is not None and function.is_payable:
                total_reads.add(ETHER)
                total_writes.add(ETHER)
            return total_reads, total_writes

        for function in owners:
            function_reads, function_writes = expand(function.name, {function.name})
            reads[function.name] = frozenset(function_reads)
            writes[function.name] = frozenset(function_writes)
            calls[function.name] = frozenset(local[function.name][2])

        def expand_guards(name: str, seen: Set[str]) -> Set[str]:
            collected = self.local_guard_vars(name)
            function = self.ast.function(name)
            refs = function.modifiers if function is not None else ()
            for child in tuple(refs) + tuple(sorted(local[name][2])):
                if child not in seen:
                    collected |= expand_guards(child, seen | {child})
            return collected

        for function in owners:
            guard_reads[function.name] = frozenset(expand_guards(function.name, {function.name}))

        return DependenceFacts(
            reads=reads,
            writes=writes,
            data_dep=frozenset(self.data_dep),
            ctrl_dep=frozenset(self.ctrl_dep),
            caller_guards={f.name: self.caller_guards_of(f) for f in owners},
            guard_reads=guard_reads,
            calls=calls,
        )


# ======= PublicFunctions =======
def build_facts(ast: ContractAST) -> DependenceFacts:
    """
    Строит факты зависимостей для проверенного контракта.

    Args:
        ast: Дерево контракта

    Returns:
        Неизменяемые факты зависимостей
    """
    facts = FactsBuilder(ast).build()
    logger.debug(
        f"Факты {ast.name}: data_dep={len(facts.data_dep)}, ctrl_dep={len(facts.ctrl_dep)}"
    )
    return facts


def difference_variables(delta: Union[Iterable[str], Any]) -> Tuple[str, ...]:
    """Имена переменных разности (объект с ``variables`` или набор имён)."""
    variables = getattr(delta, "variables", delta)
    return tuple(variables)


def related_funcs_search(ast: ContractAST, facts: DependenceFacts, delta) -> Tuple[str, ...]:
    """
    Ищет функции, читающие или записывающие переменные разности.

    Args:
        ast: Дерево контракта
        facts: Факты зависимостей
        delta: Разность или набор имён переменных

    Returns:
        Имена публичных функций в порядке объявления

    Raises:
        UnknownVariableError: Разность называет переменную, не являющуюся переменной состояния
    """
    names = set(difference_variables(delta))
    state_vars = set(ast.state_var_names)
    for name in names:
        if name not in state_vars and name not in SYNTHETIC_VARS:
            raise UnknownVariableError(f"unknown state variable '{name}'")

    targets = names - {EXEC_STATE}
    if not targets:
        return ()
    return tuple(
        function.name
        for function in ast.entry_points
        if (facts.reads.get(function.name, frozenset()) | facts.writes.get(function.name, frozenset())) & targets
    )
