"""
Модуль графа свойств переменных.

Гетерогенный ориентированный мультиграф: узлы переменных состояния,
локальных переменных (параметры, локальные, встроенные) и операторов;
рёбра шести видов (CFE, DFE, RFE, CDE, DDE, FCE).
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from .facts import DependenceFacts, qualify
from .syntax import (
    BUILTINS,
    CONSTRUCTOR,
    Assign,
    Binary,
    Builtin,
    Call,
    ContractAST,
    EtherTransfer,
    FunctionDecl,
    Identifier,
    If,
    Index,
    Placeholder,
    Require,
    Statement,
    StatementId,
    VarDecl,
    iter_expressions,
    iter_statements,
    statement_expressions,
)


# Настройка логирования
logger = logging.getLogger(__name__)


class NodeKind(Enum):
    STATE = "state"
    LOCAL = "local"
    STATEMENT = "statement"


class EdgeKind(Enum):
    CFE = "CFE"
    DFE = "DFE"
    RFE = "RFE"
    CDE = "CDE"
    DDE = "DDE"
    FCE = "FCE"


VariablePropertyGraph = nx.MultiDiGraph


# ======= Node ids =======
def state_node(name: str) -> str:
    return f"state:{name}"


def local_node(name: str) -> str:
    return f"local:{name}"


def statement_node(sid: StatementId) -> str:
    return f"stmt:{sid}"


def statement_delta(statement: Statement) -> Optional[str]:
    """Направление изменения цели присваивания: ``+``, ``-`` или None."""
    if not isinstance(statement, Assign):
        return None
    if statement.op in ("+=", "-="):
        return statement.op[0]
    value = statement.value
    if isinstance(value, Binary) and value.op in ("+", "-") and value.left == statement.target:
        return value.op
    return None


# ======= MainClass =======
class GraphBuilder:
    """
    Построитель графа свойств переменных.

    Атрибуты:
        ast: Проверенное дерево контракта
        facts: Факты зависимостей
        graph: Строящийся мультиграф
    """

    def __init__(self, ast: ContractAST, facts: DependenceFacts) -> None:
        self.ast = ast
        self.facts = facts
        self.graph: VariablePropertyGraph = nx.MultiDiGraph()
        self.state_vars = set(ast.state_var_names)

    def owners(self) -> List[Tuple[str, Tuple[Statement, ...], Set[str]]]:
        result = []
        functions: List[FunctionDecl] = list(self.ast.functions)
        if self.ast.constructor is not None:
            functions.append(self.ast.constructor)
        for function in functions:
            names = {param.name for param in function.params}
            names |= {s.name for s in iter_statements(function.body) if isinstance(s, VarDecl)}
            result.append((function.name, function.body, names))
        for modifier in self.ast.modifiers:
            names = {s.name for s in iter_statements(modifier.body) if isinstance(s, VarDecl)}
            result.append((modifier.name, modifier.body, names))
        return result

    def variable_node(self, owner: str, name: str, locals_: Set[str]) -> Optional[str]:
        if name in locals_:
            return local_node(qualify(owner, name))
        if name in self.state_vars:
            return state_node(name)
        if name in BUILTINS:
            return local_node(name)
        return None

    def add_edge(self, source: str, target: str, kind: EdgeKind) -> None:
        self.graph.add_edge(source, target, key=kind.value, kind=kind.value)

    # ------- Узлы -------
    def add_nodes(self) -> None:
        for var in self.ast.state_vars:
            self.graph.add_node(state_node(var.name), kind=NodeKind.STATE.value, name=var.name, ty=str(var.ty))
        for builtin in BUILTINS:
            self.graph.add_node(local_node(builtin), kind=NodeKind.LOCAL.value, name=builtin, builtin=True)
        for owner, body, locals_ in self.owners():
            function = self.ast.function(owner)
            params = {param.name: param for param in function.params} if function is not None else {}
            for name in sorted(locals_):
                ty = params[name].ty if name in params else next(
                    s.ty for s in iter_statements(body) if isinstance(s, VarDecl) and s.name == name
                )
                self.graph.add_node(
                    local_node(qualify(owner, name)),
                    kind=NodeKind.LOCAL.value,
                    name=qualify(owner, name),
                    ty=str(ty),
                    param=name in params,
                )
            for statement in iter_statements(body):
                self.add_statement_node(owner, statement, locals_)

    def add_statement_node(self, owner: str, statement: Statement, locals_: Set[str]) -> None:
        reads: Set[str] = set()
        for expression in statement_expressions(statement):
            for node in iter_expressions(expression):
                if isinstance(node, Identifier):
                    reads.add(node.name if node.name not in locals_ else qualify(owner, node.name))
                elif isinstance(node, Index):
                    reads.add(node.base)
                elif isinstance(node, Builtin):
                    reads.add(node.name)

        target_name: Optional[str] = None
        writes: Set[str] = set()
        if isinstance(statement, Assign):
            target = statement.target
            name = target.base if isinstance(target, Index) else target.name
            target_name = qualify(owner, name) if name in locals_ else name
            writes.add(target_name)
            if statement.op != "=":
                reads.add(target_name)
        elif isinstance(statement, VarDecl):
            writes.add(qualify(owner, statement.name))

        self.graph.add_node(
            statement_node(StatementId(owner, statement.index)),
            kind=NodeKind.STATEMENT.value,
            owner=owner,
            index=statement.index,
            statement=type(statement).__name__,
            reads=tuple(sorted(reads)),
            writes=tuple(sorted(writes)),
            delta=statement_delta(statement),
            target=target_name,
            guard=isinstance(statement, (Require, If)),
            ether=isinstance(statement, EtherTransfer),
        )

    # ------- Рёбра -------
    def add_control_flow(self, owner: str, body: Tuple[Statement, ...]) -> Tuple[List[str], List[str]]:
        """
        Добавляет CFE внутри тела.

        Returns:
            Входные и выходные узлы тела
        """
        entries: List[str] = []
        exits: List[str] = []
        for statement in body:
            node = statement_node(StatementId(owner, statement.index))
            if not entries:
                entries = [node]
            for previous in exits:
                self.add_edge(previous, node, EdgeKind.CFE)
            exits = [node]
            if isinstance(statement, If):
                branch_exits: List[str] = []
                for branch in (statement.then_body, statement.else_body):
                    branch_entries, ends = self.add_control_flow(owner, branch)
                    for entry in branch_entries:
                        self.add_edge(node, entry, EdgeKind.CFE)
                    branch_exits.extend(ends if branch else [node])
                exits = sorted(set(branch_exits))
        return entries, exits

    def entry_statement(self, name: str) -> Optional[str]:
        function = self.ast.function(name)
        if function.modifiers:
            modifier = self.ast.modifier(function.modifiers[0])
            if modifier.body:
                return statement_node(StatementId(modifier.name, modifier.body[0].index))
        if function.body:
            return statement_node(StatementId(function.name, function.body[0].index))
        return None

    def add_edges(self) -> None:
        for owner, body, locals_ in self.owners():
            self.add_control_flow(owner, body)
            function = self.ast.function(owner)

            for statement in iter_statements(body):
                node = statement_node(StatementId(owner, statement.index))
                data = self.graph.nodes[node]
                for name in data["reads"]:
                    var = self.known(name)
                    if var is not None:
                        self.add_edge(var, node, EdgeKind.DFE)
                for name in data["writes"]:
                    var = self.known(name)
                    if var is not None:
                        self.add_edge(node, var, EdgeKind.DFE)

                if isinstance(statement, Call):
                    callee = self.ast.function(statement.name)
                    entry = self.entry_statement(callee.name)
                    if entry is not None:
                        self.add_edge(node, entry, EdgeKind.FCE)
                    for param, arg in zip(callee.params, statement.args):
                        target = local_node(qualify(callee.name, param.name))
                        for sub in iter_expressions(arg):
                            if isinstance(sub, (Identifier, Builtin)):
                                source = self.variable_node(owner, sub.name, locals_)
                            elif isinstance(sub, Index):
                                source = self.variable_node(owner, sub.base, locals_)
                            else:
                                source = None
                            if source is not None:
                                self.add_edge(target, source, EdgeKind.RFE)

                if isinstance(statement, Placeholder) and function is None:
                    # модификатор: `_` передаёт управление телу каждой функции с ним
                    for user in self.ast.functions:
                        if owner in user.modifiers:
                            entry = self.entry_statement_of_body(user)
                            if entry is not None:
                                self.add_edge(node, entry, EdgeKind.FCE)

        for sid, var in sorted(self.facts.ctrl_dep, key=lambda item: (str(item[0]), item[1])):
            source = self.known(var)
            target = statement_node(sid)
            if source is not None and self.graph.has_node(target):
                self.add_edge(source, target, EdgeKind.CDE)

        for target_name, source_name in sorted(self.facts.data_dep):
            target = self.known(target_name)
            source = self.known(source_name)
            if target is not None and source is not None:
                self.add_edge(source, target, EdgeKind.DDE)

    def entry_statement_of_body(self, function: FunctionDecl) -> Optional[str]:
        if function.body:
            return statement_node(StatementId(function.name, function.body[0].index))
        return None

    def known(self, name: str) -> Optional[str]:
        """Узел переменной по полному имени, если он есть в графе."""
        for node in (state_node(name), local_node(name)):
            if self.graph.has_node(node):
                return node
        return None

    def build(self) -> VariablePropertyGraph:
        self.add_nodes()
        self.add_edges()
        self.graph.graph["contract"] = self.ast.name
        return self.graph


# ======= PublicFunctions =======
def build_vpg(ast: ContractAST, facts: DependenceFacts) -> VariablePropertyGraph:
    """
    Строит граф свойств переменных.

    Args:
        ast: Проверенное дерево контракта
        facts: Факты зависимостей

    Returns:
        Мультиграф networkx с атрибутами ``kind`` у узлов и рёбер
    """
    graph = GraphBuilder(ast, facts).build()
    logger.debug(f"Граф {ast.name}: узлов {graph.number_of_nodes()}, рёбер {graph.number_of_edges()}")
    return graph


EDGE_ENDPOINTS: Dict[str, Tuple[Set[str], Set[str]]] = {
    EdgeKind.CFE.value: ({NodeKind.STATEMENT.value}, {NodeKind.STATEMENT.value}),
    EdgeKind.FCE.value: ({NodeKind.STATEMENT.value}, {NodeKind.STATEMENT.value}),
    EdgeKind.CDE.value: ({NodeKind.STATE.value, NodeKind.LOCAL.value}, {NodeKind.STATEMENT.value}),
    EdgeKind.DDE.value: (
        {NodeKind.STATE.value, NodeKind.LOCAL.value}, {NodeKind.STATE.value, NodeKind.LOCAL.value}
    ),
    EdgeKind.RFE.value: ({NodeKind.LOCAL.value}, {NodeKind.STATE.value, NodeKind.LOCAL.value}),
}


def check_well_formed(graph: VariablePropertyGraph) -> List[str]:
    """
    Проверяет типизацию рёбер графа.

    Returns:
        Список нарушений (пустой для корректного графа)
    """
    problems: List[str] = []
    for source, target, kind in graph.edges(keys=True):
        source_kind = graph.nodes[source]["kind"]
        target_kind = graph.nodes[target]["kind"]
        if kind == EdgeKind.DFE.value:
            kinds = {source_kind, target_kind}
            if NodeKind.STATEMENT.value not in kinds or len(kinds) != 2:
                problems.append(f"DFE {source} -> {target}")
            continue
        allowed_sources, allowed_targets = EDGE_ENDPOINTS[kind]
        if source_kind not in allowed_sources or target_kind not in allowed_targets:
            problems.append(f"{kind} {source} -> {target}")
    return problems


def guarded_statements(graph: VariablePropertyGraph, variable: str) -> List[str]:
    """Операторы, на которые переменная состояния влияет через CDE."""
    node = state_node(variable)
    if not graph.has_node(node):
        return []
    return sorted(
        target for _, target, kind in graph.out_edges(node, keys=True) if kind == EdgeKind.CDE.value
    )


def writing_statements(graph: VariablePropertyGraph, variable: str) -> List[str]:
    """Операторы, записывающие переменную состояния (входящие DFE)."""
    node = state_node(variable)
    if not graph.has_node(node):
        return []
    return sorted(source for source, _, kind in graph.in_edges(node, keys=True) if kind == EdgeKind.DFE.value)


def constructor_owned(node: str) -> bool:
    return node.startswith(f"stmt:{CONSTRUCTOR}#")
