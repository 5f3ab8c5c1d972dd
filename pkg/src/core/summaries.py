"""
Модуль сводок переменных и оператора разности.

Сводка переменной - конечная абстракция её изменения за одно исполнение:
направление роста для чисел, константность и смена для адресов, пара
значений для булевых, сводки по токенам выражений ключей для отображений
и эфира, итог исполнения для exec_state.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from .abstractions import UniverseMismatchError
from .facts import ETHER, EXEC_STATE
from .engine import ExecState, LabeledState, kind_of
from .solver import PathSolver
from .syntax import BUILTINS, ContractAST, Literal, TypeKind, iter_expressions, iter_statements, statement_expressions
from .values import Addr, Ite, MapValue, Num, Symbol, SymValue, scale, sub


# Настройка логирования
logger = logging.getLogger(__name__)


# ======= Summaries =======
@dataclass(frozen=True)
class NumericSummary:
    is_increased: bool = False
    is_decreased: bool = False
    related_const_var: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_increased": self.is_increased,
            "is_decreased": self.is_decreased,
            "related_const_var": list(self.related_const_var),
        }


@dataclass(frozen=True)
class AddressSummary:
    is_constant: bool = False
    is_changed: bool = False
    related_const_var: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_constant": self.is_constant,
            "is_changed": self.is_changed,
            "related_const_var": list(self.related_const_var),
        }


@dataclass(frozen=True)
class BooleanSummary:
    """Пара значений до и после исполнения (без абстракции)."""
    pre: str
    post: str

    def to_dict(self) -> Dict[str, Any]:
        return {"pre": self.pre, "post": self.post}


ValueSummary = Union[NumericSummary, AddressSummary, BooleanSummary]


@dataclass(frozen=True)
class MappingSummary:
    """Сводки значений по токенам выражений записанных ключей."""
    entries: Tuple[Tuple[str, ValueSummary], ...] = ()

    def get(self, token: str) -> Optional[ValueSummary]:
        for key, summary in self.entries:
            if key == token:
                return summary
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {key: summary.to_dict() for key, summary in self.entries}


@dataclass(frozen=True)
class ExecStateSummary:
    success: bool = True
    revert: bool = False
    selfdestruct: bool = False

    @classmethod
    def of(cls, state: ExecState) -> "ExecStateSummary":
        return cls(
            success=state is ExecState.SUCCESS,
            revert=state is ExecState.REVERT,
            selfdestruct=state is ExecState.SELFDESTRUCT,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"success": self.success, "revert": self.revert, "selfdestruct": self.selfdestruct}


VariableSummary = Union[NumericSummary, AddressSummary, BooleanSummary, MappingSummary, ExecStateSummary]


# ======= Difference =======
@dataclass(frozen=True)
class DifferenceEntry:
    """
    Элемент разности.

    Атрибуты:
        variable: Имя переменной
        privileged: Сводка привилегированного исполнения
        ordinary: Сводка обычного исполнения
        labeled: Переменная помечена в привилегированном преемнике
    """
    variable: str
    privileged: VariableSummary
    ordinary: VariableSummary
    labeled: bool = field(default=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variable": self.variable,
            "privileged": self.privileged.to_dict(),
            "ordinary": self.ordinary.to_dict(),
            "labeled": self.labeled,
        }


@dataclass(frozen=True)
class Difference:
    """
    Разность пары исполнений.

    Равенство определяется только элементами (переменная и две сводки);
    метки и происхождение в тождество не входят.

    Атрибуты:
        entries: Элементы в каноническом порядке
        trail: Цепочка (функция, роль) привилегированного преемника
        approximate: Пара получена через приближённые пути
        controls: Помеченные переменные, прочитанные условиями пути
    """
    entries: Tuple[DifferenceEntry, ...]
    trail: Tuple[Tuple[str, str], ...] = field(default=(), compare=False)
    approximate: bool = field(default=False, compare=False)
    controls: FrozenSet[str] = field(default=frozenset(), compare=False)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(entry.variable for entry in self.entries)

    @property
    def functions(self) -> Tuple[str, ...]:
        return tuple(function for function, _ in self.trail)

    @property
    def last_function(self) -> Optional[str]:
        return self.trail[-1][0] if self.trail else None

    def entry(self, variable: str) -> Optional[DifferenceEntry]:
        for entry in self.entries:
            if entry.variable == variable:
                return entry
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entries": [entry.to_dict() for entry in self.entries],
            "provenance": [{"function": function, "role": role} for function, role in self.trail],
            "approximate": self.approximate,
            "controls": sorted(self.controls),
        }


# ======= Helpers =======
def bool_token(state: LabeledState, value: SymValue) -> str:
    """Токен булева значения, уточнённый условием пути."""
    resolved = PathSolver.resolve_bool(state.path_cond, value)
    if resolved is not None:
        return "true" if resolved else "false"
    if isinstance(value, Symbol):
        return value.token or value.name
    if isinstance(value, Ite):
        return f"!{value.cond.token or value.cond.name}"
    return str(value)


def numeric_summary(
    state: LabeledState, pre: SymValue, post: SymValue, tokens: Iterable[str]
) -> NumericSummary:
    return delta_summary(state, sub(post, pre), tokens)


def delta_summary(state: LabeledState, delta: SymValue, tokens: Iterable[str]) -> NumericSummary:
    """Направление изменения числа по его приращению."""
    related = tuple(sorted(set(tokens)))
    if delta == Num(0):
        return NumericSummary(False, False, related)
    increased = PathSolver.entails_nonnegative(state.path_cond, delta)
    decreased = PathSolver.entails_nonnegative(state.path_cond, scale(delta, -1))
    if increased and decreased:
        return NumericSummary(False, False, related)
    return NumericSummary(increased, decreased, related)


def address_summary(
    state: LabeledState, pre: SymValue, post: SymValue, tokens: Optional[Iterable[str]]
) -> AddressSummary:
    if tokens is None:
        return AddressSummary()
    return AddressSummary(
        is_constant=isinstance(post, Addr),
        is_changed=not PathSolver.entails_equal(state.path_cond, post, pre),
        related_const_var=tuple(sorted(set(tokens))),
    )


def value_summary(
    state: LabeledState, kind: TypeKind, pre: SymValue, post: SymValue, tokens: Optional[Iterable[str]]
) -> ValueSummary:
    if kind is TypeKind.BOOLEAN:
        return BooleanSummary(bool_token(state, pre), bool_token(state, post))
    if kind is TypeKind.ADDRESS:
        return address_summary(state, pre, post, tokens)
    return numeric_summary(state, pre, post, tokens or ())


# ======= PublicFunctions =======
def summarize(prev: LabeledState, next: LabeledState, v: str) -> VariableSummary:
    """
    Сводка переменной за одно исполнение.

    Args:
        prev: Исходное состояние
        next: Преемник
        v: Имя переменной состояния, ``ether`` или ``exec_state``

    Returns:
        Сводка соответствующего вида
    """
    if v == EXEC_STATE:
        return ExecStateSummary.of(next.exec_state)

    before = prev.value(v)
    after = next.value(v)
    if isinstance(before, MapValue):
        writes = next.map_effects.get(v, {})
        entries = []
        for token in sorted(writes):
            write = writes[token]
            if before.value_kind is TypeKind.NUMERIC:
                summary: ValueSummary = delta_summary(next, write.delta, write.tokens)
            else:
                pre = before.lookup(write.key) if write.pre is None else write.pre
                post = after.lookup(write.key) if write.post is None else write.post
                summary = value_summary(next, before.value_kind, pre, post, write.tokens)
            entries.append((token, summary))
        return MappingSummary(tuple(entries))

    tokens = next.scalar_effects.get(v)
    kind = kind_of(before)
    if kind is TypeKind.NUMERIC and tokens is None:
        return NumericSummary()
    return value_summary(next, kind, before, after, tokens)


def summarize_state(prev: LabeledState, next: LabeledState) -> Dict[str, VariableSummary]:
    """Сводки всех переменных состояния, эфира и итога исполнения."""
    phi: Dict[str, VariableSummary] = {}
    for name in next.sigma:
        phi[name] = summarize(prev, next, name)
    phi[ETHER] = summarize(prev, next, ETHER)
    phi[EXEC_STATE] = summarize(prev, next, EXEC_STATE)
    return phi


def diff(
    phi_p: Mapping[str, VariableSummary],
    phi_o: Mapping[str, VariableSummary],
    theta_p: Iterable[str],
    include_labels: bool = True,
) -> Optional[Difference]:
    """
    Разность сводок привилегированного и обычного исполнений.

    Args:
        phi_p: Сводки привилегированного исполнения
        phi_o: Сводки обычного исполнения
        theta_p: Помеченные переменные привилегированного преемника
        include_labels: Учитывать ли помеченные переменные с равными сводками

    Returns:
        Разность или None, если она пуста

    Raises:
        UniverseMismatchError: Сводки построены по разным множествам переменных
    """
    if list(phi_p) != list(phi_o):
        raise UniverseMismatchError(
            f"summary universes differ: {sorted(set(phi_p) ^ set(phi_o))}"
        )
    labeled = frozenset(theta_p)
    entries = tuple(
        DifferenceEntry(var, phi_p[var], phi_o[var], labeled=var in labeled)
        for var in phi_p
        if phi_p[var] != phi_o[var] or (include_labels and var in labeled)
    )
    return Difference(entries) if entries else None


# ======= Bound =======
def token_universe(ast: ContractAST) -> FrozenSet[str]:
    """Конечное множество токенов происхождения контракта."""
    tokens = set(ast.state_var_names) | set(BUILTINS) | {"true", "false", ETHER}
    functions = list(ast.functions) + ([ast.constructor] if ast.constructor is not None else [])
    bodies = [f.body for f in functions] + [m.body for m in ast.modifiers]
    for function in functions:
        tokens |= {param.name for param in function.params}
    expressions = [var.initializer for var in ast.state_vars if var.initializer is not None]
    for body in bodies:
        for statement in iter_statements(body):
            expressions.extend(statement_expressions(statement))
    for expression in expressions:
        for node in iter_expressions(expression):
            if isinstance(node, Literal):
                tokens.add(str(node.value) if node.kind is not TypeKind.BOOLEAN else str(node.value).lower())
    return frozenset(tokens)


def lattice_bound(ast: ContractAST) -> int:
    """
    Верхняя граница числа различных разностей контракта.

    Произведение по переменным квадратов размеров областей сводок.
    """
    tokens = len(token_universe(ast))
    subsets = 2 ** tokens
    numeric = 3 * subsets
    address = 4 * subsets
    boolean = (2 * tokens + 2) ** 2
    keys = tokens + 2

    def scalar(kind: TypeKind) -> int:
        return {TypeKind.NUMERIC: numeric, TypeKind.ADDRESS: address, TypeKind.BOOLEAN: boolean}[kind]

    bound = 3 ** 2
    for var in ast.state_vars:
        if var.ty.is_mapping:
            size = (scalar(var.ty.value) + 1) ** keys
        else:
            size = scalar(var.ty.kind)
        bound *= size ** 2
    bound *= ((numeric + 1) ** keys) ** 2
    return bound
