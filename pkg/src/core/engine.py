"""
Модуль символьного исполнения с метками.

Исполняет одну функцию контракта из помеченного состояния от имени
привилегированного или обычного вызывающего и возвращает по одному
состоянию-преемнику на каждый выполнимый путь. Метки (theta) переносятся
по потокам данных и через условия, прочитавшие помеченные значения.
"""

import logging
from enum import Enum
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, TypedDict

from .abstractions import ConstructorRevertError
from .facts import ETHER, EXEC_STATE, DependenceFacts, build_facts
from .printer import Printer
from .solver import (
    CAnd,
    CNot,
    COr,
    Cond,
    Constraint,
    Equal,
    NotEqual,
    PathSolver,
    cond_not,
    le,
    lt,
    numeric_equal,
    simplify,
    truth,
)
from .syntax import (
    CONSTRUCTOR,
    ZERO_ADDRESS,
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
    Literal,
    Placeholder,
    Require,
    Return,
    Revert,
    SelfDestruct,
    Statement,
    StatementId,
    TypeKind,
    Unary,
    VarDecl,
    iter_expressions,
    iter_statements,
)
from .values import (
    Addr,
    Bool,
    Ite,
    MapValue,
    Num,
    Opaque,
    StoredValue,
    Sum,
    Symbol,
    SymValue,
    add,
    div,
    mul,
    negate_bool,
    render,
    sub,
    value_key,
)


# Настройка логирования
logger = logging.getLogger(__name__)

CONTRACT_ADDRESS = Addr("contract")
CONTRACT_TOKEN = "contract"
DEPLOYER = Symbol("deployer", TypeKind.ADDRESS, token="deployer")
ORDINARY = Symbol("ordinary", TypeKind.ADDRESS, token="ordinary")

Tracer = Callable[[Dict[str, Any]], None]
FactKey = Tuple[str, ...]


# ======= Enums =======
class ExecState(Enum):
    """Итог одного исполнения функции."""
    SUCCESS = "success"
    REVERT = "revert"
    SELFDESTRUCT = "selfdestruct"


class Role(Enum):
    PRIVILEGED = "privileged"
    ORDINARY = "ordinary"


# ======= TypedDicts =======
class LabeledStateTypeDict(TypedDict):
    sigma: Dict[str, str]
    ether: str
    pi: List[str]
    theta: List[str]
    path_cond: List[str]
    exec_state: str
    approximate: bool
    trail: List[List[str]]


# ======= DataClasses =======
@dataclass(frozen=True)
class Tracked:
    """
    Вычисленное значение вместе с метками и токенами происхождения.

    Атрибуты:
        value: Символьное значение
        labels: Помеченные переменные состояния, повлиявшие на значение
        deps: Токены происхождения (переменные, литералы, параметры, встроенные)
        origin: Имя, через которое значение прочитано (параметр, встроенная, литерал)
    """
    value: SymValue
    labels: FrozenSet[str] = frozenset()
    deps: FrozenSet[str] = frozenset()
    origin: Optional[str] = None

    @property
    def labeled(self) -> bool:
        return bool(self.labels)


@dataclass(frozen=True)
class KeyWrite:
    """
    Записи в отображение через одно выражение ключа.

    Атрибуты:
        key: Фактический ключ первой записи
        tokens: Токены записанных значений
        delta: Суммарное изменение числового значения
        pre: Значение до первой записи
        post: Последнее записанное значение
    """
    key: SymValue
    tokens: FrozenSet[str]
    delta: SymValue = Num(0)
    pre: Optional[SymValue] = None
    post: Optional[SymValue] = None


@dataclass(frozen=True)
class CallerContext:
    """
    Контекст вызывающего.

    Атрибуты:
        role: Привилегированный или обычный
        sender: Значение msg.sender
        assumptions: Ограничения на sender, добавляемые к условию пути
    """
    role: Role
    sender: SymValue
    assumptions: Tuple[Constraint, ...] = ()


@dataclass(frozen=True)
class CallInputs:
    """Символы параметров вызова, общие для пары исполнений."""
    params: Mapping[str, SymValue]
    msg_value: SymValue = Num(0)
    block_number: SymValue = Num(0)


@dataclass(frozen=True)
class LabeledState:
    """
    Помеченное состояние (sigma, pi, theta) с условием пути.

    Атрибуты:
        sigma: Значения переменных состояния
        ether: Балансы эфира по счетам
        pi: Выполненные операторы (продолжает pi исходного состояния)
        theta: Помеченные переменные (переменные состояния, ether, exec_state)
        path_cond: Условие пути
        exec_state: Итог последнего исполнения
        approximate: Путь прошёл через ограничения вне разрешимого фрагмента
        scalar_effects: Присвоенные скаляры последнего исполнения и их токены
        map_effects: Записанные ключи отображений последнего исполнения
        facts: Факты пути для сопоставления пар
        controls: Помеченные переменные, прочитанные условиями пути
        trail: Цепочка (функция, роль), приведшая к состоянию
        step_start: Начало последнего исполнения в pi
    """
    sigma: Mapping[str, StoredValue]
    ether: MapValue
    pi: Tuple[StatementId, ...] = ()
    theta: FrozenSet[str] = frozenset()
    path_cond: Tuple[Constraint, ...] = ()
    exec_state: ExecState = ExecState.SUCCESS
    approximate: bool = False
    scalar_effects: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    map_effects: Mapping[str, Mapping[str, KeyWrite]] = field(default_factory=dict)
    facts: Mapping[FactKey, bool] = field(default_factory=dict)
    controls: FrozenSet[str] = frozenset()
    trail: Tuple[Tuple[str, str], ...] = ()
    step_start: int = 0

    def value(self, var: str) -> StoredValue:
        if var == ETHER:
            return self.ether
        return self.sigma[var]

    def with_labels(self, names) -> "LabeledState":
        return replace(self, theta=self.theta | frozenset(names))

    def as_seed(self) -> "LabeledState":
        """Состояние как отправная точка следующего раунда (итог исполнения сброшен)."""
        if self.exec_state is ExecState.SELFDESTRUCT:
            return self
        return replace(self, exec_state=ExecState.SUCCESS, theta=self.theta - {EXEC_STATE})

    @property
    def last_step(self) -> Tuple[StatementId, ...]:
        return self.pi[self.step_start:]

    def to_dict(self) -> LabeledStateTypeDict:
        return {
            "sigma": {name: render(value) for name, value in self.sigma.items()},
            "ether": render(self.ether),
            "pi": [str(sid) for sid in self.pi],
            "theta": sorted(self.theta),
            "path_cond": [str(c) for c in self.path_cond],
            "exec_state": self.exec_state.value,
            "approximate": self.approximate,
            "trail": [list(step) for step in self.trail],
        }


@dataclass(frozen=True)
class PairedExecution:
    """
    Пара исполнений одной функции из одного состояния с общими входами.

    Атрибуты:
        function: Имя функции
        source: Исходное состояние
        privileged: Преемник привилегированного исполнения
        ordinary: Сопоставленный преемник обычного исполнения
        inputs: Общие символы параметров
    """
    function: str
    source: LabeledState
    privileged: LabeledState
    ordinary: LabeledState
    inputs: CallInputs


# ======= Helpers =======
def kind_of(value: SymValue) -> TypeKind:
    if isinstance(value, (Num, Sum, Opaque)):
        return TypeKind.NUMERIC
    if isinstance(value, Addr):
        return TypeKind.ADDRESS
    if isinstance(value, (Bool, Ite)):
        return TypeKind.BOOLEAN
    return value.kind


def literal_value(literal: Literal) -> SymValue:
    if literal.kind is TypeKind.BOOLEAN:
        return Bool(bool(literal.value))
    if literal.kind is TypeKind.ADDRESS:
        return Addr(str(literal.value))
    return Num(int(literal.value))


def literal_token(literal: Literal) -> str:
    if literal.kind is TypeKind.BOOLEAN:
        return "true" if literal.value else "false"
    return str(literal.value)


def index_token(expression: Expression, tracked: Tracked) -> str:
    """Токен выражения ключа: имя, через которое прочитан ключ, иначе текст выражения."""
    return tracked.origin or Printer.expression(expression)


def with_fact(facts: Dict[FactKey, bool], fact: Optional[FactKey], value: bool) -> Dict[FactKey, bool]:
    extended = dict(facts)
    if fact is not None:
        extended[fact] = value
    return extended


def default_value(kind: TypeKind) -> SymValue:
    if kind is TypeKind.BOOLEAN:
        return Bool(False)
    if kind is TypeKind.ADDRESS:
        return Addr(ZERO_ADDRESS)
    return Num(0)


def compare(op: str, left: SymValue, right: SymValue) -> Cond:
    """Условие сравнения двух значений."""
    if op in ("<", "<=", ">", ">="):
        return {
            "<": lambda: lt(left, right),
            "<=": lambda: le(left, right),
            ">": lambda: lt(right, left),
            ">=": lambda: le(right, left),
        }[op]()

    kind = kind_of(left)
    if kind is TypeKind.NUMERIC:
        equal: Cond = numeric_equal(left, right)
    elif kind is TypeKind.BOOLEAN:
        left_truth, right_truth = truth(left), truth(right)
        equal = COr((
            CAnd((left_truth, right_truth)),
            CAnd((cond_not(left_truth), cond_not(right_truth))),
        ))
    else:
        equal = Equal(left, right)
    return equal if op == "==" else CNot(equal)


def contract_addresses(ast: ContractAST) -> Tuple[Addr, ...]:
    """Все адресные константы контракта, включая address(0) и сам контракт."""
    found: List[Addr] = [Addr(ZERO_ADDRESS), CONTRACT_ADDRESS]
    expressions: List[Expression] = [var.initializer for var in ast.state_vars if var.initializer is not None]
    bodies = [f.body for f in ast.functions] + [m.body for m in ast.modifiers]
    if ast.constructor is not None:
        bodies.append(ast.constructor.body)
    for body in bodies:
        for statement in iter_statements(body):
            for name in ("value", "condition", "beneficiary", "recipient", "amount"):
                node = getattr(statement, name, None)
                if node is not None:
                    expressions.append(node)
            if isinstance(statement, Assign) and isinstance(statement.target, Index):
                expressions.append(statement.target.key)
            if isinstance(statement, Call):
                expressions.extend(statement.args)
    for expression in expressions:
        for node in iter_expressions(expression):
            if isinstance(node, Literal) and node.kind is TypeKind.ADDRESS:
                address = Addr(str(node.value))
                if address not in found:
                    found.append(address)
    return tuple(found)


# ======= PathStatus =======
class PathStatus(Enum):
    RUNNING = "running"
    RETURNED = "returned"
    REVERTED = "reverted"
    DESTROYED = "destroyed"


class _Path:
    """Изменяемое состояние одного пути во время исполнения."""

    def __init__(self, sigma: Dict[str, StoredValue], pc: Tuple[Constraint, ...], theta: Set[str]) -> None:
        self.sigma = sigma
        self.pc = pc
        self.theta = theta
        self.flow: Dict[Any, FrozenSet[str]] = {}
        self.scalar_effects: Dict[str, FrozenSet[str]] = {}
        self.map_effects: Dict[str, Dict[str, KeyWrite]] = {}
        self.facts: Dict[FactKey, bool] = {}
        self.occurrences: Dict[Tuple[str, StatementId], int] = {}
        self.pi: List[StatementId] = []
        self.frames: List[Dict[str, Tracked]] = []
        self.taint: FrozenSet[str] = frozenset()
        self.approximate = False
        self.status = PathStatus.RUNNING
        self.current = StatementId(CONSTRUCTOR, 0)

    def fork(self) -> "_Path":
        other = _Path(dict(self.sigma), self.pc, set(self.theta))
        other.flow = dict(self.flow)
        other.scalar_effects = dict(self.scalar_effects)
        other.map_effects = {name: dict(keys) for name, keys in self.map_effects.items()}
        other.facts = dict(self.facts)
        other.occurrences = dict(self.occurrences)
        other.pi = list(self.pi)
        other.frames = [dict(frame) for frame in self.frames]
        other.taint = self.taint
        other.approximate = self.approximate
        other.status = self.status
        other.current = self.current
        return other

    def occurrence(self, kind: str) -> int:
        key = (kind, self.current)
        count = self.occurrences.get(key, 0)
        self.occurrences[key] = count + 1
        return count


Evaluated = List[Tuple[_Path, Optional[Tracked]]]


# ======= Execution =======
class _Run:
    """Одно исполнение функции (или конструктора) с ветвлением путей."""

    def __init__(
        self,
        engine: "SymbolicEngine",
        ctx: CallerContext,
        inputs: CallInputs,
        source: LabeledState,
        labels: bool,
    ) -> None:
        self.engine = engine
        self.ast = engine.ast
        self.ctx = ctx
        self.inputs = inputs
        self.source = source
        self.labels = labels

    # ------- Ветвление -------
    def branch(self, path: _Path, cond: Cond, labels: FrozenSet[str], kind: str) -> List[Tuple[_Path, bool]]:
        """Разветвляет путь по условию и записывает исход проверки в факты пути."""
        occurrence = path.occurrence(kind)
        cases = PathSolver.feasible_cases(path.pc, cond)
        result = []
        for pc, value, approximate in cases:
            target = path if len(cases) == 1 else path.fork()
            target.pc = pc
            target.approximate = target.approximate or approximate
            target.facts[(kind, str(path.current), str(occurrence))] = value
            if labels and self.labels:
                target.taint = target.taint | labels
            result.append((target, value))
        return result

    def extend_pc(self, pc: Tuple[Constraint, ...], constraints: Sequence[Constraint]) -> Optional[Tuple[Constraint, ...]]:
        extra = []
        for constraint in constraints:
            folded = simplify(constraint)
            if folded is False:
                return None
            if folded is not True:
                extra.append(folded)
        extended = pc + tuple(extra)
        return extended if PathSolver.satisfiable(extended) else None

    def access(self, path: _Path, base: str, key: SymValue) -> List[Tuple[_Path, SymValue]]:
        """Разветвляет путь по совпадению ключа с уже известными ключами отображения."""
        mapping: MapValue = path.sigma[base]
        if mapping.find(key) is not None:
            return [(path, key)]
        role = self.key_token(path, key)
        branches: List[Tuple[Tuple[Constraint, ...], SymValue, Dict[FactKey, bool]]] = []
        prefix: List[Constraint] = []
        outcomes: Dict[FactKey, bool] = {}
        exhausted = False
        for entry in mapping.entries:
            fact = self.alias_fact(path, role, entry.key)
            if PathSolver.entails(path.pc + tuple(prefix), Equal(key, entry.key)):
                branches.append((self.extend_pc(path.pc, prefix) or path.pc, entry.key, with_fact(outcomes, fact, True)))
                exhausted = True
                break
            aliased = self.extend_pc(path.pc, prefix + [Equal(key, entry.key)])
            if aliased is not None:
                branches.append((aliased, entry.key, with_fact(outcomes, fact, True)))
            prefix.append(NotEqual(key, entry.key))
            outcomes = with_fact(outcomes, fact, False)
        if not exhausted:
            distinct = self.extend_pc(path.pc, prefix)
            if distinct is not None:
                branches.append((distinct, key, outcomes))

        result = []
        for pc, entry_key, facts in branches:
            target = path if len(branches) == 1 else path.fork()
            target.pc = pc
            if len(branches) > 1:
                target.facts.update(facts)
            result.append((target, entry_key))
        return result

    def alias_fact(self, path: _Path, role: str, entry_key: SymValue) -> Optional[FactKey]:
        """Ключ факта о совпадении ключа с элементом отображения (в ролевых токенах)."""
        other = self.key_token(path, entry_key)
        if other == role:
            return None
        return ("alias",) + tuple(sorted((role, other)))

    # ------- Токены -------
    def key_token(self, path: _Path, key: SymValue) -> str:
        """Ролевой токен значения ключа (для фактов совпадения ключей)."""
        sender = self.ctx.sender
        if key == sender or PathSolver.entails(path.pc, Equal(key, sender)):
            return "msg.sender"
        address_params = [
            (name, value) for name, value in self.inputs.params.items() if kind_of(value) is TypeKind.ADDRESS
        ]
        for name, value in address_params:
            if key == value:
                return name
        for name, value in address_params:
            if PathSolver.entails(path.pc, Equal(key, value)):
                return name
        for name in self.engine.privileged:
            if self.source.sigma.get(name) == key:
                return name
        if isinstance(key, Addr):
            return key.value
        if isinstance(key, Symbol):
            return key.token or key.name
        return value_key(key)

    # ------- Выражения -------
    def eval(self, path: _Path, owner: str, expression: Expression) -> Evaluated:
        if isinstance(expression, Literal):
            token = literal_token(expression)
            return [(path, Tracked(literal_value(expression), frozenset(), frozenset({token}), token))]

        if isinstance(expression, Identifier):
            return [(path, self.read_name(path, expression.name))]

        if isinstance(expression, Builtin):
            if expression.name == "msg.sender":
                value = self.ctx.sender
            elif expression.name == "msg.value":
                value = self.inputs.msg_value
            else:
                value = self.inputs.block_number
            return [(path, Tracked(value, frozenset(), frozenset({expression.name}), expression.name))]

        if isinstance(expression, Index):
            result: Evaluated = []
            for keyed, key in self.eval(path, owner, expression.key):
                if key is None:
                    result.append((keyed, None))
                    continue
                token = index_token(expression.key, key)
                for target, entry_key in self.access(keyed, expression.base, key.value):
                    result.append((target, self.read_entry(target, expression.base, entry_key, token, key)))
            return result

        if isinstance(expression, Unary):
            return [
                (target, None if operand is None else replace(operand, value=negate_bool(operand.value), origin=None))
                for target, operand in self.eval(path, owner, expression.operand)
            ]

        if expression.op in ("+", "-", "*", "/"):
            result = []
            for target, operands in self.eval_all(path, owner, (expression.left, expression.right)):
                if operands is None:
                    result.append((target, None))
                    continue
                result.extend(self.arithmetic(target, expression.op, *operands))
            return result

        # логическое выражение как значение: ветвление по условию
        result = []
        for target, cond, labels, deps in self.eval_cond(path, owner, expression):
            if cond is None:
                result.append((target, None))
                continue
            for branch, value in self.branch(target, cond, frozenset(), "value"):
                result.append((branch, Tracked(Bool(value), labels, deps)))
        return result

    def eval_all(self, path: _Path, owner: str, expressions: Sequence[Expression]):
        results: List[Tuple[_Path, Optional[Tuple[Tracked, ...]]]] = [(path, ())]
        for expression in expressions:
            extended = []
            for target, acc in results:
                if acc is None:
                    extended.append((target, None))
                    continue
                for evaluated, tracked in self.eval(target, owner, expression):
                    extended.append((evaluated, None if tracked is None else acc + (tracked,)))
            results = extended
        return results

    def eval_cond(self, path: _Path, owner: str, expression: Expression):
        """
        Вычисляет булево выражение как условие.

        Returns:
            Список (путь, условие или None при откате, метки, токены)
        """
        if isinstance(expression, Unary):
            return [
                (target, None if cond is None else CNot(cond), labels, deps)
                for target, cond, labels, deps in self.eval_cond(path, owner, expression.operand)
            ]

        if isinstance(expression, Binary) and expression.op in ("&&", "||"):
            result = []
            for left_path, left, left_labels, left_deps in self.eval_cond(path, owner, expression.left):
                if left is None:
                    result.append((left_path, None, left_labels, left_deps))
                    continue
                for right_path, right, right_labels, right_deps in self.eval_cond(left_path, owner, expression.right):
                    cond = None
                    if right is not None:
                        cond = CAnd((left, right)) if expression.op == "&&" else COr((left, right))
                    result.append((right_path, cond, left_labels | right_labels, left_deps | right_deps))
            return result

        if isinstance(expression, Binary) and expression.op in ("==", "!=", "<", "<=", ">", ">="):
            result = []
            for target, operands in self.eval_all(path, owner, (expression.left, expression.right)):
                if operands is None:
                    result.append((target, None, frozenset(), frozenset()))
                    continue
                left, right = operands
                result.append((
                    target,
                    compare(expression.op, left.value, right.value),
                    left.labels | right.labels,
                    left.deps | right.deps,
                ))
            return result

        return [
            (target, None if tracked is None else truth(tracked.value),
             frozenset() if tracked is None else tracked.labels,
             frozenset() if tracked is None else tracked.deps)
            for target, tracked in self.eval(path, owner, expression)
        ]

    def arithmetic(self, path: _Path, op: str, left: Tracked, right: Tracked) -> Evaluated:
        labels = left.labels | right.labels
        deps = left.deps | right.deps
        if op == "+":
            return [(path, Tracked(add(left.value, right.value), labels, deps))]
        if op == "-":
            return self.checked_sub(path, left, right)
        if op == "*":
            value, approximate = mul(left.value, right.value)
            path.approximate = path.approximate or approximate
            return [(path, Tracked(value, labels, deps))]

        result: Evaluated = []
        for target, nonzero in self.branch(path, lt(Num(0), right.value), labels, "division"):
            if not nonzero:
                target.status = PathStatus.REVERTED
                result.append((target, None))
                continue
            value, approximate = div(left.value, right.value)
            target.approximate = target.approximate or approximate
            result.append((target, Tracked(value, labels, deps)))
        return result

    def checked_sub(self, path: _Path, left: Tracked, right: Tracked) -> Evaluated:
        """Вычитание с проверкой переполнения снизу."""
        labels = left.labels | right.labels
        result: Evaluated = []
        for target, fits in self.branch(path, le(right.value, left.value), labels, "underflow"):
            if not fits:
                target.status = PathStatus.REVERTED
                result.append((target, None))
                continue
            result.append((target, Tracked(sub(left.value, right.value), labels, left.deps | right.deps)))
        return result

    # ------- Чтение и запись -------
    def read_name(self, path: _Path, name: str) -> Tracked:
        frame = path.frames[-1] if path.frames else {}
        if name in frame:
            return frame[name]
        labels = frozenset({name}) if name in path.theta else frozenset()
        return Tracked(path.sigma[name], labels, frozenset({name}) | path.flow.get(name, frozenset()), name)

    def read_entry(self, path: _Path, base: str, key: SymValue, token: str, key_tracked: Tracked) -> Tracked:
        mapping: MapValue = path.sigma[base]
        entry = mapping.find(key)
        if entry is None:
            value = mapping.default(key)
            if mapping.value_kind is TypeKind.NUMERIC:
                path.sigma[base] = mapping.store(key, value, written=False)
        else:
            value = entry.value
        labels = (frozenset({base}) if base in path.theta else frozenset()) | key_tracked.labels
        deps = frozenset({base}) | path.flow.get((base, token), frozenset())
        return Tracked(value, labels, deps)

    def source_labels(self, path: _Path, tracked: Tracked) -> FrozenSet[str]:
        if not self.labels:
            return frozenset()
        return tracked.labels | path.taint

    def write_local(self, path: _Path, name: str, tracked: Tracked) -> None:
        path.frames[-1][name] = Tracked(
            tracked.value, self.source_labels(path, tracked), tracked.deps, tracked.origin or name
        )

    def write_state(self, path: _Path, name: str, tracked: Tracked) -> None:
        path.sigma[name] = tracked.value
        path.flow[name] = tracked.deps
        path.scalar_effects[name] = path.scalar_effects.get(name, frozenset()) | tracked.deps
        if self.labels:
            if self.source_labels(path, tracked):
                path.theta.add(name)
            else:
                path.theta.discard(name)

    def write_entry(
        self, path: _Path, base: str, key: SymValue, token: str, key_labels: FrozenSet[str], tracked: Tracked
    ) -> None:
        """Записывает элемент отображения; изменения копятся по токену выражения ключа."""
        mapping: MapValue = path.sigma[base]
        old = mapping.lookup(key)
        path.sigma[base] = mapping.store(key, tracked.value)
        path.flow[(base, token)] = tracked.deps
        change = sub(tracked.value, old) if mapping.value_kind is TypeKind.NUMERIC else Num(0)
        writes = path.map_effects.setdefault(base, {})
        previous = writes.get(token)
        if previous is None:
            writes[token] = KeyWrite(key, tracked.deps, change, old, tracked.value)
        else:
            writes[token] = KeyWrite(
                previous.key, previous.tokens | tracked.deps, add(previous.delta, change), previous.pre, tracked.value
            )
        if self.labels and (self.source_labels(path, tracked) or key_labels):
            path.theta.add(base)

    def update(self, path: _Path, op: str, old: Tracked, value: Tracked) -> Evaluated:
        """Значение после присваивания ``=``, ``+=`` или ``-=``."""
        if op == "=":
            return [(path, value)]
        if op == "+=":
            return [(path, Tracked(add(old.value, value.value), old.labels | value.labels, old.deps | value.deps))]
        return self.checked_sub(path, old, value)

    def move_ether(
        self, path: _Path, sender: Tracked, sender_token: str, recipient: Tracked, recipient_token: str, amount: Tracked
    ) -> List[_Path]:
        """Переводит эфир между счетами с проверкой достаточности баланса."""
        result: List[_Path] = []
        for debited, from_key in self.access(path, ETHER, sender.value):
            balance = self.read_entry(debited, ETHER, from_key, sender_token, sender)
            for checked, remaining in self.checked_sub(debited, balance, amount):
                if remaining is None:
                    result.append(checked)
                    continue
                self.write_entry(checked, ETHER, from_key, sender_token, sender.labels, remaining)
                for credited, to_key in self.access(checked, ETHER, recipient.value):
                    current = self.read_entry(credited, ETHER, to_key, recipient_token, recipient)
                    total = Tracked(add(current.value, amount.value), current.labels | amount.labels,
                                    current.deps | amount.deps)
                    self.write_entry(credited, ETHER, to_key, recipient_token, recipient.labels, total)
                    result.append(credited)
        return result

    # ------- Операторы -------
    def run_block(self, path: _Path, owner: str, body: Sequence[Statement], placeholder) -> List[_Path]:
        paths = [path]
        for statement in body:
            advanced: List[_Path] = []
            for current in paths:
                if current.status is not PathStatus.RUNNING:
                    advanced.append(current)
                    continue
                advanced.extend(self.run_statement(current, owner, statement, placeholder))
            paths = self.engine.limit(advanced)
        return paths

    def run_statement(self, path: _Path, owner: str, statement: Statement, placeholder) -> List[_Path]:
        sid = StatementId(owner, statement.index)
        path.pi.append(sid)
        path.current = sid
        self.engine.trace({"event": "statement", "role": self.ctx.role.value, "statement": str(sid)})

        if isinstance(statement, VarDecl):
            if statement.value is None:
                self.write_local(path, statement.name, Tracked(default_value(statement.ty.kind)))
                return [path]
            result = []
            for target, tracked in self.eval(path, owner, statement.value):
                if tracked is not None:
                    self.write_local(target, statement.name, tracked)
                result.append(target)
            return result

        if isinstance(statement, Assign):
            return self.run_assign(path, owner, statement)

        if isinstance(statement, Require):
            result = []
            for target, cond, labels, _ in self.eval_cond(path, owner, statement.condition):
                if cond is None:
                    result.append(target)
                    continue
                for branch, passed in self.branch(target, cond, labels, "guard"):
                    if not passed:
                        branch.status = PathStatus.REVERTED
                    result.append(branch)
            return result

        if isinstance(statement, If):
            result = []
            for target, cond, labels, _ in self.eval_cond(path, owner, statement.condition):
                if cond is None:
                    result.append(target)
                    continue
                for branch, taken in self.branch(target, cond, labels, "guard"):
                    body = statement.then_body if taken else statement.else_body
                    result.extend(self.run_block(branch, owner, body, placeholder))
            return result

        if isinstance(statement, Revert):
            path.status = PathStatus.REVERTED
            return [path]

        if isinstance(statement, SelfDestruct):
            result = []
            for target, beneficiary in self.eval(path, owner, statement.beneficiary):
                if beneficiary is None:
                    result.append(target)
                    continue
                contract = Tracked(CONTRACT_ADDRESS)
                beneficiary_token = index_token(statement.beneficiary, beneficiary)
                for drained, contract_key in self.access(target, ETHER, CONTRACT_ADDRESS):
                    balance = self.read_entry(drained, ETHER, contract_key, CONTRACT_TOKEN, contract)
                    for moved in self.move_ether(
                        drained, contract, CONTRACT_TOKEN, beneficiary, beneficiary_token, balance
                    ):
                        if moved.status is PathStatus.RUNNING:
                            moved.status = PathStatus.DESTROYED
                        result.append(moved)
            return result

        if isinstance(statement, Return):
            if statement.value is None:
                path.status = PathStatus.RETURNED
                return [path]
            result = []
            for target, tracked in self.eval(path, owner, statement.value):
                if tracked is not None:
                    target.status = PathStatus.RETURNED
                result.append(target)
            return result

        if isinstance(statement, Call):
            callee = self.ast.function(statement.name)
            result = []
            for target, args in self.eval_all(path, owner, statement.args):
                if args is None:
                    result.append(target)
                    continue
                bound = {
                    param.name: arg if arg.origin else replace(arg, origin=param.name)
                    for param, arg in zip(callee.params, args)
                }
                result.extend(self.run_function(target, callee, bound))
            return result

        if isinstance(statement, EtherTransfer):
            result = []
            for target, operands in self.eval_all(path, owner, (statement.recipient, statement.amount)):
                if operands is None:
                    result.append(target)
                    continue
                recipient, amount = operands
                result.extend(self.move_ether(
                    target, Tracked(CONTRACT_ADDRESS), CONTRACT_TOKEN,
                    recipient, index_token(statement.recipient, recipient), amount,
                ))
            return result

        if isinstance(statement, Placeholder):
            return placeholder(path)

        raise TypeError(f"unknown statement {statement!r}")

    def run_assign(self, path: _Path, owner: str, statement: Assign) -> List[_Path]:
        result: List[_Path] = []
        target = statement.target

        if isinstance(target, Index):
            for keyed, operands in self.eval_all(path, owner, (target.key, statement.value)):
                if operands is None:
                    result.append(keyed)
                    continue
                key, value = operands
                token = index_token(target.key, key)
                for accessed, entry_key in self.access(keyed, target.base, key.value):
                    old = self.read_entry(accessed, target.base, entry_key, token, key)
                    for updated, new in self.update(accessed, statement.op, old, value):
                        if new is not None:
                            self.write_entry(updated, target.base, entry_key, token, key.labels, new)
                        result.append(updated)
            return result

        for evaluated, value in self.eval(path, owner, statement.value):
            if value is None:
                result.append(evaluated)
                continue
            old = self.read_name(evaluated, target.name)
            for updated, new in self.update(evaluated, statement.op, old, value):
                if new is not None:
                    if target.name in updated.frames[-1]:
                        self.write_local(updated, target.name, new)
                    else:
                        self.write_state(updated, target.name, new)
                result.append(updated)
        return result

    # ------- Функции -------
    def run_function(self, path: _Path, function: FunctionDecl, args: Dict[str, Tracked]) -> List[_Path]:
        return self.run_layer(path, function, 0, args)

    def run_layer(self, path: _Path, function: FunctionDecl, layer: int, args: Dict[str, Tracked]) -> List[_Path]:
        if layer < len(function.modifiers):
            modifier = self.ast.modifier(function.modifiers[layer])
            path.frames.append({})
            finished = self.run_block(
                path, modifier.name, modifier.body,
                lambda inner: self.run_layer(inner, function, layer + 1, args),
            )
        else:
            path.frames.append(dict(args))
            finished = self.run_block(path, function.name, function.body, None)
            for done in finished:
                if done.status is PathStatus.RETURNED:
                    done.status = PathStatus.RUNNING
        for done in finished:
            done.frames.pop()
        return finished

    # ------- Итог -------
    def start(self) -> _Path:
        theta = set(self.source.theta) - {EXEC_STATE}
        sigma: Dict[str, StoredValue] = dict(self.source.sigma)
        sigma[ETHER] = self.source.ether
        path = _Path(sigma, self.source.path_cond + self.ctx.assumptions, theta)
        return path

    def charge_payment(self, path: _Path, function: FunctionDecl) -> List[_Path]:
        if not function.is_payable or self.inputs.msg_value == Num(0):
            return [path]
        sender = Tracked(self.ctx.sender, frozenset(), frozenset({"msg.sender"}), "msg.sender")
        amount = Tracked(self.inputs.msg_value, frozenset(), frozenset({"msg.value"}), "msg.value")
        path.current = StatementId(function.name, 0)
        return self.move_ether(path, sender, "msg.sender", Tracked(CONTRACT_ADDRESS), CONTRACT_TOKEN, amount)

    def finish(self, path: _Path, function: str) -> LabeledState:
        source = self.source
        pi = source.pi + tuple(path.pi)
        trail = source.trail + ((function, self.ctx.role.value),)
        facts = dict(path.facts)
        facts.update(self.relation_facts(path))

        if path.status is PathStatus.REVERTED:
            state_labels = frozenset(source.theta) - {EXEC_STATE}
            theta = state_labels | ({EXEC_STATE} if path.taint and self.labels else frozenset())
            return LabeledState(
                sigma=source.sigma,
                ether=source.ether,
                pi=pi,
                theta=theta,
                path_cond=path.pc,
                exec_state=ExecState.REVERT,
                approximate=path.approximate,
                facts=facts,
                controls=path.taint,
                trail=trail,
                step_start=len(source.pi),
            )

        sigma = dict(path.sigma)
        ether = sigma.pop(ETHER)
        theta = set(path.theta)
        exec_state = ExecState.SUCCESS
        if path.status is PathStatus.DESTROYED:
            exec_state = ExecState.SELFDESTRUCT
            theta |= set(self.ast.state_var_names) | {ETHER, EXEC_STATE}
        if path.taint and self.labels:
            theta.add(EXEC_STATE)
        return LabeledState(
            sigma=sigma,
            ether=ether,
            pi=pi,
            theta=frozenset(theta),
            path_cond=path.pc,
            exec_state=exec_state,
            approximate=path.approximate,
            scalar_effects=dict(path.scalar_effects),
            map_effects={name: dict(keys) for name, keys in path.map_effects.items()},
            facts=facts,
            controls=path.taint,
            trail=trail,
            step_start=len(source.pi),
        )

    def relation_facts(self, path: _Path) -> Dict[FactKey, bool]:
        """Следующие из условия пути отношения между адресными параметрами и msg.sender."""
        named = [("msg.sender", self.ctx.sender)] + [
            (name, value) for name, value in self.inputs.params.items() if kind_of(value) is TypeKind.ADDRESS
        ]
        result: Dict[FactKey, bool] = {}
        for i, (left_name, left) in enumerate(named):
            for right_name, right in named[i + 1:]:
                if PathSolver.entails(path.pc, Equal(left, right)):
                    result[("relation", left_name, right_name)] = True
                elif PathSolver.entails(path.pc, NotEqual(left, right)):
                    result[("relation", left_name, right_name)] = False
        return result


# ======= MainClass =======
class SymbolicEngine:
    """
    Движок символьного исполнения с метками.

    Атрибуты:
        ast: Проверенное дерево контракта
        facts: Факты зависимостей
        privileged: Привилегированные переменные в порядке объявления
        max_paths: Предел числа путей одного исполнения
        propagate_labels: Распространять ли метки
        executions: Счётчик исполнений функций
        truncated: Срабатывал ли предел путей
    """

    def __init__(
        self,
        ast: ContractAST,
        facts: Optional[DependenceFacts] = None,
        max_paths: int = 64,
        propagate_labels: bool = True,
        tracer: Optional[Tracer] = None,
    ) -> None:
        self.ast = ast
        self.facts = facts or build_facts(ast)
        self.privileged: Tuple[str, ...] = identify_privileged(ast, self.facts)
        self.max_paths = max_paths
        self.propagate_labels = propagate_labels
        self.tracer = tracer
        self.executions = 0
        self.truncated = False
        self.addresses = contract_addresses(ast)
        self._fresh = 0

    # ------- Служебное -------
    def trace(self, event: Dict[str, Any]) -> None:
        if self.tracer is not None:
            self.tracer(event)

    def limit(self, paths: List[_Path]) -> List[_Path]:
        if len(paths) <= self.max_paths:
            return paths
        if not self.truncated:
            logger.warning(f"Превышен предел путей ({self.max_paths}), лишние пути отброшены")
        self.truncated = True
        return paths[: self.max_paths]

    def fresh_inputs(self, function: FunctionDecl) -> CallInputs:
        """Свежие символы параметров для пары исполнений."""
        self._fresh += 1
        n = self._fresh
        params = {
            param.name: Symbol(f"{param.name}#{n}", param.ty.kind, token=param.name) for param in function.params
        }
        msg_value = (
            Symbol(f"msg.value#{n}", TypeKind.NUMERIC, token="msg.value") if function.is_payable else Num(0)
        )
        block_number = Symbol(f"block.number#{n}", TypeKind.NUMERIC, token="block.number")
        return CallInputs(params=params, msg_value=msg_value, block_number=block_number)

    # ------- Вызывающие -------
    def privileged_values(self, state: LabeledState) -> List[SymValue]:
        return [state.sigma[name] for name in self.privileged]

    def privileged_context(self, state: LabeledState) -> CallerContext:
        """msg.sender - текущее значение первой установленной привилегированной переменной."""
        for value in self.privileged_values(state):
            if value != Addr(ZERO_ADDRESS):
                return CallerContext(Role.PRIVILEGED, value)
        return CallerContext(Role.PRIVILEGED, DEPLOYER)

    def ordinary_context(self, state: LabeledState) -> CallerContext:
        excluded = [DEPLOYER] + self.privileged_values(state) + list(self.addresses)
        assumptions = []
        for value in excluded:
            folded = simplify(NotEqual(ORDINARY, value))
            if folded is not True and folded not in assumptions:
                assumptions.append(folded)
        return CallerContext(Role.ORDINARY, ORDINARY, tuple(assumptions))

    # ------- Исполнение -------
    def initial_state(self) -> LabeledState:
        """Исполняет инициализаторы и конструктор от имени развёртывающего счёта."""
        constructor = self.ast.constructor
        deployer_pc = []
        for address in self.addresses:
            deployer_pc.append(NotEqual(DEPLOYER, address))

        sigma: Dict[str, StoredValue] = {}
        for var in self.ast.state_vars:
            if var.ty.is_mapping:
                sigma[var.name] = MapValue(var.name, var.ty.value)
            elif var.ty.kind is TypeKind.NUMERIC:
                sigma[var.name] = Symbol(f"{var.name}@init", TypeKind.NUMERIC, token=var.name)
            else:
                sigma[var.name] = default_value(var.ty.kind)
        blank = LabeledState(sigma=sigma, ether=MapValue(ETHER, TypeKind.NUMERIC), path_cond=tuple(deployer_pc))

        inputs = CallInputs(
            params={},
            msg_value=(
                Symbol("msg.value@deploy", TypeKind.NUMERIC, token="msg.value")
                if constructor is not None and constructor.is_payable else Num(0)
            ),
            block_number=Symbol("block.number@deploy", TypeKind.NUMERIC, token="block.number"),
        )
        run = _Run(self, CallerContext(Role.PRIVILEGED, DEPLOYER), inputs, blank, labels=False)
        path = run.start()
        path.frames.append({})
        paths = [path]

        for var in self.ast.state_vars:
            if var.initializer is None:
                continue
            evaluated = []
            for current in paths:
                for target, tracked in run.eval(current, CONSTRUCTOR, var.initializer):
                    if tracked is not None:
                        target.sigma[var.name] = tracked.value
                    evaluated.append(target)
            paths = evaluated
        for current in paths:
            current.frames.pop()
            current.flow.clear()

        if constructor is not None:
            finished = []
            for current in paths:
                if current.status is not PathStatus.RUNNING:
                    finished.append(current)
                    continue
                for charged in run.charge_payment(current, constructor):
                    if charged.status is PathStatus.RUNNING:
                        finished.extend(run.run_function(charged, constructor, {}))
                    else:
                        finished.append(charged)
            paths = finished

        for current in paths:
            if current.status in (PathStatus.RUNNING, PathStatus.RETURNED):
                sigma = dict(current.sigma)
                ether = sigma.pop(ETHER)
                logger.debug(f"Начальное состояние {self.ast.name}: {len(current.pi)} операторов конструктора")
                return LabeledState(
                    sigma=sigma,
                    ether=ether,
                    pi=tuple(current.pi),
                    path_cond=current.pc,
                    approximate=current.approximate,
                )
        raise ConstructorRevertError(f"constructor of '{self.ast.name}' reverts on every path")

    def execute(
        self, function: FunctionDecl, ctx: CallerContext, state: LabeledState, inputs: CallInputs
    ) -> List[LabeledState]:
        """
        Исполняет функцию из помеченного состояния.

        Args:
            function: Исполняемая функция
            ctx: Контекст вызывающего
            state: Исходное помеченное состояние
            inputs: Символы параметров

        Returns:
            Преемники по одному на выполнимый путь
        """
        if state.exec_state is ExecState.SELFDESTRUCT:
            return [state]
        self.executions += 1
        self.trace({"event": "execute", "function": function.name, "role": ctx.role.value})

        run = _Run(self, ctx, inputs, state, labels=self.propagate_labels)
        path = run.start()
        if not PathSolver.satisfiable(path.pc):
            return []

        paths = []
        for charged in run.charge_payment(path, function):
            if charged.status is PathStatus.RUNNING:
                bound = {
                    param.name: Tracked(inputs.params[param.name], frozenset(), frozenset({param.name}), param.name)
                    for param in function.params
                }
                paths.extend(run.run_function(charged, function, bound))
            else:
                paths.append(charged)

        successors = [run.finish(done, function.name) for done in self.limit(paths)]
        for successor in successors:
            self.trace({
                "event": "path",
                "function": function.name,
                "role": ctx.role.value,
                "exec_state": successor.exec_state.value,
                "statements": [str(sid) for sid in successor.last_step],
            })
        return successors

    def execute_pair(self, function: FunctionDecl, state: LabeledState) -> List[PairedExecution]:
        """Исполняет функцию обоими вызывающими и сопоставляет пути."""
        inputs = self.fresh_inputs(function)
        privileged = self.execute(function, self.privileged_context(state), state, inputs)
        ordinary = self.execute(function, self.ordinary_context(state), state, inputs)
        return [
            PairedExecution(function.name, state, p_state, o_state, inputs)
            for p_state, o_state in pair_paths(privileged, ordinary)
        ]


# ======= Pairing =======
def pair_paths(
    privileged: Sequence[LabeledState], ordinary: Sequence[LabeledState]
) -> List[Tuple[LabeledState, LabeledState]]:
    """
    Сопоставляет каждому привилегированному пути обычный путь.

    Выбирается обычный путь с наименьшим числом противоречащих фактов,
    затем с наибольшим числом совпадающих, затем первый по порядку.
    """
    pairs = []
    if not ordinary:
        return pairs
    for p_state in privileged:
        best = None
        best_score = None
        for index, o_state in enumerate(ordinary):
            shared = p_state.facts.keys() & o_state.facts.keys()
            conflicts = sum(1 for key in shared if p_state.facts[key] != o_state.facts[key])
            score = (conflicts, -(len(shared) - conflicts), index)
            if best_score is None or score < best_score:
                best, best_score = o_state, score
        pairs.append((p_state, best))
    return pairs


# ======= PublicFunctions =======
def identify_privileged(ast: ContractAST, facts: DependenceFacts) -> Tuple[str, ...]:
    """
    Находит привилегированные адресные переменные состояния.

    Наибольшая неподвижная точка: из присваиваемых адресных переменных
    исключаются те, которые пишет публичная функция, не ограничивающая
    вызывающего оставшимися привилегированными переменными.
    """
    constructor_writes = facts.writes.get(CONSTRUCTOR, frozenset())
    writers: Dict[str, List[FunctionDecl]] = {}
    privileged: Set[str] = set()
    for var in ast.state_vars:
        if var.ty.kind is not TypeKind.ADDRESS:
            continue
        writers[var.name] = [f for f in ast.entry_points if var.name in facts.writes.get(f.name, frozenset())]
        if var.initializer is not None or var.name in constructor_writes or writers[var.name]:
            privileged.add(var.name)

    changed = True
    while changed:
        changed = False
        for name in sorted(privileged):
            if not all(facts.caller_guards.get(f.name, frozenset()) & privileged for f in writers[name]):
                privileged.discard(name)
                changed = True

    result = tuple(var.name for var in ast.state_vars if var.name in privileged)
    logger.debug(f"Привилегированные переменные {ast.name}: {result}")
    return result


def exec_constructor(ast: ContractAST) -> LabeledState:
    """Начальное помеченное состояние после конструктора."""
    return SymbolicEngine(ast).initial_state()


def labeled_symbolic_exec(
    ast: ContractAST,
    function: FunctionDecl,
    ctx: CallerContext,
    state: LabeledState,
    inputs: CallInputs,
    propagate_labels: bool = True,
) -> List[LabeledState]:
    """Исполняет одну функцию из помеченного состояния отдельным движком."""
    engine = SymbolicEngine(ast, propagate_labels=propagate_labels)
    return engine.execute(function, ctx, state, inputs)
