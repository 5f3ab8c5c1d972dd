"""
Модуль оракула полного перебора.

Исполняет контракт конкретно на малых областях значений, перебирая все
последовательности вызовов и все назначения ролей вызывающих, находит
пары различающихся состояний и сверяет с ними результат анализатора.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from src.config import settings
from .abstractions import ConstructorRevertError, DomainTooLargeError
from .analyzer import DifferenceSet, ExaminedPair, IterativeAnalyzer, replay_chain
from .engine import Role, identify_privileged, literal_token
from .facts import ETHER, EXEC_STATE, build_facts
from .printer import Printer
from .syntax import (
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
    TypeKind,
    Unary,
    VarDecl,
)


# Настройка логирования
logger = logging.getLogger(__name__)

DEPLOYER_ACCOUNT = "P"
ORDINARY_ACCOUNTS = ("O", "Q", "R")
CONTRACT_ACCOUNT = "contract"

SUCCESS = "success"
REVERT = "revert"
SELFDESTRUCT = "selfdestruct"


# ======= DataClasses =======
@dataclass(frozen=True)
class ConcreteState:
    """
    Конкретное состояние контракта.

    Атрибуты:
        sigma: Значения переменных состояния (отображения - словари явно записанных ключей)
        ether: Балансы эфира явно затронутых счетов
        destroyed: Контракт самоуничтожен
        provenance: Цепочка (функция, роль, аргументы)
    """
    sigma: Dict[str, Any]
    ether: Dict[str, int] = field(default_factory=dict)
    destroyed: bool = False
    provenance: Tuple[Tuple[str, str, Tuple[Any, ...]], ...] = ()

    def copy(self) -> "ConcreteState":
        sigma = {name: dict(value) if isinstance(value, dict) else value for name, value in self.sigma.items()}
        return replace(self, sigma=sigma, ether=dict(self.ether))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": {
                name: dict(sorted(value.items())) if isinstance(value, dict) else value
                for name, value in self.sigma.items()
            },
            "ether": dict(sorted(self.ether.items())),
            "destroyed": self.destroyed,
            "provenance": [
                {"function": function, "role": role, "args": list(args)} for function, role, args in self.provenance
            ],
        }


@dataclass(frozen=True)
class CallChoice:
    """Вызов функции с аргументами в ролевых токенах (``caller``/``other`` для адресов)."""
    function: str
    args: Tuple[Any, ...]
    msg_value: int = 0

    def label(self) -> str:
        rendered = ", ".join(str(arg) for arg in self.args)
        suffix = f" {{value: {self.msg_value}}}" if self.msg_value else ""
        return f"{self.function}({rendered}){suffix}"


@dataclass(frozen=True)
class Witness:
    """
    Пара различающихся состояний.

    Атрибуты:
        calls: Общая последовательность вызовов
        roles_a: Роли первой последовательности (привилегированная на шаге расхождения)
        roles_b: Роли второй последовательности
        divergence: Номер шага (с нуля), на котором роли различаются
        state_a: Итоговое состояние первой последовательности
        state_b: Итоговое состояние второй последовательности
        branch_vars: Переменные ветвления
    """
    calls: Tuple[CallChoice, ...]
    roles_a: Tuple[Role, ...]
    roles_b: Tuple[Role, ...]
    divergence: int
    state_a: ConcreteState
    state_b: ConcreteState
    branch_vars: FrozenSet[str]

    @property
    def functions(self) -> Tuple[str, ...]:
        return tuple(call.function for call in self.calls)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "calls": [call.label() for call in self.calls],
            "roles_a": [role.value for role in self.roles_a],
            "roles_b": [role.value for role in self.roles_b],
            "divergence": self.divergence,
            "branch_vars": sorted(self.branch_vars),
            "state_a": self.state_a.to_dict(),
            "state_b": self.state_b.to_dict(),
        }


@dataclass
class Traversal:
    """
    Результат полного перебора.

    Атрибуты:
        depth: Глубина перебора
        witnesses: Найденные пары различающихся состояний
        executions: Число конкретных исполнений функций
        runs: Число пройденных последовательностей
    """
    depth: int
    witnesses: List[Witness] = field(default_factory=list)
    executions: int = 0
    runs: int = 0

    def by_functions(self) -> Dict[Tuple[str, ...], List[Witness]]:
        grouped: Dict[Tuple[str, ...], List[Witness]] = {}
        for witness in self.witnesses:
            grouped.setdefault(witness.functions, []).append(witness)
        return grouped


@dataclass(frozen=True)
class Violation:
    """Нарушение одного из свойств с контрпримером."""
    theorem: str
    functions: Tuple[str, ...]
    message: str
    counterexample: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "functions": list(self.functions),
            "message": self.message,
            "counterexample": self.counterexample,
        }


@dataclass
class TheoremReport:
    """
    Отчёт сверки анализатора с оракулом.

    Атрибуты:
        contract: Имя контракта
        depth: Глубина перебора
        violations: Найденные нарушения
        witnesses: Число пар различающихся состояний оракула
        differences: Число разностей анализатора
        oracle_executions: Исполнения функций оракулом
        analyzer_executions: Исполнения функций анализатором
    """
    contract: str
    depth: int
    violations: List[Violation] = field(default_factory=list)
    witnesses: int = 0
    differences: int = 0
    oracle_executions: int = 0
    analyzer_executions: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def of(self, theorem: str) -> List[Violation]:
        return [violation for violation in self.violations if violation.theorem == theorem]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "contract": self.contract,
            "depth": self.depth,
            "ok": self.ok,
            "witnesses": self.witnesses,
            "differences": self.differences,
            "oracle_executions": self.oracle_executions,
            "analyzer_executions": self.analyzer_executions,
            "violations": [violation.to_dict() for violation in self.violations],
        }


# ======= Interpreter =======
class _Revert(Exception):
    pass


class _Return(Exception):
    pass


class _Destroyed(Exception):
    pass


class _Frame(dict):
    """Локальные переменные вместе с именами, через которые прочитаны их значения."""

    def __init__(self, values: Optional[Dict[str, Any]] = None, origins: Optional[Dict[str, str]] = None) -> None:
        super().__init__(values or {})
        self.origins: Dict[str, str] = dict(origins or {})

    def origin(self, name: str) -> str:
        return self.origins.get(name, name)


@dataclass
class _Context:
    state: ConcreteState
    caller: str
    msg_value: int
    effects: Dict[str, Dict[str, Any]] = field(default_factory=dict)


class ConcreteInterpreter:
    """
    Конкретный интерпретатор MiniSol.

    Неинициализированные числовые переменные и элементы числовых
    отображений начинают с затравочного значения, балансы эфира тоже.
    Записи в отображения и эфир запоминаются по токенам выражений
    ключей, как их видит символьный движок.

    Args:
        ast: Проверенное дерево контракта
        seed: Затравочное числовое значение
        block_number: Значение block.number
    """

    def __init__(self, ast: ContractAST, seed: Optional[int] = None, block_number: Optional[int] = None) -> None:
        self.ast = ast
        self.seed = seed if seed is not None else settings.oracle_seed_value
        self.block_number = block_number if block_number is not None else settings.oracle_block_number
        self.executions = 0

    # ------- Значения -------
    def seed_value(self, kind: TypeKind) -> Any:
        if kind is TypeKind.NUMERIC:
            return self.seed
        return False if kind is TypeKind.BOOLEAN else ZERO_ADDRESS

    @staticmethod
    def zero(kind: TypeKind) -> Any:
        if kind is TypeKind.NUMERIC:
            return 0
        return False if kind is TypeKind.BOOLEAN else ZERO_ADDRESS

    def mapping_default(self, name: str) -> Any:
        if name == ETHER:
            return self.seed
        return self.seed_value(self.ast.state_var(name).ty.value)

    def numeric_mapping(self, name: str) -> bool:
        return name == ETHER or self.ast.state_var(name).ty.value is TypeKind.NUMERIC

    def lookup(self, state: ConcreteState, name: str, key: Any) -> Any:
        table = state.ether if name == ETHER else state.sigma[name]
        return table.get(key, self.mapping_default(name))

    def store(self, state: ConcreteState, name: str, key: Any, value: Any) -> None:
        table = state.ether if name == ETHER else state.sigma[name]
        table[key] = value

    def write_entry(self, ctx: _Context, name: str, key: Any, token: str, value: Any) -> None:
        """Записывает элемент и копит изменение по токену выражения ключа."""
        old = self.lookup(ctx.state, name, key)
        self.store(ctx.state, name, key, value)
        changes = ctx.effects.setdefault(name, {})
        if self.numeric_mapping(name):
            changes[token] = changes.get(token, 0) + value - old
        else:
            changes[token] = (changes[token][0] if token in changes else old, value)

    # ------- Выражения -------
    @staticmethod
    def origin(frame: _Frame, expression: Expression) -> Optional[str]:
        """Имя, через которое прочитано значение выражения (как в символьном движке)."""
        if isinstance(expression, Literal):
            return literal_token(expression)
        if isinstance(expression, Builtin):
            return expression.name
        if isinstance(expression, Identifier):
            return frame.origin(expression.name) if expression.name in frame else expression.name
        return None

    def key_token(self, frame: _Frame, expression: Expression) -> str:
        return self.origin(frame, expression) or Printer.expression(expression)

    def eval(self, ctx: _Context, frame: _Frame, expression: Expression) -> Any:
        if isinstance(expression, Literal):
            return expression.value
        if isinstance(expression, Identifier):
            if expression.name in frame:
                return frame[expression.name]
            return ctx.state.sigma[expression.name]
        if isinstance(expression, Builtin):
            return {
                "msg.sender": ctx.caller,
                "msg.value": ctx.msg_value,
                "block.number": self.block_number,
            }[expression.name]
        if isinstance(expression, Index):
            return self.lookup(ctx.state, expression.base, self.eval(ctx, frame, expression.key))
        if isinstance(expression, Unary):
            return not self.eval(ctx, frame, expression.operand)
        if isinstance(expression, Binary):
            return self.eval_binary(ctx, frame, expression)
        raise TypeError(f"unknown expression {expression!r}")

    def eval_binary(self, ctx: _Context, frame: _Frame, expression: Binary) -> Any:
        op = expression.op
        left = self.eval(ctx, frame, expression.left)
        if op == "&&":
            return bool(left) and bool(self.eval(ctx, frame, expression.right))
        if op == "||":
            return bool(left) or bool(self.eval(ctx, frame, expression.right))
        right = self.eval(ctx, frame, expression.right)
        if op == "+":
            return left + right
        if op == "-":
            return self.checked_sub(left, right)
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise _Revert()
            return left // right
        return {
            "==": lambda: left == right,
            "!=": lambda: left != right,
            "<": lambda: left < right,
            "<=": lambda: left <= right,
            ">": lambda: left > right,
            ">=": lambda: left >= right,
        }[op]()

    @staticmethod
    def checked_sub(left: int, right: int) -> int:
        if right > left:
            raise _Revert()
        return left - right

    # ------- Операторы -------
    def run_block(
        self, ctx: _Context, frame: _Frame, body: Tuple[Statement, ...], placeholder: Optional[Callable]
    ) -> None:
        for statement in body:
            self.run_statement(ctx, frame, statement, placeholder)

    def run_statement(
        self, ctx: _Context, frame: _Frame, statement: Statement, placeholder: Optional[Callable]
    ) -> None:
        if isinstance(statement, VarDecl):
            value = self.eval(ctx, frame, statement.value) if statement.value is not None else None
            frame[statement.name] = value if value is not None else self.zero(statement.ty.kind)
            origin = self.origin(frame, statement.value) if statement.value is not None else None
            frame.origins[statement.name] = origin or statement.name
        elif isinstance(statement, Assign):
            self.run_assign(ctx, frame, statement)
        elif isinstance(statement, Require):
            if not self.eval(ctx, frame, statement.condition):
                raise _Revert()
        elif isinstance(statement, If):
            body = statement.then_body if self.eval(ctx, frame, statement.condition) else statement.else_body
            self.run_block(ctx, frame, body, placeholder)
        elif isinstance(statement, Revert):
            raise _Revert()
        elif isinstance(statement, SelfDestruct):
            beneficiary = self.eval(ctx, frame, statement.beneficiary)
            balance = self.lookup(ctx.state, ETHER, CONTRACT_ACCOUNT)
            self.move_ether(
                ctx, CONTRACT_ACCOUNT, CONTRACT_ACCOUNT,
                beneficiary, self.key_token(frame, statement.beneficiary), balance,
            )
            raise _Destroyed()
        elif isinstance(statement, Return):
            if statement.value is not None:
                self.eval(ctx, frame, statement.value)
            raise _Return()
        elif isinstance(statement, Call):
            callee = self.ast.function(statement.name)
            args = {param.name: self.eval(ctx, frame, arg) for param, arg in zip(callee.params, statement.args)}
            origins = {
                param.name: self.origin(frame, arg) or param.name for param, arg in zip(callee.params, statement.args)
            }
            self.run_function(ctx, callee, args, origins)
        elif isinstance(statement, EtherTransfer):
            recipient = self.eval(ctx, frame, statement.recipient)
            amount = self.eval(ctx, frame, statement.amount)
            self.move_ether(
                ctx, CONTRACT_ACCOUNT, CONTRACT_ACCOUNT,
                recipient, self.key_token(frame, statement.recipient), amount,
            )
        elif isinstance(statement, Placeholder):
            placeholder()
        else:
            raise TypeError(f"unknown statement {statement!r}")

    def run_assign(self, ctx: _Context, frame: _Frame, statement: Assign) -> None:
        target = statement.target
        if isinstance(target, Index):
            key = self.eval(ctx, frame, target.key)
            value = self.eval(ctx, frame, statement.value)
            old = self.lookup(ctx.state, target.base, key)
            new = self.apply(statement.op, old, value)
            self.write_entry(ctx, target.base, key, self.key_token(frame, target.key), new)
            return
        value = self.eval(ctx, frame, statement.value)
        if target.name in frame:
            frame[target.name] = self.apply(statement.op, frame[target.name], value)
            origin = self.origin(frame, statement.value) if statement.op == "=" else None
            frame.origins[target.name] = origin or target.name
        else:
            ctx.state.sigma[target.name] = self.apply(statement.op, ctx.state.sigma[target.name], value)

    def apply(self, op: str, old: Any, value: Any) -> Any:
        if op == "+=":
            return old + value
        if op == "-=":
            return self.checked_sub(old, value)
        return value

    def move_ether(
        self, ctx: _Context, sender: Any, sender_token: str, recipient: Any, recipient_token: str, amount: int
    ) -> None:
        balance = self.lookup(ctx.state, ETHER, sender)
        self.write_entry(ctx, ETHER, sender, sender_token, self.checked_sub(balance, amount))
        self.write_entry(ctx, ETHER, recipient, recipient_token, self.lookup(ctx.state, ETHER, recipient) + amount)

    def run_function(
        self,
        ctx: _Context,
        function: FunctionDecl,
        args: Dict[str, Any],
        origins: Optional[Dict[str, str]] = None,
        layer: int = 0,
    ) -> None:
        if layer < len(function.modifiers):
            modifier = self.ast.modifier(function.modifiers[layer])
            self.run_block(
                ctx, _Frame(), modifier.body, lambda: self.run_function(ctx, function, args, origins, layer + 1)
            )
            return
        try:
            self.run_block(ctx, _Frame(args, origins), function.body, None)
        except _Return:
            pass

    # ------- Вызовы -------
    def deploy(self) -> ConcreteState:
        """Начальное состояние после инициализаторов и конструктора."""
        sigma: Dict[str, Any] = {}
        for var in self.ast.state_vars:
            sigma[var.name] = {} if var.ty.is_mapping else self.seed_value(var.ty.kind)
        state = ConcreteState(sigma)
        ctx = _Context(state, DEPLOYER_ACCOUNT, 0)
        try:
            for var in self.ast.state_vars:
                if var.initializer is not None:
                    state.sigma[var.name] = self.eval(ctx, _Frame(), var.initializer)
            if self.ast.constructor is not None:
                self.run_function(ctx, self.ast.constructor, {})
        except (_Revert, _Destroyed):
            raise ConstructorRevertError(f"constructor of '{self.ast.name}' reverts")
        return state

    def run(
        self, state: ConcreteState, function: FunctionDecl, caller: str, args: Dict[str, Any], msg_value: int = 0
    ) -> Tuple[ConcreteState, str, Dict[str, Dict[str, Any]]]:
        """
        Исполняет функцию из конкретного состояния.

        Returns:
            Преемник, итог исполнения (success, revert или selfdestruct) и
            изменения отображений по токенам выражений ключей
        """
        if state.destroyed:
            return state, SELFDESTRUCT, {}
        self.executions += 1
        work = state.copy()
        ctx = _Context(work, caller, msg_value if function.is_payable else 0)
        try:
            if ctx.msg_value:
                self.move_ether(ctx, caller, "msg.sender", CONTRACT_ACCOUNT, CONTRACT_ACCOUNT, ctx.msg_value)
            self.run_function(ctx, function, args)
        except _Revert:
            return state, REVERT, {}
        except _Destroyed:
            return replace(work, destroyed=True), SELFDESTRUCT, ctx.effects
        return work, SUCCESS, ctx.effects

    def call(
        self, state: ConcreteState, function: FunctionDecl, caller: str, args: Dict[str, Any], msg_value: int = 0
    ) -> Tuple[ConcreteState, str]:
        """Исполняет функцию; возвращает преемник и итог исполнения."""
        successor, outcome, _ = self.run(state, function, caller, args, msg_value)
        return successor, outcome


# ======= MainClass =======
@dataclass(frozen=True)
class _Run:
    state: ConcreteState
    observations: Tuple[Dict[str, Any], ...] = ()


class Oracle:
    """
    Полный перебор состояний контракта на малых областях.

    Args:
        ast: Проверенное дерево контракта
        numeric_domain: Значения числовых аргументов
    """

    def __init__(self, ast: ContractAST, numeric_domain: Optional[Iterable[int]] = None) -> None:
        self.ast = ast
        self.numeric_domain = tuple(numeric_domain if numeric_domain is not None else settings.oracle_numeric_domain)
        self.interpreter = ConcreteInterpreter(ast)
        self.privileged = identify_privileged(ast, build_facts(ast))
        self.privileged_scalars = set(self.privileged)

    # ------- Вызывающие -------
    def privileged_caller(self, state: ConcreteState) -> str:
        for name in self.privileged:
            if state.sigma[name] != ZERO_ADDRESS:
                return state.sigma[name]
        return DEPLOYER_ACCOUNT

    def ordinary_caller(self, state: ConcreteState) -> str:
        excluded = {DEPLOYER_ACCOUNT} | {state.sigma[name] for name in self.privileged}
        return next(account for account in ORDINARY_ACCOUNTS if account not in excluded)

    # ------- Перебор вызовов -------
    def domain(self, kind: TypeKind) -> Tuple[Any, ...]:
        if kind is TypeKind.ADDRESS:
            return ("caller", "other")
        if kind is TypeKind.BOOLEAN:
            return (False, True)
        return self.numeric_domain

    def choices(self) -> List[CallChoice]:
        result = []
        for function in self.ast.entry_points:
            domains = [self.domain(param.ty.kind) for param in function.params]
            values = self.numeric_domain if function.is_payable else (0,)
            for args in product(*domains):
                for msg_value in values:
                    result.append(CallChoice(function.name, tuple(args), msg_value))
        return result

    def guard(self, depth: int, width: int) -> None:
        total = sum((2 * width) ** k for k in range(1, depth + 1))
        if depth > settings.oracle_max_depth or total > settings.oracle_max_sequences:
            raise DomainTooLargeError(
                f"oracle domain too large for '{self.ast.name}': depth {depth}, {total} executions"
            )

    def step(self, state: ConcreteState, choice: CallChoice, role: Role) -> Tuple[ConcreteState, Dict[str, Any]]:
        """
        Исполняет один вызов от имени роли.

        Обычный вызов исполняется с позиции привилегированного счёта:
        счета привилегированного и обычного вызывающих меняются местами
        во всех непривилегированных переменных и эфире, а после
        исполнения возвращаются обратно.
        """
        function = self.ast.function(choice.function)
        privileged, ordinary = self.privileged_caller(state), self.ordinary_caller(state)
        if role is Role.PRIVILEGED:
            source, caller, other = state, privileged, ordinary
        else:
            source, caller, other = self.mirror(state, privileged, ordinary), ordinary, privileged
        args = {
            param.name: {"caller": caller, "other": other}.get(arg, arg) if param.ty.kind is TypeKind.ADDRESS else arg
            for param, arg in zip(function.params, choice.args)
        }
        successor, outcome, effects = self.interpreter.run(source, function, caller, args, choice.msg_value)
        observation = self.observe(source, successor, outcome, effects, caller, other)
        if role is Role.ORDINARY:
            successor = self.mirror(successor, privileged, ordinary)
        successor = replace(successor, provenance=state.provenance + ((choice.function, role.value, choice.args),))
        return successor, observation

    def mirror(self, state: ConcreteState, first: str, second: str) -> ConcreteState:
        """Меняет местами два счёта везде, кроме привилегированных скаляров."""
        accounts = {first: second, second: first}

        def rename(value: Any) -> Any:
            return accounts.get(value, value) if isinstance(value, str) else value

        sigma: Dict[str, Any] = {}
        for name, value in state.sigma.items():
            if isinstance(value, dict):
                sigma[name] = {rename(key): rename(entry) for key, entry in value.items()}
            elif name in self.privileged_scalars:
                sigma[name] = value
            else:
                sigma[name] = rename(value)
        ether = {rename(key): balance for key, balance in state.ether.items()}
        return replace(state, sigma=sigma, ether=ether)

    # ------- Наблюдения -------
    def observe(
        self,
        before: ConcreteState,
        after: ConcreteState,
        outcome: str,
        effects: Dict[str, Dict[str, Any]],
        caller: str,
        other: str,
    ) -> Dict[str, Any]:
        """Изменения одного исполнения: скаляры в ролевых токенах, отображения по токенам ключей."""

        def token(value: Any) -> Any:
            if isinstance(value, str):
                return "caller" if value == caller else "other" if value == other else value
            return value

        result: Dict[str, Any] = {EXEC_STATE: outcome}
        for var in self.ast.state_vars:
            if var.ty.is_mapping:
                continue
            pre, post = before.sigma[var.name], after.sigma[var.name]
            if pre != post:
                result[var.name] = post - pre if var.ty.kind is TypeKind.NUMERIC else (token(pre), token(post))
        for name, writes in effects.items():
            changes = self.mapping_changes(name, writes, token)
            if changes:
                result[name] = changes
        return result

    def mapping_changes(
        self, name: str, writes: Dict[str, Any], token: Callable[[Any], Any]
    ) -> FrozenSet[Tuple[str, Any]]:
        changes = set()
        numeric = self.interpreter.numeric_mapping(name)
        for key_token, change in writes.items():
            if numeric:
                if change:
                    changes.add((key_token, change))
            elif change[0] != change[1]:
                changes.add((key_token, (token(change[0]), token(change[1]))))
        return frozenset(changes)

    # ------- Сравнение состояний -------
    def differing(self, a: ConcreteState, b: ConcreteState) -> Set[str]:
        """Переменные, различающиеся в двух состояниях."""

        def differ_map(name: str, left: Dict[Any, Any], right: Dict[Any, Any]) -> bool:
            default = self.interpreter.mapping_default(name)
            return any(left.get(k, default) != right.get(k, default) for k in set(left) | set(right))

        names = set()
        for var in self.ast.state_vars:
            left, right = a.sigma[var.name], b.sigma[var.name]
            if var.ty.is_mapping:
                if differ_map(var.name, left, right):
                    names.add(var.name)
            elif left != right:
                names.add(var.name)
        if differ_map(ETHER, a.ether, b.ether):
            names.add(ETHER)
        return names

    def branch_vars(self, a: _Run, b: _Run) -> FrozenSet[str]:
        last_a, last_b = a.observations[-1], b.observations[-1]
        observed = {name for name in set(last_a) | set(last_b) if last_a.get(name) != last_b.get(name)}
        return frozenset(self.differing(a.state, b.state) | observed)

    # ------- Перебор -------
    def traverse(self, depth: int) -> Traversal:
        """
        Перебирает все последовательности вызовов до заданной глубины.

        Пара последовательностей с одинаковыми вызовами, различающимися
        ролью ровно на одном шаге, считается парой различающихся
        состояний, если на этом шаге наблюдения ролей различаются, а
        итоговые переменные ветвления непусты. Обычные шаги исполняются
        с позиции привилегированного счёта, поэтому различия даёт только
        проверка личности вызывающего, а не разные балансы счетов.

        Raises:
            DomainTooLargeError: Перебор превышает настроенные пределы
        """
        choices = self.choices()
        self.guard(depth, len(choices))
        result = Traversal(depth=depth)
        initial = self.interpreter.deploy()
        self.extend({(): _Run(initial)}, (), choices, depth, result)
        result.executions = self.interpreter.executions
        logger.info(
            f"Оракул {self.ast.name}: глубина {depth}, пар {len(result.witnesses)}, "
            f"исполнений {result.executions}"
        )
        return result

    def extend(
        self,
        runs: Dict[Tuple[Role, ...], _Run],
        calls: Tuple[CallChoice, ...],
        choices: List[CallChoice],
        depth: int,
        result: Traversal,
    ) -> None:
        if calls:
            result.runs += len(runs)
            self.collect(runs, calls, result)
        if len(calls) == depth:
            return
        for choice in choices:
            extended: Dict[Tuple[Role, ...], _Run] = {}
            for roles, run in runs.items():
                for role in (Role.PRIVILEGED, Role.ORDINARY):
                    state, observation = self.step(run.state, choice, role)
                    extended[roles + (role,)] = _Run(state, run.observations + (observation,))
            self.extend(extended, calls + (choice,), choices, depth, result)

    def collect(self, runs: Dict[Tuple[Role, ...], _Run], calls: Tuple[CallChoice, ...], result: Traversal) -> None:
        for roles_a, run_a in runs.items():
            for index, role in enumerate(roles_a):
                if role is not Role.PRIVILEGED:
                    continue
                roles_b = roles_a[:index] + (Role.ORDINARY,) + roles_a[index + 1:]
                run_b = runs[roles_b]
                if run_a.observations[index] == run_b.observations[index]:
                    continue
                bv = self.branch_vars(run_a, run_b)
                if bv:
                    result.witnesses.append(
                        Witness(calls, roles_a, roles_b, index, run_a.state, run_b.state, bv)
                    )


# ======= PublicFunctions =======
def full_traverse(ast: ContractAST, depth: int) -> Traversal:
    """Полный перебор пар различающихся состояний до глубины ``depth``."""
    return Oracle(ast).traverse(depth)


def pair_branch_vars(examined: ExaminedPair) -> FrozenSet[str]:
    """Переменные ветвления помеченной пары: помеченные или с разными сводками."""
    differing = {name for name in examined.phi_p if examined.phi_p[name] != examined.phi_o[name]}
    return frozenset(set(examined.pair.privileged.theta) | differing)


def check_theorems(
    ast: ContractAST,
    depth: int,
    propagate_labels: bool = True,
    include_labels: bool = True,
) -> TheoremReport:
    """
    Сверяет анализатор с оракулом.

    Проверяются три свойства: каждая пара оракула покрыта повтором
    привилегированной цепочки анализатора (полнота), каждая разность
    анализатора подтверждена парой оракула с той же последовательностью
    функций (корректность), каждая переменная ветвления помеченной пары
    входит в разность.

    Args:
        ast: Проверенное дерево контракта
        depth: Глубина перебора оракула
        propagate_labels: Распространять ли метки в анализаторе
        include_labels: Учитывать ли метки в разности

    Returns:
        Отчёт с нарушениями и минимальными контрпримерами
    """
    traversal = full_traverse(ast, depth)
    analyzer = IterativeAnalyzer(ast, propagate_labels=propagate_labels, include_labels=include_labels)
    dset = analyzer.analyze()
    report = TheoremReport(
        contract=ast.name,
        depth=depth,
        witnesses=len(traversal.witnesses),
        differences=len(dset.D),
        oracle_executions=traversal.executions,
        analyzer_executions=dset.executions,
    )
    report.violations.extend(check_completeness(analyzer, traversal))
    report.violations.extend(check_soundness(dset, traversal))
    report.violations.extend(check_branch_summaries(dset))
    if report.violations:
        logger.warning(f"{ast.name}: нарушений {len(report.violations)}")
    return report


def check_completeness(analyzer: IterativeAnalyzer, traversal: Traversal) -> List[Violation]:
    violations = []
    witnesses = sorted(traversal.witnesses, key=lambda w: (len(w.calls), len(w.branch_vars)))
    replayed: Dict[Tuple[str, ...], List[FrozenSet[str]]] = {}
    reported: Set[Tuple[str, ...]] = set()
    for witness in witnesses:
        functions = witness.functions
        if functions in reported:
            continue
        if functions not in replayed:
            replayed[functions] = [
                pair_branch_vars(examined)
                for _, pairs in replay_chain(analyzer, functions)
                for examined in pairs
            ]
        if not any(witness.branch_vars <= found for found in replayed[functions]):
            reported.add(functions)
            violations.append(Violation(
                theorem="T1",
                functions=functions,
                message=f"branch variables {sorted(witness.branch_vars)} not covered by any labeled pair",
                counterexample=witness.to_dict(),
            ))
    return violations


def check_soundness(dset: DifferenceSet, traversal: Traversal) -> List[Violation]:
    violations = []
    grouped = traversal.by_functions()
    for difference in dset.D:
        functions = difference.functions
        if len(functions) > traversal.depth:
            continue
        names = set(difference.variables)
        if not any(witness.branch_vars & names for witness in grouped.get(functions, [])):
            violations.append(Violation(
                theorem="T2",
                functions=functions,
                message=f"no concrete pair for difference on {sorted(names)}",
                counterexample=difference.to_dict(),
            ))
    return violations


def check_branch_summaries(dset: DifferenceSet) -> List[Violation]:
    violations = []
    for examined in dset.examined:
        covered = set(examined.difference.variables) if examined.difference is not None else set()
        missing = pair_branch_vars(examined) - covered
        if missing:
            violations.append(Violation(
                theorem="T3",
                functions=tuple(function for function, _ in examined.pair.privileged.trail),
                message=f"branch variables {sorted(missing)} missing from the difference",
                counterexample=examined.pair.privileged.to_dict(),
            ))
    return violations
