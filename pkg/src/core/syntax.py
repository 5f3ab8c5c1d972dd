"""
Модуль синтаксического дерева MiniSol.

MiniSol - строгое подмножество Solidity: переменные состояния четырёх
видов, конструктор без параметров, модификаторы и публичные функции
без циклов и внешних вызовов.
"""

from enum import Enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple, Union


CONSTRUCTOR = "constructor"
BUILTINS = ("msg.sender", "msg.value", "block.number")
ZERO_ADDRESS = "0x0"


# ======= Типы =======
class TypeKind(Enum):
    """Вид типа переменной MiniSol."""
    NUMERIC = "uint256"
    ADDRESS = "address"
    BOOLEAN = "bool"
    MAPPING = "mapping"


@dataclass(frozen=True)
class MiniSolType:
    """
    Тип переменной.

    Атрибуты:
        kind: Вид типа
        value: Тип значения для отображения (ключ всегда address)
    """
    kind: TypeKind
    value: Optional[TypeKind] = None

    @property
    def is_mapping(self) -> bool:
        return self.kind is TypeKind.MAPPING

    @property
    def scalar(self) -> TypeKind:
        """Тип хранимых значений: для отображения - тип значения."""
        return self.value if self.is_mapping else self.kind

    def __str__(self) -> str:
        if self.is_mapping:
            return f"mapping(address => {self.value.value})"
        return self.kind.value


NUMERIC = MiniSolType(TypeKind.NUMERIC)
ADDRESS = MiniSolType(TypeKind.ADDRESS)
BOOLEAN = MiniSolType(TypeKind.BOOLEAN)


@dataclass(frozen=True)
class StatementId:
    """
    Идентификатор оператора.

    Атрибуты:
        function: Имя владельца (функция, модификатор или constructor)
        index: Порядковый номер оператора в обходе тела в прямом порядке
    """
    function: str
    index: int

    def __str__(self) -> str:
        return f"{self.function}#{self.index}"


# ======= Выражения =======
@dataclass(frozen=True)
class Literal:
    value: Union[int, bool, str]
    kind: TypeKind
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Identifier:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Builtin:
    """msg.sender, msg.value или block.number."""
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Index:
    """Чтение элемента отображения ``base[key]``."""
    base: str
    key: "Expression"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expression"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Expression = Union[Literal, Identifier, Builtin, Index, Unary, Binary]


# ======= Операторы =======
@dataclass(frozen=True)
class VarDecl:
    index: int
    ty: MiniSolType
    name: str
    value: Optional[Expression] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assign:
    """Присваивание ``=``, ``+=`` или ``-=``."""
    index: int
    target: Union[Identifier, Index]
    op: str
    value: Expression
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Require:
    index: int
    condition: Expression
    message: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    index: int
    condition: Expression
    then_body: Tuple["Statement", ...]
    else_body: Tuple["Statement", ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Revert:
    index: int
    message: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SelfDestruct:
    index: int
    beneficiary: Expression
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Return:
    index: int
    value: Optional[Expression] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    """Внутренний вызов другой функции контракта ``g(args);``."""
    index: int
    name: str
    args: Tuple[Expression, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EtherTransfer:
    """``payable(recipient).transfer(amount);``"""
    index: int
    recipient: Expression
    amount: Expression
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Placeholder:
    """``_;`` внутри модификатора."""
    index: int
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Statement = Union[
    VarDecl, Assign, Require, If, Revert, SelfDestruct, Return, Call, EtherTransfer, Placeholder
]


# ======= Объявления =======
@dataclass(frozen=True)
class Param:
    name: str
    ty: MiniSolType


@dataclass(frozen=True)
class StateVarDecl:
    name: str
    ty: MiniSolType
    initializer: Optional[Expression] = None
    visibility: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModifierDecl:
    name: str
    body: Tuple[Statement, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: Tuple[Param, ...]
    modifiers: Tuple[str, ...]
    body: Tuple[Statement, ...]
    is_view: bool = False
    is_payable: bool = False
    visibility: str = "public"
    returns: Tuple[MiniSolType, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def param(self, name: str) -> Optional[Param]:
        for param in self.params:
            if param.name == name:
                return param
        return None


@dataclass(frozen=True)
class ContractAST:
    """
    Разобранный контракт MiniSol.

    Атрибуты:
        name: Имя контракта
        state_vars: Переменные состояния в порядке объявления
        functions: Функции в порядке объявления
        modifiers: Модификаторы
        constructor: Конструктор (опционально)
    """
    name: str
    state_vars: Tuple[StateVarDecl, ...] = ()
    functions: Tuple[FunctionDecl, ...] = ()
    modifiers: Tuple[ModifierDecl, ...] = ()
    constructor: Optional[FunctionDecl] = None

    def state_var(self, name: str) -> Optional[StateVarDecl]:
        for var in self.state_vars:
            if var.name == name:
                return var
        return None

    def function(self, name: str) -> Optional[FunctionDecl]:
        if name == CONSTRUCTOR:
            return self.constructor
        for function in self.functions:
            if function.name == name:
                return function
        return None

    def modifier(self, name: str) -> Optional[ModifierDecl]:
        for modifier in self.modifiers:
            if modifier.name == name:
                return modifier
        return None

    @property
    def state_var_names(self) -> Tuple[str, ...]:
        return tuple(var.name for var in self.state_vars)

    @property
    def entry_points(self) -> Tuple[FunctionDecl, ...]:
        """Функции, доступные внешним вызывающим (public/external)."""
        return tuple(f for f in self.functions if f.visibility in ("public", "external"))


def iter_statements(body: Tuple[Statement, ...]) -> Iterator[Statement]:
    """Обходит операторы тела в прямом порядке, включая вложенные ветви."""
    for statement in body:
        yield statement
        if isinstance(statement, If):
            yield from iter_statements(statement.then_body)
            yield from iter_statements(statement.else_body)


def iter_expressions(expression: Optional[Expression]) -> Iterator[Expression]:
    """Обходит подвыражения в прямом порядке."""
    if expression is None:
        return
    yield expression
    if isinstance(expression, Index):
        yield from iter_expressions(expression.key)
    elif isinstance(expression, Unary):
        yield from iter_expressions(expression.operand)
    elif isinstance(expression, Binary):
        yield from iter_expressions(expression.left)
        yield from iter_expressions(expression.right)


def statement_expressions(statement: Statement) -> Tuple[Expression, ...]:
    """Выражения, непосредственно вычисляемые оператором."""
    if isinstance(statement, VarDecl):
        return (statement.value,) if statement.value is not None else ()
    if isinstance(statement, Assign):
        if isinstance(statement.target, Index):
            return (statement.target.key, statement.value)
        return (statement.value,)
    if isinstance(statement, (Require, If)):
        return (statement.condition,)
    if isinstance(statement, SelfDestruct):
        return (statement.beneficiary,)
    if isinstance(statement, Return):
        return (statement.value,) if statement.value is not None else ()
    if isinstance(statement, Call):
        return statement.args
    if isinstance(statement, EtherTransfer):
        return (statement.recipient, statement.amount)
    return ()
