"""
Модуль символьных значений.

Значения неизменяемы и нормализованы: линейные суммы хранят отсортированные
атомы без нулевых коэффициентов, константы свёрнуты. Произведения и частные
двух символьных величин становятся непрозрачными атомами.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from .syntax import TypeKind


# ======= DataClasses =======
@dataclass(frozen=True)
class Num:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Addr:
    value: str

    def __str__(self) -> str:
        return "address(0)" if self.value == "0x0" else self.value


@dataclass(frozen=True)
class Bool:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Symbol:
    """
    Символ.

    Атрибуты:
        name: Уникальное имя в пределах анализа
        kind: Тип значения
        token: Конечная метка для сводок (имя параметра, переменной и т.п.)
    """
    name: str
    kind: TypeKind
    token: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Opaque:
    """Нелинейный атом ``left op right``; тождество определяется операндами."""
    op: str
    left: "SymValue"
    right: "SymValue"

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


Atom = Union[Symbol, Opaque]


@dataclass(frozen=True)
class Sum:
    """Линейная сумма ``const + Σ coef·atom``."""
    terms: Tuple[Tuple[Atom, int], ...]
    const: int = 0

    def __str__(self) -> str:
        parts = []
        for atom, coef in self.terms:
            if coef == 1:
                parts.append(f"+ {atom}")
            elif coef == -1:
                parts.append(f"- {atom}")
            elif coef > 0:
                parts.append(f"+ {coef}*{atom}")
            else:
                parts.append(f"- {-coef}*{atom}")
        if self.const:
            parts.append(f"+ {self.const}" if self.const > 0 else f"- {-self.const}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


@dataclass(frozen=True)
class Ite:
    """Условное значение; используется для отрицания булевых символов."""
    cond: Symbol
    then: "SymValue"
    otherwise: "SymValue"

    def __str__(self) -> str:
        if self.then == Bool(False) and self.otherwise == Bool(True):
            return f"!{self.cond}"
        return f"({self.cond} ? {self.then} : {self.otherwise})"


SymValue = Union[Num, Addr, Bool, Symbol, Opaque, Sum, Ite]


# ======= Linear arithmetic =======
def atom_key(atom: Atom) -> str:
    """Ключ сортировки атома."""
    if isinstance(atom, Symbol):
        return atom.name
    return f"({value_key(atom.left)}{atom.op}{value_key(atom.right)})"


def value_key(value: SymValue) -> str:
    """Канонический строковый ключ значения."""
    if isinstance(value, (Symbol, Opaque)):
        return atom_key(value)
    if isinstance(value, Sum):
        inner = ",".join(f"{coef}*{atom_key(atom)}" for atom, coef in value.terms)
        return f"sum[{inner};{value.const}]"
    if isinstance(value, Ite):
        return f"ite[{value.cond.name};{value_key(value.then)};{value_key(value.otherwise)}]"
    return f"{type(value).__name__.lower()}:{value.value}"


def linear(value: SymValue) -> Tuple[Dict[str, Tuple[Atom, int]], int]:
    """Раскладывает числовое значение на атомы с коэффициентами и константу."""
    if isinstance(value, Num):
        return {}, value.value
    if isinstance(value, (Symbol, Opaque)):
        return {atom_key(value): (value, 1)}, 0
    if isinstance(value, Sum):
        return {atom_key(atom): (atom, coef) for atom, coef in value.terms}, value.const
    raise TypeError(f"not a numeric value: {value!r}")


def make_sum(terms: Dict[str, Tuple[Atom, int]], const: int) -> SymValue:
    """Собирает нормализованное значение из атомов и константы."""
    items = tuple(
        (atom, coef) for key, (atom, coef) in sorted(terms.items()) if coef != 0
    )
    if not items:
        return Num(const)
    if len(items) == 1 and items[0][1] == 1 and const == 0:
        return items[0][0]
    return Sum(items, const)


def combine(left: SymValue, right: SymValue, sign: int = 1) -> SymValue:
    """Возвращает ``left + sign·right``."""
    terms, const = linear(left)
    terms = dict(terms)
    other, other_const = linear(right)
    for key, (atom, coef) in other.items():
        current = terms.get(key, (atom, 0))[1]
        terms[key] = (atom, current + sign * coef)
    return make_sum(terms, const + sign * other_const)


def add(left: SymValue, right: SymValue) -> SymValue:
    return combine(left, right, 1)


def sub(left: SymValue, right: SymValue) -> SymValue:
    return combine(left, right, -1)


def scale(value: SymValue, factor: int) -> SymValue:
    terms, const = linear(value)
    return make_sum({key: (atom, coef * factor) for key, (atom, coef) in terms.items()}, const * factor)


def mul(left: SymValue, right: SymValue) -> Tuple[SymValue, bool]:
    """
    Умножение.

    Returns:
        Значение и признак нелинейности (приближения)
    """
    if isinstance(left, Num):
        return scale(right, left.value), False
    if isinstance(right, Num):
        return scale(left, right.value), False
    first, second = sorted((left, right), key=value_key)
    return Opaque("*", first, second), True


def div(left: SymValue, right: SymValue) -> Tuple[SymValue, bool]:
    """Целочисленное деление; делитель должен быть отличен от нуля."""
    if isinstance(left, Num) and isinstance(right, Num):
        return Num(left.value // right.value), False
    if right == Num(1):
        return left, False
    return Opaque("/", left, right), True


def is_numeric(value: SymValue) -> bool:
    if isinstance(value, (Num, Sum, Opaque)):
        return True
    return isinstance(value, Symbol) and value.kind is TypeKind.NUMERIC


def negate_bool(value: SymValue) -> SymValue:
    """Отрицание булева значения."""
    if isinstance(value, Bool):
        return Bool(not value.value)
    if isinstance(value, Symbol):
        return Ite(value, Bool(False), Bool(True))
    if isinstance(value, Ite) and value.then == Bool(False) and value.otherwise == Bool(True):
        return value.cond
    raise TypeError(f"not a boolean value: {value!r}")


def is_constant(value: SymValue) -> bool:
    return isinstance(value, (Num, Addr, Bool))


# ======= Mapping values =======
@dataclass(frozen=True)
class MapEntry:
    """
    Элемент отображения.

    Атрибуты:
        key: Значение ключа (адрес)
        value: Хранимое значение
        written: Запись выполнялась (иначе элемент материализован чтением)
    """
    key: SymValue
    value: SymValue
    written: bool = True


@dataclass(frozen=True)
class MapValue:
    """
    Значение отображения: упорядоченные элементы и правило значения по умолчанию.

    Атрибуты:
        name: Имя переменной (для имён символов по умолчанию)
        value_kind: Тип хранимых значений
        entries: Элементы в порядке появления
    """
    name: str
    value_kind: TypeKind
    entries: Tuple[MapEntry, ...] = ()

    def default(self, key: SymValue) -> SymValue:
        """Значение для ключа, отсутствующего среди элементов."""
        if self.value_kind is TypeKind.BOOLEAN:
            return Bool(False)
        if self.value_kind is TypeKind.ADDRESS:
            return Addr("0x0")
        return Symbol(f"{self.name}[{value_key(key)}]", TypeKind.NUMERIC, token=self.name)

    def find(self, key: SymValue) -> Optional[MapEntry]:
        for entry in self.entries:
            if entry.key == key:
                return entry
        return None

    def lookup(self, key: SymValue) -> SymValue:
        entry = self.find(key)
        return entry.value if entry is not None else self.default(key)

    def store(self, key: SymValue, value: SymValue, written: bool = True) -> "MapValue":
        entries = []
        replaced = False
        for entry in self.entries:
            if entry.key == key:
                entries.append(MapEntry(key, value, written or entry.written))
                replaced = True
            else:
                entries.append(entry)
        if not replaced:
            entries.append(MapEntry(key, value, written))
        return MapValue(self.name, self.value_kind, tuple(entries))

    def __str__(self) -> str:
        inner = ", ".join(f"{entry.key}: {entry.value}" for entry in self.entries if entry.written)
        return "{" + inner + "}"


StoredValue = Union[SymValue, MapValue]


def render(value: StoredValue) -> str:
    return str(value)
