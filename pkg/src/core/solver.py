"""
Модуль проверки условий пути.

Разрешимый фрагмент: равенства и неравенства адресов и булевых значений
(система непересекающихся множеств с рёбрами неравенства) и разностные
ограничения ``x - y <= c`` над неотрицательными целыми (поиск отрицательного
цикла Беллмана-Форда). Ограничения вне фрагмента при проверке выполнимости
игнорируются, то есть решатель может только переоценить выполнимость.
"""

import logging
from math import gcd
from functools import lru_cache, reduce
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

import networkx as nx
from networkx.utils import UnionFind

from .values import (
    Bool,
    Ite,
    Num,
    Symbol,
    SymValue,
    add,
    is_constant,
    is_numeric,
    linear,
    scale,
    sub,
)


# Настройка логирования
logger = logging.getLogger(__name__)

ZERO_NODE = "$zero"


# ======= Constraints =======
@dataclass(frozen=True)
class LinearLe:
    """``expr <= 0`` над неотрицательными целыми атомами."""
    expr: SymValue

    def __str__(self) -> str:
        return f"{self.expr} <= 0"


@dataclass(frozen=True)
class Equal:
    left: SymValue
    right: SymValue

    def __str__(self) -> str:
        return f"{self.left} == {self.right}"


@dataclass(frozen=True)
class NotEqual:
    left: SymValue
    right: SymValue

    def __str__(self) -> str:
        return f"{self.left} != {self.right}"


Constraint = Union[LinearLe, Equal, NotEqual]


@dataclass(frozen=True)
class CAnd:
    parts: Tuple["Cond", ...]


@dataclass(frozen=True)
class COr:
    parts: Tuple["Cond", ...]


@dataclass(frozen=True)
class CNot:
    part: "Cond"


Cond = Union[bool, LinearLe, Equal, NotEqual, CAnd, COr, CNot]


# ======= Construction helpers =======
def le(left: SymValue, right: SymValue) -> LinearLe:
    """``left <= right``"""
    return LinearLe(sub(left, right))


def lt(left: SymValue, right: SymValue) -> LinearLe:
    """``left < right`` (над целыми)"""
    return LinearLe(add(sub(left, right), Num(1)))


def numeric_equal(left: SymValue, right: SymValue) -> Cond:
    return CAnd((le(left, right), le(right, left)))


def truth(value: SymValue) -> Cond:
    """Условие «булево значение истинно»."""
    if isinstance(value, Bool):
        return value.value
    if isinstance(value, Symbol):
        return Equal(value, Bool(True))
    if isinstance(value, Ite):
        if value.then == Bool(False) and value.otherwise == Bool(True):
            return Equal(value.cond, Bool(False))
        if value.then == Bool(True) and value.otherwise == Bool(False):
            return Equal(value.cond, Bool(True))
    raise TypeError(f"not a boolean value: {value!r}")


def negate(constraint: Constraint) -> Constraint:
    if isinstance(constraint, LinearLe):
        return LinearLe(add(scale(constraint.expr, -1), Num(1)))
    if isinstance(constraint, Equal):
        return NotEqual(constraint.left, constraint.right)
    return Equal(constraint.left, constraint.right)


def cond_not(cond: Cond) -> Cond:
    """Отрицание условия с протаскиванием до атомов."""
    if isinstance(cond, bool):
        return not cond
    if isinstance(cond, (LinearLe, Equal, NotEqual)):
        return negate(cond)
    if isinstance(cond, CNot):
        return cond.part
    if isinstance(cond, CAnd):
        return COr(tuple(cond_not(part) for part in cond.parts))
    return CAnd(tuple(cond_not(part) for part in cond.parts))


def simplify(constraint: Constraint) -> Union[bool, Constraint]:
    """Сворачивает ограничение, истинность которого видна структурно."""
    if isinstance(constraint, LinearLe):
        terms, const = linear(constraint.expr)
        coefs = [coef for _, coef in terms.values()]
        if not coefs:
            return const <= 0
        if all(coef >= 0 for coef in coefs) and const > 0:
            return False
        if all(coef <= 0 for coef in coefs) and const <= 0:
            return True
        return constraint

    if constraint.left == constraint.right:
        return isinstance(constraint, Equal)
    if is_constant(constraint.left) and is_constant(constraint.right):
        return isinstance(constraint, NotEqual)
    if isinstance(constraint, NotEqual):
        # у булевых ровно два значения
        if isinstance(constraint.right, Bool):
            return Equal(constraint.left, Bool(not constraint.right.value))
        if isinstance(constraint.left, Bool):
            return Equal(constraint.right, Bool(not constraint.left.value))
    return constraint


def cases(cond: Cond) -> List[Tuple[Tuple[Constraint, ...], bool]]:
    """
    Раскладывает условие на взаимоисключающие случаи с сокращённым вычислением.

    Returns:
        Список пар (добавляемые ограничения, значение условия)
    """
    if isinstance(cond, bool):
        return [((), cond)]
    if isinstance(cond, (LinearLe, Equal, NotEqual)):
        folded = simplify(cond)
        if isinstance(folded, bool):
            return [((), folded)]
        return [((folded,), True), ((negate(folded),), False)]
    if isinstance(cond, CNot):
        return [(added, not value) for added, value in cases(cond.part)]

    result: List[Tuple[Tuple[Constraint, ...], bool]] = [((), isinstance(cond, CAnd))]
    for part in cond.parts:
        expanded: List[Tuple[Tuple[Constraint, ...], bool]] = []
        for added, value in result:
            decided = (not value) if isinstance(cond, CAnd) else value
            if decided:
                expanded.append((added, value))
                continue
            for more, part_value in cases(part):
                expanded.append((added + more, part_value))
        result = expanded
    return result


# ======= Fragment =======
def difference_edge(constraint: LinearLe) -> Optional[Tuple[str, str, int]]:
    """
    Переводит ``expr <= 0`` в ребро графа ограничений.

    Ребро ``u -> v`` с весом ``w`` означает ``v - u <= w``.
    """
    terms, const = linear(constraint.expr)
    items = sorted(terms.items())
    if not items:
        return None
    divisor = reduce(gcd, (abs(coef) for _, (_, coef) in items))
    bound = (-const) // divisor

    if len(items) == 1:
        key, (_, coef) = items[0]
        if coef // divisor == 1:
            return ZERO_NODE, key, bound
        if coef // divisor == -1:
            return key, ZERO_NODE, bound
        return None

    if len(items) == 2:
        (first_key, (_, first)), (second_key, (_, second)) = items
        first, second = first // divisor, second // divisor
        if first == 1 and second == -1:
            return second_key, first_key, bound
        if first == -1 and second == 1:
            return first_key, second_key, bound
    return None


def in_fragment(constraint: Constraint) -> bool:
    """Лежит ли ограничение в разрешимом фрагменте."""
    folded = simplify(constraint)
    if isinstance(folded, bool) or not isinstance(folded, LinearLe):
        return True
    return difference_edge(folded) is not None


@lru_cache(maxsize=65536)
def _satisfiable(constraints: Tuple[Constraint, ...]) -> bool:
    equalities = UnionFind()
    disequalities: List[Tuple[SymValue, SymValue]] = []
    graph = nx.DiGraph()
    graph.add_node(ZERO_NODE)

    for constraint in constraints:
        folded = simplify(constraint)
        if folded is True:
            continue
        if folded is False:
            return False

        if isinstance(folded, Equal):
            equalities.union(folded.left, folded.right)
        elif isinstance(folded, NotEqual):
            disequalities.append((folded.left, folded.right))
        else:
            terms, _ = linear(folded.expr)
            for key in terms:
                if not graph.has_edge(key, ZERO_NODE):
                    graph.add_edge(key, ZERO_NODE, weight=0)
            edge = difference_edge(folded)
            if edge is None:
                continue
            source, target, weight = edge
            if graph.has_edge(source, target):
                weight = min(weight, graph[source][target]["weight"])
            graph.add_edge(source, target, weight=weight)

    for group in equalities.to_sets():
        constants = {value for value in group if is_constant(value)}
        if len(constants) > 1:
            return False
    for left, right in disequalities:
        if equalities[left] == equalities[right]:
            return False

    if graph.number_of_edges() and nx.negative_edge_cycle(graph, weight="weight"):
        return False
    return True


# ======= MainClass =======
class PathSolver:
    """Проверка выполнимости и следования для условий пути."""

    @staticmethod
    def satisfiable(constraints: Iterable[Constraint]) -> bool:
        return _satisfiable(tuple(constraints))

    @classmethod
    def entails(cls, constraints: Iterable[Constraint], constraint: Constraint) -> bool:
        """Следует ли ``constraint`` из ``constraints``."""
        folded = simplify(constraint)
        if isinstance(folded, bool):
            return folded
        if not in_fragment(negate(folded)):
            return False
        return not cls.satisfiable(tuple(constraints) + (negate(folded),))

    @classmethod
    def entails_nonnegative(cls, constraints: Iterable[Constraint], value: SymValue) -> bool:
        """Следует ли ``value >= 0``."""
        return cls.entails(constraints, LinearLe(scale(value, -1)))

    @classmethod
    def entails_equal(cls, constraints: Iterable[Constraint], left: SymValue, right: SymValue) -> bool:
        if left == right:
            return True
        constraints = tuple(constraints)
        if is_numeric(left) or is_numeric(right):
            difference = sub(left, right)
            return cls.entails(constraints, LinearLe(difference)) and cls.entails(
                constraints, LinearLe(scale(difference, -1))
            )
        return cls.entails(constraints, Equal(left, right))

    @classmethod
    def resolve_bool(cls, constraints: Iterable[Constraint], value: SymValue) -> Optional[bool]:
        """Значение булева выражения, если оно определено условием пути."""
        constraints = tuple(constraints)
        cond = truth(value)
        if isinstance(cond, bool):
            return cond
        if cls.entails(constraints, cond):
            return True
        if cls.entails(constraints, negate(cond)):
            return False
        return None

    @classmethod
    def feasible_cases(
        cls, constraints: Tuple[Constraint, ...], cond: Cond
    ) -> List[Tuple[Tuple[Constraint, ...], bool, bool]]:
        """
        Выполнимые случаи условия при данном условии пути.

        Returns:
            Список (новое условие пути, значение, признак приближения)
        """
        result = []
        for added, value in cases(cond):
            extended = constraints + added
            if cls.satisfiable(extended):
                approximate = any(not in_fragment(constraint) for constraint in added)
                result.append((extended, value, approximate))
        return result
