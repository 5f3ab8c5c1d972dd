"""
Модуль распознавания финансовых переменных.

Детерминированный оценщик поверх графа свойств переменных: каждое
правило смотрит на форму графа вокруг переменной состояния и добавляет
свой вес. Переменная финансовая, если сумма весов не меньше порога.
Отдельно ищутся управляющие переменные: они не финансовые, но их
условия стоят перед операторами перевода.
"""

import difflib
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, TypedDict

from src.config import settings
from .facts import ETHER, EXEC_STATE, terminates
from .property_graph import (
    EdgeKind,
    NodeKind,
    VariablePropertyGraph,
    local_node,
    state_node,
)
from .summaries import Difference, ExecStateSummary
from .syntax import (
    Binary,
    Call,
    ContractAST,
    Expression,
    Identifier,
    If,
    Index,
    Literal,
    Require,
    TypeKind,
    Unary,
    iter_statements,
)


# Настройка логирования
logger = logging.getLogger(__name__)

DEFAULT_LEXICON = Path(__file__).with_name("lexicon.txt")


class Rule(Enum):
    TRANSFER_SHAPE = "transfer_shape"
    VALUE_FLOW = "value_flow"
    SUPPLY_SHAPE = "supply_shape"
    FEE_SHAPE = "fee_shape"
    NAME_SIMILARITY = "name_similarity"
    GUARDS_TRANSFER = "guards_transfer"
    USER_SPECIFIED = "user_specified"


class RecognitionMode(Enum):
    RULES = "rules"
    NAMES = "names"


# ======= TypedDicts =======
class FinancialVerdictTypeDict(TypedDict):
    variable: str
    is_financial: bool
    score: float
    evidence: List[str]


# ======= DataClasses =======
@dataclass(frozen=True)
class FinancialVerdict:
    """
    Решение о переменной состояния.

    Атрибуты:
        variable: Имя переменной
        is_financial: Переменная финансовая
        score: Сумма весов сработавших правил (не больше 1)
        evidence: Сработавшие правила
    """
    variable: str
    is_financial: bool
    score: float
    evidence: Tuple[str, ...] = ()

    def has(self, rule: Rule) -> bool:
        return rule.value in self.evidence

    def to_dict(self) -> FinancialVerdictTypeDict:
        return {
            "variable": self.variable,
            "is_financial": self.is_financial,
            "score": round(self.score, 4),
            "evidence": list(self.evidence),
        }


@dataclass(frozen=True)
class Verdicts:
    """
    Решения по всем переменным состояния с производными множествами.

    Атрибуты:
        items: Решения в порядке объявления переменных
        transfer_functions: Публичные функции с операторами перевода
    """
    items: Tuple[FinancialVerdict, ...]
    transfer_functions: FrozenSet[str] = field(default_factory=frozenset)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def get(self, variable: str) -> Optional[FinancialVerdict]:
        for verdict in self.items:
            if verdict.variable == variable:
                return verdict
        return None

    @property
    def financial(self) -> FrozenSet[str]:
        return frozenset(v.variable for v in self.items if v.is_financial)

    def with_rule(self, rule: Rule) -> FrozenSet[str]:
        return frozenset(v.variable for v in self.items if v.has(rule))


# ======= Lexicon =======
def normalize_name(name: str) -> str:
    return name.lower().replace("_", "")


def load_lexicon(path: Optional[str] = None) -> Tuple[str, ...]:
    """
    Читает словарь финансовых имён.

    Args:
        path: Путь к файлу (по умолчанию из настроек или встроенный)

    Returns:
        Нормализованные имена без повторов
    """
    source = Path(path or settings.lexicon_path or DEFAULT_LEXICON)
    words: List[str] = []
    for line in source.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            word = normalize_name(line)
            if word not in words:
                words.append(word)
    return tuple(words)


def name_matches(name: str, lexicon: Sequence[str], cutoff: Optional[float] = None) -> bool:
    cutoff = cutoff if cutoff is not None else settings.name_similarity_cutoff
    return bool(difflib.get_close_matches(normalize_name(name), lexicon, n=1, cutoff=cutoff))


# ======= Guard polarity =======
def guard_polarity(ast: ContractAST, variable: str) -> Optional[str]:
    """
    Полярность условий, читающих отображение или флаг.

    ``negative`` - условие пропускает при ложном значении (``!frozen[a]``,
    ``paused == false``, ``if (frozen[a]) revert();``); иначе ``positive``.

    Returns:
        ``negative``, ``positive`` или None, если условий нет
    """
    polarities: Set[str] = set()
    bodies = [f.body for f in ast.functions] + [m.body for m in ast.modifiers]
    for body in bodies:
        for statement in iter_statements(body):
            if not isinstance(statement, (Require, If)):
                continue
            flip = isinstance(statement, If) and terminates(statement.then_body)
            for polarity in occurrence_polarities(statement.condition, variable, negated=False):
                if flip:
                    polarity = "positive" if polarity == "negative" else "negative"
                polarities.add(polarity)
    if not polarities:
        return None
    return "negative" if "negative" in polarities else "positive"


def occurrence_polarities(expression: Expression, variable: str, negated: bool) -> List[str]:
    def reads(node: Expression) -> bool:
        if isinstance(node, Index):
            return node.base == variable
        return isinstance(node, Identifier) and node.name == variable

    if reads(expression):
        return ["negative" if negated else "positive"]
    if isinstance(expression, Unary) and expression.op == "!":
        return occurrence_polarities(expression.operand, variable, not negated)
    if isinstance(expression, Binary) and expression.op in ("==", "!="):
        for side, other in ((expression.left, expression.right), (expression.right, expression.left)):
            if reads(side) and isinstance(other, Literal) and other.kind is TypeKind.BOOLEAN:
                falsy = (other.value is False) == (expression.op == "==")
                return ["negative" if falsy != negated else "positive"]
    if isinstance(expression, Binary):
        return occurrence_polarities(expression.left, variable, negated) + occurrence_polarities(
            expression.right, variable, negated
        )
    return []


# ======= MainClass =======
class FinancialScorer:
    """
    Оценщик финансовых переменных по правилам над графом.

    Args:
        graph: Граф свойств переменных
        ast: Дерево контракта
        weights: Веса правил (по умолчанию из настроек)
        threshold: Порог решения
        lexicon: Словарь имён для правила сходства
    """

    def __init__(
        self,
        graph: VariablePropertyGraph,
        ast: ContractAST,
        weights: Optional[Dict[str, float]] = None,
        threshold: Optional[float] = None,
        lexicon: Optional[Sequence[str]] = None,
    ) -> None:
        self.graph = graph
        self.ast = ast
        self.weights = weights if weights is not None else dict(settings.rule_weights)
        self.threshold = threshold if threshold is not None else settings.financial_threshold
        self.lexicon = tuple(lexicon) if lexicon is not None else load_lexicon()

    # ------- Операторы графа -------
    def statements(self) -> List[Tuple[str, dict]]:
        return sorted(
            (node, data) for node, data in self.graph.nodes(data=True) if data["kind"] == NodeKind.STATEMENT.value
        )

    def updates_of(self, variable: str) -> List[Tuple[str, dict]]:
        """Операторы ``+``/``-`` изменения переменной."""
        return [(node, data) for node, data in self.statements() if data["target"] == variable and data["delta"]]

    def dde_sources(self, variable: str) -> Set[str]:
        node = state_node(variable)
        if not self.graph.has_node(node):
            return set()
        return {
            source for source, _, kind in self.graph.in_edges(node, keys=True) if kind == EdgeKind.DDE.value
        }

    def kind(self, variable: str) -> Tuple[bool, TypeKind]:
        ty = self.ast.state_var(variable).ty
        return ty.is_mapping, ty.scalar

    @property
    def numeric_mappings(self) -> List[str]:
        return [v.name for v in self.ast.state_vars if v.ty.is_mapping and v.ty.scalar is TypeKind.NUMERIC]

    # ------- Правила -------
    def transfer_shaped(self, variable: str) -> bool:
        is_mapping, scalar = self.kind(variable)
        if not is_mapping or scalar is not TypeKind.NUMERIC:
            return False
        deltas: Dict[str, Set[str]] = {}
        for _, data in self.updates_of(variable):
            deltas.setdefault(data["owner"], set()).add(data["delta"])
        return any(found >= {"+", "-"} for found in deltas.values())

    def value_flow(self, variable: str) -> bool:
        if local_node("msg.value") in self.dde_sources(variable):
            return True
        return any(
            data["guard"] and variable in data["reads"] and "msg.value" in data["reads"]
            for _, data in self.statements()
        )

    def supply_shaped(self, variable: str) -> bool:
        is_mapping, scalar = self.kind(variable)
        if is_mapping or scalar is not TypeKind.NUMERIC or not self.updates_of(variable):
            return False
        own = {s for s in self.dde_sources(variable) if not self.graph.nodes[s].get("builtin")}
        own &= {s for s in own if self.graph.nodes[s]["kind"] == NodeKind.LOCAL.value}
        for mapping in self.numeric_mappings:
            if self.updates_of(mapping) and own & self.dde_sources(mapping):
                return True
        return False

    def fee_shaped(self, variable: str, transfer_mappings: Iterable[str]) -> bool:
        is_mapping, scalar = self.kind(variable)
        if is_mapping or scalar is not TypeKind.NUMERIC:
            return False
        reached = {variable} | self.locals_reached(variable)
        for mapping in transfer_mappings:
            for _, data in self.updates_of(mapping):
                if reached & set(data["reads"]):
                    return True
        return False

    def locals_reached(self, variable: str) -> Set[str]:
        """Локальные переменные, зависящие от переменной по цепочке DDE."""
        names: Set[str] = set()
        pending = [state_node(variable)]
        while pending:
            node = pending.pop()
            for _, target, kind in self.graph.out_edges(node, keys=True):
                if kind != EdgeKind.DDE.value or self.graph.nodes[target]["kind"] != NodeKind.LOCAL.value:
                    continue
                name = self.graph.nodes[target]["name"]
                if name not in names:
                    names.add(name)
                    pending.append(target)
        return names

    def guards_transfer(self, variable: str, transfer_statements: Set[str]) -> bool:
        _, scalar = self.kind(variable)
        if scalar is TypeKind.ADDRESS:
            return False
        node = state_node(variable)
        return any(
            kind == EdgeKind.CDE.value and target in transfer_statements
            for _, target, kind in self.graph.out_edges(node, keys=True)
        )

    # ------- Сборка -------
    def transfer_statements(self, transfer_mappings: Iterable[str]) -> Set[str]:
        nodes = {node for mapping in transfer_mappings for node, _ in self.updates_of(mapping)}
        nodes |= {node for node, data in self.statements() if data["ether"]}
        return nodes

    def transfer_functions(self, transfer_statements: Set[str]) -> FrozenSet[str]:
        """Публичные функции, исполняющие оператор перевода (с модификаторами и вызовами)."""
        owners = {self.graph.nodes[node]["owner"] for node in transfer_statements}
        result: Set[str] = set()
        for function in self.ast.entry_points:
            reachable = {function.name} | set(function.modifiers)
            pending = [function.name]
            while pending:
                current = self.ast.function(pending.pop())
                if current is None:
                    continue
                for statement in iter_statements(current.body):
                    if isinstance(statement, Call) and statement.name not in reachable:
                        reachable.add(statement.name)
                        reachable |= set(self.ast.function(statement.name).modifiers)
                        pending.append(statement.name)
            if reachable & owners:
                result.add(function.name)
        return frozenset(result)

    def score(self, evidence: Sequence[str]) -> float:
        return min(1.0, sum(self.weights.get(rule, 0.0) for rule in evidence))

    def classify(
        self, mode: RecognitionMode = RecognitionMode.RULES, overrides: Optional[Iterable[str]] = None
    ) -> Verdicts:
        transfer_mappings = [v for v in self.numeric_mappings if self.transfer_shaped(v)]
        statements = self.transfer_statements(transfer_mappings)
        forced = set(overrides) if overrides is not None else None

        items: List[FinancialVerdict] = []
        for var in self.ast.state_vars:
            name = var.name
            evidence: List[str] = []
            numeric = var.ty.scalar is TypeKind.NUMERIC
            if mode is RecognitionMode.RULES and numeric:
                if name in transfer_mappings:
                    evidence.append(Rule.TRANSFER_SHAPE.value)
                if self.value_flow(name):
                    evidence.append(Rule.VALUE_FLOW.value)
                if self.supply_shaped(name):
                    evidence.append(Rule.SUPPLY_SHAPE.value)
                if self.fee_shaped(name, transfer_mappings):
                    evidence.append(Rule.FEE_SHAPE.value)
            if numeric and name_matches(name, self.lexicon):
                evidence.append(Rule.NAME_SIMILARITY.value)
            if mode is RecognitionMode.RULES and self.guards_transfer(name, statements):
                evidence.append(Rule.GUARDS_TRANSFER.value)

            score = self.score(evidence)
            is_financial = score >= self.threshold
            if forced is not None:
                is_financial = name in forced
                evidence = [Rule.GUARDS_TRANSFER.value] if Rule.GUARDS_TRANSFER.value in evidence else []
                if is_financial:
                    evidence.insert(0, Rule.USER_SPECIFIED.value)
                score = 1.0 if is_financial else 0.0
            items.append(FinancialVerdict(name, is_financial, score, tuple(evidence)))

        return Verdicts(tuple(items), self.transfer_functions(statements))


# ======= PublicFunctions =======
def classify_financial(
    graph: VariablePropertyGraph,
    ast: ContractAST,
    mode: RecognitionMode = RecognitionMode.RULES,
    overrides: Optional[Iterable[str]] = None,
    **options,
) -> Verdicts:
    """
    Решает, какие переменные состояния финансовые.

    Args:
        graph: Граф свойств переменных
        ast: Дерево контракта
        mode: ``rules`` (все правила) или ``names`` (только сходство имён)
        overrides: Явный список финансовых переменных пользователя

    Returns:
        Решение для каждой переменной состояния
    """
    verdicts = FinancialScorer(graph, ast, **options).classify(mode, overrides)
    logger.debug(f"Финансовые переменные {ast.name}: {sorted(verdicts.financial)}")
    return verdicts


def controls_transfer(difference: Difference, verdicts: Verdicts) -> FrozenSet[str]:
    """Переменные разности, условия которых стоят перед операторами перевода."""
    return frozenset(difference.variables) & verdicts.with_rule(Rule.GUARDS_TRANSFER)


def risk_filter(dset: Iterable[Difference], verdicts: Verdicts) -> List[Difference]:
    """
    Оставляет разности, затрагивающие финансовые переменные.

    Разность остаётся, если она касается финансовой переменной, эфира,
    переменной, управляющей переводом, или итога исполнения функции
    перевода (а также самоуничтожения контракта).

    Args:
        dset: Разности в порядке обнаружения
        verdicts: Решения распознавания

    Returns:
        Отобранные разности в исходном порядке
    """
    kept: List[Difference] = []
    for difference in dset:
        names = set(difference.variables)
        entry = difference.entry(EXEC_STATE)
        destroyed = entry is not None and isinstance(entry.privileged, ExecStateSummary) and entry.privileged.selfdestruct
        if (
            names & verdicts.financial
            or ETHER in names
            or controls_transfer(difference, verdicts)
            or destroyed
            or (EXEC_STATE in names and difference.last_function in verdicts.transfer_functions)
        ):
            kept.append(difference)
    logger.debug(f"Отобрано разностей: {len(kept)}")
    return kept
