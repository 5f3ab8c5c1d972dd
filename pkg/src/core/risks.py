"""
Модуль классификации рисков централизации.

Каждая отобранная разность относится к одной категории по своей форме:
какие переменные различаются, в какую сторону и через какие условия.
Риски одной категории объединяются.
"""

import logging
from enum import Enum
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .facts import ETHER, EXEC_STATE
from .financial import Rule, Verdicts, controls_transfer, guard_polarity
from .summaries import Difference, DifferenceEntry, ExecStateSummary, MappingSummary, NumericSummary
from .syntax import ContractAST, TypeKind


# Настройка логирования
logger = logging.getLogger(__name__)


class RiskCategory(Enum):
    ARBITRARILY_TRANSFER = "ArbitrarilyTransfer"
    DESTROY_ACCOUNT = "DestroyAccount"
    ARBITRARILY_MINT = "ArbitrarilyMint"
    FREEZE_ACCOUNT = "FreezeAccount"
    DISABLE_TRANSFERRING = "DisableTransferring"
    PARAMETER_MANIPULATION = "ParameterManipulation"
    WHITELIST_ESCALATION = "WhitelistEscalation"
    GENERIC = "GenericFinancialDifference"


class Confidence(Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate-paths"


# ======= DataClasses =======
@dataclass(frozen=True)
class Risk:
    """
    Найденный риск.

    Атрибуты:
        category: Категория
        variables: Переменные разностей категории
        provenance: Цепочки (функция, роль) привилегированных преемников
        confidence: Точность путей, давших разности
        differences: Число объединённых разностей
    """
    category: RiskCategory
    variables: Tuple[str, ...]
    provenance: Tuple[Tuple[Tuple[str, str], ...], ...]
    confidence: Confidence = Confidence.EXACT
    differences: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "category": self.category.value,
            "variables": list(self.variables),
            "provenance": [
                [{"function": function, "role": role} for function, role in trail] for trail in self.provenance
            ],
            "confidence": self.confidence.value,
            "differences": self.differences,
        }


# ======= Формы разностей =======
def privileged_only(entry: DifferenceEntry, token: Optional[str] = None) -> Tuple[Any, Any]:
    """Сводки обеих ролей для скаляра или ключа отображения."""
    if token is None:
        return entry.privileged, entry.ordinary
    ordinary = entry.ordinary.get(token) if isinstance(entry.ordinary, MappingSummary) else None
    return entry.privileged.get(token), ordinary


def decreases_other_account(entry: DifferenceEntry) -> Optional[bool]:
    """
    Привилегированное уменьшение чужого ключа.

    Returns:
        None, если уменьшения нет; иначе есть ли в том же исполнении увеличение
    """
    if not isinstance(entry.privileged, MappingSummary):
        return None
    decreased = False
    for token, summary in entry.privileged.entries:
        _, ordinary = privileged_only(entry, token)
        if (
            token != "msg.sender"
            and isinstance(summary, NumericSummary)
            and summary.is_decreased
            and summary != ordinary
        ):
            decreased = True
    if not decreased:
        return None
    return any(isinstance(s, NumericSummary) and s.is_increased for _, s in entry.privileged.entries)


def increases(entry: DifferenceEntry) -> bool:
    if isinstance(entry.privileged, NumericSummary):
        ordinary = entry.ordinary if isinstance(entry.ordinary, NumericSummary) else NumericSummary()
        return entry.privileged.is_increased and not ordinary.is_increased
    if isinstance(entry.privileged, MappingSummary):
        summaries = [s for _, s in entry.privileged.entries if isinstance(s, NumericSummary)]
        # перевод между ключами (уменьшение хотя бы одного) выпуском не считается
        if any(s.is_decreased for s in summaries):
            return False
        for token, summary in entry.privileged.entries:
            _, ordinary = privileged_only(entry, token)
            if isinstance(summary, NumericSummary) and summary.is_increased and summary != ordinary:
                return True
    return False


def control_category(variable: str, verdicts: Verdicts, ast: ContractAST) -> Optional[RiskCategory]:
    verdict = verdicts.get(variable)
    declared = ast.state_var(variable)
    if verdict is None or declared is None:
        return None
    if verdict.has(Rule.FEE_SHAPE):
        return RiskCategory.PARAMETER_MANIPULATION
    if declared.ty.is_mapping and declared.ty.scalar is TypeKind.BOOLEAN:
        if guard_polarity(ast, variable) == "negative":
            return RiskCategory.FREEZE_ACCOUNT
        return RiskCategory.WHITELIST_ESCALATION
    if not declared.ty.is_mapping and declared.ty.kind in (TypeKind.BOOLEAN, TypeKind.NUMERIC):
        return RiskCategory.DISABLE_TRANSFERRING
    return None


def categorize(difference: Difference, verdicts: Verdicts, ast: ContractAST) -> RiskCategory:
    """
    Категория одной разности.

    Returns:
        Категория; разность без узнаваемой формы (в том числе только из
        меток) относится к GenericFinancialDifference
    """
    outcome = difference.entry(EXEC_STATE)
    if outcome is not None and isinstance(outcome.privileged, ExecStateSummary):
        if outcome.privileged.selfdestruct and not outcome.ordinary.selfdestruct:
            return RiskCategory.DESTROY_ACCOUNT

    differing = [entry for entry in difference.entries if entry.privileged != entry.ordinary]
    financial = verdicts.financial

    for entry in differing:
        if entry.variable == ETHER or entry.variable in financial:
            moved = decreases_other_account(entry)
            if moved is not None:
                return RiskCategory.ARBITRARILY_TRANSFER if moved else RiskCategory.DESTROY_ACCOUNT

    for entry in differing:
        if entry.variable in financial and increases(entry):
            return RiskCategory.ARBITRARILY_MINT

    fees = verdicts.with_rule(Rule.FEE_SHAPE)
    for entry in differing:
        if entry.variable in fees:
            return RiskCategory.PARAMETER_MANIPULATION

    controls = set(difference.controls) | set(controls_transfer(difference, verdicts))
    for variable in sorted(controls - {ETHER, EXEC_STATE}):
        category = control_category(variable, verdicts, ast)
        if category is not None:
            return category

    return RiskCategory.GENERIC


# ======= PublicFunctions =======
def classify_risks(filtered: Iterable[Difference], verdicts: Verdicts, ast: ContractAST) -> List[Risk]:
    """
    Относит отобранные разности к категориям рисков.

    Args:
        filtered: Разности после фильтра финансовых переменных
        verdicts: Решения распознавания
        ast: Дерево контракта

    Returns:
        Риски по категориям в порядке первого появления
    """
    grouped: Dict[RiskCategory, List[Difference]] = {}
    for difference in filtered:
        category = categorize(difference, verdicts, ast)
        grouped.setdefault(category, []).append(difference)

    risks = [merge(category, differences) for category, differences in grouped.items()]
    specific = [risk for risk in risks if risk.category is not RiskCategory.GENERIC]
    result = []
    for risk in risks:
        covered = any(set(risk.variables) <= set(other.variables) for other in specific)
        if risk.category is RiskCategory.GENERIC and covered:
            continue
        result.append(risk)
    logger.info(f"Риски {ast.name}: {[risk.category.value for risk in result]}")
    return result


def merge(category: RiskCategory, differences: List[Difference]) -> Risk:
    variables = sorted({var for difference in differences for var in difference.variables})
    trails: List[Tuple[Tuple[str, str], ...]] = []
    for difference in differences:
        if difference.trail not in trails:
            trails.append(difference.trail)
    approximate = any(difference.approximate for difference in differences)
    return Risk(
        category=category,
        variables=tuple(variables),
        provenance=tuple(trails),
        confidence=Confidence.APPROXIMATE if approximate else Confidence.EXACT,
        differences=len(differences),
    )
