"""
Модуль детектора рисков централизации.

Связывает этапы анализа одного контракта: разбор, факты зависимостей,
итеративный анализ разностей, граф свойств переменных, распознавание
финансовых переменных, фильтр и классификацию рисков.
"""

import time
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TypedDict, Union

from .abstractions import AnalysisResult, AnalyzerError, AnalyzerErrorCode
from .analyzer import ConvergenceLog, DifferenceSet, IterativeAnalyzer
from .engine import Tracer
from .facts import DependenceFacts, build_facts
from .financial import RecognitionMode, Verdicts, classify_financial, risk_filter
from .parser import parse, parse_file
from .property_graph import build_vpg, check_well_formed
from .risks import Risk, classify_risks
from .syntax import ContractAST


# Настройка логирования
logger = logging.getLogger(__name__)


class RiskStatsTypeDict(TypedDict):
    rounds: int
    executions: int
    wall_time: float
    partial: bool
    budget_reason: Optional[str]
    lattice_bound: int
    differences: int
    filtered: int


class RiskReportTypeDict(TypedDict):
    contract: str
    risks: List[Dict[str, Any]]
    privileged: List[str]
    financial: List[Dict[str, Any]]
    stats: RiskStatsTypeDict


# ======= DataClasses =======
@dataclass
class Detection:
    """
    Полный результат анализа одного контракта.

    Атрибуты:
        ast: Дерево контракта
        facts: Факты зависимостей
        dset: Множество разностей
        verdicts: Решения распознавания финансовых переменных
        filtered: Разности после фильтра
        risks: Найденные риски
        wall_time: Время анализа в секундах
    """
    ast: ContractAST
    facts: DependenceFacts
    dset: DifferenceSet
    verdicts: Verdicts
    filtered: List[Any] = field(default_factory=list)
    risks: List[Risk] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def risky(self) -> bool:
        return bool(self.risks)

    def to_dict(self) -> RiskReportTypeDict:
        return {
            "contract": self.ast.name,
            "risks": [risk.to_dict() for risk in self.risks],
            "privileged": list(self.dset.privileged),
            "financial": [verdict.to_dict() for verdict in self.verdicts.items],
            "stats": {
                "rounds": self.dset.rounds,
                "executions": self.dset.executions,
                "wall_time": round(self.wall_time, 4),
                "partial": self.dset.partial,
                "budget_reason": self.dset.budget_reason,
                "lattice_bound": self.dset.bound,
                "differences": len(self.dset.D),
                "filtered": len(self.filtered),
            },
        }


# ======= MainClass =======
class RiskDetector:
    """
    Детектор рисков централизации.

    Args:
        max_rounds: Бюджет раундов (глубина анализа)
        financial_vars: Явный список финансовых переменных
        recognition: Режим распознавания
        tracer: Получатель событий трассировки движка
        convergence_log: Получатель записей о сходимости
    """

    def __init__(
        self,
        max_rounds: Optional[int] = None,
        financial_vars: Optional[Iterable[str]] = None,
        recognition: RecognitionMode = RecognitionMode.RULES,
        tracer: Optional[Tracer] = None,
        convergence_log: Optional[ConvergenceLog] = None,
    ) -> None:
        self.max_rounds = max_rounds
        self.financial_vars = tuple(financial_vars) if financial_vars else None
        self.recognition = recognition
        self.tracer = tracer
        self.convergence_log = convergence_log

    def detect(self, ast: ContractAST) -> Detection:
        """
        Анализирует разобранный контракт.

        Args:
            ast: Проверенное дерево контракта

        Returns:
            Результат анализа с рисками
        """
        started = time.monotonic()
        facts = build_facts(ast)
        analyzer = IterativeAnalyzer(
            ast,
            facts=facts,
            max_rounds=self.max_rounds,
            tracer=self.tracer,
            convergence_log=self.convergence_log,
        )
        dset = analyzer.analyze()

        graph = build_vpg(ast, facts)
        problems = check_well_formed(graph)
        if problems:
            logger.warning(f"Граф {ast.name} содержит некорректные рёбра: {problems}")

        verdicts = classify_financial(graph, ast, self.recognition, self.financial_vars)
        filtered = risk_filter(dset.D, verdicts)
        risks = classify_risks(filtered, verdicts, ast)
        return Detection(ast, facts, dset, verdicts, filtered, risks, time.monotonic() - started)

    def detect_source(self, source: str) -> Detection:
        return self.detect(parse(source))

    def detect_file(self, path: Union[str, Path]) -> AnalysisResult:
        """
        Анализирует файл и упаковывает итог в AnalysisResult.

        Ошибки разбора и анализа не пробрасываются: они становятся
        результатом со статусом ``error`` и диагностикой.
        """
        name = str(path)
        try:
            detection = self.detect(parse_file(path))
        except AnalyzerError as e:
            logger.error(f"Ошибка анализа {name}: {e.message}")
            return AnalysisResult.from_error(name, e)
        except Exception as e:
            logger.exception(f"Неожиданная ошибка при анализе {name}")
            return AnalysisResult(
                path=name,
                status="error",
                context=f"{name}:0:0: {e}",
                code=AnalyzerErrorCode.UNEXPECTED_ERROR,
            )

        return AnalysisResult(path=name, data=detection.to_dict())


# ======= PublicFunctions =======
def detect(ast: ContractAST, **options) -> Detection:
    """Анализирует контракт с параметрами по умолчанию."""
    return RiskDetector(**options).detect(ast)
