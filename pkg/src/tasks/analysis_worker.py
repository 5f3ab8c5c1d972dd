import logging
from typing import Any, Dict, List, Optional

from .app import app
from .common import get_risk_detector

from src.core import (
    AnalysisResult,
    AnalysisResultTypeDict,
    AnalyzerError,
    check_theorems,
    parse_file,
)


# Настройка логирования
logger = logging.getLogger(__name__)


@app.task
def analyze_contract(
    path: str,
    recognition: str = "rules",
    financial_vars: Optional[List[str]] = None,
    max_rounds: Optional[int] = None,
) -> AnalysisResultTypeDict:
    """
    Анализирует один файл контракта.

    Ошибки файла возвращаются в результате, чтобы прогон корпуса
    не прерывался.
    """
    logger.info(f"Анализ {path}")
    detector = get_risk_detector(
        recognition=recognition,
        financial_vars=financial_vars,
        max_rounds=max_rounds,
    )
    result: AnalysisResult = detector.detect_file(path)
    return result.to_dict()


@app.task
def check_contract_theorems(
    path: str,
    depth: int,
) -> Dict[str, Any]:
    """Сверяет анализатор с оракулом на одном файле."""
    logger.info(f"Сверка с оракулом {path}, глубина {depth}")
    try:
        report = check_theorems(parse_file(path), depth)
    except AnalyzerError as e:
        return AnalysisResult.from_error(path, e).to_dict()

    return AnalysisResult(path=path, data=report.to_dict()).to_dict()
