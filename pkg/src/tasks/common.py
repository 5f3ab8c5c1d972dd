from typing import Iterable, Optional

from src.core import RecognitionMode, RiskDetector


def get_risk_detector(
    recognition: str = RecognitionMode.RULES.value,
    financial_vars: Optional[Iterable[str]] = None,
    max_rounds: Optional[int] = None,
) -> RiskDetector:
    """Создает детектор с параметрами, пришедшими в задаче"""
    try:
        mode = RecognitionMode(recognition)
    except ValueError:
        raise ValueError(f"Unsupported recognition mode: {recognition}")

    return RiskDetector(
        max_rounds=max_rounds,
        financial_vars=financial_vars,
        recognition=mode,
    )
