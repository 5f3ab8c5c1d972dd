from enum import Enum
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, TypedDict, NotRequired


# ======= ErrorCodes =======
class AnalyzerErrorCode(Enum):
    """
    Коды ошибок анализатора.

    Каждый код соответствует одному классу исключений ниже и попадает
    в отчёты и диагностические сообщения CLI.
    """

    # Успех
    SUCCESS = "SUCCESS"

    # Ошибки входного текста
    LEXICAL_ERROR = "LEXICAL_ERROR"
    SYNTAX_ERROR = "SYNTAX_ERROR"
    UNSUPPORTED_CONSTRUCT = "UNSUPPORTED_CONSTRUCT"
    VALIDATION_ERROR = "VALIDATION_ERROR"

    # Ошибки анализа
    UNKNOWN_VARIABLE = "UNKNOWN_VARIABLE"
    UNIVERSE_MISMATCH = "UNIVERSE_MISMATCH"
    CONSTRUCTOR_REVERT = "CONSTRUCTOR_REVERT"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    DOMAIN_TOO_LARGE = "DOMAIN_TOO_LARGE"

    # Системные ошибки
    IO_ERROR = "IO_ERROR"
    UNEXPECTED_ERROR = "UNEXPECTED_ERROR"


# ======= ExceptionClasses =======
class AnalyzerError(Exception):
    """
    Базовое исключение анализатора.

    Атрибуты:
        message: Текст ошибки
        code: Код ошибки
        line: Номер строки в исходном тексте (опционально)
        column: Номер столбца в исходном тексте (опционально)
    """

    default_code = AnalyzerErrorCode.UNEXPECTED_ERROR

    def __init__(
        self,
        message: str,
        code: Optional[AnalyzerErrorCode] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.code = code or self.default_code
        self.line = line
        self.column = column

    def format_diagnostic(self, path: str = "<input>") -> str:
        """
        Формирует диагностику в виде ``file:line:col: message``.

        Args:
            path: Имя файла для префикса

        Returns:
            Строка диагностики
        """
        line = self.line if self.line is not None else 0
        column = self.column if self.column is not None else 0
        return f"{path}:{line}:{column}: {self.message}"


class LexicalError(AnalyzerError):
    """Недопустимый символ или незакрытый литерал."""
    default_code = AnalyzerErrorCode.LEXICAL_ERROR


class MiniSolSyntaxError(AnalyzerError):
    """Нарушение грамматики MiniSol."""
    default_code = AnalyzerErrorCode.SYNTAX_ERROR


class UnsupportedConstructError(AnalyzerError):
    """Конструкция Solidity вне поддерживаемого подмножества."""
    default_code = AnalyzerErrorCode.UNSUPPORTED_CONSTRUCT

    def __init__(self, construct: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        super().__init__(f"unsupported construct: {construct}", line=line, column=column)
        self.construct = construct


class ValidationError(AnalyzerError):
    """Синтаксически верный, но семантически некорректный контракт."""
    default_code = AnalyzerErrorCode.VALIDATION_ERROR


class UnknownVariableError(AnalyzerError):
    """Разность ссылается на переменную, не являющуюся переменной состояния."""
    default_code = AnalyzerErrorCode.UNKNOWN_VARIABLE


class UniverseMismatchError(AnalyzerError):
    """Сводки сравниваются по разным множествам переменных."""
    default_code = AnalyzerErrorCode.UNIVERSE_MISMATCH


class ConstructorRevertError(AnalyzerError):
    """Конструктор откатывается на всех путях (вырожденный контракт)."""
    default_code = AnalyzerErrorCode.CONSTRUCTOR_REVERT


class BudgetExceededError(AnalyzerError):
    """Превышен бюджет раундов, путей или времени."""
    default_code = AnalyzerErrorCode.BUDGET_EXCEEDED


class DomainTooLargeError(AnalyzerError):
    """Пространство перебора оракула слишком велико."""
    default_code = AnalyzerErrorCode.DOMAIN_TOO_LARGE


# ======= Result =======
class AnalysisResultTypeDict(TypedDict):
    path: str
    status: Literal["success", "error"]
    code: str
    context: NotRequired[Optional[str]]
    data: NotRequired[Optional[Dict[str, Any]]]


@dataclass
class AnalysisResult:
    """
    Результат обработки одного файла.

    Атрибуты:
        path: Путь к исходному файлу
        status: Статус операции - "success" или "error"
        context: Диагностика или дополнительное описание (опционально)
        code: Код ошибки
        data: Отчёт о рисках в виде словаря (опционально)
    """
    path: str
    status: Literal["success", "error"] = "success"
    context: Optional[str] = None
    code: AnalyzerErrorCode = field(default=AnalyzerErrorCode.SUCCESS)
    data: Optional[Dict[str, Any]] = None

    @classmethod
    def from_error(cls, path: str, error: AnalyzerError) -> "AnalysisResult":
        """Строит результат-ошибку из исключения анализатора."""
        return cls(
            path=path,
            status="error",
            context=error.format_diagnostic(path),
            code=error.code,
        )

    def to_dict(self) -> AnalysisResultTypeDict:
        """
        Преобразует результат в словарь.

        Возвращает:
            Словарь со статусом, кодом, контекстом и отчётом
        """
        return {
            "path": self.path,
            "status": self.status,
            "code": self.code.value,
            "context": self.context,
            "data": self.data,
        }

    @classmethod
    def from_dict(cls, payload: AnalysisResultTypeDict) -> "AnalysisResult":
        """Восстанавливает результат из словаря (ответ воркера Celery)."""
        return cls(
            path=payload["path"],
            status=payload["status"],
            context=payload.get("context"),
            code=AnalyzerErrorCode(payload["code"]),
            data=payload.get("data"),
        )
