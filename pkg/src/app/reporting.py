"""
Модели публикуемого отчёта и его текстовое представление.

JSON-отчёт описывается моделями pydantic, поэтому его схему можно
выгрузить командой ``janus-lite schema``, а отчёты - проверить и
прочитать обратно.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional

from pydantic import BaseModel, Field

from src.core import AnalysisResult


RiskCategoryName = Literal[
    "ArbitrarilyTransfer",
    "DestroyAccount",
    "ArbitrarilyMint",
    "FreezeAccount",
    "DisableTransferring",
    "ParameterManipulation",
    "WhitelistEscalation",
    "GenericFinancialDifference",
]


# ======= Models =======
class ProvenanceStep(BaseModel):
    function: str
    role: Literal["privileged", "ordinary"]


class RiskItem(BaseModel):
    """Один риск: категория, переменные и цепочки вызовов, которые к нему привели."""
    category: RiskCategoryName
    variables: List[str]
    provenance: List[List[ProvenanceStep]]
    confidence: Literal["exact", "approximate-paths"]
    differences: int = Field(ge=1)


class FinancialItem(BaseModel):
    variable: str
    is_financial: bool
    score: float = Field(ge=0.0, le=1.0)
    evidence: List[str]


class RiskStats(BaseModel):
    rounds: int
    executions: int
    wall_time: float
    partial: bool = False
    budget_reason: Optional[str] = None
    lattice_bound: int
    differences: int
    filtered: int


class RiskReport(BaseModel):
    """Отчёт о рисках централизации одного контракта."""
    contract: str
    risks: List[RiskItem]
    privileged: List[str] = Field(default_factory=list)
    financial: List[FinancialItem] = Field(default_factory=list)
    stats: RiskStats

    @property
    def categories(self) -> List[str]:
        return [risk.category for risk in self.risks]


class FileReport(BaseModel):
    """Итог обработки одного файла: отчёт или диагностика ошибки."""
    path: str
    status: Literal["success", "error"]
    code: str
    context: Optional[str] = None
    report: Optional[RiskReport] = None

    @classmethod
    def from_result(cls, result: AnalysisResult) -> "FileReport":
        return cls(
            path=result.path,
            status=result.status,
            code=result.code.value,
            context=result.context,
            report=RiskReport.model_validate(result.data) if result.data is not None else None,
        )

    @property
    def risky(self) -> bool:
        return self.report is not None and bool(self.report.risks)


class CorpusRow(BaseModel):
    path: str
    status: Literal["success", "error"]
    categories: List[str]
    expected: Optional[List[str]] = None
    wall_time: float = 0.0

    @property
    def verdict(self) -> str:
        if self.status == "error":
            return "error"
        if self.expected is None:
            return "-"
        if self.categories and not self.expected:
            return "FP"
        if self.expected and not self.categories:
            return "FN"
        return "ok" if set(self.categories) == set(self.expected) else "category"


class CorpusSummary(BaseModel):
    """Сводка прогона корпуса."""
    rows: List[CorpusRow]
    risky: int
    clean: int
    errors: int
    false_positives: int
    false_negatives: int


# ======= Helpers =======
def exit_status(reports: Iterable[FileReport]) -> int:
    """0 - рисков нет, 1 - найдены риски, 2 - были ошибки."""
    reports = list(reports)
    if any(report.status == "error" for report in reports):
        return 2
    return 1 if any(report.risky for report in reports) else 0


def load_expected(directory: Path) -> Dict[str, List[str]]:
    """Ожидаемые категории корпуса из ``expected.json`` (если файл есть)."""
    path = directory / "expected.json"
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def summarize_corpus(reports: Iterable[FileReport], expected: Dict[str, List[str]]) -> CorpusSummary:
    rows = []
    for report in sorted(reports, key=lambda item: item.path):
        rows.append(CorpusRow(
            path=report.path,
            status=report.status,
            categories=report.report.categories if report.report else [],
            expected=expected.get(Path(report.path).name),
            wall_time=report.report.stats.wall_time if report.report else 0.0,
        ))
    ok = [row for row in rows if row.status == "success"]
    return CorpusSummary(
        rows=rows,
        risky=sum(1 for row in ok if row.categories),
        clean=sum(1 for row in ok if not row.categories),
        errors=len(rows) - len(ok),
        false_positives=sum(1 for row in rows if row.verdict == "FP"),
        false_negatives=sum(1 for row in rows if row.verdict == "FN"),
    )


# ======= Rendering =======
def render_report(report: FileReport) -> str:
    """Текстовая таблица одного файла."""
    if report.status == "error":
        return f"{report.context} [{report.code}]"

    data = report.report
    lines = [f"{report.path}: {data.contract}"]
    if not data.risks:
        lines.append("  no centralization risks")
    for risk in data.risks:
        lines.append(f"  {risk.category:<28} {', '.join(risk.variables)}  ({risk.confidence})")
        for trail in risk.provenance:
            steps = " -> ".join(f"{step.function}[{step.role[0].upper()}]" for step in trail)
            lines.append(f"      {steps}")
    stats = data.stats
    partial = f", partial: {stats.budget_reason}" if stats.partial else ""
    lines.append(
        f"  rounds {stats.rounds}, executions {stats.executions}, "
        f"{stats.wall_time:.3f}s{partial}"
    )
    return "\n".join(lines)


def render_corpus(summary: CorpusSummary) -> str:
    """Сводная таблица корпуса."""
    width = max([len(Path(row.path).name) for row in summary.rows] + [4])
    lines = [f"{'file':<{width}}  {'verdict':<7}  categories"]
    for row in summary.rows:
        categories = ", ".join(row.categories) if row.categories else "-"
        lines.append(f"{Path(row.path).name:<{width}}  {row.verdict:<7}  {categories}")
    lines.append(
        f"risky {summary.risky} / clean {summary.clean}, errors {summary.errors}, "
        f"FP {summary.false_positives}, FN {summary.false_negatives}"
    )
    return "\n".join(lines)


def dump_json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2)
