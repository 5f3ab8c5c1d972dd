"""
Модуль командной строки janus-lite.

Команды:
    analyze  - анализ одного или нескольких файлов
    oracle   - сверка анализатора с полным перебором
    corpus   - параллельный прогон каталога контрактов
    schema   - JSON-схема отчёта
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from billiard import Pool
from celery import group

from src.config import settings
from src.core import (
    AnalysisResult,
    AnalyzerError,
    RecognitionMode,
    RiskDetector,
    build_facts,
    build_vpg,
    check_theorems,
    parse_file,
)
from src.tasks import analyze_contract

from .reporting import (
    FileReport,
    RiskReport,
    dump_json,
    exit_status,
    load_expected,
    render_corpus,
    render_report,
    summarize_corpus,
)


# Настройка логирования
logger = logging.getLogger(__name__)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def emit_line(record: Dict[str, Any]) -> None:
    """Пишет машиночитаемую запись JSON-строкой в stderr."""
    click.echo(json.dumps(record, ensure_ascii=False, default=str), err=True)


def run_eager(arguments: Tuple[str, str]) -> Dict[str, Any]:
    """Анализ одного файла корпуса в процессе пула."""
    return analyze_contract.apply(args=arguments).get()


def dispatch_corpus(files: List[Path], recognition: str) -> List[Dict[str, Any]]:
    """
    Раздаёт файлы корпуса воркерам, по одной задаче на файл.

    Без брокера (eager-режим Celery) задачи исполняются в пуле процессов
    billiard из ``settings.corpus_workers`` процессов, иначе группой
    задач Celery.
    """
    arguments = [(str(path), recognition) for path in files]
    if not settings.celery_always_eager:
        return group(analyze_contract.s(*item) for item in arguments).apply_async().get()

    workers = min(settings.corpus_workers, len(arguments))
    if workers <= 1:
        return [run_eager(item) for item in arguments]
    pool = Pool(processes=workers)
    try:
        return pool.map(run_eager, arguments)
    finally:
        pool.close()
        pool.join()


def split_names(value: Optional[str]) -> Optional[Tuple[str, ...]]:
    if not value:
        return None
    return tuple(name.strip() for name in value.split(",") if name.strip())


# ======= Commands =======
@click.group()
@click.option("--log-level", default=None, help="Уровень логирования (по умолчанию из JANUS_LOG_LEVEL).")
def cli(log_level: Optional[str]) -> None:
    """Дифференциальный детектор рисков централизации для контрактов MiniSol."""
    configure_logging(log_level or settings.log_level)


@cli.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--json", "output", flag_value="json", help="Вывод JSON-отчёта.")
@click.option("--text", "output", flag_value="text", default=True, help="Вывод текстовой таблицы.")
@click.option("--depth-budget", type=click.IntRange(min=1), default=None, help="Предел числа раундов анализа.")
@click.option("--financial-vars", default=None, help="Финансовые переменные через запятую.")
@click.option(
    "--recognition",
    type=click.Choice([mode.value for mode in RecognitionMode]),
    default=RecognitionMode.RULES.value,
    show_default=True,
    help="Режим распознавания финансовых переменных.",
)
@click.option("--log-convergence", is_flag=True, help="Записи о каждом раунде в stderr.")
@click.option("--dump-facts", is_flag=True, help="Факты зависимостей и граф свойств в stderr.")
@click.option("--trace", is_flag=True, help="События символьного исполнения в stderr.")
def analyze(
    files: Tuple[Path, ...],
    output: str,
    depth_budget: Optional[int],
    financial_vars: Optional[str],
    recognition: str,
    log_convergence: bool,
    dump_facts: bool,
    trace: bool,
) -> None:
    """Анализирует файлы контрактов."""
    detector = RiskDetector(
        max_rounds=depth_budget,
        financial_vars=split_names(financial_vars),
        recognition=RecognitionMode(recognition),
        tracer=emit_line if trace else None,
        convergence_log=emit_line if log_convergence else None,
    )

    reports: List[FileReport] = []
    for path in files:
        if dump_facts:
            dump_contract_facts(path)
        reports.append(FileReport.from_result(detector.detect_file(path)))

    if output == "json":
        payload = [report.model_dump(mode="json") for report in reports]
        click.echo(dump_json(payload[0] if len(payload) == 1 else payload))
    else:
        for report in reports:
            click.echo(render_report(report))

    sys.exit(exit_status(reports))


def dump_contract_facts(path: Path) -> None:
    try:
        ast = parse_file(path)
    except AnalyzerError:
        # ошибку покажет сам анализ
        return
    facts = build_facts(ast)
    graph = build_vpg(ast, facts)
    emit_line({"event": "facts", "contract": ast.name, **facts.to_dict()})
    emit_line({
        "event": "graph",
        "contract": ast.name,
        "nodes": graph.number_of_nodes(),
        "edges": sorted([source, target, kind] for source, target, kind in graph.edges(keys=True)),
    })


@cli.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--depth", type=click.IntRange(min=1), required=True, help="Глубина перебора оракула.")
def oracle(file: Path, depth: int) -> None:
    """Сверяет анализатор с полным перебором состояний."""
    try:
        report = check_theorems(parse_file(file), depth)
    except AnalyzerError as e:
        click.echo(dump_json(AnalysisResult.from_error(str(file), e).to_dict()))
        sys.exit(2)

    click.echo(dump_json(report.to_dict()))
    sys.exit(0 if report.ok else 1)


@cli.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--json", "output", flag_value="json", help="Вывод JSON-сводки.")
@click.option("--text", "output", flag_value="text", default=True, help="Вывод текстовой таблицы.")
@click.option(
    "--recognition",
    type=click.Choice([mode.value for mode in RecognitionMode]),
    default=RecognitionMode.RULES.value,
    show_default=True,
)
def corpus(directory: Path, output: str, recognition: str) -> None:
    """Прогоняет все файлы .msol каталога параллельно."""
    files = sorted(directory.glob("*.msol"))
    if not files:
        click.echo(f"{directory}: no .msol files", err=True)
        sys.exit(2)

    logger.info(f"Корпус {directory}: файлов {len(files)}")
    results = dispatch_corpus(files, recognition)
    reports = [FileReport.from_result(AnalysisResult.from_dict(payload)) for payload in results]

    summary = summarize_corpus(reports, load_expected(directory))
    if output == "json":
        click.echo(dump_json(summary.model_dump(mode="json")))
    else:
        click.echo(render_corpus(summary))

    sys.exit(exit_status(reports))


@cli.command()
def schema() -> None:
    """Печатает JSON-схему отчёта."""
    click.echo(dump_json(RiskReport.model_json_schema()))
