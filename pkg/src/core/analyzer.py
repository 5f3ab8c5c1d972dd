"""
Модуль итеративного анализа разностей.

Первый раунд исполняет все публичные функции из начального состояния
парами (привилегированный и обычный вызывающий). Каждый следующий раунд
исполняет только функции, связанные с новыми разностями, и только из
сохранённых привилегированных преемников. Анализ заканчивается, когда
раунд не даёт новых разностей.
"""

import time
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.config import settings
from .engine import ExecState, LabeledState, PairedExecution, SymbolicEngine, Tracer
from .facts import ETHER, DependenceFacts, build_facts, related_funcs_search
from .summaries import Difference, VariableSummary, diff, lattice_bound, summarize_state
from .syntax import ContractAST, FunctionDecl


# Настройка логирования
logger = logging.getLogger(__name__)

ConvergenceLog = Callable[[Dict[str, Any]], None]


# ======= DataClasses =======
@dataclass(frozen=True)
class ExaminedPair:
    """
    Сравнённая пара исполнений.

    Атрибуты:
        pair: Пара преемников
        phi_p: Сводки привилегированного исполнения
        phi_o: Сводки обычного исполнения
        difference: Полученная разность (None, если пуста)
        round: Номер раунда
    """
    pair: PairedExecution
    phi_p: Dict[str, VariableSummary]
    phi_o: Dict[str, VariableSummary]
    difference: Optional[Difference]
    round: int


@dataclass
class DifferenceSet:
    """
    Множество разностей с сохранёнными привилегированными преемниками.

    Атрибуты:
        D: Разности в порядке обнаружения (без повторов)
        S_next: Привилегированные преемники, выровненные с D
        rounds: Число выполненных раундов
        executions: Число исполнений функций
        examined: Все сравнённые пары
        bound: Верхняя граница числа разностей
        partial: Результат неполон из-за бюджета
        budget_reason: Какой бюджет исчерпан
        privileged: Привилегированные переменные
        elapsed: Время анализа в секундах
    """
    D: List[Difference] = field(default_factory=list)
    S_next: List[LabeledState] = field(default_factory=list)
    rounds: int = 0
    executions: int = 0
    examined: List[ExaminedPair] = field(default_factory=list)
    bound: int = 0
    partial: bool = False
    budget_reason: Optional[str] = None
    privileged: Tuple[str, ...] = ()
    elapsed: float = 0.0

    def __len__(self) -> int:
        return len(self.D)

    def __iter__(self):
        return iter(self.D)

    def state_of(self, difference: Difference) -> LabeledState:
        return self.S_next[self.D.index(difference)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "differences": [difference.to_dict() for difference in self.D],
            "rounds": self.rounds,
            "executions": self.executions,
            "partial": self.partial,
            "budget_reason": self.budget_reason,
            "privileged": list(self.privileged),
        }


# ======= MainClass =======
class IterativeAnalyzer:
    """
    Итеративный анализатор разностей.

    Args:
        ast: Проверенное дерево контракта
        facts: Факты зависимостей (строятся, если не заданы)
        max_rounds: Предел числа раундов
        max_paths: Предел числа путей одного исполнения
        budget_secs: Предел времени анализа
        propagate_labels: Распространять ли метки
        include_labels: Учитывать ли метки в разности
        tracer: Получатель событий трассировки
        convergence_log: Получатель записей о сходимости
    """

    def __init__(
        self,
        ast: ContractAST,
        facts: Optional[DependenceFacts] = None,
        max_rounds: Optional[int] = None,
        max_paths: Optional[int] = None,
        budget_secs: Optional[float] = None,
        propagate_labels: bool = True,
        include_labels: bool = True,
        tracer: Optional[Tracer] = None,
        convergence_log: Optional[ConvergenceLog] = None,
    ) -> None:
        self.ast = ast
        self.facts = facts or build_facts(ast)
        self.max_rounds = max_rounds if max_rounds is not None else settings.max_rounds
        self.budget_secs = budget_secs if budget_secs is not None else settings.budget_secs
        self.propagate_labels = propagate_labels
        self.include_labels = include_labels
        self.convergence_log = convergence_log
        self.engine = SymbolicEngine(
            ast,
            self.facts,
            max_paths=max_paths if max_paths is not None else settings.max_paths,
            propagate_labels=propagate_labels,
            tracer=tracer,
        )

    # ------- Сравнение -------
    def compare(self, pair: PairedExecution, round_number: int) -> ExaminedPair:
        """Строит сводки пары и их разность."""
        phi_p = summarize_state(pair.source, pair.privileged)
        phi_o = summarize_state(pair.source, pair.ordinary)
        difference = diff(phi_p, phi_o, pair.privileged.theta, include_labels=self.include_labels)
        if difference is not None:
            difference = replace(
                difference,
                trail=pair.privileged.trail,
                approximate=pair.privileged.approximate or pair.ordinary.approximate,
                controls=pair.privileged.controls,
            )
        return ExaminedPair(pair, phi_p, phi_o, difference, round_number)

    def admit(self, state: LabeledState, difference: Difference) -> LabeledState:
        """Помечает переменные разности в сохраняемом привилегированном преемнике."""
        if self.propagate_labels:
            names = [var for var in difference.variables if var in self.engine.ast.state_var_names or var == ETHER]
            state = state.with_labels(names)
        return state.as_seed()

    def functions_for(self, difference: Optional[Difference]) -> List[FunctionDecl]:
        if difference is None:
            return list(self.ast.entry_points)
        names = related_funcs_search(self.ast, self.facts, difference)
        return [self.ast.function(name) for name in names]

    # ------- Анализ -------
    def analyze(self) -> DifferenceSet:
        """
        Запускает анализ до сходимости или исчерпания бюджета.

        Returns:
            Множество разностей со статистикой
        """
        started = time.monotonic()
        result = DifferenceSet(bound=lattice_bound(self.ast), privileged=self.engine.privileged)
        if not self.engine.privileged:
            logger.info(f"В контракте {self.ast.name} нет привилегированных переменных")
            return result

        initial = self.engine.initial_state()
        frontier: List[Tuple[LabeledState, Optional[Difference]]] = [(initial, None)]
        seen = set()

        while frontier:
            if result.rounds >= self.max_rounds:
                result.partial = True
                result.budget_reason = "max_rounds"
                logger.warning(f"{self.ast.name}: исчерпан предел раундов ({self.max_rounds})")
                break

            result.rounds += 1
            admitted: List[Tuple[LabeledState, Optional[Difference]]] = []
            examined_before = len(result.examined)

            for seed, origin in frontier:
                for function in self.functions_for(origin):
                    if time.monotonic() - started > self.budget_secs:
                        result.partial = True
                        result.budget_reason = "budget_secs"
                        break
                    for pair in self.engine.execute_pair(function, seed):
                        examined = self.compare(pair, result.rounds)
                        result.examined.append(examined)
                        difference = examined.difference
                        if difference is None or difference in seen:
                            continue
                        seen.add(difference)
                        state = self.admit(pair.privileged, difference)
                        result.D.append(difference)
                        result.S_next.append(state)
                        if state.exec_state is not ExecState.SELFDESTRUCT:
                            admitted.append((state, difference))
                if result.partial:
                    break

            self.log_round(result, len(admitted), len(result.examined) - examined_before)
            if result.partial:
                logger.warning(f"{self.ast.name}: исчерпан бюджет времени ({self.budget_secs} с)")
                break
            frontier = admitted

        if self.engine.truncated and not result.partial:
            result.partial = True
            result.budget_reason = "max_paths"

        result.executions = self.engine.executions
        result.elapsed = time.monotonic() - started
        # следующий раунд начинается только после новых разностей
        assert result.rounds <= len(result.D) + 1
        logger.info(
            f"Анализ {self.ast.name}: разностей {len(result.D)}, раундов {result.rounds}, "
            f"исполнений {result.executions}"
        )
        return result

    def log_round(self, result: DifferenceSet, new: int, pairs: int) -> None:
        record = {
            "round": result.rounds,
            "new_differences": new,
            "pairs": pairs,
            "executions": self.engine.executions,
            "differences": len(result.D),
        }
        logger.debug(f"Раунд {record['round']}: новых разностей {new}, пар {pairs}")
        if self.convergence_log is not None:
            self.convergence_log(record)


# ======= PublicFunctions =======
def analyze(ast: ContractAST, **options) -> DifferenceSet:
    """Анализирует контракт с параметрами по умолчанию из настроек."""
    return IterativeAnalyzer(ast, **options).analyze()


def replay_chain(
    analyzer: IterativeAnalyzer, functions: Sequence[str]
) -> List[Tuple[LabeledState, List[ExaminedPair]]]:
    """
    Повторяет цепочку привилегированных исполнений по всем комбинациям путей.

    На каждом шаге пары сравниваются, а привилегированный преемник получает
    метки своей разности, как при допуске в анализе.

    Returns:
        Для каждой достигнутой цепочки: исходное состояние последнего шага
        и сравнённые пары последнего шага
    """
    states = [analyzer.engine.initial_state()]
    for step, name in enumerate(functions, start=1):
        function = analyzer.ast.function(name)
        last = step == len(functions)
        reached = []
        finals = []
        for state in states:
            examined = [analyzer.compare(pair, step) for pair in analyzer.engine.execute_pair(function, state)]
            if last:
                finals.append((state, examined))
                continue
            for item in examined:
                successor = item.pair.privileged
                if item.difference is not None:
                    reached.append(analyzer.admit(successor, item.difference))
                else:
                    reached.append(successor.as_seed())
        if last:
            return finals
        states = reached
    return []
