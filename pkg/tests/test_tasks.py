import pytest

from src.core import AnalysisResult, AnalyzerErrorCode
from src.tasks import analyze_contract, app, check_contract_theorems
from src.tasks.common import get_risk_detector

from .conftest import CORPUS_DIR


def test_tasks_run_eagerly_in_tests():
    assert app.conf.task_always_eager


def test_analyze_contract_task():
    payload = analyze_contract.delay(str(CORPUS_DIR / "freeze.msol")).get()
    result = AnalysisResult.from_dict(payload)
    assert result.status == "success"
    assert [risk["category"] for risk in result.data["risks"]] == ["FreezeAccount"]


def test_analyze_contract_task_with_names_mode():
    payload = analyze_contract.delay(str(CORPUS_DIR / "fixed_freeze.msol"), "names").get()
    assert payload["status"] == "success"
    assert payload["data"]["risks"] == []


def test_analyze_contract_task_reports_errors(tmp_path):
    payload = analyze_contract.delay(str(tmp_path / "absent.msol")).get()
    assert AnalysisResult.from_dict(payload).code is AnalyzerErrorCode.IO_ERROR


def test_check_contract_theorems_task():
    payload = check_contract_theorems.delay(str(CORPUS_DIR / "pause.msol"), 2).get()
    assert payload["status"] == "success"
    assert payload["data"]["ok"]


def test_tasks_are_routed_to_queues():
    routes = app.conf.task_routes
    assert routes["src.tasks.analysis_worker.analyze_contract"]["queue"] == "analysis_queue"
    assert routes["src.tasks.analysis_worker.check_contract_theorems"]["queue"] == "oracle_queue"


def test_unknown_recognition_mode():
    with pytest.raises(ValueError):
        get_risk_detector(recognition="magic")
