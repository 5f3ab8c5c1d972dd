import importlib
import json

from click.testing import CliRunner

from src.app import RiskReport, cli
from src.app.cli import run_eager
from src.config import settings

from .conftest import CORPUS_DIR, REGRESSION_DIR

# пакет src.app экспортирует одноимённую группу команд
cli_module = importlib.import_module("src.app.cli")


def invoke(*args):
    return CliRunner().invoke(cli, list(args))


# ======= analyze =======
def test_analyze_risky_contract_as_json():
    result = invoke("analyze", str(CORPUS_DIR / "mint.msol"), "--json")
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["status"] == "success"
    assert payload["report"]["contract"] == "Mintable"
    assert [risk["category"] for risk in payload["report"]["risks"]] == ["ArbitrarilyMint"]
    RiskReport.model_validate(payload["report"])


def test_analyze_clean_contract_as_text():
    result = invoke("analyze", str(CORPUS_DIR / "fixed_mint.msol"))
    assert result.exit_code == 0
    assert "no centralization risks" in result.stdout


def test_analyze_several_files_returns_list():
    result = invoke("analyze", str(CORPUS_DIR / "pause.msol"), str(REGRESSION_DIR / "safe_token.msol"), "--json")
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert [item["report"]["contract"] for item in payload] == ["Pausable", "SafeToken"]


def test_analyze_reports_syntax_error(tmp_path):
    broken = tmp_path / "broken.msol"
    broken.write_text("contract B {\n    uint x\n}\n", encoding="utf-8")
    result = invoke("analyze", str(broken))
    assert result.exit_code == 2
    assert result.stdout.startswith(f"{broken}:3:")
    assert "SYNTAX_ERROR" in result.stdout


def test_analyze_with_financial_override():
    result = invoke("analyze", str(CORPUS_DIR / "mint.msol"), "--json", "--financial-vars", "owner")
    payload = json.loads(result.stdout)
    financial = [item["variable"] for item in payload["report"]["financial"] if item["is_financial"]]
    assert financial == ["owner"]


def test_analyze_depth_budget_marks_partial():
    result = invoke("analyze", str(CORPUS_DIR / "pause.msol"), "--json", "--depth-budget", "1")
    stats = json.loads(result.stdout)["report"]["stats"]
    assert stats["partial"]
    assert stats["budget_reason"] == "max_rounds"


def test_convergence_log_goes_to_stderr():
    result = invoke("analyze", str(CORPUS_DIR / "mint.msol"), "--json", "--log-convergence")
    records = [json.loads(line) for line in result.stderr.splitlines() if line.startswith("{")]
    assert records and records[0]["round"] == 1
    json.loads(result.stdout)


def test_dump_facts_goes_to_stderr():
    result = invoke("analyze", str(CORPUS_DIR / "transfer.msol"), "--dump-facts")
    events = [json.loads(line)["event"] for line in result.stderr.splitlines() if line.startswith("{")]
    assert events == ["facts", "graph"]


# ======= corpus =======
def test_corpus_summary():
    result = invoke("corpus", str(CORPUS_DIR), "--json")
    assert result.exit_code == 1
    summary = json.loads(result.stdout)
    assert summary["risky"] == 7
    assert summary["clean"] == 7
    assert summary["errors"] == 0
    assert summary["false_positives"] == summary["false_negatives"] == 0


def test_corpus_of_empty_directory(tmp_path):
    result = invoke("corpus", str(tmp_path))
    assert result.exit_code == 2


def test_corpus_lists_each_file_once():
    result = invoke("corpus", str(CORPUS_DIR), "--json")
    paths = [row["path"] for row in json.loads(result.stdout)["rows"]]
    assert sorted(paths) == sorted(str(path) for path in CORPUS_DIR.glob("*.msol"))


def test_corpus_dispatches_one_task_per_file(tmp_path, monkeypatch):
    for name in ("mint", "fixed_mint"):
        (tmp_path / f"{name}.msol").write_text((CORPUS_DIR / f"{name}.msol").read_text(encoding="utf-8"))
    dispatched = []

    def recording(arguments):
        dispatched.append(arguments[0])
        return run_eager(arguments)

    monkeypatch.setattr(settings, "corpus_workers", 1)
    monkeypatch.setattr(cli_module, "run_eager", recording)
    result = invoke("corpus", str(tmp_path))
    assert result.exit_code == 1
    assert sorted(dispatched) == sorted(str(path) for path in tmp_path.glob("*.msol"))


def test_corpus_exit_code_with_broken_file(tmp_path):
    for name in ("mint", "fixed_mint"):
        (tmp_path / f"{name}.msol").write_text((CORPUS_DIR / f"{name}.msol").read_text(encoding="utf-8"))
    (tmp_path / "broken.msol").write_text("contract B {\n    uint x\n}\n", encoding="utf-8")
    result = invoke("corpus", str(tmp_path), "--json")
    assert result.exit_code == 2
    summary = json.loads(result.stdout)
    assert (summary["risky"], summary["clean"], summary["errors"]) == (1, 1, 1)


def test_corpus_exit_code_without_errors(tmp_path):
    for name in ("pause", "fixed_pause"):
        (tmp_path / f"{name}.msol").write_text((CORPUS_DIR / f"{name}.msol").read_text(encoding="utf-8"))
    assert invoke("corpus", str(tmp_path)).exit_code == 1

    (tmp_path / "pause.msol").unlink()
    assert invoke("corpus", str(tmp_path)).exit_code == 0


# ======= oracle =======
def test_oracle_command():
    result = invoke("oracle", str(CORPUS_DIR / "mint.msol"), "--depth", "2")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["ok"]
    assert report["depth"] == 2


def test_oracle_command_on_missing_file(tmp_path):
    result = invoke("oracle", str(tmp_path / "absent.msol"), "--depth", "1")
    assert result.exit_code == 2
    assert json.loads(result.stdout)["code"] == "IO_ERROR"


# ======= schema =======
def test_schema_describes_report():
    schema = json.loads(invoke("schema").stdout)
    assert schema["title"] == "RiskReport"
    assert {"contract", "risks", "stats"} <= set(schema["required"])
