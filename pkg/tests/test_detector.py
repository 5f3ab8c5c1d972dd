import pytest

from src.core import (
    AnalyzerErrorCode,
    Confidence,
    RecognitionMode,
    RiskCategory,
    RiskDetector,
    detect,
)

from .conftest import CORPUS_DIR, FIXED, REGRESSION_DIR, RISKY


def categories(detection):
    return sorted(risk.category.value for risk in detection.risks)


# ======= Corpus =======
@pytest.mark.parametrize("name", RISKY + FIXED)
def test_corpus_categories(load, expected_categories, name):
    assert categories(detect(load(name))) == sorted(expected_categories[f"{name}.msol"])


def test_every_risky_contract_is_flagged(load):
    flagged = [name for name in RISKY if detect(load(name)).risky]
    assert flagged == list(RISKY)


def test_no_fixed_contract_is_flagged(load):
    assert [name for name in FIXED if detect(load(name)).risky] == []


def test_risk_provenance_starts_with_privileged_call(load):
    detection = detect(load("mint"))
    [risk] = detection.risks
    assert risk.category is RiskCategory.ARBITRARILY_MINT
    assert "totalSupply" in risk.variables
    assert risk.confidence is Confidence.EXACT
    assert risk.differences >= 1
    assert (("mint", "privileged"),) in risk.provenance


def test_destroy_provenance_names_selfdestructing_function(load):
    [risk] = detect(load("destroy")).risks
    assert risk.category is RiskCategory.DESTROY_ACCOUNT
    assert any(trail[-1][1] == "privileged" for trail in risk.provenance)


# ======= Regression =======
def test_flag_without_effect_is_not_a_risk(load):
    assert detect(load("pied_fp")).risks == []


def test_block_number_lock_disables_transferring(load):
    assert categories(detect(load("pied_fn"))) == [RiskCategory.DISABLE_TRANSFERRING.value]


def test_selfdestruct_to_owner_destroys_accounts(load):
    assert RiskCategory.DESTROY_ACCOUNT.value in categories(detect(load("tokeer_fn")))


def test_symmetric_token_has_no_risks(load):
    detection = detect(load("safe_token"))
    assert detection.dset.D == []
    assert detection.risks == []
    assert not detection.risky


# ======= Options =======
def test_financial_override_changes_categories(load):
    detection = RiskDetector(financial_vars=["owner"]).detect(load("mint"))
    assert detection.verdicts.financial == frozenset({"owner"})
    assert RiskCategory.ARBITRARILY_MINT.value not in categories(detection)


def test_names_recognition_still_finds_obvious_mint(load):
    detection = RiskDetector(recognition=RecognitionMode.NAMES).detect(load("mint"))
    assert RiskCategory.ARBITRARILY_MINT.value in categories(detection)


def test_round_budget_is_reported(load):
    detection = RiskDetector(max_rounds=1).detect(load("pause"))
    stats = detection.to_dict()["stats"]
    assert stats["partial"]
    assert stats["budget_reason"] == "max_rounds"
    assert stats["rounds"] == 1


# ======= Report =======
def test_report_layout(load):
    report = detect(load("transfer")).to_dict()
    assert set(report) == {"contract", "risks", "privileged", "financial", "stats"}
    assert report["contract"] == "Example"
    assert report["privileged"] == ["owner"]
    assert set(report["stats"]) == {
        "rounds", "executions", "wall_time", "partial", "budget_reason", "lattice_bound", "differences", "filtered",
    }
    assert report["risks"][0]["category"] == RiskCategory.ARBITRARILY_TRANSFER.value
    assert report["stats"]["filtered"] <= report["stats"]["differences"]


def test_detect_file_success():
    result = RiskDetector().detect_file(CORPUS_DIR / "freeze.msol")
    assert result.status == "success"
    assert result.code is AnalyzerErrorCode.SUCCESS
    assert result.data["risks"][0]["category"] == RiskCategory.FREEZE_ACCOUNT.value


def test_detect_file_reports_syntax_errors(tmp_path):
    broken = tmp_path / "broken.msol"
    broken.write_text("contract B { uint x }", encoding="utf-8")
    result = RiskDetector().detect_file(broken)
    assert result.status == "error"
    assert result.code is AnalyzerErrorCode.SYNTAX_ERROR
    assert result.context.startswith(str(broken))
    assert result.data is None


def test_detect_file_reports_missing_file():
    result = RiskDetector().detect_file(REGRESSION_DIR / "absent.msol")
    assert result.code is AnalyzerErrorCode.IO_ERROR
