import pytest

from src.core import (
    EXEC_STATE,
    RecognitionMode,
    Rule,
    analyze,
    build_facts,
    build_vpg,
    classify_financial,
    parse_file,
    risk_filter,
)
from src.core.financial import load_lexicon, name_matches

from .conftest import RECOGNITION_DIR


def verdicts_of(ast, **options):
    return classify_financial(build_vpg(ast, build_facts(ast)), ast, **options)


def recognition_accuracy(labels, mode, obfuscated=None):
    correct = total = 0
    for file, entry in labels.items():
        if obfuscated is not None and entry["obfuscated"] != obfuscated:
            continue
        ast = parse_file(RECOGNITION_DIR / file)
        financial = verdicts_of(ast, mode=mode).financial
        for variable, expected in entry["labels"].items():
            total += 1
            correct += (variable in financial) == expected
    return correct / total


# ======= Rules =======
def test_balances_mapping_is_transfer_shaped(load):
    verdicts = verdicts_of(load("transfer"))
    balances = verdicts.get("balances")
    assert balances.is_financial
    assert balances.has(Rule.TRANSFER_SHAPE)
    assert not verdicts.get("owner").is_financial
    assert verdicts.transfer_functions == frozenset({"transfer", "owner_transfer"})


def test_supply_and_fee_shapes(load):
    mint = verdicts_of(load("mint"))
    assert mint.get("totalSupply").has(Rule.SUPPLY_SHAPE)
    assert mint.financial == frozenset({"totalSupply", "balances"})

    fee = verdicts_of(load("param")).get("txFee")
    assert fee.has(Rule.FEE_SHAPE)
    assert fee.is_financial


def test_boolean_guard_of_transfer_is_not_financial(load):
    verdicts = verdicts_of(load("pause"))
    paused = verdicts.get("paused")
    assert not paused.is_financial
    assert paused.has(Rule.GUARDS_TRANSFER)
    assert paused.score == 0.0


def test_verdict_serialization(load):
    record = verdicts_of(load("mint")).get("totalSupply").to_dict()
    assert set(record) == {"variable", "is_financial", "score", "evidence"}
    assert record["score"] >= 0.5


def test_names_mode_uses_only_name_similarity(load):
    verdicts = verdicts_of(load("mint"), mode=RecognitionMode.NAMES)
    for verdict in verdicts:
        assert set(verdict.evidence) <= {Rule.NAME_SIMILARITY.value}


def test_overrides_replace_rule_decisions(load):
    verdicts = verdicts_of(load("mint"), overrides=["owner"])
    assert verdicts.financial == frozenset({"owner"})
    assert verdicts.get("owner").evidence[0] == Rule.USER_SPECIFIED.value
    assert verdicts.get("totalSupply").score == 0.0


def test_lexicon_matches_spelling_variants():
    lexicon = load_lexicon()
    assert name_matches("_totalSupply", lexicon)
    assert name_matches("Balance", lexicon)
    assert not name_matches("paused", lexicon)


# ======= Accuracy =======
def test_rule_recognition_accuracy(recognition_labels):
    assert recognition_accuracy(recognition_labels, RecognitionMode.RULES) >= 0.9


def test_rules_beat_names_on_obfuscated_contracts(recognition_labels):
    rules = recognition_accuracy(recognition_labels, RecognitionMode.RULES, obfuscated=True)
    names = recognition_accuracy(recognition_labels, RecognitionMode.NAMES, obfuscated=True)
    assert rules > names


# ======= Filter =======
def test_filter_keeps_financial_differences(load):
    ast = load("mint")
    dset = analyze(ast)
    kept = risk_filter(dset.D, verdicts_of(ast))
    assert kept
    assert all(set(difference.variables) & {"totalSupply", "balances", EXEC_STATE} for difference in kept)
    assert [difference for difference in dset.D if difference in kept] == kept


@pytest.mark.parametrize("name", ["pause", "freeze", "whitelist"])
def test_filter_keeps_transfer_guards(load, name):
    ast = load(name)
    kept = risk_filter(analyze(ast).D, verdicts_of(ast))
    assert kept
