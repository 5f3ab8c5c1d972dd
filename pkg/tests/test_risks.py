from src.core import (
    EXEC_STATE,
    Difference,
    DifferenceEntry,
    ExecState,
    RiskCategory,
    build_facts,
    build_vpg,
    classify_financial,
    classify_risks,
)
from src.core.risks import categorize
from src.core.summaries import ExecStateSummary, MappingSummary, NumericSummary


def verdicts_of(ast):
    return classify_financial(build_vpg(ast, build_facts(ast)), ast)


def owner_only(balances: MappingSummary) -> Difference:
    return Difference(
        entries=(
            DifferenceEntry("balances", balances, MappingSummary()),
            DifferenceEntry(EXEC_STATE, ExecStateSummary(), ExecStateSummary.of(ExecState.REVERT)),
        ),
        trail=(("owner_only", "privileged"),),
    )


# ======= Mint and transfer =======
def test_unbalanced_increase_is_a_mint(load):
    ast = load("mint")
    difference = owner_only(MappingSummary((("owner", NumericSummary(True, False, ("_value",))),)))
    assert categorize(difference, verdicts_of(ast), ast) is RiskCategory.ARBITRARILY_MINT


def test_increase_balanced_by_sender_decrease_is_not_a_mint(load):
    ast = load("mint")
    difference = owner_only(MappingSummary((
        ("_to", NumericSummary(True, False, ("_value",))),
        ("msg.sender", NumericSummary(False, True, ("_value",))),
    )))
    category = categorize(difference, verdicts_of(ast), ast)
    assert category is not RiskCategory.ARBITRARILY_MINT
    assert category is RiskCategory.GENERIC


def test_decrease_of_other_account_is_a_transfer(load):
    ast = load("transfer")
    difference = owner_only(MappingSummary((
        ("_from", NumericSummary(False, True, ("_value",))),
        ("_to", NumericSummary(True, False, ("_value",))),
    )))
    assert categorize(difference, verdicts_of(ast), ast) is RiskCategory.ARBITRARILY_TRANSFER


# ======= Generic =======
def test_labeled_only_difference_is_generic(load):
    ast = load("mint")
    labeled = Difference(
        entries=(DifferenceEntry("totalSupply", NumericSummary(), NumericSummary(), labeled=True),),
        trail=(("transfer", "privileged"),),
    )
    assert categorize(labeled, verdicts_of(ast), ast) is RiskCategory.GENERIC

    risks = classify_risks([labeled], verdicts_of(ast), ast)
    assert [risk.category for risk in risks] == [RiskCategory.GENERIC]
    assert risks[0].variables == ("totalSupply",)


def test_generic_covered_by_specific_risk_is_suppressed(load):
    ast = load("mint")
    minted = owner_only(MappingSummary((("owner", NumericSummary(True, False, ("_value",))),)))
    labeled = Difference(
        entries=(DifferenceEntry("balances", MappingSummary(), MappingSummary(), labeled=True),),
        trail=(("mint", "privileged"), ("transfer", "privileged")),
    )
    risks = classify_risks([minted, labeled], verdicts_of(ast), ast)
    assert [risk.category for risk in risks] == [RiskCategory.ARBITRARILY_MINT]
