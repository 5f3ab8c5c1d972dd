from .abstractions import (
    AnalysisResultTypeDict,
    ConstructorRevertError,
    UnsupportedConstructError,
    UniverseMismatchError,
    UnknownVariableError,
    DomainTooLargeError,
    BudgetExceededError,
    MiniSolSyntaxError,
    AnalyzerErrorCode,
    ValidationError,
    AnalysisResult,
    AnalyzerError,
    LexicalError,
)

from .syntax import (
    StateVarDecl,
    FunctionDecl,
    ContractAST,
    StatementId,
    TypeKind,
)

from .parser import (
    parse_file,
    parse,
)

from .printer import (
    pretty_print,
)

from .facts import (
    DependenceFacts,
    EXEC_STATE,
    ETHER,
    related_funcs_search,
    build_facts,
)

from .engine import (
    labeled_symbolic_exec,
    identify_privileged,
    exec_constructor,
    PairedExecution,
    SymbolicEngine,
    LabeledState,
    CallerContext,
    CallInputs,
    ExecState,
    Role,
)

from .summaries import (
    DifferenceEntry,
    Difference,
    summarize_state,
    lattice_bound,
    summarize,
    diff,
)

from .analyzer import (
    IterativeAnalyzer,
    DifferenceSet,
    ExaminedPair,
    replay_chain,
    analyze,
)

from .property_graph import (
    VariablePropertyGraph,
    check_well_formed,
    build_vpg,
    EdgeKind,
    NodeKind,
)

from .financial import (
    FinancialVerdict,
    RecognitionMode,
    Verdicts,
    Rule,
    classify_financial,
    risk_filter,
)

from .risks import (
    RiskCategory,
    Confidence,
    Risk,
    classify_risks,
)

from .detector import (
    RiskDetector,
    Detection,
    detect,
)

from .oracle import (
    ConcreteInterpreter,
    ConcreteState,
    TheoremReport,
    Traversal,
    Violation,
    Witness,
    Oracle,
    check_theorems,
    full_traverse,
)


__all__ = [
    # abstractions
    "AnalysisResultTypeDict",
    "ConstructorRevertError",
    "UnsupportedConstructError",
    "UniverseMismatchError",
    "UnknownVariableError",
    "DomainTooLargeError",
    "BudgetExceededError",
    "MiniSolSyntaxError",
    "AnalyzerErrorCode",
    "ValidationError",
    "AnalysisResult",
    "AnalyzerError",
    "LexicalError",

    # frontend
    "StateVarDecl",
    "FunctionDecl",
    "ContractAST",
    "StatementId",
    "TypeKind",
    "parse_file",
    "parse",
    "pretty_print",

    # facts
    "DependenceFacts",
    "EXEC_STATE",
    "ETHER",
    "related_funcs_search",
    "build_facts",

    # engine
    "labeled_symbolic_exec",
    "identify_privileged",
    "exec_constructor",
    "PairedExecution",
    "SymbolicEngine",
    "LabeledState",
    "CallerContext",
    "CallInputs",
    "ExecState",
    "Role",

    # summaries
    "DifferenceEntry",
    "Difference",
    "summarize_state",
    "lattice_bound",
    "summarize",
    "diff",

    # analyzer
    "IterativeAnalyzer",
    "DifferenceSet",
    "ExaminedPair",
    "replay_chain",
    "analyze",

    # property graph
    "VariablePropertyGraph",
    "check_well_formed",
    "build_vpg",
    "EdgeKind",
    "NodeKind",

    # financial
    "FinancialVerdict",
    "RecognitionMode",
    "Verdicts",
    "Rule",
    "classify_financial",
    "risk_filter",

    # risks
    "RiskCategory",
    "Confidence",
    "Risk",
    "classify_risks",

    # detector
    "RiskDetector",
    "Detection",
    "detect",

    # oracle
    "ConcreteInterpreter",
    "ConcreteState",
    "TheoremReport",
    "Traversal",
    "Violation",
    "Witness",
    "Oracle",
    "check_theorems",
    "full_traverse",
]
