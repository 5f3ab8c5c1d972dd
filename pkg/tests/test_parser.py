import pytest

from src.core import (
    AnalyzerErrorCode,
    LexicalError,
    MiniSolSyntaxError,
    UnsupportedConstructError,
    ValidationError,
    TypeKind,
    parse,
    parse_file,
    pretty_print,
)

from .conftest import CORPUS_DIR, RECOGNITION_DIR, REGRESSION_DIR


ALL_CONTRACTS = sorted(CORPUS_DIR.glob("*.msol")) + sorted(REGRESSION_DIR.glob("*.msol")) + sorted(
    RECOGNITION_DIR.glob("*.msol")
)


@pytest.mark.parametrize("path", ALL_CONTRACTS, ids=lambda path: path.name)
def test_contract_parses(path):
    ast = parse_file(path)
    assert ast.name
    assert ast.state_vars


@pytest.mark.parametrize("path", ALL_CONTRACTS, ids=lambda path: path.name)
def test_pretty_print_reparses_to_same_tree(path):
    ast = parse_file(path)
    assert parse(pretty_print(ast)) == ast


def test_empty_contract():
    ast = parse("contract E {}")
    assert ast.name == "E"
    assert ast.state_vars == ()
    assert ast.functions == ()
    assert ast.modifiers == ()
    assert ast.constructor is None


def test_declarations_of_transfer_contract(load):
    ast = load("transfer")
    assert ast.state_var_names == ("owner", "balances")
    assert ast.state_var("owner").ty.kind is TypeKind.ADDRESS
    balances = ast.state_var("balances").ty
    assert balances.is_mapping and balances.scalar is TypeKind.NUMERIC
    assert [f.name for f in ast.entry_points] == ["transfer", "owner_transfer"]
    assert ast.function("owner_transfer").modifiers == ("onlyOwner",)
    assert ast.constructor is not None


def test_missing_semicolon_points_at_its_line():
    source = (CORPUS_DIR / "transfer.msol").read_text(encoding="utf-8")
    broken = source.replace("address owner;", "address owner", 1)
    with pytest.raises(MiniSolSyntaxError) as error:
        parse(broken)
    assert error.value.code is AnalyzerErrorCode.SYNTAX_ERROR
    assert error.value.line == 4
    assert "expected ';'" in error.value.format_diagnostic("transfer.msol")
    assert error.value.format_diagnostic("transfer.msol").startswith("transfer.msol:4:")


@pytest.mark.parametrize(
    "source",
    [
        "contract A is B { }",
        "interface I { }",
        "contract A { event E(); }",
        "contract A { mapping(address => mapping(address => uint)) m; }",
        "contract A { string name; }",
        "contract A { uint x; function f() public { for (uint i = 0; i < 2; i += 1) { x += 1; } } }",
        "contract A { uint x; function f() public { while (true) { x += 1; } } }",
        "contract A { constructor(uint v) { } }",
        "contract A { int x; }",
    ],
)
def test_unsupported_constructs_are_rejected(source):
    with pytest.raises(UnsupportedConstructError) as error:
        parse(source)
    assert error.value.code is AnalyzerErrorCode.UNSUPPORTED_CONSTRUCT


def test_recursion_is_rejected():
    source = """
    contract R {
        uint x;
        function a() public { b(); }
        function b() public { a(); }
    }
    """
    with pytest.raises(UnsupportedConstructError):
        parse(source)


@pytest.mark.parametrize(
    "source",
    [
        "contract A { uint x; uint x; }",
        "contract A { uint x; function f() public { y = 1; } }",
        "contract A { bool b; function f() public { b += 1; } }",
        "contract A { uint x; function f() public { x = msg.value; } }",
        "contract A { uint x; function f(uint x) public { } }",
        "contract A { modifier m() { require(true); } }",
        "contract A { uint256 ether; }",
    ],
)
def test_semantic_errors(source):
    with pytest.raises(ValidationError) as error:
        parse(source)
    assert error.value.code is AnalyzerErrorCode.VALIDATION_ERROR


def test_unterminated_comment_is_lexical_error():
    with pytest.raises(LexicalError):
        parse("contract A { /* never closed ")


def test_unreadable_file_reports_io_error(tmp_path):
    with pytest.raises(Exception) as error:
        parse_file(tmp_path / "missing.msol")
    assert error.value.code is AnalyzerErrorCode.IO_ERROR


def test_address_literals_and_payable_transfer():
    ast = parse(
        """
        contract V {
            address owner = address(0);
            function pay(address to) public payable {
                payable(to).transfer(msg.value);
            }
        }
        """
    )
    assert ast.state_var("owner").initializer.value == "0x0"
    assert ast.function("pay").is_payable
