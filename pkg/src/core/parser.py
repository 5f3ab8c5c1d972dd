"""
Модуль синтаксического анализа MiniSol.

Рекурсивный спуск по токенам лексера с последующей семантической
проверкой. Всё, что выходит за пределы подмножества, отклоняется
с ошибкой UnsupportedConstructError, которая называет конструкцию.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

import networkx as nx

from .facts import ETHER, EXEC_STATE
from .lexer import Lexer, Token, TokenKind
from .abstractions import (
    AnalyzerError,
    AnalyzerErrorCode,
    MiniSolSyntaxError,
    UnsupportedConstructError,
    ValidationError,
)
from .syntax import (
    ADDRESS,
    BOOLEAN,
    CONSTRUCTOR,
    NUMERIC,
    Assign,
    Binary,
    Builtin,
    Call,
    ContractAST,
    EtherTransfer,
    Expression,
    FunctionDecl,
    Identifier,
    If,
    Index,
    Literal,
    MiniSolType,
    ModifierDecl,
    Param,
    Placeholder,
    Require,
    Return,
    Revert,
    SelfDestruct,
    Statement,
    StateVarDecl,
    TypeKind,
    Unary,
    VarDecl,
    iter_statements,
)


# Настройка логирования
logger = logging.getLogger(__name__)


NUMERIC_TYPES = {"uint", "uint8", "uint16", "uint32", "uint64", "uint128", "uint256"}
SIGNED_TYPES = {"int", "int8", "int16", "int32", "int64", "int128", "int256"}
UNSUPPORTED_TYPES = {"string", "bytes", "bytes32", "bytes4", "bytes1"} | SIGNED_TYPES
TYPE_WORDS = NUMERIC_TYPES | {"address", "bool", "mapping"} | UNSUPPORTED_TYPES

FUNCTION_VISIBILITY = {"public", "external", "internal", "private"}
STATE_VISIBILITY = {"public", "private", "internal"}
ETHER_UNITS = {"wei": 1, "gwei": 10 ** 9, "ether": 10 ** 18}

UNSUPPORTED_MEMBERS = {
    "interface": "interface",
    "library": "library",
    "abstract": "abstract contract",
    "import": "import",
    "event": "event",
    "struct": "struct",
    "enum": "enum",
    "using": "using directive",
    "fallback": "fallback function",
    "receive": "receive function",
    "error": "custom error",
}

UNSUPPORTED_STATEMENTS = {
    "for": "loop",
    "while": "loop",
    "do": "loop",
    "emit": "event",
    "assembly": "assembly",
    "delete": "delete",
    "try": "try/catch",
    "unchecked": "unchecked block",
    "break": "loop",
    "continue": "loop",
}

ARITHMETIC = {"+", "-", "*", "/"}
COMPARISON = {"<", "<=", ">", ">="}
EQUALITY = {"==", "!="}
LOGICAL = {"&&", "||"}


# ======= Parser =======
class Parser:
    """
    Парсер MiniSol методом рекурсивного спуска.

    Атрибуты:
        tokens: Токены исходного текста
        position: Индекс текущего токена
    """

    def __init__(self, tokens: List[Token]) -> None:
        self.tokens = tokens
        self.position = 0
        self._statement_counter = 0

    # ------- Навигация по токенам -------
    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def peek(self, offset: int = 1) -> Token:
        index = min(self.position + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.EOF:
            self.position += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> MiniSolSyntaxError:
        token = token or self.current
        return MiniSolSyntaxError(message, line=token.line, column=token.column)

    def unsupported(self, construct: str, token: Optional[Token] = None) -> UnsupportedConstructError:
        token = token or self.current
        return UnsupportedConstructError(construct, line=token.line, column=token.column)

    def expect_symbol(self, text: str) -> Token:
        token = self.current
        if not token.is_symbol(text):
            if text == ";" and self.position > 0:
                # Точка с запятой пропущена: указываем на конец предыдущего токена
                previous = self.tokens[self.position - 1]
                raise MiniSolSyntaxError(
                    "expected ';'",
                    line=previous.line,
                    column=previous.column + len(previous.text),
                )
            raise self.error(f"expected '{text}', found {self.describe(token)}")
        return self.advance()

    def expect_word(self, text: str) -> Token:
        token = self.current
        if not token.is_word(text):
            raise self.error(f"expected '{text}', found {self.describe(token)}")
        return self.advance()

    def expect_identifier(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.IDENT:
            raise self.error(f"expected identifier, found {self.describe(token)}")
        return self.advance()

    def accept_symbol(self, text: str) -> bool:
        if self.current.is_symbol(text):
            self.advance()
            return True
        return False

    @staticmethod
    def describe(token: Token) -> str:
        if token.kind is TokenKind.EOF:
            return "end of input"
        return f"'{token.text}'"

    def next_index(self) -> int:
        index = self._statement_counter
        self._statement_counter += 1
        return index

    # ------- Верхний уровень -------
    def parse_source(self) -> ContractAST:
        """Разбирает файл с одним контрактом."""
        contract: Optional[ContractAST] = None

        while self.current.kind is not TokenKind.EOF:
            token = self.current
            if token.is_word("pragma"):
                while not self.current.is_symbol(";"):
                    if self.current.kind is TokenKind.EOF:
                        raise self.error("expected ';' after pragma")
                    self.advance()
                self.advance()
            elif token.is_word("contract"):
                if contract is not None:
                    raise self.unsupported("multiple contracts")
                contract = self.parse_contract()
            elif token.kind is TokenKind.IDENT and token.text in UNSUPPORTED_MEMBERS:
                raise self.unsupported(UNSUPPORTED_MEMBERS[token.text])
            else:
                raise self.error(f"expected 'contract', found {self.describe(token)}")

        if contract is None:
            raise self.error("expected 'contract'")
        return contract

    def parse_contract(self) -> ContractAST:
        self.expect_word("contract")
        name = self.expect_identifier().text
        if self.current.is_word("is"):
            raise self.unsupported("inheritance")
        self.expect_symbol("{")

        state_vars: List[StateVarDecl] = []
        functions: List[FunctionDecl] = []
        modifiers: List[ModifierDecl] = []
        constructor: Optional[FunctionDecl] = None

        while not self.current.is_symbol("}"):
            token = self.current
            if token.kind is TokenKind.EOF:
                raise self.error("expected '}' at end of contract")
            if token.is_word("constructor"):
                if constructor is not None:
                    raise ValidationError("duplicate constructor", line=token.line, column=token.column)
                constructor = self.parse_constructor()
            elif token.is_word("function"):
                functions.append(self.parse_function())
            elif token.is_word("modifier"):
                modifiers.append(self.parse_modifier())
            elif token.kind is TokenKind.IDENT and token.text in UNSUPPORTED_MEMBERS:
                raise self.unsupported(UNSUPPORTED_MEMBERS[token.text])
            elif token.kind is TokenKind.IDENT and token.text in TYPE_WORDS:
                state_vars.append(self.parse_state_var())
            else:
                raise self.error(f"unexpected {self.describe(token)} in contract body")

        self.expect_symbol("}")
        return ContractAST(
            name=name,
            state_vars=tuple(state_vars),
            functions=tuple(functions),
            modifiers=tuple(modifiers),
            constructor=constructor,
        )

    # ------- Типы -------
    def parse_type(self, allow_mapping: bool = True) -> MiniSolType:
        token = self.current
        if token.kind is not TokenKind.IDENT or token.text not in TYPE_WORDS:
            raise self.error(f"expected type, found {self.describe(token)}")
        word = token.text

        if word in SIGNED_TYPES:
            raise self.unsupported("signed integer type")
        if word in UNSUPPORTED_TYPES:
            raise self.unsupported(f"{word} type")

        self.advance()
        if word in NUMERIC_TYPES:
            return NUMERIC
        if word == "bool":
            return BOOLEAN
        if word == "address":
            if self.current.is_word("payable"):
                self.advance()
            return ADDRESS

        # mapping(address => T)
        if not allow_mapping:
            raise self.unsupported("mapping outside state variables", token)
        self.expect_symbol("(")
        key_token = self.current
        if key_token.is_word("mapping"):
            raise self.unsupported("nested mapping")
        key = self.parse_type(allow_mapping=False)
        if key.kind is not TypeKind.ADDRESS:
            raise self.unsupported(f"mapping key type {key}", key_token)
        self.expect_symbol("=>")
        if self.current.is_word("mapping"):
            raise self.unsupported("nested mapping")
        value = self.parse_type(allow_mapping=False)
        self.expect_symbol(")")
        return MiniSolType(TypeKind.MAPPING, value.kind)

    # ------- Объявления -------
    def parse_state_var(self) -> StateVarDecl:
        start = self.current
        ty = self.parse_type()
        visibility: Optional[str] = None

        while self.current.kind is TokenKind.IDENT and (
            self.current.text in STATE_VISIBILITY or self.current.text in ("constant", "immutable")
        ):
            word = self.advance().text
            if word in STATE_VISIBILITY:
                visibility = word

        name = self.expect_identifier().text
        initializer = None
        if self.accept_symbol("="):
            initializer = self.parse_expression()
        self.expect_symbol(";")
        return StateVarDecl(name, ty, initializer, visibility, start.line, start.column)

    def parse_params(self) -> Tuple[Param, ...]:
        self.expect_symbol("(")
        params: List[Param] = []
        if not self.current.is_symbol(")"):
            while True:
                ty = self.parse_type(allow_mapping=False)
                if self.current.kind is TokenKind.IDENT and self.current.text in ("memory", "storage", "calldata"):
                    raise self.unsupported("data location")
                params.append(Param(self.expect_identifier().text, ty))
                if not self.accept_symbol(","):
                    break
        self.expect_symbol(")")
        return tuple(params)

    def parse_modifier_refs(self, refs: List[str]) -> None:
        name = self.advance()
        if self.current.is_symbol("("):
            raise self.unsupported("modifier arguments")
        refs.append(name.text)

    def parse_constructor(self) -> FunctionDecl:
        start = self.expect_word("constructor")
        self._statement_counter = 0
        self.expect_symbol("(")
        if not self.current.is_symbol(")"):
            raise self.unsupported("constructor parameters")
        self.expect_symbol(")")

        is_payable = False
        refs: List[str] = []
        while not self.current.is_symbol("{"):
            token = self.current
            if token.is_word("payable"):
                is_payable = True
                self.advance()
            elif token.kind is TokenKind.IDENT and token.text in FUNCTION_VISIBILITY:
                self.advance()
            elif token.kind is TokenKind.IDENT:
                self.parse_modifier_refs(refs)
            else:
                raise self.error(f"expected constructor body, found {self.describe(token)}")

        body = self.parse_block()
        return FunctionDecl(
            name=CONSTRUCTOR,
            params=(),
            modifiers=tuple(refs),
            body=body,
            is_payable=is_payable,
            line=start.line,
            column=start.column,
        )

    def parse_function(self) -> FunctionDecl:
        start = self.expect_word("function")
        name = self.expect_identifier().text
        self._statement_counter = 0
        params = self.parse_params()

        visibility = "public"
        is_view = False
        is_payable = False
        refs: List[str] = []
        returns: Tuple[MiniSolType, ...] = ()

        while not self.current.is_symbol("{"):
            token = self.current
            if token.is_symbol(";"):
                raise self.unsupported("function without body")
            if token.kind is not TokenKind.IDENT:
                raise self.error(f"expected function body, found {self.describe(token)}")
            if token.text in FUNCTION_VISIBILITY:
                visibility = self.advance().text
            elif token.text in ("view", "pure"):
                is_view = True
                self.advance()
            elif token.text == "payable":
                is_payable = True
                self.advance()
            elif token.text in ("virtual", "override"):
                raise self.unsupported("inheritance")
            elif token.text == "returns":
                self.advance()
                returns = self.parse_returns()
            else:
                self.parse_modifier_refs(refs)

        body = self.parse_block()
        return FunctionDecl(
            name=name,
            params=params,
            modifiers=tuple(refs),
            body=body,
            is_view=is_view,
            is_payable=is_payable,
            visibility=visibility,
            returns=returns,
            line=start.line,
            column=start.column,
        )

    def parse_returns(self) -> Tuple[MiniSolType, ...]:
        self.expect_symbol("(")
        types: List[MiniSolType] = []
        while True:
            types.append(self.parse_type(allow_mapping=False))
            if self.current.kind is TokenKind.IDENT and self.current.text not in TYPE_WORDS:
                # именованное возвращаемое значение
                self.advance()
            if not self.accept_symbol(","):
                break
        self.expect_symbol(")")
        if len(types) > 1:
            raise self.unsupported("multiple return values")
        return tuple(types)

    def parse_modifier(self) -> ModifierDecl:
        start = self.expect_word("modifier")
        name = self.expect_identifier().text
        self._statement_counter = 0
        if self.accept_symbol("("):
            if not self.current.is_symbol(")"):
                raise self.unsupported("modifier parameters")
            self.expect_symbol(")")
        body = self.parse_block()
        return ModifierDecl(name, body, start.line, start.column)

    # ------- Операторы -------
    def parse_block(self) -> Tuple[Statement, ...]:
        self.expect_symbol("{")
        statements: List[Statement] = []
        while not self.current.is_symbol("}"):
            if self.current.kind is TokenKind.EOF:
                raise self.error("expected '}'")
            statements.append(self.parse_statement())
        self.expect_symbol("}")
        return tuple(statements)

    def parse_branch(self) -> Tuple[Statement, ...]:
        if self.current.is_symbol("{"):
            return self.parse_block()
        return (self.parse_statement(),)

    def parse_statement(self) -> Statement:
        token = self.current

        if token.is_symbol("{"):
            raise self.unsupported("nested block")
        if token.kind is not TokenKind.IDENT:
            raise self.error(f"unexpected {self.describe(token)}")

        word = token.text
        if word in UNSUPPORTED_STATEMENTS:
            raise self.unsupported(UNSUPPORTED_STATEMENTS[word])

        if word == "require":
            index = self.next_index()
            self.advance()
            self.expect_symbol("(")
            condition = self.parse_expression()
            message = None
            if self.accept_symbol(","):
                message = self.expect_string()
            self.expect_symbol(")")
            self.expect_symbol(";")
            return Require(index, condition, message, token.line, token.column)

        if word == "revert":
            index = self.next_index()
            self.advance()
            self.expect_symbol("(")
            message = None
            if not self.current.is_symbol(")"):
                message = self.expect_string()
            self.expect_symbol(")")
            self.expect_symbol(";")
            return Revert(index, message, token.line, token.column)

        if word == "selfdestruct":
            index = self.next_index()
            self.advance()
            self.expect_symbol("(")
            beneficiary = self.parse_expression()
            self.expect_symbol(")")
            self.expect_symbol(";")
            return SelfDestruct(index, beneficiary, token.line, token.column)

        if word == "if":
            index = self.next_index()
            self.advance()
            self.expect_symbol("(")
            condition = self.parse_expression()
            self.expect_symbol(")")
            then_body = self.parse_branch()
            else_body: Tuple[Statement, ...] = ()
            if self.current.is_word("else"):
                self.advance()
                else_body = self.parse_branch()
            return If(index, condition, then_body, else_body, token.line, token.column)

        if word == "return":
            index = self.next_index()
            self.advance()
            value = None
            if not self.current.is_symbol(";"):
                value = self.parse_expression()
            self.expect_symbol(";")
            return Return(index, value, token.line, token.column)

        if word == "_" and self.peek().is_symbol(";"):
            index = self.next_index()
            self.advance()
            self.advance()
            return Placeholder(index, token.line, token.column)

        if word == "payable" and self.peek().is_symbol("("):
            return self.parse_ether_transfer()

        if word in TYPE_WORDS and not (word == "address" and self.peek().is_symbol("(")):
            return self.parse_local_declaration()

        following = self.peek()
        if following.is_symbol("("):
            index = self.next_index()
            self.advance()
            args = self.parse_arguments()
            self.expect_symbol(";")
            return Call(index, word, args, token.line, token.column)
        if following.is_symbol("."):
            raise self.unsupported("external call")

        return self.parse_assignment()

    def parse_ether_transfer(self) -> EtherTransfer:
        token = self.advance()
        index = self.next_index()
        self.expect_symbol("(")
        recipient = self.parse_expression()
        self.expect_symbol(")")
        self.expect_symbol(".")
        member = self.expect_identifier()
        if member.text != "transfer":
            raise self.unsupported("external call", member)
        self.expect_symbol("(")
        amount = self.parse_expression()
        self.expect_symbol(")")
        self.expect_symbol(";")
        return EtherTransfer(index, recipient, amount, token.line, token.column)

    def parse_local_declaration(self) -> VarDecl:
        token = self.current
        index = self.next_index()
        if token.is_word("mapping"):
            raise self.unsupported("mapping local variable")
        ty = self.parse_type(allow_mapping=False)
        if self.current.kind is TokenKind.IDENT and self.current.text in ("memory", "storage"):
            raise self.unsupported("data location")
        name = self.expect_identifier().text
        value = None
        if self.accept_symbol("="):
            value = self.parse_expression()
        self.expect_symbol(";")
        return VarDecl(index, ty, name, value, token.line, token.column)

    def parse_assignment(self) -> Assign:
        token = self.current
        index = self.next_index()
        target: Union[Identifier, Index]
        name = self.expect_identifier().text
        if self.accept_symbol("["):
            key = self.parse_expression()
            self.expect_symbol("]")
            if self.current.is_symbol("["):
                raise self.unsupported("nested mapping")
            target = Index(name, key, token.line, token.column)
        else:
            target = Identifier(name, token.line, token.column)

        operator = self.current
        if operator.is_symbol("++") or operator.is_symbol("--"):
            raise self.unsupported("increment operator")
        if operator.is_symbol("*=") or operator.is_symbol("/="):
            raise self.unsupported(f"compound assignment {operator.text}")
        if not any(operator.is_symbol(op) for op in ("=", "+=", "-=")):
            raise self.error(f"expected assignment, found {self.describe(operator)}")
        self.advance()

        value = self.parse_expression()
        self.expect_symbol(";")
        return Assign(index, target, operator.text, value, token.line, token.column)

    def parse_arguments(self) -> Tuple[Expression, ...]:
        self.expect_symbol("(")
        args: List[Expression] = []
        if not self.current.is_symbol(")"):
            while True:
                args.append(self.parse_expression())
                if not self.accept_symbol(","):
                    break
        self.expect_symbol(")")
        return tuple(args)

    def expect_string(self) -> str:
        token = self.current
        if token.kind is not TokenKind.STRING:
            raise self.error(f"expected string literal, found {self.describe(token)}")
        return self.advance().text

    # ------- Выражения -------
    def parse_expression(self) -> Expression:
        return self.parse_binary(0)

    PRECEDENCE = (
        ("||",),
        ("&&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("+", "-"),
        ("*", "/"),
    )

    def parse_binary(self, level: int) -> Expression:
        if level == len(self.PRECEDENCE):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        while True:
            token = self.current
            if token.is_symbol("%"):
                raise self.unsupported("modulo operator")
            if token.kind is TokenKind.SYMBOL and token.text in self.PRECEDENCE[level]:
                self.advance()
                right = self.parse_binary(level + 1)
                left = Binary(token.text, left, right, token.line, token.column)
            else:
                return left

    def parse_unary(self) -> Expression:
        token = self.current
        if token.is_symbol("!"):
            self.advance()
            return Unary("!", self.parse_unary(), token.line, token.column)
        if token.is_symbol("-"):
            raise self.unsupported("unary minus")
        if token.is_symbol("?") or token.is_symbol(":"):
            raise self.unsupported("conditional expression")
        return self.parse_primary()

    def parse_primary(self) -> Expression:
        token = self.current

        if token.kind is TokenKind.NUMBER:
            self.advance()
            if token.text.lower().startswith("0x"):
                digits = token.text[2:]
                if len(digits) == 40:
                    return Literal(hex(int(digits, 16)), TypeKind.ADDRESS, token.line, token.column)
                return Literal(int(digits, 16), TypeKind.NUMERIC, token.line, token.column)
            value = int(token.text)
            unit = self.current
            if unit.kind is TokenKind.IDENT and unit.text in ETHER_UNITS:
                self.advance()
                value *= ETHER_UNITS[unit.text]
            return Literal(value, TypeKind.NUMERIC, token.line, token.column)

        if token.kind is TokenKind.STRING:
            raise self.unsupported("string literal")

        if token.is_symbol("("):
            self.advance()
            inner = self.parse_expression()
            self.expect_symbol(")")
            return inner

        if token.kind is not TokenKind.IDENT:
            raise self.error(f"unexpected {self.describe(token)}")

        word = token.text
        if word in ("true", "false"):
            self.advance()
            return Literal(word == "true", TypeKind.BOOLEAN, token.line, token.column)

        if word in ("msg", "block"):
            self.advance()
            self.expect_symbol(".")
            member = self.expect_identifier()
            name = f"{word}.{member.text}"
            if name not in ("msg.sender", "msg.value", "block.number"):
                raise self.unsupported(name, member)
            return Builtin(name, token.line, token.column)

        if word in ("this", "tx", "now", "super"):
            raise self.unsupported(word)

        if word == "address" and self.peek().is_symbol("("):
            self.advance()
            self.advance()
            argument = self.current
            if argument.kind is not TokenKind.NUMBER:
                raise self.unsupported("address conversion", argument)
            self.advance()
            self.expect_symbol(")")
            return Literal(hex(int(argument.text, 0)), TypeKind.ADDRESS, token.line, token.column)

        if word == "payable" and self.peek().is_symbol("("):
            self.advance()
            self.advance()
            inner = self.parse_expression()
            self.expect_symbol(")")
            return inner

        if word in TYPE_WORDS:
            raise self.unsupported("type conversion")

        self.advance()
        following = self.current
        if following.is_symbol("("):
            raise self.unsupported("call expression", token)
        if following.is_symbol("."):
            raise self.unsupported("member access", token)
        if following.is_symbol("["):
            self.advance()
            key = self.parse_expression()
            self.expect_symbol("]")
            if self.current.is_symbol("["):
                raise self.unsupported("nested mapping")
            return Index(word, key, token.line, token.column)
        return Identifier(word, token.line, token.column)


# ======= Validator =======
class Validator:
    """
    Семантическая проверка разобранного контракта.

    Проверяет уникальность имён, разрешимость идентификаторов, типы
    выражений, наличие модификаторов и отсутствие рекурсии.
    """

    def __init__(self, ast: ContractAST) -> None:
        self.ast = ast
        self.state_types: Dict[str, MiniSolType] = {var.name: var.ty for var in ast.state_vars}

    def validate(self) -> None:
        self.check_declarations()
        self.check_call_graph()

        for var in self.ast.state_vars:
            if var.initializer is not None:
                if var.ty.is_mapping:
                    raise ValidationError(
                        f"mapping '{var.name}' cannot have an initializer", line=var.line, column=var.column
                    )
                found = self.type_of(var.initializer, {}, payable=False)
                self.require_kind(found, var.ty.kind, var.initializer)

        for modifier in self.ast.modifiers:
            self.check_body(modifier.body, {}, owner=modifier.name, payable=True, returns=(), in_modifier=True)

        owners: List[FunctionDecl] = list(self.ast.functions)
        if self.ast.constructor is not None:
            owners.append(self.ast.constructor)
        for function in owners:
            scope = {param.name: param.ty for param in function.params}
            for param in function.params:
                if param.name in self.state_types:
                    raise ValidationError(
                        f"parameter '{param.name}' shadows a state variable",
                        line=function.line,
                        column=function.column,
                    )
            self.check_body(
                function.body,
                scope,
                owner=function.name,
                payable=function.is_payable,
                returns=function.returns,
                in_modifier=False,
            )

    # ------- Объявления -------
    def check_declarations(self) -> None:
        seen: Set[str] = set()
        for var in self.ast.state_vars:
            if var.name in (ETHER, EXEC_STATE):
                raise ValidationError(f"reserved name '{var.name}'", line=var.line, column=var.column)
            if var.name in seen:
                raise ValidationError(f"duplicate state variable '{var.name}'", line=var.line, column=var.column)
            seen.add(var.name)

        names: Set[str] = set()
        for function in self.ast.functions:
            if function.name in names:
                raise UnsupportedConstructError("function overloading", line=function.line, column=function.column)
            names.add(function.name)
        for modifier in self.ast.modifiers:
            if modifier.name in names:
                raise ValidationError(
                    f"duplicate declaration '{modifier.name}'", line=modifier.line, column=modifier.column
                )
            names.add(modifier.name)

            placeholders = [s for s in iter_statements(modifier.body) if isinstance(s, Placeholder)]
            top_level = [s for s in modifier.body if isinstance(s, Placeholder)]
            if len(placeholders) != 1 or len(top_level) != 1:
                raise ValidationError(
                    f"modifier '{modifier.name}' must contain exactly one top-level '_'",
                    line=modifier.line,
                    column=modifier.column,
                )

        owners: List[FunctionDecl] = list(self.ast.functions)
        if self.ast.constructor is not None:
            owners.append(self.ast.constructor)
        for function in owners:
            for ref in function.modifiers:
                if self.ast.modifier(ref) is None:
                    raise ValidationError(
                        f"undeclared modifier '{ref}'", line=function.line, column=function.column
                    )
            for statement in iter_statements(function.body):
                if isinstance(statement, Placeholder):
                    raise ValidationError(
                        "'_' outside of a modifier", line=statement.line, column=statement.column
                    )

    def check_call_graph(self) -> None:
        graph = nx.DiGraph()
        bodies: List[Tuple[str, Tuple[Statement, ...]]] = [(f.name, f.body) for f in self.ast.functions]
        bodies += [(m.name, m.body) for m in self.ast.modifiers]
        if self.ast.constructor is not None:
            bodies.append((CONSTRUCTOR, self.ast.constructor.body))

        for owner, body in bodies:
            graph.add_node(owner)
            for statement in iter_statements(body):
                if not isinstance(statement, Call):
                    continue
                callee = self.ast.function(statement.name)
                if callee is None or statement.name == CONSTRUCTOR:
                    raise ValidationError(
                        f"call to undeclared function '{statement.name}'",
                        line=statement.line,
                        column=statement.column,
                    )
                if len(statement.args) != len(callee.params):
                    raise ValidationError(
                        f"function '{statement.name}' expects {len(callee.params)} arguments",
                        line=statement.line,
                        column=statement.column,
                    )
                graph.add_edge(owner, statement.name)

        for function in self.ast.functions:
            for ref in function.modifiers:
                graph.add_edge(function.name, ref)

        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise UnsupportedConstructError(f"recursive call ({cycle[0][0]})")

    # ------- Тела -------
    def check_body(
        self,
        body: Tuple[Statement, ...],
        scope: Dict[str, MiniSolType],
        owner: str,
        payable: bool,
        returns: Tuple[MiniSolType, ...],
        in_modifier: bool,
    ) -> None:
        for statement in body:
            self.check_statement(statement, scope, owner, payable, returns, in_modifier)

    def check_statement(
        self,
        statement: Statement,
        scope: Dict[str, MiniSolType],
        owner: str,
        payable: bool,
        returns: Tuple[MiniSolType, ...],
        in_modifier: bool,
    ) -> None:
        if isinstance(statement, VarDecl):
            if statement.name in scope or statement.name in self.state_types:
                raise ValidationError(
                    f"redeclaration of '{statement.name}'", line=statement.line, column=statement.column
                )
            if statement.value is not None:
                self.require_kind(self.type_of(statement.value, scope, payable), statement.ty.kind, statement.value)
            scope[statement.name] = statement.ty

        elif isinstance(statement, Assign):
            if isinstance(statement.target, Index):
                target_kind = self.type_of(statement.target, scope, payable)
            else:
                name = statement.target.name
                ty = scope.get(name) or self.state_types.get(name)
                if ty is None:
                    raise ValidationError(
                        f"undeclared identifier '{name}'", line=statement.line, column=statement.column
                    )
                if ty.is_mapping:
                    raise ValidationError(
                        f"cannot assign to mapping '{name}'", line=statement.line, column=statement.column
                    )
                target_kind = ty.kind
            if statement.op in ("+=", "-=") and target_kind is not TypeKind.NUMERIC:
                raise ValidationError(
                    f"operator {statement.op} needs a numeric target", line=statement.line, column=statement.column
                )
            self.require_kind(self.type_of(statement.value, scope, payable), target_kind, statement.value)

        elif isinstance(statement, Require):
            self.require_kind(self.type_of(statement.condition, scope, payable), TypeKind.BOOLEAN, statement.condition)

        elif isinstance(statement, If):
            self.require_kind(self.type_of(statement.condition, scope, payable), TypeKind.BOOLEAN, statement.condition)
            self.check_body(statement.then_body, scope, owner, payable, returns, in_modifier)
            self.check_body(statement.else_body, scope, owner, payable, returns, in_modifier)

        elif isinstance(statement, SelfDestruct):
            self.require_kind(
                self.type_of(statement.beneficiary, scope, payable), TypeKind.ADDRESS, statement.beneficiary
            )

        elif isinstance(statement, EtherTransfer):
            self.require_kind(self.type_of(statement.recipient, scope, payable), TypeKind.ADDRESS, statement.recipient)
            self.require_kind(self.type_of(statement.amount, scope, payable), TypeKind.NUMERIC, statement.amount)

        elif isinstance(statement, Return):
            if in_modifier:
                raise UnsupportedConstructError("return in modifier", line=statement.line, column=statement.column)
            if statement.value is None:
                if returns:
                    raise ValidationError("missing return value", line=statement.line, column=statement.column)
            else:
                if not returns:
                    raise ValidationError(
                        f"function '{owner}' does not return a value", line=statement.line, column=statement.column
                    )
                self.require_kind(self.type_of(statement.value, scope, payable), returns[0].kind, statement.value)

        elif isinstance(statement, Call):
            callee = self.ast.function(statement.name)
            for arg, param in zip(statement.args, callee.params):
                self.require_kind(self.type_of(arg, scope, payable), param.ty.kind, arg)

    # ------- Выражения -------
    def type_of(self, expression: Expression, scope: Dict[str, MiniSolType], payable: bool) -> TypeKind:
        """Выводит тип выражения, проверяя разрешимость идентификаторов."""
        if isinstance(expression, Literal):
            return expression.kind

        if isinstance(expression, Identifier):
            ty = scope.get(expression.name) or self.state_types.get(expression.name)
            if ty is None:
                raise ValidationError(
                    f"undeclared identifier '{expression.name}'", line=expression.line, column=expression.column
                )
            if ty.is_mapping:
                raise ValidationError(
                    f"mapping '{expression.name}' used as a value", line=expression.line, column=expression.column
                )
            return ty.kind

        if isinstance(expression, Builtin):
            if expression.name == "msg.sender":
                return TypeKind.ADDRESS
            if expression.name == "msg.value" and not payable:
                raise ValidationError(
                    "msg.value in a non-payable function", line=expression.line, column=expression.column
                )
            return TypeKind.NUMERIC

        if isinstance(expression, Index):
            ty = self.state_types.get(expression.base)
            if ty is None:
                raise ValidationError(
                    f"undeclared identifier '{expression.base}'", line=expression.line, column=expression.column
                )
            if not ty.is_mapping:
                raise ValidationError(
                    f"'{expression.base}' is not a mapping", line=expression.line, column=expression.column
                )
            self.require_kind(self.type_of(expression.key, scope, payable), TypeKind.ADDRESS, expression.key)
            return ty.value

        if isinstance(expression, Unary):
            self.require_kind(self.type_of(expression.operand, scope, payable), TypeKind.BOOLEAN, expression.operand)
            return TypeKind.BOOLEAN

        left = self.type_of(expression.left, scope, payable)
        right = self.type_of(expression.right, scope, payable)
        if expression.op in ARITHMETIC:
            self.require_kind(left, TypeKind.NUMERIC, expression.left)
            self.require_kind(right, TypeKind.NUMERIC, expression.right)
            return TypeKind.NUMERIC
        if expression.op in COMPARISON:
            self.require_kind(left, TypeKind.NUMERIC, expression.left)
            self.require_kind(right, TypeKind.NUMERIC, expression.right)
            return TypeKind.BOOLEAN
        if expression.op in EQUALITY:
            self.require_kind(right, left, expression.right)
            return TypeKind.BOOLEAN
        self.require_kind(left, TypeKind.BOOLEAN, expression.left)
        self.require_kind(right, TypeKind.BOOLEAN, expression.right)
        return TypeKind.BOOLEAN

    @staticmethod
    def require_kind(found: TypeKind, expected: TypeKind, node: Expression) -> None:
        if found is not expected:
            raise ValidationError(
                f"type mismatch: expected {expected.value}, found {found.value}",
                line=getattr(node, "line", None),
                column=getattr(node, "column", None),
            )


# ======= PublicFunctions =======
def parse(source: str) -> ContractAST:
    """
    Разбирает и проверяет исходный текст контракта MiniSol.

    Args:
        source: Исходный текст

    Returns:
        Проверенное синтаксическое дерево

    Raises:
        LexicalError, MiniSolSyntaxError, UnsupportedConstructError, ValidationError
    """
    tokens = Lexer.tokenize(source)
    ast = Parser(tokens).parse_source()
    Validator(ast).validate()
    logger.debug(
        f"Контракт {ast.name} разобран: переменных {len(ast.state_vars)}, функций {len(ast.functions)}"
    )
    return ast


def parse_file(path: Union[str, Path]) -> ContractAST:
    """
    Читает и разбирает файл ``.msol``.

    Raises:
        AnalyzerError: С кодом IO_ERROR, если файл нельзя прочитать
    """
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise AnalyzerError(f"cannot read file: {e}", code=AnalyzerErrorCode.IO_ERROR)
    return parse(source)
