"""
Модуль лексического анализа MiniSol.

Превращает исходный текст в последовательность токенов с позициями
(строка, столбец). Комментарии и пробельные символы отбрасываются.
"""

import re
import logging
from enum import Enum
from dataclasses import dataclass
from typing import List

from .abstractions import LexicalError


# Настройка логирования
logger = logging.getLogger(__name__)


# ======= EnumsClasses =======
class TokenKind(Enum):
    """Вид токена."""
    IDENT = "identifier"
    NUMBER = "number"
    STRING = "string"
    SYMBOL = "symbol"
    EOF = "end of input"


# ======= DataClasses =======
@dataclass(frozen=True)
class Token:
    """
    Токен исходного текста.

    Атрибуты:
        kind: Вид токена
        text: Исходный текст токена (для строк - содержимое без кавычек)
        line: Номер строки (с единицы)
        column: Номер столбца (с единицы)
    """
    kind: TokenKind
    text: str
    line: int
    column: int

    def is_symbol(self, text: str) -> bool:
        return self.kind is TokenKind.SYMBOL and self.text == text

    def is_word(self, text: str) -> bool:
        return self.kind is TokenKind.IDENT and self.text == text


# Многосимвольные операторы идут раньше односимвольных
SYMBOLS = (
    "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "++", "--",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/",
    "!", "%", "?", ":", "&", "|", "^", "~",
)

TOKEN_PATTERN = re.compile(
    r"""
    (?P<space>[ \t\r\n]+)
    |(?P<line_comment>//[^\n]*)
    |(?P<block_comment>/\*.*?\*/)
    |(?P<number>0[xX][0-9a-fA-F]+|[0-9]+(?:_[0-9]+)*)
    |(?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
    |(?P<string>"(?:[^"\\\n]|\\.)*")
    |(?P<symbol>""" + "|".join(re.escape(symbol) for symbol in SYMBOLS) + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


# ======= MainClass =======
class Lexer:
    """Лексический анализатор MiniSol."""

    @staticmethod
    def tokenize(source: str) -> List[Token]:
        """
        Разбивает исходный текст на токены.

        Args:
            source: Исходный текст контракта

        Returns:
            Список токенов, завершающийся токеном EOF

        Raises:
            LexicalError: Недопустимый символ или незакрытый литерал
        """
        tokens: List[Token] = []
        position, line, line_start = 0, 1, 0

        while position < len(source):
            column = position - line_start + 1
            if source.startswith("/*", position) and source.find("*/", position + 2) < 0:
                raise LexicalError("unterminated block comment", line=line, column=column)

            match = TOKEN_PATTERN.match(source, position)
            if match is None:
                char = source[position]
                if char == '"':
                    raise LexicalError("unterminated string literal", line=line, column=column)
                raise LexicalError(f"unexpected character {char!r}", line=line, column=column)

            text = match.group(0)
            group = match.lastgroup

            if group == "number":
                tokens.append(Token(TokenKind.NUMBER, text.replace("_", ""), line, column))
            elif group == "ident":
                tokens.append(Token(TokenKind.IDENT, text, line, column))
            elif group == "string":
                tokens.append(Token(TokenKind.STRING, text[1:-1], line, column))
            elif group == "symbol":
                tokens.append(Token(TokenKind.SYMBOL, text, line, column))

            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = position + text.rindex("\n") + 1
            position = match.end()

        tokens.append(Token(TokenKind.EOF, "", line, position - line_start + 1))
        logger.debug(f"Получено токенов: {len(tokens)}")
        return tokens
