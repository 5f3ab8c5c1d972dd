"""
Модуль печати синтаксического дерева MiniSol обратно в исходный текст.

Вывод канонический: каждое бинарное выражение берётся в скобки,
поэтому повторный разбор даёт структурно то же дерево.
"""

from typing import List, Tuple

from .syntax import (
    ZERO_ADDRESS,
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
    ModifierDecl,
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
)


INDENT = "    "


class Printer:
    """Печать дерева MiniSol."""

    @classmethod
    def contract(cls, ast: ContractAST) -> str:
        lines: List[str] = [f"contract {ast.name} {{"]
        for var in ast.state_vars:
            lines.append(INDENT + cls.state_var(var))
        if ast.constructor is not None:
            lines.extend(cls.function(ast.constructor, depth=1))
        for modifier in ast.modifiers:
            lines.extend(cls.modifier(modifier, depth=1))
        for function in ast.functions:
            lines.extend(cls.function(function, depth=1))
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def state_var(cls, var: StateVarDecl) -> str:
        parts = [str(var.ty)]
        if var.visibility:
            parts.append(var.visibility)
        parts.append(var.name)
        text = " ".join(parts)
        if var.initializer is not None:
            text += f" = {cls.expression(var.initializer)}"
        return text + ";"

    @classmethod
    def modifier(cls, modifier: ModifierDecl, depth: int) -> List[str]:
        pad = INDENT * depth
        return [f"{pad}modifier {modifier.name}() {{", *cls.block(modifier.body, depth + 1), f"{pad}}}"]

    @classmethod
    def function(cls, function: FunctionDecl, depth: int) -> List[str]:
        pad = INDENT * depth
        if function.name == "constructor":
            header = "constructor()"
        else:
            params = ", ".join(f"{param.ty} {param.name}" for param in function.params)
            header = f"function {function.name}({params}) {function.visibility}"
        if function.is_view:
            header += " view"
        if function.is_payable:
            header += " payable"
        for ref in function.modifiers:
            header += f" {ref}"
        if function.returns:
            header += " returns (" + ", ".join(str(ty) for ty in function.returns) + ")"
        return [f"{pad}{header} {{", *cls.block(function.body, depth + 1), f"{pad}}}"]

    @classmethod
    def block(cls, body: Tuple[Statement, ...], depth: int) -> List[str]:
        lines: List[str] = []
        for statement in body:
            lines.extend(cls.statement(statement, depth))
        return lines

    @classmethod
    def statement(cls, statement: Statement, depth: int) -> List[str]:
        pad = INDENT * depth

        if isinstance(statement, VarDecl):
            text = f"{statement.ty} {statement.name}"
            if statement.value is not None:
                text += f" = {cls.expression(statement.value)}"
            return [f"{pad}{text};"]

        if isinstance(statement, Assign):
            return [f"{pad}{cls.expression(statement.target)} {statement.op} {cls.expression(statement.value)};"]

        if isinstance(statement, Require):
            message = f', "{statement.message}"' if statement.message is not None else ""
            return [f"{pad}require({cls.expression(statement.condition)}{message});"]

        if isinstance(statement, If):
            lines = [f"{pad}if ({cls.expression(statement.condition)}) {{"]
            lines.extend(cls.block(statement.then_body, depth + 1))
            if statement.else_body:
                lines.append(f"{pad}}} else {{")
                lines.extend(cls.block(statement.else_body, depth + 1))
            lines.append(f"{pad}}}")
            return lines

        if isinstance(statement, Revert):
            message = f'"{statement.message}"' if statement.message is not None else ""
            return [f"{pad}revert({message});"]

        if isinstance(statement, SelfDestruct):
            return [f"{pad}selfdestruct({cls.expression(statement.beneficiary)});"]

        if isinstance(statement, Return):
            if statement.value is None:
                return [f"{pad}return;"]
            return [f"{pad}return {cls.expression(statement.value)};"]

        if isinstance(statement, Call):
            args = ", ".join(cls.expression(arg) for arg in statement.args)
            return [f"{pad}{statement.name}({args});"]

        if isinstance(statement, EtherTransfer):
            return [
                f"{pad}payable({cls.expression(statement.recipient)})"
                f".transfer({cls.expression(statement.amount)});"
            ]

        if isinstance(statement, Placeholder):
            return [f"{pad}_;"]

        raise TypeError(f"unknown statement {statement!r}")

    @classmethod
    def expression(cls, expression: Expression) -> str:
        if isinstance(expression, Literal):
            if expression.kind is TypeKind.BOOLEAN:
                return "true" if expression.value else "false"
            if expression.kind is TypeKind.ADDRESS:
                if expression.value == ZERO_ADDRESS:
                    return "address(0)"
                return f"address({expression.value})"
            return str(expression.value)
        if isinstance(expression, (Identifier, Builtin)):
            return expression.name
        if isinstance(expression, Index):
            return f"{expression.base}[{cls.expression(expression.key)}]"
        if isinstance(expression, Unary):
            return f"{expression.op}({cls.expression(expression.operand)})"
        if isinstance(expression, Binary):
            return f"({cls.expression(expression.left)} {expression.op} {cls.expression(expression.right)})"
        raise TypeError(f"unknown expression {expression!r}")


def pretty_print(ast: ContractAST) -> str:
    """Печатает контракт в каноническом виде."""
    return Printer.contract(ast)
