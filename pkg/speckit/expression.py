"""Safe arithmetic expressions.

Expressions are parsed with `ast` and compiled into nested closures over a
whitelist of operators, functions and constants; no code is ever passed to
`eval`. Both `**` and `^` denote powers.
"""

import ast
import io
import math
import operator
import tokenize
from typing import Callable, Dict, List, Sequence, Tuple


class ExpressionError(ValueError):
    """Parse or evaluation error of an expression.

    Args:
        msg (str): Message.
        line (int, optional): 1-based line of the offending token.
        column (int, optional): 1-based column of the offending token.
    """

    def __init__(self, msg: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


BINARY_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

UNARY_OPS = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}

FUNCTIONS: Dict[str, Tuple[Callable[..., float], int]] = {
    "pow": (math.pow, 2),
    "exp": (math.exp, 1),
    "sin": (math.sin, 1),
    "cos": (math.cos, 1),
    "tan": (math.tan, 1),
    "arctan": (math.atan, 1),
    "atan": (math.atan, 1),
    "sqrt": (math.sqrt, 1),
    "abs": (abs, 1),
}

CONSTANTS = {
    "pi": math.pi,
    "e": math.e,
}

Node = Callable[[Dict[str, float]], float]


def caret_to_pow(text: str) -> Tuple[str, Dict[int, List[int]]]:
    """Rewrites `^` operator tokens into `**`.

    `^` then binds like a power, tighter than unary minus and right
    associative: `-t^2 == -(t**2)`.

    Args:
        text (str): Source text.

    Returns:
        text (str): Rewritten text.
        carets (dict): 0-based columns of the rewritten tokens in the source
            text, keyed by 1-based line.
    """

    carets: Dict[int, List[int]] = {}
    try:
        for tok in tokenize.generate_tokens(io.StringIO(text).readline):
            if tok.type == tokenize.OP and tok.string == "^":
                carets.setdefault(tok.start[0], []).append(tok.start[1])
    except (tokenize.TokenError, SyntaxError):
        # Unbalanced input; `ast.parse` reports it on the original text.
        return text, {}

    lines = text.splitlines(keepends=True)
    for lineno, cols in carets.items():
        line = lines[lineno - 1]
        for col in reversed(cols):
            line = line[:col] + "**" + line[col + 1:]
        lines[lineno - 1] = line
    return "".join(lines), carets


class Expression:
    """Compiled expression over named variables.

    Args:
        text (str): Source text, e.g. `"-(t*u)/(1 - t^2)"`.
        variables (sequence of str, optional): Variable names, in the order
            positional arguments are bound.

    Raises:
        ExpressionError: If the text does not parse or uses a name outside
            the whitelist.
    """

    def __init__(self, text: str, variables: Sequence[str] = ("t", "u")
                 ) -> None:

        self.text = text
        self.variables = tuple(variables)
        for name in self.variables:
            if name in CONSTANTS or name in FUNCTIONS:
                raise ExpressionError(f"Variable name {name!r} is reserved")

        source, self._carets = caret_to_pow(text.strip())
        try:
            tree = ast.parse(source, mode="eval")
        except SyntaxError as e:
            line = e.lineno or 1
            raise ExpressionError(
                f"Invalid syntax in {text!r}: {e.msg}", line,
                self._column(line, (e.offset or 1) - 1)) from e
        self._root = tree.body
        self._fn = self._compile(tree.body)

    def __call__(self, *args: float) -> float:
        if len(args) != len(self.variables):
            raise TypeError(f"Expected {len(self.variables)} arguments "
                            f"{self.variables}, but given {len(args)}")
        env = dict(zip(self.variables, args))
        try:
            return float(self._fn(env))
        except (ArithmeticError, ValueError, TypeError) as e:
            raise self._error(
                self._root,
                f"Cannot evaluate {self.text!r} at {env}: {e}") from e

    def __repr__(self) -> str:
        return f"Expression({self.text!r}, variables={self.variables})"

    def _column(self, line: int, offset: int) -> int:
        """Maps a 0-based column of the rewritten text to a 1-based column
        of the source text."""

        shift = sum(1 for k, col in enumerate(self._carets.get(line, ()))
                    if col + k + 1 < offset)
        return offset - shift + 1

    def _error(self, node: ast.AST, msg: str) -> ExpressionError:
        line = getattr(node, "lineno", 1)
        return ExpressionError(
            msg, line, self._column(line, getattr(node, "col_offset", 0)))

    def _compile(self, node: ast.AST) -> Node:
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(
                    node.value, (int, float)):
                raise self._error(node, f"Unsupported literal {node.value!r}")
            value = float(node.value)
            return lambda env: value

        if isinstance(node, ast.Name):
            name = node.id
            if name in self.variables:
                return lambda env: env[name]
            if name in CONSTANTS:
                value = CONSTANTS[name]
                return lambda env: value
            raise self._error(node, f"Unknown name {name!r}")

        if isinstance(node, ast.BinOp):
            op = BINARY_OPS.get(type(node.op))
            if op is None:
                raise self._error(
                    node, f"Unsupported operator {type(node.op).__name__}")
            left = self._compile(node.left)
            right = self._compile(node.right)
            return lambda env: op(left(env), right(env))

        if isinstance(node, ast.UnaryOp):
            op = UNARY_OPS.get(type(node.op))
            if op is None:
                raise self._error(
                    node, f"Unsupported operator {type(node.op).__name__}")
            operand = self._compile(node.operand)
            return lambda env: op(operand(env))

        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.keywords:
                raise self._error(node, "Only plain function calls allowed")
            name = node.func.id
            if name not in FUNCTIONS:
                raise self._error(node.func, f"Unknown function {name!r}")
            fn, arity = FUNCTIONS[name]
            if len(node.args) != arity:
                raise self._error(
                    node, f"{name} takes {arity} argument(s), but given "
                          f"{len(node.args)}")
            args = [self._compile(arg) for arg in node.args]
            return lambda env: fn(*(arg(env) for arg in args))

        raise self._error(node,
                          f"Unsupported expression {type(node).__name__}")


def compile_expression(text: str, variables: Sequence[str] = ("t", "u")
                       ) -> Expression:
    """Compiles `text` into a callable over `variables`."""

    return Expression(text, variables)
