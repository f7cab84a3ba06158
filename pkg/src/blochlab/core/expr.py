"""Interval evaluation of small closed-form expressions.

Supported: numeric literals (read as exact decimals), the names ``pi`` and
``e``, the operators ``+ - * / **`` (integer exponents), and the functions
``sqrt``, ``exp``, ``log``.
"""

import ast
from fractions import Fraction

from ..errors import ParseError
from .interval import Interval

_FUNCS = {"sqrt": Interval.sqrt, "exp": Interval.exp, "log": Interval.log}


def interval_eval(expression):
    """Return an :class:`Interval` enclosing the exact value of ``expression``.

    >>> interval_eval("0 * (1 + pi)")
    Interval(0.0, 0.0)
    """
    try:
        tree = ast.parse(expression, mode="eval")
    except SyntaxError as exc:
        raise ParseError("invalid expression", expression, (exc.offset or 1) - 1) from None
    return _eval(tree.body, expression)


def _eval(node, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        # the literal's source text, not the float it parsed to
        src = ast.get_source_segment(text, node) or repr(node.value)
        return Interval.enclose(Fraction(src))
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return Interval.pi()
        if node.id == "e":
            return Interval.e()
        raise ParseError(f"unknown name {node.id!r}", text, node.col_offset)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _eval(node.left, text)
            exp = _integer_exponent(node.right, text)
            return base**exp
        a = _eval(node.left, text)
        b = _eval(node.right, text)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if len(node.args) != 1 or node.keywords:
            raise ParseError(f"{node.func.id} takes one argument", text, node.col_offset)
        return _FUNCS[node.func.id](_eval(node.args[0], text))
    raise ParseError("unsupported syntax", text, getattr(node, "col_offset", 0))


def _integer_exponent(node, text):
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        sign, node = -1, node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return sign * node.value
    raise ParseError("exponent must be an integer literal", text, getattr(node, "col_offset", 0))
