"""User phases written as small expressions.

Grammar: identifiers ``x1 x2 xi1 xi2`` (only those of the grid's dimension),
numeric literals, ``+ - * /``, unary minus, ``**`` with a numeric exponent, and
the functions ``abs``, ``sqrt`` and ``norm`` (``norm(a, b, ...)`` is the
Euclidean length of its arguments). The text is checked against this grammar
with :mod:`ast` before anything is built, so nothing is ever evaluated as
Python. Gradients and the mixed Hessian are exact symbolic derivatives.
"""

from __future__ import annotations

import ast

import numpy as np
import sympy as sp

from .fio import Phase

__all__ = ["ExpressionError", "parse_phase", "parse_expression"]


class ExpressionError(ValueError):
    pass


_FUNCS = {
    "abs": lambda *a: sp.Abs(*a),
    "sqrt": lambda *a: sp.sqrt(*a),
    "norm": lambda *a: sp.sqrt(sum(v**2 for v in a)),
}
_ARITY = {"abs": 1, "sqrt": 1}


def _variables(n: int):
    xs = sp.symbols(" ".join(f"x{i + 1}" for i in range(n)), real=True, seq=True)
    xis = sp.symbols(" ".join(f"xi{i + 1}" for i in range(n)), real=True, seq=True)
    return list(xs), list(xis)


def parse_expression(text: str, n: int) -> tuple[sp.Expr, list, list]:
    """Parse ``text`` into a sympy expression over ``x1..xn, xi1..xin``."""
    if n not in (1, 2):
        raise ExpressionError(f"dimension must be 1 or 2, got {n}")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse phase {text!r}: {exc.msg}") from None
    xs, xis = _variables(n)
    names = {str(s): s for s in xs + xis}

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ExpressionError(f"unknown identifier {node.id!r}; allowed: {sorted(names)}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = build(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = build(node.left), build(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            if isinstance(node.op, ast.Pow):
                if not b.is_number:
                    raise ExpressionError("exponents must be numeric")
                return a**b
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            fname = node.func.id
            if fname not in _FUNCS:
                raise ExpressionError(f"unknown function {fname!r}; allowed: abs, sqrt, norm")
            args = [build(a) for a in node.args]
            if not args or (fname in _ARITY and len(args) != _ARITY[fname]):
                raise ExpressionError(f"wrong number of arguments to {fname}")
            return _FUNCS[fname](*args)
        raise ExpressionError(f"unsupported syntax in phase expression: {ast.dump(node)[:60]}")

    return build(tree), xs, xis


def _vectorised(expr, xs, xis):
    fn = sp.lambdify(xs + xis, expr, modules="numpy")
    n = len(xs)

    def call(x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape, xi.shape)[:-1]
        args = [x[..., i] for i in range(n)] + [xi[..., i] for i in range(n)]
        return np.broadcast_to(np.asarray(fn(*args), dtype=float), shape)

    return call


def parse_phase(text: str, n: int) -> Phase:
    """A :class:`Phase` from an expression; homogeneity in ``xi`` is the caller's to check."""
    expr, xs, xis = parse_expression(text, n)
    ev = _vectorised(expr, xs, xis)
    gxi = [_vectorised(sp.diff(expr, v), xs, xis) for v in xis]
    gx = [_vectorised(sp.diff(expr, v), xs, xis) for v in xs]
    hess = [[_vectorised(sp.diff(expr, a, b), xs, xis) for b in xis] for a in xs]

    def stack(funcs):
        return lambda x, xi: np.stack([g(x, xi) for g in funcs], axis=-1)

    def mixed(x, xi):
        return np.stack([np.stack([h(x, xi) for h in row], axis=-1) for row in hess], axis=-2)

    return Phase(text.strip(), ev, grad_xi=stack(gxi), grad_x=stack(gx), mixed_hessian=mixed)
