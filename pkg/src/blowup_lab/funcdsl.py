"""Scalar function expressions over one variable, and monotone functions built on them.

The grammar is a small infix language::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' factor)?
    unary  := '-' unary | base
    base   := number | ident | '(' expr ')' | func '(' expr [',' expr] ')'
    func   := 'log' | 'exp' | 'min' | 'max'

``log`` is the natural logarithm, ``^`` is right associative and binds tighter
than unary minus (``-t^2`` is ``-(t^2)``).  ``e`` and ``pi`` are predefined
constants.  Every other identifier must be either a declared variable or a
parameter supplied at parse time; parameters are folded into numbers, so a
parsed :class:`Expression` never carries symbolic parameters.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "ExpressionError",
    "InversionError",
    "NotMonotoneError",
    "Expression",
    "MonotoneFunction",
    "parse_expression",
    "invert_monotone",
    "invert_log",
    "check_monotone",
    "check_almost_semimultiplicative",
    "is_almost_semimultiplicative",
    "check_quasi_scaling",
    "geometric_grid",
]

CONSTANTS = {"e": math.e, "pi": math.pi}
FUNCTIONS = {"log": 1, "exp": 1, "min": 2, "max": 2}

LOG_T_MIN = math.log(1e-300)
LOG_T_MAX = math.log(1e300)
BRACKET_STEP = math.log(4.0)
MAX_ITER = 1000


class ExpressionError(ValueError):
    """Raised for malformed expressions; ``position`` is the 0-based column."""

    def __init__(self, message: str, position: Optional[int] = None, text: str = ""):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class InversionError(ArithmeticError):
    pass


class NotMonotoneError(ValueError):
    pass


def geometric_grid(lo: float, hi: float, num: int) -> np.ndarray:
    return np.geomspace(lo, hi, num)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, params: Mapping[str, float], variables: Sequence[str]):
        self.text = text
        self.params = params
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {value!r}, found {found}", pos, self.text)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {val!r}", pos, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.advance()
            node = _fold(BinOp(op, node, self.term()), pos, self.text)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.advance()
            node = _fold(BinOp(op, node, self.factor()), pos, self.text)
        return node

    def factor(self):
        base = self.unary()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            _, _, pos = self.advance()
            return _fold(BinOp("^", base, self.factor()), pos, self.text)
        return base

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            _, _, pos = self.advance()
            operand = self.unary()
            # unary minus binds looser than '^'
            if self.peek()[1] == "^" and self.peek()[0] == "op":
                _, _, ppos = self.advance()
                operand = _fold(BinOp("^", operand, self.factor()), ppos, self.text)
            return _fold(Neg(operand), pos, self.text)
        return self.base()

    def base(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if val in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ExpressionError(f"function {val!r} needs an argument list", pos, self.text)
                self.advance()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ExpressionError(
                        f"{val} takes {FUNCTIONS[val]} argument(s), got {len(args)}", pos, self.text
                    )
                return _fold(Call(val, tuple(args)), pos, self.text)
            if val in self.variables:
                return Var(val)
            if val in self.params:
                value = float(self.params[val])
                if not math.isfinite(value):
                    raise ExpressionError(f"parameter {val!r} is not finite", pos, self.text)
                return Num(value)
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            raise ExpressionError(f"unknown identifier {val!r}", pos, self.text)
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {found}", pos, self.text)


def _is_const(node) -> bool:
    return isinstance(node, Num)


def _fold(node, pos: int, text: str):
    """Constant-fold ``node`` when all its children are numbers."""
    if isinstance(node, Neg):
        return Num(-node.operand.value) if _is_const(node.operand) else node
    if isinstance(node, BinOp):
        if not (_is_const(node.left) and _is_const(node.right)):
            if node.op == "/" and _is_const(node.right) and node.right.value == 0:
                raise ExpressionError("division by zero", pos, text)
            return node
        a, b = node.left.value, node.right.value
        if node.op == "/" and b == 0:
            raise ExpressionError("division by zero", pos, text)
        if node.op == "^" and a <= 0 and not float(b).is_integer():
            raise ExpressionError("non-positive base for a fractional power", pos, text)
        return Num(float(_apply_plain(node.op, a, b)))
    if isinstance(node, Call):
        if not all(_is_const(a) for a in node.args):
            return node
        vals = [a.value for a in node.args]
        if node.name == "log" and vals[0] <= 0:
            raise ExpressionError("non-positive literal inside log", pos, text)
        return Num(float(_call_plain(node.name, *vals)))
    return node


def _apply_plain(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    return np.power(a, b)


def _call_plain(name, *args):
    if name == "log":
        return np.log(args[0])
    if name == "exp":
        return np.exp(args[0])
    if name == "min":
        return np.minimum(args[0], args[1])
    return np.maximum(args[0], args[1])


def _eval_plain(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval_plain(node.operand, env)
    if isinstance(node, BinOp):
        return _apply_plain(node.op, _eval_plain(node.left, env), _eval_plain(node.right, env))
    return _call_plain(node.name, *(_eval_plain(a, env) for a in node.args))


# Log-space evaluation: every intermediate value v is carried as (sign(v), log|v|),
# so t itself may be as large as exp(1e300) without overflow.

def _lconst(value, like):
    s = np.full_like(like, np.sign(value))
    l = np.full_like(like, math.log(abs(value)) if value != 0 else -np.inf)
    return s, l


def _lplain(s, l):
    with np.errstate(over="ignore"):
        return s * np.exp(l)


def _lfrom_plain(v):
    with np.errstate(divide="ignore"):
        return np.sign(v), np.log(np.abs(v))


def _lgreater(a, b):
    sa, la = a
    sb, lb = b
    return (sa > sb) | ((sa == sb) & (((sa > 0) & (la > lb)) | ((sa < 0) & (la < lb))))


def _eval_log(node, env):
    x = env["__x__"]
    if isinstance(node, Num):
        return _lconst(node.value, x)
    if isinstance(node, Var):
        return np.ones_like(x), x.copy()
    if isinstance(node, Neg):
        s, l = _eval_log(node.operand, env)
        return -s, l
    if isinstance(node, BinOp):
        sa, la = _eval_log(node.left, env)
        op = node.op
        if op == "^":
            vb = _lplain(*_eval_log(node.right, env))
            with np.errstate(invalid="ignore"):
                l = np.where(vb == 0, 0.0, la * vb)
                s = np.where(sa > 0, 1.0, np.nan)
            return s, l
        sb, lb = _eval_log(node.right, env)
        if op == "*":
            zero = (sa == 0) | (sb == 0)
            return np.where(zero, 0.0, sa * sb), np.where(zero, -np.inf, la + lb)
        if op == "/":
            with np.errstate(invalid="ignore"):
                return np.where(sb == 0, np.nan, sa * sb), la - lb
        if op == "-":
            sb = -sb
        m = np.maximum(la, lb)
        with np.errstate(invalid="ignore", over="ignore"):
            finite_m = np.where(np.isfinite(m), m, 0.0)
            v = sa * np.exp(la - finite_m) + sb * np.exp(lb - finite_m)
            with np.errstate(divide="ignore"):
                l = finite_m + np.log(np.abs(v))
        both_zero = (sa == 0) & (sb == 0)
        return np.where(both_zero, 0.0, np.sign(v)), np.where(both_zero, -np.inf, l)
    name = node.name
    if name in ("min", "max"):
        a = _eval_log(node.args[0], env)
        b = _eval_log(node.args[1], env)
        pick_a = _lgreater(a, b) if name == "max" else _lgreater(b, a)
        return np.where(pick_a, a[0], b[0]), np.where(pick_a, a[1], b[1])
    s, l = _eval_log(node.args[0], env)
    if name == "exp":
        return np.ones_like(l), _lplain(s, l)
    # log: defined only for positive arguments
    with np.errstate(invalid="ignore"):
        l = np.where(s > 0, l, np.nan)
    return _lfrom_plain(l)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _to_text(node, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        if node.value < 0 or "e" in text or "inf" in text:
            text = f"({text})" if node.value < 0 else text
        return text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _to_text(node.operand, 3)
        return f"(-{inner})"
    if isinstance(node, Call):
        return f"{node.name}(" + ", ".join(_to_text(a) for a in node.args) + ")"
    prec = _PREC[node.op]
    if node.op == "^":
        text = f"{_to_text(node.left, prec + 1)}^{_to_text(node.right, prec)}"
    else:
        text = f"{_to_text(node.left, prec)} {node.op} {_to_text(node.right, prec + 1)}"
    if prec < parent_prec:
        text = f"({text})"
    return text


def _uses(node, names) -> bool:
    if isinstance(node, Var):
        return node.name in names
    if isinstance(node, (Num,)):
        return False
    if isinstance(node, Neg):
        return _uses(node.operand, names)
    if isinstance(node, BinOp):
        return _uses(node.left, names) or _uses(node.right, names)
    return any(_uses(a, names) for a in node.args)


@dataclass(frozen=True)
class Expression:
    """A parsed expression in a single independent variable."""

    root: object
    variables: tuple = ("t",)
    source: str = ""

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        env = {name: arr for name in self.variables}
        with np.errstate(all="ignore"):
            out = _eval_plain(self.root, env)
        return np.broadcast_to(np.asarray(out, dtype=float), arr.shape) * 1.0

    def log_eval(self, x):
        """Return log of the value at ``t = exp(x)``; NaN where the value is not positive."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).astype(float)
        env = {"__x__": flat}
        with np.errstate(all="ignore"):
            s, l = _eval_log(self.root, env)
            out = np.where(s > 0, l, np.nan)
        return out.reshape(x.shape) if x.shape else out[0]

    def is_constant(self) -> bool:
        return not _uses(self.root, self.variables)

    def to_string(self) -> str:
        return _to_text(self.root)

    __str__ = to_string

    def check_positive(self, grid=None) -> None:
        """Raise ``ValueError`` unless the expression is finite and positive on ``grid``."""
        grid = geometric_grid(1e-8, 1e8, 1000) if grid is None else np.asarray(grid, float)
        vals = self.log_eval(np.log(grid))
        bad = ~np.isfinite(vals)
        if np.any(bad):
            where = grid[np.argmax(bad)]
            raise ValueError(f"expression {self.to_string()!r} is not positive and finite at t={where:g}")


def parse_expression(
    text: str,
    params: Optional[Mapping[str, float]] = None,
    variables: Sequence[str] = ("t",),
) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    >>> parse_expression("t^(p-1)", {"p": 3})(2.0)
    array(4.)
    """
    params = dict(params or {})
    for name in params:
        if name in CONSTANTS or name in FUNCTIONS or name in variables:
            raise ExpressionError(f"parameter name {name!r} is reserved")
    root = _Parser(text, params, variables).parse()
    return Expression(root, tuple(variables), text)


# ---------------------------------------------------------------------------
# Monotone functions


def _default_log(func):
    def log_func(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.asarray(func(np.exp(x)), dtype=float)
            return np.where(v > 0, np.log(v), np.nan)

    return log_func


@dataclass(frozen=True)
class MonotoneFunction:
    """A positive function of one positive variable.

    ``func`` evaluates the function on arrays; ``log_func`` (optional) maps
    ``log t`` to ``log f(t)`` and is used wherever the plain values could
    overflow.  ``direction`` is ``"increasing"``, ``"decreasing"`` or
    ``"none"``; only increasing functions can be inverted.
    """

    func: Callable
    log_func: Optional[Callable] = None
    expression: Optional[Expression] = None
    profile: Optional[object] = None
    direction: str = "increasing"
    name: str = "f"
    _log: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_log", self.log_func or _default_log(self.func))

    @classmethod
    def from_expression(cls, expr, profile=None, direction="increasing", name="f", params=None,
                        variables=("t",)):
        if isinstance(expr, str):
            expr = parse_expression(expr, params, variables)
        return cls(expr, expr.log_eval, expr, profile, direction, name)

    @classmethod
    def power(cls, exponent: float, name="f"):
        from .asymptotics import AsymptoticAtom, AsymptoticProfile

        a = float(exponent)
        atom = AsymptoticAtom(a, 0.0, 0.0)
        direction = "increasing" if a > 0 else ("decreasing" if a < 0 else "none")
        return cls(
            lambda t: np.power(np.asarray(t, dtype=float), a),
            lambda x: a * np.asarray(x, dtype=float),
            None,
            AsymptoticProfile(atom, atom),
            direction,
            name,
        )

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=float)

    def log(self, x):
        """``log f(exp(x))``."""
        return np.asarray(self._log(np.asarray(x, dtype=float)), dtype=float)

    def with_profile(self, profile) -> "MonotoneFunction":
        return MonotoneFunction(self.func, self.log_func, self.expression, profile, self.direction, self.name)

    def inverse(self, rel_tol: float = 1e-12, name: Optional[str] = None) -> "MonotoneFunction":
        """Numerical inverse, evaluated by :func:`invert_log` on every call."""
        if self.direction != "increasing":
            raise ValueError(f"{self.name} is not declared increasing; cannot invert")
        prof = None
        if self.profile is not None:
            from .asymptotics import profile_invert, UnsupportedAsymptotics

            try:
                prof = profile_invert(self.profile)
            except UnsupportedAsymptotics:
                prof = None

        def log_inv(ly):
            return invert_log(self, ly, rel_tol)

        def inv(y):
            y = np.asarray(y, dtype=float)
            with np.errstate(divide="ignore"):
                return np.exp(log_inv(np.log(y)))

        return MonotoneFunction(inv, log_inv, None, prof, "increasing", name or f"{self.name}_inv")


def invert_log(fn: MonotoneFunction, log_y, rel_tol: float = 1e-12):
    """Solve ``log fn(exp(x)) = log_y`` for ``x``, elementwise.

    The bracket grows by a factor 4 in ``t`` from ``t = 1`` and is refined by
    bisection, then by Illinois-type secant steps.  The stopping rule is
    ``|fn(t) - y| <= rel_tol * y``; when the bracket shrinks to adjacent
    floating-point numbers first, the better endpoint is returned.
    """
    ly = np.asarray(log_y, dtype=float)
    shape = ly.shape
    ly = ly.ravel().astype(float)
    if np.any(~np.isfinite(ly)):
        raise InversionError("target value must be positive and finite")
    tol = math.log1p(rel_tol)

    out = np.empty_like(ly)
    target = ly
    f0 = fn.log(np.zeros_like(ly)) - target
    if np.any(np.isnan(f0)):
        raise InversionError(f"{fn.name} is not positive at t=1")

    lo = np.zeros_like(ly)
    hi = np.zeros_like(ly)
    flo = f0.copy()
    fhi = f0.copy()
    for direction in (1.0, -1.0):
        # direction +1 walks up while f < y, -1 walks down while f > y
        moving = (f0 < 0) if direction > 0 else (f0 > 0)
        cur = np.zeros_like(ly)
        fcur = f0.copy()
        while np.any(moving):
            idx = np.flatnonzero(moving)
            nxt = cur[idx] + direction * BRACKET_STEP
            if np.any(nxt > LOG_T_MAX) or np.any(nxt < LOG_T_MIN):
                raise InversionError(f"bracket not found for {fn.name} within [1e-300, 1e300]")
            fv = fn.log(nxt) - target[idx]
            if np.any(np.isnan(fv)):
                raise InversionError(f"{fn.name} is not finite while bracketing")
            done = (fv >= 0) if direction > 0 else (fv <= 0)
            d = idx[done]
            if direction > 0:
                lo[d], flo[d], hi[d], fhi[d] = cur[d], fcur[d], nxt[done], fv[done]
            else:
                lo[d], flo[d], hi[d], fhi[d] = nxt[done], fv[done], cur[d], fcur[d]
            cur[idx] = nxt
            fcur[idx] = fv
            moving[d] = False

    # exact hits at a bracket end
    res = np.where(np.abs(flo) <= np.abs(fhi), lo, hi)
    fres = np.where(np.abs(flo) <= np.abs(fhi), flo, fhi)
    active = np.abs(fres) > tol
    side = np.zeros_like(ly)  # Illinois bookkeeping: +1 hi kept twice, -1 lo kept twice
    flo_w = flo.copy()
    fhi_w = fhi.copy()
    for it in range(MAX_ITER):
        if not np.any(active):
            break
        a = np.flatnonzero(active)
        width = hi[a] - lo[a]
        with np.errstate(invalid="ignore", divide="ignore"):
            sec = lo[a] - flo_w[a] * width / (fhi_w[a] - flo_w[a])
        use_bisect = (width > 1e-3) | ~np.isfinite(sec) | (sec <= lo[a]) | (sec >= hi[a])
        xm = np.where(use_bisect, 0.5 * (lo[a] + hi[a]), sec)
        fm = fn.log(xm) - target[a]
        if np.any(np.isnan(fm)):
            raise InversionError(f"{fn.name} is not finite inside the bracket")
        res[a] = xm
        fres[a] = fm
        neg = fm <= 0
        # replace lo
        ia = a[neg]
        lo[ia] = xm[neg]
        flo[ia] = fm[neg]
        flo_w[ia] = fm[neg]
        fhi_w[ia] = np.where(side[ia] > 0, 0.5 * fhi_w[ia], fhi_w[ia])
        side[ia] = 1
        ib = a[~neg]
        hi[ib] = xm[~neg]
        fhi[ib] = fm[~neg]
        fhi_w[ib] = fm[~neg]
        flo_w[ib] = np.where(side[ib] < 0, 0.5 * flo_w[ib], flo_w[ib])
        side[ib] = -1
        collapsed = (hi[a] - lo[a]) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xm))
        if np.any(collapsed):
            ic = a[collapsed]
            pick_lo = np.abs(flo[ic]) <= np.abs(fhi[ic])
            res[ic] = np.where(pick_lo, lo[ic], hi[ic])
            fres[ic] = np.where(pick_lo, flo[ic], fhi[ic])
        active[a] = (np.abs(fm) > tol) & ~collapsed
    else:
        raise InversionError(f"tolerance {rel_tol:g} not reached in {MAX_ITER} iterations for {fn.name}")
    out[:] = res
    return out[0] if shape == () else out.reshape(shape)


def invert_monotone(fn: MonotoneFunction, y, rel_tol: float = 1e-12):
    """Return ``t`` with ``|fn(t) - y| <= rel_tol * y`` for an increasing ``fn``."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise InversionError("y must be positive")
    x = invert_log(fn, np.log(y), rel_tol)
    return np.exp(x)


def check_monotone(fn: MonotoneFunction, lo: float = 1e-8, hi: float = 1e8, num: int = 1000,
                   min_ratio: float = 1e6) -> None:
    """Sampled check that ``fn`` is a strictly increasing bijection of (0, inf).

    Raises :class:`NotMonotoneError` on failure.
    """
    grid = geometric_grid(lo, hi, num)
    lv = fn.log(np.log(grid))
    if np.any(~np.isfinite(lv)):
        raise NotMonotoneError(f"{fn.name} is not positive and finite on [{lo:g}, {hi:g}]")
    d = np.diff(lv)
    if np.any(d <= 0):
        k = int(np.argmax(d <= 0))
        raise NotMonotoneError(f"{fn.name} is not strictly increasing near t={grid[k]:g}")
    if lv[-1] - lv[0] < math.log(min_ratio):
        raise NotMonotoneError(
            f"{fn.name} does not escape to 0 and infinity: f({hi:g})/f({lo:g}) < {min_ratio:g}"
        )


def _finite_excluded(values, what):
    bad = ~np.isfinite(values)
    n = int(np.count_nonzero(bad))
    if n:
        warnings.warn(f"{what}: {n} grid point(s) overflowed or underflowed and were excluded",
                      RuntimeWarning, stacklevel=3)
    return values[~bad], n


def check_almost_semimultiplicative(fn: MonotoneFunction, grid=None) -> float:
    """Infimum of ``fn(t1) fn(t2) / fn(t1 t2)`` over the product of ``grid`` with itself.

    The default grid is 41 geometric points on [1e-4, 1e4].  Ratios are
    formed in log space; points whose logarithm is not finite are excluded
    with a ``RuntimeWarning`` giving their count.
    """
    grid = geometric_grid(1e-4, 1e4, 41) if grid is None else np.asarray(grid, dtype=float)
    x = np.log(grid)
    x1, x2 = np.meshgrid(x, x)
    with np.errstate(invalid="ignore"):
        lr = fn.log(x1) + fn.log(x2) - fn.log(x1 + x2)
    lr, _ = _finite_excluded(lr.ravel(), f"semi-multiplicativity check of {fn.name}")
    if lr.size == 0:
        return float("nan")
    with np.errstate(under="ignore"):
        return float(np.exp(lr.min()))


def is_almost_semimultiplicative(fn: MonotoneFunction, lo: float = 1e-4, hi: float = 1e4,
                                 num: int = 41, floor: float = 1e-6, stability: float = 0.1) -> bool:
    """Pass when the grid infimum is at least ``floor`` and moves by less than
    ``stability`` (relative) when the grid density is doubled."""
    c1 = check_almost_semimultiplicative(fn, geometric_grid(lo, hi, num))
    c2 = check_almost_semimultiplicative(fn, geometric_grid(lo, hi, 2 * num - 1))
    if not (np.isfinite(c1) and np.isfinite(c2)) or min(c1, c2) < floor:
        return False
    return abs(c2 - c1) <= stability * c1


def check_quasi_scaling(fn: MonotoneFunction, c: float, grid=None):
    """Return ``(inf, sup)`` of ``fn(c t) / fn(t)`` over ``grid``."""
    if c <= 0:
        raise ValueError("scaling factor must be positive")
    grid = geometric_grid(1e-4, 1e4, 401) if grid is None else np.asarray(grid, dtype=float)
    x = np.log(grid)
    with np.errstate(invalid="ignore"):
        lr = fn.log(x + math.log(c)) - fn.log(x)
    nan = np.isnan(lr)
    if np.any(nan):
        warnings.warn(f"quasi-scaling check of {fn.name}: {int(nan.sum())} point(s) excluded",
                      RuntimeWarning, stacklevel=2)
        lr = lr[~nan]
    with np.errstate(over="ignore", under="ignore"):
        return float(np.exp(lr.min())), float(np.exp(lr.max()))
