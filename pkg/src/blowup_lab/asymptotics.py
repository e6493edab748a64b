"""Leading-order calculus on the scale t^a (log t)^b (log log t)^c.

Constants are dropped throughout: an atom only records the three exponents.
At the zero end an atom ``(a, b, c)`` stands for
``t^a (log 1/t)^b (log log 1/t)^c`` as ``t -> 0+``.

Internally both ends are handled in a variable ``T -> inf`` (``T = t`` at
infinity, ``T = 1/t`` at zero), in which a zero-end atom ``(a, b, c)`` reads
``(-a, b, c)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

__all__ = [
    "AsymptoticAtom",
    "AsymptoticProfile",
    "Convergence",
    "UnsupportedAsymptotics",
    "atom_combine",
    "atom_power",
    "profile_invert",
    "profile_compose",
    "integral_converges_at_infinity",
    "reflect",
    "infer_profile",
    "ONE",
    "IDENTITY",
]


class UnsupportedAsymptotics(ValueError):
    """The requested operation leaves the three-level power-log scale."""


SNAP_DENOMINATOR = 1000
SNAP_TOL = 1e-9


class Convergence(str, enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


def _snap(v: float) -> float:
    # exponents are rational in the inputs; snapping float noise to the nearest
    # small-denominator rational keeps exact thresholds (alpha == -1) exact
    q = Fraction(v).limit_denominator(SNAP_DENOMINATOR)
    if abs(v - float(q)) <= SNAP_TOL * max(1.0, abs(v)):
        return float(q) + 0.0
    return v + 0.0


@dataclass(frozen=True, order=True)
class AsymptoticAtom:
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"atom exponent {name} must be finite, got {v}")
            object.__setattr__(self, name, _snap(v))

    def __mul__(self, other: "AsymptoticAtom") -> "AsymptoticAtom":
        return AsymptoticAtom(self.alpha + other.alpha, self.beta + other.beta, self.gamma + other.gamma)

    def __truediv__(self, other: "AsymptoticAtom") -> "AsymptoticAtom":
        return AsymptoticAtom(self.alpha - other.alpha, self.beta - other.beta, self.gamma - other.gamma)

    def __pow__(self, q: float) -> "AsymptoticAtom":
        q = float(q)
        return AsymptoticAtom(self.alpha * q, self.beta * q, self.gamma * q)

    def dominates(self, other: "AsymptoticAtom") -> bool:
        return self > other

    def is_constant(self) -> bool:
        return self.alpha == 0 and self.beta == 0 and self.gamma == 0

    def trend(self) -> int:
        """+1 if the atom tends to infinity, -1 if to zero, 0 if constant."""
        for v in (self.alpha, self.beta, self.gamma):
            if v > 0:
                return 1
            if v < 0:
                return -1
        return 0

    def to_list(self):
        return [self.alpha, self.beta, self.gamma]

    @classmethod
    def from_list(cls, values) -> "AsymptoticAtom":
        values = list(values)
        if len(values) != 3:
            raise ValueError(f"an atom needs three exponents, got {values!r}")
        return cls(*values)

    def __str__(self):
        return f"({self.alpha:g}, {self.beta:g}, {self.gamma:g})"


ONE = AsymptoticAtom(0.0, 0.0, 0.0)
IDENTITY = AsymptoticAtom(1.0, 0.0, 0.0)
LOG = AsymptoticAtom(0.0, 1.0, 0.0)
LOGLOG = AsymptoticAtom(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class AsymptoticProfile:
    at_zero: AsymptoticAtom
    at_infinity: AsymptoticAtom

    def to_dict(self):
        return {"at_zero": self.at_zero.to_list(), "at_infinity": self.at_infinity.to_list()}

    @classmethod
    def from_dict(cls, data) -> "AsymptoticProfile":
        return cls(AsymptoticAtom.from_list(data["at_zero"]), AsymptoticAtom.from_list(data["at_infinity"]))

    @classmethod
    def power(cls, a: float) -> "AsymptoticProfile":
        atom = AsymptoticAtom(a, 0.0, 0.0)
        return cls(atom, atom)


def atom_combine(a: AsymptoticAtom, b: AsymptoticAtom, op: str = "multiply") -> AsymptoticAtom:
    if op == "multiply":
        return a * b
    if op == "divide":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def atom_power(a: AsymptoticAtom, q: float) -> AsymptoticAtom:
    return a ** q


def profile_invert(pr: AsymptoticProfile) -> AsymptoticProfile:
    """Profile of the functional inverse of an increasing bijection.

    ``t^a L^b LL^c`` inverts to ``s^(1/a) L^(-b/a) LL^(-c/a)`` at either end.
    """
    out = []
    for atom in (pr.at_zero, pr.at_infinity):
        if atom.alpha <= 0:
            raise UnsupportedAsymptotics(
                f"cannot invert atom {atom}: the power exponent must be positive"
            )
        a = atom.alpha
        out.append(AsymptoticAtom(1.0 / a, -atom.beta / a, -atom.gamma / a))
    return AsymptoticProfile(*out)


def reflect(pr: AsymptoticProfile) -> AsymptoticProfile:
    """Profile of ``t -> f(1/t)``."""
    z, i = pr.at_zero, pr.at_infinity
    return AsymptoticProfile(
        AsymptoticAtom(-i.alpha, i.beta, i.gamma),
        AsymptoticAtom(-z.alpha, z.beta, z.gamma),
    )


def _to_T(atom: AsymptoticAtom, end: str) -> AsymptoticAtom:
    return atom if end == "infinity" else AsymptoticAtom(-atom.alpha, atom.beta, atom.gamma)


_from_T = _to_T


def _compose_T(outer: AsymptoticProfile, inner: AsymptoticAtom) -> AsymptoticAtom:
    """Compose with ``inner`` written in the variable ``T -> inf``; result in ``T``."""
    trend = inner.trend()
    if trend == 0:
        # the argument tends to a positive constant, where the outer function is finite
        return ONE
    oa = outer.at_infinity if trend > 0 else outer.at_zero
    # outer is X^A |log X|^B (log|log X|)^G as X tends to its end
    result = inner ** oa.alpha
    if oa.beta == 0 and oa.gamma == 0:
        return result
    a, b, c = inner.alpha, inner.beta, inner.gamma
    if a != 0:
        abs_log, log_abs_log = LOG, LOGLOG
    elif b != 0:
        abs_log, log_abs_log = LOGLOG, None
    else:
        raise UnsupportedAsymptotics(
            f"log of the argument {inner} needs a fourth logarithmic level"
        )
    result = result * abs_log ** oa.beta
    if oa.gamma != 0:
        if log_abs_log is None:
            raise UnsupportedAsymptotics(
                f"log log of the argument {inner} needs a fourth logarithmic level"
            )
        result = result * log_abs_log ** oa.gamma
    return result


def profile_compose(outer: AsymptoticProfile, inner: AsymptoticAtom, inner_end: str = "infinity") -> AsymptoticAtom:
    """Leading atom of ``outer(X(t))`` where ``X`` behaves like ``inner`` as ``t -> inner_end``.

    Routing follows the first non-zero exponent of ``inner``: positive means
    the argument grows (``outer.at_infinity`` is used), negative means it
    decays (``outer.at_zero``).  An argument tending to a positive constant
    gives a constant.
    """
    if inner_end not in ("zero", "infinity"):
        raise ValueError("inner_end must be 'zero' or 'infinity'")
    return _from_T(_compose_T(outer, _to_T(inner, inner_end)), inner_end)


def integral_converges_at_infinity(integrand: AsymptoticAtom) -> Convergence:
    """Classify ``int^inf t^a (log t)^b (log log t)^c dt``."""
    a, b, c = integrand.alpha, integrand.beta, integrand.gamma
    if a < -1 or (a == -1 and b < -1) or (a == -1 and b == -1 and c < -1):
        return Convergence.CONVERGES
    return Convergence.DIVERGES


# ---------------------------------------------------------------------------
# Profiles read off expressions


@dataclass(frozen=True)
class _Term:
    coef: float
    atom: AsymptoticAtom

    def neg(self):
        return _Term(-self.coef, self.atom)


def _greater(x: _Term, y: _Term) -> bool:
    """Eventual order of two leading terms."""
    if (x.coef > 0) != (y.coef > 0):
        return x.coef > 0
    if x.atom != y.atom:
        bigger = x.atom > y.atom
        return bigger if x.coef > 0 else not bigger
    return x.coef > y.coef


def _add(x: Optional[_Term], y: Optional[_Term]) -> Optional[_Term]:
    # None stands for an identically zero term
    if x is None:
        return y
    if y is None:
        return x
    if x.atom == y.atom:
        c = x.coef + y.coef
        if c == 0 and x.atom.is_constant():
            return None
        if c == 0 or abs(c) <= 1e-12 * max(abs(x.coef), abs(y.coef)):
            raise UnsupportedAsymptotics("leading terms cancel; a finer expansion is needed")
        return _Term(c, x.atom)
    return x if x.atom > y.atom else y


def _term(node, end: str) -> Optional[_Term]:
    from .funcdsl import BinOp, Call, Neg, Num, Var

    if isinstance(node, Num):
        return None if node.value == 0 else _Term(node.value, ONE)
    if isinstance(node, Var):
        return _Term(1.0, IDENTITY if end == "infinity" else AsymptoticAtom(-1.0))
    if isinstance(node, Neg):
        t = _term(node.operand, end)
        return None if t is None else t.neg()
    if isinstance(node, BinOp):
        if node.op == "^":
            base = _term(node.left, end)
            if not isinstance(node.right, Num):
                expo = _term(node.right, end)
                if expo is not None and not expo.atom.is_constant():
                    raise UnsupportedAsymptotics("variable exponents leave the power-log scale")
                raise UnsupportedAsymptotics("exponent is not a constant")
            q = node.right.value
            if base is None:
                return None if q > 0 else _Term(1.0, ONE)
            if base.coef <= 0:
                raise UnsupportedAsymptotics("power of a non-positive quantity")
            return _Term(base.coef ** q, base.atom ** q)
        left = _term(node.left, end)
        right = _term(node.right, end)
        if node.op == "+":
            return _add(left, right)
        if node.op == "-":
            return _add(left, None if right is None else right.neg())
        if node.op == "*":
            if left is None or right is None:
                return None
            return _Term(left.coef * right.coef, left.atom * right.atom)
        if right is None:
            raise UnsupportedAsymptotics("division by zero")
        if left is None:
            return None
        return _Term(left.coef / right.coef, left.atom / right.atom)
    if isinstance(node, Call):
        args = [_term(a, end) for a in node.args]
        if node.name in ("min", "max"):
            x, y = args
            if x is None or y is None:
                raise UnsupportedAsymptotics("min/max against zero")
            pick_x = _greater(x, y) if node.name == "max" else _greater(y, x)
            return x if pick_x else y
        (x,) = args
        if node.name == "exp":
            if x is None:
                return _Term(1.0, ONE)
            tr = x.atom.trend()
            if tr == 0:
                return _Term(math.exp(x.coef), ONE)
            if tr < 0:
                return _Term(1.0, ONE)
            if x.coef < 0:
                raise UnsupportedAsymptotics("exponentially small factor is outside the scale")
            raise UnsupportedAsymptotics("exponential growth is outside the power-log scale")
        # log
        if x is None or x.coef <= 0:
            raise UnsupportedAsymptotics("log of a non-positive quantity")
        a, b, c = x.atom.alpha, x.atom.beta, x.atom.gamma
        if a != 0:
            return _Term(a, LOG)
        if b != 0:
            return _Term(b, LOGLOG)
        if c != 0:
            raise UnsupportedAsymptotics("log of a log log needs a fourth level")
        if x.coef == 1:
            raise UnsupportedAsymptotics("log of a quantity tending to 1 needs a finer expansion")
        return _Term(math.log(x.coef), ONE)
    raise TypeError(f"unknown node {node!r}")


def infer_profile(expr) -> AsymptoticProfile:
    """Read the asymptotic profile of a parsed expression at both ends.

    The result has coefficients dropped; a leading coefficient that is not
    positive means the expression is not eventually positive and raises
    :class:`UnsupportedAsymptotics`.
    """
    atoms = {}
    for end in ("zero", "infinity"):
        term = _term(expr.root, end)
        if term is None or term.coef <= 0:
            raise UnsupportedAsymptotics(f"expression is not eventually positive at {end}")
        atoms[end] = _from_T(term.atom, end)
    return AsymptoticProfile(atoms["zero"], atoms["infinity"])
