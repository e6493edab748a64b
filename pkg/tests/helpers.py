"""Spec builders shared by the test modules."""
import numpy as np

from blowup_lab import MonotoneFunction, ProblemSpec, parse_expression, power_log_phi
from blowup_lab.funcdsl import geometric_grid

STANDARD_GRID = geometric_grid(1e-8, 1e8, 1000)


def power(a, name="f"):
    return MonotoneFunction.power(a, name)


def expr_fn(text, name="f", direction="increasing", variables=("t",)):
    return MonotoneFunction.from_expression(parse_expression(text, variables=variables),
                                            direction=direction, name=name)


def with_inferred_profile(fn):
    from blowup_lab import infer_profile

    return fn.with_profile(infer_profile(fn.expression))


def power_spec(p, lam, s, n=3, r0=1.0):
    """phi = t^(p-1), g = t^lam, f = r^s."""
    return ProblemSpec(n, power(p - 1.0, "phi"), power(lam, "g"), power(s, "f"), r0=r0)


def power_log_spec(p, nu, s, n=3):
    """phi ~ t^(p-1) log^nu t, g = t^(p-1), f = r^s."""
    return ProblemSpec(n, power_log_phi(p, nu), power(p - 1.0, "g"), power(s, "f"))


def log_close(a, b, rel):
    """Elementwise relative closeness of positive arrays, checked on logs."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.all(np.abs(np.expm1(np.log(a) - np.log(b))) <= rel)
