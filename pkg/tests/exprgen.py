"""Seeded random expression generator used by the parser/derivative tests.

Trees are built from the same grammar the parser accepts.  A generated
(expression, point) pair is only kept when every evaluation needed by the
central-difference stencil stays inside function domains and below a
magnitude bound, so the finite-difference oracle is numerically meaningful.
"""

from __future__ import annotations

import numpy as np

from projconn import expr as ex

VARIABLES = ("x", "y")
FUNCS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")


def random_expr(rng: np.random.Generator, depth: int) -> ex.Expr:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.55:
            return ex.Var(VARIABLES[int(rng.integers(len(VARIABLES)))])
        return ex.Const(round(float(rng.uniform(0.2, 2.5)), 3))
    kind = int(rng.integers(7))
    if kind == 0:
        return ex.Add(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == 1:
        return ex.Sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == 2:
        return ex.Mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == 3:
        return ex.Div(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == 4:
        return ex.Neg(random_expr(rng, depth - 1))
    if kind == 5:
        return ex.Pow(random_expr(rng, depth - 1), int(rng.integers(1, 4)))
    return ex.Call(FUNCS[int(rng.integers(len(FUNCS)))], random_expr(rng, depth - 1))


def central_difference(tree: ex.Expr, var: str, env: dict, h: float = 1e-6) -> float:
    hi = dict(env)
    lo = dict(env)
    hi[var] = env[var] + h
    lo[var] = env[var] - h
    return (ex.evaluate(tree, hi) - ex.evaluate(tree, lo)) / (2.0 * h)


def _stencil_ok(tree: ex.Expr, var: str, env: dict, bound: float = 100.0) -> bool:
    try:
        for shift in (-1e-6, 0.0, 1e-6):
            probe = dict(env)
            probe[var] = env[var] + shift
            if abs(ex.evaluate(tree, probe)) > bound:
                return False
        return True
    except ex.EvalError:
        return False


def seeded_pairs(count: int, seed: int, depth: int = 4):
    """Yield `count` (expression, env) pairs safe for the derivative oracle."""
    rng = np.random.default_rng(seed)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError("expression generator failed to converge")
        tree = random_expr(rng, depth)
        env = {v: float(rng.uniform(0.4, 1.6)) for v in VARIABLES}
        if not _stencil_ok(tree, "x", env):
            continue
        derivative = ex.diff(tree, "x")
        try:
            d_val = ex.evaluate(derivative, env)
        except ex.EvalError:
            continue
        if abs(d_val) > 1e6:
            continue
        produced += 1
        yield tree, env
