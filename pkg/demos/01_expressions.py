#!/usr/bin/env python3
"""Scalar expressions: parsing, exact differentiation, evaluation.

All metric data in this package is built from these trees, so derivatives of
any order stay exact (no finite-difference noise in the curvature checks).
"""

import math

from projconn import expr as ex


def main():
    print("parse / print round trip")
    tree = ex.parse("sin(theta)^2")
    print(f"  text  : sin(theta)^2")
    print(f"  tree  : {tree}")
    print(f"  print : {ex.to_text(tree)}")
    print()

    print("exact differentiation")
    d1 = ex.diff(tree, "theta")
    d2 = ex.diff(d1, "theta")
    d3 = ex.diff(d2, "theta")
    print(f"  d/dtheta      : {ex.to_text(d1)}")
    print(f"  d2/dtheta2    : {ex.to_text(d2)}")
    print(f"  d3/dtheta3    : {ex.to_text(d3)}")
    theta = 0.7
    env = {"theta": theta}
    print(f"  at theta={theta}: {ex.evaluate(d1, env):.12f}")
    print(f"  2 sin cos     : {2 * math.sin(theta) * math.cos(theta):.12f}")
    print()

    print("derivative vs central difference")
    f = ex.parse("exp(2*t)/(1+t^2)")
    df = ex.diff(f, "t")
    t = 0.3
    h = 1e-6
    fd = (ex.evaluate(f, {"t": t + h}) - ex.evaluate(f, {"t": t - h})) / (2 * h)
    exact = ex.evaluate(df, {"t": t})
    print(f"  f             = {ex.to_text(f)}")
    print(f"  exact         : {exact:.12f}")
    print(f"  central diff  : {fd:.12f}")
    print(f"  difference    : {abs(exact - fd):.2e}")
    print()

    print("errors carry positions and subexpressions")
    try:
        ex.parse("a +* b")
    except ex.ParseError as err:
        print(f"  parse : {err}")
    try:
        ex.evaluate(ex.parse("1/x"), {"x": 0.0})
    except ex.DomainError as err:
        print(f"  eval  : {err}")


if __name__ == "__main__":
    main()
