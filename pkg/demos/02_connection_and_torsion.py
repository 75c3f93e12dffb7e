#!/usr/bin/env python3
"""The projective semi-symmetric connection next to the metric one.

Shows the coefficient shift built from the lowered unit field, the torsion
it creates, the non-metricity computed two independent ways, and the shared
geodesics (the quadratic spray difference is radial).
"""

import numpy as np

from projconn.catalog import builtin
from projconn.connections import (
    LEVI_CIVITA,
    PROJECTIVE,
    connection_at,
    nonmetricity_at,
    torsion_at,
)
from projconn.geometry import metric_at, sample


def main():
    spec = builtin("euclidean3").spec
    origin = (0.0, 0.0, 0.0)
    lc = connection_at(spec, LEVI_CIVITA, origin, order=0)
    pr = connection_at(spec, PROJECTIVE, origin, order=0)
    print("flat chart, unit field along the first axis (n = 3)")
    print(f"  metric coefficients vanish: max |Gamma| = {np.max(np.abs(lc.Gamma)):.1e}")
    print(f"  shifted coefficients: Gamma~[2,2,1] = {pr.Gamma[1, 1, 0]:+.4f} (= n/(n+1))")
    print(f"                        Gamma~[2,1,2] = {pr.Gamma[1, 0, 1]:+.4f} (= -1/(n+1))")
    print()

    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    print("torsion T(X, Y) = pi(Y) X - pi(X) Y")
    print(f"  T(e1, e2) = {torsion_at(spec, origin, e1, e2)}")
    print(f"  T(X, X)   = {torsion_at(spec, origin, e2, e2)}")
    print()

    print("non-metricity, closed form vs direct differentiation")
    value = nonmetricity_at(spec, origin, e1, e1, e1)
    print(f"  (grad~_xi g)(xi, xi): closed {value.closed_form:+.6f}, "
          f"direct {value.direct:+.6f}, discrepancy {value.discrepancy:.1e}")
    print()

    spec = builtin("cylinder_s2xr").spec
    print("shared geodesics on the sphere-times-line chart")
    samples = sample(spec, 3, seed=2)
    for idx in range(samples.count):
        point = samples.points[idx]
        V = samples.frames[idx, 0]
        lc = connection_at(spec, LEVI_CIVITA, point, order=0)
        pr = connection_at(spec, PROJECTIVE, point, order=0)
        diff = np.einsum("kij,i,j->k", pr.Gamma - lc.Gamma, V, V)
        radial = (float(diff @ V) / float(V @ V)) * V
        pi = metric_at(spec, point, order=0).G @ np.array([0.0, 0.0, 1.0])
        factor = (spec.n - 1) / (spec.n + 1) * float(pi @ V)
        print(f"  point {np.round(point, 3)}: cross-component residual "
              f"{np.max(np.abs(diff - radial)):.1e}, radial factor {factor:+.4f}")


if __name__ == "__main__":
    main()
