"""Curvature tensors for both connections and everything derived from them:
Ricci data, the theta/beta difference tensors, projective curvature, the
curvature-as-derivation action, quasi-Einstein decomposition and nullity
fitting.

Sign conventions (fixed here, validated by the flat-space two-path check):

* ``R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z``, so in coordinates

      R[l,i,j,k] = d_i Gamma[l,j,k] - d_j Gamma[l,i,k]
                   + Gamma[l,i,m] Gamma[m,j,k] - Gamma[l,j,m] Gamma[m,i,k]

  which is valid for the torsionful connection as well since coordinate
  fields commute.
* lowered form ``Rlow[i,j,k,l] = g[l,m] R[m,i,j,k]``,
* Ricci contraction on the first slot: ``S[j,k] = R[i,i,j,k]``,
* the scale of the projective connection's curvature shift is
  ``lam = -n^2/(n+1)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import geometry
from .geometry import GateError, ManifoldSpec, metric_at
from .connections import (
    LEVI_CIVITA,
    PROJECTIVE,
    connection_at,
)

__all__ = [
    "CurvatureValue",
    "RicciValue",
    "ThetaBeta",
    "QuasiEinsteinFit",
    "NullityFit",
    "lam_scale",
    "riemann_at",
    "rtilde_closed_form",
    "theta_beta_at",
    "ricci_at",
    "ricci_with_partials",
    "nabla_curvature",
    "projective_at",
    "derivation_apply",
    "derivation_all_frames",
    "quasi_einstein_fit",
    "nullity_fit",
]


def lam_scale(n: int) -> float:
    """The nullity scale of the projective connection, -n^2/(n+1)^2."""
    return -(n * n) / float((n + 1) * (n + 1))


@dataclass
class CurvatureValue:
    kind: str
    point: tuple[float, ...]
    R: np.ndarray  # R[l,i,j,k]
    Rlow: np.ndarray  # Rlow[i,j,k,l] = g[l,m] R[m,i,j,k]
    dR: np.ndarray | None = None  # dR[m,l,i,j,k]


@dataclass
class RicciValue:
    point: tuple[float, ...]
    S: np.ndarray
    S_tilde: np.ndarray
    r: float
    r_tilde: float
    lam: float
    ricci_shift_residual: float
    scalar_shift_residual: float


@dataclass
class ThetaBeta:
    theta: np.ndarray
    beta: np.ndarray


@dataclass
class QuasiEinsteinFit:
    a: float
    b: float
    eigenvalues: np.ndarray
    residual: float
    multiplicity_ok: bool
    is_quasi_einstein: bool


@dataclass
class NullityFit:
    k: float
    residual: float
    residual_mean: float


# ---------------------------------------------------------------------------
# curvature from coefficients


def _riemann_components(Gamma: np.ndarray, dGamma: np.ndarray) -> np.ndarray:
    term_a = dGamma.transpose(1, 0, 2, 3)  # [l,i,j,k] = d_i Gamma[l,j,k]
    term_b = dGamma.transpose(1, 2, 0, 3)  # [l,i,j,k] = d_j Gamma[l,i,k]
    quad_a = np.einsum("lim,mjk->lijk", Gamma, Gamma)
    quad_b = np.einsum("ljm,mik->lijk", Gamma, Gamma)
    return term_a - term_b + quad_a - quad_b


def _riemann_partials(
    Gamma: np.ndarray, dGamma: np.ndarray, d2Gamma: np.ndarray
) -> np.ndarray:
    """dR[m,l,i,j,k] by differentiating the coordinate formula exactly."""
    term_a = d2Gamma.transpose(0, 2, 1, 3, 4)  # [m,l,i,j,k] = d_m d_i Gamma[l,j,k]
    term_b = d2Gamma.transpose(0, 2, 3, 1, 4)  # [m,l,i,j,k] = d_m d_j Gamma[l,i,k]
    quad = (
        np.einsum("mlip,pjk->mlijk", dGamma, Gamma, optimize=True)
        + np.einsum("lip,mpjk->mlijk", Gamma, dGamma, optimize=True)
        - np.einsum("mljp,pik->mlijk", dGamma, Gamma, optimize=True)
        - np.einsum("ljp,mpik->mlijk", Gamma, dGamma, optimize=True)
    )
    return term_a - term_b + quad


def riemann_at(spec: ManifoldSpec, conn_kind: str, point, order: int = 0) -> CurvatureValue:
    """Curvature of the requested connection; order >= 1 fills dR."""
    conn = connection_at(spec, conn_kind, point, order=order + 1)
    R = _riemann_components(conn.Gamma, conn.dGamma)
    G = metric_at(spec, point, order=0).G
    Rlow = np.einsum("lm,mijk->ijkl", G, R)
    dR = None
    if order >= 1:
        dR = _riemann_partials(conn.Gamma, conn.dGamma, conn.d2Gamma)
    return CurvatureValue(conn_kind, conn.point, R, Rlow, dR)


def nabla_curvature(spec: ManifoldSpec, conn_kind: str, point) -> np.ndarray:
    """Covariant derivative of the curvature tensor with respect to its own
    connection: out[m,l,i,j,k] = (D_m R)[l,i,j,k]."""
    conn = connection_at(spec, conn_kind, point, order=2)
    R = _riemann_components(conn.Gamma, conn.dGamma)
    dR = _riemann_partials(conn.Gamma, conn.dGamma, conn.d2Gamma)
    Gamma = conn.Gamma
    return (
        dR
        + np.einsum("lmp,pijk->mlijk", Gamma, R, optimize=True)
        - np.einsum("pmi,lpjk->mlijk", Gamma, R, optimize=True)
        - np.einsum("pmj,lipk->mlijk", Gamma, R, optimize=True)
        - np.einsum("pmk,lijp->mlijk", Gamma, R, optimize=True)
    )


def rtilde_closed_form(spec: ManifoldSpec, point, X, Y, Z) -> np.ndarray:
    """Independent route to the projective connection's curvature on a
    parallel-unit-field chart: R(X,Y)Z + lam {pi(X)pi(Z) Y - pi(Y)pi(Z) X}."""
    if not spec.parallel_xi_expected:
        raise GateError(
            f"chart {spec.name!r} declares a non-parallel field; the closed "
            "form requires the parallel-unit-field hypothesis"
        )
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    lc = riemann_at(spec, LEVI_CIVITA, point)
    pi = geometry.pi_at(spec, point).components
    lam = lam_scale(spec.n)
    base = np.einsum("lijk,i,j,k->l", lc.R, X, Y, Z)
    px, py, pz = float(pi @ X), float(pi @ Y), float(pi @ Z)
    return base + lam * (px * pz * Y - py * pz * X)


# ---------------------------------------------------------------------------
# theta / beta difference tensors


def theta_beta_at(spec: ManifoldSpec, point) -> ThetaBeta:
    """The (0,2) tensors through which the two curvatures differ:

        R~(X,Y)Z = R(X,Y)Z + beta(X,Y) Z + theta(X,Z) Y - theta(Y,Z) X

    with theta(X,Y) = (grad_X a)(Y) - a(X)a(Y) for the symmetric-part form
    a = phi + psi = n/(n+1) pi, and beta the antisymmetrized gradient of the
    torsion-part form psi - phi = -1/(n+1) pi.  (The antisymmetric piece must
    be built from psi - phi for the reconstruction above to hold; with a
    parallel unit field both forms are parallel and beta vanishes.)
    """
    env = spec.env(point)
    mv = metric_at(spec, point, order=1)
    xi = spec.tables.values("xi", 0, env)
    pi = mv.G @ xi
    dpi = spec.tables.values("pi", 1, env)
    conn = connection_at(spec, LEVI_CIVITA, point, order=0)
    nabla_pi = dpi - np.einsum("pmi,p->mi", conn.Gamma, pi)
    n = spec.n
    a_coef = n / (n + 1.0)
    b_coef = -1.0 / (n + 1.0)
    grad_a = a_coef * nabla_pi
    theta = grad_a - (a_coef**2) * np.einsum("i,j->ij", pi, pi)
    grad_b = b_coef * nabla_pi
    beta = grad_b - grad_b.T
    return ThetaBeta(theta=theta, beta=beta)


# ---------------------------------------------------------------------------
# Ricci data


def _ricci_from(R: np.ndarray) -> np.ndarray:
    return np.einsum("iijk->jk", R)


def ricci_at(spec: ManifoldSpec, point) -> RicciValue:
    """Ricci tensors and scalars of both connections, with the shift
    identities S~ = S - lam (n-1) pi x pi and r~ = r - lam (n-1) re-verified
    as residuals."""
    lc = riemann_at(spec, LEVI_CIVITA, point)
    pr = riemann_at(spec, PROJECTIVE, point)
    mv = metric_at(spec, point, order=0)
    pi = mv.G @ spec.tables.values("xi", 0, spec.env(point))
    n = spec.n
    lam = lam_scale(n)
    S = _ricci_from(lc.R)
    S_tilde = _ricci_from(pr.R)
    r = float(np.einsum("jk,jk->", mv.G_inv, S))
    r_tilde = float(np.einsum("jk,jk->", mv.G_inv, S_tilde))
    shift = S - lam * (n - 1) * np.einsum("j,k->jk", pi, pi)
    ricci_shift_residual = float(np.max(np.abs(S_tilde - shift)))
    scalar_shift_residual = abs(r_tilde - (r - lam * (n - 1)))
    return RicciValue(
        lc.point, S, S_tilde, r, r_tilde, lam,
        ricci_shift_residual, scalar_shift_residual,
    )


def ricci_with_partials(spec: ManifoldSpec, conn_kind: str, point):
    """(S, dS) for one connection, dS[m,j,k] = d_m S[j,k], exact partials."""
    cv = riemann_at(spec, conn_kind, point, order=1)
    return _ricci_from(cv.R), np.einsum("miijk->mjk", cv.dR)


# ---------------------------------------------------------------------------
# projective curvature and the derivation action


def projective_at(spec: ManifoldSpec, conn_kind: str, point) -> np.ndarray:
    """Weyl projective curvature of the requested connection as a (1,3)
    array P[l,i,j,k] = R[l,i,j,k] - (S[j,k] d^l_i - S[i,k] d^l_j)/(n-1)."""
    spec.require_dimension_above_two()
    cv = riemann_at(spec, conn_kind, point)
    S = _ricci_from(cv.R)
    n = spec.n
    eye = np.eye(n)
    return cv.R - (
        np.einsum("jk,li->lijk", S, eye) - np.einsum("ik,lj->lijk", S, eye)
    ) / (n - 1.0)


def derivation_apply(spec: ManifoldSpec, point, X, Y, T, conn_kind: str) -> np.ndarray:
    """(R(X,Y) . T) for a (1,3) tensor T: the endomorphism R(X,Y) acts on the
    output slot and is subtracted from each input slot."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    T = np.asarray(T, dtype=float)
    cv = riemann_at(spec, conn_kind, point)
    A = np.einsum("lijm,i,j->lm", cv.R, X, Y)
    return _derive_with_endomorphism(A, T)


def _derive_with_endomorphism(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    return (
        np.einsum("lm,mzuv->lzuv", A, T, optimize=True)
        - np.einsum("lmuv,mz->lzuv", T, A, optimize=True)
        - np.einsum("lzmv,mu->lzuv", T, A, optimize=True)
        - np.einsum("lzum,mv->lzuv", T, A, optimize=True)
    )


def derivation_all_frames(R_acting: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Derivation action for every coordinate pair at once:
    out[a,b,l,z,u,v] = (R(e_a, e_b) . T)[l,z,u,v]."""
    A = np.einsum("lijm->ijlm", R_acting)  # A[a,b,l,m] = R[l,a,b,m]
    return (
        np.einsum("ablm,mzuv->ablzuv", A, T, optimize=True)
        - np.einsum("lmuv,abmz->ablzuv", T, A, optimize=True)
        - np.einsum("lzmv,abmu->ablzuv", T, A, optimize=True)
        - np.einsum("lzum,abmv->ablzuv", T, A, optimize=True)
    )


# ---------------------------------------------------------------------------
# fits


def quasi_einstein_fit(
    S: np.ndarray, G: np.ndarray, pi: np.ndarray, b_tol: float = 1e-8
) -> QuasiEinsteinFit:
    """Least-squares (a, b) with S ~ a g + b pi x pi over the independent
    (upper triangle) components, plus the eigenvalue picture of the Ricci
    operator: one eigenvalue of multiplicity n-1 and a simple one shifted by
    b |pi|^2 (the norm taken with the metric, 1 for a unit generator)."""
    pi = np.asarray(pi, dtype=float)
    if float(np.max(np.abs(pi))) == 0.0:
        raise ValueError("the 1-form must be nonzero for a quasi-Einstein fit")
    n = G.shape[0]
    rows = []
    targets = []
    for i in range(n):
        for j in range(i, n):
            rows.append([G[i, j], pi[i] * pi[j]])
            targets.append(S[i, j])
    coeffs, _, _, _ = np.linalg.lstsq(np.array(rows), np.array(targets), rcond=None)
    a, b = float(coeffs[0]), float(coeffs[1])
    model = a * G + b * np.einsum("i,j->ij", pi, pi)
    residual = float(np.max(np.abs(S - model)))
    eigenvalues = np.sort(scipy.linalg.eigh(S, G, eigvals_only=True))
    pi_norm2 = float(pi @ np.linalg.solve(G, pi))
    expected_simple = a + b * pi_norm2
    scale = 1.0 + max(abs(a), abs(expected_simple))
    near_a = np.abs(eigenvalues - a) <= 1e-6 * scale
    near_s = np.abs(eigenvalues - expected_simple) <= 1e-6 * scale
    if abs(b) * pi_norm2 <= 1e-6 * scale:
        multiplicity_ok = bool(np.all(near_a))
    else:
        multiplicity_ok = int(np.sum(near_a)) == n - 1 and int(np.sum(near_s)) == 1
    is_quasi_einstein = abs(b) > b_tol and residual <= 1e-8 * (1.0 + float(np.max(np.abs(S))))
    return QuasiEinsteinFit(a, b, eigenvalues, residual, multiplicity_ok, is_quasi_einstein)


def nullity_fit(spec: ManifoldSpec, conn_kind: str, samples) -> NullityFit:
    """Scalar least squares for the nullity constant of the distinguished
    field: R(X,Y)xi ~ k {pi(X) Y - pi(Y) X} over all sampled frame pairs.

    The comparison pattern is oriented so that, for the projective connection
    on a parallel-unit-field chart, the fitted constant equals
    lam = -n^2/(n+1)^2.
    """
    if conn_kind == PROJECTIVE and not spec.parallel_xi_expected:
        raise GateError(
            "nullity fit for the projective connection needs the "
            "parallel-unit-field hypothesis"
        )
    num = 0.0
    den = 0.0
    per_point = []
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    cached = []
    for s in range(samples.count):
        point = samples.points[s]
        cv = riemann_at(spec, conn_kind, point)
        pi = geometry.pi_at(spec, point).components
        xi = spec.tables.values("xi", 0, spec.env(point))
        lhs_all = np.einsum("lijk,k->lij", cv.R, xi)
        for ia, ib in pairs:
            X = samples.frames[s, ia]
            Y = samples.frames[s, ib]
            v = np.einsum("lij,i,j->l", lhs_all, X, Y)
            w = float(pi @ X) * Y - float(pi @ Y) * X
            num += float(v @ w)
            den += float(w @ w)
            cached.append((v, w))
    k = num / den if den > 0.0 else 0.0
    residuals = [float(np.max(np.abs(v - k * w))) for v, w in cached]
    return NullityFit(
        k=k,
        residual=max(residuals),
        residual_mean=float(np.mean(residuals)),
    )
