"""Normalized cohomology representative bases and the duality matrices.

Builds the strong-harmonic representative set for each degree, normalized
so cycle integrals give the identity, then fills the intersection matrix E,
the star-transfer matrix T, the Gram matrix Lambda and the duality
permutation P, and checks the exact identities relating them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .mesh import (
    CycleSpec,
    DiscreteForm,
    integrate_cycle_mean,
    integrate_manifold,
    wedge,
)

PAIR_TOL = 1e-8


class DualityError(RuntimeError):
    """Raised when the one-nonzero-per-row pairing structure is not resolved."""


@dataclass
class CohomologyBasis:
    degree: int
    betti: int
    gammas: list
    cycles: list
    normalization_residual: float
    d_residual: float = 0.0
    delta_residual: float = 0.0

    @property
    def grid(self):
        return self.gammas[0].grid


def _seed_forms(grid, p):
    """Closed constant seeds dx^I / prod(periods), one per index tuple."""
    seeds = []
    cycles = []
    for I in grid.components_of_degree(p):
        scale = 1.0 / math.prod(grid.spec.periods[a] for a in I)
        seeds.append(grid.constant_form(p, {I: scale}))
        cycles.append(CycleSpec(axes=I))
    return seeds, cycles


def build_basis(grid, p, tol=1e-8, max_projections=3):
    """Representative basis with cycle integrals normalized to the identity.

    Seeds are the constant coordinate forms; on curved metrics each seed
    is harmonically projected (seed -> seed - d(G(delta seed))) until its
    coderivative is below tolerance, then the whole set is renormalized
    by the inverse of the cycle-integral matrix.
    """
    seeds, cycles = _seed_forms(grid, p)
    betti = len(seeds)
    gammas = []
    for seed in seeds:
        gamma = seed
        if p >= 1 and not grid.is_flat:
            for _ in range(max_projections):
                rough = calculus.delta(gamma)
                if rough.norm_inf() <= tol * max(gamma.norm_inf(), 1e-300):
                    break
                alpha, _ = calculus.green_solve(rough, tol=min(tol, 1e-9))
                gamma = gamma - calculus.d(alpha)
        gammas.append(gamma)

    cyc_matrix = np.array(
        [[integrate_cycle_mean(g, z.axes) for z in cycles] for g in gammas]
    )
    if abs(np.linalg.det(cyc_matrix)) < 1e-12:
        raise RuntimeError("seed set is not independent: singular cycle matrix")
    inv = np.linalg.inv(cyc_matrix)
    normalized = []
    for a in range(betti):
        g = grid.zeros(p)
        for b in range(betti):
            g = g + gammas[b] * inv[a, b]
        normalized.append(g)

    norm_res = max(
        (
            abs(integrate_cycle_mean(normalized[a], cycles[b].axes) - (1.0 if a == b else 0.0))
            for a in range(betti)
            for b in range(betti)
        ),
        default=0.0,
    )
    d_res = 0.0
    delta_res = 0.0
    for g in normalized:
        scale = max(g.norm_inf(), 1e-300)
        if p < grid.dim:
            d_res = max(d_res, calculus.d(g).norm_inf() / scale)
        if p > 0:
            delta_res = max(delta_res, calculus.delta(g).norm_inf() / scale)
    return CohomologyBasis(p, betti, normalized, cycles, norm_res, d_res, delta_res)


def matrix_E(basis_p, basis_q, pair_tol=PAIR_TOL):
    """Intersection matrix E_ab = int_M gamma^p_a wedge gamma^{n-p}_b, plus P.

    P is derived from the one-nonzero-per-row rule; an unresolved row
    (two entries above pair_tol relative to the row maximum) is an error.
    """
    grid = basis_p.grid
    if basis_p.degree + basis_q.degree != grid.dim:
        raise ValueError("matrix_E needs complementary degrees")
    beta = basis_p.betti
    E = np.array(
        [
            [integrate_manifold(wedge(ga, gb)) for gb in basis_q.gammas]
            for ga in basis_p.gammas
        ]
    )
    P = np.full(beta, -1, dtype=int)
    for a in range(beta):
        row = np.abs(E[a])
        top = row.max()
        if top == 0.0:
            raise DualityError(f"row {a} of E is identically zero")
        big = np.flatnonzero(row > pair_tol * top)
        if len(big) != 1:
            raise DualityError(
                f"duality not resolved at this resolution: row {a} has "
                f"{len(big)} entries above tolerance"
            )
        P[a] = big[0]
    if sorted(P) != list(range(beta)):
        raise DualityError("pairing permutation is not a bijection")
    return E, P


def matrix_T(basis_p, basis_dual, expansion_tol=1e-6):
    """Star-transfer matrix T^{(n-p)}_ab = cycle integral of star(gamma^p_a).

    Also verifies the expansion star(gamma_a) = sum_b T_ab gamma^{n-p}_b,
    which requires the basis to be strong harmonic enough.
    """
    grid = basis_p.grid
    if basis_p.degree + basis_dual.degree != grid.dim:
        raise ValueError("matrix_T needs complementary degrees")
    stars = [calculus.star(g) for g in basis_p.gammas]
    T = np.array(
        [
            [integrate_cycle_mean(sg, z.axes) for z in basis_dual.cycles]
            for sg in stars
        ]
    )
    worst = 0.0
    for a, sg in enumerate(stars):
        recon = grid.zeros(basis_dual.degree)
        for b, gb in enumerate(basis_dual.gammas):
            recon = recon + gb * T[a, b]
        scale = max(sg.norm_inf(), 1e-300)
        worst = max(worst, (sg - recon).norm_inf() / scale)
    if worst > expansion_tol:
        raise RuntimeError(
            f"star expansion residual {worst:.3e} exceeds {expansion_tol:.1e}: "
            "basis not strong harmonic enough"
        )
    return T


def matrix_Lambda(basis):
    """Gram matrix Lambda_ab = (gamma_a, gamma_b) under the metric pairing."""
    beta = basis.betti
    L = np.zeros((beta, beta))
    for a in range(beta):
        for b in range(a, beta):
            L[a, b] = calculus.pairing(basis.gammas[a], basis.gammas[b])
            L[b, a] = L[a, b]
    return L


@dataclass
class CheckReport:
    """Max-abs residuals of the matrix identities, plus the reality check."""

    tt_residual: float
    et_residual: float
    lel_residual: float
    reality_residual: float
    det_T: float

    def max_residual(self):
        return max(self.tt_residual, self.et_residual, self.lel_residual)


def verify_triple(E, T, Lam, D_parity):
    """Residuals of T.T = (-1)^D I, E T^t = Lambda, Lam E^-1 Lam = (-1)^D E,
    and the determinant reality rule |det T|^2 = (-1)^{beta D}.

    Applies to the middle-dimension (endomorphism) case where a single T
    maps the basis to itself.
    """
    E = np.asarray(E, dtype=float)
    T = np.asarray(T, dtype=float)
    Lam = np.asarray(Lam, dtype=float)
    beta = E.shape[0]
    sgn = -1.0 if D_parity % 2 else 1.0
    eye = np.eye(beta)
    tt = float(np.max(np.abs(T @ T - sgn * eye)))
    et = float(np.max(np.abs(E @ T.T - Lam)))
    if abs(np.linalg.det(E)) < 1e-300:
        raise np.linalg.LinAlgError("singular E matrix")
    lel = float(np.max(np.abs(Lam @ np.linalg.inv(E) @ Lam - sgn * E)))
    det_T = float(np.linalg.det(T))
    reality = abs(det_T**2 - (-1.0) ** ((beta * D_parity) % 2))
    return CheckReport(tt, et, lel, reality, det_T)


def verify_pair(basis_p, basis_dual, pair_tol=PAIR_TOL):
    """Full identity battery for a complementary basis pair.

    Returns a dict of named residuals:
      tt:  T^{(n-p)} T^{(p)} - (-1)^{D(p)} I
      et:  E^{(p)} (T^{(n-p)})^t - Lambda^{(p)}
      e_transpose: E^{(p)} - (-1)^{(n-p)p} (E^{(n-p)})^t
      lambda_sym:  asymmetry of Lambda^{(p)}
    """
    grid = basis_p.grid
    n, p = grid.dim, basis_p.degree
    Dpar = calculus.sign_D(p, n, grid.neg_count)
    E_p, P = matrix_E(basis_p, basis_dual, pair_tol)
    E_q, _ = matrix_E(basis_dual, basis_p, pair_tol)
    T_dual = matrix_T(basis_p, basis_dual)  # T^{(n-p)}
    T_p = matrix_T(basis_dual, basis_p)  # T^{(p)}
    Lam = matrix_Lambda(basis_p)
    sgn = -1.0 if Dpar else 1.0
    eye = np.eye(basis_p.betti)
    flip = (-1.0) ** (((n - p) * p) % 2)
    residuals = {
        "tt": float(np.max(np.abs(T_dual @ T_p - sgn * eye))),
        "et": float(np.max(np.abs(E_p @ T_dual.T - Lam))),
        "e_transpose": float(np.max(np.abs(E_p - flip * E_q.T))),
        "lambda_sym": float(np.max(np.abs(Lam - Lam.T))),
    }
    if p * 2 == n:
        residuals["lel"] = float(
            np.max(np.abs(Lam @ np.linalg.inv(E_p) @ Lam - sgn * E_p))
        )
    matrices = {"E": E_p, "E_dual": E_q, "T_dual": T_dual, "T": T_p, "Lambda": Lam, "P": P}
    return matrices, residuals


def star_proportionality_residual(basis_p, basis_dual, E, P, Lam):
    """Orthogonal-basis corollary: star(gamma_a) = (lambda_a / eps_{a,P(a)}) gamma_{P(a)}.

    Only meaningful when Lambda is diagonal within tolerance.
    """
    worst = 0.0
    for a, g in enumerate(basis_p.gammas):
        target = basis_dual.gammas[P[a]] * (Lam[a, a] / E[a, P[a]])
        worst = max(worst, (calculus.star(g) - target).norm_inf())
    return worst
