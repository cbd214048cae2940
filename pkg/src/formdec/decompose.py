"""Hodge decomposition with cohomology term and residue, the dual cycle
integrals, the cross relations between them, the compact even-dimension
block form, and the quantized norm budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import calculus
from .calculus import DEFAULT_ORDER, sign_C, sign_D
from .mesh import DiscreteForm, integrate_cycle_mean


@dataclass
class Decomposition:
    """phi = d(alpha) + delta(beta) + sum_a u_a gamma_a + residue."""

    alpha: object  # (p-1)-form or None when p = 0
    beta: object  # (p+1)-form or None when p = n
    u: np.ndarray
    residue: DiscreteForm
    reconstruction_error: float


def hodge_decompose(phi, basis, tol=1e-10, order=DEFAULT_ORDER, kernel_lo=None, kernel_hi=None):
    """Decompose a p-form against a degree-p representative basis.

    alpha solves Delta(alpha) = delta(phi) at degree p-1, beta solves
    Delta(beta) = d(phi) at degree p+1, u holds the cycle integrals of
    phi, and the residue is whatever remains after subtraction.
    """
    grid = phi.grid
    p = phi.degree
    if basis.degree != p:
        raise ValueError("basis degree must match the form degree")

    alpha = None
    beta = None
    recon = grid.zeros(p)
    if p > 0:
        alpha, _ = calculus.green_solve(
            calculus.delta(phi, order), tol=tol, order=order, kernel=kernel_lo
        )
        recon = recon + calculus.d(alpha, order)
    if p < grid.dim:
        beta, _ = calculus.green_solve(
            calculus.d(phi, order), tol=tol, order=order, kernel=kernel_hi
        )
        recon = recon + calculus.delta(beta, order)

    u = np.array([integrate_cycle_mean(phi, z.axes) for z in basis.cycles])
    for a, g in enumerate(basis.gammas):
        recon = recon + g * u[a]
    residue = phi - recon
    full = recon + residue
    err = (phi - full).norm_inf() / max(phi.norm_inf(), 1e-300)
    return Decomposition(alpha, beta, u, residue, err)


def dual_decompose(phi, dual_basis):
    """Dual cycle integrals v_a = int_{z^{(n-p)}_a} star(phi)."""
    if phi.degree + dual_basis.degree != phi.grid.dim:
        raise ValueError("dual basis must have the complementary degree")
    sphi = calculus.star(phi)
    return np.array([integrate_cycle_mean(sphi, z.axes) for z in dual_basis.cycles])


def decomposition_residuals(phi, dec, basis, order=DEFAULT_ORDER):
    """Gauge and residue residuals of a computed decomposition, normalized."""
    scale = max(phi.norm_inf(), 1e-300)
    out = {"reconstruction": dec.reconstruction_error}
    if dec.alpha is not None:
        out["gauge_delta_alpha"] = (
            calculus.delta(dec.alpha, order).norm_inf() / scale
            if dec.alpha.degree > 0
            else 0.0
        )
        d_alpha = calculus.d(dec.alpha, order)
        out["cycle_of_exact"] = max(
            abs(integrate_cycle_mean(d_alpha, z.axes)) for z in basis.cycles
        )
    if dec.beta is not None:
        out["gauge_d_beta"] = (
            calculus.d(dec.beta, order).norm_inf() / scale
            if dec.beta.degree < phi.grid.dim
            else 0.0
        )
        delta_beta = calculus.delta(dec.beta, order)
        out["cycle_of_coexact"] = max(
            abs(integrate_cycle_mean(delta_beta, z.axes)) for z in basis.cycles
        )
    out["residue_norm"] = dec.residue.norm_inf() / scale
    out["residue_cycles"] = max(
        abs(integrate_cycle_mean(dec.residue, z.axes)) for z in basis.cycles
    )
    return out


def cross_relation_check(u, v, T, D_parity, T_dual=None):
    """Residuals of the cycle-integral cross relations.

    forward:    u_a = (-1)^D sum_b tau^{(p)}_{ba} v_b
    reciprocal: v_a = sum_b tau^{(n-p)}_{ba} u_b   (when T_dual given)
    quadrature: w = i T^t w with w = u + i v      (middle degree, odd D)
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    T = np.asarray(T, dtype=float)
    sgn = -1.0 if D_parity % 2 else 1.0
    out = {"forward": float(np.max(np.abs(u - sgn * (T.T @ v))))}
    if T_dual is not None:
        T_dual = np.asarray(T_dual, dtype=float)
        out["reciprocal"] = float(np.max(np.abs(v - T_dual.T @ u)))
    if D_parity % 2:
        w = u + 1j * v
        out["quadrature"] = float(np.max(np.abs(w - 1j * (T.T @ w))))
    out["max"] = max(out.values())
    return out


@dataclass
class NormBreakdown:
    """(phi,phi) split into exact, coexact, topological and residue terms."""

    exact_term: float
    coexact_term: float
    topological_term: float
    residue_term: float
    total: float
    direct_norm: float

    @property
    def budget_error(self):
        return abs(self.total - self.direct_norm) / max(1.0, abs(self.direct_norm))


def norm_decompose(phi, dec, v, E, P, order=DEFAULT_ORDER):
    """Quantized norm budget of a decomposed p-form.

    The topological term is the discrete sum over duality pairs,
    sum_a eps_{a,P(a)} u_a v_{P(a)}.  At the middle degree of an even-
    dimensional manifold the coexact term uses the rewritten potential
    beta_m = -(-1)^{C(m+1)} star(beta), giving (-1)^s (beta_m, delta star phi).
    """
    grid = phi.grid
    n, s = grid.dim, grid.neg_count
    p = phi.degree
    E = np.asarray(E, dtype=float)
    P = np.asarray(P, dtype=int)
    u = dec.u
    v = np.asarray(v, dtype=float)

    exact = 0.0
    if dec.alpha is not None:
        exact = calculus.pairing(dec.alpha, calculus.delta(phi, order))
    coexact = 0.0
    if dec.beta is not None:
        if n % 2 == 0 and p == n // 2:
            sgn_c = -1.0 if sign_C(p + 1, n, s) else 1.0
            beta_m = calculus.star(dec.beta) * (-sgn_c)
            coexact = ((-1.0) ** s) * calculus.pairing(
                beta_m, calculus.delta(calculus.star(phi), order)
            )
        else:
            coexact = calculus.pairing(dec.beta, calculus.d(phi, order))
    topological = float(sum(E[a, P[a]] * u[a] * v[P[a]] for a in range(len(u))))
    residue_term = calculus.pairing(dec.residue, dec.residue)
    total = exact + coexact + topological + residue_term
    direct = calculus.pairing(phi, phi)
    return NormBreakdown(exact, coexact, topological, residue_term, total, direct)


def sigma1(D_parity):
    """Block matrix diag(1, (-1)^{D+1}) of the compact representation."""
    return np.array([[1.0, 0.0], [0.0, (-1.0) ** ((D_parity + 1) % 2)]])


def sigma2():
    """Block matrix [[0,-1],[1,0]]; squares to -I."""
    return np.array([[0.0, -1.0], [1.0, 0.0]])


def compact_assemble(alpha, beta, u, v, basis, check_tol=1e-8, order=DEFAULT_ORDER):
    """Assemble (phi, star phi) at the middle degree from the block form.

        [phi; star phi] = [sigma1 d + sigma2 (star d)] [alpha; beta]
                          + sum_a [u_a; v_a] gamma_a

    alpha and beta are (m-1)-forms.  The second slot is verified against
    star(first slot), which requires v consistent with u (v = T^t u).
    """
    grid = basis.grid
    n = grid.dim
    if n % 2:
        raise ValueError("compact form needs an even-dimensional manifold")
    m = n // 2
    if basis.degree != m:
        raise ValueError("basis must sit at the middle degree")
    Dpar = sign_D(m, n, grid.neg_count)
    s1 = sigma1(Dpar)
    s2 = sigma2()
    da = calculus.d(alpha, order)
    db = calculus.d(beta, order)
    sda = calculus.star(da)
    sdb = calculus.star(db)
    phi = da * s1[0, 0] + db * s1[0, 1] + sda * s2[0, 0] + sdb * s2[0, 1]
    sphi = da * s1[1, 0] + db * s1[1, 1] + sda * s2[1, 0] + sdb * s2[1, 1]
    for a, g in enumerate(basis.gammas):
        phi = phi + g * float(u[a])
        sphi = sphi + g * float(v[a])
    if check_tol is not None:
        mismatch = (calculus.star(phi) - sphi).norm_inf()
        scale = max(phi.norm_inf(), 1.0)
        if mismatch > check_tol * scale:
            raise ValueError(
                f"second slot is not star(first): mismatch {mismatch:.3e} "
                "(u and v are inconsistent)"
            )
    return phi, sphi
