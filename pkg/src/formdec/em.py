"""Electromagnetism on a Minkowski 4-torus: field assembly in MTW
component conventions, topological charges, continuous currents, the
double potential, and the quantized action budget.

Units are SI with mu0 and c carried explicitly; passing mu0 = c = 1
gives normalized test units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import calculus, decompose
from .calculus import DEFAULT_ORDER, sign_C
from .decompose import Decomposition
from .mesh import DiscreteForm, integrate_cycle_mean


def require_minkowski(grid):
    """Flat 4-torus with signature (-1, 1, 1, 1)."""
    if grid.dim != 4 or not grid.is_flat or grid.signature != (-1, 1, 1, 1):
        raise ValueError(
            "electromagnetic field needs a flat 4-torus with signature (-1,1,1,1)"
        )


@dataclass
class EmField:
    """A 2-form F in MTW layout plus its unit constants."""

    F: DiscreteForm
    mu0: float = 1.0
    c: float = 1.0


@dataclass
class ChargeSet:
    qM: np.ndarray
    qE: np.ndarray


@dataclass
class ActionBreakdown:
    electric_term: float
    magnetic_term: float
    quantized_term: float
    total: float
    lagrangian_total: float  # -(1/mu0 c)(F,F) - (1/c)(AE,JE) - (1/c)(AM,JM)

    @property
    def cross_check_residual(self):
        return abs(self.total - self.lagrangian_total)


def assemble_F(Efield, Bfield, grid, c=1.0, mu0=1.0):
    """Build F from per-point E and B arrays (3 each) in MTW conventions.

    F_{0i} = -E_i/c on the (0,i) pairs; B fills the spatial pairs as
    F_{23} = B1, F_{13} = -B2, F_{12} = B3.
    """
    require_minkowski(grid)
    F = grid.zeros(2)
    for i in range(3):
        F.components[(0, i + 1)] += -np.asarray(Efield[i], dtype=float) / c
    F.components[(2, 3)] += np.asarray(Bfield[0], dtype=float)
    F.components[(1, 3)] += -np.asarray(Bfield[1], dtype=float)
    F.components[(1, 2)] += np.asarray(Bfield[2], dtype=float)
    return EmField(F, mu0=mu0, c=c)


def _form_of(field):
    return field.F if isinstance(field, EmField) else field


def charges(field, basis2, mu0=1.0, c=1.0):
    """Topological charges: mu0 c qM_a = int_{z_a} F, mu0 c qE_a = int_{z_a} *F."""
    F = _form_of(field)
    if isinstance(field, EmField):
        mu0, c = field.mu0, field.c
    sF = calculus.star(F)
    qM = np.array(
        [integrate_cycle_mean(F, z.axes) for z in basis2.cycles]
    ) / (mu0 * c)
    qE = np.array(
        [integrate_cycle_mean(sF, z.axes) for z in basis2.cycles]
    ) / (mu0 * c)
    return ChargeSet(qM, qE)


def currents(field, mu0=1.0, order=DEFAULT_ORDER):
    """Continuous sources: JE = delta(F)/mu0, JM = -delta(*F)/mu0."""
    F = _form_of(field)
    if isinstance(field, EmField):
        mu0 = field.mu0
    JE = calculus.delta(F, order) * (1.0 / mu0)
    JM = calculus.delta(calculus.star(F), order) * (-1.0 / mu0)
    return JE, JM


def potentials(field, basis2, tol=1e-10, order=DEFAULT_ORDER):
    """Double potential (AE, AM) plus the underlying decomposition.

    AE solves Delta(AE) = delta(F); the coexact part is rewritten as
    -star(d AM) with AM = -(-1)^{C(3)} star(theta), theta = G(d F).
    Reconstruction: F = d AE - star(d AM) + sum_a u_a gamma_a.
    """
    F = _form_of(field)
    grid = F.grid
    require_minkowski(grid)
    AE, _ = calculus.green_solve(calculus.delta(F, order), tol=tol, order=order)
    theta, _ = calculus.green_solve(calculus.d(F, order), tol=tol, order=order)
    sgn_c = -1.0 if sign_C(3, grid.dim, grid.neg_count) else 1.0
    AM = calculus.star(theta) * (-sgn_c)
    u = np.array([integrate_cycle_mean(F, z.axes) for z in basis2.cycles])
    recon = calculus.d(AE, order) - calculus.star(calculus.d(AM, order))
    for a, g in enumerate(basis2.gammas):
        recon = recon + g * u[a]
    residue = F - recon
    err = residue.norm_inf() / max(F.norm_inf(), 1e-300)
    dec = Decomposition(AE, theta, u, residue, err)
    return AE, AM, dec


def charge_relations(qM, qE, T2):
    """Residuals of qM = -T^t qE, qE = T^t qM, and the quadrature form
    q = i T^t q with q = qM + i qE."""
    qM = np.asarray(qM, dtype=float)
    qE = np.asarray(qE, dtype=float)
    T2 = np.asarray(T2, dtype=float)
    out = {
        "magnetic_from_electric": float(np.max(np.abs(qM + T2.T @ qE))),
        "electric_from_magnetic": float(np.max(np.abs(qE - T2.T @ qM))),
    }
    q = qM + 1j * qE
    out["quadrature"] = float(np.max(np.abs(q - 1j * (T2.T @ q))))
    out["max"] = max(out.values())
    return out


def action(field, AE, AM, JE, JM, charge_set, E2, P, mu0=1.0, c=1.0):
    """Quantized action budget.

    S = -(2/c)(AE,JE) - (2/c)(AM,JM) - mu0 c sum_a eps_{a,P(a)} qM_a qE_{P(a)},
    cross-checked against S = -(1/mu0 c)(F,F) - (1/c)(AE,JE) - (1/c)(AM,JM).
    """
    F = _form_of(field)
    if isinstance(field, EmField):
        mu0, c = field.mu0, field.c
    E2 = np.asarray(E2, dtype=float)
    P = np.asarray(P, dtype=int)
    qM, qE = charge_set.qM, charge_set.qE
    pe = calculus.pairing(AE, JE)
    pm = calculus.pairing(AM, JM)
    s_d = -mu0 * c * float(
        sum(E2[a, P[a]] * qM[a] * qE[P[a]] for a in range(len(qM)))
    )
    electric = -(2.0 / c) * pe
    magnetic = -(2.0 / c) * pm
    total = electric + magnetic + s_d
    lagrangian = (
        -(1.0 / (mu0 * c)) * calculus.pairing(F, F) - pe / c - pm / c
    )
    return ActionBreakdown(electric, magnetic, s_d, total, lagrangian)


def maxwell_residuals(field, JE, JM, mu0=1.0, order=DEFAULT_ORDER):
    """Normalized residuals of d*F = mu0 *JE and dF = mu0 *JM."""
    F = _form_of(field)
    if isinstance(field, EmField):
        mu0 = field.mu0
    scale = max(F.norm_inf(), 1e-300)
    r1 = (
        calculus.d(calculus.star(F), order) - calculus.star(JE) * mu0
    ).norm_inf() / scale
    r2 = (calculus.d(F, order) - calculus.star(JM) * mu0).norm_inf() / scale
    return {"electric": r1, "magnetic": r2}


def induced_magnetic_charges(qE, eps12, lam1, lam2):
    """S2.1.1 charge relation qM = -(1/eps12) [[0, lam2], [lam1, 0]] qE.

    Requires the group constraint lam1 lam2 = -eps12^2.
    """
    if eps12 == 0:
        raise ValueError("eps12 must be nonzero")
    if abs(lam1 * lam2 + eps12 * eps12) > 1e-10 * max(abs(eps12 * eps12), 1.0):
        raise ValueError("S2.1.1 constraint lam1*lam2 = -eps12^2 violated")
    qE = np.asarray(qE, dtype=float)
    M = np.array([[0.0, lam2], [lam1, 0.0]]) / (-eps12)
    return M @ qE


def monopole_dipole(qM, qE):
    """Residual of (m^M)^2 - (d^M)^2 + (m^E)^2 - (d^E)^2 = 0.

    m = q1 + q2 is the monopole (net) charge, d = q1 - q2 the dipole one;
    the identity holds for charge pairs linked by the S2.1.1 relation.
    """
    qM = np.asarray(qM, dtype=float)
    qE = np.asarray(qE, dtype=float)
    mM, dM = qM[0] + qM[1], qM[0] - qM[1]
    mE, dE = qE[0] + qE[1], qE[0] - qE[1]
    return float(abs(mM**2 - dM**2 + mE**2 - dE**2))


def lambda_scale(action_quantum, elementary_charge, mu0, c):
    """Dimensionless Gram scale h / (mu0 c e^2) = 1/(2 alpha)."""
    for name, val in (
        ("action_quantum", action_quantum),
        ("elementary_charge", elementary_charge),
        ("mu0", mu0),
        ("c", c),
    ):
        if val <= 0:
            raise ValueError(f"{name} must be positive")
    return action_quantum / (mu0 * c * elementary_charge**2)
