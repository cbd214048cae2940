"""Matrix-level classifier and generator for the beta_m = 2 solution
families of middle-dimension cohomology triples (E, T, Lambda).

Independent of any mesh: everything here is 2x2 linear algebra, exact
where the free parameters are rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

GROUPS = ("S2.1.1", "S2.1.2", "S2.1.3", "S2.2.1", "S2.2.2")

# expected det T per group as a function of s parity
_DET_RULES = {
    "S2.1.1": lambda s: -1.0 if s % 2 == 0 else 1.0,  # (-1)^{s+1}
    "S2.1.2": lambda s: 1.0,
    "S2.1.3": lambda s: 1.0 if s % 2 == 0 else -1.0,  # (-1)^{s}
    "S2.2.1": lambda s: None,  # +-1, sign free
    "S2.2.2": lambda s: -1.0 if s % 2 == 0 else 1.0,  # (-1)^{s+1}
}

# required m parity per group (0 = even, 1 = odd)
_M_PARITY = {
    "S2.1.1": 0,
    "S2.1.2": 0,
    "S2.1.3": 1,
    "S2.2.1": 0,
    "S2.2.2": 0,
}


class InfeasibleGroupError(ValueError):
    """Raised when a parameter set violates the group's sign constraints."""


@dataclass
class TaxonomySolution:
    group_label: str
    E: np.ndarray
    T: np.ndarray
    Lambda: np.ndarray
    det_T: float
    constraints_residual: float


def admissible_groups(m_parity, s_parity):
    """Groups allowed for the given parities of m and s."""
    if m_parity % 2 == 1:
        return ["S2.1.3"]
    if s_parity % 2 == 1:
        return ["S2.1.1", "S2.2.2"]
    return ["S2.1.1", "S2.1.2", "S2.2.1", "S2.2.2"]


def reality_rule(beta, D_parity):
    """'real' when T can be a real matrix, i.e. beta * D is even."""
    if beta < 1:
        raise ValueError("beta must be at least 1")
    return "real" if (beta * D_parity) % 2 == 0 else "complex"


def _exactify(x):
    """Keep ints/Fractions exact; pass floats through."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def _check_identities(E, T, Lam, D_parity):
    sgn = -1.0 if D_parity % 2 else 1.0
    eye = np.eye(2)
    res = max(
        float(np.max(np.abs(T @ T - sgn * eye))),
        float(np.max(np.abs(E @ T.T - Lam))),
        float(np.max(np.abs(Lam @ np.linalg.inv(E) @ Lam - sgn * E))),
        float(np.max(np.abs(Lam - Lam.T))),
    )
    return res


def solve_group(group, params, s=0):
    """Exact (E, T, Lambda) triple for one taxonomy group.

    `params` supplies the free entries:
      S2.1.1: E12 != 0, lam11 != 0          (lam22 forced)
      S2.1.2: E12 != 0, sign in {+1,-1}     (lam12 = sign*E12; s even)
      S2.1.3: E12 != 0, lam11 != 0, lam12   (lam22 forced)
      S2.2.1: E11, E22 != 0, sign1, sign2   (s even)
      S2.2.2: E11, E22 != 0, lam12, sign    (lam11, lam22 forced)

    Raises InfeasibleGroupError naming the violated inequality.
    """
    if group not in GROUPS:
        raise ValueError(
            f"unknown group {group!r}: only the beta_m = 2 groups "
            f"{GROUPS} are classified (beta_m > 2 is not supported)"
        )
    s = int(s) % 2
    sgn_s = 1 if s == 0 else -1

    if group == "S2.1.1":
        E12 = _exactify(params["E12"])
        lam11 = _exactify(params["lam11"])
        if E12 == 0 or lam11 == 0:
            raise InfeasibleGroupError("S2.1.1 needs E12 != 0 and lam11 != 0")
        lam22 = sgn_s * E12 * E12 / lam11
        E = np.array([[0, E12], [E12, 0]], dtype=float)
        Lam = np.array([[lam11, 0], [0, lam22]], dtype=float)
        T = np.array([[0, lam11 / E12], [lam22 / E12, 0]], dtype=float)

    elif group == "S2.1.2":
        if s % 2:
            raise InfeasibleGroupError(
                "S2.1.2 infeasible for odd s: requires A^2 = (-1)^s >= 0"
            )
        E12 = _exactify(params["E12"])
        sign = int(params.get("sign", 1))
        if E12 == 0 or sign not in (1, -1):
            raise InfeasibleGroupError("S2.1.2 needs E12 != 0 and sign = +-1")
        lam12 = sign * E12
        E = np.array([[0, E12], [E12, 0]], dtype=float)
        Lam = np.array([[0, lam12], [lam12, 0]], dtype=float)
        a = lam12 / E12
        T = np.array([[a, 0], [0, a]], dtype=float)

    elif group == "S2.1.3":
        E12 = _exactify(params["E12"])
        lam11 = _exactify(params["lam11"])
        lam12 = _exactify(params.get("lam12", 0))
        if E12 == 0 or lam11 == 0:
            raise InfeasibleGroupError("S2.1.3 needs E12 != 0 and lam11 != 0")
        # lam12^2 - lam11 lam22 = (-1)^{s+1} E12^2
        lam22 = (lam12 * lam12 + sgn_s * E12 * E12) / lam11
        E = np.array([[0, E12], [-E12, 0]], dtype=float)
        Lam = np.array([[lam11, lam12], [lam12, lam22]], dtype=float)
        T = (
            np.array(
                [[-lam12, lam11], [-lam22, lam12]], dtype=float
            )
            / float(E12)
        )

    elif group == "S2.2.1":
        if s % 2:
            raise InfeasibleGroupError(
                "S2.2.1 infeasible for odd s: requires even D(m), i.e. even s"
            )
        E11 = _exactify(params["E11"])
        E22 = _exactify(params["E22"])
        sign1 = int(params.get("sign1", 1))
        sign2 = int(params.get("sign2", 1))
        if E11 == 0 or E22 == 0:
            raise InfeasibleGroupError("S2.2.1 needs E11 != 0 and E22 != 0")
        if sign1 not in (1, -1) or sign2 not in (1, -1):
            raise InfeasibleGroupError("S2.2.1 signs must be +-1")
        E = np.array([[E11, 0], [0, E22]], dtype=float)
        Lam = np.array([[sign1 * E11, 0], [0, sign2 * E22]], dtype=float)
        T = np.array([[sign1, 0], [0, sign2]], dtype=float)

    else:  # S2.2.2
        E11 = _exactify(params["E11"])
        E22 = _exactify(params["E22"])
        lam12 = _exactify(params.get("lam12", 0))
        sign = int(params.get("sign", 1))
        if E11 == 0 or E22 == 0:
            raise InfeasibleGroupError("S2.2.2 needs E11 != 0 and E22 != 0")
        val = sgn_s - lam12 * lam12 / (E11 * E22)
        if val < 0:
            raise InfeasibleGroupError(
                "S2.2.2 infeasible: (lam11/E11)^2 = (-1)^s - "
                f"lam12^2/(E11*E22) = {float(val):.6g} < 0"
            )
        A = sign * math.sqrt(float(val))
        lam11 = A * float(E11)
        lam22 = -A * float(E22)
        E = np.array([[E11, 0], [0, E22]], dtype=float)
        Lam = np.array([[lam11, lam12], [lam12, lam22]], dtype=float)
        T = np.array(
            [[A, float(lam12) / float(E22)], [float(lam12) / float(E11), -A]]
        )

    # D(m) parity for n = 2m is (m + s) mod 2
    D_parity = (_M_PARITY[group] + s) % 2
    res = _check_identities(E, T, Lam, D_parity)
    det_T = float(np.linalg.det(T))
    expected = _DET_RULES[group](s)
    if expected is not None and abs(det_T - expected) > 1e-10:
        raise RuntimeError(
            f"{group}: det T = {det_T} does not match the expected {expected}"
        )
    return TaxonomySolution(group, E, T, Lam.astype(float), det_T, res)


def family_T(u, v):
    """Continuous family [[u, v], [-(1+u^2)/v, -u]]; squares to -I."""
    if v == 0:
        raise ValueError("family_T needs v != 0")
    u = _exactify(u)
    v = _exactify(v)
    return np.array([[u, v], [-(1 + u * u) / v, -u]], dtype=float)


def random_params(group, s, rng):
    """A feasible random parameter draw for solve_group."""

    def nonzero():
        return float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))

    if group == "S2.1.1":
        return {"E12": nonzero(), "lam11": nonzero()}
    if group == "S2.1.2":
        return {"E12": nonzero(), "sign": int(rng.choice([-1, 1]))}
    if group == "S2.1.3":
        return {"E12": nonzero(), "lam11": nonzero(), "lam12": float(rng.uniform(-2, 2))}
    if group == "S2.2.1":
        return {
            "E11": nonzero(),
            "E22": nonzero(),
            "sign1": int(rng.choice([-1, 1])),
            "sign2": int(rng.choice([-1, 1])),
        }
    if group == "S2.2.2":
        E11 = nonzero()
        if s % 2:
            # needs E11*E22 < 0 and lam12^2 >= |E11*E22|
            E22 = -math.copysign(float(rng.uniform(0.5, 2.0)), E11)
            lam12 = float(
                rng.choice([-1.0, 1.0]) * math.sqrt(abs(E11 * E22)) * rng.uniform(1.0, 2.0)
            )
        else:
            E22 = math.copysign(float(rng.uniform(0.5, 2.0)), E11)
            lam12 = float(
                rng.uniform(-1.0, 1.0) * math.sqrt(abs(E11 * E22))
            )
        return {"E11": E11, "E22": E22, "lam12": lam12, "sign": int(rng.choice([-1, 1]))}
    raise ValueError(f"unknown group {group!r}")
