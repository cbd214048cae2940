"""Signature-aware Hodge star, exterior derivative, coderivative,
Laplace-Beltrami operator, bilinear pairing, and a minimum-norm Green solver.

Derivatives use periodic central-difference stencils (order 8 by default).
On flat metrics the Laplacian is a constant-coefficient convolution, so the
Green solve is done exactly through its Fourier symbol; near-null modes
(constants, and light-cone modes in indefinite signature) are deflated and
the minimum-norm solution returned.  On curved Riemannian metrics a MINRES
iteration on the symmetrized operator is used, preconditioned by the flat
symbol inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import linalg as spla

from .mesh import DiscreteForm, GridSpec, PeriodicGrid, build_grid, merge_sign

DEFAULT_ORDER = 8
DEFLATION_TOL = 1e-10

# central first-derivative coefficients for positive offsets 1..order/2
_STENCILS = {
    2: (0.5,),
    4: (2.0 / 3.0, -1.0 / 12.0),
    6: (3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0),
    8: (4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0),
}


class GreenSolveError(RuntimeError):
    """Raised when the Green solve misses its residual target."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    deflated_dims: int


def sign_D(p, n, s):
    """Parity of D(p) = p(n-p) + s, the double Hodge star exponent."""
    if not 0 <= p <= n:
        raise ValueError(f"degree {p} out of range for dim {n}")
    return (p * (n - p) + s) % 2


def sign_C(p, n, s):
    """Parity of C(p) = np + n + 1 + s, the coderivative sign exponent."""
    if not 0 <= p <= n:
        raise ValueError(f"degree {p} out of range for dim {n}")
    return (n * p + n + 1 + s) % 2


def partial(arr, axis, grid, order=DEFAULT_ORDER):
    """Periodic central-difference partial derivative along one axis."""
    coeffs = _STENCILS[order]
    h = grid.steps[axis]
    out = np.zeros_like(arr)
    for j, c in enumerate(coeffs, start=1):
        out += c * (np.roll(arr, -j, axis=axis) - np.roll(arr, j, axis=axis))
    return out / h


def d(f: DiscreteForm, order=DEFAULT_ORDER) -> DiscreteForm:
    """Exterior derivative via antisymmetrized partial-derivative stencils."""
    grid = f.grid
    if f.degree >= grid.dim:
        raise ValueError("cannot take d of a top-degree form")
    out = grid.zeros(f.degree + 1)
    for I, comp in f.components.items():
        for a in range(grid.dim):
            if a in I:
                continue
            K = tuple(sorted(I + (a,)))
            out.components[K] += merge_sign((a,), I) * partial(comp, a, grid, order)
    return out


def star(f: DiscreteForm) -> DiscreteForm:
    """Hodge star: pointwise diagonal map for diagonal metrics.

    Component I goes to the complementary tuple with coefficient
    sign(perm(I, Ic)) * sqrt|g| * prod_{i in I}(signature_i / g_ii).
    """
    grid = f.grid
    n = grid.dim
    out = grid.zeros(n - f.degree)
    for I, comp in f.components.items():
        Ic = tuple(a for a in range(n) if a not in I)
        coeff = merge_sign(I, Ic) * grid.sqrt_abs_g
        for i in I:
            coeff = coeff * (grid.signature[i] / grid.metric_diag[i])
        out.components[Ic] = coeff * comp
    return out


def delta(f: DiscreteForm, order=DEFAULT_ORDER) -> DiscreteForm:
    """Coderivative (-1)^{C(p)} star d star."""
    grid = f.grid
    if f.degree == 0:
        raise ValueError("coderivative of a 0-form is undefined")
    sgn = -1.0 if sign_C(f.degree, grid.dim, grid.neg_count) else 1.0
    return star(d(star(f), order)) * sgn


def laplacian(f: DiscreteForm, order=DEFAULT_ORDER) -> DiscreteForm:
    """Laplace-Beltrami operator, delta d + d delta (invalid halves dropped)."""
    grid = f.grid
    out = grid.zeros(f.degree)
    if f.degree < grid.dim:
        out = out + delta(d(f, order), order)
    if f.degree > 0:
        out = out + d(delta(f, order), order)
    return out


def pairing(a: DiscreteForm, b: DiscreteForm) -> float:
    """Bilinear integral (a, b) = int_M a wedge star(b); symmetric."""
    from .mesh import integrate_manifold, wedge

    if a.degree != b.degree:
        raise ValueError("pairing needs forms of equal degree")
    return integrate_manifold(wedge(a, star(b)))


# ---------------------------------------------------------------------------
# Green solver
# ---------------------------------------------------------------------------


def _flat_symbols(grid, p, order):
    """Fourier symbol of the Laplacian per component on a flat grid.

    Computed from the delta-function response; raises if the operator
    turns out not to be component-diagonal (it is, for flat diagonal
    metrics, because the stencils commute exactly).
    """
    key = (p, order)
    cache = grid._symbol_cache
    if key in cache:
        return cache[key]
    symbols = {}
    origin = (0,) * grid.dim
    for I in grid.components_of_degree(p):
        probe = grid.zeros(p)
        probe.components[I][origin] = 1.0
        response = laplacian(probe, order)
        sym = np.fft.fftn(response.components[I])
        scale = max(float(np.max(np.abs(sym))), 1.0)
        if float(np.max(np.abs(sym.imag))) > 1e-10 * scale:
            raise RuntimeError("flat Laplacian symbol is not real")
        for J, other in response.components.items():
            if J != I and float(np.max(np.abs(other))) > 1e-12 * scale:
                raise RuntimeError("flat Laplacian mixes components")
        symbols[I] = sym.real
    cache[key] = symbols
    return symbols


def _component_weights(grid, p):
    """Positive diagonal weights of the metric pairing, per component."""
    weights = {}
    for I in grid.components_of_degree(p):
        w = grid.sqrt_abs_g.copy()
        for i in I:
            w = w / grid.metric_diag[i]
        weights[I] = w
    return weights


def _project_out(form, kernel_forms, weights):
    """Remove the span of kernel_forms (weighted-orthonormalized) from form."""
    if not kernel_forms:
        return form
    comps = sorted(form.components)

    def dot(f, g):
        return sum(
            float(np.sum(f.components[I] * g.components[I] * weights[I]))
            for I in comps
        )

    basis = []
    for k in kernel_forms:
        v = k.copy()
        for b in basis:
            v = v - b * dot(b, v)
        nrm = math.sqrt(abs(dot(v, v)))
        if nrm > 1e-14:
            basis.append(v * (1.0 / nrm))
    out = form
    for b in basis:
        out = out - b * dot(b, out)
    return out


def _green_solve_flat(source, tol, order, kernel):
    grid = source.grid
    p = source.degree
    symbols = _flat_symbols(grid, p, order)
    max_sym = max(float(np.max(np.abs(s))) for s in symbols.values())
    theta = grid.zeros(p)
    proj = grid.zeros(p)
    deflated = 0
    for I, comp in source.components.items():
        sym = symbols[I]
        mask = np.abs(sym) <= DEFLATION_TOL * max_sym
        deflated += int(mask.sum())
        shat = np.fft.fftn(comp)
        shat_proj = np.where(mask, 0.0, shat)
        with np.errstate(divide="ignore", invalid="ignore"):
            that = np.where(mask, 0.0, shat_proj / np.where(mask, 1.0, sym))
        theta.components[I][:] = np.fft.ifftn(that).real
        proj.components[I][:] = np.fft.ifftn(shat_proj).real
    if kernel:
        weights = _component_weights(grid, p)
        theta = _project_out(theta, kernel, weights)
    src_norm = _l2(source)
    if src_norm == 0.0:
        return theta, SolveReport(0, 0.0, deflated)
    res = _l2(laplacian(theta, order) - proj) / src_norm
    if res > tol:
        raise GreenSolveError(f"flat Green solve residual {res:.3e} > {tol:.3e}", res)
    return theta, SolveReport(1, res, deflated)


def _l2(form):
    return math.sqrt(sum(float(np.sum(a * a)) for a in form.components.values()))


def _flat_twin(grid):
    if getattr(grid, "_flat_twin", None) is None:
        spec = grid.spec
        grid._flat_twin = build_grid(
            GridSpec(spec.dim, spec.points, spec.periods, spec.signature, "flat")
        )
    return grid._flat_twin


def _green_solve_curved(source, tol, max_iter, order, kernel):
    grid = source.grid
    if grid.neg_count != 0:
        raise NotImplementedError("curved metrics are supported only for s = 0")
    p = source.degree
    comps = grid.components_of_degree(p)
    weights = _component_weights(grid, p)
    sqw = {I: np.sqrt(weights[I]) for I in comps}
    npts = int(np.prod(grid.shape))
    size = npts * len(comps)

    kernel_forms = list(kernel) if kernel else []
    if p == 0:
        kernel_forms.append(grid.constant_form(0, {(): 1.0}))

    def to_vec(form):
        return np.concatenate(
            [(form.components[I] * sqw[I]).ravel() for I in comps]
        )

    def to_form(vec):
        f = grid.zeros(p)
        for k, I in enumerate(comps):
            block = vec[k * npts : (k + 1) * npts].reshape(grid.shape)
            f.components[I][:] = block / sqw[I]
        return f

    def matvec(vec):
        return to_vec(laplacian(to_form(vec), order))

    # orthonormal kernel vectors in the symmetrized coordinates
    kvecs = []
    for kf in kernel_forms:
        v = to_vec(kf)
        for b in kvecs:
            v = v - b * (b @ v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-14:
            kvecs.append(v / nrm)

    def deflate(vec):
        for b in kvecs:
            vec = vec - b * (b @ vec)
        return vec

    # preconditioner: flat symbol inverse; near-null modes are clipped to
    # the smallest invertible symbol so M stays positive definite without
    # wildly amplifying the (already deflated) kernel directions
    twin = _flat_twin(grid)
    symbols = _flat_symbols(twin, p, order)
    max_sym = max(float(np.max(np.abs(s))) for s in symbols.values())
    floor = min(
        float(np.min(np.abs(s)[np.abs(s) > DEFLATION_TOL * max_sym]))
        for s in symbols.values()
    )
    inv_sym = {
        I: 1.0 / np.clip(np.abs(symbols[I]), floor, None) for I in comps
    }

    def precond(vec):
        out = np.empty_like(vec)
        for k, I in enumerate(comps):
            block = vec[k * npts : (k + 1) * npts].reshape(grid.shape)
            sol = np.fft.ifftn(np.fft.fftn(block) * inv_sym[I]).real
            out[k * npts : (k + 1) * npts] = sol.ravel()
        # no deflation here: minres needs a symmetric positive definite M
        return out

    b = deflate(to_vec(source))
    b_norm = np.linalg.norm(b)
    src_norm = np.linalg.norm(to_vec(source))
    if src_norm == 0.0 or b_norm <= 1e-15 * max(src_norm, 1.0):
        return grid.zeros(p), SolveReport(0, 0.0, len(kvecs))

    A = spla.LinearOperator((size, size), matvec=lambda v: deflate(matvec(deflate(v))))
    M = spla.LinearOperator((size, size), matvec=precond)
    iters = [0]

    def cb(_):
        iters[0] += 1

    # minres stops on the preconditioned residual, which can undershoot
    # the true one; restart with a tighter target until the contract holds
    rtol = tol * 1e-2
    x = None
    res = math.inf
    theta = None
    for _ in range(6):
        try:
            x, _ = spla.minres(
                A, b, M=M, rtol=rtol, maxiter=max_iter, x0=x, callback=cb
            )
        except TypeError:  # scipy < 1.12 spells the tolerance 'tol'
            x, _ = spla.minres(
                A, b, M=M, tol=rtol, maxiter=max_iter, x0=x, callback=cb
            )
        x = deflate(x)
        theta = to_form(x)
        res = _l2(laplacian(theta, order) - to_form(b)) / _l2(source)
        if res <= tol or iters[0] >= max_iter:
            break
        rtol *= 1e-2
    if res > tol:
        raise GreenSolveError(
            f"Green solve did not reach tol={tol:.1e} after {iters[0]} iterations "
            f"(best residual {res:.3e})",
            res,
        )
    return theta, SolveReport(iters[0], res, len(kvecs))


def green_solve(source, tol=1e-10, max_iter=5000, order=DEFAULT_ORDER, kernel=None):
    """Minimum-norm solve of (laplacian theta) = source with kernel deflation.

    The source is first projected off the operator's near-kernel
    (constants and, in indefinite signature, discrete light-cone modes;
    plus any forms passed in `kernel`, e.g. a cohomology basis).
    Returns (theta, SolveReport).
    """
    if source.grid.is_flat:
        return _green_solve_flat(source, tol, order, kernel)
    return _green_solve_curved(source, tol, max_iter, order, kernel)
