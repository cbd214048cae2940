"""Periodic structured grids, discrete differential forms, wedge product,
and integration over the manifold and over coordinate cycles.

All form components are collocated at grid nodes.  The single quadrature
used everywhere is the periodic rectangle rule, which is spectrally
accurate for smooth periodic integrands.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

KNOWN_METRICS = ("flat", "embedded-torus")


def permutation_sign(seq):
    """Sign of the permutation sorting `seq` (no repeated entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def merge_sign(left, right):
    """Sign of merging two disjoint sorted index tuples into one sorted tuple."""
    return permutation_sign(tuple(left) + tuple(right))


@dataclass(frozen=True)
class GridSpec:
    """Shape, periods, metric signature and metric preset of an n-torus lattice."""

    dim: int
    points: tuple
    periods: tuple
    signature: tuple
    metric: str = "flat"
    R: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if not 1 <= self.dim <= 4:
            raise ValueError(f"dim must be in 1..4, got {self.dim}")
        object.__setattr__(self, "points", tuple(int(N) for N in self.points))
        object.__setattr__(self, "periods", tuple(float(L) for L in self.periods))
        object.__setattr__(self, "signature", tuple(int(s) for s in self.signature))
        if len(self.points) != self.dim or len(self.periods) != self.dim:
            raise ValueError("points and periods must have one entry per axis")
        if len(self.signature) != self.dim:
            raise ValueError("signature must have one entry per axis")
        for N in self.points:
            if N < 4:
                raise ValueError(f"need at least 4 points per axis, got {N}")
            if N % 2 != 0:
                raise ValueError(f"points per axis must be even, got {N}")
        for L in self.periods:
            if L <= 0:
                raise ValueError("periods must be strictly positive")
        if any(s not in (-1, 1) for s in self.signature):
            raise ValueError("signature entries must be +1 or -1")
        if self.metric not in KNOWN_METRICS:
            raise ValueError(f"unknown metric preset {self.metric!r}")
        if self.metric == "embedded-torus":
            if self.dim != 2:
                raise ValueError("embedded-torus metric requires dim=2")
            if not self.R > self.r > 0:
                raise ValueError(
                    f"embedded torus needs R > r > 0, got R={self.R}, r={self.r}"
                )

    @property
    def neg_count(self):
        """Number of -1 entries in the signature (the s of the metric)."""
        return sum(1 for s in self.signature if s == -1)

    def to_manifest(self):
        m = {
            "dim": self.dim,
            "n": list(self.points),
            "period": list(self.periods),
            "signature": list(self.signature),
            "metric": self.metric,
        }
        if self.metric == "embedded-torus":
            m["R"] = self.R
            m["r"] = self.r
        return m

    @classmethod
    def from_manifest(cls, manifest):
        if isinstance(manifest, str):
            manifest = json.loads(manifest)
        return cls(
            dim=manifest["dim"],
            points=tuple(manifest["n"]),
            periods=tuple(manifest["period"]),
            signature=tuple(manifest.get("signature", [1] * manifest["dim"])),
            metric=manifest.get("metric", "flat"),
            R=manifest.get("R", 0.0),
            r=manifest.get("r", 0.0),
        )


class PeriodicGrid:
    """An n-torus sampling lattice with a diagonal, position-dependent metric.

    `metric_diag[a]` holds the positive scale factor |g_aa| at every node;
    the sign of g_aa is carried separately by `spec.signature`.
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.shape = spec.points
        self.steps = tuple(L / N for L, N in zip(spec.periods, spec.points))
        axes_1d = [
            np.arange(N) * h for N, h in zip(spec.points, self.steps)
        ]
        self.coords = np.meshgrid(*axes_1d, indexing="ij")
        self.metric_diag = self._build_metric()
        if np.any(self.metric_diag <= 0):
            raise ValueError("degenerate metric: scale factors must stay positive")
        self.sqrt_abs_g = np.sqrt(np.prod(self.metric_diag, axis=0))
        self._symbol_cache = {}

    def _build_metric(self):
        n = self.spec.dim
        if self.spec.metric == "flat":
            return np.ones((n,) + self.shape)
        # embedded-torus: g_uu = (R + r cos v)^2, g_vv = r^2
        R, r = self.spec.R, self.spec.r
        v = self.coords[1]
        g = np.empty((2,) + self.shape)
        g[0] = (R + r * np.cos(v)) ** 2
        g[1] = r**2
        return g

    @property
    def dim(self):
        return self.spec.dim

    @property
    def signature(self):
        return self.spec.signature

    @property
    def neg_count(self):
        return self.spec.neg_count

    @property
    def is_flat(self):
        return self.spec.metric == "flat"

    @property
    def cell_volume(self):
        return float(np.prod(self.steps))

    def volume(self):
        """Metric volume of the torus, int_M sqrt|g| dx."""
        return float(np.sum(self.sqrt_abs_g)) * self.cell_volume

    def components_of_degree(self, p):
        """Sorted index tuples keying degree-p components."""
        if not 0 <= p <= self.dim:
            raise ValueError(f"degree {p} out of range for dim {self.dim}")
        return list(itertools.combinations(range(self.dim), p))

    def zeros(self, degree):
        return DiscreteForm(
            self,
            degree,
            {I: np.zeros(self.shape) for I in self.components_of_degree(degree)},
        )

    def constant_form(self, degree, values):
        """Form whose component I is the constant values[I] (missing keys are 0)."""
        f = self.zeros(degree)
        for I, val in values.items():
            f.components[tuple(I)] += val
        return f

    def volume_form(self):
        """Top form with component sqrt|g| (the Riemannian/pseudo volume Omega)."""
        top = tuple(range(self.dim))
        return DiscreteForm(self, self.dim, {top: self.sqrt_abs_g.copy()})

    def unit_form(self):
        """Top form normalized so its manifold integral is one."""
        omega = self.volume_form()
        return omega * (1.0 / self.volume())


def build_grid(spec: GridSpec) -> PeriodicGrid:
    """Construct the sampling lattice with its metric arrays."""
    return PeriodicGrid(spec)


class DiscreteForm:
    """Degree-p antisymmetric component field sampled on the grid.

    Components are keyed by strictly increasing index tuples; a degree-p
    form carries exactly C(n, p) component arrays.
    """

    def __init__(self, grid, degree, components):
        self.grid = grid
        self.degree = degree
        expected = set(grid.components_of_degree(degree))
        keys = set(components)
        if keys != expected:
            raise ValueError(
                f"degree-{degree} form needs components {sorted(expected)}, "
                f"got {sorted(keys)}"
            )
        self.components = {I: np.asarray(components[I], dtype=float) for I in sorted(components)}
        for I, arr in self.components.items():
            if arr.shape != grid.shape:
                raise ValueError(f"component {I} has shape {arr.shape}, grid is {grid.shape}")

    def copy(self):
        return DiscreteForm(
            self.grid, self.degree, {I: a.copy() for I, a in self.components.items()}
        )

    def __add__(self, other):
        self._check_compatible(other)
        return DiscreteForm(
            self.grid,
            self.degree,
            {I: self.components[I] + other.components[I] for I in self.components},
        )

    def __sub__(self, other):
        self._check_compatible(other)
        return DiscreteForm(
            self.grid,
            self.degree,
            {I: self.components[I] - other.components[I] for I in self.components},
        )

    def __mul__(self, scalar):
        return DiscreteForm(
            self.grid, self.degree, {I: a * scalar for I, a in self.components.items()}
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def _check_compatible(self, other):
        if other.grid is not self.grid or other.degree != self.degree:
            raise ValueError("forms must live on the same grid with equal degree")

    def norm_inf(self):
        return max(
            (float(np.max(np.abs(a))) for a in self.components.values()), default=0.0
        )


@dataclass(frozen=True)
class CycleSpec:
    """A coordinate sub-torus: spanned axes plus a fixed offset per other axis."""

    axes: tuple
    offsets: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(int(a) for a in self.axes))
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if list(self.axes) != sorted(set(self.axes)):
            raise ValueError("cycle axes must be strictly increasing and distinct")

    def offset_map(self, dim):
        others = [a for a in range(dim) if a not in self.axes]
        offs = self.offsets if self.offsets else (0,) * len(others)
        if len(offs) != len(others):
            raise ValueError("need one offset per non-spanned axis")
        return dict(zip(others, offs))


def wedge(a: DiscreteForm, b: DiscreteForm) -> DiscreteForm:
    """Pointwise exterior product with standard permutation signs."""
    if a.grid is not b.grid:
        raise ValueError("wedge operands must share a grid")
    p, q = a.degree, b.degree
    n = a.grid.dim
    if p + q > n:
        raise ValueError(f"wedge degree overflow: {p} + {q} > {n}")
    out = a.grid.zeros(p + q)
    for I, fa in a.components.items():
        for J, fb in b.components.items():
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            out.components[K] += merge_sign(I, J) * fa * fb
    return out


def integrate_manifold(f: DiscreteForm) -> float:
    """Periodic rectangle-rule integral of a top-degree form.

    The single component is summed as-is: any sqrt|g| factor is the
    caller's responsibility (a top form already is a density).
    """
    if f.degree != f.grid.dim:
        raise ValueError(f"manifold integration needs a degree-{f.grid.dim} form")
    top = tuple(range(f.grid.dim))
    return float(np.sum(f.components[top])) * f.grid.cell_volume


def integrate_cycle(f: DiscreteForm, z: CycleSpec) -> float:
    """Rectangle-rule integral of the pullback of f onto the cycle sub-torus."""
    if len(z.axes) != f.degree:
        raise ValueError(
            f"cycle spans {len(z.axes)} axes but the form has degree {f.degree}"
        )
    grid = f.grid
    comp = f.components[z.axes]
    indexer = [slice(None)] * grid.dim
    for axis, off in z.offset_map(grid.dim).items():
        if not 0 <= off < grid.shape[axis]:
            raise ValueError(f"offset {off} out of range on axis {axis}")
        indexer[axis] = off
    patch = comp[tuple(indexer)]
    step = math.prod(grid.steps[a] for a in z.axes)
    return float(np.sum(patch)) * step


def integrate_cycle_mean(f: DiscreteForm, axes) -> float:
    """Cycle integral averaged over all offsets of the non-spanned axes.

    For closed forms this equals the fixed-offset integral; for general
    forms it is the duality-consistent value (derivatives along offset
    axes telescope to zero exactly on the periodic lattice).
    """
    axes = tuple(axes)
    if len(axes) != f.degree:
        raise ValueError("axes count must equal the form degree")
    grid = f.grid
    comp = f.components[axes]
    step = math.prod(grid.steps[a] for a in axes)
    others = [a for a in range(grid.dim) if a not in axes]
    n_offsets = math.prod(grid.shape[a] for a in others) if others else 1
    return float(np.sum(comp)) * step / n_offsets
