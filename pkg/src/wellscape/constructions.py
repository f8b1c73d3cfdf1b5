"""The three analytic seed families and their supporting radial machinery.

* branched seed: a y-periodic sawtooth with parabolic caps on the right half
  of the domain, linearly interpolated to zero on the left half.  Its
  surface + elastic cost is O(eps) while area(B) is a fixed fraction of L,
  which is what drives the upper bound on the critical well-depth.

* nucleation bump: a compactly supported bump attached to the right edge
  whose B-set can be made arbitrarily small while staying of positive
  measure, at cost O(lambda^2 * delta^(1/2)) when a = delta^(1/2).

* potential seeds: densities f_j(R, theta) = g_j(R) sin(theta) on the disk,
  their Newtonian potentials z_j solved through the separable radial ODE

      Z'' + Z'/R - Z/R^2 = g(R),
      Z(R) = -(1/(2R)) int_0^R s^2 g(s) ds - (R/2) int_R^inf g(s) ds,

  and the pullback of the cut-off potential to Omega by the affine map
  T(x) = 2(x - P)/sqrt(L^2+1), P = (L/2, 1/2).  A direct log-kernel
  convolution quadrature is kept as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import Grid, ScalarField

SUPPORT_RADIUS = 2.0  # densities live on the disk of radius 2


class ResolutionTooCoarse(ValueError):
    """Grid cannot resolve the construction's internal length scales."""


class UnsupportedProfile(ValueError):
    """Radial density extends beyond the supported disk."""


def quintic_smoothstep_cutoff(r_plateau: float, r_support: float) -> Callable:
    """C^2 cutoff: 1 on [0, r_plateau], 0 beyond r_support, quintic between."""
    if not 0.0 < r_plateau < r_support:
        raise ValueError(f"need 0 < r_plateau < r_support, got {r_plateau}, {r_support}")

    def cutoff(r):
        t = np.clip((np.asarray(r, dtype=float) - r_plateau) / (r_support - r_plateau),
                    0.0, 1.0)
        return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)

    return cutoff


# ---------------------------------------------------------------------------
# branched seed

@dataclass(frozen=True)
class BranchedSpec:
    """Shape parameters of the branched seed.

    h = c * sqrt(eps*L) is the cap height, l = L/2 the half-width,
    k = h/(2l) the taper rate, and N = 1/(4h) the (integer) number of
    vertical periods.  c is the admissible constant closest to 1.
    """

    epsilon: float
    L: float
    c: float
    h: float
    l: float
    k: float
    N: int

    @classmethod
    def from_epsilon(cls, epsilon: float, L: float) -> "BranchedSpec":
        if epsilon <= 0 or L <= 0:
            raise ValueError("epsilon and L must be positive")
        n0 = 1.0 / (4.0 * math.sqrt(epsilon * L))
        candidates = {max(1, math.floor(n0)), max(1, math.ceil(n0))}
        N = min(candidates, key=lambda n: abs(1.0 / (4.0 * n * math.sqrt(epsilon * L)) - 1.0))
        c = 1.0 / (4.0 * N * math.sqrt(epsilon * L))
        h = 1.0 / (4.0 * N)
        l = L / 2.0
        return cls(epsilon, L, c, h, l, h / (2.0 * l), N)

    def to_json_dict(self) -> dict:
        return {"epsilon": self.epsilon, "L": self.L, "c": self.c,
                "h": self.h, "l": self.l, "k": self.k, "N": self.N}


def _sawtooth_profile(xw: np.ndarray, y: np.ndarray, h: float, k: float) -> np.ndarray:
    """The periodic cap profile w(xw, y) on [0, l] x [0, 1].

    One period [0, 4h] consists of a rising parabolic cap (slope 0 -> 1), a
    slope-one segment, a decelerating cap (slope 1 -> 0) up to y = 2h, then
    the mirror image.  The cap extent is H(xw) = h - k*xw.
    """
    H = h - k * xw
    yp = np.mod(y, 4.0 * h)
    yp = np.where(yp > 2.0 * h, 4.0 * h - yp, yp)  # reflect about y = 2h
    out = np.where(yp <= H, yp**2 / (2.0 * H), yp - H / 2.0)
    # constant 2h - H keeps the value and slope continuous at yp = 2h - H
    out = np.where(yp >= 2.0 * h - H,
                   2.0 * h - H - (yp - 2.0 * h) ** 2 / (2.0 * H), out)
    return out


def branched_seed(spec: BranchedSpec, grid: Grid) -> ScalarField:
    """Sample the glued seed: (x/l) * w(0, y) on [0, l], w(x-l, y) on [l, L]."""
    if not math.isclose(grid.L, spec.L, rel_tol=1e-12):
        raise ValueError(f"grid width {grid.L} != spec width {spec.L}")
    if grid.ny * spec.h < 8.0:
        raise ResolutionTooCoarse(
            f"ny*h = {grid.ny * spec.h:.2f} < 8; the caps are unresolved")
    x = grid.x_nodes[:, None]
    y = grid.y_nodes[None, :]
    w0 = _sawtooth_profile(np.zeros((1, 1)), y, spec.h, spec.k)
    left = (x / spec.l) * w0
    right = _sawtooth_profile(x - spec.l, y, spec.h, spec.k)
    values = np.where(x <= spec.l, left, right)
    return ScalarField(grid, values, claimed_class=3)


# ---------------------------------------------------------------------------
# nucleation bump

@dataclass(frozen=True)
class BumpSpec:
    """Bump of lobe half-height a, support width delta_x, amplitude lambda > 1."""

    a: float
    delta_x: float
    lam: float
    L: float

    def __post_init__(self):
        if self.a <= 0 or 4.0 * self.a > 1.0:
            raise ValueError(f"need 0 < 4a <= 1, got a={self.a}")
        if not 0.0 < self.delta_x <= self.L:
            raise ValueError(f"need 0 < delta_x <= L, got {self.delta_x}, {self.L}")
        if self.lam <= 1.0:
            raise ValueError(f"lambda must exceed 1, got {self.lam}")

    def to_json_dict(self) -> dict:
        return {"a": self.a, "delta_x": self.delta_x, "lambda": self.lam, "L": self.L}


def nucleation_bump(spec: BumpSpec, grid: Grid) -> ScalarField:
    """Sample the bump, supported in [L - delta, L] x [0, 4a].

    The x-profile lam*((x - L + delta)/delta)^2 vanishes at the left edge of
    the support, so the zero extension is C^1 there; the peak gradient sits
    on the natural boundary x = L.
    """
    if not math.isclose(grid.L, spec.L, rel_tol=1e-12):
        raise ValueError(f"grid width {grid.L} != spec width {spec.L}")
    if grid.hx > spec.delta_x / 8.0 or grid.hy > spec.a / 8.0:
        raise ResolutionTooCoarse(
            f"need >= 8 cells across delta and a; hx={grid.hx:.3e}, hy={grid.hy:.3e}")
    a, dx, L = spec.a, spec.delta_x, spec.L
    x = grid.x_nodes[:, None]
    y = grid.y_nodes[None, :]
    f = spec.lam * ((x - (L - dx)) / dx) ** 2
    f = np.where(x >= L - dx, f, 0.0)
    yr = np.where(y > 2.0 * a, 4.0 * a - y, y)  # reflect about y = 2a
    lower = f * yr**2 / (2.0 * a)
    upper = a * f - f * (2.0 * a - yr) ** 2 / (2.0 * a)
    values = np.where(yr <= a, lower, upper)
    values = np.where((yr >= 0.0) & (y < 4.0 * a), values, 0.0)
    return ScalarField(grid, values, claimed_class=1)


# ---------------------------------------------------------------------------
# potential seeds

@dataclass(frozen=True)
class PotentialSpec:
    """Index j of the density sequence plus solver resolution and cutoffs.

    k = -6*sqrt(L^2+1), A_j = k/j, alpha_j = 1/j - 2.  eta is the density
    cutoff (plateau [0,1], zero beyond 3/2); it is OFF by default because the
    reference values -k/4 - A_j for z_y(0,0) integrate the bare branches.
    psi radii default to the pullback of the domain boundary so the seed is
    compactly supported inside Omega (see potential_seed).
    """

    j: int
    L: float
    nR: int = 4096
    apply_density_cutoff: bool = False
    eta_plateau: float = 1.0
    eta_support: float = 1.5
    psi_plateau: Optional[float] = None
    psi_support: Optional[float] = None

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"sequence index must be >= 1, got {self.j}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def k(self) -> float:
        return -6.0 * math.sqrt(self.L**2 + 1.0)

    @property
    def A_j(self) -> float:
        return self.k / self.j

    @property
    def alpha_j(self) -> float:
        return 1.0 / self.j - 2.0

    def to_json_dict(self) -> dict:
        return {"j": self.j, "L": self.L, "k": self.k, "A_j": self.A_j,
                "alpha_j": self.alpha_j, "nR": self.nR,
                "apply_density_cutoff": self.apply_density_cutoff}


@dataclass(frozen=True)
class RadialProfile:
    """Radial factor g(R) of a density g(R)*sin(theta) on the disk."""

    spec: PotentialSpec

    def __call__(self, R) -> np.ndarray:
        s = self.spec
        R = np.asarray(R, dtype=float)
        inner = 2.0**s.j * s.A_j
        with np.errstate(invalid="ignore"):
            middle = s.A_j * np.power(np.maximum(R, 1e-300), s.alpha_j + 1.0)
        g = np.where(R <= 2.0**(-s.j), inner,
                     np.where(R <= 1.0, middle,
                              np.where(R <= SUPPORT_RADIUS, s.A_j, 0.0)))
        if s.apply_density_cutoff:
            g = g * quintic_smoothstep_cutoff(s.eta_plateau, s.eta_support)(R)
        return g

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Branch knots; quadratures place panel boundaries here."""
        s = self.spec
        pts = [2.0**(-s.j), 1.0, SUPPORT_RADIUS]
        if s.apply_density_cutoff:
            pts += [s.eta_plateau, s.eta_support]
        return tuple(sorted(pts))

    def norm_l2(self, n: int = 200_000) -> float:
        """||f||_2 over the disk: sqrt(pi * int g^2 R dR) by quadrature."""
        edges = _panel_edges(self, n)
        mid = 0.5 * (edges[1:] + edges[:-1])
        return math.sqrt(math.pi * float(np.sum(self(mid) ** 2 * mid * np.diff(edges))))


def radial_profile(spec: PotentialSpec) -> RadialProfile:
    return RadialProfile(spec)


def _panel_edges(g: Callable, n: int) -> np.ndarray:
    """Uniform panel edges on [0, 2], augmented with the profile's knots."""
    edges = np.linspace(0.0, SUPPORT_RADIUS, n + 1)
    bps = getattr(g, "breakpoints", None)
    if bps:
        extra = [b for b in bps if 0.0 < b < SUPPORT_RADIUS]
        edges = np.unique(np.concatenate([edges, np.asarray(extra, dtype=float)]))
    return edges


@dataclass(frozen=True)
class RadialSolution:
    """Z(R) with z(R, theta) = Z(R)*sin(theta) the Newtonian potential of g*sin.

    Z is represented through its two cumulative moments

        I1(R) = int_0^R s^2 g(s) ds,   I2(R) = int_R^2 g(s) ds,
        Z(R)  = -I1(R)/(2R) - R*I2(R)/2,

    with the moments accumulated by a knot-aware midpoint rule and linearly
    interpolated, so Z and Z' evaluate smoothly at any radius.
    """

    edges: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    total: float  # int_0^2 g
    base_edges: np.ndarray            # the uniform part of the panel grid
    knots: tuple[float, ...] = ()

    @property
    def zprime0(self) -> float:
        """Z'(0) = z_y(0, 0) = -(1/2) int g."""
        return -self.total / 2.0

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        i1 = np.interp(r, self.edges, self.I1)
        i2 = np.interp(r, self.edges, self.I2)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = -i1 / (2.0 * r) - r * i2 / 2.0
        return np.where(r > 0.0, z, 0.0)

    def derivative(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        i1 = np.interp(r, self.edges, self.I1)
        i2 = np.interp(r, self.edges, self.I2)
        with np.errstate(divide="ignore", invalid="ignore"):
            zp = i1 / (2.0 * r**2) - i2 / 2.0
        return np.where(r > 0.0, zp, self.zprime0)

    def ode_residual(self, g: Callable, r_lo: float = 0.05, r_hi: float = 1.9) -> float:
        """Max |Z'' + Z'/R - Z/R^2 - g| on [r_lo, r_hi], by central differences.

        Evaluated on the uniform panel edges (where the cumulative moments
        are quadrature-exact); points within two steps of a declared knot of
        g are skipped, since g itself may jump there.
        """
        sel = (self.base_edges >= r_lo) & (self.base_edges <= r_hi)
        R = self.base_edges[sel]
        h = R[1] - R[0]
        Z = self(R)
        Zpp = (Z[2:] - 2.0 * Z[1:-1] + Z[:-2]) / h**2
        Zp = (Z[2:] - Z[:-2]) / (2.0 * h)
        Rm = R[1:-1]
        res = np.abs(Zpp + Zp / Rm - Z[1:-1] / Rm**2 - np.asarray(g(Rm), dtype=float))
        keep = np.ones_like(Rm, dtype=bool)
        for kn in self.knots:
            keep &= np.abs(Rm - kn) > 2.0 * h
        return float(np.max(res[keep]))


def radial_poisson(g: Callable, nR: int = 4096) -> RadialSolution:
    """Solve Z'' + Z'/R - Z/R^2 = g by variation of parameters.

    Requires g supported in (0, 2]; the tail integral truncates there.
    Panel boundaries respect the profile's knots (its `breakpoints`
    attribute, when present), so branch jumps are never smeared.
    """
    probe = np.linspace(SUPPORT_RADIUS * (1.0 + 1e-9), SUPPORT_RADIUS + 1.0, 64)
    if np.any(np.abs(np.asarray(g(probe))) > 0.0):
        raise UnsupportedProfile("density must vanish beyond R = 2")
    base = np.linspace(0.0, SUPPORT_RADIUS, nR + 1)
    edges = _panel_edges(g, nR)
    mid = 0.5 * (edges[1:] + edges[:-1])
    dx = np.diff(edges)
    gm = np.asarray(g(mid), dtype=float)
    i1 = np.concatenate([[0.0], np.cumsum(mid**2 * gm * dx)])
    flux = np.concatenate([[0.0], np.cumsum(gm * dx)])
    total = float(flux[-1])
    knots = tuple(getattr(g, "breakpoints", ()) or ())
    return RadialSolution(edges, i1, total - flux, total, base, knots)


def convolution_oracle(f: Callable, probes: np.ndarray,
                       n_r: int = 1024, n_theta: int = 720) -> tuple[np.ndarray, np.ndarray]:
    """Direct quadrature of the log kernel and its gradient kernel.

    f(x, y) is a bounded density on the disk of radius 2, sampled on a
    midpoint polar grid.  Cells hit by a probe are excluded from the kernel
    sum and replaced by the analytic average of ln r over an equal-area disk
    (their gradient contribution cancels by symmetry).

    Returns (z, grad_z) with shapes (m,) and (m, 2).
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    dr = SUPPORT_RADIUS / n_r
    dth = 2.0 * math.pi / n_theta
    Rc = (np.arange(n_r) + 0.5) * dr
    Tc = (np.arange(n_theta) + 0.5) * dth
    Rg, Tg = np.meshgrid(Rc, Tc, indexing="ij")
    X = (Rg * np.cos(Tg)).ravel()
    Y = (Rg * np.sin(Tg)).ravel()
    W = (Rg * dr * dth).ravel()                      # cell areas
    F = np.asarray(f(X, Y), dtype=float)
    FW = F * W
    cell_diag2 = ((dr**2 + (Rg * dth) ** 2) / 4.0).ravel()

    z = np.empty(probes.shape[0])
    gz = np.empty((probes.shape[0], 2))
    for m, (px, py) in enumerate(probes):
        ddx = px - X
        ddy = py - Y
        d2 = ddx**2 + ddy**2
        near = d2 < cell_diag2
        safe_d2 = np.where(near, 1.0, d2)
        kern = 0.5 * np.log(safe_d2)
        kern[near] = 0.0
        val = float(kern @ FW)
        if np.any(near):
            # analytic average of ln r over a disk of the same area
            r_eq = np.sqrt(W[near] / math.pi)
            val += float(np.sum(FW[near] * (np.log(r_eq) - 0.5)))
        z[m] = val / (2.0 * math.pi)
        inv = np.where(near, 0.0, 1.0 / safe_d2)
        gz[m, 0] = float((ddx * inv) @ FW) / (2.0 * math.pi)
        gz[m, 1] = float((ddy * inv) @ FW) / (2.0 * math.pi)
    return z, gz


def domain_pullback_radius(L: float) -> float:
    """Radius of the nearest image of the domain boundary under T."""
    return 2.0 * min(L / 2.0, 0.5) / math.sqrt(L**2 + 1.0)


def potential_seed(spec: PotentialSpec, grid: Grid) -> ScalarField:
    """Pull the cut-off potential back to Omega through the affine map T.

    psi is a quintic cutoff whose support sits strictly inside the pullback
    of the domain boundary (plateau at half that radius by default), so the
    seed is compactly supported in the interior: the left edge is exactly
    zero and the stored y-periodicity is genuine.
    """
    if not math.isclose(grid.L, spec.L, rel_tol=1e-12):
        raise ValueError(f"grid width {grid.L} != spec width {spec.L}")
    r_bd = domain_pullback_radius(spec.L)
    plateau = spec.psi_plateau if spec.psi_plateau is not None else 0.5 * r_bd
    support = spec.psi_support if spec.psi_support is not None else 0.9 * r_bd
    psi = quintic_smoothstep_cutoff(plateau, support)

    sol = radial_poisson(radial_profile(spec), spec.nR)
    denom = math.sqrt(spec.L**2 + 1.0)
    X, Y = grid.node_mesh()
    Tx = 2.0 * (X - spec.L / 2.0) / denom
    Ty = 2.0 * (Y - 0.5) / denom
    R = np.hypot(Tx, Ty)
    ratio = np.where(R > 1e-14, sol(R) / np.where(R > 1e-14, R, 1.0), sol.zprime0)
    values = psi(R) * ratio * Ty
    values[0, :] = 0.0  # no-op (psi vanishes there); keeps the edge exact
    return ScalarField(grid, values, claimed_class=3)
