"""Logarithmic radial grids, r dr quadrature, and the radial operators.

Everything downstream lives on a log-uniform radial grid.  All integrals are
taken against the planar radial measure r dr, so the quadrature weights built
here satisfy

    sum_j w_j f(r_j)  ~=  int_0^inf f(r) r dr

for smooth decaying f.  Derivatives are taken in x = log r with 4th-order
finite differences; in these coordinates the radial Laplacian is simply

    Lap f = e^{-2x} d^2f/dx^2

which keeps the r -> 0 coordinate singularity out of the stencils.

The linearized operators around the m=1 harmonic map are

    L  = d_r + h3/r,        L* = -d_r + (h3 - 1)/r,
    H  = L* L = -Lap + V,    V  = 1/r^2 - 8/(1+r^2)^2,
    Ht = L L* = -Lap + Vt,   Vt = 4 / (r^2 (r^2+1)),

with h1 = sech(log r), h3 = tanh(log r).  Singular potentials are always
evaluated analytically at the nodes, never by dividing sampled fields.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, TailError

__all__ = [
    "RadialGrid",
    "RadialField",
    "make_log_grid",
    "h1_profile",
    "h3_profile",
    "potential_v",
    "potential_vt",
    "d_dx",
    "dd_dx",
    "apply_L",
    "apply_Lstar",
    "apply_H",
    "apply_Ht",
    "apply_Ht_lambda",
    "r_dr_inverse",
    "resonance_phi0",
    "resonance_psi0",
]


# --------------------------------------------------------------------------
# grid and quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """Log-uniform radial nodes with r dr quadrature weights.

    Attributes
    ----------
    r : ndarray
        Strictly increasing positive nodes.
    w : ndarray
        Weights such that sum(w * f(r)) approximates int f r dr for smooth
        decaying f (Simpson in log r, with a closure correction for the
        interval (0, r_min) assuming f bounded at the origin).
    x : ndarray
        log(r), uniformly spaced.
    dx : float
        Spacing of x.
    """

    r: np.ndarray
    w: np.ndarray
    x: np.ndarray
    dx: float
    r_min: float
    r_max: float

    @property
    def n(self) -> int:
        return self.r.size

    def integrate(self, f: np.ndarray) -> complex | float:
        """Quadrature of f against r dr."""
        return np.sum(self.w * f)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex | float:
        """L^2(r dr) inner product <f, g> = int f conj(g) r dr."""
        return np.sum(self.w * f * np.conj(g))

    def norm(self, f: np.ndarray) -> float:
        """L^2(r dr) norm."""
        return float(np.sqrt(np.sum(self.w * np.abs(f) ** 2).real))

    def index_at(self, r0: float) -> int:
        """Index of the node nearest to radius r0."""
        return int(np.argmin(np.abs(self.x - np.log(r0))))

    def interp(self, f: np.ndarray, r0: float) -> complex | float:
        """4-point Lagrange interpolation of a sampled field at radius r0."""
        if not (self.r[0] <= r0 <= self.r[-1]):
            raise ParameterError(f"radius {r0} outside grid [{self.r[0]}, {self.r[-1]}]")
        x0 = np.log(r0)
        j = int(np.clip(np.searchsorted(self.x, x0) - 1, 1, self.n - 3))
        idx = np.arange(j - 1, j + 3)
        t = (x0 - self.x[idx]) / self.dx
        wts = np.ones(4)
        for a in range(4):
            for b in range(4):
                if a != b:
                    wts[a] *= t[b] / (t[b] - t[a])
        return np.sum(wts * f[idx])

    def fingerprint(self) -> str:
        """Short hash of the grid parameters, used to key table caches."""
        import hashlib

        payload = f"loggrid:{self.r_min:.17g}:{self.r_max:.17g}:{self.n}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class RadialField:
    """A sampled radial field plus its r -> 0 parity, for file round trips.

    parity is the leading power p in f ~ c r^p (0, 1 or 2); None means
    unknown, in which case boundary stencils fall back to one-sided forms.
    """

    values: np.ndarray
    parity: int | None = None

    def validate(self, grid: RadialGrid) -> None:
        if self.values.shape != grid.r.shape:
            raise ParameterError(
                f"field length {self.values.shape} does not match grid {grid.r.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("field has non-finite entries")


def make_log_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    """Build a log-uniform grid with r dr quadrature weights.

    The weights realize the composite trapezoid rule in x = log r applied to
    the integrand f(e^x) e^{2x}.  For smooth integrands whose derivatives
    vanish at both grid ends (decaying fields; the e^{2x} factor kills the
    inner end) the Euler-Maclaurin boundary terms vanish and the rule is
    accurate far beyond its nominal order.  The weight pattern is also
    smooth along the grid, which downstream consumers rely on (the evolution
    symmetrizes operators in this metric).  The first weight absorbs
    int_0^{r_min} f r dr ~ f(r_min) r_min^2 / 2 so fields bounded at the
    origin integrate to full precision despite the truncated domain.
    """
    if not (0 < r_min < 1 < r_max):
        raise ParameterError(f"need 0 < r_min < 1 < r_max, got ({r_min}, {r_max})")
    if n < 16:
        raise ParameterError(f"need n >= 16 nodes, got {n}")
    x = np.linspace(np.log(r_min), np.log(r_max), n)
    dx = float(x[1] - x[0])
    r = np.exp(x)
    w = dx * r**2
    w[0] *= 0.5
    w[-1] *= 0.5
    w[0] += 0.5 * r_min**2  # closure of (0, r_min) for integrands bounded at 0
    grid = RadialGrid(r=r, w=w, x=x, dx=dx, r_min=float(r_min), r_max=float(r_max), )
    if r_min <= 1e-3 and r_max >= 1e3:
        gauss = float(np.sum(w * np.exp(-(r**2))))
        if abs(gauss - 0.5) > 1e-8 * 0.5:
            raise ParameterError(
                f"quadrature self-test failed: sum w exp(-r^2) = {gauss!r}, expected 0.5"
            )
    return grid


# --------------------------------------------------------------------------
# profiles and potentials (m = 1 linearization)
# --------------------------------------------------------------------------

def h1_profile(r: np.ndarray) -> np.ndarray:
    """h1(r) = 2r/(1+r^2) = sech(log r); the zero resonance of H."""
    return 1.0 / np.cosh(np.log(r))


def h3_profile(r: np.ndarray) -> np.ndarray:
    """h3(r) = (r^2-1)/(r^2+1) = tanh(log r)."""
    return np.tanh(np.log(r))


def potential_v(r: np.ndarray) -> np.ndarray:
    """V(r) = 1/r^2 - 8/(1+r^2)^2, the potential of H."""
    return 1.0 / r**2 - 8.0 / (1.0 + r**2) ** 2


def potential_vt(r: np.ndarray) -> np.ndarray:
    """Vt(r) = 4/(r^2 (r^2+1)), the potential of Ht."""
    return 4.0 / (r**2 * (r**2 + 1.0))


def resonance_phi0(r: np.ndarray) -> np.ndarray:
    """phi0 = h1 = 2r/(1+r^2), solving L phi0 = 0 and H phi0 = 0."""
    return h1_profile(r)


def resonance_psi0(r: np.ndarray) -> np.ndarray:
    """psi0 = ((1+r^2) log(1+r^2)/r^2 - 1)/2, solving L* psi0 = phi0."""
    return 0.5 * ((1.0 + r**2) * np.log1p(r**2) / r**2 - 1.0)


# --------------------------------------------------------------------------
# finite differences in x = log r
# --------------------------------------------------------------------------

def _inner_ghosts(f: np.ndarray, x: np.ndarray, dx: float, parity: int) -> np.ndarray:
    """Two ghost values below x[0] for a field f ~ r^p (a + b r^2) near 0.

    Fitting (a, b) from the first two nodes is well conditioned: b multiplies
    e^{2x} ~ r_min^2 and the division by (e^{2x2} - e^{2x1}) only rescales the
    already tiny curvature term.
    """
    v = f[:2] * np.exp(-parity * x[:2])
    e2 = np.exp(2 * x[:2])
    b = (v[1] - v[0]) / (e2[1] - e2[0])
    a = v[0] - b * e2[0]
    xg = np.array([x[0] - 2 * dx, x[0] - dx])
    return np.exp(parity * xg) * (a + b * np.exp(2 * xg))


def d_dx(
    f: np.ndarray, dx: float, ghosts: np.ndarray | None = None
) -> np.ndarray:
    """4th-order first derivative on a uniform grid in x.

    ghosts, when given, are the two values below the first node (used for
    centered stencils there); otherwise the boundary stencils are one-sided.
    The outer boundary always uses one-sided stencils.
    """
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    if ghosts is not None:
        out[0] = (ghosts[0] - 8 * ghosts[1] + 8 * f[1] - f[2]) / (12 * dx)
        out[1] = (ghosts[1] - 8 * f[0] + 8 * f[2] - f[3]) / (12 * dx)
    else:
        out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dx)
        out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dx)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dx)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dx)
    return out


def dd_dx(
    f: np.ndarray, dx: float, ghosts: np.ndarray | None = None
) -> np.ndarray:
    """4th-order second derivative on a uniform grid in x."""
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (
        12 * dx**2
    )
    if ghosts is not None:
        out[0] = (-ghosts[0] + 16 * ghosts[1] - 30 * f[0] + 16 * f[1] - f[2]) / (
            12 * dx**2
        )
        out[1] = (-ghosts[1] + 16 * f[0] - 30 * f[1] + 16 * f[2] - f[3]) / (12 * dx**2)
    else:
        out[0] = (
            45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]
        ) / (12 * dx**2)
        out[1] = (
            10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]
        ) / (12 * dx**2)
    out[-2] = (
        10 * f[-1] - 15 * f[-2] - 4 * f[-3] + 14 * f[-4] - 6 * f[-5] + f[-6]
    ) / (12 * dx**2)
    out[-1] = (
        45 * f[-1] - 154 * f[-2] + 214 * f[-3] - 156 * f[-4] + 61 * f[-5] - 10 * f[-6]
    ) / (12 * dx**2)
    return out


def _d_dx_parity(grid: RadialGrid, f: np.ndarray, parity: int | None) -> np.ndarray:
    ghosts = None if parity is None else _inner_ghosts(f, grid.x, grid.dx, parity)
    return d_dx(f, grid.dx, ghosts)


def d_dr(grid: RadialGrid, f: np.ndarray, parity: int | None = None) -> np.ndarray:
    """Radial derivative via the log-grid stencils."""
    return _d_dx_parity(grid, f, parity) / grid.r


# --------------------------------------------------------------------------
# operators
#
# The singular 1/r^2 parts are removed analytically before differencing:
# for any f and integer k,
#     -Lap f + k^2 f / r^2 = -e^{(k-2)x} (d_x^2 + 2k d_x) (e^{-kx} f),
# so H (k=1) and Ht (k=2) act on the smooth factor g = r^{-k} f with no
# large-cancellation at the inner boundary.  The parity hint only steers the
# ghost extrapolation of g.
# --------------------------------------------------------------------------

def apply_L(grid: RadialGrid, f: np.ndarray, parity: int | None = 1) -> np.ndarray:
    """L f = f' + (h3/r) f.  Annihilates phi0 = h1.

    Evaluated as g' + (1+h3) g with g = f/r; the coefficient 1+h3 =
    2/(1+e^{-2x}) is computed in a form exact near r = 0.
    """
    g = f * np.exp(-grid.x)
    ghosts = None if parity is None else _inner_ghosts(g, grid.x, grid.dx, parity - 1)
    one_plus_h3 = 2.0 / (1.0 + np.exp(-2.0 * grid.x))
    return d_dx(g, grid.dx, ghosts) + one_plus_h3 * g


def apply_Lstar(grid: RadialGrid, f: np.ndarray, parity: int | None = 2) -> np.ndarray:
    """L* f = -f' + ((h3-1)/r) f, the L^2(r dr) adjoint of L.

    Evaluated as e^x (-g' - (2 + (1-h3)) g) with g = f/r^2.
    """
    g = f * np.exp(-2.0 * grid.x)
    ghosts = None if parity is None else _inner_ghosts(g, grid.x, grid.dx, parity - 2)
    one_minus_h3 = 2.0 / (1.0 + np.exp(2.0 * grid.x))
    return grid.r * (-d_dx(g, grid.dx, ghosts) - (2.0 + one_minus_h3) * g)


def _minus_lap_plus_ksq(
    grid: RadialGrid, f: np.ndarray, k: int, parity: int | None
) -> np.ndarray:
    """-Lap f + k^2 f / r^2, via the cancellation-free form above."""
    g = f * np.exp(-k * grid.x)
    ghosts = None if parity is None else _inner_ghosts(g, grid.x, grid.dx, parity - k)
    gx = d_dx(g, grid.dx, ghosts)
    gxx = dd_dx(g, grid.dx, ghosts)
    return -np.exp((k - 2.0) * grid.x) * (gxx + 2.0 * k * gx)


def apply_H(grid: RadialGrid, f: np.ndarray, parity: int | None = 1) -> np.ndarray:
    """H f = -Lap f + V f with V = 1/r^2 - 8/(1+r^2)^2."""
    return _minus_lap_plus_ksq(grid, f, 1, parity) - 8.0 / (1.0 + grid.r**2) ** 2 * f


def apply_Ht(grid: RadialGrid, f: np.ndarray, parity: int | None = 2) -> np.ndarray:
    """Ht f = -Lap f + Vt f with Vt = 4/(r^2(r^2+1)) = 4/r^2 - 4/(1+r^2)."""
    return _minus_lap_plus_ksq(grid, f, 2, parity) - 4.0 / (1.0 + grid.r**2) * f


def apply_Ht_lambda(
    grid: RadialGrid, f: np.ndarray, lam: float, parity: int | None = 2
) -> np.ndarray:
    """Rescaled operator Ht_lambda f = -Lap f + lam^2 Vt(lam r) f.

    lam^2 Vt(lam r) = 4/r^2 - 4 lam^2/(1 + lam^2 r^2): same singular part.
    """
    if lam <= 0:
        raise ParameterError(f"scale must be positive, got {lam}")
    reg = 4.0 * lam**2 / (1.0 + (lam * grid.r) ** 2)
    return _minus_lap_plus_ksq(grid, f, 2, parity) - reg * f


# --------------------------------------------------------------------------
# tail-closed antiderivative [r d_r]^{-1}
# --------------------------------------------------------------------------

def _power_tail_fit(grid: RadialGrid, f: np.ndarray) -> tuple[float, float]:
    """Fit |f| ~ c r^{-p} over the last decade; returns (c, p) at r_max."""
    mask = grid.r >= grid.r_max / 10.0
    rr = grid.r[mask]
    ff = np.abs(f[mask])
    good = ff > 0
    if good.sum() < 4:
        return 0.0, np.inf
    coef = np.polyfit(np.log(rr[good]), np.log(ff[good]), 1)
    p = -coef[0]
    c = np.exp(coef[1] + coef[0] * np.log(grid.r_max))  # |f(r_max)| per the fit
    return float(c), float(p)


def r_dr_inverse(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """[r d_r]^{-1} f (r) = -int_r^inf f(s)/s ds.

    Computed as a reverse cumulative trapezoid in log r; the tail beyond
    r_max is closed by fitting f ~ c r^{-p} on the last decade and integrating
    the fit analytically.  Fields whose fitted tail does not decay (p <= 1)
    are rejected unless the tail amplitude is negligible.
    """
    f = np.asarray(f)
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    outer = float(np.max(np.abs(f[grid.r >= grid.r_max / 10.0]))) if f.size else 0.0
    tail = 0.0 + 0.0j if np.iscomplexobj(f) else 0.0
    if outer > 0.0:
        c, p = _power_tail_fit(grid, f)
        if p <= 1.0:
            if outer > 1e-10 * scale:
                raise TailError(
                    f"tail of integrand decays like r^{-p:.2f}; need p > 1 for "
                    "the [r d_r]^{-1} closure"
                )
            # noise-level tail: close with zero
        else:
            # int_{r_max}^inf f/s ds with f ~ f(r_max) (r/r_max)^{-p}
            tail = f[-1] / p
    # trapezoid in x of f, accumulated from the outside in
    seg = 0.5 * grid.dx * (f[1:] + f[:-1])
    out = np.empty_like(f)
    out[-1] = 0.0
    out[:-1] = np.cumsum(seg[::-1])[::-1]
    return -(out + tail)


def check_decay(grid: RadialGrid, f: np.ndarray, what: str = "field") -> None:
    """Warn when a field carries noticeable mass near the outer boundary."""
    mask = grid.r >= grid.r_max / 10.0
    outer = np.sum(grid.w[mask] * np.abs(f[mask]) ** 2)
    total = np.sum(grid.w * np.abs(f) ** 2)
    if total > 0 and outer > 1e-4 * total:
        warnings.warn(
            f"{what} carries {outer/total:.2e} of its mass in the last decade "
            "of the grid; tail handling may dominate the error",
            stacklevel=3,
        )
