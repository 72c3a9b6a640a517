"""Coulomb-gauge dictionary between equivariant maps and the reduced field.

Forward direction: a 1-equivariant profile u close to the harmonic map gets a
unique orthonormal frame (v, w) with the gauge condition d_r v . w = 0 and
frame (i, j, k) at infinity; the differentiated fields are

    psi1 = u' . v + i u' . w,   psi2 = w3 - i v3,   A2 = u3,
    psi  = psi1 - i psi2 / r,
    A0   = -|psi|^2/2 + Im(psi2 conj(psi))/r
           + [r d_r]^{-1} (|psi|^2 - 2 Im(psi2 conj(psi))/r).

Reverse direction: given small psi, the compatibility system

    d_r A2   = Im(psi conj(psi2)) + |psi2|^2 / r,
    d_r psi2 = i A2 psi - A2 psi2 / r,

with A2 -> 1 and psi2 - i h1 -> 0 at infinity has a unique solution on the
sphere A2^2 + |psi2|^2 = 1; it is found by a Picard fixed point for the
far-field correction on [R, r_max] (R ~ 50, where the contraction constant
~ R^{-1/4} is comfortably small) followed by inward integration.  The map
itself is then recovered by transporting the frame matrix inward with
d_r O = O R(psi1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryError,
    IntegrationError,
    ParameterError,
    ReconstructionError,
    SmallnessError,
)
from .grid import RadialGrid, d_dr
from .soliton import SphereProfile, h_profiles

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not args else args[0]

__all__ = [
    "CoulombFrame",
    "GaugeFields",
    "ModulationParams",
    "coulomb_frame",
    "derive_fields",
    "fields_of_map",
    "compute_A0",
    "reconstruct_fields",
    "reconstruct_map",
    "modulation_params",
    "he_distance",
    "compatibility_residual",
]

# interpolation weights for the midpoint of a uniform 4-point stencil
_MID4 = np.array([-1.0, 9.0, 9.0, -1.0]) / 16.0


@dataclass
class CoulombFrame:
    """Per-node orthogonal matrices O(r_j) with columns (v, w, u)."""

    o: np.ndarray  # shape (n, 3, 3)

    @property
    def v(self) -> np.ndarray:
        return self.o[:, :, 0].T

    @property
    def w(self) -> np.ndarray:
        return self.o[:, :, 1].T

    @property
    def u(self) -> np.ndarray:
        return self.o[:, :, 2].T

    def orthogonality_defect(self) -> float:
        gram = np.einsum("nij,nik->njk", self.o, self.o)
        return float(np.max(np.abs(gram - np.eye(3))))


@dataclass
class GaugeFields:
    """The differentiated fields and connection coefficients of one map."""

    psi1: np.ndarray
    psi2: np.ndarray
    a2: np.ndarray
    a0: np.ndarray
    psi: np.ndarray

    def validate(self, grid: RadialGrid, tol: float = 1e-8) -> None:
        sphere = np.max(np.abs(self.a2**2 + np.abs(self.psi2) ** 2 - 1.0))
        if sphere > tol:
            raise ParameterError(f"gauge sphere constraint off by {sphere:.2e}")
        ident = np.max(np.abs(self.psi - (self.psi1 - 1j * self.psi2 / grid.r)))
        if ident > 1e-10 * max(1.0, np.max(np.abs(self.psi1))):
            raise ParameterError("psi != psi1 - i psi2 / r")
        if abs(self.a2[-1] - 1.0) > 1e-3:
            raise ParameterError(f"A2(r_max) = {self.a2[-1]:.6f}, expected -> 1")


@dataclass(frozen=True)
class ModulationParams:
    """Soliton parameters read off the gauge fields at the matching radius."""

    alpha: float
    lam: float
    variant: str = "analytic"


def _interp_mid(f: np.ndarray) -> np.ndarray:
    """4-point interpolation of f at the n-1 interval midpoints."""
    mid = np.empty(f.shape[0] - 1, dtype=f.dtype)
    mid[1:-1] = (
        _MID4[0] * f[:-3] + _MID4[1] * f[1:-2] + _MID4[2] * f[2:-1] + _MID4[3] * f[3:]
    )
    # one-sided cubic at the two boundary intervals
    mid[0] = (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16.0
    mid[-1] = (5 * f[-1] + 15 * f[-2] - 5 * f[-3] + f[-4]) / 16.0
    return mid


def he_distance(grid: RadialGrid, u: SphereProfile, v: SphereProfile) -> float:
    """Discrete equivariant H^1-type distance between two profiles,

    ( int |d_r(u-v)|^2 + (m^2/r^2)((u-v)_1^2 + (u-v)_2^2) r dr )^{1/2}.
    """
    if u.m != v.m:
        raise ParameterError("profiles have different equivariance classes")
    d = u.u - v.u
    dd = np.stack([d_dr(grid, d[i]) for i in range(3)])
    integrand = np.sum(dd**2, axis=0) + u.m**2 * (d[0] ** 2 + d[1] ** 2) / grid.r**2
    return float(np.sqrt(grid.integrate(integrand)))


# --------------------------------------------------------------------------
# forward: map -> frame -> fields
# --------------------------------------------------------------------------

def _project_frame(o: np.ndarray, u_exact: np.ndarray) -> np.ndarray:
    """Snap a near-orthogonal frame to (v, w, u_exact) exactly orthonormal.

    (v, w) are projected to the tangent plane of u and orthonormalized by a
    symmetric 2x2 polar factor, which commutes with constant in-plane
    rotations; the gauge covariance of the fields survives to round-off.
    """
    u = u_exact / np.linalg.norm(u_exact)
    t1 = o[:, 0] - np.dot(o[:, 0], u) * u
    t2 = o[:, 1] - np.dot(o[:, 1], u) * u
    a, b, c = np.dot(t1, t1), np.dot(t1, t2), np.dot(t2, t2)
    sd = np.sqrt(a * c - b * b)
    s = np.sqrt(a + c + 2.0 * sd)
    # G^{-1/2} = sqrt(trace + 2 sqrt(det)) * (G + sqrt(det) I)^{-1}
    den = (a + sd) * (c + sd) - b * b
    v = (t1 * (c + sd) - t2 * b) * (s / den)
    w = (-t1 * b + t2 * (a + sd)) * (s / den)
    return np.stack([v, w, u], axis=1)


def coulomb_frame(
    grid: RadialGrid,
    u: SphereProfile,
    boundary_rotation: float = 0.0,
    smallness_threshold: float = 0.3,
) -> CoulombFrame:
    """Transport the Coulomb frame inward from O(r_max) = I.

    The frame ODE d_r O = M O with M = u' wedge u is integrated with RK4 on
    the log grid; each step the frame is re-orthonormalized against the input
    profile (nearest-frame projection), which keeps the gauge condition and
    kills the secular drift of plain transport.  boundary_rotation rotates
    (v, w) at infinity, multiplying the fields by a constant phase.
    """
    if u.m != 1:
        raise ParameterError("Coulomb gauge reduction is implemented for m = 1 only")
    from .soliton import SolitonParams, soliton_profile

    q = soliton_profile(SolitonParams(1, 0.0, 1.0), grid)
    dist = he_distance(grid, u, q)
    if dist > smallness_threshold:
        raise SmallnessError(
            f"profile is {dist:.3f} from the harmonic map in the discrete H1 "
            f"distance; gauge construction needs <= {smallness_threshold}"
        )
    if np.linalg.norm(u.u[:, -1] - np.array([0.0, 0.0, 1.0])) > 0.1:
        raise BoundaryError("far field is not soliton-like (u(r_max) != k)")

    du = np.stack(
        [d_dr(grid, u.u[0], parity=1), d_dr(grid, u.u[1], parity=1), d_dr(grid, u.u[2])]
    )
    u_mid = np.stack([_interp_mid(u.u[i]) for i in range(3)])
    du_mid = np.stack([_interp_mid(du[i]) for i in range(3)])

    n = grid.n
    o = np.empty((n, 3, 3))
    ct, st = np.cos(boundary_rotation), np.sin(boundary_rotation)
    o_end = np.array([[ct, -st, 0.0], [st, ct, 0.0], [0.0, 0.0, 1.0]])
    o[-1] = _project_frame(o_end, u.u[:, -1])

    def a_matrix(uu, duu, r):
        m = np.outer(duu, uu) - np.outer(uu, duu)
        return r * m  # d/dx = r * d/dr

    h = grid.dx
    drift = 0.0
    for j in range(n - 1, 0, -1):
        a1 = a_matrix(u.u[:, j], du[:, j], grid.r[j])
        rm = np.sqrt(grid.r[j] * grid.r[j - 1])
        am = a_matrix(u_mid[:, j - 1], du_mid[:, j - 1], rm)
        a4 = a_matrix(u.u[:, j - 1], du[:, j - 1], grid.r[j - 1])
        oj = o[j]
        k1 = a1 @ oj
        k2 = am @ (oj - 0.5 * h * k1)
        k3 = am @ (oj - 0.5 * h * k2)
        k4 = a4 @ (oj - h * k3)
        raw = oj - (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        drift = max(drift, float(np.max(np.abs(raw[:, 2] - u.u[:, j - 1]))))
        o[j - 1] = _project_frame(raw, u.u[:, j - 1])
    if drift > 1e-6:
        raise IntegrationError(
            f"frame transport drifted by {drift:.2e} per step against the profile"
        )
    return CoulombFrame(o)


def derive_fields(
    grid: RadialGrid, u: SphereProfile, frame: CoulombFrame
) -> GaugeFields:
    """Differentiated fields of a map in its Coulomb frame (m = 1)."""
    if u.m != 1:
        raise ParameterError("gauge fields are implemented for m = 1 only")
    du = np.stack(
        [d_dr(grid, u.u[0], parity=1), d_dr(grid, u.u[1], parity=1), d_dr(grid, u.u[2])]
    )
    v, w = frame.v, frame.w
    psi1 = np.einsum("in,in->n", du, v) + 1j * np.einsum("in,in->n", du, w)
    psi2 = w[2] - 1j * v[2]
    a2 = u.u[2].copy()
    psi = psi1 - 1j * psi2 / grid.r
    a0 = compute_A0(grid, psi, psi2)
    return GaugeFields(psi1=psi1, psi2=psi2, a2=a2, a0=a0, psi=psi)


def fields_of_map(
    grid: RadialGrid, u: SphereProfile, boundary_rotation: float = 0.0
) -> GaugeFields:
    """Convenience: Coulomb frame plus derived fields in one call."""
    return derive_fields(grid, u, coulomb_frame(grid, u, boundary_rotation))


def compute_A0(grid: RadialGrid, psi: np.ndarray, psi2: np.ndarray) -> np.ndarray:
    """Temporal connection coefficient, the decaying solution of

        d_r A0 = -(1/(2 r^2)) d_r (r^2 |psi1|^2 - |psi2|^2).

    Integrating by parts with F = |psi|^2 - 2 Im(psi2 conj(psi))/r
    (= |psi1|^2 - |psi2|^2/r^2) gives

        A0 = -F/2 - [r d_r]^{-1} F,

    with zero integration constant (frame pinned at infinity).
    """
    from .grid import r_dr_inverse

    cross = (psi2 * np.conj(psi)).imag
    dens = np.abs(psi) ** 2
    f = dens - 2.0 * cross / grid.r
    return -0.5 * f - r_dr_inverse(grid, f)


# --------------------------------------------------------------------------
# reverse: psi -> (psi2, A2) -> map
# --------------------------------------------------------------------------

def _suffix_integral_r(
    r: np.ndarray, f: np.ndarray, r_max: float, tail_scale: float
) -> np.ndarray:
    """J f (r_j) = int_{r_j}^{inf} f dr, trapezoid plus a power-law tail."""
    seg = 0.5 * np.diff(r) * (f[1:] + f[:-1])
    out = np.empty_like(f)
    out[-1] = 0.0
    out[:-1] = np.cumsum(seg[::-1])[::-1]
    if abs(f[-1]) > 1e-14 * tail_scale:
        # fit |f| ~ c r^-p over the outer quarter of the segment
        k = max(4, f.size // 4)
        ff = np.abs(f[-k:])
        good = ff > 0
        if good.sum() >= 4:
            p = -np.polyfit(np.log(r[-k:][good]), np.log(ff[good]), 1)[0]
            if p > 1.0:
                out += f[-1] * r_max / (p - 1.0)
            # non-decaying noise tails are dropped
    return out


def reconstruct_fields(
    grid: RadialGrid,
    psi: np.ndarray,
    r_match: float = 50.0,
    tol: float = 1e-10,
    max_iter: int = 80,
    smallness_threshold: float = 0.6,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the compatibility system for (psi2, A2) given the reduced field.

    Far field ([r_match, r_max]): psi2 = i h1 + i g + Psi with g the decaying
    solution of L g = psi and Psi the Picard fixed point of

        Psi(r) = -h1(r) int_r^inf h1^{-1} [ i (A2-1) psi
                                            + (h3 - A2) psi2 / s ] ds,

    A2 = sqrt(1 - |psi2|^2) there.  The interior is filled by integrating the
    ODE system inward from r_match with the sphere constraint renormalized at
    every step.
    """
    psi = np.asarray(psi, dtype=complex)
    # proxy for the dyadic smallness the fixed point needs: the L^2 mass
    # plus the <r>^{1/2}-weighted sup (both controlled by the dyadic norm);
    # genuine non-contraction is still caught by the iteration itself
    l2 = grid.norm(psi)
    wsup = float(np.max(np.sqrt(np.hypot(grid.r, 1.0)) * np.abs(psi)))
    if l2 + wsup > smallness_threshold:
        raise SmallnessError(
            f"reduced field has L2 + weighted-sup size {l2 + wsup:.3f}; "
            f"reconstruction is only attempted below {smallness_threshold}"
        )
    i0 = int(np.searchsorted(grid.r, r_match))
    if i0 >= grid.n - 16:
        raise ParameterError("matching radius too close to the grid boundary")

    rs = grid.r[i0:]
    h1s, h3s = 1.0 / np.cosh(grid.x[i0:]), np.tanh(grid.x[i0:])
    psi_s = psi[i0:]
    tail_scale = float(np.max(np.abs(psi))) + 1e-300

    g = -h1s * _suffix_integral_r(rs, psi_s / h1s, grid.r_max, tail_scale)
    psi2_base = 1j * h1s + 1j * g
    big_psi = np.zeros_like(psi_s)
    converged = False
    for _ in range(max_iter):
        psi2_s = psi2_base + big_psi
        a2_s = np.sqrt(np.maximum(1.0 - np.abs(psi2_s) ** 2, 0.0))
        f = 1j * (a2_s - 1.0) * psi_s + (h3s - a2_s) / rs * psi2_s
        new = -h1s * _suffix_integral_r(rs, f / h1s, grid.r_max, tail_scale)
        delta = float(np.max(np.abs(new - big_psi)))
        big_psi = new
        if delta < tol:
            converged = True
            break
    if not converged:
        raise SmallnessError(
            f"far-field fixed point did not contract to {tol} in {max_iter} sweeps"
        )
    psi2_s = psi2_base + big_psi
    a2_s = np.sqrt(np.maximum(1.0 - np.abs(psi2_s) ** 2, 0.0))

    psi2 = np.empty(grid.n, dtype=complex)
    a2 = np.empty(grid.n)
    psi2[i0:] = psi2_s
    a2[i0:] = a2_s

    psi_mid = _interp_mid(psi)
    a2_in, re_in, im_in = _comp_inward(
        float(a2_s[0]),
        float(psi2_s[0].real),
        float(psi2_s[0].imag),
        grid.r,
        psi.real.copy(),
        psi.imag.copy(),
        psi_mid.real.copy(),
        psi_mid.imag.copy(),
        grid.dx,
        i0,
    )
    a2[: i0 + 1] = a2_in[: i0 + 1]
    psi2[: i0 + 1] = re_in[: i0 + 1] + 1j * im_in[: i0 + 1]
    return psi2, a2


@njit(cache=True)
def _comp_inward(a2_0, re_0, im_0, r, psi_re, psi_im, mid_re, mid_im, dx, i0):
    """Inward RK4 for d_x A2 = r Im(psi conj(psi2)) + |psi2|^2,
    d_x psi2 = i r A2 psi - A2 psi2, renormalized to the sphere each step."""
    n = r.shape[0]
    a2 = np.zeros(n)
    re = np.zeros(n)
    im = np.zeros(n)
    a2[i0] = a2_0
    re[i0] = re_0
    im[i0] = im_0
    for j in range(i0, 0, -1):
        rj = r[j]
        rm = np.sqrt(r[j] * r[j - 1])
        rl = r[j - 1]
        pr1, pi1 = psi_re[j], psi_im[j]
        prm, pim = mid_re[j - 1], mid_im[j - 1]
        pr4, pi4 = psi_re[j - 1], psi_im[j - 1]
        a, x, y = a2[j], re[j], im[j]

        # k1 at (rj, psi_j)
        ka1 = rj * (pi1 * x - pr1 * y) + (x * x + y * y)
        kx1 = -rj * a * pi1 - a * x
        ky1 = rj * a * pr1 - a * y
        a1, x1, y1 = a - 0.5 * dx * ka1, x - 0.5 * dx * kx1, y - 0.5 * dx * ky1

        ka2 = rm * (pim * x1 - prm * y1) + (x1 * x1 + y1 * y1)
        kx2 = -rm * a1 * pim - a1 * x1
        ky2 = rm * a1 * prm - a1 * y1
        a2_, x2, y2 = a - 0.5 * dx * ka2, x - 0.5 * dx * kx2, y - 0.5 * dx * ky2

        ka3 = rm * (pim * x2 - prm * y2) + (x2 * x2 + y2 * y2)
        kx3 = -rm * a2_ * pim - a2_ * x2
        ky3 = rm * a2_ * prm - a2_ * y2
        a3, x3, y3 = a - dx * ka3, x - dx * kx3, y - dx * ky3

        ka4 = rl * (pi4 * x3 - pr4 * y3) + (x3 * x3 + y3 * y3)
        kx4 = -rl * a3 * pi4 - a3 * x3
        ky4 = rl * a3 * pr4 - a3 * y3

        an = a - dx / 6.0 * (ka1 + 2 * ka2 + 2 * ka3 + ka4)
        xn = x - dx / 6.0 * (kx1 + 2 * kx2 + 2 * kx3 + kx4)
        yn = y - dx / 6.0 * (ky1 + 2 * ky2 + 2 * ky3 + ky4)
        s = 1.0 / np.sqrt(an * an + xn * xn + yn * yn)
        a2[j - 1] = an * s
        re[j - 1] = xn * s
        im[j - 1] = yn * s
    return a2, re, im


# note on the imaginary-part convention above:
#   Im(psi conj(psi2)) = psi_im * psi2_re - psi_re * psi2_im
#   i A2 psi = A2 (i psi_re - psi_im) -> d(re) has -A2 psi_im, d(im) has A2 psi_re


def reconstruct_map(
    grid: RadialGrid,
    psi: np.ndarray,
    psi2: np.ndarray,
    a2: np.ndarray,
    row_tol: float = 1e-5,
) -> tuple[SphereProfile, CoulombFrame]:
    """Recover the map from gauge fields by frame transport d_r O = O R(psi1).

    O(r_max) = I; the known bottom row (v3, w3, u3) = (-Im psi2, Re psi2, A2)
    is used as a consistency check on the transported frame.
    """
    sphere = np.max(np.abs(a2**2 + np.abs(psi2) ** 2 - 1.0))
    if sphere > 1e-8:
        raise ParameterError(f"input fields off the gauge sphere by {sphere:.2e}")
    psi1 = psi + 1j * psi2 / grid.r
    psi1_mid = _interp_mid(psi1)
    # initialize at r_max from the known bottom row (v3, w3, u3); completing
    # it with v at zero azimuth realizes the v -> i, w -> j condition at
    # infinity up to O(1/r_max^2) instead of the O(1/r_max) of O = I
    row3 = np.array([-psi2[-1].imag, psi2[-1].real, a2[-1]])
    row3 /= np.linalg.norm(row3)
    row1 = np.array([1.0, 0.0, 0.0]) - row3[0] * row3
    row1 /= np.linalg.norm(row1)
    o_end = np.stack([row1, np.cross(row3, row1), row3], axis=0)
    o = _frame_inward(
        grid.r, psi1.real.copy(), psi1.imag.copy(),
        psi1_mid.real.copy(), psi1_mid.imag.copy(), grid.dx, o_end,
    )
    # exact orthonormalization of the transported frames (batched polar)
    uu, _, vv = np.linalg.svd(o)
    o = uu @ vv
    resid = np.max(
        np.abs(
            np.stack([o[:, 2, 0] - (-psi2.imag), o[:, 2, 1] - psi2.real, o[:, 2, 2] - a2])
        )
    )
    if resid > row_tol:
        raise ReconstructionError(
            f"bottom-row consistency residual {resid:.2e} exceeds {row_tol}"
        )
    u = SphereProfile(np.ascontiguousarray(o[:, :, 2].T), m=1)
    return u, CoulombFrame(o)


@njit(cache=True)
def _frame_inward(r, p_re, p_im, m_re, m_im, dx, o_end):
    """Inward RK4 for d_x O = O * (r R(psi1)), with a Newton-Schulz
    re-orthonormalization sweep per step."""
    n = r.shape[0]
    o = np.zeros((n, 3, 3))
    o[n - 1] = o_end

    def rhs(oj, rr, pr, pi):
        a = np.zeros((3, 3))
        a[0, 2] = rr * pr
        a[1, 2] = rr * pi
        a[2, 0] = -rr * pr
        a[2, 1] = -rr * pi
        return oj @ a

    for j in range(n - 1, 0, -1):
        oj = o[j]
        rj, rl = r[j], r[j - 1]
        rm = np.sqrt(rj * rl)
        k1 = rhs(oj, rj, p_re[j], p_im[j])
        k2 = rhs(oj - 0.5 * dx * k1, rm, m_re[j - 1], m_im[j - 1])
        k3 = rhs(oj - 0.5 * dx * k2, rm, m_re[j - 1], m_im[j - 1])
        k4 = rhs(oj - dx * k3, rl, p_re[j - 1], p_im[j - 1])
        on = oj - dx / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        # one Newton-Schulz sweep: O <- O (3I - O^T O)/2
        g = on.T @ on
        corr = -0.5 * g
        corr[0, 0] += 1.5
        corr[1, 1] += 1.5
        corr[2, 2] += 1.5
        o[j - 1] = on @ corr
    return o


# --------------------------------------------------------------------------
# modulation parameters
# --------------------------------------------------------------------------

def modulation_params(
    grid: RadialGrid,
    psi2: np.ndarray | None = None,
    a2: np.ndarray | None = None,
    profile: SphereProfile | None = None,
    variant: str = "analytic",
    matching_radius: float = 1.0,
) -> ModulationParams:
    """Read (alpha, lambda) off the fields (analytic) or the map (geometric).

    The analytic variant matches A2(r0) = h3(lambda r0) and psi2(r0) =
    i e^{i alpha} h1(lambda r0); h3 is inverted in closed form,
    lambda r0 = sqrt((1+a)/(1-a)).  For a soliton both variants recover the
    exact parameters.
    """
    r0 = matching_radius

    def lam_of(a: float) -> float:
        if not -1.0 < a < 1.0:
            raise ParameterError(f"A2({r0}) = {a:.6f} out of (-1, 1); lambda undefined")
        return float(np.sqrt((1.0 + a) / (1.0 - a)) / r0)

    if variant == "analytic":
        if psi2 is None or a2 is None:
            raise ParameterError("analytic variant needs psi2 and a2")
        a = float(np.real(grid.interp(a2, r0)))
        p2 = complex(grid.interp(psi2, r0))
        lam = lam_of(a)
        h1v = float(np.sqrt(1.0 - a * a))
        alpha = float(np.angle(p2 / (1j * h1v)))
    elif variant == "geometric":
        if profile is None:
            raise ParameterError("geometric variant needs the map profile")
        a = float(grid.interp(profile.u[2], r0))
        lam = lam_of(a)
        alpha = float(
            np.arctan2(grid.interp(profile.u[1], r0), grid.interp(profile.u[0], r0))
        )
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    return ModulationParams(alpha=alpha, lam=lam, variant=variant)


def compatibility_residual(
    grid: RadialGrid, fields: GaugeFields
) -> tuple[float, float]:
    """Sup norms of d_r A2 - Im(psi1 conj(psi2)) and d_r psi2 - i A2 psi1."""
    da2 = d_dr(grid, fields.a2) - (fields.psi1 * np.conj(fields.psi2)).imag
    dp2 = (
        d_dr(grid, fields.psi2.real)
        + 1j * d_dr(grid, fields.psi2.imag)
        - 1j * fields.a2 * fields.psi1
    )
    return float(np.max(np.abs(da2))), float(np.max(np.abs(dp2)))
