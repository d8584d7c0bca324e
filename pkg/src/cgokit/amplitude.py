"""CGO amplitude a = e^{-i phi} and the mollifier / diagnostic machinery.

The phase solves the transport equation along the complex direction of a
null zeta = tau(e1 + i e2):

    phi = dbar_e^{-1}( chi * e.(P_{<=100 tau} A) ),

so that zeta.grad a = -i zeta.A_trunc a up to the dbar kernel-line residual.
The normalization is tau-free: dbar_e^{-1} applied to e.A, with the
frequency cap 100*tau retained from the construction.

The mollifier here is Schwartz with compactly supported spectrum (flat equal
to 1 on in-plane frequencies <= 1/2, vanishing above 1), so every moment
condition holds exactly and products with well-separated directional shells
vanish identically rather than just rapidly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fieldcore as fc
from .conjlap import ZetaParams, xb_norm
from .dbar import ComplexFrame, dbar_inverse, fiber_mean_projection
from .fieldcore import ComplexField, Grid3, VectorField, l2_norm_region, norm
from .multipliers import cutoff_profile, transition_profile


def radial_cutoff(grid: Grid3, r_plateau: float, r_support: float) -> ComplexField:
    """Smooth radial cutoff: 1 for |x| <= r_plateau, 0 for |x| >= r_support."""
    vals = transition_profile(grid.radius(), r_plateau, r_support)
    return ComplexField(grid, vals)


def chi_outer(grid: Grid3) -> ComplexField:
    """The cutoff chi: 1 on (11/16)B, supported in (7/8)B."""
    return radial_cutoff(grid, 11.0 / 16.0, 7.0 / 8.0)


def chi_inner(grid: Grid3) -> ComplexField:
    """The cutoff chi~: 1 on (1/2)B, supported in (5/8)B, so chi * chi~ = chi~."""
    return radial_cutoff(grid, 0.5, 5.0 / 8.0)


def unit_ball_mask(grid: Grid3) -> np.ndarray:
    return grid.radius() <= 1.0


# ---------------------------------------------------------------------------
# mollifier


@dataclass(frozen=True)
class Mollifier:
    """In-plane smoothing with spectral profile 1 on |xi_e| <= 1/2, 0 above 1."""

    flat_radius: float = 0.5
    support_radius: float = 1.0

    def profile(self, rho: np.ndarray) -> np.ndarray:
        return transition_profile(rho, self.flat_radius, self.support_radius)


def build_mollifier() -> Mollifier:
    return Mollifier()


def mollify(f: ComplexField, frame: ComplexFrame, mollifier: Mollifier | None = None) -> ComplexField:
    """Apply the 2-D mollifier in each (e1, e2)-plane as a spectral multiplier."""
    m = mollifier or Mollifier()
    g = f.grid
    rho = np.sqrt(g.freq_dot(frame.e1) ** 2 + g.freq_dot(frame.e2) ** 2)
    return fc.apply_symbol(f, m.profile(rho))


# ---------------------------------------------------------------------------
# amplitude bundle


@dataclass
class AmplitudeBundle:
    """Phase, amplitude, gradients and the pieces downstream assembly needs."""

    zeta: ZetaParams
    frame: ComplexFrame
    chi: ComplexField
    freq_cap: float
    a_trunc: VectorField  # P_{<=cap} A
    phi: ComplexField
    a: ComplexField
    grad_phi: VectorField
    grad_a: VectorField
    kernel_residual: ComplexField  # fiber-mean part of chi * e.A_trunc
    kernel_mass: float
    diagnostics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def truncate_frequency(A: VectorField, cap: float) -> VectorField:
    """Smooth radial frequency cap chi(|xi|/cap) applied componentwise."""
    g = A.grid
    sym = cutoff_profile(g.freq_norm() / cap)
    return VectorField(tuple(fc.apply_symbol(c, sym) for c in A.components))


def hessian_sup(f: ComplexField) -> float:
    """sup_x Frobenius norm of the spectral Hessian."""
    g = f.grid
    fs = f.spectrum
    freqs = g.freqs()
    total = np.zeros((g.N,) * 3)
    for i in range(3):
        for j in range(i, 3):
            d2 = fc.fft_inverse(g, -(freqs[i] * freqs[j]) * fs)
            w = 1.0 if i == j else 2.0
            total += w * np.abs(d2.values) ** 2
    return float(np.sqrt(total.max()))


def build_phase(
    A: VectorField,
    z: ZetaParams,
    chi: ComplexField | None = None,
    freq_cap: float | None = None,
    with_hessian: bool = True,
) -> AmplitudeBundle:
    """Construct a = e^{-i phi} with phi = dbar_e^{-1}(chi e.(P_{<=cap} A)).

    Requires a null zeta (the dbar frame is its real/imaginary pair). The
    default cap is 100*tau. A kernel-line residual above 1e-3 of the input
    mass is recorded as a warning, not an error.
    """
    if not z.null_condition:
        raise ValueError("build_phase needs a null zeta (|eta| = 1)")
    grid = A.grid
    frame = ComplexFrame.from_zeta(z)
    if chi is None:
        chi = chi_outer(grid)
    cap = 100.0 * z.tau if freq_cap is None else float(freq_cap)
    A_cap = truncate_frequency(A, cap)
    g_field = ComplexField(grid, chi.values * A_cap.dot(frame.e).values)
    phi, kernel_mass = dbar_inverse(g_field, frame)
    warnings = []
    g_norm = norm(g_field, 2)
    if g_norm > 0 and kernel_mass > 1e-3 * g_norm:
        warnings.append(
            f"dbar kernel mass {kernel_mass:.3e} exceeds 1e-3 of input mass {g_norm:.3e}"
        )
    a = ComplexField(grid, np.exp(-1j * phi.values))
    grad_phi = fc.grad(phi)
    grad_a = fc.grad(a)
    ball = unit_ball_mask(grid)
    diagnostics = {
        "phi_sup": norm(phi, np.inf),
        "grad_phi_l2_ball": float(
            np.sqrt(sum(l2_norm_region(c, ball) ** 2 for c in grad_phi.components))
        ),
        "a_sup": norm(a, np.inf),
        "grad_a_sup": norm(grad_a, np.inf),
        "grad_a_l2": norm(grad_a, 2),
        "grad_a_l2_ball": float(
            np.sqrt(sum(l2_norm_region(c, ball) ** 2 for c in grad_a.components))
        ),
    }
    if with_hessian:
        diagnostics["hess_a_sup"] = hessian_sup(a)
        diagnostics["amplitude_m"] = (
            diagnostics["a_sup"]
            + diagnostics["grad_a_sup"] / z.tau
            + diagnostics["hess_a_sup"] / z.tau**2
            + diagnostics["grad_a_l2"]
        )
    return AmplitudeBundle(
        zeta=z,
        frame=frame,
        chi=chi,
        freq_cap=cap,
        a_trunc=A_cap,
        phi=phi,
        a=a,
        grad_phi=grad_phi,
        grad_a=grad_a,
        kernel_residual=fiber_mean_projection(g_field, frame),
        kernel_mass=kernel_mass,
        diagnostics=diagnostics,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# frame-averaged diagnostics (left sides of the averaged lemmas)


def diag_h1(f: ComplexField, frame: ComplexFrame) -> float:
    """||dbar^{-1} grad f||_{L^2(B)} for one frame."""
    ball = unit_ball_mask(f.grid)
    total = 0.0
    for c in fc.grad(f).components:
        inv, _ = dbar_inverse(c, frame)
        total += l2_norm_region(inv, ball) ** 2
    return float(np.sqrt(total))


def diag_phili(f: ComplexField, frame: ComplexFrame) -> float:
    """||dbar^{-1} f||_inf for one frame."""
    inv, _ = dbar_inverse(f, frame)
    return norm(inv, np.inf)


def diag_lil2(f: ComplexField, frame: ComplexFrame) -> float:
    """Mixed norm sup_{y3} integral |f| dy1 dy2 in the frame's coordinates.

    Slab-binned along e3 with bin width h; exact slicing when e3 is a
    lattice axis.
    """
    grid = f.grid
    y3 = grid.coord_dot(frame.e3) + 0.0 * grid.radius()
    h = grid.h
    lo = float(y3.min())
    nbins = int(np.ceil((float(y3.max()) - lo) / h)) + 1
    idx = np.minimum(((y3 - lo) / h).astype(int), nbins - 1)
    sums = np.bincount(idx.ravel(), weights=np.abs(f.values).ravel(), minlength=nbins)
    return float(sums.max() * grid.cell_volume / h)


# ---------------------------------------------------------------------------
# X^{-1/2} diagnostics for the dangerous right-hand-side terms


def x_minus_half_of_aq(a: ComplexField, q: ComplexField, z: ZetaParams, chi: ComplexField) -> float:
    """||chi a q||_{X^{-1/2}_zeta}."""
    prod = ComplexField(a.grid, chi.values * a.values * q.values)
    return xb_norm(prod, z, -0.5)


def x_minus_half_of_lap_chia(a: ComplexField, chi: ComplexField, z: ZetaParams) -> float:
    """||Lap(chi a)||_{X^{-1/2}_zeta}."""
    prod = ComplexField(a.grid, chi.values * a.values)
    return xb_norm(fc.laplacian(prod), z, -0.5)
