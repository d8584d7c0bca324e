"""Cauchy-Riemann operator in a rotated plane and its periodic inverse.

dbar_e = e1.grad + i e2.grad acts fiberwise in the planes spanned by
(e1, e2); on the dual lattice it is multiplication by i(xi.e1 + i xi.e2).
The inverse zeroes the kernel line {xi.e1 = xi.e2 = 0} (a true
pseudo-inverse: dbar dbar^{-1} = identity minus the fiberwise mean), which
replaces the free-space Cauchy transform with kernel 1/(2 pi z). The
difference is fiber constants plus wraparound tails, both controlled by the
support clearance built into the box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fieldcore import ComplexField, Grid3, VectorField, fourier_coefficient, norm, spectral_l2


@dataclass(frozen=True)
class ComplexFrame:
    """Orthonormal pair (e1, e2); e = e1 + i e2, completion e3 = e1 x e2."""

    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        e1 = np.asarray(self.e1, dtype=np.float64)
        e2 = np.asarray(self.e2, dtype=np.float64)
        if abs(np.linalg.norm(e1) - 1) > 1e-12 or abs(np.linalg.norm(e2) - 1) > 1e-12:
            raise ValueError("frame vectors must be unit")
        if abs(float(e1 @ e2)) > 1e-12:
            raise ValueError("frame vectors must be orthogonal")
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def e3(self) -> np.ndarray:
        return np.cross(self.e1, self.e2)

    @property
    def e(self) -> np.ndarray:
        return self.e1 + 1j * self.e2

    @classmethod
    def from_zeta(cls, z) -> "ComplexFrame":
        """Frame of a null zeta = tau(e1 + i e2)."""
        if not z.null_condition:
            raise ValueError("zeta must satisfy the null condition |eta| = 1")
        im = z.im / z.tau
        return cls(z.e1, im)


def _e_dot_xi(grid: Grid3, frame: ComplexFrame) -> np.ndarray:
    """Complex scalar e.xi = xi.e1 + i xi.e2 on the lattice."""
    return grid.freq_dot(frame.e1) + 1j * grid.freq_dot(frame.e2)


def dbar_apply(f: ComplexField, frame: ComplexFrame) -> ComplexField:
    """Multiply the spectrum by i(xi.e1 + i xi.e2)."""
    sym = 1j * _e_dot_xi(f.grid, frame)
    return ComplexField.from_spectrum(f.grid, sym * f.spectrum)


def kernel_line_mask(grid: Grid3, frame: ComplexFrame) -> np.ndarray:
    """Lattice modes with xi.e1 = xi.e2 = 0 (up to rounding)."""
    tol = 1e-9 * (2.0 * np.pi / grid.L)
    return np.abs(_e_dot_xi(grid, frame)) <= tol


def dbar_inverse(f: ComplexField, frame: ComplexFrame):
    """Periodic spectral inverse; returns (field, kernel_mass).

    Kernel-line modes are zeroed; kernel_mass is their L^2 mass, the
    diagnostic for how far dbar dbar^{-1} f sits from f.
    """
    grid = f.grid
    edot = _e_dot_xi(grid, frame)
    ker = kernel_line_mask(grid, frame)
    spec = f.spectrum
    out = np.zeros_like(spec)
    good = ~ker
    out[good] = spec[good] / (1j * edot[good])
    ker_spec = np.where(ker, spec, 0.0)
    kernel_mass = spectral_l2(grid, ker_spec)
    return ComplexField.from_spectrum(grid, out), kernel_mass


def fiber_mean_projection(f: ComplexField, frame: ComplexFrame) -> ComplexField:
    """Spectral projection onto the kernel line = fiberwise mean in (e1,e2)-planes."""
    ker = kernel_line_mask(f.grid, frame)
    return ComplexField.from_spectrum(f.grid, np.where(ker, f.spectrum, 0.0))


# ---------------------------------------------------------------------------
# Lemma-level checks


def in_plane_radius(grid: Grid3, frame: ComplexFrame) -> np.ndarray:
    """|w| with w = (x.e1, x.e2), the in-plane coordinate."""
    w1 = grid.coord_dot(frame.e1)
    w2 = grid.coord_dot(frame.e2)
    return np.sqrt(w1**2 + w2**2)


def check_dbli_decay(f: ComplexField, frame: ComplexFrame) -> float:
    """sup <w> |dbar^{-1} f| / ||f||_inf over the wraparound-free region.

    Requires f supported in the in-plane disc of radius 1/2; evaluation is
    restricted to |w| <= L/2 - 1/2.
    """
    grid = f.grid
    w = in_plane_radius(grid, frame)
    sup_f = norm(f, np.inf)
    if sup_f == 0.0:
        return 0.0
    outside = w > 0.5
    if np.any(np.abs(f.values[outside]) > 1e-12 * sup_f):
        raise ValueError("f must be supported in the in-plane disc of radius 1/2")
    g, _ = dbar_inverse(f, frame)
    trusted = w <= grid.L / 2.0 - 0.5
    bracket = np.sqrt(1.0 + w**2)
    vals = bracket * np.abs(g.values)
    return float(vals[trusted].max() / sup_f)


def verify_undophase(A: VectorField, frame: ComplexFrame, k, sign: int = -1):
    """Both sides of the phase-removal identity and their gap.

    lhs = e . integral A e^{sign * i phi} e^{i x.k} dx with
    phi = dbar_e^{-1}(e.A); rhs = e . A_hat(k). Requires k perp e1, e2.
    The default sign follows the lemma statement (e^{-i phi}); the identity
    holds for either sign when A is real.
    """
    k = np.asarray(k, dtype=np.float64)
    if abs(float(k @ frame.e1)) > 1e-9 or abs(float(k @ frame.e2)) > 1e-9:
        raise ValueError("k must be orthogonal to e1 and e2")
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    grid = A.grid
    e = frame.e
    eA = A.dot(e)
    phi, _ = dbar_inverse(eA, frame)
    phase = np.exp(1j * (sign * phi.values + grid.coord_dot(k)))
    lhs = 0j
    rhs = 0j
    for comp, ecomp in zip(A.components, e):
        lhs += ecomp * grid.cell_volume * np.sum(comp.values * phase)
        # integral of A e^{+i x.k} equals the transform evaluated at -k
        rhs += ecomp * fourier_coefficient(comp, -k)
    return complex(lhs), complex(rhs), abs(complex(lhs) - complex(rhs))
