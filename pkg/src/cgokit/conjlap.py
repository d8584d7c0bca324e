"""Conjugated Laplacian: symbol, characteristic-set geometry, regularized
inversion, and the Bourgain-type spectral norms.

With zeta = tau(e1 + i eta), |e1| = 1, eta perp e1, |eta| <= 1, the operator
e^{-x.zeta} Lap e^{x.zeta} is the Fourier multiplier

    p_zeta(xi) = (i xi + zeta)^2 = -(xi + tau eta)^2 + 2 i tau e1.xi + tau^2.

Its zero set is a circle of radius tau in the plane perpendicular to e1,
centered at -tau*eta; distance to that circle is the modulation. The symbol
vanishes simply there and is elliptic at high modulation, which is what the
clamped inverse and the X^b weights exploit.

All operations are pure; ZetaParams is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fieldcore import ComplexField, Grid3, spectral_l2


class ResonantZetaError(RuntimeError):
    """Raised when too many lattice modes fall inside the clamp floor."""


@dataclass(frozen=True)
class ZetaParams:
    """zeta = tau (U e1 + i U eta) with frame U in O(3) and eta in frame coords.

    eta[0] = 0 (eta perp e1 in the rotated frame) and |eta| <= 1; the null
    condition zeta.zeta = 0 holds exactly when |eta| = 1.
    """

    tau: float
    frame: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.frame, dtype=np.float64)
        eta = np.asarray(self.eta, dtype=np.float64)
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if U.shape != (3, 3) or np.max(np.abs(U.T @ U - np.eye(3))) > 1e-10:
            raise ValueError("frame must be orthogonal to 1e-10")
        if eta.shape != (3,):
            raise ValueError("eta must be a 3-vector (frame coordinates)")
        if abs(eta[0]) > 1e-12:
            raise ValueError("eta must be perpendicular to e1 in the rotated frame")
        if np.linalg.norm(eta) > 1.0 + 1e-12:
            raise ValueError("|eta| must be <= 1")
        object.__setattr__(self, "frame", U)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def null(cls, tau: float, frame=None) -> "ZetaParams":
        """zeta = tau U (e1 + i e2), the null-condition workhorse."""
        if frame is None:
            frame = np.eye(3)
        return cls(float(tau), np.asarray(frame, dtype=float), np.array([0.0, 1.0, 0.0]))

    @classmethod
    def from_vectors(cls, re: np.ndarray, im: np.ndarray) -> "ZetaParams":
        """Build from spatial Re zeta, Im zeta with Re perp Im, |Im| <= |Re|."""
        re = np.asarray(re, dtype=float)
        im = np.asarray(im, dtype=float)
        tau = float(np.linalg.norm(re))
        if tau <= 0:
            raise ValueError("Re zeta must be nonzero")
        if abs(float(re @ im)) > 1e-9 * tau * max(np.linalg.norm(im), 1.0):
            raise ValueError("Re zeta and Im zeta must be orthogonal")
        e1 = re / tau
        nim = np.linalg.norm(im)
        if nim < 1e-300:
            e2 = _any_unit_perp(e1)
            eta_len = 0.0
        else:
            e2 = im / nim
            eta_len = nim / tau
        e3 = np.cross(e1, e2)
        U = np.stack([e1, e2, e3], axis=1)
        return cls(tau, U, np.array([0.0, eta_len, 0.0]))

    @property
    def e1(self) -> np.ndarray:
        return self.frame[:, 0]

    @property
    def e2(self) -> np.ndarray:
        return self.frame[:, 1]

    @property
    def e3(self) -> np.ndarray:
        return self.frame[:, 2]

    @property
    def re(self) -> np.ndarray:
        """Re zeta, spatial."""
        return self.tau * self.e1

    @property
    def im(self) -> np.ndarray:
        """Im zeta (= tau * eta), spatial."""
        return self.tau * (self.frame @ self.eta)

    @property
    def zeta(self) -> np.ndarray:
        return self.re + 1j * self.im

    @property
    def zeta_dot_zeta(self) -> complex:
        z = self.zeta
        return complex(z @ z)

    @property
    def null_condition(self) -> bool:
        return bool(abs(np.linalg.norm(self.eta) - 1.0) <= 1e-12)


def _any_unit_perp(v):
    a = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    w = np.cross(v, a)
    return w / np.linalg.norm(w)


@dataclass(frozen=True)
class CharSetGeometry:
    """The zero circle of p_zeta: center -tau*eta in the plane e1^perp, radius tau."""

    center: np.ndarray
    radius: float
    normal: np.ndarray

    @classmethod
    def of(cls, z: ZetaParams) -> "CharSetGeometry":
        return cls(center=-z.im, radius=z.tau, normal=z.e1)

    def contains_origin(self) -> bool:
        return bool(abs(np.linalg.norm(self.center) - self.radius) <= 1e-12 * self.radius)


# ---------------------------------------------------------------------------
# symbol and modulation


def symbol_p(xi, z: ZetaParams):
    """p_zeta(xi) = -(|xi|^2 + 2 xi.Im + |Im|^2) + tau^2 + 2i xi.Re."""
    xi = np.asarray(xi, dtype=np.float64)
    im, re = z.im, z.re
    dot_im = xi @ im
    dot_re = xi @ re
    norm2 = np.sum(xi * xi, axis=-1)
    return -(norm2 + 2.0 * dot_im + float(im @ im)) + z.tau**2 + 2j * dot_re


def symbol_on_grid(grid: Grid3, z: ZetaParams) -> np.ndarray:
    f1, f2, f3 = grid.freqs()
    im, re = z.im, z.re
    norm2 = f1**2 + f2**2 + f3**2
    dot_im = f1 * im[0] + f2 * im[1] + f3 * im[2]
    dot_re = f1 * re[0] + f2 * re[1] + f3 * re[2]
    return -(norm2 + 2.0 * dot_im + float(im @ im)) + z.tau**2 + 2j * dot_re


def dist_to_char(xi, z: ZetaParams):
    """Euclidean distance from xi to the circle Sigma_zeta (the modulation)."""
    xi = np.asarray(xi, dtype=np.float64)
    e1, im, tau = z.e1, z.im, z.tau
    proj = xi @ e1
    perp = xi - np.multiply.outer(proj, e1) + im
    ring = np.abs(np.sqrt(np.sum(perp * perp, axis=-1)) - tau)
    return np.sqrt(proj**2 + ring**2)


def dist_on_grid(grid: Grid3, z: ZetaParams) -> np.ndarray:
    e1, im, tau = z.e1, z.im, z.tau
    f1, f2, f3 = grid.freqs()
    proj = f1 * e1[0] + f2 * e1[1] + f3 * e1[2]
    p1 = f1 - proj * e1[0] + im[0]
    p2 = f2 - proj * e1[1] + im[1]
    p3 = f3 - proj * e1[2] + im[2]
    ring = np.abs(np.sqrt(p1**2 + p2**2 + p3**2) - tau)
    return np.sqrt(proj**2 + ring**2)


# ---------------------------------------------------------------------------
# forward / clamped inverse


@dataclass
class InverseReport:
    clamp_count: int
    clamp_fraction: float
    min_abs_p: float


def apply_delta_zeta(f: ComplexField, z: ZetaParams) -> ComplexField:
    return ComplexField.from_spectrum(f.grid, symbol_on_grid(f.grid, z) * f.spectrum)


def inverse_multiplier(grid: Grid3, z: ZetaParams, delta: float = 1e-3):
    """Magnitude-clamped 1/p_zeta and the clamp report.

    1/p where |p| >= delta*tau; conj(p)/(delta*tau*|p|) (magnitude clamped at
    1/(delta*tau), phase preserved) where 0 < |p| < delta*tau; 0 on exact
    zeros of p.
    """
    if not (0.0 < delta <= 1e-1):
        raise ValueError("delta must lie in (0, 1e-1]")
    p = symbol_on_grid(grid, z)
    absp = np.abs(p)
    floor = delta * z.tau
    clamped = absp < floor
    n_clamped = int(np.sum(clamped))
    mult = np.zeros_like(p)
    good = ~clamped
    mult[good] = 1.0 / p[good]
    small = clamped & (absp > 0)
    mult[small] = np.conj(p[small]) / (floor * absp[small])
    report = InverseReport(
        clamp_count=n_clamped,
        clamp_fraction=n_clamped / grid.npoints,
        min_abs_p=float(absp.min()),
    )
    return mult, report


def apply_delta_zeta_inverse(f: ComplexField, z: ZetaParams, delta: float = 1e-3):
    """Regularized inverse; refuses zeta with more than 1% of modes clamped."""
    mult, report = inverse_multiplier(f.grid, z, delta)
    if report.clamp_fraction > 0.01:
        raise ResonantZetaError("resonant zeta; jitter tau")
    return ComplexField.from_spectrum(f.grid, mult * f.spectrum), report


def jitter_tau(z: ZetaParams, grid: Grid3, delta: float, rng, max_tries: int = 8) -> ZetaParams:
    """Resample tau by a uniform factor in [1, 1.01] while the clamp count
    exceeds 0.1% of modes (freedom in choosing Re zeta)."""
    current = z
    for _ in range(max_tries):
        _, report = inverse_multiplier(grid, current, delta)
        if report.clamp_fraction <= 1e-3:
            return current
        factor = rng.uniform(1.0, 1.01)
        current = ZetaParams(current.tau * factor, current.frame, current.eta)
    return current


# ---------------------------------------------------------------------------
# X^b and H^b_tau norms


def _weighted_spectral_norm(f: ComplexField, weights: np.ndarray) -> float:
    return spectral_l2(f.grid, weights * f.spectrum)


def xb_norm(f: ComplexField, z: ZetaParams, b: float, homogeneous: bool = False) -> float:
    """|| |p_zeta|^b f || (homogeneous) or ||(|p_zeta| + tau)^b f|| in spectral l^2.

    The homogeneous variant with b < 0 is undefined when spectral mass sits
    on an exact zero of p_zeta.
    """
    if not -1.0 <= b <= 1.0:
        raise ValueError("b must lie in [-1, 1]")
    absp = np.abs(symbol_on_grid(f.grid, z))
    if homogeneous:
        zero = absp == 0.0
        if b < 0:
            spec_l2_scale = np.sqrt(np.sum(np.abs(f.spectrum) ** 2))
            if np.any(zero) and np.any(
                np.abs(f.spectrum[zero]) > 1e-14 * max(spec_l2_scale, 1e-300)
            ):
                raise ValueError("homogeneous norm undefined on kernel modes")
            weights = np.zeros_like(absp)
            weights[~zero] = absp[~zero] ** b
        else:
            # 0^b * coefficient = 0 convention for b >= 0
            weights = absp**b if b > 0 else np.ones_like(absp)
    else:
        weights = (absp + z.tau) ** b
    return _weighted_spectral_norm(f, weights)


def hb_tau_norm(f: ComplexField, tau: float, b: float) -> float:
    """Semiclassical norm ||(|xi| + tau)^b f|| in spectral l^2."""
    weights = (f.grid.freq_norm() + tau) ** b
    return _weighted_spectral_norm(f, weights)
