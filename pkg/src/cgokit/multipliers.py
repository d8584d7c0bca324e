"""Dyadic projection calculus applied through the FFT.

Smooth radial Littlewood-Paley projections P_{<=lam} = chi(|xi|/lam),
directional projections along one frame vector or an (e1, e2) pair, and
modulation projections Q built from the plane cutoff times the annulus
cutoff around the characteristic circle of the conjugated Laplacian.

The cutoff profile chi is a pinned polynomial smooth-step: identically 1 on
[0, 3/4], identically 0 on [1, inf), with four matched derivatives at both
breakpoints. All symbols take values in [0, 1], so no projection increases
the L^2 norm.

Convention: dyadic parameters are powers of two >= 1. Sums over shells use
P_1 = P_{<=1} (stated per consumer where it matters).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .fieldcore import ComplexField, Grid3, apply_symbol, norm


def smoothstep_c4(u: np.ndarray) -> np.ndarray:
    """Order-9 polynomial step on [0,1] with S', .., S'''' = 0 at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u**5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))))


def cutoff_profile(t: np.ndarray) -> np.ndarray:
    """chi: 1 on [0, 3/4], 0 on [1, inf), monotone C^4 step between."""
    t = np.asarray(t, dtype=np.float64)
    return 1.0 - smoothstep_c4((t - 0.75) * 4.0)


def transition_profile(t, lo: float, hi: float) -> np.ndarray:
    """Generic 1 -> 0 smooth step: 1 for t <= lo, 0 for t >= hi."""
    t = np.asarray(t, dtype=np.float64)
    return 1.0 - smoothstep_c4((t - lo) / (hi - lo))


def is_dyadic(x: float) -> bool:
    if x < 1:
        return False
    m, e = np.frexp(x)
    return m == 0.5


def dyadic_shells(grid: Grid3):
    """Dyadic scales 2, 4, ..., up to the first power of two with chi = 1
    on the whole lattice (the Nyquist row then sits in the outermost shell)."""
    lam_max = 2.0
    while lam_max * 0.75 < grid.freq_max():
        lam_max *= 2.0
    out = []
    lam = 2.0
    while lam <= lam_max:
        out.append(lam)
        lam *= 2.0
    return out


@dataclass(frozen=True)
class MultiplierSpec:
    """Descriptor of one spectral symbol.

    variant: one of 'lp_leq', 'lp_eq', 'lp_gt', 'dir_leq', 'dir_eq',
    'mod_leq', 'mod_eq', 'mod_low', 'mod_high', 'symbol'.
    scale: dyadic lambda/nu where applicable.
    direction / direction2: unit vectors for directional cutoffs (a pair
    gives the product form chi(|xi.e1|/lam) chi(|xi.e2|/lam)).
    zeta: ZetaParams for modulation variants.
    fn: xi-array callable for the free-form 'symbol' variant.
    """

    variant: str
    scale: Optional[float] = None
    direction: Optional[tuple] = None
    direction2: Optional[tuple] = None
    zeta: object = None
    fn: Optional[Callable] = None

    def __post_init__(self):
        if self.variant in ("lp_leq", "lp_eq", "lp_gt", "dir_leq", "dir_eq", "mod_leq", "mod_eq"):
            if self.scale is None or not is_dyadic(self.scale):
                raise ValueError(f"{self.variant} needs a dyadic scale >= 1, got {self.scale}")
        if self.variant.startswith("dir"):
            if self.direction is None:
                raise ValueError("directional spec needs a direction")
            self._check_unit(self.direction)
            if self.direction2 is not None:
                self._check_unit(self.direction2)
                d1 = np.asarray(self.direction, dtype=float)
                d2 = np.asarray(self.direction2, dtype=float)
                if abs(float(d1 @ d2)) > 1e-10:
                    raise ValueError("directional pair must be orthonormal")
        if self.variant.startswith("mod") and self.zeta is None:
            raise ValueError("modulation spec needs zeta")
        if self.variant == "symbol" and self.fn is None:
            raise ValueError("symbol spec needs fn")

    @staticmethod
    def _check_unit(v):
        v = np.asarray(v, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("direction must be a unit vector")


# convenient constructors ----------------------------------------------------


def lp_leq(lam) -> MultiplierSpec:
    return MultiplierSpec("lp_leq", scale=float(lam))


def lp_shell(lam) -> MultiplierSpec:
    return MultiplierSpec("lp_eq", scale=float(lam))


def lp_gt(lam) -> MultiplierSpec:
    return MultiplierSpec("lp_gt", scale=float(lam))


def dir_leq(lam, e1, e2=None) -> MultiplierSpec:
    e2t = tuple(np.asarray(e2, float)) if e2 is not None else None
    return MultiplierSpec("dir_leq", scale=float(lam), direction=tuple(np.asarray(e1, float)), direction2=e2t)


def dir_shell(lam, e1, e2=None) -> MultiplierSpec:
    e2t = tuple(np.asarray(e2, float)) if e2 is not None else None
    return MultiplierSpec("dir_eq", scale=float(lam), direction=tuple(np.asarray(e1, float)), direction2=e2t)


def mod_leq(nu, zeta) -> MultiplierSpec:
    return MultiplierSpec("mod_leq", scale=float(nu), zeta=zeta)


def mod_shell(nu, zeta) -> MultiplierSpec:
    return MultiplierSpec("mod_eq", scale=float(nu), zeta=zeta)


def mod_low(zeta) -> MultiplierSpec:
    return MultiplierSpec("mod_low", zeta=zeta)


def mod_high(zeta) -> MultiplierSpec:
    return MultiplierSpec("mod_high", zeta=zeta)


def free_symbol(fn) -> MultiplierSpec:
    return MultiplierSpec("symbol", fn=fn)


# symbol evaluation -----------------------------------------------------------


def _dir_leq_symbol(grid: Grid3, lam, d1, d2) -> np.ndarray:
    s = cutoff_profile(np.abs(grid.freq_dot(d1)) / lam)
    if d2 is not None:
        s = s * cutoff_profile(np.abs(grid.freq_dot(d2)) / lam)
    return s


def _mod_leq_symbol(grid: Grid3, nu, zeta) -> np.ndarray:
    e1 = zeta.e1
    im = zeta.im  # tau * eta as a spatial vector
    tau = zeta.tau
    proj = grid.freq_dot(e1)
    f1, f2, f3 = grid.freqs()
    perp1 = f1 - proj * e1[0] + im[0]
    perp2 = f2 - proj * e1[1] + im[1]
    perp3 = f3 - proj * e1[2] + im[2]
    ring = np.abs(np.sqrt(perp1**2 + perp2**2 + perp3**2) - tau)
    return cutoff_profile(ring / nu) * cutoff_profile(np.abs(proj) / nu)


def symbol_values(spec: MultiplierSpec, grid: Grid3) -> np.ndarray:
    """Evaluate the spec's symbol on the grid's dual lattice."""
    v = spec.variant
    if v == "lp_leq":
        return cutoff_profile(grid.freq_norm() / spec.scale)
    if v == "lp_eq":
        return cutoff_profile(grid.freq_norm() / spec.scale) - cutoff_profile(
            grid.freq_norm() / (spec.scale / 2.0)
        )
    if v == "lp_gt":
        return 1.0 - cutoff_profile(grid.freq_norm() / spec.scale)
    if v == "dir_leq":
        return _dir_leq_symbol(grid, spec.scale, spec.direction, spec.direction2)
    if v == "dir_eq":
        return _dir_leq_symbol(grid, spec.scale, spec.direction, spec.direction2) - _dir_leq_symbol(
            grid, spec.scale / 2.0, spec.direction, spec.direction2
        )
    if v == "mod_leq":
        return _mod_leq_symbol(grid, spec.scale, spec.zeta)
    if v == "mod_eq":
        return _mod_leq_symbol(grid, spec.scale, spec.zeta) - _mod_leq_symbol(
            grid, spec.scale / 2.0, spec.zeta
        )
    if v == "mod_low":
        return _mod_leq_symbol(grid, spec.zeta.tau / 8.0, spec.zeta)
    if v == "mod_high":
        return 1.0 - _mod_leq_symbol(grid, spec.zeta.tau / 8.0, spec.zeta)
    if v == "symbol":
        f1, f2, f3 = grid.freqs()
        return np.asarray(spec.fn(f1, f2, f3))
    raise ValueError(f"unknown variant {v}")


def apply(spec: MultiplierSpec, f: ComplexField) -> ComplexField:
    """Apply the spec's symbol to a field through the FFT."""
    return apply_symbol(f, symbol_values(spec, f.grid))


def apply_vector(spec: MultiplierSpec, v):
    from .fieldcore import VectorField

    sym = symbol_values(spec, v.grid)
    return VectorField(tuple(apply_symbol(c, sym) for c in v.components))


# Besov norms -----------------------------------------------------------------


def besov_norm(f: ComplexField, s: float, p, q) -> float:
    """Discrete Besov norm ||f_{<=1}||_p + (sum_{lam>1} lam^{sq} ||f_lam||_p^q)^{1/q}.

    Used as the grid proxy for W^{s,3} (via B^s_{3,3}) and W^{-1,3}
    (via B^{-1}_{3,inf}). q = inf takes the sup over shells.
    """
    p = float(p)
    if p not in (2.0, 3.0, 6.0, np.inf):
        raise ValueError(f"unsupported p={p}")
    qf = float(q)
    if not (qf in (1.0, 2.0, np.inf) or np.isclose(qf, p)):
        raise ValueError(f"unsupported q={q}")
    base = norm(apply(lp_leq(1.0), f), p)
    pieces = []
    for lam in dyadic_shells(f.grid):
        nrm = norm(apply(lp_shell(lam), f), p)
        pieces.append(lam**s * nrm)
    pieces = np.array(pieces)
    if np.isinf(qf):
        tail = pieces.max() if pieces.size else 0.0
    else:
        tail = float(np.sum(pieces**qf) ** (1.0 / qf))
    return base + tail
