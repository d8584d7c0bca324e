"""Haar sampling on O(3), L^p expectation estimators, and Monte-Carlo
verification of the averaged projection estimates.

The measure behind the (tau, U) averages is dm = (tau log tau)^{-1} dtau
dsigma(U) on [2, inf) x O(3), realized by log-uniform tau sampling with
importance weights 1/log(tau). The window [2^K, 2^{K^2}] has dm-mass
~ log K, which is where the (log K)^{-1/p} gains come from.

Sampling streams are splittable (numpy SeedSequence spawning), so plan
samples can run concurrently with deterministic results given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import multipliers as mp
from .conjlap import ZetaParams
from .fieldcore import ComplexField, Grid3, norm

_REFLECTION = np.diag([1.0, 1.0, -1.0])


def rotation_from_quaternion(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def sample_haar(rng, component: str = "full") -> np.ndarray:
    """Haar-uniform U in O(3): uniform unit quaternion -> SO(3), then a fair
    coin composes with a fixed reflection. component: 'full', 'so3', 'o3minus'."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    U = rotation_from_quaternion(q)
    if component == "so3":
        return U
    if component == "o3minus":
        return U @ _REFLECTION
    if component == "full":
        if rng.random() < 0.5:
            U = U @ _REFLECTION
        return U
    raise ValueError(f"unknown component {component!r}")


@dataclass
class SamplingPlan:
    """Reproducible (tau, U) sampling plan.

    tau_grid lists dyadic block starts tau*; each block contributes
    n_frames samples with tau log-uniform in [tau*, 2 tau*]. weight_mode
    'log-log' attaches the dm importance weights 1/log(tau); 'uniform'
    weights samples equally.
    """

    n_frames: int = 16
    tau_grid: tuple = (8.0, 16.0)
    K: int = 3
    weight_mode: str = "log-log"
    seed: int = 0
    component: str = "full"

    def __post_init__(self):
        if self.n_frames < 8:
            raise ValueError("n_frames must be >= 8")
        if self.weight_mode not in ("uniform", "log-log"):
            raise ValueError("weight mode must be 'uniform' or 'log-log'")

    def frames(self, n: int | None = None):
        """n Haar frames with a stream derived from the seed."""
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(0,)))
        return [sample_haar(rng, self.component) for _ in range(n or self.n_frames)]

    def tau_frame_samples(self):
        """List of (tau, U, weight) covering tau_grid x n_frames."""
        out = []
        for bi, tau_star in enumerate(self.tau_grid):
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1, bi)))
            for _ in range(self.n_frames):
                tau = float(tau_star * 2.0 ** rng.uniform(0.0, 1.0))
                w = 1.0 / np.log(tau) if self.weight_mode == "log-log" else 1.0
                out.append((tau, sample_haar(rng, self.component), w))
        return out


def expectation(values, p: float, weights=None) -> float:
    """E^p estimator: (weighted mean of |Z|^p)^{1/p}; normalization makes a
    constant Z = c return c for every p and any weights."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty sample set")
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite sample values")
    p = float(p)
    if p < 1.0 or np.isinf(p):
        raise ValueError("p must lie in [1, inf)")
    if weights is None:
        weights = np.ones_like(values)
    weights = np.asarray(weights, dtype=float)
    return float((np.sum(weights * np.abs(values) ** p) / np.sum(weights)) ** (1.0 / p))


def _bracket(x: float) -> float:
    return float(np.sqrt(1.0 + x * x))


# ---------------------------------------------------------------------------
# averaged projection estimates


def verify_pavg(u: ComplexField, lam: float, mu: float, nu: float, p: float, plan: SamplingPlan) -> float:
    """E^p[ <lam/nu>^{1/p} <lam/mu>^{1/p} ||P^{Ue1}_{<=mu} P^{Ue2}_{<=nu} P_lam u||_p ] / ||u||_p."""
    if not (8.0 * mu <= lam and 8.0 * nu <= lam):
        raise ValueError("need scale separation 8*mu <= lam and 8*nu <= lam")
    if float(p) not in (2.0, 3.0, 4.0):
        raise ValueError("p must be 2, 3 or 4")
    denom = _lp_any(u, p)
    if denom == 0.0:
        return 0.0
    shell = mp.apply(mp.lp_shell(lam), u)
    weight = _bracket(lam / nu) ** (1.0 / p) * _bracket(lam / mu) ** (1.0 / p)
    vals = []
    for U in plan.frames():
        piece = mp.apply(mp.dir_leq(mu, U[:, 0]), shell)
        piece = mp.apply(mp.dir_leq(nu, U[:, 1]), piece)
        vals.append(weight * _lp_any(piece, p))
    return expectation(vals, p) / denom


def _lp4(f: ComplexField) -> float:
    g = f.grid
    return float((g.cell_volume * np.sum(np.abs(f.values) ** 4)) ** 0.25)


def _lp_any(f: ComplexField, p: float) -> float:
    if float(p) == 4.0:
        return _lp4(f)
    return norm(f, p)


def verify_qavg(u: ComplexField, lam: float, nu: float, p: float, plan: SamplingPlan) -> float:
    """E^p over (tau,U) of the weighted ||Q_{<=nu} P_lam u||_p, over ||u||_p.

    Weight: (1 + log_+(tau/nu))^{5(1/p - 1/2)} <lam/nu>^{3/p - 1/2}.
    Requires nu <= tau/8 across the plan's tau blocks.
    """
    p = float(p)
    if not 2.0 <= p <= 4.0:
        raise ValueError("p must lie in [2, 4]")
    for tau_star in plan.tau_grid:
        if nu > tau_star / 8.0:
            raise ValueError("need nu <= tau/8 across the tau grid")
    denom = _lp_any(u, p)
    if denom == 0.0:
        return 0.0
    shell = mp.apply(mp.lp_shell(lam), u)
    logexp = 5.0 * (1.0 / p - 0.5)
    geom = _bracket(lam / nu) ** (3.0 / p - 0.5)
    vals, weights = [], []
    for tau, U, w in plan.tau_frame_samples():
        z = ZetaParams.null(tau, U)
        piece = mp.apply(mp.mod_leq(nu, z), shell)
        logw = (1.0 + max(np.log2(tau / nu), 0.0)) ** logexp
        vals.append(logw * geom * _lp_any(piece, p))
        weights.append(w)
    return expectation(vals, p, weights) / denom


def loggain_tau_window(K: int, grid: Grid3, safety: float = 0.5):
    """Dyadic tau* blocks in [2^K, 2^{K^2}] that the grid can resolve
    (characteristic circle inside the lattice, tau <= safety * |xi|_max-axis)."""
    tau_cap = safety * (2.0 * np.pi / grid.L) * (grid.N // 2)
    lo, hi = 2.0**K, 2.0 ** (K * K)
    blocks = []
    t = lo
    while t < hi and t <= tau_cap:
        blocks.append(t)
        t *= 2.0
    if not blocks:
        raise ValueError("K too large for the grid (tau above Nyquist cap)")
    return blocks


def verify_loggain(f: ComplexField, p: float, K: int, plan: SamplingPlan, alpha: float = 0.5) -> float:
    """(log K)^{1/p}-weighted dm-average of sum_{lam << tau} (lam/tau)^alpha
    (log tau)^{1/p} ||P_lam f||_p, normalized by ||f||_p."""
    p = float(p)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    grid = f.grid
    blocks = loggain_tau_window(K, grid)
    denom = _lp_any(f, p)
    if denom == 0.0:
        return 0.0
    shell_norms = {1.0: norm(mp.apply(mp.lp_leq(1.0), f), p)}
    for lam in mp.dyadic_shells(grid):
        shell_norms[lam] = norm(mp.apply(mp.lp_shell(lam), f), p)

    def inner_sum(tau):
        total = 0.0
        for lam, n_lam in shell_norms.items():
            if lam <= tau / 8.0:
                total += (lam / tau) ** alpha * n_lam
        return total * np.log(tau) ** (1.0 / p)

    rng = np.random.default_rng(np.random.SeedSequence(plan.seed, spawn_key=(2,)))
    vals, weights = [], []
    for tau_star in blocks:
        for _ in range(plan.n_frames):
            tau = float(tau_star * 2.0 ** rng.uniform(0.0, 1.0))
            vals.append(inner_sum(tau))
            weights.append(1.0 / np.log(tau))
    return np.log(K) ** (1.0 / p) * expectation(vals, p, weights) / denom


def loggain_oracle_single_shell(lam: float, p: float, K: int, grid: Grid3, alpha: float = 0.5) -> float:
    """Deterministic quadrature oracle for a one-shell f (||P_lam f||_p = 1).

    Computes [ integral (lam/tau)^{alpha p} (log tau)/(tau log tau) dtau /
    integral dm ]^{1/p} * (log K)^{1/p} over the same resolvable window.
    """
    blocks = loggain_tau_window(K, grid)
    lo, hi = blocks[0], blocks[-1] * 2.0

    def num_igrand(tau):
        if lam > tau / 8.0:
            return 0.0
        return ((lam / tau) ** alpha * np.log(tau) ** (1.0 / p)) ** p / (tau * np.log(tau))

    num, _ = integrate.quad(num_igrand, lo, hi, limit=200)
    den, _ = integrate.quad(lambda t: 1.0 / (t * np.log(t)), lo, hi, limit=200)
    return float(np.log(K) ** (1.0 / p) * (num / den) ** (1.0 / p))


# ---------------------------------------------------------------------------
# deterministic geometry oracles (sphere / annulus quadrature)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic quasi-uniform points on S^2 (Fibonacci lattice)."""
    i = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=1
    )


def pavg_oracle_single_shell(lam: float, mu: float, nu: float, n_sphere: int = 4000) -> float:
    """Sphere-cap quadrature for the p=2 pavg constant on a radius-lam shell.

    E_U[ s_mu(xi.Ue1)^2 s_nu(xi.Ue2)^2 ] at |xi| = lam equals the sphere
    average of the product symbol (Haar transfer to S^2); the pavg quantity
    for an isotropic one-shell field is then
    <lam/nu>^{1/2} <lam/mu>^{1/2} * sqrt(sphere average).
    """
    omega = fibonacci_sphere(n_sphere)
    s1 = mp.cutoff_profile(np.abs(lam * omega[:, 0]) / mu)
    s2 = mp.cutoff_profile(np.abs(lam * omega[:, 1]) / nu)
    avg = float(np.mean((s1 * s2) ** 2))
    return _bracket(lam / nu) ** 0.5 * _bracket(lam / mu) ** 0.5 * np.sqrt(avg)


def qavg_oracle_single_shell(
    lam: float, nu: float, tau_star: float, n_sphere: int = 2000, n_tau: int = 33
) -> float:
    """Deterministic (tau, omega) quadrature for the p=2 qavg constant.

    Averages the exact Q_{<=nu} symbol squared at radius lam over the
    sphere and a tau block [tau*, 2 tau*] (the annulus-volume computation
    done by quadrature), then applies the <lam/nu> weight.
    """
    omega = fibonacci_sphere(n_sphere)
    taus = tau_star * 2.0 ** np.linspace(0.0, 1.0, n_tau)
    xi = lam * omega  # frame fixed, direction averaged: Haar transfer
    acc = np.zeros(len(omega))
    for tau in taus:
        proj = xi[:, 0]
        perp = xi.copy()
        perp[:, 0] = 0.0
        perp[:, 1] += tau
        ring = np.abs(np.sqrt(np.sum(perp**2, axis=1)) - tau)
        sym = mp.cutoff_profile(ring / nu) * mp.cutoff_profile(np.abs(proj) / nu)
        acc += sym**2
    avg = float(np.mean(acc / len(taus)))
    return _bracket(lam / nu) * np.sqrt(avg)
