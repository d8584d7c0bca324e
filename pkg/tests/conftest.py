import numpy as np
import pytest

from cgokit.fieldcore import ComplexField, VectorField, make_grid


@pytest.fixture
def grid16():
    return make_grid(16, 4.0)


@pytest.fixture
def grid32():
    return make_grid(32, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_field(grid, rng, band_limit=None):
    """Random complex field, optionally band-limited to |xi| <= band_limit."""
    vals = rng.standard_normal((grid.N,) * 3) + 1j * rng.standard_normal((grid.N,) * 3)
    f = ComplexField(grid, vals)
    if band_limit is not None:
        spec = f.spectrum.copy()
        spec[grid.freq_norm() > band_limit] = 0.0
        f = ComplexField.from_spectrum(grid, spec)
    return f


def plane_wave(grid, ints):
    """e^{i xi0 . x} with xi0 = (2 pi / L) * ints, exactly on the lattice."""
    xi0 = 2.0 * np.pi / grid.L * np.asarray(ints, dtype=float)
    phase = grid.coord_dot(xi0)
    return ComplexField(grid, np.exp(1j * phase)), xi0


def gaussian_bump(grid, center=(0.0, 0.0, 0.0), width=0.15, amp=1.0):
    x1, x2, x3 = grid.coords()
    r2 = (x1 - center[0]) ** 2 + (x2 - center[1]) ** 2 + (x3 - center[2]) ** 2
    return ComplexField(grid, amp * np.exp(-r2 / (2.0 * width**2)))


def bump_in_half_ball(grid, rng, n_bumps=3, width=0.1, amp=1.0):
    """Smooth real scalar supported (to machine precision) in |x| <= 1/2."""
    x1, x2, x3 = grid.coords()
    r = grid.radius()
    envelope = np.zeros_like(r)
    inside = r < 0.5
    # C^inf envelope, exactly zero outside the half ball
    envelope[inside] = np.exp(-0.25 / (0.25 - r[inside] ** 2 + 1e-300))
    envelope *= np.e  # normalize peak to 1 at r = 0
    vals = np.zeros_like(r)
    for _ in range(n_bumps):
        c = rng.uniform(-0.2, 0.2, size=3)
        a = rng.uniform(0.5, 1.0) * amp * rng.choice([-1.0, 1.0])
        r2 = (x1 - c[0]) ** 2 + (x2 - c[1]) ** 2 + (x3 - c[2]) ** 2
        vals += a * np.exp(-r2 / (2.0 * width**2))
    return ComplexField(grid, vals * envelope)


def vector_bump_in_half_ball(grid, rng, **kw):
    return VectorField(tuple(bump_in_half_ball(grid, rng, **kw) for _ in range(3)))
