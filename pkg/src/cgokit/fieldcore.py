"""Periodic grid, FFT-backed complex fields, norms and field file I/O.

The computational domain is a periodic box [-L/2, L/2)^3 sampled on an N^3
lattice. Compactly supported data (the unit ball B(0,1) and the potentials
living in B(0,1/2)) is embedded with enough clearance to the box boundary
that periodic wraparound stays below discretization error.

DFT convention: forward transform is the plain unnormalized sum, the inverse
carries 1/N^3 (numpy convention). All norms carry explicit cell-volume
weights h^3 so values are resolution-independent.

Everything here is pure: fields are immutable after construction and all
operations return new fields, so concurrent read access is safe. The lazy
spectrum cache is idempotent (a racing recompute produces the same array).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

_MAGIC = b"CGO1"
_KIND_SCALAR = 0x01
_KIND_VECTOR = 0x03

_SUPPORTED_EXPONENTS = (1.0, 6.0 / 5.0, 2.0, 3.0, 6.0, np.inf)


class FieldFormatError(ValueError):
    """Raised for malformed CGO1 field files."""


@dataclass
class Grid3:
    """Periodic N^3 grid on a box of side L centered at the origin.

    Physical points are x = -L/2 + h*i with h = L/N; the dual lattice is
    xi in (2*pi/L) * {-N/2, ..., N/2 - 1}^3 in fft order.
    """

    N: int
    L: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.N % 2 != 0 or self.N < 8:
            raise ValueError("N must be even and >= 8")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @property
    def npoints(self) -> int:
        return self.N**3

    def axis_coords(self) -> np.ndarray:
        """1-D physical coordinates, centered: -L/2 + h*arange(N)."""
        return -0.5 * self.L + self.h * np.arange(self.N)

    def axis_freqs(self) -> np.ndarray:
        """1-D dual frequencies in fft order, (2*pi/L) * integers."""
        return 2.0 * np.pi * sp_fft.fftfreq(self.N, d=self.h)

    def _cached(self, key, builder):
        out = self._cache.get(key)
        if out is None:
            out = builder()
            self._cache[key] = out
        return out

    def coords(self):
        """Tuple of three broadcastable (N,1,1)/(1,N,1)/(1,1,N) coordinate arrays."""

        def build():
            x = self.axis_coords()
            return (
                x.reshape(-1, 1, 1),
                x.reshape(1, -1, 1),
                x.reshape(1, 1, -1),
            )

        return self._cached("coords", build)

    def freqs(self):
        """Tuple of three broadcastable frequency arrays in fft order."""

        def build():
            xi = self.axis_freqs()
            return (
                xi.reshape(-1, 1, 1),
                xi.reshape(1, -1, 1),
                xi.reshape(1, 1, -1),
            )

        return self._cached("freqs", build)

    def freq_norm(self) -> np.ndarray:
        """|xi| on the full lattice, shape (N, N, N)."""

        def build():
            f1, f2, f3 = self.freqs()
            return np.sqrt(f1**2 + f2**2 + f3**2)

        return self._cached("freq_norm", build)

    def freq_max(self) -> float:
        """Largest |xi| on the lattice (corner mode)."""
        return float(np.sqrt(3.0) * (2.0 * np.pi / self.L) * (self.N // 2))

    def radius(self) -> np.ndarray:
        """|x| on the full lattice."""

        def build():
            x1, x2, x3 = self.coords()
            return np.sqrt(x1**2 + x2**2 + x3**2)

        return self._cached("radius", build)

    def freq_dot(self, v) -> np.ndarray:
        """xi . v on the lattice for a fixed real 3-vector v."""
        f1, f2, f3 = self.freqs()
        return f1 * v[0] + f2 * v[1] + f3 * v[2]

    def coord_dot(self, v) -> np.ndarray:
        """x . v on the lattice for a fixed real 3-vector v."""
        x1, x2, x3 = self.coords()
        return x1 * v[0] + x2 * v[1] + x3 * v[2]


def make_grid(N: int, L: float) -> Grid3:
    """Build a periodic grid; rejects odd or tiny N and nonpositive L."""
    return Grid3(int(N), float(L))


class ComplexField:
    """Grid-sampled complex scalar with a lazily cached spectrum.

    values[ix, iy, iz] is the sample at x = (-L/2 + h*ix, ...); the z index
    is fastest in memory (C order), matching the file format.
    """

    __slots__ = ("grid", "values", "_spectrum")

    def __init__(self, grid: Grid3, values: np.ndarray, spectrum: np.ndarray | None = None):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (grid.N, grid.N, grid.N):
            raise ValueError(f"values shape {values.shape} does not match grid N={grid.N}")
        self.grid = grid
        self.values = values
        self._spectrum = spectrum

    @classmethod
    def from_spectrum(cls, grid: Grid3, spectrum: np.ndarray) -> "ComplexField":
        spectrum = np.asarray(spectrum, dtype=np.complex128)
        values = sp_fft.ifftn(spectrum, axes=(0, 1, 2))
        return cls(grid, values, spectrum=spectrum)

    @property
    def spectrum(self) -> np.ndarray:
        """Unnormalized forward DFT of the samples."""
        if self._spectrum is None:
            self._spectrum = sp_fft.fftn(self.values, axes=(0, 1, 2))
        return self._spectrum

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy())

    def _binary(self, other, op) -> "ComplexField":
        if isinstance(other, ComplexField):
            if other.grid.N != self.grid.N or other.grid.L != self.grid.L:
                raise ValueError("grid mismatch")
            return ComplexField(self.grid, op(self.values, other.values))
        return ComplexField(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return ComplexField(self.grid, -self.values)


@dataclass
class VectorField:
    """Three scalar components on a shared grid."""

    components: tuple

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError("VectorField needs exactly 3 components")
        g = self.components[0].grid
        for c in self.components[1:]:
            if c.grid.N != g.N or c.grid.L != g.L:
                raise ValueError("components must share one grid")

    @property
    def grid(self) -> Grid3:
        return self.components[0].grid

    @classmethod
    def from_arrays(cls, grid: Grid3, a1, a2, a3) -> "VectorField":
        return cls((ComplexField(grid, a1), ComplexField(grid, a2), ComplexField(grid, a3)))

    def __getitem__(self, i) -> ComplexField:
        return self.components[i]

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, other) -> "VectorField":
        return VectorField(tuple(c * other for c in self.components))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return VectorField(tuple(-c for c in self.components))

    def dot(self, v) -> ComplexField:
        """Pointwise dot with a constant 3-vector (complex allowed), no conjugation."""
        g = self.grid
        out = self.components[0].values * v[0]
        out = out + self.components[1].values * v[1]
        out = out + self.components[2].values * v[2]
        return ComplexField(g, out)

    def dot_field(self, other: "VectorField") -> ComplexField:
        """Pointwise A . B (no conjugation)."""
        out = self.components[0].values * other.components[0].values
        for i in (1, 2):
            out = out + self.components[i].values * other.components[i].values
        return ComplexField(self.grid, out)


# ---------------------------------------------------------------------------
# norms


def norm(f, p) -> float:
    """Discrete L^p norm with cell-volume weight h^3 (max norm for p=inf).

    Accepts a ComplexField or a VectorField (componentwise l^2 pointwise
    magnitude for vectors).
    """
    if isinstance(f, VectorField):
        mag2 = sum(np.abs(c.values) ** 2 for c in f.components)
        mag = np.sqrt(mag2)
        grid = f.grid
    else:
        mag = np.abs(f.values)
        grid = f.grid
    p = float(p)
    if not any(np.isclose(p, q) for q in _SUPPORTED_EXPONENTS):
        raise ValueError(f"unsupported exponent p={p}")
    if np.isinf(p):
        return float(mag.max()) if mag.size else 0.0
    return float((grid.cell_volume * np.sum(mag**p)) ** (1.0 / p))


def l2_norm_region(f: ComplexField, mask: np.ndarray) -> float:
    """L^2 norm restricted to a boolean region (used for L^2(B) diagnostics)."""
    vals = np.abs(f.values) ** 2
    return float(np.sqrt(f.grid.cell_volume * np.sum(vals[mask])))


def spectral_l2(grid: Grid3, spectrum: np.ndarray) -> float:
    """L^2 norm computed from an unnormalized spectrum (Parseval)."""
    return float(np.sqrt(grid.L**3 * np.sum(np.abs(spectrum) ** 2) / grid.N**6))


# ---------------------------------------------------------------------------
# spectral calculus


def fft_forward(f: ComplexField) -> np.ndarray:
    """Unnormalized forward DFT coefficients of the field."""
    return f.spectrum


def fft_inverse(grid: Grid3, spectrum: np.ndarray) -> ComplexField:
    """Field whose unnormalized DFT equals the given coefficients."""
    return ComplexField.from_spectrum(grid, spectrum)


def apply_symbol(f: ComplexField, symbol: np.ndarray) -> ComplexField:
    """Fourier multiplier: pointwise multiply the spectrum by `symbol`."""
    return ComplexField.from_spectrum(f.grid, f.spectrum * symbol)


def grad(f: ComplexField) -> VectorField:
    """Spectral gradient (multiplier i*xi per component)."""
    g = f.grid
    fs = f.spectrum
    comps = []
    for axis_freq in g.freqs():
        comps.append(ComplexField.from_spectrum(g, (1j * axis_freq) * fs))
    return VectorField(tuple(comps))


def divergence(v: VectorField) -> ComplexField:
    g = v.grid
    out = None
    for c, axis_freq in zip(v.components, g.freqs()):
        term = (1j * axis_freq) * c.spectrum
        out = term if out is None else out + term
    return ComplexField.from_spectrum(g, out)


def curl(v: VectorField) -> VectorField:
    g = v.grid
    f1, f2, f3 = g.freqs()
    s1, s2, s3 = (c.spectrum for c in v.components)
    c1 = 1j * (f2 * s3 - f3 * s2)
    c2 = 1j * (f3 * s1 - f1 * s3)
    c3 = 1j * (f1 * s2 - f2 * s1)
    return VectorField(
        tuple(ComplexField.from_spectrum(g, c) for c in (c1, c2, c3))
    )


def laplacian(f: ComplexField) -> ComplexField:
    g = f.grid
    return ComplexField.from_spectrum(g, -(g.freq_norm() ** 2) * f.spectrum)


def fourier_coefficient(f, k) -> complex:
    """Continuum-normalized Fourier transform h^3 * sum f(x) e^{-i k.x}.

    Exact for k on the dual lattice; for off-lattice k this is the plain
    cell-sum quadrature (valid when f is effectively supported in the box).
    Accepts scalar or vector fields (componentwise for vectors).
    """
    if isinstance(f, VectorField):
        return np.array([fourier_coefficient(c, k) for c in f.components])
    g = f.grid
    phase = np.exp(-1j * g.coord_dot(k))
    return complex(g.cell_volume * np.sum(f.values * phase))


# ---------------------------------------------------------------------------
# field file I/O (format "CGO1", see README)


def _write_header(fh, kind: int, N: int, L: float):
    fh.write(_MAGIC)
    fh.write(struct.pack("<B3x", kind))
    fh.write(struct.pack("<III", N, N, N))
    fh.write(struct.pack("<d", L))


def write_field(path, f) -> None:
    """Write a scalar or vector field in CGO1 format (bit-exact roundtrip)."""
    if isinstance(f, VectorField):
        kind, comps = _KIND_VECTOR, f.components
    else:
        kind, comps = _KIND_SCALAR, (f,)
    grid = comps[0].grid
    for c in comps:
        if not np.all(np.isfinite(c.values)):
            raise ValueError("refusing to write non-finite samples")
    with open(path, "wb") as fh:
        _write_header(fh, kind, grid.N, grid.L)
        for c in comps:
            interleaved = np.empty((grid.npoints, 2), dtype="<f8")
            flat = c.values.reshape(-1)
            interleaved[:, 0] = flat.real
            interleaved[:, 1] = flat.imag
            fh.write(interleaved.tobytes())


def read_field(path):
    """Read a CGO1 file; returns ComplexField or VectorField by kind byte."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _MAGIC:
        raise FieldFormatError("bad magic")
    if len(raw) < 28:
        raise FieldFormatError("truncated header")
    kind = raw[4]
    if kind not in (_KIND_SCALAR, _KIND_VECTOR):
        raise FieldFormatError(f"unknown kind byte 0x{kind:02x}")
    n1, n2, n3 = struct.unpack("<III", raw[8:20])
    if not (n1 == n2 == n3):
        raise FieldFormatError("dimension mismatch")
    (L,) = struct.unpack("<d", raw[20:28])
    grid = make_grid(n1, L)
    expected = 28 + kind * grid.npoints * 16
    if len(raw) != expected:
        raise FieldFormatError("truncated payload")
    payload = np.frombuffer(raw, dtype="<f8", offset=28)
    comps = []
    per = grid.npoints * 2
    for i in range(kind):
        block = payload[i * per : (i + 1) * per].reshape(-1, 2)
        vals = (block[:, 0] + 1j * block[:, 1]).reshape(grid.N, grid.N, grid.N)
        comps.append(ComplexField(grid, vals))
    if kind == _KIND_SCALAR:
        return comps[0]
    return VectorField(tuple(comps))
