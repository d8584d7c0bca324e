"""cgokit: spectral construction of complex geometrical optics solutions for
the magnetic Schrodinger operator on a periodic 3-D grid, with the averaged
estimates and the Fourier-data recovery experiment that go with them."""

__version__ = "0.1.0"
