"""Periodic box geometry and discrete Fourier machinery.

All fields live on a uniform collocation grid over the box
prod_i (0, L_i) with N_i points per axis.  Spectra use the real-FFT
half-spectrum layout (last axis holds N_3//2 + 1 modes).
"""

import numpy as np
import scipy.fft as _fft


class TorusGrid:
    """Geometry, wavenumber tables and transforms for one periodic box.

    Parameters
    ----------
    lengths : tuple of 3 positive floats
        Box edge lengths (L1, L2, L3).
    resolution : tuple of 3 even ints >= 4
        Collocation points per axis (N1, N2, N3).
    """

    def __init__(self, lengths=(2.0 * np.pi,) * 3, resolution=(32, 32, 32)):
        lengths = tuple(float(L) for L in lengths)
        resolution = tuple(int(N) for N in resolution)
        if len(lengths) != 3 or len(resolution) != 3:
            raise ValueError("lengths and resolution must have 3 entries")
        if any(L <= 0 for L in lengths):
            raise ValueError("box lengths must be positive")
        if any(N < 4 or N % 2 for N in resolution):
            raise ValueError("resolution entries must be even and >= 4")
        self.lengths = lengths
        self.resolution = resolution
        N1, N2, N3 = resolution
        L1, L2, L3 = lengths

        # Integer mode indices m in [-N/2, N/2); wavenumber k = 2*pi*m/L.
        m1 = np.rint(np.fft.fftfreq(N1) * N1).astype(np.int64)
        m2 = np.rint(np.fft.fftfreq(N2) * N2).astype(np.int64)
        m3 = np.rint(np.fft.rfftfreq(N3) * N3).astype(np.int64)
        self.modes = (
            m1.reshape(N1, 1, 1),
            m2.reshape(1, N2, 1),
            m3.reshape(1, 1, m3.size),
        )
        # Nyquist columns carry no sign information under odd (i k)
        # multipliers, so their derivative wavenumber is set to zero;
        # the 2/3 mask removes them from evolved fields anyway.
        def _wavenumbers(m, N, L):
            kd = m.astype(float)
            kd[np.abs(m) * 2 == N] = 0.0
            return (2.0 * np.pi / L) * kd

        self.k = (
            _wavenumbers(self.modes[0], N1, L1),
            _wavenumbers(self.modes[1], N2, L2),
            _wavenumbers(self.modes[2], N3, L3),
        )
        self.k_sq = self.k[0] ** 2 + self.k[1] ** 2 + self.k[2] ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(self.k_sq > 0.0, 1.0 / np.where(self.k_sq > 0, self.k_sq, 1.0), 0.0)
        self.k_sq_inv = inv  # zero at k = 0

        # 2/3-rule mask: True where the mode is kept (|m_i| <= N_i/3).
        keep = (
            (np.abs(self.modes[0]) * 3 <= N1)
            & (np.abs(self.modes[1]) * 3 <= N2)
            & (np.abs(self.modes[2]) * 3 <= N3)
        )
        self.dealias_mask = keep

        # Multiplicity of each half-spectrum entry in full-spectrum sums.
        w = np.full(m3.size, 2.0)
        w[0] = 1.0
        if N3 % 2 == 0:
            w[-1] = 1.0
        self.hermitian_weight = w.reshape(1, 1, m3.size)

        self.npoints = N1 * N2 * N3
        self.volume = L1 * L2 * L3
        self.cell_volume = self.volume / self.npoints
        self.min_spacing = min(L / N for L, N in zip(lengths, resolution))
        self.spectral_shape = (N1, N2, m3.size)

    def __eq__(self, other):
        return (
            isinstance(other, TorusGrid)
            and self.lengths == other.lengths
            and self.resolution == other.resolution
        )

    def __hash__(self):
        return hash((self.lengths, self.resolution))

    def __repr__(self):
        return f"TorusGrid(lengths={self.lengths}, resolution={self.resolution})"

    # -- transforms -------------------------------------------------------

    def rfft(self, values):
        """Forward real transform over the trailing three axes."""
        return _fft.rfftn(values, axes=(-3, -2, -1))

    def irfft(self, spectrum):
        """Inverse real transform over the trailing three axes."""
        return _fft.irfftn(spectrum, s=self.resolution, axes=(-3, -2, -1))

    def coordinates(self):
        """Collocation coordinates as three broadcastable arrays."""
        xs = []
        shapes = [(-1, 1, 1), (1, -1, 1), (1, 1, -1)]
        for L, N, shape in zip(self.lengths, self.resolution, shapes):
            xs.append((np.arange(N) * (L / N)).reshape(shape))
        return tuple(xs)

    def mode_count_nonmean(self, spectrum):
        """Number of nonzero coefficients away from k = 0."""
        n = int(np.count_nonzero(spectrum))
        if spectrum[..., 0, 0, 0] != 0:
            n -= 1
        return n
