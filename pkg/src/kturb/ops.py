"""Discrete calculus on the periodic box.

Derivatives act in spectral space (multiplication by i*k); nonlinear
products are formed pointwise in physical space and dealiased with the
2/3 rule.  L^p norms use the uniform quadrature weight prod(L_i/N_i);
Sobolev seminorms use Plancherel sums over the half spectrum.
"""

import numpy as np

from .fields import ScalarField, SpectralScalar, SpectralVector, VectorField
from .grid import TorusGrid

LP_EXPONENTS = (1.0, 6.0 / 5.0, 3.0 / 2.0, 2.0, 3.0, 4.0, 6.0, np.inf)


# ---------------------------------------------------------------------------
# array-level kernels (shared with the dynamics hot path)

def grad_hat(grid, fhat):
    """Spectral gradient of one scalar spectrum: shape (3,) + spectral."""
    out = np.empty((3,) + grid.spectral_shape, dtype=complex)
    for i in range(3):
        np.multiply(fhat, 1j * grid.k[i], out=out[i])
    return out


def div_hat(grid, uhat):
    """Spectral divergence of a stacked vector spectrum."""
    return (
        1j * grid.k[0] * uhat[0]
        + 1j * grid.k[1] * uhat[1]
        + 1j * grid.k[2] * uhat[2]
    )


def leray_hat(grid, uhat):
    """Project a stacked vector spectrum onto divergence-free, zero-mean
    fields (in place) and return it."""
    kdotu = grid.k[0] * uhat[0] + grid.k[1] * uhat[1] + grid.k[2] * uhat[2]
    kdotu *= grid.k_sq_inv
    for i in range(3):
        uhat[i] -= grid.k[i] * kdotu
        uhat[i][0, 0, 0] = 0.0
    return uhat


def sym_grad_hat(grid, vhat):
    """Six independent entries of D = (grad v + grad v^T)/2 in spectral
    space, ordered (11, 22, 33, 12, 13, 23)."""
    k1, k2, k3 = grid.k
    out = np.empty((6,) + grid.spectral_shape, dtype=complex)
    out[0] = 1j * k1 * vhat[0]
    out[1] = 1j * k2 * vhat[1]
    out[2] = 1j * k3 * vhat[2]
    out[3] = 0.5j * (k2 * vhat[0] + k1 * vhat[1])
    out[4] = 0.5j * (k3 * vhat[0] + k1 * vhat[2])
    out[5] = 0.5j * (k3 * vhat[1] + k2 * vhat[2])
    return out


def l2sq_hat(grid, fhat, order=0):
    """Squared L2 norm of nabla^order f from its spectrum (Plancherel)."""
    power = np.abs(fhat) ** 2
    if order:
        power = power * grid.k_sq**order
    total = float(np.sum(power * grid.hermitian_weight))
    return total * grid.volume / grid.npoints**2


def lp_norm(grid, values, p):
    """Quadrature L^p norm of a physical array (any leading axes are
    treated as extra components summed into the same integral)."""
    if p == np.inf:
        return float(np.max(np.abs(values)))
    if not any(abs(p - q) < 1e-12 for q in LP_EXPONENTS[:-1]):
        raise ValueError(f"unsupported exponent p={p}")
    return float(np.sum(np.abs(values) ** p) * grid.cell_volume) ** (1.0 / p)


def integral(grid, values):
    return float(np.sum(values)) * grid.cell_volume


# ---------------------------------------------------------------------------
# field-level operations

def to_spectral(f):
    if isinstance(f, VectorField):
        return SpectralVector(f.grid, f.grid.rfft(f.values))
    return SpectralScalar(f.grid, f.grid.rfft(f.values))


def from_spectral(F):
    if isinstance(F, SpectralVector):
        return VectorField(F.grid, F.grid.irfft(F.coeffs))
    return ScalarField(F.grid, F.grid.irfft(F.coeffs))


def gradient(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField(g, g.irfft(grad_hat(g, g.rfft(f.values))))


def divergence(u: VectorField) -> ScalarField:
    g = u.grid
    return ScalarField(g, g.irfft(div_hat(g, g.rfft(u.values))))


def laplacian(f: ScalarField) -> ScalarField:
    g = f.grid
    return ScalarField(g, g.irfft(-g.k_sq * g.rfft(f.values)))


def sym_gradient(u: VectorField) -> np.ndarray:
    """Rate-of-strain tensor as a full symmetric (3, 3, N1, N2, N3) array."""
    g = u.grid
    six = g.irfft(sym_grad_hat(g, g.rfft(u.values)))
    out = np.empty((3, 3) + g.resolution)
    out[0, 0], out[1, 1], out[2, 2] = six[0], six[1], six[2]
    out[0, 1] = out[1, 0] = six[3]
    out[0, 2] = out[2, 0] = six[4]
    out[1, 2] = out[2, 1] = six[5]
    return out


def leray_project(u: VectorField) -> VectorField:
    g = u.grid
    return VectorField(g, g.irfft(leray_hat(g, g.rfft(u.values))))


def dealias(F):
    if isinstance(F, SpectralVector):
        return SpectralVector(F.grid, F.coeffs * F.grid.dealias_mask)
    return SpectralScalar(F.grid, F.coeffs * F.grid.dealias_mask)


def norm(f, p):
    """L^p norm, p in {1, 6/5, 3/2, 2, 3, 4, 6, inf}."""
    return lp_norm(f.grid, f.values, p)


def seminorm(f, order):
    """Homogeneous Sobolev seminorm: 1 -> |grad f|_2, 2 -> |lap f|_2,
    3 -> |grad lap f|_2."""
    if order not in (1, 2, 3):
        raise ValueError("seminorm order must be 1, 2 or 3")
    g = f.grid
    fhat = g.rfft(f.values)
    if isinstance(f, VectorField):
        return float(np.sqrt(sum(l2sq_hat(g, fhat[i], order) for i in range(3))))
    return float(np.sqrt(l2sq_hat(g, fhat, order)))


def inner(f, g):
    """Discrete L2 inner product via quadrature (components summed for
    vector fields)."""
    if f.grid != g.grid:
        raise ValueError("inner product requires a shared grid")
    return float(np.sum(f.values * g.values)) * f.grid.cell_volume


def gagliardo_ratios(f: ScalarField) -> dict:
    """Empirical interpolation-inequality ratios for one zero-mean field.

    Each value is the left-hand side of one of the inequalities used by
    the a-priori estimates divided by its right-hand side with unit
    constant; finite corpus maxima of these ratios serve as regression
    references, not as proofs of the constants.
    """
    g = f.grid
    fhat = g.rfft(f.values)
    l1 = lp_norm(g, f.values, 1)
    l2 = np.sqrt(l2sq_hat(g, fhat))
    l3 = lp_norm(g, f.values, 3)
    l6 = lp_norm(g, f.values, 6)
    linf = lp_norm(g, f.values, np.inf)
    l32 = lp_norm(g, f.values, 1.5)
    grad = g.irfft(grad_hat(g, fhat))
    g2 = np.sqrt(l2sq_hat(g, fhat, 1))
    g4 = lp_norm(g, grad, 4)
    g6 = lp_norm(g, grad, 6)
    g32 = lp_norm(g, grad, 1.5)
    lap2 = np.sqrt(l2sq_hat(g, fhat, 2))
    d3 = np.sqrt(l2sq_hat(g, fhat, 3))
    return {
        "grad_l4_sq": g4**2 / (g2 * d3),
        "l3_sq": l3**2 / (g2 * l2),
        "l6": l6 / g2,
        "grad_l6_sq": g6**2 / (d3 * g2),
        "grad_l4_mixed": g4**2 / (d3 * g32),
        "linf_lap_l1": linf / (lap2 + l1),
        "linf_lap": linf / lap2,
        "l32_interp": l32 / (np.sqrt(g32) * np.sqrt(l1) + l1),
    }
