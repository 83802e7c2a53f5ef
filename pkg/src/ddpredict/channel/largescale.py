"""Spatially consistent large-scale fading.

Each stochastic large-scale parameter (Rician K-factor, shadow fading) is a
Gaussian random field over space with a two-branch autocorrelation
(Gaussian decay inside the decorrelation distance, exponential beyond),
cross-correlated with the other parameters and combined between the two
link endpoints.  Deterministic log-distance means come from the same
functional form as the general path loss.
"""

from __future__ import annotations

import numpy as np

from ddpredict.errors import NumericalError
from ddpredict.scenario import LSCoefficients

# Diagonal loadings tried (in order) when the sample correlation matrix is
# numerically rank-deficient; trajectories sampled far below the
# decorrelation distance routinely need the first nonzero level.
_CHOLESKY_JITTERS = (0.0, 1e-10, 1e-8)

# The two-branch autocorrelation is not a positive-definite kernel, so a
# long trajectory can produce a genuinely indefinite sample matrix.  The
# factorization then falls back to clipping negative eigenvalues, which
# perturbs each pairwise correlation by at most |negative mass| / n; we
# refuse geometries where that bound visibly distorts the model.
_MAX_NEGATIVE_MASS_FRACTION = 0.02


def autocorrelation(d, d_lambda: float):
    """Spatial autocorrelation at lag ``d`` meters.

    Gaussian decay exp(-d^2/d_lambda^2) below the decorrelation distance,
    exponential decay exp(-d/d_lambda) at or beyond it; both branches equal
    e^-1 at d = d_lambda.
    """
    if d_lambda <= 0:
        raise ValueError(f"d_lambda must be > 0, got {d_lambda}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("lag distance must be >= 0")
    ratio = d / d_lambda
    return np.where(ratio < 1.0, np.exp(-(ratio**2)), np.exp(-ratio))


def _factor_correlation(corr: np.ndarray) -> np.ndarray:
    for jitter in _CHOLESKY_JITTERS:
        try:
            return np.linalg.cholesky(corr + jitter * np.eye(corr.shape[0]))
        except np.linalg.LinAlgError:
            continue
    # Indefinite sample matrix: project onto the PSD cone by clipping
    # negative eigenvalues, then rescale rows so every sample keeps unit
    # variance.  The resulting factor realizes the nearest achievable
    # correlation; per-entry deviation from the target is bounded by the
    # clipped negative mass spread over the eigenvectors.
    n = corr.shape[0]
    eigvals, eigvecs = np.linalg.eigh(corr)
    negative_mass = float(-np.sum(eigvals[eigvals < 0.0]))
    if not np.isfinite(negative_mass) or negative_mass > _MAX_NEGATIVE_MASS_FRACTION * n:
        raise NumericalError(
            "correlation matrix factorization failed for "
            f"{n} positions (min eigenvalue {eigvals[0]:.3e}, clipped "
            f"negative mass {negative_mass:.3e} exceeds {_MAX_NEGATIVE_MASS_FRACTION} * n)"
        )
    factor = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    scale = np.linalg.norm(factor, axis=1)
    if np.any(scale <= 0.0):
        raise NumericalError(
            f"correlation matrix factorization failed for {n} positions "
            "(clipped factor has a zero-variance row)"
        )
    return factor / scale[:, None]


def correlated_field(
    positions: np.ndarray, coeffs: LSCoefficients, rng: np.random.Generator
) -> np.ndarray:
    """Zero-mean unit-variance Gaussian field sampled at ``positions``.

    The field's correlation between two samples equals
    ``autocorrelation(distance)``.  Exact dense factorization of the sample
    correlation matrix; duplicate positions are collapsed first so they get
    bit-identical values (and so a static trajectory yields a constant
    field).
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    if positions.shape[0] == 0:
        raise ValueError("need at least one position")
    unique, inverse = np.unique(positions, axis=0, return_inverse=True)
    n = unique.shape[0]
    if n == 1:
        value = rng.standard_normal(1)
        return np.repeat(value, positions.shape[0])
    dists = np.linalg.norm(unique[:, None, :] - unique[None, :, :], axis=-1)
    corr = autocorrelation(dists, coeffs.decorr_distance)
    np.fill_diagonal(corr, 1.0)
    chol = _factor_correlation(corr)
    field = chol @ rng.standard_normal(n)
    return field[inverse]


def combine_endpoint_fields(field_tx, field_rx, link_distance, d_lambda: float):
    """Combine the field values at the two link endpoints.

    ``(X_tx + X_rx) / (2*sqrt(rho(d)) + 1)`` with d the transmitter to
    receiver distance; all arguments broadcast.
    """
    rho = autocorrelation(link_distance, d_lambda)
    return (np.asarray(field_tx) + np.asarray(field_rx)) / (2.0 * np.sqrt(rho) + 1.0)


def ls_mean(coeffs: LSCoefficients, f_ghz: float, d_2d, h_b: float, alpha_r):
    """Log-distance mean of a large-scale parameter (also the path loss law).

    ``base + freq*log10(f_GHz) + dist*log10(d_2D) + height*log10(h_B)
    + angle*alpha_R``.  Frequency is consumed in GHz.
    """
    d_2d = np.asarray(d_2d, dtype=float)
    if f_ghz <= 0 or h_b <= 0 or np.any(d_2d <= 0):
        raise ValueError("f_ghz, d_2d and h_b must all be > 0")
    return (
        coeffs.base
        + coeffs.freq_coeff * np.log10(f_ghz)
        + coeffs.dist_coeff * np.log10(d_2d)
        + coeffs.height_coeff * np.log10(h_b)
        + coeffs.angle_coeff * np.asarray(alpha_r, dtype=float)
    )


def cross_correlate(fields: np.ndarray, corr_matrix: np.ndarray) -> np.ndarray:
    """Impose a cross-correlation structure on independent unit fields.

    ``fields`` is (P, n) with one row per large-scale parameter;
    ``corr_matrix`` is the symmetric positive (semi-)definite P x P target
    with unit diagonal.  Mixing uses the symmetric matrix square root, so
    a diagonal target returns the inputs untouched.
    """
    fields = np.asarray(fields, dtype=float)
    corr_matrix = np.asarray(corr_matrix, dtype=float)
    p = corr_matrix.shape[0]
    if corr_matrix.shape != (p, p) or fields.shape[0] != p:
        raise ValueError("corr_matrix must be square and match the field count")
    if not np.allclose(corr_matrix, corr_matrix.T, atol=1e-12):
        raise ValueError("corr_matrix must be symmetric")
    if not np.allclose(np.diag(corr_matrix), 1.0, atol=1e-12):
        raise ValueError("corr_matrix must have unit diagonal")
    if np.array_equal(corr_matrix, np.eye(p)):
        return fields.copy()
    eigvals, eigvecs = np.linalg.eigh(corr_matrix)
    if eigvals[0] < -1e-12:
        raise ValueError(
            f"corr_matrix is not positive semi-definite (min eigenvalue {eigvals[0]:.3e})"
        )
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    return root @ fields
