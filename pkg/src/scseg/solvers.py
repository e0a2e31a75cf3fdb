"""Least-squares and least-absolute-deviation fitting of a block to a dictionary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, SmoothModel


@dataclass(frozen=True, eq=False)
class AdmmState:
    z: np.ndarray
    u: np.ndarray
    rho: float


@dataclass(frozen=True, eq=False)
class FitResult:
    model: SmoothModel
    residuals: np.ndarray
    objective_l1: float
    iterations: int = 0

    @property
    def coefficients(self):
        return self.model.coefficients

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))


def soft_threshold(x, kappa):
    """sign(x) * max(|x| - kappa, 0), elementwise for arrays."""
    if np.ndim(kappa) == 0 and kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if np.ndim(x) == 0:
        return float(np.sign(x) * max(abs(x) - kappa, 0.0))
    return np.sign(x) * np.maximum(np.abs(x) - kappa, 0.0)


def _check_signal(d, f):
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    n = d.matrix.shape[0]
    if f.size != n:
        raise DimensionMismatchError(
            f"signal has {f.size} samples, dictionary expects {n}")
    if not np.all(np.isfinite(f)):
        raise ValueError("signal contains non-finite values")
    return f


def _result(d, f, alpha, iterations=0):
    residuals = f - d.matrix @ alpha
    return FitResult(SmoothModel(alpha, d.block_size), residuals,
                     float(np.abs(residuals).sum()), iterations)


def least_squares_fit(d, f) -> FitResult:
    f = _check_signal(d, f)
    return _result(d, f, d.pinv @ f)


def masked_least_squares_fit(d, f, keep):
    """Least-squares coefficients using only the samples where `keep` is set.

    Residuals are returned for every sample. Returns None when fewer samples
    than bases are kept.
    """
    f = _check_signal(d, f)
    keep = np.asarray(keep, dtype=bool).reshape(-1)
    if keep.size != f.size:
        raise DimensionMismatchError("mask length does not match signal")
    if keep.sum() < d.num_bases:
        return None
    alpha, *_ = np.linalg.lstsq(d.matrix[keep], f[keep], rcond=None)
    return _result(d, f, alpha)


def lad_fit_admm(d, f, rho=1.0, iterations=200, early_stop=False,
                 use_transpose=True, return_state=False):
    """Minimize ||f - P alpha||_1 by ADMM on the split P alpha - z = f.

    Each iteration performs, starting from z = u = 0,

        alpha <- (P^T P)^-1 P^T (f + z - u)
        z     <- S_{1/rho}(P alpha - f + u)
        u     <- u + P alpha - z - f

    With the orthonormal cosine dictionary (P^T P)^-1 P^T is P^T;
    ``use_transpose=False`` applies the precomputed pseudo-inverse instead.
    Early stopping on primal/dual residuals below 1e-6 * sqrt(len(f)) is off
    by default so exactly `iterations` sweeps run.
    """
    f = _check_signal(d, f)
    if not (np.isfinite(rho) and rho > 0):
        raise ValueError("rho must be positive")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    P = d.matrix
    A = P.T if use_transpose else d.pinv
    kappa = 1.0 / rho
    z = np.zeros_like(f)
    u = np.zeros_like(f)
    tol = 1e-6 * np.sqrt(f.size)
    alpha = np.zeros(d.num_bases)
    done = 0
    for _ in range(iterations):
        alpha = A @ (f + z - u)
        p_alpha = P @ alpha
        w = p_alpha - f + u
        z_prev = z
        z = np.sign(w) * np.maximum(np.abs(w) - kappa, 0.0)
        u = u + p_alpha - z - f
        done += 1
        if early_stop:
            primal = np.linalg.norm(p_alpha - z - f)
            dual = rho * np.linalg.norm(P.T @ (z - z_prev))
            if primal < tol and dual < tol:
                break
    result = _result(d, f, alpha, done)
    if return_state:
        return result, AdmmState(z, u, rho)
    return result


def lad_fit_irls_oracle(d, f, iterations=200, epsilon=1e-6) -> FitResult:
    """Iteratively reweighted least squares for the L1 fit; a cross-check only.

    Weights are 1 / max(|r_i|, epsilon). Returns the iterate with the
    smallest L1 objective seen, starting from the least-squares solution.
    """
    f = _check_signal(d, f)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    P = d.matrix
    alpha = d.pinv @ f
    best = alpha
    best_obj = np.abs(f - P @ alpha).sum()
    for _ in range(iterations):
        r = f - P @ alpha
        w = 1.0 / np.maximum(np.abs(r), epsilon)
        Pw = P * w[:, None]
        alpha = np.linalg.solve(P.T @ Pw, Pw.T @ f)
        obj = np.abs(f - P @ alpha).sum()
        if obj < best_obj:
            best, best_obj = alpha, obj
    return _result(d, f, best, iterations)
